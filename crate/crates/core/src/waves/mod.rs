//! Plane waves, phase and energy factors, and free propagators.

mod family;
mod kernel;
mod symbolic;

pub use family::{MomentumPoint, PlaneWaveFamily};
pub use kernel::{theta_window_weight, Branch, KernelKind, PropagatorKernel, TimeSense, Window};
pub use symbolic::{
    energy_power, energy_power_direct, energy_power_symbolic, eval_momentum, kg_symbolic, kg_residual, phase_factor,
    phase_series, phase_series_at, symbolic_wave, wave_residual, KgSymbolic, SymbolicWave, WaveResidual,
};

use crate::error::{QError, QResult};

/// Mass and light speed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Physics {
    pub mass: f64,
    pub c: f64,
}

impl Physics {
    pub fn new(mass: f64, c: f64) -> QResult<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(QError::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(QError::InvalidParameter(format!("light speed must be positive, got {c}")));
        }
        Ok(Physics { mass, c })
    }

    /// (mc)²
    pub fn rest2(&self) -> f64 {
        (self.mass * self.c).powi(2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Theory {
    Schrodinger,
    KleinGordon,
}

/// The four wave families: u_p, u^p, (u*)_p, (u*)^p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WaveVariant {
    Lower,
    Upper,
    DualLower,
    DualUpper,
}

impl WaveVariant {
    pub const ALL: [WaveVariant; 4] = [WaveVariant::Lower, WaveVariant::Upper, WaveVariant::DualLower, WaveVariant::DualUpper];

    /// Sign s of the time factor e^{i s ω t}.
    pub fn time_sign(self) -> f64 {
        match self {
            WaveVariant::Lower | WaveVariant::DualUpper => -1.0,
            WaveVariant::Upper | WaveVariant::DualLower => 1.0,
        }
    }

    /// Variant paired with this one under conjugation.
    pub fn conjugate(self) -> WaveVariant {
        match self {
            WaveVariant::Lower => WaveVariant::Upper,
            WaveVariant::Upper => WaveVariant::Lower,
            WaveVariant::DualLower => WaveVariant::DualUpper,
            WaveVariant::DualUpper => WaveVariant::DualLower,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WaveVariant::Lower => "u_p",
            WaveVariant::Upper => "u^p",
            WaveVariant::DualLower => "(u*)_p",
            WaveVariant::DualUpper => "(u*)^p",
        }
    }
}
