//! Run configuration: defaults, flat key/value files, environment overrides and flags.
//!
//! File format: one `key = value` per line; `#` starts a comment; blank lines are ignored.
//! Environment variables `QSPACE_<KEY>` (key upper-cased) override file values.
//! Command-line flags override both.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use qspace::qcoeff::DeformationParams;
use qspace::scatter::{BornVariant, Profile, SVariant};
use qspace::waves::TimeSense;
use std::fmt;
use std::path::PathBuf;

pub const ENV_PREFIX: &str = "QSPACE_";

/// Rejected configuration; maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialSpec {
    Builtin(Profile),
    /// JSON array of [re, im] pairs, one per lattice point (static) or per point and slice.
    File(PathBuf),
}

/// Every configurable value; see `KEYS` for the flat names.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub q: BigRational,
    pub classical: bool,
    pub order: u32,
    pub x0: BigRational,
    pub p0: BigRational,
    pub jmin: i32,
    pub jmax: i32,
    pub p_jmin: i32,
    pub p_jmax: i32,
    pub mass: BigRational,
    pub c: BigRational,
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub tol: f64,
    pub unitarity_tol: f64,
    pub cross_tol: f64,
    pub ratio_tol: f64,
    pub potential: String,
    pub strength: f64,
    pub width: f64,
    pub radius: f64,
    pub site_plus: usize,
    pub site_three: usize,
    pub potential_file: String,
    pub epsilon: f64,
    pub sense: String,
    pub variant: String,
    pub born_variant: String,
    pub s_order: usize,
    pub born_order: usize,
    pub dyson_order: usize,
    pub seed: u64,
    pub instances: usize,
    pub near_one: BigRational,
}

/// Flat key names in canonical order.
pub const KEYS: [&str; 35] = [
    "q",
    "classical",
    "order",
    "x0",
    "p0",
    "jmin",
    "jmax",
    "p_jmin",
    "p_jmax",
    "mass",
    "c",
    "t0",
    "t1",
    "dt",
    "tol",
    "unitarity_tol",
    "cross_tol",
    "ratio_tol",
    "potential",
    "strength",
    "width",
    "radius",
    "site_plus",
    "site_three",
    "potential_file",
    "epsilon",
    "sense",
    "variant",
    "born_variant",
    "s_order",
    "born_order",
    "dyson_order",
    "seed",
    "instances",
    "near_one",
];

impl Default for RunConfig {
    fn default() -> Self {
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        RunConfig {
            q: r(3, 2),
            classical: false,
            order: 8,
            x0: r(1, 1),
            p0: r(1, 1),
            jmin: -2,
            jmax: 1,
            p_jmin: 0,
            p_jmax: 1,
            mass: r(1, 1),
            c: r(5, 1),
            t0: 0.0,
            t1: 1.0,
            dt: 0.25,
            tol: 1e-12,
            unitarity_tol: 1e-12,
            cross_tol: 1e-8,
            ratio_tol: 0.2,
            potential: "gaussian".into(),
            strength: 300.0,
            width: 0.35,
            radius: 1.0,
            site_plus: 1,
            site_three: 1,
            potential_file: String::new(),
            epsilon: 0.2,
            sense: "retarded".into(),
            variant: "S_R".into(),
            born_variant: "psi_R".into(),
            s_order: 2,
            born_order: 2,
            dyson_order: 3,
            seed: 7,
            instances: 100,
            near_one: r(1_000_001, 1_000_000),
        }
    }
}

/// Exact rational from "a/b", an integer, or a plain decimal such as "1.1".
pub fn parse_rational(s: &str) -> Result<BigRational, ConfigError> {
    let s = s.trim();
    let bad = || ConfigError(format!("not a rational number: {s:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let v = BigRational::new(digits, num_traits::pow(BigInt::from(10), frac.len()));
    Ok(if neg { -v } else { v })
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.trim().parse().map_err(|_| ConfigError(format!("bad value for {key}: {v:?}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v.trim() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => err(format!("bad value for {key}: {v:?}")),
    }
}

impl RunConfig {
    /// Set one flat key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "q" => self.q = parse_rational(v)?,
            "classical" => self.classical = parse_bool(key, v)?,
            "order" => self.order = parse_num(key, v)?,
            "x0" => self.x0 = parse_rational(v)?,
            "p0" => self.p0 = parse_rational(v)?,
            "jmin" => self.jmin = parse_num(key, v)?,
            "jmax" => self.jmax = parse_num(key, v)?,
            "p_jmin" => self.p_jmin = parse_num(key, v)?,
            "p_jmax" => self.p_jmax = parse_num(key, v)?,
            "mass" => self.mass = parse_rational(v)?,
            "c" => self.c = parse_rational(v)?,
            "t0" => self.t0 = parse_num(key, v)?,
            "t1" => self.t1 = parse_num(key, v)?,
            "dt" => self.dt = parse_num(key, v)?,
            "tol" => self.tol = parse_num(key, v)?,
            "unitarity_tol" => self.unitarity_tol = parse_num(key, v)?,
            "cross_tol" => self.cross_tol = parse_num(key, v)?,
            "ratio_tol" => self.ratio_tol = parse_num(key, v)?,
            "potential" => self.potential = v.to_string(),
            "strength" => self.strength = parse_num(key, v)?,
            "width" => self.width = parse_num(key, v)?,
            "radius" => self.radius = parse_num(key, v)?,
            "site_plus" => self.site_plus = parse_num(key, v)?,
            "site_three" => self.site_three = parse_num(key, v)?,
            "potential_file" => self.potential_file = v.to_string(),
            "epsilon" => self.epsilon = parse_num(key, v)?,
            "sense" => self.sense = v.to_string(),
            "variant" => self.variant = v.to_string(),
            "born_variant" => self.born_variant = v.to_string(),
            "s_order" => self.s_order = parse_num(key, v)?,
            "born_order" => self.born_order = parse_num(key, v)?,
            "dyson_order" => self.dyson_order = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "instances" => self.instances = parse_num(key, v)?,
            "near_one" => self.near_one = parse_rational(v)?,
            _ => return err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Apply `key = value` lines.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return err(format!("line {}: expected key = value", n + 1));
            };
            self.set(k.trim(), v).map_err(|e| ConfigError(format!("line {}: {}", n + 1, e.0)))?;
        }
        Ok(())
    }

    /// Apply `QSPACE_<KEY>` overrides from an environment listing.
    pub fn apply_env(&mut self, vars: impl IntoIterator<Item = (String, String)>) -> Result<(), ConfigError> {
        let mut found: Vec<(String, String)> = vars
            .into_iter()
            .filter_map(|(k, v)| k.strip_prefix(ENV_PREFIX).map(|rest| (rest.to_ascii_lowercase(), v)))
            .collect();
        found.sort();
        for (k, v) in found {
            self.set(&k, &v).map_err(|e| ConfigError(format!("{ENV_PREFIX}{}: {}", k.to_ascii_uppercase(), e.0)))?;
        }
        Ok(())
    }

    /// The value of a key as canonical text.
    pub fn get(&self, key: &str) -> String {
        match key {
            "q" => self.q.to_string(),
            "classical" => self.classical.to_string(),
            "order" => self.order.to_string(),
            "x0" => self.x0.to_string(),
            "p0" => self.p0.to_string(),
            "jmin" => self.jmin.to_string(),
            "jmax" => self.jmax.to_string(),
            "p_jmin" => self.p_jmin.to_string(),
            "p_jmax" => self.p_jmax.to_string(),
            "mass" => self.mass.to_string(),
            "c" => self.c.to_string(),
            "t0" => format!("{:?}", self.t0),
            "t1" => format!("{:?}", self.t1),
            "dt" => format!("{:?}", self.dt),
            "tol" => format!("{:?}", self.tol),
            "unitarity_tol" => format!("{:?}", self.unitarity_tol),
            "cross_tol" => format!("{:?}", self.cross_tol),
            "ratio_tol" => format!("{:?}", self.ratio_tol),
            "potential" => self.potential.clone(),
            "strength" => format!("{:?}", self.strength),
            "width" => format!("{:?}", self.width),
            "radius" => format!("{:?}", self.radius),
            "site_plus" => self.site_plus.to_string(),
            "site_three" => self.site_three.to_string(),
            "potential_file" => self.potential_file.clone(),
            "epsilon" => format!("{:?}", self.epsilon),
            "sense" => self.sense.clone(),
            "variant" => self.variant.clone(),
            "born_variant" => self.born_variant.clone(),
            "s_order" => self.s_order.to_string(),
            "born_order" => self.born_order.to_string(),
            "dyson_order" => self.dyson_order.to_string(),
            "seed" => self.seed.to_string(),
            "instances" => self.instances.to_string(),
            "near_one" => self.near_one.to_string(),
            _ => unreachable!("unknown key {key}"),
        }
    }

    /// `key = value` lines in canonical order; hashed into every report.
    pub fn canonical_text(&self) -> String {
        KEYS.iter().map(|k| format!("{k} = {}\n", self.get(k))).collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.q.is_positive() {
            return err(format!("q must be positive, got {}", self.q));
        }
        if self.q.is_one() && !self.classical {
            return err("q = 1 requires classical mode");
        }
        if self.classical && !self.q.is_one() {
            return err("classical mode requires q = 1");
        }
        if self.order == 0 {
            return err("truncation order must be positive");
        }
        if self.jmin >= self.jmax {
            return err(format!("jmin must be below jmax, got {} and {}", self.jmin, self.jmax));
        }
        if self.p_jmin > self.p_jmax {
            return err(format!("p_jmin must not exceed p_jmax, got {} and {}", self.p_jmin, self.p_jmax));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return err(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t1 >= self.t0) {
            return err(format!("time window [{}, {}] is reversed", self.t0, self.t1));
        }
        if !self.x0.is_positive() || !self.p0.is_positive() {
            return err("lattice bases x0 and p0 must be positive");
        }
        if !self.mass.is_positive() || !self.c.is_positive() {
            return err("mass and light speed must be positive");
        }
        for (k, v) in [("tol", self.tol), ("unitarity_tol", self.unitarity_tol), ("cross_tol", self.cross_tol)] {
            if !(v > 0.0) {
                return err(format!("{k} must be positive"));
            }
        }
        if !(self.ratio_tol > 0.0 && self.ratio_tol < 1.0) {
            return err("ratio_tol must lie in (0, 1)");
        }
        self.potential_spec()?;
        self.time_sense()?;
        self.s_variant()?;
        self.born()?;
        Ok(())
    }

    pub fn params(&self) -> Result<DeformationParams, ConfigError> {
        let p = DeformationParams { q_value: self.q.clone(), truncation_order: self.order, classical: self.classical };
        p.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(p)
    }

    /// Number of time steps covering [t0, t1] with spacing close to dt.
    pub fn slices(&self) -> usize {
        ((self.t1 - self.t0) / self.dt).round().max(0.0) as usize
    }

    pub fn potential_spec(&self) -> Result<PotentialSpec, ConfigError> {
        Ok(match self.potential.as_str() {
            "zero" => PotentialSpec::Builtin(Profile::Zero),
            "gaussian" => PotentialSpec::Builtin(Profile::Gaussian { strength: self.strength, width: self.width }),
            "impulse" => PotentialSpec::Builtin(Profile::Impulse {
                strength: self.strength,
                plus: self.site_plus,
                three: self.site_three,
            }),
            "radial" => PotentialSpec::Builtin(Profile::RadialPoly { strength: self.strength, radius: self.radius }),
            "file" if !self.potential_file.is_empty() => PotentialSpec::File(PathBuf::from(&self.potential_file)),
            "file" => return err("potential = file needs potential_file"),
            other => return err(format!("unknown potential {other:?}; expected zero, gaussian, impulse, radial or file")),
        })
    }

    pub fn time_sense(&self) -> Result<TimeSense, ConfigError> {
        match self.sense.as_str() {
            "retarded" | "+" => Ok(TimeSense::Retarded),
            "advanced" | "-" => Ok(TimeSense::Advanced),
            "kg" => Ok(TimeSense::KgMixed),
            other => err(format!("unknown sense {other:?}; expected retarded, advanced or kg")),
        }
    }

    pub fn s_variant(&self) -> Result<SVariant, ConfigError> {
        match self.variant.as_str() {
            "S_R" => Ok(SVariant::SR),
            "S_L" => Ok(SVariant::SL),
            "S*_R" => Ok(SVariant::SStarR),
            "S*_L" => Ok(SVariant::SStarL),
            other => err(format!("unknown S-matrix variant {other:?}; expected S_R, S_L, S*_R or S*_L")),
        }
    }

    pub fn born(&self) -> Result<BornVariant, ConfigError> {
        match self.born_variant.as_str() {
            "psi_R" => Ok(BornVariant::PsiR),
            "psi_L" => Ok(BornVariant::PsiL),
            "psi*_R" => Ok(BornVariant::PsiStarR),
            "psi*_L" => Ok(BornVariant::PsiStarL),
            other => err(format!("unknown Born variant {other:?}; expected psi_R, psi_L, psi*_R or psi*_L")),
        }
    }
}
