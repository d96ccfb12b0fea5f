//! Command-line front end: identity suites, expression evaluation and scattering reports.

pub mod commands;
pub mod config;
pub mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use commands::{EvalOp, Outcome, ScatterReport, EXIT_FAIL, EXIT_USAGE};
use config::{ConfigError, RunConfig};
use qspace::suites::Suite;
use qspace::Ordering;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "qspace", version, about = "Exact algebra and lattice scattering on q-deformed Euclidean space")]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags override the config file and the environment.
#[derive(Args, Debug, Default)]
pub struct Flags {
    /// Flat `key = value` config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Deformation parameter, e.g. 3/2 or 1.1.
    #[arg(long, global = true)]
    pub q: Option<String>,
    /// Classical mode (requires q = 1).
    #[arg(long, global = true)]
    pub classical: bool,
    /// Truncation order N.
    #[arg(long, global = true)]
    pub order: Option<u32>,
    /// Position lattice base.
    #[arg(long, global = true)]
    pub x0: Option<String>,
    /// Momentum lattice base.
    #[arg(long, global = true)]
    pub p0: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub jmin: Option<i32>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub jmax: Option<i32>,
    #[arg(long = "p-jmin", global = true, allow_hyphen_values = true)]
    pub p_jmin: Option<i32>,
    #[arg(long = "p-jmax", global = true, allow_hyphen_values = true)]
    pub p_jmax: Option<i32>,
    #[arg(long, global = true)]
    pub mass: Option<String>,
    /// Light speed.
    #[arg(long, global = true)]
    pub c: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// zero, gaussian, impulse, radial or file.
    #[arg(long, global = true)]
    pub potential: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Any config key, as key=value; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run exact and numeric identity suites.
    Identities {
        #[arg(value_enum)]
        suite: SuiteArg,
    },
    /// Evaluate `<left> <op> <right>`, or one of `f ⋆ g`, `∂A ▷ f`, `f ◁ ∂A`.
    Eval {
        left: String,
        #[arg(value_enum)]
        op: Option<OpArg>,
        right: Option<String>,
        /// Ordering of the commutative representatives.
        #[arg(long, value_enum, default_value = "standard")]
        ordering: OrderingArg,
        /// Apply the derivative from the right.
        #[arg(long)]
        right_action: bool,
    },
    /// Lattice scattering reports.
    Scatter {
        #[arg(value_enum)]
        report: ReportArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SuiteArg {
    Algebra,
    Calculus,
    Qexp,
    Waves,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OpArg {
    Star,
    Partial,
    Translate,
    Invert,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OrderingArg {
    Standard,
    Reversed,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ReportArg {
    Born,
    Smatrix,
    Unitarity,
    Dyson,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Algebra => Suite::Algebra,
            SuiteArg::Calculus => Suite::Calculus,
            SuiteArg::Qexp => Suite::Qexp,
            SuiteArg::Waves => Suite::Waves,
            SuiteArg::All => Suite::All,
        }
    }
}

impl From<OpArg> for EvalOp {
    fn from(o: OpArg) -> EvalOp {
        match o {
            OpArg::Star => EvalOp::Star,
            OpArg::Partial => EvalOp::Partial,
            OpArg::Translate => EvalOp::Translate,
            OpArg::Invert => EvalOp::Invert,
        }
    }
}

impl From<ReportArg> for ScatterReport {
    fn from(r: ReportArg) -> ScatterReport {
        match r {
            ReportArg::Born => ScatterReport::Born,
            ReportArg::Smatrix => ScatterReport::Smatrix,
            ReportArg::Unitarity => ScatterReport::Unitarity,
            ReportArg::Dyson => ScatterReport::Dyson,
        }
    }
}

/// Defaults, then the config file, then `QSPACE_*` variables, then flags.
pub fn resolve_config(flags: &Flags, env: &[(String, String)]) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &flags.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    cfg.apply_env(env.iter().cloned())?;
    let pairs: [(&str, Option<String>); 16] = [
        ("q", flags.q.clone()),
        ("classical", flags.classical.then(|| "true".to_string())),
        ("order", flags.order.map(|v| v.to_string())),
        ("x0", flags.x0.clone()),
        ("p0", flags.p0.clone()),
        ("jmin", flags.jmin.map(|v| v.to_string())),
        ("jmax", flags.jmax.map(|v| v.to_string())),
        ("p_jmin", flags.p_jmin.map(|v| v.to_string())),
        ("p_jmax", flags.p_jmax.map(|v| v.to_string())),
        ("mass", flags.mass.clone()),
        ("c", flags.c.clone()),
        ("t0", flags.t0.map(|v| v.to_string())),
        ("t1", flags.t1.map(|v| v.to_string())),
        ("dt", flags.dt.map(|v| v.to_string())),
        ("potential", flags.potential.clone()),
        ("seed", flags.seed.map(|v| v.to_string())),
    ];
    for (k, v) in pairs {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    for kv in &flags.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| ConfigError(format!("--set expects key=value, got {kv:?}")))?;
        cfg.set(k.trim(), v)?;
    }
    Ok(cfg)
}

/// Run with explicit arguments and environment; returns the exit code.
pub fn run<I, T>(args: I, env: &[(String, String)], out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let cfg = match resolve_config(&cli.flags, env) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return EXIT_USAGE;
        }
    };
    let outcome = match cli.command {
        Command::Identities { suite } => commands::cmd_identities(&cfg, suite.into()),
        Command::Eval { left, op, right, ordering, right_action } => {
            let ordering = match ordering {
                OrderingArg::Standard => Ordering::Standard,
                OrderingArg::Reversed => Ordering::Reversed,
            };
            commands::cmd_eval(&cfg, &left, op.map(Into::into), right.as_deref(), ordering, right_action)
        }
        Command::Scatter { report } => commands::cmd_scatter(&cfg, report.into()),
    };
    emit(&outcome, cli.flags.out.as_deref(), out, err)
}

/// With `--out`: report to the file, summary to `out`. Without: summary to `err`, report to `out`.
/// Eval always prints its result to `out`.
fn emit(o: &Outcome, path: Option<&std::path::Path>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let is_eval = o.report.as_ref().is_some_and(|r| r["command"] == "eval");
    if o.code != 0 {
        let _ = err.write_all(o.summary.as_bytes());
    } else if path.is_some() || is_eval {
        let _ = out.write_all(o.summary.as_bytes());
    } else {
        let _ = err.write_all(o.summary.as_bytes());
    }
    let Some(doc) = &o.report else { return o.code };
    let text = report::render(doc);
    match path {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                let _ = writeln!(err, "cannot write {}: {e}", p.display());
                return EXIT_FAIL.max(o.code);
            }
        }
        None if !is_eval => {
            let _ = out.write_all(text.as_bytes());
        }
        None => {}
    }
    o.code
}
