//! Command-line arguments and their merge with the configuration file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use drsn::borel::BorelKind;
use drsn::io::{parse_complex_list, parse_real_list};
use drsn::sectorial::{GeometryOverrides, PathOptions, SectorSign};
use drsn::C64;

use crate::config::{FileConfig, SignArg};
use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "drsn",
    version,
    about = "Normal forms of doubly-resonant saddle-nodes"
)]
pub struct Cli {
    /// TOML file with defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Formal normalization of a field file.
    Normalize(NormalizeArgs),
    /// Borel-Pade-Laplace sum of a univariate series.
    Borel(BorelArgs),
    /// Asymptotic paths and homological residuals on a sector.
    Sector(SectorArgs),
    /// The Painleve I example.
    Painleve(PainleveArgs),
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    /// Field JSON file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Target order N in x.
    #[arg(long)]
    pub order: Option<usize>,
    /// Truncation K in x; defaults to 2N + 2.
    #[arg(long)]
    pub x_order: Option<usize>,
    /// Truncation D in the y-degree; must be at least 2N.
    #[arg(long)]
    pub ydeg: Option<usize>,
    /// JSON report; defaults to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    B,
    Bis,
}

#[derive(Debug, Args)]
pub struct BorelArgs {
    /// Univariate series JSON file.
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// Angle of the Laplace ray.
    #[arg(long, allow_negative_numbers = true)]
    pub direction: Option<f64>,
    /// Comma-separated evaluation points such as "-0.1,0.05+0.01i".
    #[arg(long, allow_hyphen_values = true)]
    pub eval: Option<String>,
    /// Borel transform to continue; defaults to bis.
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    /// Pade orders "p,q"; defaults to the largest diagonal pair.
    #[arg(long)]
    pub pade: Option<String>,
    /// JSON report; defaults to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SectorArgs {
    /// Field JSON file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Sectorial order N.
    #[arg(long)]
    pub order: Option<usize>,
    /// Base point "x0r,x0i,y1r,y1i,y2r,y2i".
    #[arg(long, allow_hyphen_values = true)]
    pub base: Option<String>,
    /// Sector around the bisector of `+i lambda` or `-i lambda`; defaults to plus.
    #[arg(long, value_enum)]
    pub sign: Option<SignArg>,
    /// The input is already normal below x^{N+2}; skip the formal preparation.
    #[arg(long)]
    pub prepared: bool,
    /// y-degree of the formal preparation; defaults to 2(N + 2).
    #[arg(long)]
    pub ydeg: Option<usize>,
    /// Trajectory CSV output.
    #[arg(long)]
    pub emit: Option<PathBuf>,
    /// Add homological residual diagnostics to the report.
    #[arg(long)]
    pub residual_check: bool,
    /// Bound on the neglected tail of each path integral.
    #[arg(long)]
    pub tol_path: Option<f64>,
    /// Relative tolerance of the flow integrator.
    #[arg(long)]
    pub rtol: Option<f64>,
    /// End time of the emitted trajectory.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// JSON report; defaults to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PainleveArgs {
    /// Run the full example pipeline.
    #[arg(long)]
    pub demo: bool,
    /// Target order N in x; defaults to 4.
    #[arg(long)]
    pub order: Option<usize>,
    /// Truncation K in x; defaults to N + 2.
    #[arg(long)]
    pub x_order: Option<usize>,
    /// Truncation D in the y-degree; defaults to 8.
    #[arg(long)]
    pub ydeg: Option<usize>,
    /// JSON report; defaults to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A fully resolved run.
#[derive(Debug, Clone)]
pub enum Command {
    Normalize(NormalizeRun),
    Borel(BorelRun),
    Sector(SectorRun),
    Painleve(PainleveRun),
}

#[derive(Debug, Clone)]
pub struct NormalizeRun {
    pub input: PathBuf,
    pub order: usize,
    pub x_order: usize,
    pub ydeg: usize,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct BorelRun {
    pub series: PathBuf,
    pub direction: f64,
    pub eval: Vec<C64>,
    pub kind: BorelKind,
    pub pade: Option<(usize, usize)>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct SectorRun {
    pub input: PathBuf,
    pub order: usize,
    pub base: [C64; 3],
    pub sign: SectorSign,
    pub prepared: bool,
    pub ydeg: usize,
    pub emit: Option<PathBuf>,
    pub residual_check: bool,
    pub path: PathOptions,
    pub t_end: f64,
    pub geometry: GeometryOverrides,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct PainleveRun {
    pub order: usize,
    pub x_order: usize,
    pub ydeg: usize,
    pub out: Option<PathBuf>,
}

/// Default end time of an emitted trajectory.
pub const DEFAULT_T_END: f64 = 1e3;
/// Default path tolerance of the residual diagnostics.
pub const DEFAULT_RESIDUAL_TOL_PATH: f64 = 1e-12;

fn required<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| CliError::Config(format!("--{name} is required")))
}

fn order_at_least_one(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(CliError::Config("order N must be at least 1".into()));
    }
    Ok(n)
}

fn positive(value: f64, name: &str) -> Result<f64> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(CliError::Config(format!(
            "{name} must be positive, got {value}"
        )));
    }
    Ok(value)
}

fn parsed<T>(r: drsn::Result<T>, name: &str) -> Result<T> {
    r.map_err(|e| CliError::Config(format!("--{name}: {e}")))
}

impl CommandArgs {
    /// Merge the flags with `config`; flags win.
    pub fn resolve(self, config: &FileConfig) -> Result<Command> {
        match self {
            CommandArgs::Normalize(a) => {
                let c = &config.normalize;
                let order = order_at_least_one(required(a.order.or(c.order), "order")?)?;
                let ydeg = required(a.ydeg.or(c.ydeg), "ydeg")?;
                if ydeg < 2 * order {
                    return Err(CliError::Config(format!(
                        "--ydeg {ydeg} is below 2N = {}",
                        2 * order
                    )));
                }
                let x_order = a.x_order.or(c.x_order).unwrap_or(2 * order + 2);
                if x_order <= order {
                    return Err(CliError::Config(format!(
                        "--x-order {x_order} must exceed N = {order}"
                    )));
                }
                Ok(Command::Normalize(NormalizeRun {
                    input: required(a.input.or(c.input.clone()), "input")?,
                    order,
                    x_order,
                    ydeg,
                    out: a.out.or(c.out.clone()),
                }))
            }
            CommandArgs::Borel(a) => {
                let c = &config.borel;
                let direction = required(a.direction.or(c.direction), "direction")?;
                if !direction.is_finite() {
                    return Err(CliError::Config(format!(
                        "--direction {direction} is not finite"
                    )));
                }
                let eval = parsed(
                    parse_complex_list(&required(a.eval.or(c.eval.clone()), "eval")?),
                    "eval",
                )?;
                let kind = match a.kind {
                    Some(KindArg::B) => BorelKind::B,
                    Some(KindArg::Bis) => BorelKind::Bis,
                    None => c.kind.unwrap_or(BorelKind::Bis),
                };
                let pade = match a.pade {
                    Some(s) => {
                        let v = parsed(parse_real_list(&s, 2), "pade")?;
                        if v.iter().any(|p| *p < 0.0 || p.fract() != 0.0) {
                            return Err(CliError::Config(format!(
                                "--pade {s} needs two non-negative integers"
                            )));
                        }
                        Some((v[0] as usize, v[1] as usize))
                    }
                    None => c.pade.map(|p| (p[0], p[1])),
                };
                Ok(Command::Borel(BorelRun {
                    series: required(a.series.or(c.series.clone()), "series")?,
                    direction,
                    eval,
                    kind,
                    pade,
                    out: a.out.or(c.out.clone()),
                }))
            }
            CommandArgs::Sector(a) => {
                let c = &config.sector;
                let order = order_at_least_one(required(a.order.or(c.order), "order")?)?;
                let base = parsed(
                    parse_real_list(&required(a.base.or(c.base.clone()), "base")?, 6),
                    "base",
                )?;
                let mut path = PathOptions {
                    tol_path: DEFAULT_RESIDUAL_TOL_PATH,
                    ..PathOptions::default()
                };
                path.tol_path = positive(
                    a.tol_path.or(c.tol_path).unwrap_or(path.tol_path),
                    "tol_path",
                )?;
                path.flow.rtol = positive(a.rtol.or(c.rtol).unwrap_or(path.flow.rtol), "rtol")?;
                let ydeg = a.ydeg.or(c.ydeg).unwrap_or(2 * (order + 2));
                if ydeg < 2 * (order + 2) {
                    return Err(CliError::Config(format!(
                        "--ydeg {ydeg} is below 2(N + 2) = {}",
                        2 * (order + 2)
                    )));
                }
                let sign = match a.sign.or(c.sign).unwrap_or(SignArg::Plus) {
                    SignArg::Plus => SectorSign::Plus,
                    SignArg::Minus => SectorSign::Minus,
                };
                Ok(Command::Sector(SectorRun {
                    input: required(a.input.or(c.input.clone()), "input")?,
                    order,
                    base: [
                        C64::new(base[0], base[1]),
                        C64::new(base[2], base[3]),
                        C64::new(base[4], base[5]),
                    ],
                    sign,
                    prepared: a.prepared || c.prepared.unwrap_or(false),
                    ydeg,
                    emit: a.emit.or(c.emit.clone()),
                    residual_check: a.residual_check || c.residual_check.unwrap_or(false),
                    path,
                    t_end: positive(a.t_end.or(c.t_end).unwrap_or(DEFAULT_T_END), "t_end")?,
                    geometry: c.geometry.clone(),
                    out: a.out.or(c.out.clone()),
                }))
            }
            CommandArgs::Painleve(a) => {
                if !a.demo {
                    return Err(CliError::Config("painleve needs --demo".into()));
                }
                let c = &config.painleve;
                let order = order_at_least_one(a.order.or(c.order).unwrap_or(4))?;
                let ydeg = a.ydeg.or(c.ydeg).unwrap_or(8);
                if ydeg < 2 * order {
                    return Err(CliError::Config(format!(
                        "--ydeg {ydeg} is below 2N = {}",
                        2 * order
                    )));
                }
                let x_order = a.x_order.or(c.x_order).unwrap_or(order + 2);
                if x_order <= order {
                    return Err(CliError::Config(format!(
                        "--x-order {x_order} must exceed N = {order}"
                    )));
                }
                Ok(Command::Painleve(PainleveRun {
                    order,
                    x_order,
                    ydeg,
                    out: a.out.or(c.out.clone()),
                }))
            }
        }
    }
}
