//! Command-line surface. The binary is a thin wrapper around [`run`].

mod csv;
mod report;
mod svg;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ode::{integrate, IntegrateOptions, DEFAULT_TOL, DEFAULT_T_MAX, DEFAULT_T_MIN};
use crate::penrose::{dichotomy_report_with, MINIMAL_LINE_TOL};
use crate::phase::{minimal_line_residual, Dimension, PhasePoint};
use crate::profile::profile_from_trajectory;
use crate::verify::{run_suite, SuiteScale};

pub use self::csv::{parse_trajectory_csv, trajectory_csv, CsvTrajectory, CSV_HEADER};
pub use self::svg::{portrait_svg, PortraitOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Parser)]
#[command(
    name = "sfkahler",
    version,
    about = "Scalar-flat U(n)-invariant Kähler metrics in the phase plane"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Region label of a seed, or of every point of --grid.
    #[command(allow_negative_numbers = true)]
    Classify(CommonArgs),
    /// Sampled orbit with potential derivatives (CSV by default).
    #[command(allow_negative_numbers = true)]
    Integrate(CommonArgs),
    /// SVG phase portrait.
    #[command(allow_negative_numbers = true)]
    Portrait {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated level values to draw.
        #[arg(long, value_delimiter = ',')]
        levels: Vec<f64>,
    },
    /// Minimal spheres along the orbit.
    #[command(allow_negative_numbers = true)]
    Spheres(CommonArgs),
    /// ADM mass of the orbit's Euclidean end.
    #[command(allow_negative_numbers = true)]
    Mass(CommonArgs),
    /// Penrose audit at a minimal-sphere seed, or a dichotomy sweep over --grid.
    #[command(allow_negative_numbers = true)]
    Penrose(CommonArgs),
    /// Runs the invariant suite; exits non-zero on any failure.
    Verify {
        /// Reduced sample counts.
        #[arg(long)]
        fast: bool,
    },
}

#[derive(Debug, Clone, Args)]
struct CommonArgs {
    /// Complex dimension.
    #[arg(short = 'n', default_value_t = 2)]
    n: u32,
    #[arg(short = 'x')]
    x: Option<f64>,
    #[arg(short = 'y')]
    y: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_T_MIN)]
    t_min: f64,
    #[arg(long, default_value_t = DEFAULT_T_MAX)]
    t_max: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// "x0:x1:steps,y0:y1:steps"
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
}

/// Seeds described by `--grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub x: (f64, f64, usize),
    pub y: (f64, f64, usize),
}

impl GridSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let axis = |part: &str| -> Result<(f64, f64, usize)> {
            let f: Vec<&str> = part.split(':').collect();
            let bad = || Error::InvalidArgument(format!("grid axis must be lo:hi:steps, got {part:?}"));
            if f.len() != 3 {
                return Err(bad());
            }
            let lo: f64 = f[0].trim().parse().map_err(|_| bad())?;
            let hi: f64 = f[1].trim().parse().map_err(|_| bad())?;
            let steps: usize = f[2].trim().parse().map_err(|_| bad())?;
            if !lo.is_finite() || !hi.is_finite() || steps == 0 {
                return Err(bad());
            }
            Ok((lo, hi, steps))
        };
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::InvalidArgument(format!("grid needs two axes, got {s:?}")));
        }
        Ok(GridSpec {
            x: axis(parts[0])?,
            y: axis(parts[1])?,
        })
    }

    fn values((lo, hi, steps): (f64, f64, usize)) -> Vec<f64> {
        if steps == 1 {
            return vec![lo];
        }
        (0..steps)
            .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
            .collect()
    }

    /// Row-major points (x varies fastest).
    pub fn points(&self) -> Vec<PhasePoint> {
        let xs = Self::values(self.x);
        Self::values(self.y)
            .into_iter()
            .flat_map(|y| xs.iter().map(move |&x| PhasePoint::new(x, y)))
            .collect()
    }
}

/// Validated settings shared by all subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: Dimension,
    pub seed: Option<PhasePoint>,
    pub grid: Option<GridSpec>,
    pub t_min: f64,
    pub t_max: f64,
    pub tol: f64,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    fn from_args(a: &CommonArgs) -> Result<Self> {
        let n = Dimension::new(a.n).map_err(|_| Error::InvalidArgument(format!("n must be >= 2, got {}", a.n)))?;
        let seed = match (a.x, a.y) {
            (Some(x), Some(y)) => {
                if !x.is_finite() || !y.is_finite() {
                    return Err(Error::NonFinite("seed"));
                }
                Some(PhasePoint::new(x, y))
            }
            (None, None) => None,
            _ => return Err(Error::InvalidArgument("give both -x and -y".into())),
        };
        let grid = a.grid.as_deref().map(GridSpec::parse).transpose()?;
        if seed.is_some() && grid.is_some() {
            return Err(Error::InvalidArgument("give either a seed or --grid, not both".into()));
        }
        if !(a.tol > 0.0 && a.tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("tol must be > 0, got {}", a.tol)));
        }
        if !(a.t_min < 0.0 && a.t_max > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need t_min < 0 < t_max, got {} and {}",
                a.t_min, a.t_max
            )));
        }
        Ok(RunConfig {
            n,
            seed,
            grid,
            t_min: a.t_min,
            t_max: a.t_max,
            tol: a.tol,
            format: a.format,
            out: a.out.clone(),
        })
    }

    fn options(&self) -> IntegrateOptions {
        IntegrateOptions::new(self.t_min, self.t_max, self.tol)
    }

    fn require_seed(&self) -> Result<PhasePoint> {
        self.seed
            .ok_or_else(|| Error::InvalidArgument("this command needs -x and -y".into()))
    }

    fn format_or(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(Error::InvalidArgument(format!("format {f:?} is not supported here")))
        }
    }
}

/// Result of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn cmd_classify(cfg: &RunConfig) -> Result<String> {
    cfg.format_or(Format::Json, &[Format::Json])?;
    if let Some(grid) = &cfg.grid {
        let rows: Vec<serde_json::Value> = grid
            .points()
            .par_iter()
            .map(|&p| report::classification(cfg.n, p))
            .collect();
        return Ok(pretty(&serde_json::Value::Array(rows)));
    }
    let p = cfg.require_seed()?;
    p.check_admissible()?;
    Ok(pretty(&report::classification(cfg.n, p)))
}

fn cmd_integrate(cfg: &RunConfig) -> Result<String> {
    let format = cfg.format_or(Format::Csv, &[Format::Csv, Format::Json])?;
    let p = cfg.require_seed()?;
    let traj = integrate(cfg.n, p, &cfg.options())?;
    match format {
        Format::Csv => Ok(trajectory_csv(&traj)),
        _ => Ok(pretty(&report::trajectory(&traj))),
    }
}

fn cmd_portrait(cfg: &RunConfig, levels: &[f64]) -> Result<String> {
    cfg.format_or(Format::Svg, &[Format::Svg])?;
    if levels.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(Error::InvalidArgument("levels must be positive and finite".into()));
    }
    let opts = PortraitOptions {
        levels: levels.to_vec(),
        tol: cfg.tol,
        ..PortraitOptions::new(cfg.n)
    };
    Ok(portrait_svg(&opts))
}

fn cmd_spheres(cfg: &RunConfig) -> Result<String> {
    cfg.format_or(Format::Json, &[Format::Json])?;
    let p = cfg.require_seed()?;
    let profile = profile_from_trajectory(integrate(cfg.n, p, &cfg.options())?);
    Ok(pretty(&report::spheres(&profile)?))
}

fn cmd_mass(cfg: &RunConfig) -> Result<String> {
    cfg.format_or(Format::Json, &[Format::Json])?;
    let p = cfg.require_seed()?;
    let profile = profile_from_trajectory(integrate(cfg.n, p, &cfg.options())?);
    Ok(pretty(&report::mass(&profile)?))
}

fn cmd_penrose(cfg: &RunConfig) -> Result<String> {
    cfg.format_or(Format::Json, &[Format::Json])?;
    let opts = cfg.options();
    if let Some(grid) = &cfg.grid {
        let rows: Vec<serde_json::Value> = grid
            .points()
            .par_iter()
            .filter(|p| p.is_admissible())
            .map(|&p| match dichotomy_report_with(cfg.n, p, &opts) {
                Ok(r) => report::penrose(&r),
                Err(e) => report::failed(cfg.n, p, &e),
            })
            .collect();
        return Ok(pretty(&serde_json::Value::Array(rows)));
    }
    let p = cfg.require_seed()?;
    p.check_admissible()?;
    let residual = minimal_line_residual(cfg.n, p);
    if residual.abs() > MINIMAL_LINE_TOL {
        return Err(Error::NotMinimal { residual });
    }
    Ok(pretty(&report::penrose(&dichotomy_report_with(cfg.n, p, &opts)?)))
}

fn cmd_verify(fast: bool) -> (bool, String) {
    let scale = if fast { SuiteScale::fast() } else { SuiteScale::full() };
    let checks = run_suite(scale);
    let mut out = String::new();
    for c in &checks {
        out.push_str(&c.line());
        out.push('\n');
    }
    (checks.iter().all(|c| c.passed), out)
}

fn emit(cfg: &RunConfig, text: String) -> Result<String> {
    match &cfg.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?;
            f.write_all(text.as_bytes())
                .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_domain() {
        1
    } else {
        2
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let (common, levels): (&CommonArgs, &[f64]) = match &cli.command {
        Command::Verify { fast } => {
            let (ok, text) = cmd_verify(*fast);
            return Outcome {
                code: if ok { 0 } else { 1 },
                stdout: text,
                stderr: String::new(),
            };
        }
        Command::Portrait { common, levels } => (common, levels),
        Command::Classify(c) | Command::Integrate(c) | Command::Spheres(c) | Command::Mass(c) | Command::Penrose(c) => {
            (c, &[])
        }
    };
    let result = RunConfig::from_args(common).and_then(|cfg| {
        let text = match &cli.command {
            Command::Classify(_) => cmd_classify(&cfg),
            Command::Integrate(_) => cmd_integrate(&cfg),
            Command::Portrait { .. } => cmd_portrait(&cfg, levels),
            Command::Spheres(_) => cmd_spheres(&cfg),
            Command::Mass(_) => cmd_mass(&cfg),
            Command::Penrose(_) => cmd_penrose(&cfg),
            Command::Verify { .. } => unreachable!("handled above"),
        }?;
        emit(&cfg, text)
    });
    match result {
        Ok(stdout) => Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
