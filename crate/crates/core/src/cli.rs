//! The `sixvertex` command line: `analyze`, `sturm`, `roundtrip`.
//!
//! Exit status is 0 on success, 2 when input cannot be read or validated,
//! and 3 when a numerical stage fails or a certificate does not pass.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::input::{CurveSpec, OdeSpec};
use crate::projective::round_trip;
use crate::report::{to_json, AnalysisReport};
use crate::sextactic::analyze_curve;
use crate::settings::{Settings, SETTINGS_ENV};
use crate::sturm::{certify_corollary, certify_theorem1, certify_theorem2, random_band_limited};
use crate::svg::render_svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_STAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sixvertex", version, about = "Sextactic points and zero-count certificates for closed convex curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full curve chain and write a JSON report.
    Analyze {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Override the grid size from the curve file.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        tol_file: Option<PathBuf>,
    },
    /// Zero-count certificate for a linear periodic equation.
    Sturm {
        spec: PathBuf,
        #[arg(long, value_enum)]
        theorem: TheoremArg,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the certificate here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        tol_file: Option<PathBuf>,
    },
    /// Curve to equation and back; prints the registration residual.
    Roundtrip {
        spec: PathBuf,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        tol_file: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoremArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Corollary,
}

enum Failure {
    Invalid(String),
    Stage(&'static str, Error),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn invalid(e: Error) -> Failure {
    Failure::Invalid(e.to_string())
}

fn staged(default: &'static str) -> impl Fn(Error) -> Failure {
    move |e| match e {
        Error::InvalidInput(msg) => Failure::Invalid(msg),
        e => Failure::Stage(e.stage().unwrap_or(default), e),
    }
}

/// `--tol-file`, else the file named by the environment variable, else defaults.
pub fn load_settings(tol_file: Option<&Path>) -> Result<Settings, String> {
    let path = match tol_file {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os(SETTINGS_ENV).map(PathBuf::from),
    };
    match path {
        None => Ok(Settings::default()),
        Some(p) => {
            let text = std::fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))?;
            Settings::from_toml_str(&text).map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

fn write_output(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn curve_spec(path: &Path, grid: Option<usize>) -> Result<CurveSpec, Failure> {
    let spec = CurveSpec::load(path).map_err(invalid)?;
    match grid {
        Some(n) => spec.with_grid(n).map_err(invalid),
        None => Ok(spec),
    }
}

fn analyze(
    spec: &Path,
    out: &Path,
    svg: Option<&Path>,
    grid: Option<usize>,
    settings: &Settings,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    let spec = curve_spec(spec, grid)?;
    let settings = settings.with_grid(spec.grid_size);
    let curve = spec.to_curve().map_err(staged("convexity"))?;
    let analysis = analyze_curve(&curve, &settings).map_err(staged("analysis"))?;
    let report = AnalysisReport::new(&spec.name, &analysis, &settings);
    std::fs::write(out, to_json(&report))?;
    if let Some(path) = svg {
        std::fs::write(path, render_svg(&curve, &analysis.sextactic, &spec.name))?;
    }
    match analysis.failed_stage() {
        None => Ok(EXIT_OK),
        Some(stage) => {
            writeln!(stderr, "error: stage {stage}: check did not pass")?;
            Ok(EXIT_STAGE)
        }
    }
}

fn sturm(
    spec: &Path,
    theorem: TheoremArg,
    trials: usize,
    seed: u64,
    out: Option<&Path>,
    settings: &Settings,
    stdout: &mut dyn Write,
) -> Result<i32, Failure> {
    let spec = OdeSpec::load(spec).map_err(invalid)?;
    let settings = settings.with_grid(spec.grid_size);
    let ode = spec.to_ode().map_err(invalid)?;
    let (text, pass) = match theorem {
        TheoremArg::One => {
            let c = certify_theorem1(&ode, trials, seed, &settings).map_err(staged("theorem1"))?;
            (to_json(&c), c.pass)
        }
        TheoremArg::Two => {
            let c = certify_theorem2(&ode, trials, seed, &settings).map_err(staged("theorem2"))?;
            (to_json(&c), c.pass)
        }
        TheoremArg::Corollary => {
            let g = match spec.test_function().map_err(invalid)? {
                Some(g) => g,
                None => random_band_limited(spec.grid_size, seed, &settings),
            };
            let c = certify_corollary(&ode, &g, &settings).map_err(staged("corollary"))?;
            (to_json(&c), c.pass)
        }
    };
    write_output(out, &text, stdout)?;
    Ok(if pass { EXIT_OK } else { EXIT_STAGE })
}

fn roundtrip(spec: &Path, grid: Option<usize>, settings: &Settings, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let spec = curve_spec(spec, grid)?;
    let settings = settings.with_grid(spec.grid_size);
    let curve = spec.to_curve().map_err(staged("convexity"))?;
    let reg = round_trip(&curve, &settings).map_err(staged("roundtrip"))?;
    writeln!(stdout, "registration residual: {:e}", reg.residual)?;
    Ok(if reg.residual < settings.lift_residual_tol { EXIT_OK } else { EXIT_STAGE })
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let tol_file = match &cli.command {
        Command::Analyze { tol_file, .. } | Command::Sturm { tol_file, .. } | Command::Roundtrip { tol_file, .. } => {
            tol_file.as_deref()
        }
    };
    let settings = match load_settings(tol_file) {
        Ok(s) => s,
        Err(msg) => {
            let _ = writeln!(stderr, "error: settings: {msg}");
            return EXIT_INVALID;
        }
    };
    let result = match &cli.command {
        Command::Analyze { spec, out, svg, grid, .. } => analyze(spec, out, svg.as_deref(), *grid, &settings, stderr),
        Command::Sturm { spec, theorem, trials, seed, out, .. } => {
            sturm(spec, *theorem, *trials, *seed, out.as_deref(), &settings, stdout)
        }
        Command::Roundtrip { spec, grid, .. } => roundtrip(spec, *grid, &settings, stdout),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(stderr, "error: invalid input: {msg}");
            EXIT_INVALID
        }
        Err(Failure::Stage(stage, e)) => {
            let _ = writeln!(stderr, "error: stage {stage}: {}", e.root());
            if let Error::NotDisconjugate(report) = e.root() {
                let _ = write!(stderr, "{}", to_json(report.as_ref()));
            }
            EXIT_STAGE
        }
    }
}
