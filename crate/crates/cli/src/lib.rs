//! `darboux` command-line front end: synthesize, verify, enumerate modes,
//! trace trajectories and plot them.
//!
//! Exit codes: 0 success, 1 input or validation error, 2 verification or
//! realness failure.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use darboux_core::files::{parse_point, LinkageFile, TrajectoryFile};
use darboux_core::linkage::{full_circle_samples, linear_samples, trace_point};
use darboux_core::modes::{self, enumerate_modes, Assembly, BranchLabel, Realness};
use darboux_core::{factorize, DesignParams, FactorError, Factorization, FileError, FreeParams, ModeError, DEFAULT_TOL};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 1,
            Self::Failure(_) => 2,
        }
    }
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        match e {
            FileError::Factor(FactorError::VerificationFailure { .. }) | FileError::Mismatch(_) => {
                Self::Failure(e.to_string())
            }
            _ => Self::Input(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "darboux", version, about = "Vertical Darboux 4RC linkage toolkit")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Factor the motion and write the linkage description
    Synth(SynthArgs),
    /// Re-check the factorization identity of a linkage file
    Verify(VerifyArgs),
    /// List the operation modes of one assembly mode
    Modes(ModesArgs),
    /// Trace a coupler point along one branch
    Trace(TraceArgs),
    /// Render trajectory files as an SVG projection
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, allow_hyphen_values = true)]
    c: f64,
    #[arg(long, allow_hyphen_values = true)]
    q1: f64,
    #[arg(long, allow_hyphen_values = true)]
    q2: f64,
    /// Generic branch only (default 0)
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["z", "z3"])]
    z1: Option<f64>,
    /// Generic branch only (default 0)
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["z", "z3"])]
    z2: Option<f64>,
    /// Degenerate branch only (default 0)
    #[arg(long, allow_hyphen_values = true)]
    z: Option<f64>,
    /// Degenerate branch only (default 0)
    #[arg(long, allow_hyphen_values = true)]
    z3: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Output path, `-` for stdout
    #[arg(long, short, default_value = "linkage.json")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    file: PathBuf,
    /// Overrides the tolerance stored in the file
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct ModesArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    assembly: u8,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct TraceArgs {
    file: PathBuf,
    /// Branch label: A, B, C+, C-, II-rot+, II-rot-, II-curve+, II-curve-
    #[arg(long, allow_hyphen_values = true)]
    branch: String,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    assembly: Option<u8>,
    /// Traced point in the coupler frame
    #[arg(long, default_value = "1,0,0", allow_hyphen_values = true)]
    point: String,
    #[arg(long, default_value_t = 400)]
    samples: usize,
    /// Driving-parameter interval `a:b`; the whole projective line by default
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, short, default_value = "-")]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum View {
    X,
    Y,
    Z,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Viewing direction of the orthographic projection
    #[arg(long, value_enum, default_value_t = View::Y)]
    view: View,
    #[arg(long, short, default_value = "-")]
    out: PathBuf,
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Synth(a) => synth(&a, stdout),
        Command::Verify(a) => verify(&a, stdout),
        Command::Modes(a) => modes_cmd(&a, stdout),
        Command::Trace(a) => trace(&a, stdout),
        Command::Plot(a) => plot(&a, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn emit(path: &Path, content: &str, stdout: &mut dyn Write) -> Result<()> {
    if path == Path::new("-") {
        stdout.write_all(content.as_bytes()).map_err(|e| io_err(path, e))
    } else {
        fs::write(path, content).map_err(|e| io_err(path, e))
    }
}

fn check_tol(tol: f64) -> Result<f64> {
    if tol.is_finite() && tol > 0. {
        Ok(tol)
    } else {
        Err(CliError::Input(format!("tolerance must be positive and finite, got {tol}")))
    }
}

fn load_linkage(path: &Path) -> Result<(LinkageFile, Factorization)> {
    let file = LinkageFile::from_json(&read(path)?)?;
    let (f, _) = file.to_model()?;
    Ok((file, f))
}

fn synth(a: &SynthArgs, stdout: &mut dyn Write) -> Result<()> {
    let tol = check_tol(a.tol)?;
    let free = if a.z.is_some() || a.z3.is_some() {
        FreeParams::Degenerate { z: a.z.unwrap_or(0.), z3: a.z3.unwrap_or(0.) }
    } else {
        FreeParams::Generic { z1: a.z1.unwrap_or(0.), z2: a.z2.unwrap_or(0.) }
    };
    let params = DesignParams::new(a.b, a.c, a.q1, a.q2, free).map_err(|e| CliError::Input(e.to_string()))?;
    let f = factorize(&params).map_err(|e| CliError::Failure(e.to_string()))?;
    let file = LinkageFile::from_factorization(&f, tol)?;
    emit(&a.out, &file.to_json(), stdout)?;
    if a.out != Path::new("-") {
        let branch = if params.is_degenerate() { "degenerate" } else { "generic" };
        writeln!(stdout, "wrote {} ({branch} branch, residual {:e})", a.out.display(), f.residual)
            .map_err(|e| io_err(&a.out, e))?;
    }
    Ok(())
}

fn verify(a: &VerifyArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut file = LinkageFile::from_json(&read(&a.file)?)?;
    if let Some(tol) = a.tol {
        file.design.tol = check_tol(tol)?;
    }
    let (f, _) = file.to_model()?;
    writeln!(stdout, "ok: max residual {:e} < tol {:e}", f.residual, file.design.tol).map_err(|e| io_err(&a.file, e))?;
    Ok(())
}

fn fmt_list(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

fn modes_cmd(a: &ModesArgs, stdout: &mut dyn Write) -> Result<()> {
    let (file, f) = load_linkage(&a.file)?;
    let tol = check_tol(a.tol.unwrap_or(file.design.tol))?;
    let params = f.params;
    let assembly = Assembly::from_index(a.assembly).expect("range-checked by the parser");
    let mut out = String::new();
    writeln!(
        out,
        "design b={} c={} q1={} q2={} ({} branch, b²+c²−4(q1²+q2²) = {:e})",
        params.b(),
        params.c(),
        params.q1(),
        params.q2(),
        if params.is_degenerate() { "degenerate" } else { "generic" },
        params.condition()
    )
    .unwrap();
    writeln!(out, "assembly {assembly}").unwrap();
    if assembly == Assembly::Second && !modes::assembly2_exists(&params) {
        writeln!(out, "second assembly mode does not exist: condition = {:e}", params.condition()).unwrap();
        return emit(Path::new("-"), &out, stdout);
    }
    let solutions = enumerate_modes(&params, assembly).map_err(|e| CliError::Input(e.to_string()))?;
    let ts = full_circle_samples(a.samples);
    let mut failed = Vec::new();
    for m in &solutions {
        write!(out, "{}: driver {}, {}", m.branch, m.driver(), m.realness).unwrap();
        if let Some(d) = m.discriminant {
            write!(out, " (discriminant {d:e})").unwrap();
        }
        if let Some(v1) = m.fixed_v1() {
            let name = if m.realness == Realness::Complex { "Re v1" } else { "v1" };
            write!(out, ", {name} = {v1:.12}").unwrap();
        }
        write!(out, ", domain {} on the projective line minus poles {}", m.driver(), fmt_list(&m.poles)).unwrap();
        if m.realness == Realness::Complex {
            writeln!(out, ", no real configurations").unwrap();
            continue;
        }
        let report = m.sweep(&f, &ts);
        writeln!(
            out,
            ", max closure residual {:e} over {} samples ({} skipped)",
            report.max_residual,
            report.evaluated,
            report.skipped.len()
        )
        .unwrap();
        if !report.is_closed(tol) {
            failed.push(m.branch.to_string());
        }
    }
    emit(Path::new("-"), &out, stdout)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failure(format!("closure residual above {tol:e} on {}", failed.join(", "))))
    }
}

/// Parses `a:b` with finite `a < b`.
pub fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("range `{s}` must look like a:b"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("range `{s}`: {e}"));
    let (a, b) = (parse(a)?, parse(b)?);
    if a.is_finite() && b.is_finite() && a < b {
        Ok((a, b))
    } else {
        Err(format!("range `{s}` needs finite a < b"))
    }
}

fn trace(a: &TraceArgs, stdout: &mut dyn Write) -> Result<()> {
    let branch: BranchLabel = a.branch.parse().map_err(|e: ModeError| CliError::Input(e.to_string()))?;
    if let Some(asm) = a.assembly {
        if asm != branch.assembly().index() {
            return Err(CliError::Input(format!("branch {branch} belongs to assembly {}", branch.assembly())));
        }
    }
    let point = parse_point(&a.point)?;
    if a.samples == 0 {
        return Err(CliError::Input("--samples must be positive".into()));
    }
    let ts = match &a.range {
        Some(r) => {
            let (lo, hi) = parse_range(r).map_err(CliError::Input)?;
            linear_samples(lo, hi, a.samples)
        }
        None => full_circle_samples(a.samples),
    };
    let (_, f) = load_linkage(&a.file)?;
    let mode = modes::mode_by_label(&f.params, branch)
        .map_err(|e| CliError::Input(e.to_string()))?
        .ok_or_else(|| CliError::Input(format!("branch {branch} does not exist for this design")))?;
    if mode.realness == Realness::Complex {
        return Err(CliError::Failure(format!(
            "branch {branch} has no real configurations (discriminant {:e})",
            mode.discriminant.unwrap_or(f64::NAN)
        )));
    }
    let traced = trace_point(&f, |t| mode.at(&f, t), point, &ts);
    let file = TrajectoryFile::from_trace(branch, point, &f.params, &traced);
    let text = match a.format {
        Format::Csv => file.to_csv(),
        Format::Json => file.to_json(),
    };
    emit(&a.out, &text, stdout)
}

/// Reads a trajectory in either format (JSON if it starts with `{`).
pub fn read_trajectory(text: &str) -> std::result::Result<TrajectoryFile, FileError> {
    if text.trim_start().starts_with('{') {
        TrajectoryFile::from_json(text)
    } else {
        TrajectoryFile::from_csv(text)
    }
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// Orthographic projection of the trajectories along `view` as an SVG
/// document, one polyline per trajectory.
pub fn render_svg(trajectories: &[(String, TrajectoryFile)], view: View) -> Result<String> {
    const SIZE: f64 = 600.;
    const MARGIN: f64 = 40.;
    let (iu, iv, labels) = match view {
        View::X => (1, 2, ("y", "z")),
        View::Y => (0, 2, ("x", "z")),
        View::Z => (0, 1, ("x", "y")),
    };
    let projected: Vec<Vec<(f64, f64)>> = trajectories
        .iter()
        .map(|(_, t)| t.points().iter().map(|p| (p[iu], p[iv])).collect())
        .collect();
    if let Some((name, _)) = trajectories.iter().zip(&projected).find(|(_, p)| p.is_empty()).map(|(t, _)| t) {
        return Err(CliError::Input(format!("{name}: empty trajectory")));
    }
    let all = projected.iter().flatten();
    let (mut umin, mut umax, mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(u, v) in all {
        umin = umin.min(u);
        umax = umax.max(u);
        vmin = vmin.min(v);
        vmax = vmax.max(v);
    }
    let span = (umax - umin).max(vmax - vmin).max(1e-12);
    let scale = (SIZE - 2. * MARGIN) / span;
    let (uc, vc) = ((umin + umax) / 2., (vmin + vmax) / 2.);
    let to_px = |(u, v): (f64, f64)| (SIZE / 2. + (u - uc) * scale, SIZE / 2. - (v - vc) * scale);

    let mut svg = String::new();
    writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#).unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(svg, r#"<text x="{MARGIN}" y="{}" font-family="sans-serif" font-size="12">{} → / {} ↑</text>"#, SIZE - 12., labels.0, labels.1).unwrap();
    for (n, ((name, t), pts)) in trajectories.iter().zip(&projected).enumerate() {
        let color = PALETTE[n % PALETTE.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|&p| {
                let (x, y) = to_px(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, coords.join(" ")).unwrap();
        let y = 20. + 16. * n as f64;
        writeln!(svg, r#"<line x1="{MARGIN}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="3"/>"#, y - 4., MARGIN + 20., y - 4.).unwrap();
        writeln!(svg, r#"<text x="{}" y="{y}" font-family="sans-serif" font-size="12">{} ({})</text>"#, MARGIN + 26., xml_escape(&t.mode), xml_escape(name)).unwrap();
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn plot(a: &PlotArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut trajectories = Vec::with_capacity(a.files.len());
    for path in &a.files {
        let t = read_trajectory(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        trajectories.push((name, t));
    }
    let svg = render_svg(&trajectories, a.view)?;
    emit(&a.out, &svg, stdout)
}
