//! Command-line front end.
//!
//! Every energy-like flag is given in units of the mass; `--mass` sets the
//! physical scale the library computes with, and reported energies and
//! momenta are converted back to units of the mass.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::oracle::{self, Fault, SuiteConfig};
use crate::stepsolve::{
    self, classify_zone, coefficients, momenta, tunneling_range, velocity, Branch, Kinematics,
    Spin, StepPotential, Zone, BOUNDARY_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DEGENERATE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "qdirac",
    version,
    about = "Quaternionic Dirac step potential: zones, momenta, velocities, spinors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Momenta, zone, velocities and coefficients at one point.
    Point(PointArgs),
    /// Grid scan over (V0, |W0|) for contour data.
    Scan(ScanArgs),
    /// Explicit spinor solution and its residual.
    Spinor(SpinorArgs),
    /// Tunneling energy range for a potential.
    Tunneling(TunnelingArgs),
    /// Run the seeded oracle verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Plus,
    Minus,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Plus => Branch::Plus,
            BranchArg::Minus => Branch::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpinArg {
    Up,
    Down,
}

impl From<SpinArg> for Spin {
    fn from(s: SpinArg) -> Self {
        match s {
            SpinArg::Up => Spin::Up,
            SpinArg::Down => Spin::Down,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    TunnelingRange,
    VPlusSq,
    VMinusSq,
    Zone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    FlipDelta,
}

/// Potential flags shared by several subcommands.
#[derive(Debug, Clone, Args)]
pub struct PotentialArgs {
    /// Complex potential V0, units of m.
    #[arg(long = "v0", default_value_t = 0.0, allow_negative_numbers = true)]
    pub v0: f64,
    /// Modulus of the pure quaternionic potential |W0|, units of m.
    #[arg(long = "w0-abs", default_value_t = 0.0, allow_negative_numbers = true)]
    pub w0_abs: f64,
    /// Argument of W0 in radians.
    #[arg(long = "w0-arg", default_value_t = 0.0, allow_negative_numbers = true)]
    pub w0_arg: f64,
    /// Particle mass setting the physical scale.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub mass: f64,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// Incoming energy E, units of m.
    #[arg(long, allow_negative_numbers = true)]
    pub energy: f64,
    #[command(flatten)]
    pub pot: PotentialArgs,
    /// Relative width of the zone-boundary band.
    #[arg(long, default_value_t = BOUNDARY_TOL)]
    pub tol: f64,
    /// Emit JSON (or key,value CSV) instead of text.
    #[arg(long)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct SpinorArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub energy: f64,
    #[command(flatten)]
    pub pot: PotentialArgs,
    #[arg(long, value_enum, default_value_t = BranchArg::Minus)]
    pub branch: BranchArg,
    #[arg(long, value_enum, default_value_t = SpinArg::Up)]
    pub spin: SpinArg,
    /// Position z > 0 inside the potential region, units of 1/m.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub z: f64,
    #[arg(long)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct TunnelingArgs {
    #[command(flatten)]
    pub pot: PotentialArgs,
    #[arg(long)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub end: f64,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("expected a:b, got {s:?}"))?;
        let start: f64 = a
            .trim()
            .parse()
            .map_err(|e| format!("bad range start {a:?}: {e}"))?;
        let end: f64 = b
            .trim()
            .parse()
            .map_err(|e| format!("bad range end {b:?}: {e}"))?;
        if !(start.is_finite() && end.is_finite() && end > start) {
            return Err(format!("range must satisfy a < b, got {s:?}"));
        }
        Ok(Range { start, end })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected NXxNY, got {s:?}"))?;
        let nx: usize = a.trim().parse().map_err(|e| format!("bad NX {a:?}: {e}"))?;
        let ny: usize = b.trim().parse().map_err(|e| format!("bad NY {b:?}: {e}"))?;
        if nx < 2 || ny < 2 {
            return Err(format!("grid needs at least 2 points per axis, got {s:?}"));
        }
        Ok(Grid { nx, ny })
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    /// Fixed incoming energy for velocity and zone scans, units of m.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub energy: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 0.0)]
    pub w0_arg: f64,
    #[arg(long, default_value = "201x201")]
    pub grid: Grid,
    /// V0 range, units of m.
    #[arg(long, default_value = "0:2", allow_hyphen_values = true)]
    pub xrange: Range,
    /// |W0| range, units of m.
    #[arg(long, default_value = "0:2", allow_hyphen_values = true)]
    pub yrange: Range,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long = "n-points", default_value_t = 1000)]
    pub n_points: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Negative control: corrupt the analytic momenta.
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<FaultArg>,
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) => EXIT_USAGE,
            Error::Degenerate(_) | Error::Consistency(_) => EXIT_DEGENERATE,
            Error::Io(_) => EXIT_IO,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("I/O error: {e}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Physical kinematics and potential from flags given in units of `mass`.
fn physical(energy: f64, pot: &PotentialArgs) -> CliResult<(Kinematics<f64>, StepPotential<f64>)> {
    let m = pot.mass;
    if !(m.is_finite() && m > 0.0) {
        return Err(CliError::usage(format!("--mass must be positive, got {m}")));
    }
    if !(pot.w0_abs >= 0.0) {
        return Err(CliError::usage(format!(
            "--w0-abs must be non-negative, got {}",
            pot.w0_abs
        )));
    }
    let k = Kinematics::new(energy * m, m)?;
    let p = StepPotential::from_polar(pot.v0 * m, pot.w0_abs * m, pot.w0_arg)?;
    Ok((k, p))
}

fn opt(r: crate::error::Result<f64>) -> CliResult<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Domain(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Serialize)]
struct ComplexOut {
    re: f64,
    im: f64,
}

impl From<Complex<f64>> for ComplexOut {
    fn from(z: Complex<f64>) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Serialize)]
pub struct PointReport {
    energy: f64,
    v0: f64,
    w0_abs: f64,
    w0_arg: f64,
    mass: f64,
    delta: f64,
    q_minus_sq: f64,
    q_plus_sq: f64,
    big_q_minus_sq: f64,
    big_q_plus_sq: f64,
    zone: Zone,
    lower_boundary: f64,
    upper_boundary: f64,
    v_minus: Option<f64>,
    v_plus: Option<f64>,
    a_minus: ComplexOut,
    a_plus: ComplexOut,
    m_minus: ComplexOut,
    m_plus: ComplexOut,
    n_minus: ComplexOut,
    n_plus: ComplexOut,
}

pub fn point_report(args: &PointArgs) -> CliResult<PointReport> {
    let (k, pot) = physical(args.energy, &args.pot)?;
    let m = k.mass;
    let m2 = m * m;
    let mom = momenta(&k, &pot)?;
    let zone = classify_zone(&k, &pot, args.tol)?;
    let v_minus = opt(velocity(&k, &pot, Branch::Minus))?;
    let v_plus = opt(velocity(&k, &pot, Branch::Plus))?;
    let co = coefficients(&k, &pot)?;
    // coefficients A are dimensionless, M and N carry 1/energy
    Ok(PointReport {
        energy: args.energy,
        v0: args.pot.v0,
        w0_abs: args.pot.w0_abs,
        w0_arg: args.pot.w0_arg,
        mass: m,
        delta: mom.delta / m2,
        q_minus_sq: mom.complex_minus_sq / m2,
        q_plus_sq: mom.complex_plus_sq / m2,
        big_q_minus_sq: mom.minus_sq / m2,
        big_q_plus_sq: mom.plus_sq / m2,
        zone: zone.zone,
        lower_boundary: zone.lower / m,
        upper_boundary: zone.upper / m,
        v_minus,
        v_plus,
        a_minus: co.a_minus.into(),
        a_plus: co.a_plus.into(),
        m_minus: (co.m_minus * m).into(),
        m_plus: (co.m_plus * m).into(),
        n_minus: (co.n_minus * m).into(),
        n_plus: (co.n_plus * m).into(),
    })
}

/// Flattens a serializable report into `key,value` lines.
fn key_values(value: &serde_json::Value, prefix: &str, out: &mut String) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                key_values(v, &key, out);
            }
        }
        serde_json::Value::String(s) => out.push_str(&format!("{prefix},{s}\n")),
        serde_json::Value::Null => out.push_str(&format!("{prefix},\n")),
        other => out.push_str(&format!("{prefix},{other}\n")),
    }
}

fn render<R: Serialize>(
    report: &R,
    format: Option<Format>,
    text: impl FnOnce(&R) -> String,
) -> CliResult<String> {
    match format {
        None => Ok(text(report)),
        Some(Format::Json) => {
            Ok(serde_json::to_string_pretty(report).expect("report serializes") + "\n")
        }
        Some(Format::Csv) => {
            let mut out = String::from("key,value\n");
            key_values(
                &serde_json::to_value(report).expect("report serializes"),
                "",
                &mut out,
            );
            Ok(out)
        }
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined (evanescent)".to_string(), |x| format!("{x}"))
}

fn fmt_c(z: &ComplexOut) -> String {
    format!("{} {:+}i", z.re, z.im)
}

pub fn cmd_point(args: &PointArgs) -> CliResult<String> {
    let r = point_report(args)?;
    render(&r, args.format, |r| {
        format!(
            "E/m = {}  V0/m = {}  |W0|/m = {}  arg W0 = {}\n\
             zone            {:?} (lower {}, upper {})\n\
             delta/m^2       {}\n\
             q-^2, q+^2      {}, {}\n\
             Q-^2, Q+^2      {}, {}\n\
             v-              {}\n\
             v+              {}\n\
             A-, A+          {}, {}\n\
             m M-, m M+      {}, {}\n\
             m N-, m N+      {}, {}\n",
            r.energy,
            r.v0,
            r.w0_abs,
            r.w0_arg,
            r.zone,
            r.lower_boundary,
            r.upper_boundary,
            r.delta,
            r.q_minus_sq,
            r.q_plus_sq,
            r.big_q_minus_sq,
            r.big_q_plus_sq,
            fmt_opt(r.v_minus),
            fmt_opt(r.v_plus),
            fmt_c(&r.a_minus),
            fmt_c(&r.a_plus),
            fmt_c(&r.m_minus),
            fmt_c(&r.m_plus),
            fmt_c(&r.n_minus),
            fmt_c(&r.n_plus),
        )
    })
}

#[derive(Debug, Serialize)]
pub struct SpinorReport {
    branch: Branch,
    spin: Spin,
    z: f64,
    /// `(u_r, w_r)` for each component `u_r + j w_r`.
    components: Vec<(ComplexOut, ComplexOut)>,
    residual: f64,
}

pub fn spinor_report(args: &SpinorArgs) -> CliResult<SpinorReport> {
    let (k, pot) = physical(args.energy, &args.pot)?;
    let branch: Branch = args.branch.into();
    let z = args.z / k.mass;
    let state = stepsolve::psi(branch, z, args.spin.into(), &k, &pot)?;
    let q = momenta(&k, &pot)?.get(branch);
    let residual = oracle::residual_norm(&state, q, &k, &pot)? / k.mass;
    Ok(SpinorReport {
        branch,
        spin: args.spin.into(),
        z: args.z,
        components: (0..4)
            .map(|r| (state.u.c[r].into(), state.w.c[r].into()))
            .collect(),
        residual,
    })
}

pub fn cmd_spinor(args: &SpinorArgs) -> CliResult<String> {
    let r = spinor_report(args)?;
    render(&r, args.format, |r| {
        let mut s = format!(
            "psi_{:?} spin {:?} at z = {}  (component = u + j w)\n",
            r.branch, r.spin, r.z
        );
        for (i, (u, w)) in r.components.iter().enumerate() {
            s.push_str(&format!("  [{i}]  u = {}   w = {}\n", fmt_c(u), fmt_c(w)));
        }
        s.push_str(&format!(
            "residual |D psi| / (m |psi|) = {:e}\n",
            r.residual
        ));
        s
    })
}

#[derive(Debug, Serialize)]
pub struct TunnelingReport {
    v0: f64,
    w0_abs: f64,
    delta_e: f64,
    lower_boundary: f64,
    upper_boundary: f64,
    inside_circle: bool,
}

pub fn cmd_tunneling(args: &TunnelingArgs) -> CliResult<String> {
    let m = args.pot.mass;
    if !(m.is_finite() && m > 0.0) {
        return Err(CliError::usage(format!("--mass must be positive, got {m}")));
    }
    let pot = StepPotential::from_polar(args.pot.v0 * m, args.pot.w0_abs * m, args.pot.w0_arg)?;
    let delta_e = tunneling_range(&pot, m)? / m;
    let (lower, upper) = stepsolve::zone_boundaries(&pot, m);
    let r = TunnelingReport {
        v0: args.pot.v0,
        w0_abs: args.pot.w0_abs,
        delta_e,
        lower_boundary: lower / m,
        upper_boundary: upper / m,
        inside_circle: stepsolve::inside_circle(&pot, m),
    };
    render(&r, args.format, |r| {
        format!(
            "V0/m = {}  |W0|/m = {}\ntunneling range dE/m = {}\nevanescent window  ({}, {})\ninside circle      {}\n",
            r.v0, r.w0_abs, r.delta_e, r.lower_boundary, r.upper_boundary, r.inside_circle
        )
    })
}

/// One grid cell of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub v0: f64,
    pub w0: f64,
    /// `None` where the quantity is undefined (degenerate velocity).
    pub value: Option<f64>,
    pub zone: &'static str,
}

/// Sentinel written for `v_minus_sq` in the evanescent zone.
pub const EVANESCENT_SENTINEL: f64 = -1.0;

fn axis(range: Range, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        range.end
    } else {
        range.start + (range.end - range.start) * i as f64 / (n - 1) as f64
    }
}

fn scan_cell(args: &ScanArgs, k: &Kinematics<f64>, v0: f64, w0: f64) -> CliResult<ScanRow> {
    let m = args.mass;
    let pot = StepPotential::from_polar(v0 * m, w0 * m, args.w0_arg)?;
    let zone = classify_zone(k, &pot, BOUNDARY_TOL)?.zone;
    let value = match args.quantity {
        Quantity::TunnelingRange => Some(tunneling_range(&pot, m)? / m),
        Quantity::Zone => Some(match zone {
            Zone::Diffusion => 0.0,
            Zone::Evanescent => 1.0,
            Zone::Klein => 2.0,
            Zone::Boundary => 3.0,
        }),
        Quantity::VPlusSq | Quantity::VMinusSq => {
            let branch = if args.quantity == Quantity::VPlusSq {
                Branch::Plus
            } else {
                Branch::Minus
            };
            match velocity(k, &pot, branch) {
                Ok(v) => Some(v * v),
                Err(Error::Domain(_)) => Some(EVANESCENT_SENTINEL),
                Err(Error::Degenerate(_)) => None,
                Err(e) => return Err(e.into()),
            }
        }
    };
    Ok(ScanRow {
        v0,
        w0,
        value,
        zone: zone.label(),
    })
}

/// Evaluates the grid in parallel; rows come back in row-major order
/// (V0 outer, |W0| inner) regardless of scheduling.
pub fn scan_rows(args: &ScanArgs) -> CliResult<Vec<ScanRow>> {
    if args.xrange.start < 0.0 || args.yrange.start < 0.0 {
        return Err(CliError::usage("scan ranges must be non-negative"));
    }
    if !(args.mass.is_finite() && args.mass > 0.0) {
        return Err(CliError::usage(format!(
            "--mass must be positive, got {}",
            args.mass
        )));
    }
    let k = Kinematics::new(args.energy * args.mass, args.mass)?;
    let Grid { nx, ny } = args.grid;
    (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / ny, idx % ny);
            scan_cell(args, &k, axis(args.xrange, nx, i), axis(args.yrange, ny, j))
        })
        .collect()
}

fn write_scan(args: &ScanArgs, rows: &[ScanRow], out: &mut dyn Write) -> io::Result<()> {
    match args.format {
        Format::Csv => {
            writeln!(out, "V0_over_m,W0_over_m,value,zone")?;
            for r in rows {
                match r.value {
                    Some(v) => writeln!(out, "{},{},{},{}", r.v0, r.w0, v, r.zone)?,
                    None => writeln!(out, "{},{},,{}", r.v0, r.w0, r.zone)?,
                }
            }
        }
        Format::Json => {
            let doc = json!({
                "metadata": {
                    "version": env!("CARGO_PKG_VERSION"),
                    "seed": null,
                    "quantity": args.quantity,
                    "energy_over_m": args.energy,
                    "mass": args.mass,
                    "w0_arg": args.w0_arg,
                    "grid": [args.grid.nx, args.grid.ny],
                    "xrange": [args.xrange.start, args.xrange.end],
                    "yrange": [args.yrange.start, args.yrange.end],
                    "evanescent_sentinel": EVANESCENT_SENTINEL,
                },
                "rows": rows,
            });
            serde_json::to_writer(&mut *out, &doc)?;
            writeln!(out)?;
        }
    }
    out.flush()
}

pub fn cmd_scan(args: &ScanArgs) -> CliResult<String> {
    let rows = scan_rows(args)?;
    match &args.output {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            write_scan(args, &rows, &mut file)?;
            Ok(format!("wrote {} rows to {}\n", rows.len(), path.display()))
        }
        None => {
            let mut buf = Vec::new();
            write_scan(args, &rows, &mut buf)?;
            Ok(String::from_utf8(buf).expect("scan output is UTF-8"))
        }
    }
}

/// Runs the verification suite; the JSON report is returned with exit
/// code 0 on success and 4 otherwise.
pub fn cmd_verify(args: &VerifyArgs) -> (i32, CliResult<String>) {
    let config = SuiteConfig {
        seed: args.seed,
        n_points: args.n_points,
        fault: args
            .inject_fault
            .map(|FaultArg::FlipDelta| Fault::FlipDeltaSign),
    };
    let report = oracle::run_suite(&config);
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    let code = if report.pass { EXIT_OK } else { EXIT_VERIFY };
    match &args.output {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => (
                code,
                Ok(format!(
                    "verification {} ({} / {} checks), report written to {}\n",
                    if report.pass { "passed" } else { "FAILED" },
                    report.checks_passed,
                    report.checks_run,
                    path.display()
                )),
            ),
            Err(e) => (EXIT_IO, Err(e.into())),
        },
        None => (code, Ok(text)),
    }
}

/// Parses `argv`, runs the command and writes its output. Returns the
/// process exit code.
pub fn run<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    let (code, result) = match &cli.command {
        Command::Point(a) => (EXIT_OK, cmd_point(a)),
        Command::Scan(a) => (EXIT_OK, cmd_scan(a)),
        Command::Spinor(a) => (EXIT_OK, cmd_spinor(a)),
        Command::Tunneling(a) => (EXIT_OK, cmd_tunneling(a)),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(text) => {
            if stdout.write_all(text.as_bytes()).is_err() {
                return EXIT_IO;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grid_and_range() {
        assert_eq!("11x21".parse::<Grid>().unwrap(), Grid { nx: 11, ny: 21 });
        assert!("1x5".parse::<Grid>().is_err());
        assert!("11".parse::<Grid>().is_err());
        assert_eq!(
            "0:2.5".parse::<Range>().unwrap(),
            Range {
                start: 0.0,
                end: 2.5
            }
        );
        assert!("2:1".parse::<Range>().is_err());
        assert!("a:1".parse::<Range>().is_err());
    }

    #[test]
    fn axis_hits_endpoints() {
        let r = Range {
            start: 0.0,
            end: 2.0,
        };
        assert_eq!(axis(r, 201, 0), 0.0);
        assert_eq!(axis(r, 201, 200), 2.0);
        assert_eq!(axis(r, 201, 31), 0.31);
    }

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let argv = std::iter::once("qdirac").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    fn csv_value(text: &str, v0: &str, w0: &str) -> f64 {
        text.lines()
            .skip(1)
            .find_map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (f[0] == v0 && f[1] == w0).then(|| f[2].parse().unwrap())
            })
            .unwrap_or_else(|| panic!("no row ({v0}, {w0})"))
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            run_str(&["point", "--energy", "2", "--v0", "0.5", "--w0-abs", "0.5"]).0,
            EXIT_OK
        );
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
        assert_eq!(run_str(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["point", "--energy", "0.5"]).0, EXIT_USAGE);
        assert_eq!(
            run_str(&["point", "--energy", "2", "--v0", "-1"]).0,
            EXIT_USAGE
        );
        assert_eq!(
            run_str(&["scan", "--quantity", "zone", "--grid", "1x4"]).0,
            EXIT_USAGE
        );
        let (code, _, err) = run_str(&[
            "scan",
            "--quantity",
            "zone",
            "--grid",
            "3x3",
            "--output",
            "/nonexistent/dir/x.csv",
        ]);
        assert_eq!(code, EXIT_IO, "{err}");
        assert_eq!(run_str(&["verify", "--n-points", "20"]).0, EXIT_OK);
        assert_eq!(
            run_str(&["verify", "--n-points", "20", "--inject-fault", "flip-delta"]).0,
            EXIT_VERIFY
        );
    }

    #[test]
    fn degenerate_point_exits_two() {
        // V0 = 0, |W0| = p: the minus-branch velocity factor vanishes
        let p = 3f64.sqrt().to_string();
        let (code, _, err) = run_str(&["point", "--energy", "2", "--w0-abs", &p]);
        assert_eq!(code, EXIT_DEGENERATE, "{err}");
    }

    #[test]
    fn scan_sample_values() {
        let (code, out, _) = run_str(&[
            "scan",
            "--quantity",
            "tunneling_range",
            "--grid",
            "41x51",
            "--xrange",
            "0:2",
            "--yrange",
            "0:0.5",
        ]);
        assert_eq!(code, 0);
        assert_eq!(
            out.lines().next().unwrap(),
            "V0_over_m,W0_over_m,value,zone"
        );
        assert_eq!(out.lines().count(), 1 + 41 * 51);
        assert!((csv_value(&out, "0.05", "0.32") - 0.10).abs() < 0.005);
        for x in ["0", "0.5", "1.35", "2"] {
            let want: f64 = x.parse::<f64>().unwrap().min(2.0);
            assert!((csv_value(&out, x, "0") - want).abs() < 1e-12);
        }

        let (_, out, _) = run_str(&[
            "scan",
            "--quantity",
            "v_minus_sq",
            "--grid",
            "5x11",
            "--xrange",
            "0:1",
            "--yrange",
            "0:2",
        ]);
        for w in ["0.2", "0.8", "1.4"] {
            assert!((csv_value(&out, "0", w) - 0.75).abs() < 1e-12);
        }
        // evanescent cells carry the sentinel and the zone label
        assert!(out.lines().any(|l| l.ends_with(",-1,E")));
    }

    #[test]
    fn scan_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let mut files = Vec::new();
        for (i, threads) in [1, 4].into_iter().enumerate() {
            let path = dir.path().join(format!("scan{i}.json"));
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let code = pool.install(|| {
                run_str(&[
                    "scan",
                    "--quantity",
                    "v_plus_sq",
                    "--grid",
                    "31x29",
                    "--format",
                    "json",
                    "--output",
                    path.to_str().unwrap(),
                ])
                .0
            });
            assert_eq!(code, 0);
            files.push(std::fs::read(&path).unwrap());
        }
        assert_eq!(files[0], files[1]);
        let doc: serde_json::Value = serde_json::from_slice(&files[0]).unwrap();
        assert_eq!(doc["rows"].as_array().unwrap().len(), 31 * 29);
        assert_eq!(doc["metadata"]["quantity"], "v_plus_sq");
    }

    #[test]
    fn verify_report_is_reproducible() {
        let a = run_str(&["verify", "--seed", "7", "--n-points", "50"]);
        let b = run_str(&["verify", "--seed", "7", "--n-points", "50"]);
        assert_eq!(a, b);
        let doc: serde_json::Value = serde_json::from_str(&a.1).unwrap();
        assert_eq!(doc["pass"], true);
        assert_eq!(doc["config"]["seed"], 7);
    }

    #[test]
    fn point_and_spinor_formats() {
        let (_, out, _) = run_str(&[
            "point", "--energy", "2", "--v0", "0.5", "--w0-abs", "0.5", "--format", "json",
        ]);
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["zone"], "Diffusion");
        assert!(
            (doc["big_q_minus_sq"].as_f64().unwrap()
                - (1.25 + 0.25 - 2.0 * doc["delta"].as_f64().unwrap()))
            .abs()
                < 1e-12
        );

        // mass rescaling leaves dimensionless output unchanged
        let base = [
            "spinor", "--energy", "2.3", "--v0", "0.7", "--w0-abs", "0.4", "--w0-arg", "0.3",
            "--branch", "plus", "--z", "0.5", "--format", "json",
        ];
        let (_, a, _) = run_str(&base);
        let mut scaled = base.to_vec();
        scaled.extend(["--mass", "3.5"]);
        let (_, b, _) = run_str(&scaled);
        let (da, db): (serde_json::Value, serde_json::Value) = (
            serde_json::from_str(&a).unwrap(),
            serde_json::from_str(&b).unwrap(),
        );
        assert!(da["residual"].as_f64().unwrap() < 1e-12);
        assert!(db["residual"].as_f64().unwrap() < 1e-12);
        let flat = |d: &serde_json::Value| -> Vec<f64> {
            d["components"]
                .as_array()
                .unwrap()
                .iter()
                .flat_map(|pair| {
                    pair.as_array()
                        .unwrap()
                        .iter()
                        .flat_map(|z| [z["re"].as_f64().unwrap(), z["im"].as_f64().unwrap()])
                })
                .collect()
        };
        for (x, y) in flat(&da).iter().zip(flat(&db)) {
            assert!((x - y).abs() < 1e-12);
        }

        let (code, out, _) = run_str(&[
            "tunneling",
            "--v0",
            "0.75",
            "--w0-abs",
            "0.97",
            "--format",
            "csv",
        ]);
        assert_eq!(code, 0);
        assert!(out.starts_with("key,value\n"));
        assert!(out.contains("inside_circle,"));
    }
}
