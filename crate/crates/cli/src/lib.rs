//! Argument definitions and command implementations for the `tricorr` binary.
//!
//! Exit codes: 0 success, 1 tolerance or validation failure, 2 usage or input
//! error. Lines meant for scripts start with `verdict`, `threshold`, `row` or
//! `baseline`.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::thread;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tricorr_core::basis::{
    all_pairs, conjugation_coefficients, nonidentity_pairs, principal_basis,
};
use tricorr_core::criteria::{evaluate, f_delta, ghz_threshold, sweep_threshold};
use tricorr_core::linalg::{format_complex, read_matrix, write_matrix};
use tricorr_core::oracle::{validate_bounds, Rotation, ValidationConfig};
use tricorr_core::states::{ghz, noisy_state, w3, BiseparableCase, NoiseFamily};
use tricorr_core::tensor::decompose;
use tricorr_core::{Bipartition, CoefficientTriple, Criterion, DensityMatrix};

pub const DEFAULT_SEED: u64 = 2024;
pub const TABLE_TOLERANCE: f64 = 5e-4;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "tricorr",
    version,
    about = "Tripartite entanglement tests from principal-basis correlation tensors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the principal basis, or the transition matrix of a unitary.
    Basis(BasisArgs),
    /// Print the nonzero correlation coefficients of a state.
    Expand(ExpandArgs),
    /// Run an entanglement criterion on a state.
    Detect(DetectArgs),
    /// Locate the detection threshold along a noisy family.
    Sweep(SweepArgs),
    /// Recompute the threshold rows and compare them with reference values.
    ReproduceTables(TablesArgs),
    /// Write the f(delta) curve as CSV.
    Fdelta(FdeltaArgs),
    /// Search random biseparable states for witness values above the bound.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Matrix file holding a d x d unitary.
    #[arg(long)]
    pub unitary: Option<PathBuf>,
}

/// Reference state or file, with optional white noise.
#[derive(Debug, Args)]
pub struct StateArgs {
    /// `ghz`, `w` or `file:<path>`.
    #[arg(long)]
    pub state: StateSource,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Mixing parameter of the noisy family.
    #[arg(long)]
    pub noise: Option<f64>,
    /// How `--noise` is read: `noise-weight` weights the identity by x,
    /// `state-weight` weights the pure state by x. Defaults to `noise-weight`
    /// for GHZ and `state-weight` for W.
    #[arg(long)]
    pub convention: Option<Convention>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSource {
    Ghz,
    W,
    File(PathBuf),
}

impl FromStr for StateSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ghz" => Ok(StateSource::Ghz),
            "w" => Ok(StateSource::W),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(StateSource::File(PathBuf::from(p))),
                _ => Err(format!(
                    "unknown state `{s}` (expected ghz, w or file:<path>)"
                )),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    NoiseWeight,
    StateWeight,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Coefficients with modulus at or below this are omitted.
    #[arg(long, default_value_t = 1e-12)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long)]
    pub criterion: Criterion,
    /// Slice weights `a,b,c` (or `a,b`); fractions such as `1/3` are allowed.
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<CoefficientTriple>,
    /// Apply the pure-state bounds to mixed input.
    #[arg(long)]
    pub assume_convexity: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Ghz,
    W,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub family: FamilyName,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Defaults to `cor1` for GHZ and `cor2` for W.
    #[arg(long)]
    pub criterion: Option<Criterion>,
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: CoefficientTriple,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// Largest allowed gap between a reference and a computed threshold.
    #[arg(long, default_value_t = TABLE_TOLERANCE)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct FdeltaArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    /// Output file; stdout when omitted.
    #[arg(long, visible_alias = "csv")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long)]
    pub case: BiseparableCase,
    #[arg(long)]
    pub bipartition: Bipartition,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, env = "WITNESS_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Slice weights for qubit witnesses.
    #[arg(long, default_value = "0,1,0", allow_hyphen_values = true)]
    pub coeffs: CoefficientTriple,
    /// `pair` rotates only the two grouped parties; `all` also rotates the
    /// isolated one.
    #[arg(long, default_value = "pair")]
    pub rotation: Rotation,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

/// Runs a parsed command, writing its report to `out`. Errors are input or
/// usage problems; a failed comparison is reported through the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8> {
    match &cli.command {
        Command::Basis(a) => basis(a, out),
        Command::Expand(a) => expand(a, out),
        Command::Detect(a) => detect(a, out),
        Command::Sweep(a) => sweep(a, out),
        Command::ReproduceTables(a) => reproduce_tables(a, out),
        Command::Fdelta(a) => fdelta(a, out),
        Command::Validate(a) => validate(a, out),
    }
}

pub fn load_state(args: &StateArgs) -> Result<DensityMatrix> {
    let noisy = |family: NoiseFamily, native: Convention, x: f64| -> Result<DensityMatrix> {
        let x = if args.convention.unwrap_or(native) == native {
            x
        } else {
            1.0 - x
        };
        Ok(noisy_state(family.with_x(x))?)
    };
    match (&args.state, args.noise) {
        (StateSource::File(_), Some(_)) => bail!("--noise applies only to the ghz and w states"),
        (StateSource::File(path), None) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Ok(DensityMatrix::from_text(&text)
                .with_context(|| format!("parsing {}", path.display()))?)
        }
        (StateSource::W, _) if args.dim != 2 => bail!("the W state is defined for qubits only"),
        (StateSource::Ghz, None) => Ok(ghz(args.dim)?.density()),
        (StateSource::W, None) => Ok(w3().density()),
        (StateSource::Ghz, Some(x)) => {
            noisy(NoiseFamily::ghz(args.dim, 0.0), Convention::NoiseWeight, x)
        }
        (StateSource::W, Some(x)) => noisy(NoiseFamily::w(0.0), Convention::StateWeight, x),
    }
}

fn basis(args: &BasisArgs, out: &mut dyn Write) -> Result<u8> {
    let basis = principal_basis(args.dim)?;
    match &args.unitary {
        None => {
            for p in all_pairs(args.dim) {
                writeln!(out, "A[{p}]")?;
                write!(out, "{}", write_matrix(basis.element(p)))?;
            }
        }
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let u = read_matrix(&text)?;
            let m = conjugation_coefficients(&basis, &u)?;
            let labels: Vec<String> = nonidentity_pairs(args.dim).map(|p| p.to_string()).collect();
            writeln!(out, "# rows and columns: {}", labels.join(" "))?;
            write!(out, "{}", write_matrix(m.matrix()))?;
        }
    }
    Ok(EXIT_OK)
}

fn expand(args: &ExpandArgs, out: &mut dyn Write) -> Result<u8> {
    let rho = load_state(&args.state)?;
    let dec = decompose(&rho)?;
    writeln!(out, "dims {0} {0} {0}", dec.dim())?;
    for ([p, q, s], r) in dec.iter() {
        if r.norm() > args.threshold {
            writeln!(out, "r[{p}][{q}][{s}] = {}", format_complex(r))?;
        }
    }
    Ok(EXIT_OK)
}

fn detect(args: &DetectArgs, out: &mut dyn Write) -> Result<u8> {
    let rho = load_state(&args.state)?;
    let coeffs = match (args.criterion, args.coeffs) {
        (Criterion::Theorem2, c) => c.unwrap_or(CoefficientTriple::new(0.0, 1.0, 0.0)),
        (_, Some(c)) => c,
        (c, None) => bail!("--coeffs is required for {c}"),
    };
    let verdicts = evaluate(&rho, args.criterion, coeffs, args.assume_convexity)?;
    for v in &verdicts {
        write!(
            out,
            "{} {}: witness {:.9} bound {:.9} -> {}",
            v.criterion, v.bipartition, v.witness_value, v.bound, v.conclusion
        )?;
        if let Some((i, ii)) = v.case_bounds {
            write!(out, " (case i {i:.9}, case ii {ii:.9})")?;
        }
        writeln!(out)?;
    }
    for v in &verdicts {
        writeln!(out, "{}", v.machine_line())?;
    }
    Ok(EXIT_OK)
}

fn family_of(name: FamilyName, dim: usize) -> Result<NoiseFamily> {
    match name {
        FamilyName::Ghz => Ok(NoiseFamily::ghz(dim, 0.0)),
        FamilyName::W if dim == 2 => Ok(NoiseFamily::w(0.0)),
        FamilyName::W => Err(anyhow!("the W family is defined for qubits only")),
    }
}

fn sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<u8> {
    let family = family_of(args.family, args.dim)?;
    let criterion = args.criterion.unwrap_or(match args.family {
        FamilyName::Ghz => Criterion::Corollary1,
        FamilyName::W => Criterion::Corollary2,
    });
    let x = sweep_threshold(family, criterion, args.coeffs)?;
    writeln!(out, "threshold {x:.10}")?;
    Ok(EXIT_OK)
}

/// Reference thresholds: the GHZ family is detected below the value, the W
/// family above it.
pub const GHZ_ROWS: [((f64, f64, f64), f64); 3] = [
    ((-4.0, 1.0, 6.0), 0.75),
    ((3.0, 1.0, 7.0), 0.7857),
    ((5.0, 1.0 / 3.0, 5.0), 0.9),
];
pub const W_ROWS: [((f64, f64), f64); 3] = [
    ((1.0, 3.0), 0.5025),
    ((1.0, 10.0), 0.4361),
    ((0.0, 1.0), 0.4286),
];
pub const BASELINES: [(&str, f64); 3] = [("ghz", 2.0 / 3.0), ("w", 0.6), ("w-b-only", 0.4334)];

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub family: FamilyName,
    pub coeffs: CoefficientTriple,
    pub reference: f64,
    pub analytic: f64,
    pub sweep: f64,
}

impl TableRow {
    pub fn delta(&self) -> f64 {
        (self.analytic - self.reference)
            .abs()
            .max((self.sweep - self.reference).abs())
    }
}

pub fn compute_table_rows(jobs: usize) -> Result<Vec<TableRow>> {
    type Job = Box<dyn Fn() -> Result<TableRow> + Send + Sync>;
    let mut work: Vec<Job> = Vec::new();
    for ((a, b, c), reference) in GHZ_ROWS {
        work.push(Box::new(move || {
            let coeffs = CoefficientTriple::new(a, b, c);
            Ok(TableRow {
                family: FamilyName::Ghz,
                coeffs,
                reference,
                analytic: ghz_threshold(coeffs)?,
                sweep: sweep_threshold(NoiseFamily::ghz(2, 0.0), Criterion::Corollary1, coeffs)?,
            })
        }));
    }
    for ((a, b), reference) in W_ROWS {
        work.push(Box::new(move || {
            let coeffs = CoefficientTriple::new(a, b, 0.0);
            Ok(TableRow {
                family: FamilyName::W,
                coeffs,
                reference,
                analytic: f_delta(a / b),
                sweep: sweep_threshold(NoiseFamily::w(0.0), Criterion::Corollary2, coeffs)?,
            })
        }));
    }
    let jobs = jobs.clamp(1, work.len());
    let mut rows: Vec<Option<Result<TableRow>>> = (0..work.len()).map(|_| None).collect();
    thread::scope(|s| {
        let handles: Vec<_> = (0..jobs)
            .map(|w| {
                let work = &work;
                s.spawn(move || {
                    (w..work.len())
                        .step_by(jobs)
                        .map(|i| (i, work[i]()))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("table worker panicked") {
                rows[i] = Some(r);
            }
        }
    });
    rows.into_iter()
        .map(|r| r.expect("every row computed"))
        .collect()
}

fn reproduce_tables(args: &TablesArgs, out: &mut dyn Write) -> Result<u8> {
    let rows = compute_table_rows(args.jobs)?;
    let mut worst = 0.0f64;
    for family in [FamilyName::Ghz, FamilyName::W] {
        let (name, range) = match family {
            FamilyName::Ghz => ("ghz", "detected for 0 <= x < threshold"),
            FamilyName::W => ("w", "detected for threshold < x <= 1"),
        };
        writeln!(out, "# {name} family: {range}")?;
        writeln!(out, "# row family coeffs reference analytic sweep delta")?;
        for r in rows.iter().filter(|r| r.family == family) {
            worst = worst.max(r.delta());
            writeln!(
                out,
                "row {name} {} {:.4} {:.10} {:.10} {:.3e}",
                r.coeffs,
                r.reference,
                r.analytic,
                r.sweep,
                r.delta()
            )?;
        }
    }
    for (name, value) in BASELINES {
        writeln!(out, "baseline {name} {value:.4}")?;
    }
    if worst > args.tolerance {
        writeln!(
            out,
            "FAIL largest delta {worst:.3e} exceeds {:.1e}",
            args.tolerance
        )?;
        return Ok(EXIT_FAILURE);
    }
    writeln!(out, "OK largest delta {worst:.3e}")?;
    Ok(EXIT_OK)
}

fn fdelta(args: &FdeltaArgs, out: &mut dyn Write) -> Result<u8> {
    let finite = args.from.is_finite() && args.to.is_finite() && args.step.is_finite();
    if !finite || args.from >= args.to || args.step <= 0.0 {
        bail!("need from < to and step > 0");
    }
    let n = ((args.to - args.from) / args.step + 1e-9).floor() as usize + 1;
    let mut csv = String::from("delta,f\n");
    for k in 0..n {
        let delta = args.from + k as f64 * args.step;
        csv.push_str(&format!("{delta:.6},{:.12}\n", f_delta(delta)));
    }
    match &args.output {
        Some(path) => {
            fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?
        }
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(EXIT_OK)
}

fn validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<u8> {
    let cfg = ValidationConfig {
        coeffs: args.coeffs,
        rotation: args.rotation,
        jobs: args.jobs,
        ..ValidationConfig::new(
            args.seed,
            args.dim,
            args.case,
            args.bipartition,
            args.samples,
        )
    };
    let report = validate_bounds(&cfg)?;
    writeln!(out, "{report}")?;
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}
