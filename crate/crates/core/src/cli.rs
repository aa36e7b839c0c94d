//! Command-line front end.
//!
//! Exit codes: 0 entangled / success, 1 not detected (or a failed check),
//! 2 usage or input error. Data goes to the output stream, diagnostics to the
//! error stream.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::covariance::{
    covariance_matrix, test_entanglement, Certificate, NegativityReport, DEFAULT_TOL,
};
use crate::description::StateDescription;
use crate::error::{Error, Result};
use crate::oracle::{derive_seed, sample_separable};
use crate::reproduce::{reference_threshold, run_reproduction, Row, Status};
use crate::scanner::{scan_threshold, Detector};
use crate::tensors::{correlation_tensor, MultiIndex};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_DETECTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "symcov",
    version,
    about = "Covariance-matrix entanglement tests for symmetric multiqubit states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a state and print its Dicke-basis density matrix.
    State(StateArgs),
    /// Dump the order-l correlation tensor.
    Tensor(TensorArgs),
    /// Print the covariance blocks C^(2k) and A^(2k).
    Cov(CovArgs),
    /// Test for 2k-qubit entanglement via negativity of C^(2k).
    Test(TestArgs),
    /// Locate the inseparability threshold in the mixing parameter x.
    Scan(ScanArgs),
    /// Check that separable samples never produce a negative covariance block.
    ValidateTheorem(TheoremArgs),
    /// Recompute the reference values for GHZ and W states.
    Reproduce(ReproduceArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StateArgs {
    /// State description, inline JSON or a path to a JSON file.
    #[arg(long)]
    pub state: String,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct TensorArgs {
    #[arg(long)]
    pub state: String,
    #[arg(long)]
    pub l: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct CovArgs {
    #[arg(long)]
    pub state: String,
    #[arg(long)]
    pub k: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct TestArgs {
    #[arg(long)]
    pub state: String,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DetectorKind {
    #[value(name = "min_eig")]
    MinEig,
    Diag,
    Moment,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// A "noisy" description; its "x" (if any) is ignored.
    #[arg(long)]
    pub state: String,
    #[arg(long, value_enum, default_value_t = DetectorKind::MinEig)]
    pub detector: DetectorKind,
    #[arg(long)]
    pub k: usize,
    /// Multi-index such as "xy" for the diag and moment detectors.
    #[arg(long)]
    pub index: Option<String>,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct TheoremArgs {
    /// Qubit counts to cycle through, comma separated.
    #[arg(long = "n-qubits", value_delimiter = ',', default_value = "6")]
    pub n_qubits: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Number of coherent spin states in each separable mixture.
    #[arg(long, default_value_t = 4)]
    pub terms: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match dispatch(&cli.command, stderr) {
        Ok(outcome) => match emit(&outcome.body, outcome.output.as_ref(), stdout) {
            Ok(()) => outcome.code,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                EXIT_USAGE
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

struct Outcome {
    body: String,
    output: Option<PathBuf>,
    code: i32,
}

fn emit(body: &str, output: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, body)?,
        None => stdout.write_all(body.as_bytes())?,
    }
    Ok(())
}

/// Inline JSON when the argument looks like an object, otherwise a file path.
pub fn load_description(arg: &str) -> Result<StateDescription> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)?
    };
    Ok(serde_json::from_str(&text)?)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn dispatch(command: &Command, stderr: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::State(a) => cmd_state(a),
        Command::Tensor(a) => cmd_tensor(a),
        Command::Cov(a) => cmd_cov(a),
        Command::Test(a) => cmd_test(a),
        Command::Scan(a) => cmd_scan(a),
        Command::ValidateTheorem(a) => cmd_validate_theorem(a, stderr),
        Command::Reproduce(a) => cmd_reproduce(a, stderr),
    }
}

fn cmd_state(a: &StateArgs) -> Result<Outcome> {
    let rho = load_description(&a.state)?.build()?;
    let body = match a.out.format {
        Format::Json => to_json(&rho)?,
        Format::Csv => {
            let mut s = String::from("p,q,re,im\n");
            let m = rho.matrix();
            for p in 0..rho.dim() {
                for q in 0..rho.dim() {
                    let _ = writeln!(s, "{p},{q},{},{}", m[(p, q)].re, m[(p, q)].im);
                }
            }
            s
        }
    };
    Ok(Outcome {
        body,
        output: a.out.output.clone(),
        code: EXIT_OK,
    })
}

fn cmd_tensor(a: &TensorArgs) -> Result<Outcome> {
    let rho = load_description(&a.state)?.build()?;
    if a.l == 0 {
        return Err(Error::Domain("--l must be at least 1".into()));
    }
    let t = correlation_tensor(&rho, a.l)?;
    let body = match a.out.format {
        Format::Json => to_json(&t)?,
        Format::Csv => {
            let mut s = String::from("index,value\n");
            for (idx, v) in MultiIndex::all(a.l).zip(t.values()) {
                let _ = writeln!(s, "{idx},{v}");
            }
            s
        }
    };
    Ok(Outcome {
        body,
        output: a.out.output.clone(),
        code: EXIT_OK,
    })
}

fn cmd_cov(a: &CovArgs) -> Result<Outcome> {
    let rho = load_description(&a.state)?.build()?;
    let cm = covariance_matrix(&rho, a.k)?;
    let indices: Vec<String> = MultiIndex::all(a.k).map(|m| m.to_string()).collect();
    let rows = |m: &nalgebra::DMatrix<f64>| -> Vec<Vec<f64>> {
        m.row_iter().map(|r| r.iter().copied().collect()).collect()
    };
    let body = match a.out.format {
        Format::Json => to_json(&json!({
            "n_qubits": rho.n_qubits(),
            "k": a.k,
            "indices": indices,
            "c_block": rows(cm.c_block()),
            "a_block": rows(cm.a_block()),
            "min_eigenvalue": cm.min_eigenvalue(),
        }))?,
        Format::Csv => {
            let mut s = String::from("row,col,c,a\n");
            for (i, ri) in indices.iter().enumerate() {
                for (j, cj) in indices.iter().enumerate() {
                    let _ = writeln!(
                        s,
                        "{ri},{cj},{},{}",
                        cm.c_block()[(i, j)],
                        cm.a_block()[(i, j)]
                    );
                }
            }
            s
        }
    };
    Ok(Outcome {
        body,
        output: a.out.output.clone(),
        code: EXIT_OK,
    })
}

pub fn report_csv(r: &NegativityReport) -> String {
    let (kind, indices, value) = match &r.certificate {
        None => ("", String::new(), String::new()),
        Some(Certificate::Minor { indices, value }) => {
            ("minor", join_indices(indices), value.to_string())
        }
        Some(Certificate::Eigenvector { indices, value, .. }) => {
            ("eigenvector", join_indices(indices), value.to_string())
        }
    };
    format!(
        "n_qubits,k,min_eigenvalue,entangled,certificate_type,indices,value,tolerance\n{},{},{},{},{},{},{},{}\n",
        r.n_qubits, r.k, r.min_eigenvalue, r.entangled, kind, indices, value, r.tolerance
    )
}

fn join_indices(indices: &[MultiIndex]) -> String {
    indices
        .iter()
        .map(|m| m.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn cmd_test(a: &TestArgs) -> Result<Outcome> {
    let rho = load_description(&a.state)?.build()?;
    let report = test_entanglement(&rho, a.k, a.tol)?;
    let body = match a.out.format {
        Format::Json => to_json(&report)?,
        Format::Csv => report_csv(&report),
    };
    let code = if report.entangled {
        EXIT_OK
    } else {
        EXIT_NOT_DETECTED
    };
    Ok(Outcome {
        body,
        output: a.out.output.clone(),
        code,
    })
}

fn cmd_scan(a: &ScanArgs) -> Result<Outcome> {
    let desc = load_description(&a.state)?;
    if !desc.is_family() {
        return Err(Error::Domain(
            "scan needs a \"noisy\" state description".into(),
        ));
    }
    let index = |k: usize| -> Result<MultiIndex> {
        let text = a
            .index
            .as_deref()
            .ok_or_else(|| Error::Domain("--index is required for this detector".into()))?;
        let idx: MultiIndex = text.parse()?;
        if idx.rank() != k {
            return Err(Error::Domain(format!(
                "index {idx} has rank {}, --k is {k}",
                idx.rank()
            )));
        }
        Ok(idx)
    };
    let detector = match a.detector {
        DetectorKind::MinEig => Detector::MinEig { k: a.k },
        DetectorKind::Diag => Detector::Diag {
            k: a.k,
            index: index(a.k)?,
        },
        DetectorKind::Moment => Detector::Moment {
            k: a.k,
            index: index(a.k)?,
        },
    };
    if a.k == 0 || 2 * a.k > desc.n_qubits() {
        return Err(Error::Domain(format!(
            "--k {} needs 1 <= 2k <= {}",
            a.k,
            desc.n_qubits()
        )));
    }
    let family = desc.as_family();
    let result = scan_threshold(|x| family.build_at(Some(x)), &detector, a.tol, a.grid)?;
    let reference = reference_threshold(&family, &detector);
    let agrees = match (reference, result.threshold) {
        (Some((value, precision)), Some(t)) => precision.agrees(value, t),
        _ => false,
    };
    let body = match a.out.format {
        Format::Json => to_json(&json!({
            "family": family,
            "detector": detector,
            "threshold": result.threshold,
            "bracket": result.bracket.map(|(lo, hi)| [lo, hi]),
            "resolution": result.resolution,
            "non_monotone": result.non_monotone,
            "non_smooth": result.non_smooth,
            "paper_value": reference.map(|r| r.0),
            "agrees": agrees,
        }))?,
        Format::Csv => {
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            format!(
                "threshold,bracket_lo,bracket_hi,paper_value,agrees\n{},{},{},{},{}\n",
                opt(result.threshold),
                opt(result.bracket.map(|b| b.0)),
                opt(result.bracket.map(|b| b.1)),
                opt(reference.map(|r| r.0)),
                agrees
            )
        }
    };
    let code = if result.threshold.is_some() {
        EXIT_OK
    } else {
        EXIT_NOT_DETECTED
    };
    Ok(Outcome {
        body,
        output: a.out.output.clone(),
        code,
    })
}

/// Outcome of sampling separable states and testing every covariance block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremSummary {
    pub seed: u64,
    pub samples: usize,
    pub terms: usize,
    pub n_qubits: Vec<usize>,
    pub blocks_checked: usize,
    pub violations: usize,
    /// Smallest least-eigenvalue seen across all blocks.
    pub most_negative: f64,
    /// Largest |C_ij| seen; zero for single-term (product) samples.
    pub max_abs_entry: f64,
    pub tolerance: f64,
}

pub fn validate_theorem(
    n_qubits: &[usize],
    samples: usize,
    terms: usize,
    seed: u64,
    tol: f64,
) -> Result<TheoremSummary> {
    if samples == 0 {
        return Err(Error::Domain("--samples must be at least 1".into()));
    }
    if n_qubits.is_empty() || n_qubits.iter().any(|&n| n < 2) {
        return Err(Error::Domain("every qubit count must be at least 2".into()));
    }
    let mut summary = TheoremSummary {
        seed,
        samples,
        terms,
        n_qubits: n_qubits.to_vec(),
        blocks_checked: 0,
        violations: 0,
        most_negative: f64::INFINITY,
        max_abs_entry: 0.0,
        tolerance: tol,
    };
    for i in 0..samples {
        let n = n_qubits[i % n_qubits.len()];
        let (_, rho) = sample_separable(n, terms, derive_seed(seed, i as u64))?;
        for k in 1..=n / 2 {
            let cm = covariance_matrix(&rho, k)?;
            let low = cm.min_eigenvalue();
            summary.blocks_checked += 1;
            summary.most_negative = summary.most_negative.min(low);
            summary.max_abs_entry = summary.max_abs_entry.max(cm.c_block().amax());
            if low < -tol {
                summary.violations += 1;
            }
        }
    }
    Ok(summary)
}

fn cmd_validate_theorem(a: &TheoremArgs, stderr: &mut dyn Write) -> Result<Outcome> {
    let s = validate_theorem(&a.n_qubits, a.samples, a.terms, a.seed, a.tol)?;
    let _ = writeln!(
        stderr,
        "{} blocks checked, {} violations, most negative eigenvalue {:.3e}",
        s.blocks_checked, s.violations, s.most_negative
    );
    let body = match a.out.format {
        Format::Json => to_json(&s)?,
        Format::Csv => format!(
            "seed,samples,terms,blocks_checked,violations,most_negative,max_abs_entry,tolerance\n{},{},{},{},{},{},{},{}\n",
            s.seed, s.samples, s.terms, s.blocks_checked, s.violations, s.most_negative, s.max_abs_entry, s.tolerance
        ),
    };
    let code = if s.violations == 0 {
        EXIT_OK
    } else {
        EXIT_NOT_DETECTED
    };
    Ok(Outcome {
        body,
        output: a.out.output.clone(),
        code,
    })
}

pub fn rows_csv(rows: &[Row]) -> String {
    let mut s = String::from("quantity,paper_value,computed,abs_delta,precision,status,note\n");
    for r in rows {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.10}")).unwrap_or_default();
        let _ = writeln!(
            s,
            "\"{}\",{},{},{},{},{},\"{}\"",
            r.quantity,
            r.reference_value,
            opt(r.computed),
            opt(r.delta),
            r.precision,
            r.status,
            r.note.as_deref().unwrap_or("")
        );
    }
    s
}

fn cmd_reproduce(a: &ReproduceArgs, stderr: &mut dyn Write) -> Result<Outcome> {
    let rows = run_reproduction()?;
    let count = |st: Status| rows.iter().filter(|r| r.status == st).count();
    let (pass, known, fail) = (
        count(Status::Pass),
        count(Status::KnownDiscrepancy),
        count(Status::Fail),
    );
    let _ = writeln!(
        stderr,
        "{} rows: {pass} pass, {known} known discrepancies, {fail} unexpected failures",
        rows.len()
    );
    let body = match a.out.format {
        Format::Json => to_json(&rows)?,
        Format::Csv => rows_csv(&rows),
    };
    let code = if pass == rows.len() {
        EXIT_OK
    } else {
        EXIT_NOT_DETECTED
    };
    Ok(Outcome {
        body,
        output: a.out.output.clone(),
        code,
    })
}
