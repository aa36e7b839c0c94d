//! Reference values for GHZ/W covariance spectra and noisy-state thresholds,
//! recomputed and compared row by row.

use serde::Serialize;

use crate::covariance::covariance_matrix;
use crate::description::StateDescription;
use crate::error::Result;
use crate::scanner::{analytic_thresholds, ghz_witness_index, scan_threshold, Detector};
use crate::symstate::{ghz_state, noisy_mixture, w_state, SymmetricState};
use crate::tensors::{Axis, MultiIndex};

pub const SCAN_TOL: f64 = 1e-7;
pub const SCAN_GRID: usize = 64;

/// How a computed value is compared with its reference.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Precision {
    Absolute(f64),
    /// Equal after rounding the computed value to this many significant figures.
    SignificantFigures(u32),
}

impl Precision {
    pub fn agrees(self, reference: f64, computed: f64) -> bool {
        match self {
            Precision::Absolute(tol) => (reference - computed).abs() <= tol,
            Precision::SignificantFigures(digits) => {
                let rounded = round_significant(computed, digits);
                (rounded - reference).abs() <= 1e-12 * reference.abs().max(1.0)
            }
        }
    }
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Precision::Absolute(t) => write!(f, "abs {t:.0e}"),
            Precision::SignificantFigures(d) => write!(f, "{d} sig. fig."),
        }
    }
}

pub fn round_significant(v: f64, digits: u32) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let magnitude = v.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits as i32 - 1 - magnitude);
    (v * scale).round() / scale
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    /// The reference value is not reproduced and the mismatch is understood.
    KnownDiscrepancy,
    Fail,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::KnownDiscrepancy => "known-discrepancy",
            Status::Fail => "FAIL",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub quantity: String,
    #[serde(rename = "paper_value")]
    pub reference_value: f64,
    pub computed: Option<f64>,
    pub delta: Option<f64>,
    pub precision: Precision,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Row {
    fn new(
        quantity: String,
        reference_value: f64,
        computed: Option<f64>,
        precision: Precision,
        known: Option<&str>,
    ) -> Self {
        let ok = computed.is_some_and(|c| precision.agrees(reference_value, c));
        let status = match (ok, known) {
            (true, _) => Status::Pass,
            (false, Some(_)) => Status::KnownDiscrepancy,
            (false, None) => Status::Fail,
        };
        Row {
            quantity,
            reference_value,
            computed,
            delta: computed.map(|c| (c - reference_value).abs()),
            precision,
            status,
            note: if ok { None } else { known.map(str::to_string) },
        }
    }
}

/// Reference threshold for a noisy GHZ/W family under the least-eigenvalue
/// detector of the largest even partition, if one exists.
pub fn reference_threshold(
    family: &StateDescription,
    detector: &Detector,
) -> Option<(f64, Precision)> {
    let StateDescription::Noisy { base, .. } = family else {
        return None;
    };
    let n = base.n_qubits();
    let is_top = |k: usize| 2 * k == n;
    match (base.as_ref(), detector) {
        (StateDescription::Ghz { .. }, Detector::MinEig { k }) if is_top(*k) => match n {
            2 => Some((0.25, Precision::Absolute(1e-4))),
            4 => Some((0.0625, Precision::Absolute(1e-4))),
            6 => Some((0.014, Precision::SignificantFigures(2))),
            _ => None,
        },
        (StateDescription::W { .. }, Detector::MinEig { k }) if is_top(*k) => match n {
            2 => Some((0.25, Precision::Absolute(1e-4))),
            4 => Some((0.0899, Precision::Absolute(5e-4))),
            6 => Some((0.042, Precision::SignificantFigures(2))),
            _ => None,
        },
        (StateDescription::W { .. }, Detector::MinEig { k: 1 }) if n >= 4 && n % 2 == 0 => {
            analytic_thresholds(n)
                .ok()
                .map(|t| (t.w_pair, Precision::Absolute(1e-6)))
        }
        (
            StateDescription::Ghz { .. },
            Detector::Diag { k, index } | Detector::Moment { k, index },
        ) if is_top(*k) && *index == ghz_witness_index(*k) => analytic_thresholds(n)
            .ok()
            .map(|t| (t.ghz_diag, Precision::Absolute(1e-6))),
        (StateDescription::W { .. }, Detector::Moment { k, index })
            if is_top(*k) && *index == MultiIndex::uniform(Axis::Z, *k) =>
        {
            analytic_thresholds(n)
                .ok()
                .map(|t| (t.w_diag, Precision::Absolute(1e-6)))
        }
        _ => None,
    }
}

fn noisy(base: SymmetricState) -> impl Fn(f64) -> Result<SymmetricState> {
    move |x| noisy_mixture(&base, x)
}

const GHZ_ODD_NOTE: &str =
    "direct evaluation gives -1 for every even N; the -2 branch is not reproduced";
const W_LAMBDA_NOTE: &str =
    "formula -2k(k-1)/N^2 (zero at k=1) does not match the computed least eigenvalue, which is negative for every k";
const W_PAIR_NOTE: &str =
    "least eigenvalue of C^(2) (and the PPT test on the two-qubit marginal) crosses zero elsewhere; the closed form is reproduced only if the squared mean is taken linear in x";

/// Runs every comparison.
pub fn run_reproduction() -> Result<Vec<Row>> {
    let mut rows = Vec::new();

    for n in [2usize, 4, 6, 8] {
        let cm = covariance_matrix(&ghz_state(n)?, n / 2)?;
        let reference = -(2f64.powi(n as i32 / 2 - 1));
        rows.push(Row::new(
            format!("GHZ_{n} least eigenvalue of C^({n})"),
            reference,
            Some(cm.min_eigenvalue()),
            Precision::Absolute(1e-9),
            None,
        ));
        let index = ghz_witness_index(n / 2);
        let reference = if (n / 2) % 2 == 0 { -1.0 } else { -2.0 };
        rows.push(Row::new(
            format!("GHZ_{n} C^({n}) diagonal at {index}"),
            reference,
            Some(cm.diagonal(&index)?),
            Precision::Absolute(1e-9),
            ((n / 2) % 2 == 1).then_some(GHZ_ODD_NOTE),
        ));
    }

    for n in [4usize, 6, 8] {
        let rho = w_state(n)?;
        let index = MultiIndex::uniform(Axis::Z, n / 2);
        let cm = covariance_matrix(&rho, n / 2)?;
        rows.push(Row::new(
            format!("W_{n} C^({n}) diagonal at {index}"),
            -1.0,
            Some(cm.diagonal(&index)?),
            Precision::Absolute(1e-9),
            None,
        ));
        for k in 1..=n / 2 {
            let cm = covariance_matrix(&rho, k)?;
            let formula = -2.0 * (k * (k - 1)) as f64 / (n * n) as f64 + 0.0;
            rows.push(Row::new(
                format!("W_{n} least eigenvalue of C^({}) vs -2k(k-1)/N^2", 2 * k),
                formula,
                Some(cm.min_eigenvalue()),
                Precision::Absolute(1e-9),
                Some(W_LAMBDA_NOTE),
            ));
        }
    }

    for (name, build) in [
        ("GHZ", ghz_state as fn(usize) -> Result<SymmetricState>),
        ("W", w_state),
    ] {
        for n in [2usize, 4, 6] {
            let detector = Detector::MinEig { k: n / 2 };
            let family = StateDescription::Noisy {
                x: None,
                base: Box::new(if name == "GHZ" {
                    StateDescription::Ghz { n_qubits: n }
                } else {
                    StateDescription::W { n_qubits: n }
                }),
                n_qubits: None,
            };
            let (reference, precision) =
                reference_threshold(&family, &detector).expect("tabulated");
            let scan = scan_threshold(noisy(build(n)?), &detector, SCAN_TOL, SCAN_GRID)?;
            rows.push(Row::new(
                format!(
                    "noisy-{name} N={n} threshold (least eigenvalue, k={})",
                    n / 2
                ),
                reference,
                scan.threshold,
                precision,
                None,
            ));
        }
    }

    for n in [2usize, 4, 6, 8] {
        let t = analytic_thresholds(n)?;
        let d = Detector::Diag {
            k: n / 2,
            index: ghz_witness_index(n / 2),
        };
        let scan = scan_threshold(noisy(ghz_state(n)?), &d, SCAN_TOL, SCAN_GRID)?;
        rows.push(Row::new(
            format!("noisy-GHZ N={n} diagonal threshold vs 1/N^2"),
            t.ghz_diag,
            scan.threshold,
            Precision::Absolute(1e-6),
            None,
        ));
        let d = Detector::Moment {
            k: n / 2,
            index: MultiIndex::uniform(Axis::Z, n / 2),
        };
        let scan = scan_threshold(noisy(w_state(n)?), &d, SCAN_TOL, SCAN_GRID)?;
        rows.push(Row::new(
            format!("noisy-W N={n} moment T_zz..z threshold vs 1/(N+2)"),
            t.w_diag,
            scan.threshold,
            Precision::Absolute(1e-6),
            None,
        ));
    }

    for n in [4usize, 6, 8] {
        let t = analytic_thresholds(n)?;
        let scan = scan_threshold(
            noisy(w_state(n)?),
            &Detector::MinEig { k: 1 },
            SCAN_TOL,
            SCAN_GRID,
        )?;
        rows.push(Row::new(
            format!("noisy-W N={n} two-qubit threshold vs N^2/(N^2+12)"),
            t.w_pair,
            scan.threshold,
            Precision::Absolute(1e-6),
            Some(W_PAIR_NOTE),
        ));
    }

    Ok(rows)
}
