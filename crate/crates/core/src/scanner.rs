//! Inseparability thresholds of one-parameter families `x ↦ ρ(x)`.

use serde::{Deserialize, Serialize};

use crate::covariance::covariance_matrix;
use crate::error::{domain, Result};
use crate::symstate::SymmetricState;
use crate::tensors::{correlation_tensor, MultiIndex};

/// Values at or above this are treated as "not negative".
pub const NEGATIVITY_CUTOFF: f64 = 1e-12;

/// Scalar whose negativity signals entanglement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Detector {
    /// Least eigenvalue of `C^(2k)`.
    MinEig { k: usize },
    /// Diagonal entry `C^(2k)_{ii}`.
    Diag { k: usize, index: MultiIndex },
    /// Raw moment `T^(2k)_{ii}`. Since `C_ii = T_ii − (T^(k)_i)² ≤ T_ii`, a
    /// negative moment already forces a negative covariance entry.
    Moment { k: usize, index: MultiIndex },
}

impl Detector {
    pub fn k(&self) -> usize {
        match self {
            Detector::MinEig { k } | Detector::Diag { k, .. } | Detector::Moment { k, .. } => *k,
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            Detector::MinEig { .. } => Ok(()),
            Detector::Diag { k, index } | Detector::Moment { k, index } => {
                if index.rank() != *k {
                    domain(format!(
                        "index {index} has rank {}, detector k = {k}",
                        index.rank()
                    ))
                } else {
                    Ok(())
                }
            }
        }
    }
}

pub fn detector_value(rho: &SymmetricState, d: &Detector) -> Result<f64> {
    d.check()?;
    let k = d.k();
    if k == 0 || 2 * k > rho.n_qubits() {
        return domain(format!(
            "detector k = {k} needs 1 <= 2k <= {}",
            rho.n_qubits()
        ));
    }
    match d {
        Detector::MinEig { k } => Ok(covariance_matrix(rho, *k)?.min_eigenvalue()),
        Detector::Diag { k, index } => covariance_matrix(rho, *k)?.diagonal(index),
        Detector::Moment { k, index } => {
            let t = correlation_tensor(rho, 2 * k)?;
            Ok(t.get(&index.concat(index)))
        }
    }
}

fn is_negative(v: f64) -> bool {
    v < -NEGATIVITY_CUTOFF
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub detector: Detector,
    /// Estimated infimum of the detected-entangled set; `None` if no grid point is negative.
    pub threshold: Option<f64>,
    /// `(lo, hi)`: detector not negative at `lo`, negative at `hi`.
    pub bracket: Option<(f64, f64)>,
    pub resolution: f64,
    /// More than one sign change was seen on the grid.
    pub non_monotone: bool,
    /// Adjacent grid values jumped by more than the continuity bound.
    pub non_smooth: bool,
}

/// Uniform grid over `[0, 1]` followed by bisection of the first sign change.
///
/// `grid` is the number of intervals. When the grid looks non-smooth the
/// bracket is refined by 8-point sub-grids instead of plain bisection.
pub fn scan_threshold<F>(family: F, d: &Detector, tol: f64, grid: usize) -> Result<ScanResult>
where
    F: Fn(f64) -> Result<SymmetricState>,
{
    if tol.is_nan() || tol <= 0.0 {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    if grid < 8 {
        return domain(format!("grid must have at least 8 intervals, got {grid}"));
    }
    let eval = |x: f64| -> Result<f64> { detector_value(&family(x)?, d) };
    let xs: Vec<f64> = (0..=grid).map(|i| i as f64 / grid as f64).collect();
    let values: Vec<f64> = xs.iter().map(|&x| eval(x)).collect::<Result<_>>()?;

    let h = 1.0 / grid as f64;
    let mut slopes: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs() / h).collect();
    slopes.sort_by(f64::total_cmp);
    let typical = slopes[slopes.len() / 2];
    let non_smooth = typical > 0.0
        && values
            .windows(2)
            .any(|w| (w[1] - w[0]).abs() > 10.0 * h * typical);

    let sign_changes = values
        .windows(2)
        .filter(|w| is_negative(w[0]) != is_negative(w[1]))
        .count();
    let non_monotone = sign_changes > 1;

    let Some(first) = values.iter().position(|&v| is_negative(v)) else {
        return Ok(ScanResult {
            detector: d.clone(),
            threshold: None,
            bracket: None,
            resolution: h,
            non_monotone,
            non_smooth,
        });
    };
    if first == 0 {
        return Ok(ScanResult {
            detector: d.clone(),
            threshold: Some(0.0),
            bracket: None,
            resolution: 0.0,
            non_monotone,
            non_smooth,
        });
    }

    let (mut lo, mut hi) = (xs[first - 1], xs[first]);
    while hi - lo > tol {
        if non_smooth {
            let step = (hi - lo) / 8.0;
            let mut moved = false;
            for s in 1..8 {
                let x = lo + s as f64 * step;
                if is_negative(eval(x)?) {
                    hi = x;
                    lo = x - step;
                    moved = true;
                    break;
                }
            }
            if !moved {
                lo = hi - step;
            }
        } else {
            let mid = 0.5 * (lo + hi);
            if is_negative(eval(mid)?) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    // re-verify the bracket before emitting it
    let (v_lo, v_hi) = (eval(lo)?, eval(hi)?);
    if is_negative(v_lo) || !is_negative(v_hi) {
        return Err(crate::error::Error::Internal(format!(
            "bracket [{lo}, {hi}] lost its sign pattern ({v_lo}, {v_hi})"
        )));
    }
    Ok(ScanResult {
        detector: d.clone(),
        threshold: Some(0.5 * (lo + hi)),
        bracket: Some((lo, hi)),
        resolution: hi - lo,
        non_monotone,
        non_smooth,
    })
}

/// Closed-form threshold values for even `N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticThresholds {
    pub n_qubits: usize,
    /// Noisy GHZ, moment at `(x…xy, x…xy)`: `1/N²`.
    pub ghz_diag: f64,
    /// Noisy W, moment at `(z…z)`: `1/(N+2)`.
    pub w_diag: f64,
    /// Noisy W, two-qubit partition: `N²/(N²+12)`.
    pub w_pair: f64,
}

pub fn analytic_thresholds(n_qubits: usize) -> Result<AnalyticThresholds> {
    if n_qubits < 2 || !n_qubits.is_multiple_of(2) {
        return domain(format!("closed forms need even N >= 2, got {n_qubits}"));
    }
    let n = n_qubits as f64;
    Ok(AnalyticThresholds {
        n_qubits,
        ghz_diag: 1.0 / (n * n),
        w_diag: 1.0 / (n + 2.0),
        w_pair: n * n / (n * n + 12.0),
    })
}

/// The `x…xy` multi-index of rank `k` (all `x` except a final `y`).
pub fn ghz_witness_index(k: usize) -> MultiIndex {
    use crate::tensors::Axis;
    let mut axes = vec![Axis::X; k];
    if let Some(last) = axes.last_mut() {
        *last = Axis::Y;
    }
    MultiIndex::new(axes)
}
