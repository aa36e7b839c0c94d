//! Inter-group covariance blocks and the negativity test built on them.
//!
//! For two disjoint groups of `k` qubits the stacked observables
//! `(A_i, B_j)` (products of Pauli operators on each group) have a
//! `2·3^k`-dimensional symmetrized variance matrix `[[A, C], [Cᵀ, A]]`. The
//! off-diagonal block `C_ij = T^(2k)_{ij} − T^(k)_i T^(k)_j` is positive
//! semidefinite for every separable symmetric state, so any negative
//! direction of `C` certifies `2k`-qubit entanglement.

use itertools::Itertools;
use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::{
    inf_norm, kron_power, min_sym_eigenvalue, sym_eigen, symmetry_defect, CMatrix, RMatrix,
};
use crate::symstate::{reduced_state, SymmetricState};
use crate::tensors::{
    correlation_tensor, full_space_matrix, moment_column, moment_matrix, MultiIndex, PauliOperator,
};

/// Default relative negativity tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    k: usize,
    c_block: RMatrix,
    a_block: RMatrix,
}

impl CovarianceMatrix {
    pub fn from_blocks(k: usize, c_block: RMatrix, a_block: RMatrix) -> Result<Self> {
        let side = 3usize.pow(k as u32);
        if c_block.shape() != (side, side) || a_block.shape() != (side, side) {
            return domain(format!("blocks must be {side}x{side} for k = {k}"));
        }
        Ok(Self {
            k,
            c_block,
            a_block,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn c_block(&self) -> &RMatrix {
        &self.c_block
    }

    pub fn a_block(&self) -> &RMatrix {
        &self.a_block
    }

    pub fn side(&self) -> usize {
        self.c_block.nrows()
    }

    pub fn diagonal(&self, index: &MultiIndex) -> Result<f64> {
        if index.rank() != self.k {
            return domain(format!(
                "index {index} has rank {}, expected {}",
                index.rank(),
                self.k
            ));
        }
        let i = index.encode();
        Ok(self.c_block[(i, i)])
    }

    /// The full variance matrix `[[A, C], [Cᵀ, A]]`.
    pub fn full_variance(&self) -> RMatrix {
        let s = self.side();
        let mut v = RMatrix::zeros(2 * s, 2 * s);
        v.view_mut((0, 0), (s, s)).copy_from(&self.a_block);
        v.view_mut((0, s), (s, s)).copy_from(&self.c_block);
        v.view_mut((s, 0), (s, s))
            .copy_from(&self.c_block.transpose());
        v.view_mut((s, s), (s, s)).copy_from(&self.a_block);
        v
    }

    /// Applies the same rotation `R ∈ SO(3)` to every qubit: both blocks are
    /// conjugated by `R^{⊗k}`.
    pub fn rotate(&self, r: &Matrix3<f64>) -> Result<Self> {
        let orth = (r.transpose() * r - Matrix3::identity()).amax();
        let det = r.determinant();
        if orth > 1e-10 || (det - 1.0).abs() > 1e-10 {
            return domain(format!(
                "rotation must be orthogonal with det +1 (orthogonality defect {orth:.2e}, det {det})"
            ));
        }
        let r = RMatrix::from_column_slice(3, 3, r.as_slice());
        let big = kron_power(&r, self.k);
        Ok(Self {
            k: self.k,
            c_block: &big * &self.c_block * big.transpose(),
            a_block: &big * &self.a_block * big.transpose(),
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_sym_eigenvalue(&self.c_block)
    }

    /// Scans principal minors of `C` by increasing order and returns the
    /// first one below `-threshold`, re-evaluated independently before it is
    /// returned. `None` does not certify positivity.
    pub fn principal_minor_search(
        &self,
        max_order: usize,
        threshold: f64,
    ) -> Option<MinorCertificate> {
        let n = self.side();
        for order in 1..=max_order.min(n) {
            for subset in (0..n).combinations(order) {
                let sub = principal_submatrix(&self.c_block, &subset);
                let value = sub.determinant();
                if value < -threshold {
                    let check = laplace_determinant(&principal_submatrix(&self.c_block, &subset));
                    if check < -threshold && (check - value).abs() <= 1e-10 * value.abs().max(1.0) {
                        return Some(MinorCertificate {
                            indices: subset
                                .iter()
                                .map(|&i| MultiIndex::decode(i, self.k))
                                .collect(),
                            value: check,
                        });
                    }
                }
            }
        }
        None
    }
}

fn principal_submatrix(m: &RMatrix, subset: &[usize]) -> RMatrix {
    RMatrix::from_fn(subset.len(), subset.len(), |i, j| m[(subset[i], subset[j])])
}

/// Cofactor expansion along the first row; only meant for the small minors
/// returned as certificates.
pub fn laplace_determinant(m: &RMatrix) -> f64 {
    let n = m.nrows();
    match n {
        0 => 1.0,
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        _ => (0..n)
            .map(|c| {
                let minor = m.clone().remove_row(0).remove_column(c);
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[(0, c)] * laplace_determinant(&minor)
            })
            .sum(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinorCertificate {
    pub indices: Vec<MultiIndex>,
    pub value: f64,
}

/// Evidence attached to an entangled verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Certificate {
    /// A negative principal minor over the listed rows/columns.
    Minor {
        indices: Vec<MultiIndex>,
        value: f64,
    },
    /// A witness `X` (the eigenvector of the least eigenvalue, listed against
    /// `indices`) with `value = Xᵀ C X`.
    Eigenvector {
        indices: Vec<MultiIndex>,
        value: f64,
        vector: Vec<f64>,
    },
}

impl Certificate {
    pub fn value(&self) -> f64 {
        match self {
            Certificate::Minor { value, .. } | Certificate::Eigenvector { value, .. } => *value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegativityReport {
    pub n_qubits: usize,
    pub k: usize,
    pub min_eigenvalue: f64,
    pub entangled: bool,
    pub certificate: Option<Certificate>,
    /// Absolute cutoff actually applied: `tol · max(1, ‖C‖_∞)`.
    pub tolerance: f64,
}

/// Builds `C^(2k)` and the intra-group block `A^(2k)` for groups `1..k` and `k+1..2k`.
pub fn covariance_matrix(rho: &SymmetricState, k: usize) -> Result<CovarianceMatrix> {
    let n = rho.n_qubits();
    if k == 0 || 2 * k > n {
        return domain(format!("group size k = {k} needs 1 <= 2k <= {n}"));
    }
    let t_pair = moment_matrix(&correlation_tensor(rho, 2 * k)?)?;
    let t_single = moment_column(&correlation_tensor(rho, k)?);
    let means = &t_single * t_single.transpose();
    let c_block = t_pair - &means;

    // A_ij = ½⟨{A_i, A_j}⟩ − ⟨A_i⟩⟨A_j⟩ on the k-qubit marginal
    let rho_k = full_space_matrix(&reduced_state(rho, k)?);
    let ops: Vec<PauliOperator> = MultiIndex::all(k)
        .map(|i| PauliOperator::new(i.axes()))
        .collect();
    let rho_ops: Vec<CMatrix> = ops.iter().map(|p| p.right_multiply(&rho_k)).collect();
    let side = ops.len();
    let mut a_block = DMatrix::zeros(side, side);
    for i in 0..side {
        for j in i..side {
            let ij = ops[j].trace_with(&rho_ops[i]);
            let ji = ops[i].trace_with(&rho_ops[j]);
            let v = 0.5 * (ij + ji).re - means[(i, j)];
            a_block[(i, j)] = v;
            a_block[(j, i)] = v;
        }
    }
    debug_assert!(symmetry_defect(&c_block) < 1e-10);
    Ok(CovarianceMatrix {
        k,
        c_block,
        a_block,
    })
}

/// Decides `2k`-qubit entanglement from negativity of `C^(2k)`.
///
/// Cheap certificates (principal minors of order ≤ 2) are tried first; the
/// eigensolver then settles the verdict.
pub fn test_entanglement(rho: &SymmetricState, k: usize, tol: f64) -> Result<NegativityReport> {
    if tol.is_nan() || tol <= 0.0 {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    let cm = covariance_matrix(rho, k)?;
    Ok(assess(&cm, rho.n_qubits(), tol))
}

pub(crate) fn assess(cm: &CovarianceMatrix, n_qubits: usize, tol: f64) -> NegativityReport {
    let threshold = tol * inf_norm(&cm.c_block).max(1.0);
    let minor = cm.principal_minor_search(2, threshold);
    let (values, vectors) = sym_eigen(&cm.c_block);
    let min_eigenvalue = values[0];
    let entangled = min_eigenvalue < -threshold;
    let certificate = if !entangled {
        None
    } else if let Some(m) = minor {
        Some(Certificate::Minor {
            indices: m.indices,
            value: m.value,
        })
    } else {
        let x = vectors.column(0).into_owned();
        let value = (x.transpose() * &cm.c_block * &x)[(0, 0)];
        Some(Certificate::Eigenvector {
            indices: MultiIndex::all(cm.k).collect(),
            value,
            vector: x.as_slice().to_vec(),
        })
    };
    NegativityReport {
        n_qubits,
        k: cm.k,
        min_eigenvalue,
        entangled,
        certificate,
        tolerance: threshold,
    }
}
