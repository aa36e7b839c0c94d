//! Brute-force ground truth in the full `2^N`-dimensional space.
//!
//! Nothing here shares a code path with the Dicke-basis pipeline: states are
//! embedded through explicit Dicke vectors, reductions are plain partial traces,
//! and expectation values contract the density matrix against tensor products
//! of explicit 2×2 matrices.

use nalgebra::{DVector, Matrix2, Matrix3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{domain, Error, Result};
use crate::linalg::{min_hermitian_eigenvalue, CMatrix, RMatrix};
use crate::symstate::{product_amplitudes, validate_matrix, BlochDirection, SymmetricState};
use crate::tensors::{pauli_matrix, Axis, MultiIndex};

pub const MAX_FULL_QUBITS: usize = 12;

/// Density matrix on the full computational basis; qubit 0 is the most significant bit.
#[derive(Clone, Debug)]
pub struct FullState {
    n_qubits: usize,
    matrix: CMatrix,
}

impl FullState {
    pub fn from_matrix(n_qubits: usize, matrix: CMatrix) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if matrix.shape() != (dim, dim) {
            return domain(format!("expected {dim}x{dim} matrix for {n_qubits} qubits"));
        }
        if !validate_matrix(&matrix).is_valid() {
            return domain("matrix is not a valid density matrix");
        }
        Ok(Self { n_qubits, matrix })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Traces out every qubit after the first `keep`.
    pub fn partial_trace_keep(&self, keep: usize) -> Result<FullState> {
        if keep == 0 || keep > self.n_qubits {
            return domain(format!("cannot keep {keep} of {} qubits", self.n_qubits));
        }
        let rest = 1usize << (self.n_qubits - keep);
        let d = 1usize << keep;
        let m = CMatrix::from_fn(d, d, |a, b| {
            (0..rest)
                .map(|j| self.matrix[(a * rest + j, b * rest + j)])
                .sum()
        });
        Ok(FullState {
            n_qubits: keep,
            matrix: m,
        })
    }

    /// Largest entrywise change when qubits `a` and `b` are exchanged.
    pub fn transposition_defect(&self, a: usize, b: usize) -> f64 {
        let n = self.n_qubits;
        let swap = |x: usize| {
            let (sa, sb) = (n - 1 - a, n - 1 - b);
            let (ba, bb) = ((x >> sa) & 1, (x >> sb) & 1);
            if ba == bb {
                x
            } else {
                x ^ (1 << sa) ^ (1 << sb)
            }
        };
        let dim = self.matrix.nrows();
        let mut worst = 0.0_f64;
        for i in 0..dim {
            for j in 0..dim {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(swap(i), swap(j))]).norm());
            }
        }
        worst
    }

    /// `U^{⊗N} ρ U^{†⊗N}`.
    pub fn conjugate_local(&self, u: &Matrix2<Complex64>) -> FullState {
        let u = CMatrix::from_column_slice(2, 2, u.as_slice());
        let mut w = CMatrix::identity(1, 1);
        for _ in 0..self.n_qubits {
            w = w.kronecker(&u);
        }
        FullState {
            n_qubits: self.n_qubits,
            matrix: &w * &self.matrix * w.adjoint(),
        }
    }

    /// Compresses a permutation-symmetric full-space state back to the Dicke basis.
    pub fn restrict_symmetric(&self) -> Result<SymmetricState> {
        let n = self.n_qubits;
        let basis: Vec<DVector<Complex64>> = (0..=n).map(|p| dicke_vector(n, p)).collect();
        let m = CMatrix::from_fn(n + 1, n + 1, |p, q| {
            (basis[p].adjoint() * &self.matrix * &basis[q])[(0, 0)]
        });
        SymmetricState::from_matrix(n, m)
    }
}

/// Normalized equal superposition of all `N`-bit strings with `p` ones.
pub fn dicke_vector(n: usize, p: usize) -> DVector<Complex64> {
    let dim = 1usize << n;
    let mut v = DVector::zeros(dim);
    let mut count = 0usize;
    for b in 0..dim {
        let ones = (0..n).filter(|q| b >> q & 1 == 1).count();
        if ones == p {
            v[b] = Complex64::new(1.0, 0.0);
            count += 1;
        }
    }
    v.unscale((count as f64).sqrt())
}

pub fn embed_full(rho: &SymmetricState) -> Result<FullState> {
    let n = rho.n_qubits();
    if n > MAX_FULL_QUBITS {
        return Err(Error::Resource(format!(
            "full-space embedding is capped at {MAX_FULL_QUBITS} qubits, got {n}"
        )));
    }
    let dim = 1usize << n;
    let mut basis = CMatrix::zeros(dim, n + 1);
    for p in 0..=n {
        basis.set_column(p, &dicke_vector(n, p));
    }
    Ok(FullState {
        n_qubits: n,
        matrix: &basis * rho.matrix() * basis.adjoint(),
    })
}

/// `Tr[ρ (o_1 ⊗ o_2 ⊗ … ⊗ o_N)]` for arbitrary single-qubit factors.
pub fn operator_expectation(fs: &FullState, ops: &[Matrix2<Complex64>]) -> Result<Complex64> {
    let n = fs.n_qubits;
    if ops.len() != n {
        return domain(format!(
            "need {n} single-qubit operators, got {}",
            ops.len()
        ));
    }
    let dim = 1usize << n;
    let mut total = Complex64::new(0.0, 0.0);
    let mut rows: Vec<(usize, Complex64)> = Vec::with_capacity(dim);
    let mut next: Vec<(usize, Complex64)> = Vec::with_capacity(dim);
    for col in 0..dim {
        // all rows r with O[r, col] ≠ 0, built qubit by qubit
        rows.clear();
        rows.push((0, Complex64::new(1.0, 0.0)));
        for (q, op) in ops.iter().enumerate() {
            let bit = (col >> (n - 1 - q)) & 1;
            next.clear();
            for &(r, amp) in &rows {
                for out in 0..2 {
                    let e = op[(out, bit)];
                    if e.norm() != 0.0 {
                        next.push((r * 2 + out, amp * e));
                    }
                }
            }
            std::mem::swap(&mut rows, &mut next);
        }
        for &(r, amp) in &rows {
            total += fs.matrix[(col, r)] * amp;
        }
    }
    Ok(total)
}

/// Parses an axis string over `0xyz`; `0` is the identity slot.
pub fn parse_slots(s: &str) -> Result<Vec<Option<Axis>>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(None),
            _ => Axis::from_symbol(c)
                .map(Some)
                .ok_or_else(|| Error::Domain(format!("'{c}' is not one of 0, x, y, z"))),
        })
        .collect()
}

/// `Re Tr[ρ σ_{a_1} ⊗ … ⊗ σ_{a_N}]`, with the imaginary part checked to vanish.
pub fn pauli_expectation(fs: &FullState, axes: &[Option<Axis>]) -> Result<f64> {
    let ops: Vec<Matrix2<Complex64>> = axes.iter().map(|&a| pauli_matrix(a)).collect();
    let z = operator_expectation(fs, &ops)?;
    if z.im.abs() > 1e-10 {
        return Err(Error::Internal(format!(
            "Pauli expectation has imaginary part {:.3e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// Order-`l` moments on the first `l` qubits, remaining slots set to identity.
pub fn brute_force_tensor(fs: &FullState, order: usize) -> Result<Vec<f64>> {
    if order > fs.n_qubits {
        return domain("order exceeds qubit count");
    }
    MultiIndex::all(order)
        .map(|idx| {
            let mut slots: Vec<Option<Axis>> = idx.axes().iter().copied().map(Some).collect();
            slots.resize(fs.n_qubits, None);
            pauli_expectation(fs, &slots)
        })
        .collect()
}

/// `(C, A)` from direct expectation values with group `a` on qubits `0..k`
/// and group `b` on qubits `k..2k`.
pub fn brute_force_covariance(fs: &FullState, k: usize) -> Result<(RMatrix, RMatrix)> {
    let n = fs.n_qubits;
    if k == 0 || 2 * k > n {
        return domain("need 1 <= 2k <= N");
    }
    let idx: Vec<MultiIndex> = MultiIndex::all(k).collect();
    let side = idx.len();
    let identity = pauli_matrix(None);
    let place = |group_a: Option<&MultiIndex>, group_b: Option<&MultiIndex>| {
        let mut ops = vec![identity; n];
        if let Some(i) = group_a {
            for (q, a) in i.axes().iter().enumerate() {
                ops[q] = a.pauli();
            }
        }
        if let Some(j) = group_b {
            for (q, a) in j.axes().iter().enumerate() {
                ops[k + q] = a.pauli();
            }
        }
        ops
    };
    let mean_a: Vec<f64> = idx
        .iter()
        .map(|i| operator_expectation(fs, &place(Some(i), None)).map(|z| z.re))
        .collect::<Result<_>>()?;
    let mean_b: Vec<f64> = idx
        .iter()
        .map(|j| operator_expectation(fs, &place(None, Some(j))).map(|z| z.re))
        .collect::<Result<_>>()?;
    let mut c = RMatrix::zeros(side, side);
    let mut a = RMatrix::zeros(side, side);
    for (r, i) in idx.iter().enumerate() {
        for (s, j) in idx.iter().enumerate() {
            let joint = operator_expectation(fs, &place(Some(i), Some(j)))?.re;
            c[(r, s)] = joint - mean_a[r] * mean_b[s];

            let mut ij = vec![identity; n];
            let mut ji = vec![identity; n];
            for q in 0..k {
                let (pi, pj) = (i.axes()[q].pauli(), j.axes()[q].pauli());
                ij[q] = pi * pj;
                ji[q] = pj * pi;
            }
            let anti = operator_expectation(fs, &ij)? + operator_expectation(fs, &ji)?;
            a[(r, s)] = 0.5 * anti.re - mean_a[r] * mean_a[s];
        }
    }
    Ok((c, a))
}

/// Minimum eigenvalue of the partial transpose (second qubit) of a two-qubit state.
pub fn ppt_min_eigenvalue(rho2: &FullState) -> Result<f64> {
    if rho2.n_qubits != 2 {
        return domain(format!(
            "PPT check needs a two-qubit state, got {} qubits",
            rho2.n_qubits
        ));
    }
    if !validate_matrix(&rho2.matrix).is_valid() {
        return domain("input is not a valid two-qubit density matrix");
    }
    let m = &rho2.matrix;
    let pt = CMatrix::from_fn(4, 4, |r, c| {
        let (a, b) = (r >> 1, r & 1);
        let (ap, bp) = (c >> 1, c & 1);
        m[(a * 2 + bp, ap * 2 + b)]
    });
    Ok(min_hermitian_eigenvalue(&pt))
}

/// Convex mixture of coherent spin states `Σ_w p_w |φ_w⟩⟨φ_w|^{⊗N}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableEnsemble {
    pub weights: Vec<f64>,
    pub directions: Vec<BlochDirection>,
}

impl SeparableEnsemble {
    pub fn state(&self, n_qubits: usize) -> SymmetricState {
        let d = n_qubits + 1;
        let mut m = CMatrix::zeros(d, d);
        for (&w, &dir) in self.weights.iter().zip(&self.directions) {
            let v = DVector::from_vec(product_amplitudes(n_qubits, dir));
            m += (&v * v.adjoint()).scale(w);
        }
        SymmetricState::from_parts(n_qubits, m)
    }
}

/// Per-sample seed derived from a master seed, independent of evaluation order.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.random()
}

/// Draws directions uniformly on the sphere and weights uniformly on the simplex.
pub fn sample_separable(
    n_qubits: usize,
    terms: usize,
    seed: u64,
) -> Result<(SeparableEnsemble, SymmetricState)> {
    if n_qubits < 2 {
        return domain("separable sampler needs N >= 2");
    }
    if terms == 0 {
        return domain("need at least one term");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut directions = Vec::with_capacity(terms);
    for _ in 0..terms {
        let cos_theta: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..2.0 * std::f64::consts::PI);
        directions.push(BlochDirection::new(cos_theta.acos(), phi)?);
    }
    let raw: Vec<f64> = (0..terms).map(|_| Exp1.sample(&mut rng)).collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / total).collect();
    let ensemble = SeparableEnsemble {
        weights,
        directions,
    };
    let state = ensemble.state(n_qubits);
    Ok((ensemble, state))
}

/// Random symmetric density matrix of the given rank (Ginibre construction).
pub fn random_symmetric_state<R: Rng>(n_qubits: usize, rank: usize, rng: &mut R) -> SymmetricState {
    let d = n_qubits + 1;
    let g = CMatrix::from_fn(d, rank.max(1), |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let mut m = m.unscale(tr);
    // exact Hermiticity after rounding
    m = (&m + m.adjoint()).scale(0.5);
    SymmetricState::from_parts(n_qubits, m)
}

/// Haar-random element of SU(2) from a uniform unit quaternion.
pub fn random_su2<R: Rng>(rng: &mut R) -> Matrix2<Complex64> {
    let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
    let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let [a, b, c, d] = q.map(|v| v / norm);
    Matrix2::new(
        Complex64::new(a, b),
        Complex64::new(c, d),
        Complex64::new(-c, d),
        Complex64::new(a, -b),
    )
}

/// The SO(3) image of `U`: `U† σ_a U = Σ_b R_ab σ_b`, so that the state
/// `U^{⊗N} ρ U^{†⊗N}` has correlation tensor `R^{⊗l} T`.
pub fn rotation_from_su2(u: &Matrix2<Complex64>) -> Matrix3<f64> {
    let axes = Axis::ALL;
    Matrix3::from_fn(|a, b| {
        let m = u.adjoint() * axes[a].pauli() * u * axes[b].pauli();
        0.5 * m.trace().re
    })
}
