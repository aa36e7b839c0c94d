//! Permutation-symmetric N-qubit density matrices in the Dicke basis.
//!
//! Row/column index `p` counts the number of `|1⟩` excitations, so `p = 0` is
//! `|0…0⟩` and `p = N` is `|1…1⟩`. In collective angular-momentum language the
//! basis vector `p` is `|N/2, M⟩` with `M = N/2 − p`. The projector onto the
//! symmetric subspace is the identity in this basis.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{binomial, hermiticity_defect, min_hermitian_eigenvalue, CMatrix};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const PURITY_TOL: f64 = 1e-10;

/// Density matrix restricted to the (N+1)-dimensional symmetric subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricState {
    n_qubits: usize,
    matrix: CMatrix,
}

impl SymmetricState {
    /// Builds a state from an explicit Dicke-basis matrix, rejecting anything
    /// that is not Hermitian, unit-trace and positive semidefinite.
    pub fn from_matrix(n_qubits: usize, matrix: CMatrix) -> Result<Self> {
        if n_qubits == 0 {
            return domain("n_qubits must be positive");
        }
        if matrix.nrows() != n_qubits + 1 || matrix.ncols() != n_qubits + 1 {
            return domain(format!(
                "expected a {0}x{0} Dicke matrix for {1} qubits, got {2}x{3}",
                n_qubits + 1,
                n_qubits,
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        let report = validate_matrix(&matrix);
        if !report.is_valid() {
            return Err(Error::Precondition(format!(
                "not a density matrix: {report}"
            )));
        }
        Ok(Self { n_qubits, matrix })
    }

    /// Wraps a matrix produced by a construction that preserves the invariants.
    pub(crate) fn from_parts(n_qubits: usize, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), n_qubits + 1);
        Self { n_qubits, matrix }
    }

    /// Normalized projector onto an (unnormalized) Dicke-basis amplitude vector.
    pub fn from_amplitudes(amplitudes: &[Complex64]) -> Result<Self> {
        if amplitudes.len() < 2 {
            return domain("need at least two amplitudes (one qubit)");
        }
        let v = DVector::from_column_slice(amplitudes);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return domain("amplitude vector has zero or non-finite norm");
        }
        let v = v.unscale(norm);
        Ok(Self::from_parts(amplitudes.len() - 1, &v * v.adjoint()))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.n_qubits + 1
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn validate(&self) -> ValidationReport {
        validate_matrix(&self.matrix)
    }

    /// The maximally mixed symmetric state `P_N / (N+1)`.
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return domain("n_qubits must be positive");
        }
        let d = n_qubits + 1;
        Ok(Self::from_parts(
            n_qubits,
            CMatrix::identity(d, d).unscale(d as f64),
        ))
    }
}

/// Diagnostic produced by [`validate_matrix`]; never an error by itself.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
    pub hermitian: bool,
    pub unit_trace: bool,
    pub positive_semidefinite: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.hermitian && self.unit_trace && self.positive_semidefinite
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "hermiticity defect {:.3e} ({}), trace defect {:.3e} ({}), min eigenvalue {:.3e} ({})",
            self.hermiticity_defect,
            ok(self.hermitian),
            self.trace_defect,
            ok(self.unit_trace),
            self.min_eigenvalue,
            ok(self.positive_semidefinite)
        )
    }
}

fn ok(flag: bool) -> &'static str {
    if flag {
        "ok"
    } else {
        "VIOLATED"
    }
}

/// Checks an arbitrary square complex matrix against the density-matrix invariants.
pub fn validate_matrix(m: &CMatrix) -> ValidationReport {
    if m.nrows() != m.ncols() || m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return ValidationReport {
            hermiticity_defect: f64::INFINITY,
            trace_defect: f64::INFINITY,
            min_eigenvalue: f64::NEG_INFINITY,
            hermitian: false,
            unit_trace: false,
            positive_semidefinite: false,
        };
    }
    let hermiticity_defect = hermiticity_defect(m);
    let tr = m.trace();
    let trace_defect = (tr - Complex64::new(1.0, 0.0)).norm();
    let min_eigenvalue = min_hermitian_eigenvalue(m);
    ValidationReport {
        hermiticity_defect,
        trace_defect,
        min_eigenvalue,
        hermitian: hermiticity_defect <= HERMITIAN_TOL,
        unit_trace: trace_defect <= TRACE_TOL,
        positive_semidefinite: min_eigenvalue >= -PSD_TOL,
    }
}

/// Point on the Bloch sphere, canonicalized to `theta ∈ [0, π]`, `phi ∈ [0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochDirection {
    theta: f64,
    phi: f64,
}

impl BlochDirection {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return domain("Bloch angles must be finite");
        }
        let mut theta = theta.rem_euclid(2.0 * PI);
        let mut phi = phi;
        if theta > PI {
            theta = 2.0 * PI - theta;
            phi += PI;
        }
        let mut phi = phi.rem_euclid(2.0 * PI);
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Unit Bloch vector `(sinθ cosφ, sinθ sinφ, cosθ)`.
    pub fn bloch_vector(&self) -> [f64; 3] {
        [
            self.theta.sin() * self.phi.cos(),
            self.theta.sin() * self.phi.sin(),
            self.theta.cos(),
        ]
    }
}

pub fn dicke_state(n_qubits: usize, p: usize) -> Result<SymmetricState> {
    if n_qubits == 0 {
        return domain("n_qubits must be positive");
    }
    if p > n_qubits {
        return domain(format!("excitation count {p} exceeds {n_qubits} qubits"));
    }
    let d = n_qubits + 1;
    let mut m = CMatrix::zeros(d, d);
    m[(p, p)] = Complex64::new(1.0, 0.0);
    Ok(SymmetricState::from_parts(n_qubits, m))
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz_state(n_qubits: usize) -> Result<SymmetricState> {
    if n_qubits < 2 {
        return domain("GHZ state needs at least 2 qubits");
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); n_qubits + 1];
    amps[0] = Complex64::new(1.0, 0.0);
    amps[n_qubits] = Complex64::new(1.0, 0.0);
    SymmetricState::from_amplitudes(&amps)
}

/// The W state is exactly the one-excitation Dicke state.
pub fn w_state(n_qubits: usize) -> Result<SymmetricState> {
    if n_qubits < 2 {
        return domain("W state needs at least 2 qubits");
    }
    dicke_state(n_qubits, 1)
}

/// Dicke-basis amplitudes of `(cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩)^{⊗N}`.
pub fn product_amplitudes(n_qubits: usize, dir: BlochDirection) -> Vec<Complex64> {
    let c = (dir.theta / 2.0).cos();
    let s = Complex64::from_polar((dir.theta / 2.0).sin(), dir.phi);
    (0..=n_qubits)
        .map(|p| s.powu(p as u32) * binomial(n_qubits, p).sqrt() * c.powi((n_qubits - p) as i32))
        .collect()
}

pub fn product_state(n_qubits: usize, dir: BlochDirection) -> Result<SymmetricState> {
    if n_qubits == 0 {
        return domain("n_qubits must be positive");
    }
    let v = DVector::from_vec(product_amplitudes(n_qubits, dir));
    Ok(SymmetricState::from_parts(n_qubits, &v * v.adjoint()))
}

/// `(1−x)/(N+1) · P_N + x |ψ⟩⟨ψ|`.
pub fn noisy_mixture(psi: &SymmetricState, x: f64) -> Result<SymmetricState> {
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("mixing parameter {x} outside [0, 1]"));
    }
    let purity = psi.purity();
    if purity < 1.0 - PURITY_TOL {
        return Err(Error::Precondition(format!(
            "noisy mixture needs a pure base state, purity is {purity}"
        )));
    }
    let d = psi.dim();
    let noise = CMatrix::identity(d, d).scale((1.0 - x) / d as f64);
    Ok(SymmetricState::from_parts(
        psi.n_qubits,
        noise + psi.matrix.scale(x),
    ))
}

/// Partial trace over `N − n_keep` qubits, done directly in the Dicke basis.
///
/// The Dicke vector `|D_N^p⟩` splits over an `(n_keep, N − n_keep)` cut as
/// `Σ_q √(C(n_keep,q) C(N−n_keep,p−q) / C(N,p)) |D_{n_keep}^q⟩|D_{N−n_keep}^{p−q}⟩`,
/// so tracing the second factor pairs entries that share its excitation count `r`.
pub fn reduced_state(rho: &SymmetricState, n_keep: usize) -> Result<SymmetricState> {
    let n = rho.n_qubits;
    if n_keep == 0 || n_keep > n {
        return domain(format!("cannot keep {n_keep} of {n} qubits"));
    }
    if n_keep == n {
        return Ok(rho.clone());
    }
    let traced = n - n_keep;
    let d = n_keep + 1;
    // amp[q][r]: coefficient of |D^q⟩|D^r⟩ in |D_N^{q+r}⟩
    let amp: Vec<Vec<f64>> = (0..=n_keep)
        .map(|q| {
            (0..=traced)
                .map(|r| (binomial(n_keep, q) * binomial(traced, r) / binomial(n, q + r)).sqrt())
                .collect()
        })
        .collect();
    let mut out = CMatrix::zeros(d, d);
    for q in 0..d {
        for qp in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for (r, (a, b)) in amp[q].iter().zip(&amp[qp]).enumerate() {
                acc += rho.matrix[(q + r, qp + r)] * (a * b);
            }
            out[(q, qp)] = acc;
        }
    }
    Ok(SymmetricState::from_parts(n_keep, out))
}

/// Closed form of the noisy W state after discarding `n_traced` of its `n_total` qubits:
/// `(1−x)/(N−n+1) P_{N−n} + x[(N−n)/N |W_{N−n}⟩⟨W_{N−n}| + n/N |0_{N−n}⟩⟨0_{N−n}|]`.
pub fn reduced_noisy_w(n_total: usize, n_traced: usize, x: f64) -> Result<SymmetricState> {
    if n_total < 2 || n_traced >= n_total {
        return domain(format!(
            "cannot discard {n_traced} qubits from a {n_total}-qubit W state"
        ));
    }
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("mixing parameter {x} outside [0, 1]"));
    }
    let m = n_total - n_traced;
    let d = m + 1;
    let mut out = CMatrix::identity(d, d).scale((1.0 - x) / d as f64);
    out[(1, 1)] += Complex64::from(x * m as f64 / n_total as f64);
    out[(0, 0)] += Complex64::from(x * n_traced as f64 / n_total as f64);
    Ok(SymmetricState::from_parts(m, out))
}

#[derive(Serialize, Deserialize)]
struct SerializedState {
    n_qubits: usize,
    dicke_matrix: Vec<[f64; 2]>,
}

impl Serialize for SymmetricState {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let z = self.matrix[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        SerializedState {
            n_qubits: self.n_qubits,
            dicke_matrix: entries,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymmetricState {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = SerializedState::deserialize(deserializer)?;
        let d = raw.n_qubits + 1;
        if raw.dicke_matrix.len() != d * d {
            return Err(D::Error::custom(format!(
                "dicke_matrix has {} entries, expected {}",
                raw.dicke_matrix.len(),
                d * d
            )));
        }
        let m = CMatrix::from_row_iterator(
            d,
            d,
            raw.dicke_matrix
                .iter()
                .map(|[re, im]| Complex64::new(*re, *im)),
        );
        SymmetricState::from_matrix(raw.n_qubits, m).map_err(D::Error::custom)
    }
}
