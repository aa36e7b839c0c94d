//! Pauli correlation moments `T^(l)` of symmetric states.
//!
//! Multi-indices are encoded base 3 with `x → 0`, `y → 1`, `z → 2` and the
//! leftmost axis most significant, so an order-2 tensor is laid out as
//! `xx, xy, xz, yx, …, zz`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{binomial, CMatrix};
use crate::symstate::{reduced_state, SymmetricState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn digit(self) -> usize {
        self as usize
    }

    pub fn from_digit(d: usize) -> Option<Axis> {
        Self::ALL.get(d).copied()
    }

    pub fn symbol(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Axis> {
        match c.to_ascii_lowercase() {
            'x' => Some(Axis::X),
            'y' => Some(Axis::Y),
            'z' => Some(Axis::Z),
            _ => None,
        }
    }

    pub fn pauli(self) -> Matrix2<Complex64> {
        pauli_matrix(Some(self))
    }
}

/// Single-qubit Pauli matrix; `None` is the identity `σ_0`.
pub fn pauli_matrix(axis: Option<Axis>) -> Matrix2<Complex64> {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match axis {
        None => Matrix2::new(l, o, o, l),
        Some(Axis::X) => Matrix2::new(o, l, l, o),
        Some(Axis::Y) => Matrix2::new(o, -i, i, o),
        Some(Axis::Z) => Matrix2::new(l, o, o, -l),
    }
}

/// Ordered tuple of Cartesian axes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<Axis>);

impl MultiIndex {
    pub fn new(axes: Vec<Axis>) -> Self {
        Self(axes)
    }

    pub fn uniform(axis: Axis, rank: usize) -> Self {
        Self(vec![axis; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.0
    }

    pub fn encode(&self) -> usize {
        self.0.iter().fold(0, |acc, a| acc * 3 + a.digit())
    }

    pub fn decode(mut code: usize, rank: usize) -> Self {
        let mut axes = vec![Axis::X; rank];
        for slot in axes.iter_mut().rev() {
            *slot = Axis::from_digit(code % 3).expect("digit below 3");
            code /= 3;
        }
        Self(axes)
    }

    /// Every multi-index of the given rank in encoding order.
    pub fn all(rank: usize) -> impl Iterator<Item = MultiIndex> {
        (0..3usize.pow(rank as u32)).map(move |c| MultiIndex::decode(c, rank))
    }

    pub fn concat(&self, other: &MultiIndex) -> MultiIndex {
        let mut axes = self.0.clone();
        axes.extend_from_slice(&other.0);
        MultiIndex(axes)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.0 {
            write!(f, "{}", a.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| {
                Axis::from_symbol(c)
                    .ok_or_else(|| Error::Domain(format!("'{c}' is not one of x, y, z")))
            })
            .collect::<Result<Vec<_>>>()
            .map(MultiIndex)
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Tensor product of single-qubit operators stored as a phased permutation:
/// column `b` has its only nonzero entry `phase[b]` in row `row[b]`.
///
/// Built by Kronecker-composing the 2×2 factors, leftmost qubit most significant.
#[derive(Clone, Debug)]
pub struct PauliOperator {
    row: Vec<usize>,
    phase: Vec<Complex64>,
}

impl PauliOperator {
    pub fn new(axes: &[Axis]) -> Self {
        let mut row = vec![0usize];
        let mut phase = vec![Complex64::new(1.0, 0.0)];
        for &axis in axes {
            let m = axis.pauli();
            let col_entry: [(usize, Complex64); 2] = [0, 1].map(|c| {
                let r = if m[(0, c)].norm() > 0.0 { 0 } else { 1 };
                (r, m[(r, c)])
            });
            let mut next_row = Vec::with_capacity(row.len() * 2);
            let mut next_phase = Vec::with_capacity(row.len() * 2);
            for (&r, &ph) in row.iter().zip(&phase) {
                for (sr, sv) in col_entry {
                    next_row.push(r * 2 + sr);
                    next_phase.push(ph * sv);
                }
            }
            row = next_row;
            phase = next_phase;
        }
        Self { row, phase }
    }

    pub fn dim(&self) -> usize {
        self.row.len()
    }

    /// `Tr[A · P]` for a dense square `A`.
    pub fn trace_with(&self, a: &CMatrix) -> Complex64 {
        (0..self.dim())
            .map(|b| a[(b, self.row[b])] * self.phase[b])
            .sum()
    }

    /// Dense `A · P`.
    pub fn right_multiply(&self, a: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(a.nrows(), self.dim());
        for b in 0..self.dim() {
            let ph = self.phase[b];
            out.set_column(b, &a.column(self.row[b]).map(|z| z * ph));
        }
        out
    }
}

/// Embeds a Dicke-basis density matrix into the `2^N` computational basis.
///
/// Each Dicke vector `p` becomes the uniform superposition of the `C(N, p)`
/// bit strings with `p` ones.
pub fn full_space_matrix(rho: &SymmetricState) -> CMatrix {
    let n = rho.n_qubits();
    let dim = 1usize << n;
    let weight: Vec<f64> = (0..=n).map(|p| 1.0 / binomial(n, p).sqrt()).collect();
    let pop: Vec<usize> = (0..dim).map(|b| b.count_ones() as usize).collect();
    let m = rho.matrix();
    CMatrix::from_fn(dim, dim, |i, j| {
        let (p, q) = (pop[i], pop[j]);
        m[(p, q)] * (weight[p] * weight[q])
    })
}

/// Order-`l` Pauli moments `T_{i_1…i_l} = ⟨σ_{1 i_1} … σ_{l i_l}⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTensor {
    order: usize,
    encoding: String,
    values: Vec<f64>,
}

impl CorrelationTensor {
    pub fn from_values(order: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != 3usize.pow(order as u32) {
            return domain(format!(
                "order-{order} tensor needs {} values, got {}",
                3usize.pow(order as u32),
                values.len()
            ));
        }
        Ok(Self {
            order,
            encoding: "base3-xyz".to_string(),
            values,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, index: &MultiIndex) -> f64 {
        assert_eq!(
            index.rank(),
            self.order,
            "multi-index rank must match tensor order"
        );
        self.values[index.encode()]
    }

    /// Largest change of any entry under an arbitrary permutation of its axes.
    pub fn permutation_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (code, &v) in self.values.iter().enumerate() {
            let mut axes = MultiIndex::decode(code, self.order).0;
            axes.sort();
            worst = worst.max((v - self.values[MultiIndex(axes).encode()]).abs());
        }
        worst
    }
}

pub fn correlation_tensor(rho: &SymmetricState, order: usize) -> Result<CorrelationTensor> {
    let n = rho.n_qubits();
    if order > n {
        return domain(format!("moment order {order} exceeds {n} qubits"));
    }
    if order == 0 {
        return CorrelationTensor::from_values(0, vec![1.0]);
    }
    let full = full_space_matrix(&reduced_state(rho, order)?);
    let values = MultiIndex::all(order)
        .map(|idx| PauliOperator::new(idx.axes()).trace_with(&full).re)
        .collect();
    CorrelationTensor::from_values(order, values)
}

/// The `3^k` column `T^(k)_i`.
pub fn moment_column(t: &CorrelationTensor) -> DVector<f64> {
    DVector::from_column_slice(&t.values)
}

/// The `3^k × 3^k` matrix `T^(2k)_{ij} = T_{i‖j}`.
pub fn moment_matrix(t: &CorrelationTensor) -> Result<DMatrix<f64>> {
    if !t.order.is_multiple_of(2) {
        return domain(format!("moment matrix needs even order, got {}", t.order));
    }
    let side = 3usize.pow((t.order / 2) as u32);
    // row-major layout of the base-3 code is exactly (i, j) with i the leading half
    Ok(DMatrix::from_row_slice(side, side, &t.values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symstate::{ghz_state, w_state};
    use approx::assert_abs_diff_eq;

    #[test]
    fn multi_index_encoding() {
        let idx: MultiIndex = "xyz".parse().unwrap();
        assert_eq!(idx.encode(), 3 + 2);
        assert_eq!(MultiIndex::decode(5, 3), idx);
        assert_eq!(idx.to_string(), "xyz");
        for r in 0..81 {
            assert_eq!(MultiIndex::decode(r, 4).encode(), r);
        }
        assert!("xq".parse::<MultiIndex>().is_err());
        let order: Vec<String> = MultiIndex::all(2).map(|m| m.to_string()).collect();
        assert_eq!(&order[..4], &["xx", "xy", "xz", "yx"]);
    }

    #[test]
    fn pauli_operator_matches_dense_kronecker() {
        for code in 0..27 {
            let idx = MultiIndex::decode(code, 3);
            let op = PauliOperator::new(idx.axes());
            let dense = idx
                .axes()
                .iter()
                .fold(CMatrix::identity(1, 1), |acc, a| acc.kronecker(&a.pauli()));
            for b in 0..8 {
                for r in 0..8 {
                    let want = dense[(r, b)];
                    let got = if op.row[b] == r {
                        op.phase[b]
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    assert!((want - got).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn w4_moments() {
        let w = w_state(4).unwrap();
        let t1 = correlation_tensor(&w, 1).unwrap();
        assert_abs_diff_eq!(t1.values()[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t1.values()[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t1.values()[2], 0.5, epsilon = 1e-14);

        let t2 = moment_matrix(&correlation_tensor(&w, 2).unwrap()).unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[0.5, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0]);
        assert!((t2 - want).amax() < 1e-14);
    }

    #[test]
    fn ghz_moments() {
        let t = correlation_tensor(&ghz_state(4).unwrap(), 4).unwrap();
        assert_abs_diff_eq!(t.get(&"xyxy".parse().unwrap()), -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.get(&"zzzz".parse().unwrap()), 1.0, epsilon = 1e-14);

        let m = moment_matrix(&correlation_tensor(&ghz_state(2).unwrap(), 2).unwrap()).unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!((m - want).amax() < 1e-14);
    }

    #[test]
    fn order_bounds() {
        let w = w_state(3).unwrap();
        assert!(correlation_tensor(&w, 4).is_err());
        assert_eq!(correlation_tensor(&w, 0).unwrap().values(), &[1.0]);
        assert!(moment_matrix(&correlation_tensor(&w, 3).unwrap()).is_err());
    }

    #[test]
    fn column_layout() {
        let t = CorrelationTensor::from_values(1, vec![0.1, 0.2, 0.3]).unwrap();
        assert_eq!(moment_column(&t).as_slice(), &[0.1, 0.2, 0.3]);
        let t2 = CorrelationTensor::from_values(2, (0..9).map(f64::from).collect()).unwrap();
        let m = moment_matrix(&t2).unwrap();
        assert_eq!(m[(0, 1)], 1.0);
        assert_eq!(m[(1, 0)], 3.0);
        assert!(CorrelationTensor::from_values(2, vec![0.0; 8]).is_err());
    }

    #[test]
    fn json_dump_shape() {
        let t = correlation_tensor(&w_state(2).unwrap(), 1).unwrap();
        let v: serde_json::Value = serde_json::to_value(&t).unwrap();
        assert_eq!(v["order"], 1);
        assert_eq!(v["encoding"], "base3-xyz");
        assert_eq!(v["values"].as_array().unwrap().len(), 3);
    }
}
