//! Truncated Fock-space primitives.
//!
//! Every multi-mode object uses big-endian (row-major) indexing: the leftmost
//! mode is the slowest-varying index, so the joint index of occupations
//! `(n_0, …, n_{k-1})` with per-mode dimensions `(d_0, …, d_{k-1})` is
//! `((n_0·d_1 + n_1)·d_2 + …)`. Tensor products and the partial trace both
//! follow this ordering.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on state norms, density-matrix trace and Hermiticity.
pub const STATE_TOL: f64 = 1e-12;

/// Hard ceiling on the number of stored entries of a dense operator (1 GiB of `Complex64`).
pub const MAX_OPERATOR_ENTRIES: u128 = 1 << 26;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Maximum total Hilbert-space dimension accepted by tensor constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Capacity(pub usize);

impl Default for Capacity {
    fn default() -> Self {
        Capacity(1 << 20)
    }
}

impl Capacity {
    /// Returns the product of `dims` if it fits under the limit.
    pub fn check(self, dims: &[usize]) -> Result<usize> {
        let total = dims.iter().fold(1u128, |acc, &d| acc.saturating_mul(d as u128));
        if total > self.0 as u128 {
            return Err(Error::Capacity {
                what: "dimension",
                requested: total,
                limit: self.0 as u128,
            });
        }
        Ok(total as usize)
    }

    fn check_operator(self, dims: &[usize]) -> Result<usize> {
        let dim = self.check(dims)?;
        let entries = (dim as u128) * (dim as u128);
        if entries > MAX_OPERATOR_ENTRIES {
            return Err(Error::Capacity {
                what: "operator entries",
                requested: entries,
                limit: MAX_OPERATOR_ENTRIES,
            });
        }
        Ok(dim)
    }
}

/// Highest photon number kept for a mode; the basis is `|0⟩ … |dmax⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FockCutoff(usize);

impl FockCutoff {
    pub const fn new(dmax: usize) -> Self {
        FockCutoff(dmax)
    }

    pub const fn dmax(self) -> usize {
        self.0
    }

    /// Basis dimension, `dmax + 1`.
    pub const fn dim(self) -> usize {
        self.0 + 1
    }
}

/// Row-major dense complex matrix acting on a tensor product of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dims: Vec<usize>,
    dim: usize,
    entries: Vec<Complex64>,
}

impl DenseOperator {
    pub fn zeros(dims: &[usize]) -> Result<Self> {
        let dim = Capacity::default().check_operator(dims)?;
        Ok(DenseOperator {
            dims: dims.to_vec(),
            dim,
            entries: vec![ZERO; dim * dim],
        })
    }

    pub fn identity(dims: &[usize]) -> Result<Self> {
        let mut op = Self::zeros(dims)?;
        for i in 0..op.dim {
            op.entries[i * op.dim + i] = ONE;
        }
        Ok(op)
    }

    /// Wraps row-major `entries`; their length must be `(∏dims)²`.
    pub fn from_entries(dims: &[usize], entries: Vec<Complex64>) -> Result<Self> {
        let dim = Capacity::default().check_operator(dims)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(DenseOperator {
            dims: dims.to_vec(),
            dim,
            entries,
        })
    }

    fn single_mode(cutoff: FockCutoff, mut fill: impl FnMut(&mut [Complex64], usize)) -> Self {
        let dim = cutoff.dim();
        let mut entries = vec![ZERO; dim * dim];
        fill(&mut entries, dim);
        DenseOperator {
            dims: vec![dim],
            dim,
            entries,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![ZERO; n * n];
        for r in 0..n {
            for c in 0..n {
                entries[c * n + r] = self.entries[r * n + c].conj();
            }
        }
        DenseOperator {
            dims: self.dims.clone(),
            dim: n,
            entries,
        }
    }

    /// Matrix product `self · rhs`. Zero entries of `self` are skipped, so products of
    /// ladder operators cost `O(dim²)` rather than `O(dim³)`.
    pub fn matmul(&self, rhs: &DenseOperator) -> Result<DenseOperator> {
        self.check_same_dim(rhs.dim)?;
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for (lhs_row, out_row) in self.entries.chunks_exact(n).zip(out.chunks_exact_mut(n)) {
            for (k, &a) in lhs_row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.entries[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(DenseOperator {
            dims: self.dims.clone(),
            dim: n,
            entries: out,
        })
    }

    /// Matrix-vector product.
    pub fn apply(&self, vector: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_same_dim(vector.len())?;
        Ok(self
            .entries
            .chunks_exact(self.dim)
            .map(|row| {
                row.iter()
                    .zip(vector)
                    .filter(|(a, _)| **a != ZERO)
                    .map(|(a, v)| a * v)
                    .sum()
            })
            .collect())
    }

    /// `self += alpha · other`.
    pub fn add_scaled(&mut self, alpha: Complex64, other: &DenseOperator) -> Result<()> {
        self.check_same_dim(other.dim)?;
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += alpha * b;
        }
        Ok(())
    }

    /// Kronecker product `self ⊗ rhs` (`self` is the slow index).
    pub fn kron(&self, rhs: &DenseOperator, capacity: Capacity) -> Result<DenseOperator> {
        let dims: Vec<usize> = self.dims.iter().chain(&rhs.dims).copied().collect();
        let dim = capacity.check_operator(&dims)?;
        let (n, m) = (self.dim, rhs.dim);
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..n {
            for j in 0..n {
                let a = self.entries[i * n + j];
                if a == ZERO {
                    continue;
                }
                for k in 0..m {
                    let row = (i * m + k) * dim + j * m;
                    let src = &rhs.entries[k * m..(k + 1) * m];
                    for (dst, &b) in entries[row..row + m].iter_mut().zip(src) {
                        *dst = a * b;
                    }
                }
            }
        }
        Ok(DenseOperator { dims, dim, entries })
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim;
        (0..n).all(|r| (r..n).all(|c| (self.entries[r * n + c] - self.entries[c * n + r].conj()).norm() <= tol))
    }

    /// Largest entry-wise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> Result<f64> {
        self.check_same_dim(other.dim)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    fn check_same_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }
}

/// `a†` truncated at `dmax`: `⟨n+1|a†|n⟩ = √(n+1)`; the top level maps to zero.
pub fn creation_matrix(cutoff: FockCutoff) -> DenseOperator {
    DenseOperator::single_mode(cutoff, |m, dim| {
        for n in 0..cutoff.dmax() {
            m[(n + 1) * dim + n] = Complex64::new(((n + 1) as f64).sqrt(), 0.0);
        }
    })
}

/// `a` truncated at `dmax`, the exact adjoint of [`creation_matrix`].
pub fn annihilation_matrix(cutoff: FockCutoff) -> DenseOperator {
    DenseOperator::single_mode(cutoff, |m, dim| {
        for n in 0..cutoff.dmax() {
            m[n * dim + n + 1] = Complex64::new(((n + 1) as f64).sqrt(), 0.0);
        }
    })
}

/// `a†a = diag(0, 1, …, dmax)`.
pub fn number_matrix(cutoff: FockCutoff) -> DenseOperator {
    DenseOperator::single_mode(cutoff, |m, dim| {
        for n in 0..dim {
            m[n * dim + n] = Complex64::new(n as f64, 0.0);
        }
    })
}

/// Normalized amplitude vector over a tensor product of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

impl DenseState {
    /// Accepts `amplitudes` only if their norm is 1 within [`STATE_TOL`].
    pub fn new(dims: &[usize], amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = Capacity::default().check(dims)?;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amplitudes.len(),
            });
        }
        let norm_sqr: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sqr.sqrt() - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(DenseState {
            dims: dims.to_vec(),
            amplitudes,
        })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(dims: &[usize], mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "cannot normalize a vector of norm {norm}"
            )));
        }
        for c in &mut amplitudes {
            *c /= norm;
        }
        Self::new(dims, amplitudes)
    }

    /// Single-mode number state `|n⟩`.
    pub fn fock(cutoff: FockCutoff, n: usize) -> Result<Self> {
        Self::basis(&[cutoff.dim()], &[n])
    }

    /// Joint number state with the given per-mode occupations.
    pub fn basis(dims: &[usize], occupations: &[usize]) -> Result<Self> {
        let dim = Capacity::default().check(dims)?;
        let index = joint_index(dims, occupations)?;
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Self::new(dims, amplitudes)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Big-endian joint index of per-mode occupations.
pub fn joint_index(dims: &[usize], occupations: &[usize]) -> Result<usize> {
    if dims.len() != occupations.len() {
        return Err(Error::DimensionMismatch {
            expected: dims.len(),
            found: occupations.len(),
        });
    }
    let mut index = 0;
    for (mode, (&d, &n)) in dims.iter().zip(occupations).enumerate() {
        if n >= d {
            return Err(Error::Occupation {
                mode,
                occupation: n as u64,
                required: n as u64,
                dmax: d.saturating_sub(1),
            });
        }
        index = index * d + n;
    }
    Ok(index)
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let rho = DensityMatrix { dim, entries };
        rho.validate()?;
        Ok(rho)
    }

    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        let dim = probs.len();
        let mut entries = vec![ZERO; dim * dim];
        for (i, &p) in probs.iter().enumerate() {
            entries[i * dim + i] = Complex64::new(p, 0.0);
        }
        Self::new(dim, entries)
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim;
        for r in 0..n {
            for c in r..n {
                let gap = (self.entries[r * n + c] - self.entries[c * n + r].conj()).norm();
                if gap > STATE_TOL {
                    return Err(Error::Invariant(format!(
                        "density matrix not Hermitian at ({r},{c}): {gap:e}"
                    )));
                }
            }
        }
        let trace = self.trace();
        if (trace - 1.0).abs() > STATE_TOL {
            return Err(Error::Invariant(format!("density matrix trace {trace} != 1")));
        }
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::Invariant(format!("density matrix has eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i].re).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.entries[i * self.dim + i].re).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim;
        self.entries
            .iter()
            .enumerate()
            .all(|(k, c)| k / n == k % n || *c == ZERO)
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values = if self.is_diagonal() {
            self.diagonal()
        } else {
            let m = DMatrix::from_row_slice(self.dim, self.dim, &self.entries);
            m.symmetric_eigenvalues().iter().copied().collect()
        };
        values.sort_by(f64::total_cmp);
        values
    }

    /// `−Tr ρ ln ρ` (natural log), ignoring eigenvalues at or below zero.
    pub fn von_neumann_entropy(&self) -> f64 {
        shannon_entropy(&self.eigenvalues())
    }
}

pub(crate) fn shannon_entropy(weights: &[f64]) -> f64 {
    weights.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
}

/// Something an operator expectation can be taken on.
pub trait Expectation {
    fn expectation_of(&self, op: &DenseOperator) -> Result<Complex64>;
}

impl Expectation for DenseState {
    /// `⟨ψ|O|ψ⟩`.
    fn expectation_of(&self, op: &DenseOperator) -> Result<Complex64> {
        let applied = op.apply(&self.amplitudes)?;
        Ok(self.amplitudes.iter().zip(&applied).map(|(a, b)| a.conj() * b).sum())
    }
}

impl Expectation for DensityMatrix {
    /// `Tr(ρ O)`.
    fn expectation_of(&self, op: &DenseOperator) -> Result<Complex64> {
        if op.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: op.dim(),
                found: self.dim,
            });
        }
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                let rho = self.entries[i * n + j];
                if rho != ZERO {
                    acc += rho * op.entries[j * n + i];
                }
            }
        }
        Ok(acc)
    }
}

/// `⟨Ô⟩` on a pure or mixed state.
pub fn expectation<S: Expectation + ?Sized>(op: &DenseOperator, state: &S) -> Result<Complex64> {
    state.expectation_of(op)
}

/// Kronecker product of states in the given mode order.
pub fn tensor_states(factors: &[&DenseState], capacity: Capacity) -> Result<DenseState> {
    let (first, rest) = factors.split_first().ok_or(Error::Empty("tensor factor list"))?;
    let mut dims = first.dims.clone();
    let mut amplitudes = first.amplitudes.clone();
    for factor in rest {
        dims.extend_from_slice(&factor.dims);
        capacity.check(&dims)?;
        amplitudes = amplitudes
            .iter()
            .flat_map(|a| factor.amplitudes.iter().map(move |b| a * b))
            .collect();
    }
    capacity.check(&dims)?;
    DenseState::new(&dims, amplitudes)
}

/// Kronecker product of operators in the given mode order.
pub fn tensor_operators(factors: &[&DenseOperator], capacity: Capacity) -> Result<DenseOperator> {
    let (first, rest) = factors.split_first().ok_or(Error::Empty("tensor factor list"))?;
    let mut acc = (*first).clone();
    capacity.check_operator(&acc.dims)?;
    for factor in rest {
        acc = acc.kron(factor, capacity)?;
    }
    Ok(acc)
}

/// Places a single-mode operator at `mode` inside the tensor product described by `dims`.
pub fn embed(op: &DenseOperator, mode: usize, dims: &[usize], capacity: Capacity) -> Result<DenseOperator> {
    let target = *dims.get(mode).ok_or(Error::ModeIndex {
        index: mode,
        len: dims.len(),
    })?;
    if op.dim() != target {
        return Err(Error::DimensionMismatch {
            expected: target,
            found: op.dim(),
        });
    }
    capacity.check_operator(dims)?;
    let outer: usize = dims[..mode].iter().product();
    let inner: usize = dims[mode + 1..].iter().product();
    let mut factors = Vec::with_capacity(3);
    let left = DenseOperator::identity(&[outer])?;
    let right = DenseOperator::identity(&[inner])?;
    if outer > 1 {
        factors.push(&left);
    }
    factors.push(op);
    if inner > 1 {
        factors.push(&right);
    }
    let mut out = tensor_operators(&factors, capacity)?;
    out.dims = dims.to_vec();
    Ok(out)
}

/// Reduced density matrix of mode `keep`, tracing out every other mode.
pub fn partial_trace(state: &DenseState, keep: usize) -> Result<DensityMatrix> {
    let dims = state.dims();
    if dims.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "partial trace needs at least 2 modes, state has {}",
            dims.len()
        )));
    }
    if keep >= dims.len() {
        return Err(Error::ModeIndex {
            index: keep,
            len: dims.len(),
        });
    }
    let d = dims[keep];
    let outer: usize = dims[..keep].iter().product();
    let inner: usize = dims[keep + 1..].iter().product();
    let psi = state.amplitudes();
    let mut entries = vec![ZERO; d * d];
    for o in 0..outer {
        for i in 0..d {
            let row_base = (o * d + i) * inner;
            for j in 0..d {
                let col_base = (o * d + j) * inner;
                let acc: Complex64 = (0..inner).map(|k| psi[row_base + k] * psi[col_base + k].conj()).sum();
                entries[i * d + j] += acc;
            }
        }
    }
    DensityMatrix::new(d, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn creation_matrix_entries() {
        let a_dag = creation_matrix(FockCutoff::new(1));
        assert_eq!(a_dag.dim(), 2);
        let nonzero: Vec<_> = (0..2)
            .flat_map(|r| (0..2).map(move |c| (r, c)))
            .filter(|&(r, c)| a_dag.get(r, c) != ZERO)
            .collect();
        assert_eq!(nonzero, vec![(1, 0)]);
        assert_eq!(a_dag.get(1, 0), ONE);

        let a_dag = creation_matrix(FockCutoff::new(2));
        assert_eq!(a_dag.get(1, 0), c(1.0));
        assert_eq!(a_dag.get(2, 1), c(2f64.sqrt()));
        assert_eq!(a_dag.entries().iter().filter(|z| **z != ZERO).count(), 2);
    }

    #[test]
    fn annihilation_is_exact_adjoint() {
        for dmax in 0..8 {
            let cutoff = FockCutoff::new(dmax);
            assert_eq!(annihilation_matrix(cutoff), creation_matrix(cutoff).adjoint());
        }
    }

    #[test]
    fn number_matrix_is_diagonal_and_product_of_ladders() {
        let cutoff = FockCutoff::new(3);
        let n = number_matrix(cutoff);
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { c(i as f64) } else { ZERO };
                assert_eq!(n.get(i, j), expected);
            }
        }
        let product = creation_matrix(cutoff).matmul(&annihilation_matrix(cutoff)).unwrap();
        assert!(product.max_abs_diff(&n).unwrap() < 1e-15);
    }

    #[test]
    fn number_eigenstate_has_zero_variance() {
        let cutoff = FockCutoff::new(4);
        let n = number_matrix(cutoff);
        let n2 = n.matmul(&n).unwrap();
        let two = DenseState::fock(cutoff, 2).unwrap();
        let mean = expectation(&n, &two).unwrap().re;
        let second = expectation(&n2, &two).unwrap().re;
        assert_eq!(mean, 2.0);
        assert_eq!(second, 4.0);
        assert_eq!(second - mean * mean, 0.0);
    }

    #[test]
    fn commutator_is_identity_below_top_level() {
        for dmax in 1..10 {
            let cutoff = FockCutoff::new(dmax);
            let a = annihilation_matrix(cutoff);
            let ad = creation_matrix(cutoff);
            let mut comm = a.matmul(&ad).unwrap();
            comm.add_scaled(c(-1.0), &ad.matmul(&a).unwrap()).unwrap();
            for i in 0..=dmax {
                for j in 0..=dmax {
                    let v = comm.get(i, j);
                    if i < dmax && j < dmax {
                        let want = if i == j { ONE } else { ZERO };
                        assert!((v - want).norm() < 1e-14, "dmax={dmax} ({i},{j})");
                    } else if i != j {
                        assert_eq!(v, ZERO);
                    }
                }
            }
            // the single deviating entry
            assert!((comm.get(dmax, dmax) - c(-(dmax as f64))).norm() < 1e-14);
        }
    }

    #[test]
    fn tensor_of_fock_states_is_joint_basis_vector() {
        let cutoff = FockCutoff::new(2);
        let one = DenseState::fock(cutoff, 1).unwrap();
        let vac = DenseState::fock(cutoff, 0).unwrap();
        let joint = tensor_states(&[&one, &vac], Capacity::default()).unwrap();
        assert_eq!(joint.dims(), &[3, 3]);
        let idx = joint_index(&[3, 3], &[1, 0]).unwrap();
        assert_eq!(idx, 3);
        assert_eq!(joint.amplitudes()[idx], ONE);
        assert_eq!(joint.amplitudes().iter().filter(|z| **z != ZERO).count(), 1);

        let n_a = tensor_operators(
            &[&number_matrix(cutoff), &DenseOperator::identity(&[3]).unwrap()],
            Capacity::default(),
        )
        .unwrap();
        assert_eq!(n_a.dim(), 9);
        assert_eq!(expectation(&n_a, &joint).unwrap(), ONE);
    }

    #[test]
    fn tensor_respects_capacity() {
        let op = number_matrix(FockCutoff::new(2));
        let err = tensor_operators(&[&op, &op], Capacity(8)).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
        let s = DenseState::fock(FockCutoff::new(1), 0).unwrap();
        let factors = vec![&s; 21];
        let err = tensor_states(&factors, Capacity::default()).unwrap_err();
        assert!(matches!(err, Error::Capacity { requested, .. } if requested == 1 << 21));
        assert!(tensor_states(&factors[..20], Capacity::default()).is_ok());
    }

    #[test]
    fn embed_matches_explicit_kron() {
        let cutoff = FockCutoff::new(2);
        let a = annihilation_matrix(cutoff);
        let id = DenseOperator::identity(&[3]).unwrap();
        let explicit = tensor_operators(&[&id, &a, &id], Capacity::default()).unwrap();
        let embedded = embed(&a, 1, &[3, 3, 3], Capacity::default()).unwrap();
        assert_eq!(embedded.dims(), &[3, 3, 3]);
        assert_eq!(embedded.max_abs_diff(&explicit).unwrap(), 0.0);
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let n = number_matrix(FockCutoff::new(2));
        let s = DenseState::fock(FockCutoff::new(3), 0).unwrap();
        assert!(matches!(expectation(&n, &s), Err(Error::DimensionMismatch { .. })));
        assert_eq!(expectation(&number_matrix(FockCutoff::new(3)), &s).unwrap(), ZERO);
    }

    #[test]
    fn partial_trace_of_product_state_is_pure() {
        let cutoff = FockCutoff::new(2);
        let one = DenseState::fock(cutoff, 1).unwrap();
        let vac = DenseState::fock(cutoff, 0).unwrap();
        let joint = tensor_states(&[&one, &vac], Capacity::default()).unwrap();
        let rho = partial_trace(&joint, 0).unwrap();
        assert_eq!(rho.diagonal(), vec![0.0, 1.0, 0.0]);
        assert!(rho.is_diagonal());
        assert!(rho.von_neumann_entropy().abs() < 1e-15);
    }

    #[test]
    fn partial_trace_of_symmetric_superposition() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let state = DenseState::new(&[2, 2], vec![ZERO, c(h), c(h), ZERO]).unwrap();
        for keep in 0..2 {
            let rho = partial_trace(&state, keep).unwrap();
            assert!((rho.get(0, 0).re - 0.5).abs() < 1e-15);
            assert!((rho.get(1, 1).re - 0.5).abs() < 1e-15);
            assert_eq!(rho.get(0, 1), ZERO);
            assert!((rho.von_neumann_entropy() - 2f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_errors() {
        let s = DenseState::fock(FockCutoff::new(1), 0).unwrap();
        assert!(matches!(partial_trace(&s, 0), Err(Error::InvalidParameter(_))));
        let joint = tensor_states(&[&s, &s], Capacity::default()).unwrap();
        assert!(matches!(
            partial_trace(&joint, 2),
            Err(Error::ModeIndex { index: 2, len: 2 })
        ));
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::from_diagonal(&[0.5, 0.5]).is_ok());
        assert!(DensityMatrix::from_diagonal(&[0.5, 0.4]).is_err());
        assert!(DensityMatrix::from_diagonal(&[1.5, -0.5]).is_err());
        let not_hermitian = vec![c(0.5), c(0.1), c(0.0), c(0.5)];
        assert!(DensityMatrix::new(2, not_hermitian).is_err());
        // trace one and Hermitian but indefinite
        let indefinite = vec![c(0.5), c(0.9), c(0.9), c(0.5)];
        assert!(DensityMatrix::new(2, indefinite).is_err());
        let coherent = vec![c(0.5), c(0.5), c(0.5), c(0.5)];
        let rho = DensityMatrix::new(2, coherent).unwrap();
        let ev = rho.eigenvalues();
        assert!(ev[0].abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn state_norm_is_enforced() {
        assert!(matches!(
            DenseState::new(&[2], vec![c(1.0), c(1.0)]),
            Err(Error::NotNormalized(_))
        ));
        let s = DenseState::normalized(&[2], vec![c(1.0), c(1.0)]).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert!(DenseState::normalized(&[2], vec![ZERO, ZERO]).is_err());
        assert!(DenseState::fock(FockCutoff::new(2), 3).is_err());
    }
}
