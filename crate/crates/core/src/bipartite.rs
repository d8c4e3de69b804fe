//! Two spatial modes sharing a fixed number of quanta.
//!
//! The central family is `|Ψ⟩ = Σ_{n=0}^{N} c_n |n, N−n⟩` with geometric weights
//! `|c_n|² = e^{−a n}/Z`, `Z = Σ_{n=0}^{N} e^{−a n}`. Globally the total number never
//! fluctuates, yet each mode on its own sees a Boltzmann-like occupation with an
//! effective inverse temperature `a/ω`.
//!
//! The dispersion-difference `Var_A + Var_B − Var(N_A + N_B) = −2·Cov(N_A, N_B)`
//! vanishes on product states and is strictly positive on the geometric family with
//! `N ≥ 1`. For general pure states it can be negative or zero while the state is
//! entangled, so no sign is asserted outside that family.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{DenseState, STATE_TOL};
use crate::thermal::{DispersionReport, OccupationDistribution};

/// Probabilities at or below this are excluded from the temperature fit.
pub const FIT_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    A,
    B,
}

/// Pure state of two bosonic modes, stored sparsely by joint occupation `(n_A, n_B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartitePureState {
    dims: (usize, usize),
    amplitudes: BTreeMap<(usize, usize), Complex64>,
}

impl BipartitePureState {
    /// `dims` are the per-mode basis sizes `(dmax_A + 1, dmax_B + 1)`. Zero amplitudes are dropped.
    pub fn new(dims: (usize, usize), amplitudes: BTreeMap<(usize, usize), Complex64>) -> Result<Self> {
        if dims.0 == 0 || dims.1 == 0 {
            return Err(Error::InvalidParameter("mode dimensions must be at least 1".into()));
        }
        if let Some(&(a, b)) = amplitudes.keys().find(|(a, b)| *a >= dims.0 || *b >= dims.1) {
            return Err(Error::InvalidParameter(format!(
                "joint occupation ({a}, {b}) outside dimensions {dims:?}"
            )));
        }
        let amplitudes: BTreeMap<_, _> = amplitudes
            .into_iter()
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .collect();
        let norm_sqr: f64 = amplitudes.values().map(|c| c.norm_sqr()).sum();
        if (norm_sqr.sqrt() - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(BipartitePureState { dims, amplitudes })
    }

    /// Normalized product `(Σ α_n |n⟩) ⊗ (Σ β_m |m⟩)`.
    pub fn product(alpha: &[Complex64], beta: &[Complex64]) -> Result<Self> {
        let norm = |v: &[Complex64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let (na, nb) = (norm(alpha), norm(beta));
        if !(na > 0.0 && nb > 0.0) {
            return Err(Error::InvalidParameter("product factors must be nonzero".into()));
        }
        let mut amplitudes = BTreeMap::new();
        for (n, a) in alpha.iter().enumerate() {
            for (m, b) in beta.iter().enumerate() {
                amplitudes.insert((n, m), (a / na) * (b / nb));
            }
        }
        Self::new((alpha.len(), beta.len()), amplitudes)
    }

    pub fn from_dense(state: &DenseState) -> Result<Self> {
        let &[da, db] = state.dims() else {
            return Err(Error::InvalidParameter(format!(
                "bipartite state needs 2 modes, got {}",
                state.dims().len()
            )));
        };
        let amplitudes = state
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(k, &c)| ((k / db, k % db), c))
            .collect();
        Self::new((da, db), amplitudes)
    }

    pub fn to_dense(&self) -> Result<DenseState> {
        let (da, db) = self.dims;
        let mut amps = vec![Complex64::new(0.0, 0.0); da * db];
        for (&(a, b), &c) in &self.amplitudes {
            amps[a * db + b] = c;
        }
        DenseState::new(&[da, db], amps)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn amplitudes(&self) -> &BTreeMap<(usize, usize), Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, n_a: usize, n_b: usize) -> Complex64 {
        self.amplitudes.get(&(n_a, n_b)).copied().unwrap_or_default()
    }

    /// `Some(N)` when every nonzero amplitude sits on `n_A + n_B = N`.
    pub fn total_number(&self) -> Option<usize> {
        let mut totals = self.amplitudes.keys().map(|(a, b)| a + b);
        let first = totals.next()?;
        totals.all(|t| t == first).then_some(first)
    }

    fn joint_probabilities(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.amplitudes.iter().map(|(&(a, b), c)| (a, b, c.norm_sqr()))
    }
}

/// Decay constant `a` and total quanta `N` of the geometric family. `a = +∞` is allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricAmplitudeSpec {
    a: f64,
    total: usize,
}

impl GeometricAmplitudeSpec {
    pub fn new(a: f64, total: usize) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "decay constant must be positive, got {a}"
            )));
        }
        Ok(GeometricAmplitudeSpec { a, total })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Unnormalized weights `e^{−a n}`, `n = 0…N`.
    fn weights(&self) -> Vec<f64> {
        (0..=self.total)
            .map(|n| if n == 0 { 1.0 } else { (-self.a * n as f64).exp() })
            .collect()
    }
}

/// `Σ_{n=0}^{N} √(e^{−a n}/Z) |n, N−n⟩` on dimensions `(N+1, N+1)`.
pub fn geometric_state(spec: &GeometricAmplitudeSpec) -> BipartitePureState {
    let weights = spec.weights();
    let z: f64 = weights.iter().sum();
    let n_total = spec.total;
    let amplitudes = weights
        .iter()
        .enumerate()
        .filter(|(_, w)| **w > 0.0)
        .map(|(n, w)| ((n, n_total - n), Complex64::new((w / z).sqrt(), 0.0)))
        .collect();
    BipartitePureState {
        dims: (n_total + 1, n_total + 1),
        amplitudes,
    }
}

/// Diagonal of a reduced density matrix and the size of its coherences.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedOccupation {
    pub distribution: OccupationDistribution,
    /// Largest `|ρ_{n n'}|` with `n ≠ n'`; zero for number-conserving states.
    pub max_off_diagonal: f64,
}

pub fn reduced_occupation(state: &BipartitePureState, side: Side) -> ReducedOccupation {
    type Key = fn(&(usize, usize)) -> (usize, usize);
    let (kept_dim, key): (usize, Key) = match side {
        Side::A => (state.dims.0, |&(a, b)| (a, b)),
        Side::B => (state.dims.1, |&(a, b)| (b, a)),
    };
    let mut probs = vec![0.0; kept_dim];
    // traced index -> [(kept index, amplitude)]
    let mut columns: BTreeMap<usize, Vec<(usize, Complex64)>> = BTreeMap::new();
    for (k, &c) in &state.amplitudes {
        let (kept, traced) = key(k);
        probs[kept] += c.norm_sqr();
        columns.entry(traced).or_default().push((kept, c));
    }
    let mut coherences: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
    for column in columns.values() {
        for (i, &(n, cn)) in column.iter().enumerate() {
            for &(m, cm) in &column[i + 1..] {
                *coherences.entry((n, m)).or_default() += cn * cm.conj();
            }
        }
    }
    let max_off_diagonal = coherences.values().map(|c| c.norm()).fold(0.0, f64::max);
    let distribution =
        OccupationDistribution::new(probs).expect("reduced occupation of a normalized state is a distribution");
    ReducedOccupation {
        distribution,
        max_off_diagonal,
    }
}

/// Exact number moments of a single mode. `einstein_deviation` measures the departure
/// from `Δ² = n̄² + n̄`, which holds only for the untruncated geometric law.
pub fn local_dispersion(dist: &OccupationDistribution) -> DispersionReport {
    DispersionReport::from_distribution(dist, 1.0)
}

/// Unweighted least-squares line through `(n, ln p_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub points: usize,
}

pub fn fit_log_occupation(dist: &OccupationDistribution) -> Result<LogLinearFit> {
    let points: Vec<(f64, f64)> = dist
        .probs()
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > FIT_FLOOR)
        .map(|(n, p)| (n as f64, p.ln()))
        .collect();
    if points.len() < 2 {
        return Err(Error::UndefinedTemperature(points.len()));
    }
    let count = points.len() as f64;
    let x_mean = points.iter().map(|p| p.0).sum::<f64>() / count;
    let y_mean = points.iter().map(|p| p.1).sum::<f64>() / count;
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(sxy, sxx), &(x, y)| {
        let dx = x - x_mean;
        (sxy + dx * (y - y_mean), sxx + dx * dx)
    });
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let max_residual = points
        .iter()
        .map(|&(x, y)| (y - (intercept + slope * x)).abs())
        .fold(0.0, f64::max);
    Ok(LogLinearFit {
        slope,
        intercept,
        max_residual,
        points: points.len(),
    })
}

/// Inverse temperature `−slope/ω` of the log-linear fit to the occupation.
pub fn effective_temperature(dist: &OccupationDistribution, omega: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "omega must be positive and finite, got {omega}"
        )));
    }
    Ok(-fit_log_occupation(dist)?.slope / omega)
}

/// Local and global number variances of a bipartite pure state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumberStatistics {
    pub mean_a: f64,
    pub mean_b: f64,
    pub var_a: f64,
    pub var_b: f64,
    pub var_total: f64,
    pub covariance: f64,
}

pub fn number_statistics(state: &BipartitePureState) -> NumberStatistics {
    let (mut mean_a, mut mean_b) = (0.0, 0.0);
    for (a, b, p) in state.joint_probabilities() {
        mean_a += p * a as f64;
        mean_b += p * b as f64;
    }
    let mean_t = mean_a + mean_b;
    let (mut var_a, mut var_b, mut var_total, mut covariance) = (0.0, 0.0, 0.0, 0.0);
    for (a, b, p) in state.joint_probabilities() {
        let da = a as f64 - mean_a;
        let db = b as f64 - mean_b;
        let dt = (a + b) as f64 - mean_t;
        var_a += p * da * da;
        var_b += p * db * db;
        var_total += p * dt * dt;
        covariance += p * da * db;
    }
    NumberStatistics {
        mean_a,
        mean_b,
        var_a,
        var_b,
        var_total,
        covariance,
    }
}

/// `Var(N_A) + Var(N_B) − Var(N_A + N_B)`.
pub fn entanglement_measure(state: &BipartitePureState) -> f64 {
    let s = number_statistics(state);
    s.var_a + s.var_b - s.var_total
}

/// Squared Schmidt coefficients (eigenvalues of either reduced state), descending.
pub fn schmidt_weights(state: &BipartitePureState) -> Vec<f64> {
    let reduced = reduced_occupation(state, Side::A);
    let mut weights = if reduced.max_off_diagonal == 0.0 {
        reduced.distribution.probs().to_vec()
    } else {
        let (da, db) = state.dims;
        let mut m = DMatrix::<Complex64>::zeros(da, db);
        for (&(a, b), &c) in &state.amplitudes {
            m[(a, b)] = c;
        }
        m.singular_values().iter().map(|s| s * s).collect()
    };
    weights.sort_by(|x, y| y.total_cmp(x));
    weights
}

/// Von Neumann entropy (nats) of the reduced state of `side`.
pub fn reduced_entropy(state: &BipartitePureState, side: Side) -> f64 {
    let reduced = reduced_occupation(state, side);
    if reduced.max_off_diagonal == 0.0 {
        return reduced.distribution.entropy();
    }
    crate::fock::shannon_entropy(&schmidt_weights(state))
}

/// Von Neumann entropy (nats) of mode A.
pub fn entanglement_entropy(state: &BipartitePureState) -> f64 {
    reduced_entropy(state, Side::A)
}
