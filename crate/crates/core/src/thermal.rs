//! Single-mode Planck statistics.
//!
//! A thermal mode has geometric occupation `p_n = (1 − e^{−βω}) e^{−βω n}` with
//! mean `n̄ = 1/(e^{βω} − 1)`, second moment `2n̄² + n̄` and number variance
//! `n̄² + n̄`: a wave-like `n̄²` term plus a particle-like `n̄` term. Energy
//! variances carry an extra factor `ω²`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::Capacity;

/// Inverse temperature and mode frequency. `beta = +∞` is the zero-temperature limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalModeSpec {
    beta: f64,
    omega: f64,
}

impl ThermalModeSpec {
    pub fn new(beta: f64, omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "omega must be positive and finite, got {omega}"
            )));
        }
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
        }
        if !(beta * omega > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta*omega underflows to {}",
                beta * omega
            )));
        }
        Ok(ThermalModeSpec { beta, omega })
    }

    /// Unit frequency with `β·ω = beta_omega`.
    pub fn from_reduced(beta_omega: f64) -> Result<Self> {
        Self::new(beta_omega, 1.0)
    }

    pub fn zero_temperature(omega: f64) -> Result<Self> {
        Self::new(f64::INFINITY, omega)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `β·ω`, possibly `+∞`.
    pub fn reduced_energy(&self) -> f64 {
        self.beta * self.omega
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.beta.is_infinite()
    }

    /// Boltzmann ratio `e^{−βω}` between successive occupations.
    pub fn ratio(&self) -> f64 {
        (-self.reduced_energy()).exp()
    }
}

/// Probabilities `p_0 … p_dmax` over photon number, plus any probability mass known to
/// lie beyond `dmax`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationDistribution {
    probs: Vec<f64>,
    deficit: f64,
}

impl OccupationDistribution {
    /// A complete distribution (no mass beyond the last entry).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::with_deficit(probs, 0.0)
    }

    /// A truncated distribution whose missing tail mass is `deficit`.
    pub fn with_deficit(probs: Vec<f64>, deficit: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Empty("occupation distribution"));
        }
        if let Some((n, p)) = probs.iter().enumerate().find(|(_, p)| !(**p >= 0.0 && p.is_finite())) {
            return Err(Error::InvalidParameter(format!("probability p_{n} = {p}")));
        }
        if !(0.0..1.0).contains(&deficit) {
            return Err(Error::InvalidParameter(format!(
                "tail deficit {deficit} outside [0, 1)"
            )));
        }
        let total: f64 = probs.iter().sum();
        if total > 1.0 + 1e-12 || (total + deficit - 1.0).abs() > 1e-10 {
            return Err(Error::Invariant(format!(
                "probabilities sum to {total} with declared deficit {deficit}"
            )));
        }
        Ok(OccupationDistribution { probs, deficit })
    }

    pub fn point_mass(k: usize) -> Self {
        let mut probs = vec![0.0; k + 1];
        probs[k] = 1.0;
        OccupationDistribution { probs, deficit: 0.0 }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn dmax(&self) -> usize {
        self.probs.len() - 1
    }

    /// Probability mass known to lie beyond `dmax`.
    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| (n * n) as f64 * p).sum()
    }

    /// Centered variance `Σ p_n (n − ⟨n⟩)²`.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.probs
            .iter()
            .enumerate()
            .map(|(n, p)| {
                let d = n as f64 - mean;
                p * d * d
            })
            .sum()
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        crate::fock::shannon_entropy(&self.probs)
    }

    /// Total-variation distance to the infinite geometric law `(1 − r) rⁿ`. Mass beyond
    /// `dmax` is compared in aggregate: the law's `r^{dmax+1}` against this distribution's
    /// declared deficit.
    pub fn total_variation_to_geometric(&self, ratio: f64) -> f64 {
        let mut geometric = 1.0 - ratio;
        let mut acc = 0.0;
        for &p in &self.probs {
            acc += (p - geometric).abs();
            geometric *= ratio;
        }
        let beyond = ratio.powi(self.probs.len() as i32);
        0.5 * (acc + (beyond - self.deficit).abs())
    }
}

/// Number-fluctuation summary of one mode or region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionReport {
    /// `n̄`
    pub mean: f64,
    /// `⟨n²⟩`
    pub second_moment: f64,
    /// `Δ²` in number units.
    pub variance: f64,
    /// `n̄²`
    pub wave_term: f64,
    /// `n̄`
    pub particle_term: f64,
    /// Multiplier converting number variance to energy variance (`ω²`, or 1 in number units).
    pub energy_scale: f64,
    /// `|Δ² − (n̄² + n̄)|`
    pub einstein_deviation: f64,
}

impl DispersionReport {
    pub fn new(mean: f64, second_moment: f64, variance: f64, energy_scale: f64) -> Self {
        let wave_term = mean * mean;
        DispersionReport {
            mean,
            second_moment,
            variance,
            wave_term,
            particle_term: mean,
            energy_scale,
            einstein_deviation: (variance - (wave_term + mean)).abs(),
        }
    }

    pub fn from_distribution(dist: &OccupationDistribution, energy_scale: f64) -> Self {
        Self::new(dist.mean(), dist.second_moment(), dist.variance(), energy_scale)
    }

    /// `energy_scale · Δ²`.
    pub fn energy_variance(&self) -> f64 {
        self.energy_scale * self.variance
    }
}

/// `1/(e^{βω} − 1)`; zero at `β = ∞`.
pub fn mean_occupation(spec: &ThermalModeSpec) -> f64 {
    if spec.is_zero_temperature() {
        return 0.0;
    }
    1.0 / spec.reduced_energy().exp_m1()
}

/// Mean energy `ω n̄`, optionally with the zero-point `ω/2`. Variances never include it.
pub fn mean_energy(spec: &ThermalModeSpec, include_zero_point: bool) -> f64 {
    let zero_point = if include_zero_point { 0.5 } else { 0.0 };
    spec.omega() * (mean_occupation(spec) + zero_point)
}

/// Closed-form moments: `⟨n²⟩ = 2n̄² + n̄`, `Δ² = n̄² + n̄`, energy scale `ω²`.
pub fn thermal_dispersion(spec: &ThermalModeSpec) -> DispersionReport {
    let n = mean_occupation(spec);
    DispersionReport::new(n, 2.0 * n * n + n, n * n + n, spec.omega() * spec.omega())
}

/// Truncated Planck distribution together with its exact discarded tail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermalDistribution {
    pub distribution: OccupationDistribution,
    /// `e^{−βω(dmax+1)}`, the untruncated mass beyond `dmax`.
    pub tail_mass: f64,
}

impl ThermalDistribution {
    pub fn dmax(&self) -> usize {
        self.distribution.dmax()
    }
}

/// `p_n = (1 − e^{−βω}) e^{−βω n}` for `n ≤ dmax`, where `dmax` is the smallest cutoff with
/// tail mass `e^{−βω(dmax+1)} < tail_tol`. Not renormalized.
pub fn thermal_distribution(spec: &ThermalModeSpec, tail_tol: f64) -> Result<ThermalDistribution> {
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tail_tol must lie in (0, 1), got {tail_tol}"
        )));
    }
    if spec.is_zero_temperature() {
        return Ok(ThermalDistribution {
            distribution: OccupationDistribution::new(vec![1.0])?,
            tail_mass: 0.0,
        });
    }
    let x = spec.reduced_energy();
    let tail = |dmax: usize| (-(x * (dmax as f64 + 1.0))).exp();
    let estimate = (-tail_tol.ln() / x).floor();
    let limit = Capacity::default().0;
    if estimate > limit as f64 {
        return Err(Error::Capacity {
            what: "thermal cutoff",
            requested: estimate as u128,
            limit: limit as u128,
        });
    }
    // The float estimate can be off by one near the boundary.
    let mut dmax = estimate as usize;
    while dmax > 0 && tail(dmax - 1) < tail_tol {
        dmax -= 1;
    }
    while tail(dmax) >= tail_tol {
        dmax += 1;
    }
    let norm = -(-x).exp_m1();
    let probs: Vec<f64> = (0..=dmax).map(|n| norm * (-(x * n as f64)).exp()).collect();
    let tail_mass = tail(dmax);
    Ok(ThermalDistribution {
        distribution: OccupationDistribution::with_deficit(probs, tail_mass)?,
        tail_mass,
    })
}

/// Per-mode reports and their summed energy variance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TotalDispersion {
    pub modes: Vec<DispersionReport>,
    /// `Σ ω² (n̄² + n̄)` over independent modes.
    pub energy_variance: f64,
}

pub fn total_dispersion(specs: &[ThermalModeSpec]) -> Result<TotalDispersion> {
    if specs.is_empty() {
        return Err(Error::Empty("mode list"));
    }
    let modes: Vec<DispersionReport> = specs.iter().map(thermal_dispersion).collect();
    let energy_variance = modes.iter().map(DispersionReport::energy_variance).sum();
    Ok(TotalDispersion { modes, energy_variance })
}
