//! Product number states on a ring of `M` sites.
//!
//! Momenta are `p_k = 2πk/M`, `k = 0…M−1`, and the site field is
//! `ψ(x) = M^{-1/2} Σ_k e^{i p_k x} a_k`, so `[ψ(x), ψ†(y)] = δ_{xy}`. On the state
//! `Π_k |n_k⟩` the only non-vanishing fourth moments are the direct and exchange
//! pairings, which gives the pair correlation
//!
//! ```text
//! G2(x, y) = n̄² + |g(x − y)|² − (Σ n_k² + Σ n_k)/M²,   g(r) = M⁻¹ Σ_k n_k e^{i p_k r}
//! ```
//!
//! with density `n̄ = N/M`. The last term is the finite-size correction; as `M → ∞`
//! at fixed per-mode occupation it vanishes and `G2(x, x) → 2n̄²`.

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::thermal::DispersionReport;

/// Largest ring evaluated by direct summation; larger rings use an FFT.
pub const DIRECT_TRANSFORM_MAX: usize = 4096;

const PARALLEL_MIN_MODES: usize = 512;
const DIRECT_PAIR_COUNT_MAX: usize = 1 << 22;

/// Occupation numbers `n_k` of the `M` momentum modes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumDocument", into = "SpectrumDocument")]
pub struct ModeSpectrum {
    occupations: Vec<u64>,
}

/// JSON form: `{"M": 4, "occupations": [1, 0, 2, 0]}` or `{"M": 64, "uniform": 2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumDocument {
    #[serde(rename = "M")]
    pub modes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occupations: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform: Option<u64>,
}

impl TryFrom<SpectrumDocument> for ModeSpectrum {
    type Error = Error;

    fn try_from(doc: SpectrumDocument) -> Result<Self> {
        match (doc.occupations, doc.uniform) {
            (Some(occupations), None) => {
                if occupations.len() != doc.modes {
                    return Err(Error::DimensionMismatch {
                        expected: doc.modes,
                        found: occupations.len(),
                    });
                }
                ModeSpectrum::new(occupations)
            }
            (None, Some(n)) => ModeSpectrum::uniform(doc.modes, n),
            _ => Err(Error::InvalidParameter(
                "spectrum needs exactly one of \"occupations\" or \"uniform\"".into(),
            )),
        }
    }
}

impl From<ModeSpectrum> for SpectrumDocument {
    fn from(spec: ModeSpectrum) -> Self {
        SpectrumDocument {
            modes: spec.modes(),
            occupations: Some(spec.occupations),
            uniform: None,
        }
    }
}

impl std::fmt::Display for ModeSpectrum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, n) in self.occupations.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "]")
    }
}

impl ModeSpectrum {
    pub fn new(occupations: Vec<u64>) -> Result<Self> {
        if occupations.is_empty() {
            return Err(Error::Empty("mode spectrum"));
        }
        Ok(ModeSpectrum { occupations })
    }

    pub fn uniform(modes: usize, occupation: u64) -> Result<Self> {
        Self::new(vec![occupation; modes])
    }

    pub fn modes(&self) -> usize {
        self.occupations.len()
    }

    pub fn occupations(&self) -> &[u64] {
        &self.occupations
    }

    pub fn occupation(&self, mode: usize) -> Result<u64> {
        self.occupations.get(mode).copied().ok_or(Error::ModeIndex {
            index: mode,
            len: self.modes(),
        })
    }

    /// `N = Σ n_k`.
    pub fn total(&self) -> u64 {
        self.occupations.iter().sum()
    }

    /// `N/M`.
    pub fn density(&self) -> f64 {
        self.total() as f64 / self.modes() as f64
    }

    /// `(Σ n_k² + Σ n_k)/M²`, the finite-size correction to `G2`.
    pub fn finite_size_correction(&self) -> f64 {
        let m = self.modes() as f64;
        let s2: f64 = self.occupations.iter().map(|&n| (n as f64) * (n as f64)).sum();
        (s2 + self.total() as f64) / (m * m)
    }
}

/// Exact `⟨a†_p a†_q a_{q2} a_{p2}⟩` next to the square-root pairing approximation
/// `√(n_p n_q n_{p2} n_{q2})·(δ_{p,p2}δ_{q,q2} + δ_{p,q2}δ_{q,p2})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourthMoment {
    pub exact: f64,
    pub approximate: f64,
}

impl FourthMoment {
    /// `approximate − exact`; nonzero only when `p = q`.
    pub fn gap(&self) -> f64 {
        self.approximate - self.exact
    }
}

pub fn fourth_moment(spec: &ModeSpectrum, p: usize, q: usize, q2: usize, p2: usize) -> Result<FourthMoment> {
    let n_p = spec.occupation(p)? as f64;
    let n_q = spec.occupation(q)? as f64;
    let n_q2 = spec.occupation(q2)? as f64;
    let n_p2 = spec.occupation(p2)? as f64;
    let direct = p == p2 && q == q2;
    let exchange = p == q2 && q == p2;
    let exact = if !(direct || exchange) {
        0.0
    } else if p != q {
        n_p * n_q
    } else {
        n_p * (n_p - 1.0)
    };
    let pairings = f64::from(u8::from(direct) + u8::from(exchange));
    let approximate = (n_p * n_q * n_p2 * n_q2).sqrt() * pairings;
    Ok(FourthMoment { exact, approximate })
}

/// `g(r)`, `r = 0…M−1`, by the direct or FFT route depending on `M`.
pub fn field_transform(spec: &ModeSpectrum) -> Vec<Complex64> {
    if spec.modes() <= DIRECT_TRANSFORM_MAX {
        field_transform_direct(spec)
    } else {
        field_transform_fft(spec)
    }
}

/// `g(r) = M⁻¹ Σ_k n_k e^{2πi k r/M}` summed in mode order for each `r`.
pub fn field_transform_direct(spec: &ModeSpectrum) -> Vec<Complex64> {
    let m = spec.modes();
    let occupied: Vec<(u64, f64)> = spec
        .occupations
        .iter()
        .enumerate()
        .filter(|(_, n)| **n > 0)
        .map(|(k, &n)| (k as u64, n as f64))
        .collect();
    let at = |r: usize| -> Complex64 {
        let sum: Complex64 = occupied
            .iter()
            .map(|&(k, n)| {
                let j = (k * r as u64) % m as u64;
                let (sin, cos) = (TAU * j as f64 / m as f64).sin_cos();
                Complex64::new(n * cos, n * sin)
            })
            .sum();
        sum / m as f64
    };
    if m >= PARALLEL_MIN_MODES {
        (0..m).into_par_iter().map(at).collect()
    } else {
        (0..m).map(at).collect()
    }
}

/// Same transform via an inverse FFT.
pub fn field_transform_fft(spec: &ModeSpectrum) -> Vec<Complex64> {
    let m = spec.modes();
    let mut buffer: Vec<Complex64> = spec
        .occupations
        .iter()
        .map(|&n| Complex64::new(n as f64, 0.0))
        .collect();
    FftPlanner::new().plan_fft_inverse(m).process(&mut buffer);
    let scale = 1.0 / m as f64;
    buffer.iter_mut().for_each(|c| *c *= scale);
    buffer
}

/// Pair correlation on the ring. Translation invariant, so it is stored per separation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMap {
    modes: usize,
    density: f64,
    finite_size_correction: f64,
    coherence: Vec<f64>,
    profile: Vec<f64>,
}

impl CorrelationMap {
    pub fn modes(&self) -> usize {
        self.modes
    }

    /// `n̄ = N/M`.
    pub fn density(&self) -> f64 {
        self.density
    }

    /// `(Σ n_k² + Σ n_k)/M²`, already subtracted from every entry.
    pub fn finite_size_correction(&self) -> f64 {
        self.finite_size_correction
    }

    /// `|g(r)|²` by separation.
    pub fn coherence(&self) -> &[f64] {
        &self.coherence
    }

    /// `G2` by separation `r = (x − y) mod M`.
    pub fn profile(&self) -> &[f64] {
        &self.profile
    }

    pub fn at_separation(&self, r: usize) -> f64 {
        self.profile[r % self.modes]
    }

    /// `G2(x, y)`. Panics if a site is outside the ring.
    pub fn value(&self, x: usize, y: usize) -> f64 {
        assert!(x < self.modes && y < self.modes, "site out of range");
        self.profile[(x + self.modes - y) % self.modes]
    }

    /// Full `M × M` matrix, row `x`, column `y`.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.modes)
            .map(|x| (0..self.modes).map(|y| self.value(x, y)).collect())
            .collect()
    }
}

/// `|g(r)|²` with `|g(r)| = |g(M − r)|` imposed exactly.
fn coherence_profile(spec: &ModeSpectrum) -> Vec<f64> {
    let g = field_transform(spec);
    let m = g.len();
    let mut coherence: Vec<f64> = g.iter().map(|c| c.norm_sqr()).collect();
    for r in 1..=m / 2 {
        coherence[m - r] = coherence[r];
    }
    coherence
}

pub fn pair_correlation(spec: &ModeSpectrum) -> CorrelationMap {
    let density = spec.density();
    let correction = spec.finite_size_correction();
    let coherence = coherence_profile(spec);
    let profile = coherence.iter().map(|c| density * density + c - correction).collect();
    CorrelationMap {
        modes: spec.modes(),
        density,
        finite_size_correction: correction,
        coherence,
        profile,
    }
}

/// `G2(x, x)/n̄²`.
pub fn bunching_factor(spec: &ModeSpectrum) -> Result<f64> {
    if spec.total() == 0 {
        return Err(Error::InvalidParameter(
            "bunching factor undefined at zero density".into(),
        ));
    }
    let density = spec.density();
    // g(0) = n̄ exactly
    let g2_same_site = 2.0 * density * density - spec.finite_size_correction();
    Ok(g2_same_site / (density * density))
}

/// Nonempty set of ring sites.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Region {
    modes: usize,
    sites: BTreeSet<usize>,
}

impl Region {
    pub fn new(sites: impl IntoIterator<Item = usize>, modes: usize) -> Result<Self> {
        let sites: BTreeSet<usize> = sites.into_iter().collect();
        if sites.is_empty() {
            return Err(Error::Empty("region"));
        }
        if let Some(&bad) = sites.iter().find(|&&x| x >= modes) {
            return Err(Error::ModeIndex { index: bad, len: modes });
        }
        Ok(Region { modes, sites })
    }

    pub fn full(modes: usize) -> Result<Self> {
        Self::new(0..modes, modes)
    }

    /// `len` consecutive sites from `start`, wrapping around the ring.
    pub fn contiguous(start: usize, len: usize, modes: usize) -> Result<Self> {
        if len > modes {
            return Err(Error::InvalidParameter(format!(
                "region of {len} sites on a ring of {modes}"
            )));
        }
        Self::new((0..len).map(|i| (start + i) % modes.max(1)), modes)
    }

    /// `None` when the region covers the whole ring.
    pub fn complement(&self) -> Option<Region> {
        Region::new((0..self.modes).filter(|x| !self.sites.contains(x)), self.modes).ok()
    }

    pub fn sites(&self) -> &BTreeSet<usize> {
        &self.sites
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.sites.len() == self.modes
    }

    /// `#{(x, y) ∈ V² : x − y ≡ r (mod M)}` for each `r`.
    fn separation_counts(&self) -> Vec<f64> {
        let m = self.modes;
        if self.len() * self.len() <= DIRECT_PAIR_COUNT_MAX {
            let mut counts = vec![0.0; m];
            for &x in &self.sites {
                for &y in &self.sites {
                    counts[(x + m - y) % m] += 1.0;
                }
            }
            return counts;
        }
        // circular autocorrelation of the indicator
        let mut planner = FftPlanner::new();
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for &x in &self.sites {
            buf[x] = Complex64::new(1.0, 0.0);
        }
        planner.plan_fft_forward(m).process(&mut buf);
        buf.iter_mut().for_each(|c| *c = Complex64::new(c.norm_sqr(), 0.0));
        planner.plan_fft_inverse(m).process(&mut buf);
        buf.iter().map(|c| (c.re / m as f64).round()).collect()
    }
}

/// Number fluctuations of the sites in a region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubvolumeReport {
    pub sites: usize,
    /// `⟨N_V⟩`, `⟨N_V²⟩`, `Var(N_V)`.
    pub dispersion: DispersionReport,
    /// `Σ_{x,y∈V} |g(x − y)|²`
    pub wave_contribution: f64,
    /// `|V|² (Σ n_k² + Σ n_k)/M²`, subtracted.
    pub finite_size_correction: f64,
    /// `|V| n̄`
    pub particle_contribution: f64,
}

impl SubvolumeReport {
    pub fn variance(&self) -> f64 {
        self.dispersion.variance
    }
}

/// `Var(N_V) = Σ_{x,y∈V} |g(x−y)|² − |V|²(Σn_k² + Σn_k)/M² + |V| n̄`.
pub fn subvolume_variance(spec: &ModeSpectrum, region: &Region) -> Result<SubvolumeReport> {
    if region.modes() != spec.modes() {
        return Err(Error::DimensionMismatch {
            expected: spec.modes(),
            found: region.modes(),
        });
    }
    let coherence = coherence_profile(spec);
    let counts = region.separation_counts();
    let wave_contribution: f64 = counts
        .iter()
        .zip(&coherence)
        .filter(|(n, _)| **n > 0.0)
        .map(|(n, c)| n * c)
        .sum();
    let size = region.len() as f64;
    let finite_size_correction = size * size * spec.finite_size_correction();
    let particle_contribution = size * spec.density();
    let variance = wave_contribution - finite_size_correction + particle_contribution;
    let mean = particle_contribution;
    Ok(SubvolumeReport {
        sites: region.len(),
        dispersion: DispersionReport::new(mean, variance + mean * mean, variance, 1.0),
        wave_contribution,
        finite_size_correction,
        particle_contribution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(occ: &[u64]) -> ModeSpectrum {
        ModeSpectrum::new(occ.to_vec()).unwrap()
    }

    #[test]
    fn fourth_moment_cases() {
        let s = spectrum(&[3, 2, 5]);
        let coincident = fourth_moment(&s, 0, 0, 0, 0).unwrap();
        assert_eq!(coincident.exact, 6.0);
        assert_eq!(coincident.approximate, 18.0);
        assert_eq!(coincident.gap(), 12.0);

        let exchange = fourth_moment(&s, 1, 2, 1, 2).unwrap();
        assert_eq!(exchange.exact, 10.0);
        assert_eq!(exchange.approximate, 10.0);
        let direct = fourth_moment(&s, 1, 2, 2, 1).unwrap();
        assert_eq!(direct.exact, 10.0);

        assert_eq!(fourth_moment(&s, 0, 1, 2, 1).unwrap().exact, 0.0);
        assert_eq!(fourth_moment(&s, 0, 0, 1, 1).unwrap().exact, 0.0);
        assert_eq!(fourth_moment(&s, 0, 0, 1, 1).unwrap().approximate, 0.0);
        assert!(matches!(
            fourth_moment(&s, 0, 3, 0, 3),
            Err(Error::ModeIndex { index: 3, len: 3 })
        ));
    }

    #[test]
    fn approximation_differs_only_on_coincident_tuples() {
        let s = spectrum(&[3, 1, 0, 2]);
        let m = s.modes();
        for p in 0..m {
            for q in 0..m {
                for q2 in 0..m {
                    for p2 in 0..m {
                        let f = fourth_moment(&s, p, q, q2, p2).unwrap();
                        if p != q {
                            assert_eq!(f.gap(), 0.0);
                        } else if p == q2 && q == p2 {
                            let n = s.occupation(p).unwrap() as f64;
                            assert_eq!(f.gap(), n * n + n);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn vacuum_has_no_correlation() {
        let map = pair_correlation(&ModeSpectrum::uniform(5, 0).unwrap());
        assert!(map.profile().iter().all(|&v| v == 0.0));
        assert!(bunching_factor(&ModeSpectrum::uniform(5, 0).unwrap()).is_err());
    }

    #[test]
    fn two_mode_ring() {
        let map = pair_correlation(&spectrum(&[1, 1]));
        assert!((map.value(0, 0) - 1.0).abs() < 1e-15);
        assert!((map.value(1, 1) - 1.0).abs() < 1e-15);
        assert!(map.value(0, 1).abs() < 1e-15);
        assert!(map.value(1, 0).abs() < 1e-15);
    }

    #[test]
    fn uniform_ring_bunching() {
        let map = pair_correlation(&ModeSpectrum::uniform(64, 2).unwrap());
        assert!((map.value(0, 0) - 7.90625).abs() < 1e-12);
        assert!((bunching_factor(&ModeSpectrum::uniform(64, 2).unwrap()).unwrap() - 1.9765625).abs() < 1e-15);
        assert!((bunching_factor(&ModeSpectrum::uniform(256, 2).unwrap()).unwrap() - 1.994140625).abs() < 1e-15);
        for n in 1..8u64 {
            let b = bunching_factor(&ModeSpectrum::new(vec![n]).unwrap()).unwrap();
            assert!((b - (1.0 - 1.0 / n as f64)).abs() < 1e-15);
        }
    }

    #[test]
    fn map_is_symmetric_and_translation_invariant() {
        let s = spectrum(&[4, 0, 1, 7, 2, 0, 0, 3, 1]);
        let map = pair_correlation(&s);
        let m = s.modes();
        for x in 0..m {
            for y in 0..m {
                assert_eq!(map.value(x, y), map.value(y, x));
                assert_eq!(map.value(x, y), map.value((x + 1) % m, (y + 1) % m));
                assert!(map.value(x, y) >= -1e-12);
            }
        }
    }

    #[test]
    fn parseval() {
        let s = spectrum(&[4, 0, 1, 7, 2, 0, 0, 3, 1, 9, 2]);
        let g = field_transform(&s);
        let lhs: f64 = g.iter().map(|c| c.norm_sqr()).sum::<f64>() * s.modes() as f64;
        let rhs: f64 = s.occupations().iter().map(|&n| (n * n) as f64).sum();
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn direct_and_fft_transforms_agree() {
        for m in [1usize, 2, 3, 7, 64, 97, 1000, 4096] {
            let occ: Vec<u64> = (0..m as u64).map(|k| (k * 7 + 3) % 5).collect();
            let s = ModeSpectrum::new(occ).unwrap();
            let d = field_transform_direct(&s);
            let f = field_transform_fft(&s);
            let worst = d.iter().zip(&f).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(worst < 1e-10, "M={m}: {worst:e}");
        }
    }

    #[test]
    fn subvolume_cases() {
        let single = spectrum(&[0, 0, 5, 0, 0, 0, 0, 0]);
        let r = subvolume_variance(&single, &Region::new([1, 4], 8).unwrap()).unwrap();
        assert!((r.variance() - 0.9375).abs() < 1e-12);
        assert!((r.dispersion.mean - 1.25).abs() < 1e-15);

        let s = spectrum(&[4, 0, 1, 7, 2, 0]);
        let full = subvolume_variance(&s, &Region::full(6).unwrap()).unwrap();
        assert!(full.variance().abs() < 1e-10);

        let map = pair_correlation(&s);
        let one = subvolume_variance(&s, &Region::new([3], 6).unwrap()).unwrap();
        let d = s.density();
        assert!((one.variance() - (map.value(3, 3) + d - d * d)).abs() < 1e-12);

        let v = Region::new([0, 2, 3], 6).unwrap();
        let a = subvolume_variance(&s, &v).unwrap().variance();
        let b = subvolume_variance(&s, &v.complement().unwrap()).unwrap().variance();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn large_region_counts_match_direct() {
        let m = 5000;
        let region = Region::new((0..m).filter(|x| x % 3 != 1), m).unwrap();
        assert!(region.len() * region.len() > DIRECT_PAIR_COUNT_MAX);
        let counts = region.separation_counts();
        let sites: Vec<usize> = region.sites().iter().copied().collect();
        for r in [0usize, 1, 2, 3, 17, 4999] {
            let direct = sites
                .iter()
                .filter(|&&x| region.sites().contains(&((x + m - r) % m)))
                .count();
            assert_eq!(counts[r], direct as f64, "r={r}");
        }
    }

    #[test]
    fn region_validation() {
        assert!(matches!(Region::new([], 4), Err(Error::Empty(_))));
        assert!(matches!(Region::new([4], 4), Err(Error::ModeIndex { .. })));
        assert!(Region::full(4).unwrap().complement().is_none());
        assert_eq!(Region::contiguous(3, 3, 4).unwrap().sites(), &BTreeSet::from([0, 1, 3]));
        let s = ModeSpectrum::uniform(4, 1).unwrap();
        assert!(subvolume_variance(&s, &Region::full(5).unwrap()).is_err());
    }

    #[test]
    fn spectrum_json() {
        let s: ModeSpectrum = serde_json::from_str(r#"{"M": 3, "occupations": [1, 0, 2]}"#).unwrap();
        assert_eq!(s.occupations(), &[1, 0, 2]);
        let u: ModeSpectrum = serde_json::from_str(r#"{"M": 64, "uniform": 2}"#).unwrap();
        assert_eq!(u.total(), 128);
        assert!(serde_json::from_str::<ModeSpectrum>(r#"{"M": 2, "occupations": [1]}"#).is_err());
        assert!(serde_json::from_str::<ModeSpectrum>(r#"{"M": 2}"#).is_err());
        assert!(serde_json::from_str::<ModeSpectrum>(r#"{"M": 2, "uniform": 1, "occupations": [1, 1]}"#).is_err());
        assert!(serde_json::from_str::<ModeSpectrum>(r#"{"M": 0, "uniform": 1}"#).is_err());
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"M":3,"occupations":[1,0,2]}"#);
    }
}
