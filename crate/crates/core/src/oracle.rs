//! Brute-force dense evaluation on truncated tensor-product Fock spaces.
//!
//! Everything here is built from the ladder matrices in [`crate::fock`] by explicit
//! Kronecker embedding and matrix application. Nothing is shared with the closed-form
//! paths in `thermal`, `bipartite` or `multimode`, so agreement between the two is a
//! genuine check.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    annihilation_matrix, creation_matrix, embed, expectation, number_matrix, partial_trace, tensor_states, Capacity,
    DenseOperator, DenseState, DensityMatrix, FockCutoff,
};
use crate::multimode::{ModeSpectrum, Region};

/// Levels every mode must keep above its occupation, so two creations on one mode never
/// fall off the top of the truncated space.
pub const OCCUPATION_MARGIN: u64 = 2;

/// Per-mode cutoffs and the total-dimension limit for dense evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    cutoffs: Vec<FockCutoff>,
    capacity: Capacity,
}

impl OracleConfig {
    pub fn new(cutoffs: Vec<FockCutoff>, capacity: Capacity) -> Result<Self> {
        if cutoffs.is_empty() {
            return Err(Error::Empty("cutoff list"));
        }
        let dims: Vec<usize> = cutoffs.iter().map(|c| c.dim()).collect();
        capacity.check(&dims)?;
        Ok(OracleConfig { cutoffs, capacity })
    }

    /// Cutoff `n_k + 2` on every mode, default capacity.
    pub fn for_spectrum(spec: &ModeSpectrum) -> Result<Self> {
        let cutoffs = spec
            .occupations()
            .iter()
            .map(|&n| FockCutoff::new((n + OCCUPATION_MARGIN) as usize))
            .collect();
        Self::new(cutoffs, Capacity::default())
    }

    pub fn cutoffs(&self) -> &[FockCutoff] {
        &self.cutoffs
    }

    pub fn capacity(&self) -> Capacity {
        self.capacity
    }

    pub fn dims(&self) -> Vec<usize> {
        self.cutoffs.iter().map(|c| c.dim()).collect()
    }
}

/// `|n_0⟩ ⊗ … ⊗ |n_{M−1}⟩`.
pub fn build_product_state(spec: &ModeSpectrum, config: &OracleConfig) -> Result<DenseState> {
    if spec.modes() != config.cutoffs.len() {
        return Err(Error::DimensionMismatch {
            expected: config.cutoffs.len(),
            found: spec.modes(),
        });
    }
    config.capacity.check(&config.dims())?;
    let factors = spec
        .occupations()
        .iter()
        .zip(&config.cutoffs)
        .enumerate()
        .map(|(mode, (&n, &cutoff))| {
            let required = n + OCCUPATION_MARGIN;
            if (cutoff.dmax() as u64) < required {
                return Err(Error::Occupation {
                    mode,
                    occupation: n,
                    required,
                    dmax: cutoff.dmax(),
                });
            }
            DenseState::fock(cutoff, n as usize)
        })
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&DenseState> = factors.iter().collect();
    tensor_states(&refs, config.capacity)
}

/// Ladder operators of every mode, embedded in one dense tensor-product space.
#[derive(Debug, Clone)]
pub struct DenseFockSpace {
    dims: Vec<usize>,
    annihilators: Vec<DenseOperator>,
    creators: Vec<DenseOperator>,
}

impl DenseFockSpace {
    pub fn new(dims: &[usize], capacity: Capacity) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Empty("mode list"));
        }
        let mut annihilators = Vec::with_capacity(dims.len());
        let mut creators = Vec::with_capacity(dims.len());
        for (mode, &d) in dims.iter().enumerate() {
            let cutoff = FockCutoff::new(d - 1);
            annihilators.push(embed(&annihilation_matrix(cutoff), mode, dims, capacity)?);
            creators.push(embed(&creation_matrix(cutoff), mode, dims, capacity)?);
        }
        Ok(DenseFockSpace {
            dims: dims.to_vec(),
            annihilators,
            creators,
        })
    }

    pub fn for_state(state: &DenseState) -> Result<Self> {
        Self::new(state.dims(), Capacity::default())
    }

    pub fn modes(&self) -> usize {
        self.dims.len()
    }

    pub fn annihilator(&self, mode: usize) -> Result<&DenseOperator> {
        self.annihilators.get(mode).ok_or(Error::ModeIndex {
            index: mode,
            len: self.modes(),
        })
    }

    pub fn creator(&self, mode: usize) -> Result<&DenseOperator> {
        self.creators.get(mode).ok_or(Error::ModeIndex {
            index: mode,
            len: self.modes(),
        })
    }

    /// `a†_p a_q`.
    pub fn hop(&self, p: usize, q: usize) -> Result<DenseOperator> {
        self.creator(p)?.matmul(self.annihilator(q)?)
    }

    /// `a†_k a_k` built from the embedded single-mode number matrix.
    pub fn number_operator(&self, mode: usize) -> Result<DenseOperator> {
        let d = *self.dims.get(mode).ok_or(Error::ModeIndex {
            index: mode,
            len: self.modes(),
        })?;
        embed(
            &number_matrix(FockCutoff::new(d - 1)),
            mode,
            &self.dims,
            Capacity::default(),
        )
    }

    fn check_state(&self, state: &DenseState) -> Result<()> {
        if state.dims() != self.dims.as_slice() {
            return Err(Error::DimensionMismatch {
                expected: self.dims.iter().product(),
                found: state.dim(),
            });
        }
        Ok(())
    }

    /// `⟨Ψ| a†_p a†_q a_{q2} a_{p2} |Ψ⟩` by applying the four matrices right to left.
    pub fn fourth_moment(&self, state: &DenseState, p: usize, q: usize, q2: usize, p2: usize) -> Result<f64> {
        self.check_state(state)?;
        let mut v = self.annihilator(p2)?.apply(state.amplitudes())?;
        v = self.annihilator(q2)?.apply(&v)?;
        v = self.creator(q)?.apply(&v)?;
        v = self.creator(p)?.apply(&v)?;
        Ok(inner(state.amplitudes(), &v).re)
    }

    /// All `M⁴` fourth moments, indexed `((p·M + q)·M + q2)·M + p2`, from the overlaps
    /// `⟨a_q a_p Ψ | a_{q2} a_{p2} Ψ⟩`.
    pub fn fourth_moment_tensor(&self, state: &DenseState) -> Result<Vec<f64>> {
        self.check_state(state)?;
        let m = self.modes();
        let singles: Vec<Vec<Complex64>> = self
            .annihilators
            .iter()
            .map(|a| a.apply(state.amplitudes()))
            .collect::<Result<_>>()?;
        // pairs[i*m + j] = a_i a_j Ψ
        let mut pairs = Vec::with_capacity(m * m);
        for a in &self.annihilators {
            for single in &singles {
                pairs.push(a.apply(single)?);
            }
        }
        let mut out = Vec::with_capacity(m.pow(4));
        for p in 0..m {
            for q in 0..m {
                for q2 in 0..m {
                    for p2 in 0..m {
                        out.push(inner(&pairs[q * m + p], &pairs[q2 * m + p2]).re);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `N_V = Σ_{x∈V} ψ†(x)ψ(x) = Σ_{p,q} w_{pq} a†_p a_q` with
    /// `w_{pq} = M⁻¹ Σ_{x∈V} e^{2πi (q − p) x/M}`.
    pub fn region_number_operator(&self, region: &Region) -> Result<DenseOperator> {
        let m = self.modes();
        if region.modes() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: region.modes(),
            });
        }
        let mut op = DenseOperator::zeros(&self.dims)?;
        for p in 0..m {
            for q in 0..m {
                let weight: Complex64 = region
                    .sites()
                    .iter()
                    .map(|&x| phase((q as i64 - p as i64) * x as i64, m))
                    .sum::<Complex64>()
                    / m as f64;
                if weight.norm() < 1e-15 {
                    continue;
                }
                op.add_scaled(weight, &self.hop(p, q)?)?;
            }
        }
        Ok(op)
    }
}

fn inner(bra: &[Complex64], ket: &[Complex64]) -> Complex64 {
    bra.iter().zip(ket).map(|(a, b)| a.conj() * b).sum()
}

/// `e^{2πi k/M}` with `k` reduced mod `M` first.
fn phase(k: i64, m: usize) -> Complex64 {
    let j = k.rem_euclid(m as i64);
    Complex64::from_polar(1.0, TAU * j as f64 / m as f64)
}

pub fn oracle_fourth_moment(state: &DenseState, p: usize, q: usize, q2: usize, p2: usize) -> Result<f64> {
    DenseFockSpace::for_state(state)?.fourth_moment(state, p, q, q2, p2)
}

fn check_modes(state: &DenseState, modes: usize) -> Result<()> {
    if state.dims().len() != modes {
        return Err(Error::DimensionMismatch {
            expected: modes,
            found: state.dims().len(),
        });
    }
    Ok(())
}

/// `⟨ψ†(x)ψ†(y)ψ(x)ψ(y)⟩ = M⁻² Σ e^{2πi(−p x − q y + q2 x + p2 y)/M} ⟨a†_p a†_q a_{q2} a_{p2}⟩`.
pub fn oracle_pair_correlation(state: &DenseState, modes: usize, x: usize, y: usize) -> Result<f64> {
    if x >= modes || y >= modes {
        return Err(Error::ModeIndex {
            index: x.max(y),
            len: modes,
        });
    }
    Ok(oracle_pair_correlation_map(state, modes)?[x][y])
}

/// Every `G2(x, y)` from a single fourth-moment tensor.
pub fn oracle_pair_correlation_map(state: &DenseState, modes: usize) -> Result<Vec<Vec<f64>>> {
    check_modes(state, modes)?;
    let space = DenseFockSpace::for_state(state)?;
    let moments = space.fourth_moment_tensor(state)?;
    let m = modes;
    let norm = (m * m) as f64;
    let mut map = vec![vec![0.0; m]; m];
    for (x, row) in map.iter_mut().enumerate() {
        for (y, cell) in row.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in 0..m {
                for q in 0..m {
                    for q2 in 0..m {
                        for p2 in 0..m {
                            let moment = moments[((p * m + q) * m + q2) * m + p2];
                            if moment == 0.0 {
                                continue;
                            }
                            let k = (q2 as i64 - p as i64) * x as i64 + (p2 as i64 - q as i64) * y as i64;
                            acc += phase(k, m) * moment;
                        }
                    }
                }
            }
            *cell = acc.re / norm;
        }
    }
    Ok(map)
}

/// `⟨N_V²⟩ − ⟨N_V⟩²` with `N_V` assembled as a dense operator.
pub fn oracle_subvolume_variance(state: &DenseState, modes: usize, region: &Region) -> Result<f64> {
    check_modes(state, modes)?;
    let space = DenseFockSpace::for_state(state)?;
    let n_v = space.region_number_operator(region)?;
    let mean = expectation(&n_v, state)?.re;
    let second = expectation(&n_v.matmul(&n_v)?, state)?.re;
    Ok(second - mean * mean)
}

/// `e^{−βω a†a}/Tr(·)` on the truncated space, exponentiating the number matrix entry-wise
/// (it is diagonal).
pub fn thermal_density_matrix(beta_omega: f64, cutoff: FockCutoff) -> Result<DensityMatrix> {
    if !(beta_omega > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta*omega must be positive, got {beta_omega}"
        )));
    }
    let n = number_matrix(cutoff);
    let weights: Vec<f64> = (0..n.dim())
        .map(|i| {
            let level = n.get(i, i).re;
            if level == 0.0 {
                1.0
            } else {
                (-beta_omega * level).exp()
            }
        })
        .collect();
    let z: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / z).collect();
    DensityMatrix::from_diagonal(&probs)
}

/// Smallest cutoff `d` with `e^{−βω(d+1)} (d+1)² ≤ 1e−15`, which keeps the renormalization
/// error in the first two moments far below `1e−10`.
pub fn thermal_cutoff(beta_omega: f64) -> Result<FockCutoff> {
    if !(beta_omega > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta*omega must be positive, got {beta_omega}"
        )));
    }
    let limit = Capacity::default().0;
    let mut d = 1usize;
    while (-(beta_omega * (d + 1) as f64)).exp() * ((d + 1) as f64).powi(2) > 1e-15 {
        d += 1;
        if d >= limit {
            return Err(Error::Capacity {
                what: "thermal oracle cutoff",
                requested: d as u128,
                limit: limit as u128,
            });
        }
    }
    Ok(FockCutoff::new(d))
}

/// `(⟨a†a⟩, ⟨(a†a)²⟩)` on a single-mode density matrix.
pub fn oracle_number_moments(rho: &DensityMatrix) -> Result<(f64, f64)> {
    let n = number_matrix(FockCutoff::new(rho.dim() - 1));
    let mean = expectation(&n, rho)?.re;
    let second = expectation(&n.matmul(&n)?, rho)?.re;
    Ok((mean, second))
}

/// Number statistics of a two-mode dense state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleBipartite {
    pub mean_a: f64,
    pub mean_b: f64,
    pub var_a: f64,
    pub var_b: f64,
    pub var_total: f64,
}

impl OracleBipartite {
    /// `Var_A + Var_B − Var_total`.
    pub fn measure(&self) -> f64 {
        self.var_a + self.var_b - self.var_total
    }
}

/// Local moments through the partial trace, global moments through `N_A + N_B` on the
/// full space.
pub fn oracle_bipartite_statistics(state: &DenseState) -> Result<OracleBipartite> {
    if state.dims().len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "bipartite statistics need 2 modes, got {}",
            state.dims().len()
        )));
    }
    let (mean_a, second_a) = oracle_number_moments(&partial_trace(state, 0)?)?;
    let (mean_b, second_b) = oracle_number_moments(&partial_trace(state, 1)?)?;
    let space = DenseFockSpace::for_state(state)?;
    let mut total = space.number_operator(0)?;
    total.add_scaled(Complex64::new(1.0, 0.0), &space.number_operator(1)?)?;
    let mean_t = expectation(&total, state)?.re;
    let second_t = expectation(&total.matmul(&total)?, state)?.re;
    Ok(OracleBipartite {
        mean_a,
        mean_b,
        var_a: second_a - mean_a * mean_a,
        var_b: second_b - mean_b * mean_b,
        var_total: second_t - mean_t * mean_t,
    })
}

/// Von Neumann entropy of the reduced state of mode `keep`.
pub fn oracle_entropy(state: &DenseState, keep: usize) -> Result<f64> {
    Ok(partial_trace(state, keep)?.von_neumann_entropy())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn spectrum(occ: &[u64]) -> ModeSpectrum {
        ModeSpectrum::new(occ.to_vec()).unwrap()
    }

    fn product(occ: &[u64]) -> DenseState {
        let s = spectrum(occ);
        build_product_state(&s, &OracleConfig::for_spectrum(&s).unwrap()).unwrap()
    }

    #[test]
    fn builds_vacuum_and_basis_states() {
        let vac = product(&[0, 0]);
        assert_eq!(vac.dims(), &[3, 3]);
        assert_eq!(vac.amplitudes()[0], Complex64::new(1.0, 0.0));

        let s = spectrum(&[1, 1]);
        let cfg = OracleConfig::new(vec![FockCutoff::new(3), FockCutoff::new(3)], Capacity::default()).unwrap();
        let state = build_product_state(&s, &cfg).unwrap();
        assert_eq!(state.amplitudes()[4 + 1], Complex64::new(1.0, 0.0));
        assert!((state.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_thin_cutoffs_and_capacity() {
        let s = spectrum(&[1, 1]);
        let thin = OracleConfig::new(vec![FockCutoff::new(2), FockCutoff::new(2)], Capacity::default()).unwrap();
        assert!(matches!(
            build_product_state(&s, &thin),
            Err(Error::Occupation {
                required: 3,
                dmax: 2,
                ..
            })
        ));
        let err = OracleConfig::new(vec![FockCutoff::new(9); 3], Capacity(999)).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
        // seven photons spread over eight safe cutoffs fit as a state but not as dense operators
        let wide = spectrum(&[5, 0, 0, 0, 0, 0, 0, 0]);
        let state = build_product_state(&wide, &OracleConfig::for_spectrum(&wide).unwrap()).unwrap();
        assert!(matches!(DenseFockSpace::for_state(&state), Err(Error::Capacity { .. })));
    }

    #[test]
    fn fourth_moment_examples() {
        let s = product(&[3]);
        assert!((oracle_fourth_moment(&s, 0, 0, 0, 0).unwrap() - 6.0).abs() < 1e-12);
        let s = product(&[2, 5]);
        assert!((oracle_fourth_moment(&s, 0, 1, 0, 1).unwrap() - 10.0).abs() < 1e-12);
        assert!((oracle_fourth_moment(&s, 0, 1, 1, 0).unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(oracle_fourth_moment(&s, 0, 0, 1, 1).unwrap(), 0.0);
    }

    #[test]
    fn tensor_matches_direct_application() {
        let s = product(&[2, 0, 3]);
        let space = DenseFockSpace::for_state(&s).unwrap();
        let tensor = space.fourth_moment_tensor(&s).unwrap();
        let m = 3;
        for p in 0..m {
            for q in 0..m {
                for q2 in 0..m {
                    for p2 in 0..m {
                        let direct = space.fourth_moment(&s, p, q, q2, p2).unwrap();
                        assert!((tensor[((p * m + q) * m + q2) * m + p2] - direct).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn pair_correlation_examples() {
        let s = product(&[1, 1]);
        assert!((oracle_pair_correlation(&s, 2, 0, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!(oracle_pair_correlation(&s, 2, 0, 1).unwrap().abs() < 1e-12);
        assert_eq!(oracle_pair_correlation(&product(&[0, 0]), 2, 1, 0).unwrap(), 0.0);
        assert!(oracle_pair_correlation(&s, 2, 2, 0).is_err());
        assert!(oracle_pair_correlation(&s, 3, 0, 0).is_err());
    }

    #[test]
    fn single_mode_bunching() {
        for n in 1..=6u64 {
            let s = product(&[n]);
            let g2 = oracle_pair_correlation(&s, 1, 0, 0).unwrap();
            let nf = n as f64;
            assert!((g2 / (nf * nf) - (1.0 - 1.0 / nf)).abs() < 1e-12);
        }
    }

    #[test]
    fn subvolume_examples() {
        let s = product(&[3, 0, 0, 0]);
        let one = oracle_subvolume_variance(&s, 4, &Region::new([2], 4).unwrap()).unwrap();
        assert!((one - 0.5625).abs() < 1e-12);
        let full = oracle_subvolume_variance(&s, 4, &Region::full(4).unwrap()).unwrap();
        assert!(full.abs() < 1e-12);
        let v = Region::new([0, 3], 4).unwrap();
        let a = oracle_subvolume_variance(&s, 4, &v).unwrap();
        let b = oracle_subvolume_variance(&s, 4, &v.complement().unwrap()).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn region_number_operator_is_hermitian() {
        let s = product(&[1, 2, 0]);
        let space = DenseFockSpace::for_state(&s).unwrap();
        let op = space.region_number_operator(&Region::new([0, 2], 3).unwrap()).unwrap();
        assert!(op.is_hermitian(1e-14));
    }

    #[test]
    fn thermal_matrix_moments() {
        let rho = thermal_density_matrix(LN_2, FockCutoff::new(80)).unwrap();
        let (mean, second) = oracle_number_moments(&rho).unwrap();
        assert!((mean - 1.0).abs() < 1e-12);
        assert!((second - 3.0).abs() < 1e-12);
    }

    #[test]
    fn bipartite_statistics_of_symmetric_pair() {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let s = DenseState::new(&[2, 2], vec![z, h, h, z]).unwrap();
        let stats = oracle_bipartite_statistics(&s).unwrap();
        assert!((stats.var_a - 0.25).abs() < 1e-15);
        assert!(stats.var_total.abs() < 1e-15);
        assert!((stats.measure() - 0.5).abs() < 1e-15);
        assert!((oracle_entropy(&s, 0).unwrap() - LN_2).abs() < 1e-12);
    }
}
