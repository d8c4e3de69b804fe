//! Inputs shared by the benchmarks.

use fockfluct_core::oracle::{self, OracleConfig};
use fockfluct_core::{DenseState, ModeSpectrum};

/// Deterministic, non-uniform spectrum: `n_k = (7k + 3) mod 5`.
pub fn ramp_spectrum(modes: usize) -> ModeSpectrum {
    ModeSpectrum::new((0..modes).map(|k| ((7 * k + 3) % 5) as u64).collect()).expect("modes > 0")
}

/// Dense product state of a small spectrum, for oracle timings.
pub fn dense_product(occupations: &[u64]) -> (ModeSpectrum, DenseState) {
    let spec = ModeSpectrum::new(occupations.to_vec()).expect("nonempty");
    let config = OracleConfig::for_spectrum(&spec).expect("cutoffs");
    let state = oracle::build_product_state(&spec, &config).expect("within capacity");
    (spec, state)
}

/// `count` points evenly spaced over `[0.05, 5]`.
pub fn beta_omega_grid(count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| 0.05 + (5.0 - 0.05) * k as f64 / (count.max(2) - 1) as f64)
        .collect()
}
