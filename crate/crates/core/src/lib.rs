//! Numerical laboratory for bosonic number fluctuations.
//!
//! * [`fock`]: truncated ladder operators, tensor products, expectations, partial trace.
//! * [`thermal`]: single-mode Planck statistics and the `n̄² + n̄` dispersion.
//! * [`bipartite`]: two spatial modes sharing `N` quanta, their reduced states and
//!   entanglement quantifiers.
//! * [`multimode`]: product number states on a momentum ring, exact fourth moments,
//!   pair correlations, bunching and subvolume number variance.
//! * [`oracle`]: brute-force dense evaluation of the combinatorial results above.
//!
//! Units: `ħ = k_B = 1`. Energies are in units of `ω`.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bipartite;
pub mod error;
pub mod fock;
pub mod multimode;
pub mod oracle;
pub mod thermal;

pub use bipartite::{
    effective_temperature, entanglement_entropy, entanglement_measure, geometric_state, local_dispersion,
    reduced_occupation, BipartitePureState, GeometricAmplitudeSpec, Side,
};
pub use error::{Error, Result};
pub use fock::{
    annihilation_matrix, creation_matrix, expectation, number_matrix, partial_trace, tensor_operators, tensor_states,
    Capacity, DenseOperator, DenseState, DensityMatrix, FockCutoff,
};
pub use multimode::{
    bunching_factor, fourth_moment, pair_correlation, subvolume_variance, CorrelationMap, ModeSpectrum, Region,
};
pub use oracle::OracleConfig;
pub use thermal::{
    mean_occupation, thermal_dispersion, thermal_distribution, total_dispersion, DispersionReport,
    OccupationDistribution, ThermalModeSpec,
};

pub use num_complex::Complex64;
