use fockfluct_core::bipartite::{
    self, effective_temperature, entanglement_measure, geometric_state, number_statistics, reduced_entropy,
    reduced_occupation, BipartitePureState, GeometricAmplitudeSpec, Side,
};
use fockfluct_core::fock::{expectation, partial_trace, DenseOperator, DenseState};
use fockfluct_core::multimode::{
    bunching_factor, field_transform, field_transform_direct, field_transform_fft, subvolume_variance, ModeSpectrum,
    Region,
};
use fockfluct_core::thermal::{thermal_dispersion, thermal_distribution, ThermalModeSpec};
use fockfluct_core::Complex64;
use proptest::prelude::*;

fn complex_vec(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
        .prop_filter("nonzero", |v: &Vec<Complex64>| {
            v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3
        })
}

fn spectrum(max_modes: usize, max_n: u64) -> impl Strategy<Value = ModeSpectrum> {
    prop::collection::vec(0..=max_n, 1..=max_modes).prop_map(|v| ModeSpectrum::new(v).unwrap())
}

proptest! {
    #[test]
    fn partial_trace_yields_valid_density_matrix(
        dims in (1usize..4, 1usize..4, 1usize..3),
        seed in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 36),
        keep in 0usize..3,
    ) {
        let dims = [dims.0, dims.1, dims.2];
        let len: usize = dims.iter().product();
        let amps: Vec<Complex64> = seed[..len].iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        prop_assume!(amps.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3);
        let state = DenseState::normalized(&dims, amps).unwrap();
        // the constructor enforces Hermiticity, unit trace and positivity
        let rho = partial_trace(&state, keep).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_expectations_are_real(
        amps in complex_vec(6..=6),
        entries in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 36),
    ) {
        let state = DenseState::normalized(&[2, 3], amps).unwrap();
        let raw: Vec<Complex64> = entries.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        let a = DenseOperator::from_entries(&[2, 3], raw).unwrap();
        let mut h = a.clone();
        h.add_scaled(Complex64::new(1.0, 0.0), &a.adjoint()).unwrap();
        prop_assert!(expectation(&h, &state).unwrap().im.abs() <= 1e-10);
    }

    #[test]
    fn product_states_have_zero_measure(alpha in complex_vec(1..=6), beta in complex_vec(1..=6)) {
        let s = BipartitePureState::product(&alpha, &beta).unwrap();
        prop_assert!(entanglement_measure(&s).abs() < 1e-12);
        prop_assert!(bipartite::entanglement_entropy(&s).abs() < 1e-10);
    }

    #[test]
    fn number_conserving_states_have_still_totals(amps in complex_vec(1..=10)) {
        let n = amps.len() - 1;
        let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let map = amps.iter().enumerate().map(|(k, c)| ((k, n - k), c / norm)).collect();
        let s = BipartitePureState::new((n + 1, n + 1), map).unwrap();
        let stats = number_statistics(&s);
        prop_assert!(stats.var_total.abs() < 1e-12);
        prop_assert!((stats.var_a - stats.var_b).abs() < 1e-12);
        prop_assert!((entanglement_measure(&s) - 2.0 * stats.var_a).abs() < 1e-12);
        prop_assert!((reduced_entropy(&s, Side::A) - reduced_entropy(&s, Side::B)).abs() < 1e-10);
    }

    #[test]
    fn entropies_of_both_sides_agree(amps in complex_vec(9..=9)) {
        let map = amps.iter().enumerate().map(|(k, &c)| ((k / 3, k % 3), c)).collect::<std::collections::BTreeMap<_, _>>();
        let norm = map.values().map(|c: &Complex64| c.norm_sqr()).sum::<f64>().sqrt();
        let map = map.into_iter().map(|(k, c)| (k, c / norm)).collect();
        let s = BipartitePureState::new((3, 3), map).unwrap();
        prop_assert!((reduced_entropy(&s, Side::A) - reduced_entropy(&s, Side::B)).abs() < 1e-10);
    }

    #[test]
    fn geometric_family_is_positive_and_thermal(a in 0.05f64..5.0, n in 1usize..200) {
        let s = geometric_state(&GeometricAmplitudeSpec::new(a, n).unwrap());
        prop_assert!(entanglement_measure(&s) > 0.0);
        let dist = reduced_occupation(&s, Side::A).distribution;
        let beta = effective_temperature(&dist, 1.0).unwrap();
        prop_assert!((beta - a).abs() < 1e-10, "beta_eff {} vs a {}", beta, a);
        if a * n as f64 > 40.0 {
            prop_assert!(dist.total_variation_to_geometric((-a).exp()) < 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_summation(x in 0.05f64..5.0) {
        let spec = ThermalModeSpec::from_reduced(x).unwrap();
        let closed = thermal_dispersion(&spec);
        prop_assert_eq!(closed.variance, closed.wave_term + closed.particle_term);

        let summed = thermal_distribution(&spec, 1e-16).unwrap().distribution;
        prop_assert!((summed.mean() - closed.mean).abs() < 1e-9);
        prop_assert!((summed.variance() - closed.variance).abs() < 1e-9);

        // At 1e-14 the discarded tail holds up to ~4e-9 of variance near x = 0.05.
        let coarse = thermal_distribution(&spec, 1e-14).unwrap().distribution;
        prop_assert!((coarse.mean() - closed.mean).abs() < 1e-9);
        prop_assert!((coarse.variance() - closed.variance).abs() < 1e-9 * closed.variance.max(1.0));
    }

    #[test]
    fn full_lattice_is_still_and_complements_agree(spec in spectrum(24, 6), mask in any::<u32>()) {
        let m = spec.modes();
        let full = subvolume_variance(&spec, &Region::full(m).unwrap()).unwrap();
        prop_assert!(full.variance().abs() < 1e-10);
        let sites: Vec<usize> = (0..m).filter(|x| mask & (1 << x) != 0).collect();
        if let Ok(region) = Region::new(sites, m) {
            if let Some(rest) = region.complement() {
                let a = subvolume_variance(&spec, &region).unwrap().variance();
                let b = subvolume_variance(&spec, &rest).unwrap().variance();
                prop_assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn parseval_and_transform_routes(spec in spectrum(300, 20)) {
        let g = field_transform(&spec);
        let lhs = g.iter().map(|c| c.norm_sqr()).sum::<f64>() * spec.modes() as f64;
        let rhs: f64 = spec.occupations().iter().map(|&n| (n * n) as f64).sum();
        prop_assert!((lhs - rhs).abs() < 1e-10 * rhs.max(1.0));
        let d = field_transform_direct(&spec);
        let f = field_transform_fft(&spec);
        for (a, b) in d.iter().zip(&f) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }
}

#[test]
fn bunching_approaches_two_as_inverse_ring_size() {
    for n in 1..=4u64 {
        let c = 1.0 + 1.0 / n as f64;
        let mut last = f64::INFINITY;
        for m in [8usize, 16, 32, 64, 128, 256, 512, 1024] {
            let gap = 2.0 - bunching_factor(&ModeSpectrum::uniform(m, n).unwrap()).unwrap();
            assert!(gap > 0.0 && gap < last);
            assert!((gap * m as f64 - c).abs() < 1e-9, "n={n} M={m}");
            last = gap;
        }
    }
}
