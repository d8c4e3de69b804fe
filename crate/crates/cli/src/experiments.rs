use fockfluct_core::bipartite::{self, number_statistics, GeometricAmplitudeSpec, Side};
use fockfluct_core::thermal::{self, ThermalModeSpec};
use fockfluct_core::{multimode, Error as CoreError};
use rayon::prelude::*;

use crate::config::{BipartiteParams, MultimodeParams, ThermalParams};
use crate::output::{col, Cell, Column, Table};
use crate::CliError;

const THERMAL_COLUMNS: [Column; 12] = [
    col("beta_omega", "1"),
    col("mean", "quanta"),
    col("second_moment", "quanta^2"),
    col("variance", "quanta^2"),
    col("wave_term", "quanta^2"),
    col("particle_term", "quanta^2"),
    col("dmax", "quanta"),
    col("tail_deficit", "probability"),
    col("truncated_mean", "quanta"),
    col("truncated_variance", "quanta^2"),
    col("mean_energy", "energy"),
    col("energy_variance", "energy^2"),
];

pub fn run_thermal(params: &ThermalParams) -> Result<Vec<Table>, CliError> {
    let grid = params.beta_omega.values("beta_omega")?;
    let rows: Result<Vec<Vec<Cell>>, CoreError> = grid
        .par_iter()
        .map(|&x| {
            let spec = ThermalModeSpec::new(x / params.omega, params.omega)?;
            let closed = thermal::thermal_dispersion(&spec);
            let truncated = thermal::thermal_distribution(&spec, params.tail_tol)?;
            let dist = &truncated.distribution;
            Ok(vec![
                x.into(),
                closed.mean.into(),
                closed.second_moment.into(),
                closed.variance.into(),
                closed.wave_term.into(),
                closed.particle_term.into(),
                truncated.dmax().into(),
                dist.deficit().into(),
                dist.mean().into(),
                dist.variance().into(),
                thermal::mean_energy(&spec, params.zero_point).into(),
                closed.energy_variance().into(),
            ])
        })
        .collect();
    let mut table = Table::new("thermal", &THERMAL_COLUMNS);
    rows?.into_iter().for_each(|r| table.push(r));
    Ok(vec![table])
}

const BIPARTITE_COLUMNS: [Column; 10] = [
    col("a", "1"),
    col("n_total", "quanta"),
    col("mean", "quanta"),
    col("variance", "quanta^2"),
    col("einstein_deviation", "quanta^2"),
    col("beta_eff", "1/energy"),
    col("var_total", "quanta^2"),
    col("entanglement_measure", "quanta^2"),
    col("entanglement_entropy", "nats"),
    col("max_coherence", "1"),
];

pub fn run_bipartite(params: &BipartiteParams) -> Result<Vec<Table>, CliError> {
    let a_grid = params.a.values("a")?;
    if params.n.is_empty() {
        return Err(CliError::Config("grid n is empty".into()));
    }
    if !(params.omega > 0.0 && params.omega.is_finite()) {
        return Err(CliError::Config(format!(
            "omega must be positive, got {}",
            params.omega
        )));
    }
    let points: Vec<(f64, usize)> = a_grid
        .iter()
        .flat_map(|&a| params.n.iter().map(move |&n| (a, n)))
        .collect();
    let rows: Result<Vec<Vec<Cell>>, CoreError> = points
        .par_iter()
        .map(|&(a, n)| {
            let state = bipartite::geometric_state(&GeometricAmplitudeSpec::new(a, n)?);
            let reduced = bipartite::reduced_occupation(&state, Side::A);
            let local = bipartite::local_dispersion(&reduced.distribution);
            let beta_eff = match bipartite::effective_temperature(&reduced.distribution, params.omega) {
                Ok(b) => Some(b),
                Err(CoreError::UndefinedTemperature(_)) => None,
                Err(e) => return Err(e),
            };
            let stats = number_statistics(&state);
            Ok(vec![
                a.into(),
                n.into(),
                local.mean.into(),
                local.variance.into(),
                local.einstein_deviation.into(),
                beta_eff.into(),
                stats.var_total.into(),
                bipartite::entanglement_measure(&state).into(),
                bipartite::entanglement_entropy(&state).into(),
                reduced.max_off_diagonal.into(),
            ])
        })
        .collect();
    let mut table = Table::new("bipartite", &BIPARTITE_COLUMNS);
    rows?.into_iter().for_each(|r| table.push(r));
    Ok(vec![table])
}

const CORRELATION_COLUMNS: [Column; 4] = [
    col("separation", "sites"),
    col("g2", "quanta^2"),
    col("coherence", "quanta^2"),
    col("finite_size_correction", "quanta^2"),
];

const SUMMARY_COLUMNS: [Column; 6] = [
    col("modes", "count"),
    col("total", "quanta"),
    col("density", "quanta"),
    col("finite_size_correction", "quanta^2"),
    col("g2_coincident", "quanta^2"),
    col("bunching_factor", "1"),
];

const REGION_COLUMNS: [Column; 7] = [
    col("region", "-"),
    col("sites", "count"),
    col("mean", "quanta"),
    col("variance", "quanta^2"),
    col("wave_contribution", "quanta^2"),
    col("finite_size_correction", "quanta^2"),
    col("particle_contribution", "quanta^2"),
];

pub fn run_multimode(params: &MultimodeParams) -> Result<Vec<Table>, CliError> {
    let spec = params.spectrum()?;
    let regions = params
        .regions
        .iter()
        .map(|r| r.resolve(spec.modes()))
        .collect::<Result<Vec<_>, _>>()?;
    if regions.is_empty() {
        return Err(CliError::Config("regions list is empty".into()));
    }

    let map = multimode::pair_correlation(&spec);
    let mut correlation = Table::new("correlation", &CORRELATION_COLUMNS);
    for r in 0..spec.modes() {
        correlation.push(vec![
            r.into(),
            map.at_separation(r).into(),
            map.coherence()[r].into(),
            map.finite_size_correction().into(),
        ]);
    }

    let bunching = match multimode::bunching_factor(&spec) {
        Ok(b) => Some(b),
        Err(CoreError::InvalidParameter(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let mut summary = Table::new("summary", &SUMMARY_COLUMNS);
    summary.push(vec![
        spec.modes().into(),
        spec.total().into(),
        spec.density().into(),
        spec.finite_size_correction().into(),
        map.at_separation(0).into(),
        bunching.into(),
    ]);

    let reports = regions
        .par_iter()
        .map(|region| multimode::subvolume_variance(&spec, region))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new("regions", &REGION_COLUMNS);
    for (label, report) in params.regions.iter().zip(&reports) {
        table.push(vec![
            label.to_string().into(),
            report.sites.into(),
            report.dispersion.mean.into(),
            report.variance().into(),
            report.wave_contribution.into(),
            report.finite_size_correction.into(),
            report.particle_contribution.into(),
        ]);
    }
    Ok(vec![summary, correlation, table])
}
