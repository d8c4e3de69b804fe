use std::f64::consts::LN_2;

use fockfluct_core::bipartite::{self, number_statistics, BipartitePureState, GeometricAmplitudeSpec};
use fockfluct_core::oracle::{self, DenseFockSpace, OracleConfig};
use fockfluct_core::thermal::{self, ThermalModeSpec};
use fockfluct_core::{multimode, Complex64, DenseState, Error as CoreError, ModeSpectrum, Region};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Check, VerifyParams};
use crate::output::{col, Cell, Column, Table};
use crate::CliError;

const COLUMNS: [Column; 7] = [
    col("check", "-"),
    col("instance", "-"),
    col("quantity", "-"),
    col("closed_form", "varies"),
    col("oracle", "varies"),
    col("abs_diff", "varies"),
    col("verdict", "-"),
];

const SUMMARY_COLUMNS: [Column; 4] = [
    col("checks", "count"),
    col("passed", "count"),
    col("failed", "count"),
    col("skipped", "count"),
];

const BIPARTITE_A: [f64; 5] = [0.1, 0.5, LN_2, 1.0, 2.5];
const BIPARTITE_MAX_TOTAL: usize = 12;
const THERMAL_POINTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Outcome {
    Compared { closed: f64, oracle: f64 },
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq)]
struct Row {
    check: Check,
    instance: String,
    quantity: String,
    outcome: Outcome,
}

impl Row {
    fn compared(
        check: Check,
        instance: impl Into<String>,
        quantity: impl Into<String>,
        closed: f64,
        oracle: f64,
    ) -> Self {
        Row {
            check,
            instance: instance.into(),
            quantity: quantity.into(),
            outcome: Outcome::Compared { closed, oracle },
        }
    }

    fn skipped(check: Check, instance: impl Into<String>, reason: &CoreError) -> Self {
        Row {
            check,
            instance: instance.into(),
            quantity: String::new(),
            outcome: Outcome::Skipped(reason.to_string()),
        }
    }
}

/// Result of a verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutcome {
    pub tables: Vec<Table>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

pub fn run_verify(params: &VerifyParams, seed: u64) -> Result<VerifyOutcome, CliError> {
    params.validate()?;
    let mut checks = params.checks.clone();
    checks.dedup();
    let mut rows = Vec::new();
    for &check in &checks {
        rows.extend(run_check(check, params, seed)?);
    }

    let mut table = Table::new("verify", &COLUMNS);
    let (mut passed, mut failed, mut skipped) = (0, 0, 0);
    for row in rows {
        let (closed, oracle, diff, verdict, quantity) = match row.outcome {
            Outcome::Compared { closed, oracle } => {
                let diff = (closed - oracle).abs();
                let verdict = if diff <= params.tolerance {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                };
                (
                    Cell::Real(closed),
                    Cell::Real(oracle),
                    Cell::Real(diff),
                    verdict,
                    row.quantity,
                )
            }
            Outcome::Skipped(reason) => (Cell::Missing, Cell::Missing, Cell::Missing, Verdict::Skipped, reason),
        };
        match verdict {
            Verdict::Pass => passed += 1,
            Verdict::Fail => failed += 1,
            Verdict::Skipped => skipped += 1,
        }
        table.push(vec![
            row.check.name().into(),
            row.instance.into(),
            quantity.into(),
            closed,
            oracle,
            diff,
            verdict.as_str().into(),
        ]);
    }
    let mut summary = Table::new("summary", &SUMMARY_COLUMNS);
    summary.push(vec![
        table.rows.len().into(),
        passed.into(),
        failed.into(),
        skipped.into(),
    ]);
    Ok(VerifyOutcome {
        tables: vec![summary, table],
        passed,
        failed,
        skipped,
    })
}

fn run_check(check: Check, params: &VerifyParams, seed: u64) -> Result<Vec<Row>, CliError> {
    match check {
        Check::Thermal => thermal_rows(),
        Check::Bipartite => bipartite_rows(),
        Check::FourthMoment | Check::PairCorrelation | Check::Subvolume => {
            let spectra = enumerated_spectra(params)?;
            let rows: Vec<Vec<Row>> = spectra
                .par_iter()
                .map(|spec| spectrum_rows(check, spec))
                .collect::<Result<_, _>>()?;
            Ok(rows.into_iter().flatten().collect())
        }
        Check::ScaledSubvolume => scaled_rows(),
        Check::CoincidentGap => coincident_rows(params.max_occupation),
        Check::ProductNullity => product_rows(params.random_states, seed),
        Check::GlobalStillness => stillness_rows(params, seed),
    }
}

/// Capacity errors become skip rows; anything else aborts the run.
fn or_skip(check: Check, instance: &str, result: Result<Vec<Row>, CoreError>) -> Result<Vec<Row>, CliError> {
    match result {
        Ok(rows) => Ok(rows),
        Err(e @ CoreError::Capacity { .. }) => Ok(vec![Row::skipped(check, instance, &e)]),
        Err(e) => Err(e.into()),
    }
}

fn thermal_rows() -> Result<Vec<Row>, CliError> {
    let points: Vec<f64> = (0..THERMAL_POINTS)
        .map(|k| 0.05 + (5.0 - 0.05) * k as f64 / (THERMAL_POINTS - 1) as f64)
        .collect();
    let rows: Vec<Vec<Row>> = points
        .par_iter()
        .map(|&x| {
            let instance = format!("beta_omega={x:.4}");
            let result = (|| {
                let closed = thermal::thermal_dispersion(&ThermalModeSpec::from_reduced(x)?);
                let rho = oracle::thermal_density_matrix(x, oracle::thermal_cutoff(x)?)?;
                let (mean, second) = oracle::oracle_number_moments(&rho)?;
                Ok(vec![
                    Row::compared(Check::Thermal, &instance, "mean", closed.mean, mean),
                    Row::compared(
                        Check::Thermal,
                        &instance,
                        "variance",
                        closed.variance,
                        second - mean * mean,
                    ),
                    Row::compared(
                        Check::Thermal,
                        &instance,
                        "variance - (mean^2 + mean)",
                        closed.variance - (closed.wave_term + closed.particle_term),
                        second - mean * mean - (mean * mean + mean),
                    ),
                ])
            })();
            or_skip(Check::Thermal, &instance, result)
        })
        .collect::<Result<_, _>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn bipartite_rows() -> Result<Vec<Row>, CliError> {
    let points: Vec<(f64, usize)> = BIPARTITE_A
        .iter()
        .flat_map(|&a| (0..=BIPARTITE_MAX_TOTAL).map(move |n| (a, n)))
        .collect();
    let rows: Vec<Vec<Row>> = points
        .par_iter()
        .map(|&(a, n)| {
            let instance = format!("a={a:.4} N={n}");
            let result = (|| {
                let state = bipartite::geometric_state(&GeometricAmplitudeSpec::new(a, n)?);
                let dense = state.to_dense()?;
                let ora = oracle::oracle_bipartite_statistics(&dense)?;
                let stats = number_statistics(&state);
                let c = Check::Bipartite;
                Ok(vec![
                    Row::compared(c, &instance, "var_a", stats.var_a, ora.var_a),
                    Row::compared(c, &instance, "var_total", stats.var_total, ora.var_total),
                    Row::compared(
                        c,
                        &instance,
                        "measure",
                        bipartite::entanglement_measure(&state),
                        ora.measure(),
                    ),
                    Row::compared(
                        c,
                        &instance,
                        "entropy",
                        bipartite::entanglement_entropy(&state),
                        oracle::oracle_entropy(&dense, 0)?,
                    ),
                ])
            })();
            or_skip(Check::Bipartite, &instance, result)
        })
        .collect::<Result<_, _>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn enumerated_spectra(params: &VerifyParams) -> Result<Vec<ModeSpectrum>, CliError> {
    let base = params.max_occupation + 1;
    let mut out = Vec::new();
    for m in 1..=params.max_modes {
        for code in 0..base.pow(m as u32) {
            let mut c = code;
            let occ = (0..m)
                .map(|_| {
                    let n = c % base;
                    c /= base;
                    n
                })
                .collect();
            out.push(ModeSpectrum::new(occ)?);
        }
    }
    for doc in &params.extra_spectra {
        out.push(ModeSpectrum::try_from(doc.clone()).map_err(|e| CliError::Config(format!("extra_spectra: {e}")))?);
    }
    Ok(out)
}

fn product_state(spec: &ModeSpectrum) -> Result<(DenseState, DenseFockSpace), CoreError> {
    let state = oracle::build_product_state(spec, &OracleConfig::for_spectrum(spec)?)?;
    let space = DenseFockSpace::for_state(&state)?;
    Ok((state, space))
}

/// Keeps the first entry with the largest difference.
fn worst<I: IntoIterator<Item = (String, f64, f64)>>(entries: I) -> Option<(String, f64, f64)> {
    let mut best: Option<(String, f64, f64)> = None;
    for (label, closed, dense) in entries {
        let diff = (closed - dense).abs();
        let better = match &best {
            None => true,
            Some((_, c, d)) => diff > (c - d).abs(),
        };
        if better {
            best = Some((label, closed, dense));
        }
    }
    best
}

fn all_regions(m: usize) -> Vec<Region> {
    (1u64..(1 << m))
        .map(|mask| Region::new((0..m).filter(|x| mask & (1 << x) != 0), m).expect("nonempty mask"))
        .collect()
}

fn region_label(region: &Region) -> String {
    let sites: Vec<String> = region.sites().iter().map(|s| s.to_string()).collect();
    format!("{{{}}}", sites.join(" "))
}

fn spectrum_rows(check: Check, spec: &ModeSpectrum) -> Result<Vec<Row>, CliError> {
    let instance = spec.to_string();
    let m = spec.modes();
    let result = (|| {
        let (state, space) = product_state(spec)?;
        let entry = match check {
            Check::FourthMoment => {
                let dense = space.fourth_moment_tensor(&state)?;
                let mut entries = Vec::with_capacity(m.pow(4));
                for p in 0..m {
                    for q in 0..m {
                        for q2 in 0..m {
                            for p2 in 0..m {
                                let closed = multimode::fourth_moment(spec, p, q, q2, p2)?.exact;
                                let index = ((p * m + q) * m + q2) * m + p2;
                                entries.push((format!("F({p},{q},{q2},{p2})"), closed, dense[index]));
                            }
                        }
                    }
                }
                worst(entries)
            }
            Check::PairCorrelation => {
                let map = multimode::pair_correlation(spec);
                let dense = oracle::oracle_pair_correlation_map(&state, m)?;
                worst((0..m).flat_map(|x| {
                    let (map, dense) = (&map, &dense);
                    (0..m).map(move |y| (format!("G2({x},{y})"), map.value(x, y), dense[x][y]))
                }))
            }
            Check::Subvolume => {
                let mut entries = Vec::new();
                for region in all_regions(m) {
                    let closed = multimode::subvolume_variance(spec, &region)?.variance();
                    let dense = oracle::oracle_subvolume_variance(&state, m, &region)?;
                    entries.push((format!("Var(N_V) V={}", region_label(&region)), closed, dense));
                }
                worst(entries)
            }
            _ => unreachable!("not a spectrum check"),
        };
        Ok(entry
            .map(|(quantity, closed, dense)| Row::compared(check, &instance, quantity, closed, dense))
            .into_iter()
            .collect())
    })();
    or_skip(check, &instance, result)
}

fn scaled_rows() -> Result<Vec<Row>, CliError> {
    let spec = ModeSpectrum::new(vec![3, 0, 0, 0])?;
    let instance = spec.to_string();
    let result = (|| {
        let (state, _) = product_state(&spec)?;
        (0..4)
            .map(|site| {
                let region = Region::new([site], 4)?;
                let closed = multimode::subvolume_variance(&spec, &region)?.variance();
                let dense = oracle::oracle_subvolume_variance(&state, 4, &region)?;
                let quantity = format!("Var(N_V) V={}", region_label(&region));
                Ok(Row::compared(
                    Check::ScaledSubvolume,
                    &instance,
                    quantity,
                    closed,
                    dense,
                ))
            })
            .collect()
    })();
    or_skip(Check::ScaledSubvolume, &instance, result)
}

fn coincident_rows(max_occupation: u64) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    for n in 1..=max_occupation.max(3) {
        let spec = ModeSpectrum::new(vec![n])?;
        let instance = spec.to_string();
        let result = (|| {
            let (state, _) = product_state(&spec)?;
            let f = multimode::fourth_moment(&spec, 0, 0, 0, 0)?;
            let dense = oracle::oracle_fourth_moment(&state, 0, 0, 0, 0)?;
            Ok(vec![
                Row::compared(Check::CoincidentGap, &instance, "F(0,0,0,0)", f.exact, dense),
                Row::compared(
                    Check::CoincidentGap,
                    &instance,
                    "approximate - exact",
                    f.gap(),
                    f.approximate - dense,
                ),
            ])
        })();
        rows.extend(or_skip(Check::CoincidentGap, &instance, result)?);
    }
    Ok(rows)
}

fn random_amplitudes(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..len)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        if v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3 {
            return v;
        }
    }
}

fn product_rows(count: usize, seed: u64) -> Result<Vec<Row>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factors: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..count)
        .map(|_| {
            let (da, db) = (rng.random_range(1..=5), rng.random_range(1..=5));
            (random_amplitudes(&mut rng, da), random_amplitudes(&mut rng, db))
        })
        .collect();
    let rows: Vec<Vec<Row>> = factors
        .par_iter()
        .enumerate()
        .map(|(k, (alpha, beta))| {
            let instance = format!("#{k} dims=({},{})", alpha.len(), beta.len());
            let result = (|| {
                let state = BipartitePureState::product(alpha, beta)?;
                let dense = state.to_dense()?;
                let ora = oracle::oracle_bipartite_statistics(&dense)?;
                Ok(vec![
                    Row::compared(
                        Check::ProductNullity,
                        &instance,
                        "measure",
                        bipartite::entanglement_measure(&state),
                        ora.measure(),
                    ),
                    Row::compared(
                        Check::ProductNullity,
                        &instance,
                        "entropy",
                        bipartite::entanglement_entropy(&state),
                        oracle::oracle_entropy(&dense, 0)?,
                    ),
                ])
            })();
            or_skip(Check::ProductNullity, &instance, result)
        })
        .collect::<Result<_, _>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn stillness_rows(params: &VerifyParams, seed: u64) -> Result<Vec<Row>, CliError> {
    // A separate stream, so adding states to the nullity check leaves these spectra alone.
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5851_f42d_4c95_7f2d);
    let cases: Vec<(ModeSpectrum, Option<Region>)> = (0..params.random_spectra)
        .map(|_| {
            let m = rng.random_range(1..=params.max_modes);
            let occ: Vec<u64> = (0..m).map(|_| rng.random_range(0..=params.max_occupation)).collect();
            let spec = ModeSpectrum::new(occ)?;
            let region = if m > 1 {
                let mask = rng.random_range(1u64..(1 << m) - 1);
                Some(Region::new((0..m).filter(|x| mask & (1 << x) != 0), m)?)
            } else {
                None
            };
            Ok((spec, region))
        })
        .collect::<Result<_, CoreError>>()?;
    let rows: Vec<Vec<Row>> = cases
        .par_iter()
        .enumerate()
        .map(|(k, (spec, region))| {
            let instance = format!("#{k} {spec}");
            let m = spec.modes();
            let result = (|| {
                let (state, _) = product_state(spec)?;
                let full = Region::full(m)?;
                let mut rows = vec![Row::compared(
                    Check::GlobalStillness,
                    &instance,
                    "Var(N_total)",
                    multimode::subvolume_variance(spec, &full)?.variance(),
                    oracle::oracle_subvolume_variance(&state, m, &full)?,
                )];
                if let Some(region) = region {
                    let rest = region.complement().expect("proper region");
                    rows.push(Row::compared(
                        Check::GlobalStillness,
                        &instance,
                        format!("Var(N_V) V={} vs complement", region_label(region)),
                        multimode::subvolume_variance(spec, region)?.variance(),
                        oracle::oracle_subvolume_variance(&state, m, &rest)?,
                    ));
                }
                Ok(rows)
            })();
            or_skip(Check::GlobalStillness, &instance, result)
        })
        .collect::<Result<_, _>>()?;
    Ok(rows.into_iter().flatten().collect())
}
