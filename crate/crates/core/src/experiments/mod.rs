//! Configured end-to-end experiments: preparation-error estimation, delay
//! scans of monotones, Pauli expectations, Ramsey fringes and Bell
//! concurrence, and the cosine fit used to extract drift frequencies.
//!
//! Grid points and repetitions run in parallel. Each draws its randomness
//! from a stream derived from the config seed and its own index, and rows
//! are assembled in grid order, so output depends only on the config.

mod config;
mod fit;
mod series;

pub use config::{
    slices_to_us, CompensationConfig, ExperimentConfig, ExperimentKind, NoiseConfig, NoisePreset, PerQubit, Source,
    TimeGrid, DEFAULT_PAULIS_PER_REP, DEFAULT_REPETITIONS,
};
pub use fit::{fit_cosine, CosineFit};
pub use series::{format_f64, PrepErrorResult, ScanRow, ScanSeries, SCAN_HEADER};

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::circuits::{
    apply_compensation, build_prep, build_ramsey, insert_delay, run, target_state, Circuit, StateFamily,
};
use crate::error::{Error, Result};
use crate::measure::{
    expectation_from_counts, measurement_distribution, readout_correct, sample_counts, CountsRecord,
    ExpectationEstimate,
};
use crate::monotones::{
    dfe_fidelity, exact_fidelity, mean_and_stderr, stabilizer_group, ExactSource, ExpectationSource, MonotoneName,
    PauliTermSet, SampledSource,
};
use crate::noise::{apply_confusion, NoiseModel, ReadoutMap};
use crate::qstate::{Pauli, PauliString, QuantumState};
use crate::rng::{derive_seed, rng_from};
use crate::State;

fn expect_kind(cfg: &ExperimentConfig, kinds: &[ExperimentKind]) -> Result<()> {
    if !kinds.contains(&cfg.experiment) {
        return Err(Error::InvalidConfig(format!("config is for {:?}", cfg.experiment)));
    }
    cfg.validate()
}

/// Runs whichever scan `cfg.experiment` names.
pub fn run_scan(cfg: &ExperimentConfig) -> Result<ScanSeries> {
    match cfg.experiment {
        ExperimentKind::MonotoneScan => monotone_time_scan(cfg),
        ExperimentKind::PauliScan => pauli_time_scan(cfg),
        ExperimentKind::RamseyScan => ramsey_scan(cfg),
        ExperimentKind::BellScan => bell_concurrence_scan(cfg),
        ExperimentKind::PrepError => Err(Error::InvalidConfig("prep-error is not a scan".into())),
    }
}

/// Final state and realized delay (µs) of one grid point.
struct Evolved {
    state: State,
    realized_us: f64,
}

fn evolve(circuit: &Circuit<f64>, model: &NoiseModel, comp: Option<&[f64]>, seed: u64) -> Result<Evolved> {
    let c = match comp {
        Some(f) => apply_compensation(circuit, f)?,
        None => circuit.clone(),
    };
    let state = run(&c, Some(model), seed)?;
    Ok(Evolved {
        state,
        realized_us: slices_to_us(c.delay_slices()),
    })
}

/// Counts in `basis` from `state`, with forward readout confusion when the
/// model has any.
fn sample_basis<R: Rng + ?Sized>(
    state: &State,
    basis: &PauliString,
    shots: u64,
    readout: &ReadoutMap,
    rng: &mut R,
) -> Result<CountsRecord> {
    let dist = measurement_distribution(state, basis)?;
    let dist = if readout.is_identity() {
        dist
    } else {
        apply_confusion(&dist, readout)?
    };
    sample_counts(&dist, basis, shots, rng)
}

fn estimate_from_record(rec: &CountsRecord, readout: Option<&ReadoutMap>) -> Result<ExpectationEstimate> {
    match readout {
        Some(map) if !map.is_identity() => Ok(readout_correct(rec, map)?.1),
        _ => expectation_from_counts(rec),
    }
}

/// Runs `f` for every grid time in parallel and concatenates the rows in
/// grid order.
fn scan_grid<F>(cfg: &ExperimentConfig, f: F) -> Result<ScanSeries>
where
    F: Fn(usize, f64) -> Result<Vec<ScanRow>> + Sync,
{
    let times = cfg.grid.times_us();
    let chunks = times
        .par_iter()
        .enumerate()
        .map(|(i, &t)| f(i, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanSeries::new(chunks.into_iter().flatten().collect()))
}

/// Prepares `cfg.family`, waits, optionally compensates, evolves under the
/// configured noise, and evaluates each requested monotone.
pub fn monotone_time_scan(cfg: &ExperimentConfig) -> Result<ScanSeries> {
    expect_kind(cfg, &[ExperimentKind::MonotoneScan, ExperimentKind::BellScan])?;
    let cfg = &bell_override(cfg);
    let model = cfg.noise_model()?;
    let comp = cfg.compensation.frequencies_hz(&model)?;
    let readout = model.readout_map()?;
    let prep = build_prep::<f64>(cfg.family, cfg.n)?;
    let sets: Vec<PauliTermSet> = cfg
        .monotones()
        .into_iter()
        .map(|m| PauliTermSet::for_name(m, cfg.e4b_variant))
        .collect();
    let bases = monotone_bases(cfg);
    let correction = cfg.readout_correction.then_some(&readout);

    scan_grid(cfg, |i, t_us| {
        let circuit = insert_delay(&prep, t_us * 1e-6)?;
        let ev = evolve(&circuit, &model, comp.as_deref(), derive_seed(cfg.seed, &[i as u64, 0]))?;
        let row = |quantity: MonotoneName, mode: &str, value: f64, stderr: f64| ScanRow {
            t_us,
            realized_t_us: ev.realized_us,
            family: cfg.family.to_string(),
            quantity: quantity.to_string(),
            mode: mode.to_string(),
            value,
            stderr,
        };
        match cfg.source {
            Source::Exact => sets
                .iter()
                .map(|s| {
                    let v = s.value_on_state(&ev.state, cfg.mode)?;
                    Ok(row(s.name(), cfg.mode.as_str(), v, 0.0))
                })
                .collect(),
            Source::Sampled => {
                let records: BTreeMap<String, CountsRecord> = sample_point(cfg, i, &ev, &bases, &readout)?
                    .into_iter()
                    .map(|r| (r.basis.label(), r))
                    .collect();
                sets.iter()
                    .enumerate()
                    .map(|(k, s)| {
                        let rep = s.report_from_counts(
                            &records,
                            correction,
                            cfg.bootstrap,
                            derive_seed(cfg.seed, &[i as u64, 2, k as u64]),
                        )?;
                        Ok(row(s.name(), rep.mode.as_str(), rep.value, rep.stderr))
                    })
                    .collect()
            }
        }
    })
}

/// Bases needed by the monotones of `cfg`, in first-use order.
fn monotone_bases(cfg: &ExperimentConfig) -> Vec<PauliString> {
    let mut bases: Vec<PauliString> = Vec::new();
    for m in cfg.monotones() {
        for b in PauliTermSet::for_name(m, cfg.e4b_variant).bases() {
            if !bases.contains(&b) {
                bases.push(b);
            }
        }
    }
    bases
}

fn sample_point(
    cfg: &ExperimentConfig,
    i: usize,
    ev: &Evolved,
    bases: &[PauliString],
    readout: &ReadoutMap,
) -> Result<Vec<CountsRecord>> {
    let mut rng = rng_from(cfg.seed, &[i as u64, 1]);
    bases
        .iter()
        .map(|b| {
            let mut rec = sample_basis(&ev.state, b, cfg.shots, readout, &mut rng)?;
            rec.delay_us = Some(ev.realized_us);
            Ok(rec)
        })
        .collect()
}

/// Counts records a sampled monotone scan of `cfg` measures: one per
/// basis per grid time, tagged with the realized delay. A sampled scan with
/// the same config draws exactly these counts.
pub fn synthesize_counts(cfg: &ExperimentConfig) -> Result<Vec<CountsRecord>> {
    expect_kind(cfg, &[ExperimentKind::MonotoneScan, ExperimentKind::BellScan])?;
    let cfg = bell_override(cfg);
    let model = cfg.noise_model()?;
    let comp = cfg.compensation.frequencies_hz(&model)?;
    let readout = model.readout_map()?;
    let prep = build_prep::<f64>(cfg.family, cfg.n)?;
    let bases = monotone_bases(&cfg);
    let per_point = cfg
        .grid
        .times_us()
        .par_iter()
        .enumerate()
        .map(|(i, &t_us)| {
            let circuit = insert_delay(&prep, t_us * 1e-6)?;
            let ev = evolve(&circuit, &model, comp.as_deref(), derive_seed(cfg.seed, &[i as u64, 0]))?;
            let mut recs = sample_point(&cfg, i, &ev, &bases, &readout)?;
            for r in &mut recs {
                r.metadata.insert("family".into(), cfg.family.to_string());
            }
            Ok(recs)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_point.into_iter().flatten().collect())
}

fn pauli_rows(
    cfg: &ExperimentConfig,
    circuit_at: impl Fn(f64) -> Result<Circuit<f64>> + Sync,
    pauli: &PauliString,
    family: &str,
) -> Result<ScanSeries> {
    let model = cfg.noise_model()?;
    let comp = cfg.compensation.frequencies_hz(&model)?;
    let readout = model.readout_map()?;
    let correction = cfg.readout_correction.then_some(&readout);
    scan_grid(cfg, |i, t_us| {
        let ev = evolve(
            &circuit_at(t_us)?,
            &model,
            comp.as_deref(),
            derive_seed(cfg.seed, &[i as u64, 0]),
        )?;
        let est = match cfg.source {
            Source::Exact => ExpectationEstimate::exact(ev.state.pauli_expectation(pauli)?),
            Source::Sampled => {
                let mut rng = rng_from(cfg.seed, &[i as u64, 1]);
                let rec = sample_basis(
                    &ev.state,
                    &pauli.clone().with_sign(false),
                    cfg.shots,
                    &readout,
                    &mut rng,
                )?;
                let e = estimate_from_record(&rec, correction)?;
                ExpectationEstimate {
                    value: e.value * pauli.sign::<f64>(),
                    ..e
                }
            }
        };
        Ok(vec![ScanRow {
            t_us,
            realized_t_us: ev.realized_us,
            family: family.to_string(),
            quantity: pauli.to_string(),
            mode: cfg.source.as_str().to_string(),
            value: est.value,
            stderr: est.stderr,
        }])
    })
}

/// `⟨P⟩(t)` after preparation and delay; `P = X^⊗n` unless configured.
pub fn pauli_time_scan(cfg: &ExperimentConfig) -> Result<ScanSeries> {
    expect_kind(cfg, &[ExperimentKind::PauliScan])?;
    let prep = build_prep::<f64>(cfg.family, cfg.n)?;
    pauli_rows(
        cfg,
        |t_us| insert_delay(&prep, t_us * 1e-6),
        &cfg.scan_pauli(),
        cfg.family.name(),
    )
}

/// `⟨Z⟩(t)` on `cfg.ramsey_qubit` for the sequence `Y90 · delay · Y−90`.
pub fn ramsey_scan(cfg: &ExperimentConfig) -> Result<ScanSeries> {
    expect_kind(cfg, &[ExperimentKind::RamseyScan])?;
    let mut ops = vec![Pauli::I; cfg.n];
    ops[cfg.ramsey_qubit] = Pauli::Z;
    let z = PauliString::new(ops);
    pauli_rows(
        cfg,
        |t_us| build_ramsey(cfg.n, cfg.ramsey_qubit, t_us * 1e-6),
        &z,
        "ramsey",
    )
}

/// Squared concurrence `⟨YY⟩²(t)` of a Bell pair.
pub fn bell_concurrence_scan(cfg: &ExperimentConfig) -> Result<ScanSeries> {
    expect_kind(cfg, &[ExperimentKind::BellScan])?;
    monotone_time_scan(cfg)
}

fn bell_override(cfg: &ExperimentConfig) -> ExperimentConfig {
    if cfg.experiment == ExperimentKind::BellScan {
        ExperimentConfig {
            family: StateFamily::Bell,
            quantities: vec![MonotoneName::C2],
            ..cfg.clone()
        }
    } else {
        cfg.clone()
    }
}

/// Runs `R` independent noisy preparations, scores each by direct fidelity
/// estimation with `k` random stabilizer Paulis, and reports the error
/// `1 − F̂` in percent.
pub fn prep_error_experiment(cfg: &ExperimentConfig) -> Result<PrepErrorResult> {
    expect_kind(cfg, &[ExperimentKind::PrepError])?;
    let model = cfg.noise_model()?;
    let readout = model.readout_map()?;
    let group = stabilizer_group(cfg.family, cfg.n)?;
    let prep = build_prep::<f64>(cfg.family, cfg.n)?;
    let target: QuantumState<f64> = target_state(cfg.family, cfg.n)?;

    let reps = (0..cfg.repetitions)
        .into_par_iter()
        .map(|r| {
            let rho = run(&prep, Some(&model), derive_seed(cfg.seed, &[r as u64, 0]))?;
            let mut rng = rng_from(cfg.seed, &[r as u64, 1]);
            let est = match cfg.source {
                Source::Exact => {
                    let src: &dyn ExpectationSource = &ExactSource { state: &rho };
                    dfe_fidelity(src, &group, cfg.paulis_per_rep, &mut rng)?
                }
                Source::Sampled => {
                    let src = SampledSource {
                        state: &rho,
                        shots: cfg.shots,
                        readout: (!readout.is_identity()).then(|| readout.clone()),
                        correct_readout: cfg.readout_correction,
                    };
                    dfe_fidelity(&src, &group, cfg.paulis_per_rep, &mut rng)?
                }
            };
            Ok((100.0 * est.error(), 100.0 * (1.0 - exact_fidelity(&rho, &target)?)))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;

    let per_rep: Vec<f64> = reps.iter().map(|r| r.0).collect();
    let (mean, stderr) = mean_and_stderr(&per_rep);
    Ok(PrepErrorResult {
        family: cfg.family.to_string(),
        n: cfg.n,
        mean_percent: mean,
        stderr_percent: stderr,
        exact_percent: reps.iter().map(|r| r.1).sum::<f64>() / reps.len() as f64,
        per_rep_percent: per_rep,
    })
}

/// Fits `A cos(2π f t)` to one quantity of a series, using realized times.
/// With `quantity = None` the series must hold exactly one quantity.
pub fn fit_series(series: &ScanSeries, quantity: Option<&str>) -> Result<CosineFit> {
    let names = series.quantity_names();
    let name = match quantity {
        Some(q) => q.to_string(),
        None if names.len() == 1 => names[0].clone(),
        None => {
            return Err(Error::DegenerateFit(format!(
                "series holds {} quantities ({}); pick one",
                names.len(),
                names.join(", ")
            )))
        }
    };
    let pts = series.points(&name);
    let t: Vec<f64> = pts.iter().map(|p| p.0 * 1e-6).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
    fit_cosine(&t, &y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotones::EvalMode;
    use approx::assert_abs_diff_eq;

    fn drift_cfg(fz_khz: f64) -> ExperimentConfig {
        ExperimentConfig {
            noise: NoiseConfig {
                fz_khz: Some(fz_khz),
                ..NoiseConfig::ideal()
            },
            grid: TimeGrid::new(0.0, 6.0, 31),
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn ghz3_drift_oscillates_with_half_period() {
        let s = monotone_time_scan(&drift_cfg(167.0)).unwrap();
        assert_eq!(s.len(), 31);
        assert_abs_diff_eq!(s.rows[0].value, 1.0, epsilon = 1e-12);
        for r in &s.rows {
            // only the XYY-type term of each row survives: E3 = cos²φ
            let phi = std::f64::consts::TAU * 167e3 * r.realized_t_us * 1e-6;
            assert_abs_diff_eq!(r.value, phi.cos().powi(2), epsilon = 1e-9);
        }
    }

    #[test]
    fn compensated_drift_scan_is_flat() {
        let mut cfg = drift_cfg(167.0);
        cfg.compensation.enabled = true;
        for r in monotone_time_scan(&cfg).unwrap().rows {
            assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn uniform_control_shows_spurious_e3_until_compensated() {
        let mut cfg = drift_cfg(167.0);
        cfg.family = StateFamily::Uniform;
        let raw = monotone_time_scan(&cfg).unwrap();
        assert!(raw.rows.iter().any(|r| r.value > 0.1));
        cfg.compensation.enabled = true;
        for r in monotone_time_scan(&cfg).unwrap().rows {
            assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn compensation_with_zero_drift_is_bit_identical() {
        let cfg = ExperimentConfig {
            source: Source::Sampled,
            bootstrap: 20,
            noise: NoiseConfig {
                fz_khz: Some(0.0),
                ..NoiseConfig::default()
            },
            grid: TimeGrid::new(0.0, 2.0, 4),
            ..ExperimentConfig::default()
        };
        let a = monotone_time_scan(&cfg).unwrap().to_csv_string();
        let mut comp = cfg.clone();
        comp.compensation.enabled = true;
        assert_eq!(a, monotone_time_scan(&comp).unwrap().to_csv_string());
    }

    #[test]
    fn bell_scan_matches_cos_squared() {
        let cfg = ExperimentConfig {
            experiment: ExperimentKind::BellScan,
            family: StateFamily::Bell,
            n: 2,
            noise: NoiseConfig {
                fz_khz: Some(115.0),
                ..NoiseConfig::ideal()
            },
            grid: TimeGrid::new(0.0, 5.0, 11),
            ..ExperimentConfig::default()
        };
        for r in bell_concurrence_scan(&cfg).unwrap().rows {
            let phi = std::f64::consts::TAU * 115e3 * r.realized_t_us * 1e-6;
            assert_abs_diff_eq!(r.value, phi.cos().powi(2), epsilon = 1e-12);
            assert_eq!(r.quantity, "C2");
        }
        let exact = ExperimentConfig {
            mode: EvalMode::ExactAntilinear,
            ..cfg
        };
        for r in bell_concurrence_scan(&exact).unwrap().rows {
            assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn ramsey_scans() {
        let mut cfg = ExperimentConfig {
            experiment: ExperimentKind::RamseyScan,
            n: 2,
            ramsey_qubit: 1,
            noise: NoiseConfig::ideal(),
            grid: TimeGrid::new(0.0, 4.0, 9),
            ..ExperimentConfig::default()
        };
        for r in ramsey_scan(&cfg).unwrap().rows {
            assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
            assert_eq!(r.quantity, "IZ");
        }
        cfg.noise.drift_khz = Some(PerQubit::Each(vec![0.0, 57.0]));
        for r in ramsey_scan(&cfg).unwrap().rows {
            let phi = std::f64::consts::TAU * 57e3 * r.realized_t_us * 1e-6;
            assert_abs_diff_eq!(r.value, phi.cos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn pauli_scan_and_fit() {
        let cfg = ExperimentConfig {
            experiment: ExperimentKind::PauliScan,
            n: 4,
            source: Source::Sampled,
            noise: NoiseConfig {
                fz_khz: Some(238.0),
                ..NoiseConfig::ideal()
            },
            grid: TimeGrid::new(0.0, 10.0, 50),
            ..ExperimentConfig::default()
        };
        let s = pauli_time_scan(&cfg).unwrap();
        assert_eq!(s.rows[0].quantity, "XXXX");
        let fit = fit_series(&s, None).unwrap();
        assert!((fit.f_hat_hz / 238e3 - 1.0).abs() < 0.01, "{fit:?}");
    }

    #[test]
    fn noiseless_prep_error_is_zero() {
        let cfg = ExperimentConfig {
            experiment: ExperimentKind::PrepError,
            noise: NoiseConfig::ideal(),
            source: Source::Sampled,
            repetitions: 4,
            ..ExperimentConfig::default()
        };
        let r = prep_error_experiment(&cfg).unwrap();
        assert_eq!(r.per_rep_percent.len(), 4);
        assert_eq!(r.mean_percent, 0.0);
        assert_eq!(r.stderr_percent, 0.0);
        assert!(r.exact_percent.abs() < 1e-10);
    }

    #[test]
    fn wrong_kind_rejected() {
        assert!(pauli_time_scan(&ExperimentConfig::default()).is_err());
        assert!(prep_error_experiment(&ExperimentConfig::default()).is_err());
    }
}
