//! Direct fidelity estimation against stabilizer targets.
//!
//! For a stabilizer state `|ψ⟩` with group `S`,
//! `F = ⟨ψ|ρ|ψ⟩ = 2^{−n} Σ_{P∈S} tr(ρP)`, so the mean of `tr(ρP)` over
//! uniformly drawn group elements is an unbiased fidelity estimate.

use rand::{Rng, RngCore};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{
    expectation_from_counts, measurement_distribution, readout_correct, sample_counts, ExpectationEstimate,
};
use crate::monotones::StabilizerGroup;
use crate::noise::{apply_confusion, ReadoutMap};
use crate::qstate::{PauliString, QuantumState};
use crate::scalar::Real;

/// Anything that can produce an estimate of `⟨P⟩` for the prepared state.
pub trait ExpectationSource {
    fn n_qubits(&self) -> usize;
    fn estimate(&self, p: &PauliString, rng: &mut dyn RngCore) -> Result<ExpectationEstimate>;
}

/// Noise-free `tr(ρP)` straight from the simulated state.
#[derive(Debug, Clone, Copy)]
pub struct ExactSource<'a, T> {
    pub state: &'a QuantumState<T>,
}

impl<T: Real> ExpectationSource for ExactSource<'_, T> {
    fn n_qubits(&self) -> usize {
        self.state.n_qubits()
    }

    fn estimate(&self, p: &PauliString, _rng: &mut dyn RngCore) -> Result<ExpectationEstimate> {
        Ok(ExpectationEstimate::exact(self.state.pauli_expectation(p)?.as_f64()))
    }
}

/// Finite-shot parity estimates, optionally passed through a readout
/// confusion map and, when `correct_readout` is set, corrected with its
/// inverse.
#[derive(Debug, Clone)]
pub struct SampledSource<'a, T> {
    pub state: &'a QuantumState<T>,
    pub shots: u64,
    pub readout: Option<ReadoutMap>,
    pub correct_readout: bool,
}

impl<T: Real> ExpectationSource for SampledSource<'_, T> {
    fn n_qubits(&self) -> usize {
        self.state.n_qubits()
    }

    fn estimate(&self, p: &PauliString, rng: &mut dyn RngCore) -> Result<ExpectationEstimate> {
        let dist = measurement_distribution(self.state, p)?;
        match self.readout.as_ref().filter(|m| !m.is_identity()) {
            Some(map) => {
                let confused = apply_confusion(&dist, map)?;
                let rec = sample_counts(&confused, p, self.shots, rng)?;
                if self.correct_readout {
                    Ok(readout_correct(&rec, map)?.1)
                } else {
                    expectation_from_counts(&rec)
                }
            }
            None => expectation_from_counts(&sample_counts(&dist, p, self.shots, rng)?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityEstimate {
    pub fidelity: f64,
    pub stderr: f64,
    /// Per-draw `s · ⟨P⟩` values.
    pub terms: Vec<f64>,
}

impl FidelityEstimate {
    /// Preparation error `1 − F`.
    pub fn error(&self) -> f64 {
        1.0 - self.fidelity
    }
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn exact_fidelity<T: Real>(rho: &QuantumState<T>, target: &QuantumState<T>) -> Result<f64> {
    Ok(rho.fidelity_with_pure(target)?.as_f64())
}

/// Average of `s · ⟨P⟩` over the whole group.
pub fn full_group_fidelity(
    source: &dyn ExpectationSource,
    group: &StabilizerGroup,
    rng: &mut dyn RngCore,
) -> Result<f64> {
    check_source(source, group)?;
    let mut acc = 0.0;
    for p in group.elements() {
        acc += source.estimate(p, rng)?.value;
    }
    Ok(acc / group.len() as f64)
}

/// Draws `k` group elements uniformly with replacement and returns the
/// sample mean of their expectations with its standard error.
pub fn dfe_fidelity(
    source: &dyn ExpectationSource,
    group: &StabilizerGroup,
    k: usize,
    rng: &mut dyn RngCore,
) -> Result<FidelityEstimate> {
    check_source(source, group)?;
    if k == 0 {
        return Err(Error::InvalidParameter("need at least one Pauli per estimate".into()));
    }
    let mut terms = Vec::with_capacity(k);
    for _ in 0..k {
        let idx = rng.random_range(0..group.len());
        terms.push(source.estimate(&group.elements()[idx], rng)?.value);
    }
    let (fidelity, stderr) = mean_and_stderr(&terms);
    Ok(FidelityEstimate {
        fidelity,
        stderr,
        terms,
    })
}

fn check_source(source: &dyn ExpectationSource, group: &StabilizerGroup) -> Result<()> {
    if source.n_qubits() != group.n_qubits() {
        return Err(Error::QubitCountMismatch {
            expected: group.n_qubits(),
            got: source.n_qubits(),
        });
    }
    Ok(())
}

/// Sample mean and standard error (`n − 1` variance; zero for one sample).
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{build_prep, run, target_state, StateFamily};
    use crate::monotones::stabilizer_group;
    use crate::noise::NoiseModel;
    use crate::rng::rng_from;

    #[test]
    fn ideal_ghz_has_unit_fidelity() {
        let psi = target_state::<f64>(StateFamily::Ghz, 3).unwrap();
        let group = stabilizer_group(StateFamily::Ghz, 3).unwrap();
        let src = ExactSource { state: &psi };
        let mut rng = rng_from(1, &[]);
        for k in [1, 4, 16] {
            let est = dfe_fidelity(&src, &group, k, &mut rng).unwrap();
            assert!((est.fidelity - 1.0).abs() < 1e-12);
            assert!(est.error().abs() < 1e-12);
        }
        assert!(dfe_fidelity(&src, &group, 0, &mut rng).is_err());
    }

    #[test]
    fn mismatched_group_rejected() {
        let psi = target_state::<f64>(StateFamily::Ghz, 3).unwrap();
        let group = stabilizer_group(StateFamily::Ghz, 4).unwrap();
        assert!(full_group_fidelity(&ExactSource { state: &psi }, &group, &mut rng_from(0, &[])).is_err());
    }

    #[test]
    fn sampled_source_tracks_exact_fidelity() {
        let model = NoiseModel::ideal(3).with_cnot_depolarizing(0.05);
        let rho = run(&build_prep::<f64>(StateFamily::Ghz, 3).unwrap(), Some(&model), 0).unwrap();
        let target = target_state(StateFamily::Ghz, 3).unwrap();
        let exact = exact_fidelity(&rho, &target).unwrap();
        let group = stabilizer_group(StateFamily::Ghz, 3).unwrap();
        let src = SampledSource {
            state: &rho,
            shots: 8000,
            readout: None,
            correct_readout: false,
        };
        let est = full_group_fidelity(&src, &group, &mut rng_from(3, &[])).unwrap();
        assert!((est - exact).abs() < 0.02);
    }
}
