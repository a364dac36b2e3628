//! Squared-expectation entanglement monotones for three and four qubits,
//! the two-qubit concurrence, stabilizer groups and direct fidelity
//! estimation.
//!
//! Every monotone here has the form `norm · |Σ_k s_k ⟨P_k 𝒞⟩²|`. In
//! exact-antilinear mode `⟨P𝒞⟩ = ψᵀPψ` is complex and squared as a complex
//! number, which keeps the combination invariant under local unitaries.
//! In the real approximation the plain expectation `tr(ρP)` stands in for
//! it; the two agree on states with real amplitudes.

mod dfe;
mod stabilizer;

pub use dfe::{
    dfe_fidelity, exact_fidelity, full_group_fidelity, mean_and_stderr, ExactSource, ExpectationSource,
    FidelityEstimate, SampledSource,
};
pub use stabilizer::{generators, stabilizer_group, StabilizerGroup};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{expectation_from_counts, readout_correct, sample_counts, CountsRecord};
use crate::noise::ReadoutMap;
use crate::qstate::PauliString;
use crate::rng::rng_from;
use crate::scalar::{czero, Real, C};

/// Slack allowed on real-approximation inputs beyond `[−1, 1]`, which
/// readout correction and finite sampling can push slightly outside.
pub const INPUT_SLACK: f64 = 0.25;

pub const DEFAULT_BOOTSTRAP: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MonotoneName {
    #[serde(alias = "e3")]
    E3,
    #[serde(alias = "e4a")]
    E4a,
    #[serde(alias = "e4b")]
    E4b,
    #[serde(alias = "c2")]
    C2,
}

impl MonotoneName {
    pub fn as_str(self) -> &'static str {
        match self {
            MonotoneName::E3 => "E3",
            MonotoneName::E4a => "E4a",
            MonotoneName::E4b => "E4b",
            MonotoneName::C2 => "C2",
        }
    }

    pub fn n_qubits(self) -> usize {
        match self {
            MonotoneName::E3 => 3,
            MonotoneName::E4a | MonotoneName::E4b => 4,
            MonotoneName::C2 => 2,
        }
    }
}

impl fmt::Display for MonotoneName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MonotoneName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e3" => Ok(MonotoneName::E3),
            "e4a" => Ok(MonotoneName::E4a),
            "e4b" => Ok(MonotoneName::E4b),
            "c2" | "concurrence" => Ok(MonotoneName::C2),
            _ => Err(Error::InvalidParameter(format!("unknown monotone {s:?}"))),
        }
    }
}

/// Which term list to use for `E4b`. `Verbatim` keeps the printed list,
/// whose first row repeats `ZYZY` in place of `XYZY`; `Symmetrized` uses
/// `XYZY` so that the nine terms are the full product of `{X, Z, I}` on
/// qubits 1 and 3. Both give 1 on GHZ₄ and cluster₄ and vanish on product
/// and pair-product states. Only the symmetrized list is invariant under
/// local unitaries in exact-antilinear mode; the verbatim list moves by a
/// few percent under a generic local rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum E4bVariant {
    #[default]
    Verbatim,
    Symmetrized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMode {
    /// Plain expectations `tr(ρP)`; valid for real states, defined for mixed ones.
    #[default]
    #[serde(alias = "real")]
    RealApproximation,
    /// `ψᵀPψ`; pure states only.
    #[serde(alias = "exact")]
    ExactAntilinear,
}

impl EvalMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EvalMode::RealApproximation => "real-approximation",
            EvalMode::ExactAntilinear => "exact-antilinear",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ExactState,
    SampledCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub name: MonotoneName,
    /// Unclamped.
    pub value: f64,
    pub stderr: f64,
    pub mode: EvalMode,
    pub provenance: Provenance,
}

/// Signed squared-expectation terms defining a monotone.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTermSet {
    name: MonotoneName,
    terms: Vec<(i8, PauliString)>,
    normalization: f64,
}

fn terms(list: &[(i8, &str)]) -> Vec<(i8, PauliString)> {
    list.iter()
        .map(|&(s, l)| (s, l.parse().expect("static Pauli label")))
        .collect()
}

impl PauliTermSet {
    /// Symmetrized three-tangle: the mean over the three qubits of
    /// `⟨σ_X YY⟩² + ⟨σ_Z YY⟩² − ⟨σ_I YY⟩²`.
    pub fn e3() -> Self {
        Self {
            name: MonotoneName::E3,
            terms: terms(&[
                (1, "XYY"),
                (1, "ZYY"),
                (-1, "IYY"),
                (1, "YXY"),
                (1, "YZY"),
                (-1, "YIY"),
                (1, "YYX"),
                (1, "YYZ"),
                (-1, "YYI"),
            ]),
            normalization: 1.0 / 3.0,
        }
    }

    /// Square of the four-qubit concurrence.
    pub fn e4a() -> Self {
        Self {
            name: MonotoneName::E4a,
            terms: terms(&[(1, "YYYY")]),
            normalization: 1.0,
        }
    }

    pub fn e4b(variant: E4bVariant) -> Self {
        let row1_middle = match variant {
            E4bVariant::Verbatim => "ZYZY",
            E4bVariant::Symmetrized => "XYZY",
        };
        Self {
            name: MonotoneName::E4b,
            terms: terms(&[
                (1, "XYXY"),
                (1, row1_middle),
                (-1, "XYIY"),
                (1, "ZYXY"),
                (1, "ZYZY"),
                (-1, "ZYIY"),
                (-1, "IYXY"),
                (-1, "IYZY"),
                (1, "IYIY"),
            ]),
            normalization: 1.0,
        }
    }

    /// Squared two-qubit concurrence `⟨YY𝒞⟩²`.
    pub fn c2() -> Self {
        Self {
            name: MonotoneName::C2,
            terms: terms(&[(1, "YY")]),
            normalization: 1.0,
        }
    }

    pub fn for_name(name: MonotoneName, variant: E4bVariant) -> Self {
        match name {
            MonotoneName::E3 => Self::e3(),
            MonotoneName::E4a => Self::e4a(),
            MonotoneName::E4b => Self::e4b(variant),
            MonotoneName::C2 => Self::c2(),
        }
    }

    pub fn name(&self) -> MonotoneName {
        self.name
    }

    pub fn n_qubits(&self) -> usize {
        self.name.n_qubits()
    }

    pub fn terms(&self) -> &[(i8, PauliString)] {
        &self.terms
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Distinct measurement bases in first-appearance order.
    pub fn bases(&self) -> Vec<PauliString> {
        let mut out: Vec<PauliString> = Vec::new();
        for (_, p) in &self.terms {
            if !out.contains(p) {
                out.push(p.clone());
            }
        }
        out
    }

    /// `norm · |Σ s_k v_k²|` for per-term values `v_k` (complex squares).
    pub fn combine<T: Real>(&self, values: &[C<T>]) -> Result<T> {
        if values.len() != self.terms.len() {
            return Err(Error::InvalidParameter(format!(
                "{} needs {} expectation values, got {}",
                self.name,
                self.terms.len(),
                values.len()
            )));
        }
        let sum = self.terms.iter().zip(values).fold(czero::<T>(), |acc, ((s, _), &v)| {
            let sq = v * v;
            if *s < 0 {
                acc - sq
            } else {
                acc + sq
            }
        });
        Ok(T::lit(self.normalization) * sum.norm())
    }

    /// Combines real expectation values, checking each lies in
    /// `[−1 − INPUT_SLACK, 1 + INPUT_SLACK]`.
    pub fn combine_real(&self, values: &[f64]) -> Result<f64> {
        if let Some(v) = values.iter().find(|v| v.is_nan() || v.abs() > 1.0 + INPUT_SLACK) {
            return Err(Error::InvalidParameter(format!(
                "expectation value {v} outside [-1, 1] beyond slack"
            )));
        }
        let cv: Vec<C<f64>> = values.iter().map(|&v| C::new(v, 0.0)).collect();
        self.combine(&cv)
    }

    /// Looks the per-term values up by basis label.
    fn combine_lookup(&self, by_basis: &BTreeMap<String, f64>) -> Result<f64> {
        let vals = self
            .terms
            .iter()
            .map(|(_, p)| {
                by_basis
                    .get(&p.label())
                    .copied()
                    .ok_or_else(|| Error::MissingBases(vec![p.label()]))
            })
            .collect::<Result<Vec<f64>>>()?;
        self.combine_real(&vals)
    }

    /// Per-term `⟨P⟩` (real mode) or `ψᵀPψ` (exact mode) on a state.
    pub fn term_values<T: Real>(&self, state: &crate::QuantumState<T>, mode: EvalMode) -> Result<Vec<C<T>>> {
        if state.n_qubits() != self.n_qubits() {
            return Err(Error::QubitCountMismatch {
                expected: self.n_qubits(),
                got: state.n_qubits(),
            });
        }
        self.terms
            .iter()
            .map(|(_, p)| match mode {
                EvalMode::RealApproximation => Ok(C::new(state.pauli_expectation(p)?, T::zero())),
                EvalMode::ExactAntilinear => state.antilinear_expectation(p),
            })
            .collect()
    }

    pub fn value_on_state<T: Real>(&self, state: &crate::QuantumState<T>, mode: EvalMode) -> Result<T> {
        self.combine(&self.term_values(state, mode)?)
    }

    pub fn report_on_state<T: Real>(&self, state: &crate::QuantumState<T>, mode: EvalMode) -> Result<MonotoneReport> {
        Ok(MonotoneReport {
            name: self.name,
            value: self.value_on_state(state, mode)?.as_f64(),
            stderr: 0.0,
            mode,
            provenance: Provenance::ExactState,
        })
    }

    /// Monotone from one counts record per basis, with optional readout
    /// correction. The error bar is the standard deviation over
    /// `bootstrap` multinomial resamples of every record.
    pub fn report_from_counts(
        &self,
        records: &BTreeMap<String, CountsRecord>,
        readout: Option<&ReadoutMap>,
        bootstrap: usize,
        seed: u64,
    ) -> Result<MonotoneReport> {
        let bases = self.bases();
        let missing: Vec<String> = bases
            .iter()
            .map(PauliString::label)
            .filter(|l| !records.contains_key(l))
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingBases(missing));
        }
        let used: Vec<&CountsRecord> = bases.iter().map(|b| &records[&b.label()]).collect();
        for r in &used {
            if r.n_qubits != self.n_qubits() {
                return Err(Error::QubitCountMismatch {
                    expected: self.n_qubits(),
                    got: r.n_qubits,
                });
            }
        }

        let estimate = |recs: &[&CountsRecord]| -> Result<f64> {
            let mut by_basis = BTreeMap::new();
            for r in recs {
                let e = match readout {
                    Some(map) => readout_correct(r, map)?.1,
                    None => expectation_from_counts(r)?,
                };
                // records may carry a signed basis; terms need the unsigned Pauli
                by_basis.insert(r.basis.label(), e.value * r.basis.sign::<f64>());
            }
            self.combine_lookup(&by_basis)
        };

        let value = estimate(&used)?;
        let resampled = (0..bootstrap)
            .into_par_iter()
            .map(|b| {
                let mut rng = rng_from(seed, &[b as u64]);
                let recs = used
                    .iter()
                    .map(|r| sample_counts(&r.frequencies()?, &r.basis, r.shots, &mut rng))
                    .collect::<Result<Vec<_>>>()?;
                estimate(&recs.iter().collect::<Vec<_>>())
            })
            .collect::<Result<Vec<f64>>>()?;
        let stderr = if resampled.len() > 1 {
            let m = resampled.iter().sum::<f64>() / resampled.len() as f64;
            (resampled.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (resampled.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
        Ok(MonotoneReport {
            name: self.name,
            value,
            stderr,
            mode: EvalMode::RealApproximation,
            provenance: Provenance::SampledCounts,
        })
    }
}

pub fn e3<T: Real>(state: &crate::QuantumState<T>, mode: EvalMode) -> Result<MonotoneReport> {
    PauliTermSet::e3().report_on_state(state, mode)
}

pub fn e4a<T: Real>(state: &crate::QuantumState<T>, mode: EvalMode) -> Result<MonotoneReport> {
    PauliTermSet::e4a().report_on_state(state, mode)
}

pub fn e4b<T: Real>(state: &crate::QuantumState<T>, mode: EvalMode, variant: E4bVariant) -> Result<MonotoneReport> {
    PauliTermSet::e4b(variant).report_on_state(state, mode)
}

/// `E3` from its nine expectation values in term order
/// (`XYY, ZYY, IYY, YXY, YZY, YIY, YYX, YYZ, YYI`).
pub fn e3_from_expectations(values: &[f64; 9]) -> Result<f64> {
    PauliTermSet::e3().combine_real(values)
}

/// Squared concurrence of qubits `pair` of `state`. Real mode traces out the
/// rest; exact mode needs a pure two-qubit state.
pub fn concurrence2<T: Real>(
    state: &crate::QuantumState<T>,
    pair: (usize, usize),
    mode: EvalMode,
) -> Result<MonotoneReport> {
    let set = PauliTermSet::c2();
    if state.n_qubits() == 2 && pair == (0, 1) {
        return set.report_on_state(state, mode);
    }
    if pair.0 >= pair.1 {
        return Err(Error::InvalidParameter("pair must be (a, b) with a < b".into()));
    }
    match mode {
        EvalMode::RealApproximation => set.report_on_state(&state.partial_trace(&[pair.0, pair.1])?, mode),
        EvalMode::ExactAntilinear => Err(Error::QubitCountMismatch {
            expected: 2,
            got: state.n_qubits(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{target_state, StateFamily};
    use crate::measure::measurement_distribution;
    use crate::qstate::{Gate, QuantumState};
    use crate::scalar::c;
    use approx::assert_abs_diff_eq;

    type S = QuantumState<f64>;
    const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn drifted_ghz(n: usize, phi: f64) -> S {
        let d = 1 << n;
        let mut a = vec![c(0., 0.); d];
        a[0] = c(R, 0.);
        a[d - 1] = C::from_polar(R, phi);
        S::from_amplitudes(n, a).unwrap()
    }

    #[test]
    fn term_set_shapes() {
        assert_eq!(PauliTermSet::e3().terms().len(), 9);
        assert_eq!(PauliTermSet::e3().terms().iter().filter(|(s, _)| *s < 0).count(), 3);
        assert_eq!(PauliTermSet::e4a().terms().len(), 1);
        assert_eq!(PauliTermSet::e4b(E4bVariant::Verbatim).terms().len(), 9);
        assert_eq!(PauliTermSet::e4b(E4bVariant::Verbatim).bases().len(), 8);
        assert_eq!(PauliTermSet::e4b(E4bVariant::Symmetrized).bases().len(), 9);
    }

    #[test]
    fn ideal_values() {
        let ghz3 = target_state::<f64>(StateFamily::Ghz, 3).unwrap();
        let cl3 = target_state::<f64>(StateFamily::Cluster, 3).unwrap();
        let ghz4 = target_state::<f64>(StateFamily::Ghz, 4).unwrap();
        let cl4 = target_state::<f64>(StateFamily::Cluster, 4).unwrap();
        for mode in [EvalMode::RealApproximation, EvalMode::ExactAntilinear] {
            assert_abs_diff_eq!(e3(&ghz3, mode).unwrap().value, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(e3(&cl3, mode).unwrap().value, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(e4a(&ghz4, mode).unwrap().value, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(e4a(&cl4, mode).unwrap().value, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(e4a(&S::zero(4).unwrap(), mode).unwrap().value, 0.0, epsilon = 1e-12);
        }
        let plus3 = target_state::<f64>(StateFamily::Uniform, 3).unwrap();
        assert_abs_diff_eq!(
            e3(&plus3, EvalMode::RealApproximation).unwrap().value,
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn drifted_ghz3_real_vs_exact() {
        let s = drifted_ghz(3, std::f64::consts::FRAC_PI_2);
        assert_abs_diff_eq!(e3(&s, EvalMode::RealApproximation).unwrap().value, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e3(&s, EvalMode::ExactAntilinear).unwrap().value, 1.0, epsilon = 1e-12);
        assert!(e3(&s.to_density(), EvalMode::ExactAntilinear).is_err());
    }

    #[test]
    fn e3_real_approximation_matches_dense_oracle_and_is_pi_periodic() {
        // oracle: dense tr(ρP) with explicit Pauli matrices
        let oracle = |phi: f64| -> f64 {
            let s = drifted_ghz(3, phi);
            let rho = crate::Matrix::from_rows(8, s.density_matrix());
            let vals: Vec<f64> = PauliTermSet::e3()
                .terms()
                .iter()
                .map(|(_, p)| {
                    let m = crate::noise::pauli_string_matrix::<f64>(p);
                    let prod = rho.matmul(&m);
                    (0..8).map(|i| prod.get(i, i).re).sum()
                })
                .collect();
            let signs = [1., 1., -1., 1., 1., -1., 1., 1., -1.];
            (vals.iter().zip(signs).map(|(v, s)| s * v * v).sum::<f64>() / 3.0).abs()
        };
        for k in 0..=6 {
            let phi = k as f64 * std::f64::consts::PI / 6.0;
            let v = e3(&drifted_ghz(3, phi), EvalMode::RealApproximation).unwrap().value;
            assert_abs_diff_eq!(v, oracle(phi), epsilon = 1e-12);
            let shifted = e3(&drifted_ghz(3, phi + std::f64::consts::PI), EvalMode::RealApproximation)
                .unwrap()
                .value;
            assert_abs_diff_eq!(v, shifted, epsilon = 1e-12);
        }
    }

    #[test]
    fn concurrence_examples() {
        let bell = target_state::<f64>(StateFamily::Bell, 2).unwrap();
        for mode in [EvalMode::RealApproximation, EvalMode::ExactAntilinear] {
            assert_abs_diff_eq!(concurrence2(&bell, (0, 1), mode).unwrap().value, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(
                concurrence2(&S::zero(2).unwrap(), (0, 1), mode).unwrap().value,
                0.0,
                epsilon = 1e-12
            );
        }
        for phi in [0.3, 1.0, 2.2] {
            let s = drifted_ghz(2, phi);
            let real = concurrence2(&s, (0, 1), EvalMode::RealApproximation).unwrap().value;
            assert_abs_diff_eq!(real, phi.cos().powi(2), epsilon = 1e-12);
            let exact = concurrence2(&s, (0, 1), EvalMode::ExactAntilinear).unwrap().value;
            assert_abs_diff_eq!(exact, 1.0, epsilon = 1e-12);
        }
        // pair restriction of a product with a Bell pair
        let big = bell.tensor(&S::zero(1).unwrap()).unwrap();
        assert_abs_diff_eq!(
            concurrence2(&big, (0, 1), EvalMode::RealApproximation).unwrap().value,
            1.0,
            epsilon = 1e-12
        );
        assert!(concurrence2(&big, (0, 1), EvalMode::ExactAntilinear).is_err());
    }

    #[test]
    fn wrong_size_errors() {
        let s = S::zero(4).unwrap();
        assert!(matches!(
            e3(&s, EvalMode::RealApproximation),
            Err(Error::QubitCountMismatch { .. })
        ));
        assert!(e3_from_expectations(&[2.0; 9]).is_err());
        assert_abs_diff_eq!(
            e3_from_expectations(&[-1., 0., 0., -1., 0., 0., -1., 0., 0.]).unwrap(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn exact_counts_give_exact_monotone() {
        // infinite-shot stand-in: counts proportional to the distribution
        let ghz = target_state::<f64>(StateFamily::Ghz, 3).unwrap();
        let set = PauliTermSet::e3();
        let mut records = BTreeMap::new();
        for b in set.bases() {
            let d = measurement_distribution(&ghz, &b).unwrap();
            let counts = d
                .iter()
                .enumerate()
                .filter(|(_, p)| **p > 1e-12)
                .map(|(i, p)| (crate::measure::bitstring(i, 3), (p * 8000.0).round() as u64))
                .collect::<BTreeMap<_, _>>();
            records.insert(
                b.label(),
                CountsRecord {
                    basis: b.clone(),
                    n_qubits: 3,
                    shots: counts.values().sum(),
                    counts,
                    delay_us: None,
                    metadata: BTreeMap::new(),
                },
            );
        }
        let rep = set.report_from_counts(&records, None, 50, 1).unwrap();
        assert_abs_diff_eq!(rep.value, 1.0, epsilon = 1e-12);
        assert_eq!(rep.provenance, Provenance::SampledCounts);

        records.remove("YYZ");
        match set.report_from_counts(&records, None, 0, 1) {
            Err(Error::MissingBases(m)) => assert_eq!(m, vec!["YYZ".to_string()]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hadamard_rotated_state_changes_real_but_not_exact_e3() {
        // a local unitary leaves the exact monotone alone
        let mut s = target_state::<f64>(StateFamily::Ghz, 3).unwrap();
        s.apply_gate_mut(&Gate::x90(1)).unwrap();
        assert_abs_diff_eq!(e3(&s, EvalMode::ExactAntilinear).unwrap().value, 1.0, epsilon = 1e-12);
    }
}
