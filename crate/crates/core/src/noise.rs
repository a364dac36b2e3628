//! Channel library: Markovian T1/T2 idling with coherent phase drift,
//! two-qubit depolarizing after CNOTs, quasi-static and telegraph-sum 1/f
//! dephasing trajectories, and tensor-product readout confusion.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{GateKind, Matrix, Pauli, PauliString};
use crate::scalar::{c, Real, C};

pub const DEFAULT_T1_S: f64 = 50e-6;
pub const DEFAULT_T2_S: f64 = 40e-6;
pub const DEFAULT_CNOT_DEPOLARIZING: f64 = 0.02;
pub const DEFAULT_READOUT: ReadoutError = ReadoutError { e0: 0.02, e1: 0.05 };
pub const DEFAULT_SIGMA_HZ: f64 = 20e3;
pub const DEFAULT_TRAJECTORIES: usize = 500;

/// Collective drift frequency `f_z` (Hz) of the `|0…0⟩/|1…1⟩` relative phase
/// for an `n`-qubit register: 167 kHz at n = 3, 238 kHz at n = 4, and
/// 57.5 kHz per qubit otherwise.
pub fn default_collective_drift_hz(n: usize) -> f64 {
    match n {
        3 => 167e3,
        4 => 238e3,
        _ => 57.5e3 * n as f64,
    }
}

/// Per-qubit readout misassignment: `e0 = P(read 1 | 0)`, `e1 = P(read 0 | 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutError {
    pub e0: f64,
    pub e1: f64,
}

impl ReadoutError {
    pub const NONE: ReadoutError = ReadoutError { e0: 0.0, e1: 0.0 };

    pub fn symmetric(e: f64) -> Self {
        Self { e0: e, e1: e }
    }

    pub fn is_zero(&self) -> bool {
        self.e0 == 0.0 && self.e1 == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spectrum {
    /// One Gaussian frequency offset per qubit and trajectory.
    QuasiStatic,
    /// Sum of random-telegraph fluctuators with log-spaced switching rates.
    TelegraphSum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OneOverF {
    pub enabled: bool,
    /// Standard deviation of the per-qubit frequency offset, Hz.
    pub sigma_hz: f64,
    pub trajectories: usize,
    pub spectrum: Spectrum,
    pub fluctuators_per_decade: usize,
    pub min_rate_hz: f64,
    pub max_rate_hz: f64,
}

impl Default for OneOverF {
    fn default() -> Self {
        Self {
            enabled: false,
            sigma_hz: DEFAULT_SIGMA_HZ,
            trajectories: DEFAULT_TRAJECTORIES,
            spectrum: Spectrum::QuasiStatic,
            fluctuators_per_decade: 10,
            min_rate_hz: 1e3,
            max_rate_hz: 1e7,
        }
    }
}

/// Noise parameters for an `n`-qubit register. Times in seconds,
/// frequencies in Hz. Infinite `T1`/`T2` disable the corresponding decay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub t1_s: Vec<f64>,
    pub t2_s: Vec<f64>,
    pub drift_hz: Vec<f64>,
    pub cnot_depolarizing: f64,
    pub readout: Vec<ReadoutError>,
    pub oneoverf: OneOverF,
}

impl NoiseModel {
    /// No decay, no drift, no gate or readout error.
    pub fn ideal(n: usize) -> Self {
        Self {
            t1_s: vec![f64::INFINITY; n],
            t2_s: vec![f64::INFINITY; n],
            drift_hz: vec![0.0; n],
            cnot_depolarizing: 0.0,
            readout: vec![ReadoutError::NONE; n],
            oneoverf: OneOverF::default(),
        }
    }

    /// Default transmon-like model: T1 = 50 µs, T2 = 40 µs, collective drift
    /// split evenly over the qubits, CNOT depolarizing and readout error.
    pub fn with_defaults(n: usize) -> Self {
        Self {
            t1_s: vec![DEFAULT_T1_S; n],
            t2_s: vec![DEFAULT_T2_S; n],
            drift_hz: vec![default_collective_drift_hz(n) / n as f64; n],
            cnot_depolarizing: DEFAULT_CNOT_DEPOLARIZING,
            readout: vec![DEFAULT_READOUT; n],
            oneoverf: OneOverF::default(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.t1_s.len()
    }

    /// Sets every qubit's drift to `f_total / n`, so the GHZ relative phase
    /// advances at `f_total`.
    pub fn with_collective_drift(mut self, f_total_hz: f64) -> Self {
        let n = self.n_qubits();
        self.drift_hz = vec![f_total_hz / n as f64; n];
        self
    }

    pub fn with_drift(mut self, drift_hz: Vec<f64>) -> Self {
        self.drift_hz = drift_hz;
        self
    }

    pub fn with_t1_t2(mut self, t1_s: f64, t2_s: f64) -> Self {
        let n = self.n_qubits();
        self.t1_s = vec![t1_s; n];
        self.t2_s = vec![t2_s; n];
        self
    }

    pub fn with_cnot_depolarizing(mut self, p: f64) -> Self {
        self.cnot_depolarizing = p;
        self
    }

    pub fn with_readout(mut self, e: ReadoutError) -> Self {
        let n = self.n_qubits();
        self.readout = vec![e; n];
        self
    }

    pub fn with_oneoverf(mut self, oneoverf: OneOverF) -> Self {
        self.oneoverf = oneoverf;
        self
    }

    pub fn total_drift_hz(&self) -> f64 {
        self.drift_hz.iter().sum()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for (name, len) in [
            ("t1", self.t1_s.len()),
            ("t2", self.t2_s.len()),
            ("drift", self.drift_hz.len()),
            ("readout", self.readout.len()),
        ] {
            if len != n {
                return Err(Error::InvalidParameter(format!(
                    "{name} has {len} entries for {n} qubits"
                )));
            }
        }
        for (&t1, &t2) in self.t1_s.iter().zip(&self.t2_s) {
            check_t1_t2(t1, t2)?;
        }
        if self.drift_hz.iter().any(|f| !f.is_finite()) {
            return Err(Error::InvalidParameter("drift frequencies must be finite".into()));
        }
        check_probability(self.cnot_depolarizing)?;
        for r in &self.readout {
            check_probability(r.e0)?;
            check_probability(r.e1)?;
        }
        let o = &self.oneoverf;
        if o.trajectories < 1 {
            return Err(Error::InvalidParameter("1/f trajectories must be >= 1".into()));
        }
        if !(o.sigma_hz >= 0.0 && o.sigma_hz.is_finite()) {
            return Err(Error::InvalidParameter("1/f sigma must be finite and >= 0".into()));
        }
        if o.spectrum == Spectrum::TelegraphSum
            && !(o.min_rate_hz > 0.0 && o.max_rate_hz > o.min_rate_hz && o.fluctuators_per_decade >= 1)
        {
            return Err(Error::InvalidParameter("telegraph fluctuator band is empty".into()));
        }
        Ok(())
    }

    /// True when evolution under this model is unitary: no decay, no gate
    /// depolarizing and no stochastic detuning. Drift alone keeps states pure.
    pub fn is_unitary(&self) -> bool {
        self.t1_s.iter().all(|t| t.is_infinite())
            && self.t2_s.iter().all(|t| t.is_infinite())
            && self.cnot_depolarizing == 0.0
            && !self.stochastic_detuning()
    }

    pub fn stochastic_detuning(&self) -> bool {
        self.oneoverf.enabled && self.oneoverf.sigma_hz > 0.0
    }

    pub fn readout_map(&self) -> Result<ReadoutMap> {
        confusion_channel(&self.readout)
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    Ok(())
}

fn check_t1_t2(t1: f64, t2: f64) -> Result<()> {
    if !(t1 > 0.0 && t2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "T1 = {t1}, T2 = {t2} must be positive"
        )));
    }
    if t2 > 2.0 * t1 * (1.0 + 1e-12) {
        return Err(Error::T2ExceedsLimit { t2, two_t1: 2.0 * t1 });
    }
    Ok(())
}

/// Completely positive trace-preserving map on one or two qubits, stored as
/// Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel<T> {
    arity: usize,
    kraus: Vec<Matrix<T>>,
}

impl<T: Real> Channel<T> {
    pub fn from_kraus(arity: usize, kraus: Vec<Matrix<T>>) -> Result<Self> {
        let dim = 1usize << arity;
        if kraus.is_empty() || kraus.iter().any(|k| k.dim() != dim) {
            return Err(Error::InvalidParameter(
                "Kraus operators do not match channel arity".into(),
            ));
        }
        Ok(Self { arity, kraus })
    }

    pub fn identity(arity: usize) -> Self {
        Self {
            arity,
            kraus: vec![Matrix::identity(1 << arity)],
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kraus(&self) -> &[Matrix<T>] {
        &self.kraus
    }

    /// `max |Σ K†K − I|`.
    pub fn completeness_error(&self) -> T {
        let dim = 1usize << self.arity;
        let sum = self
            .kraus
            .iter()
            .fold(Matrix::zeros(dim), |acc, k| acc.add(&k.adjoint().matmul(k)));
        sum.max_abs_diff(&Matrix::identity(dim))
    }

    /// `Σ K ⊗ K*`, the action on a row-major vectorised density operator.
    pub fn superoperator(&self) -> Matrix<T> {
        let dim = 1usize << (2 * self.arity);
        self.kraus
            .iter()
            .fold(Matrix::zeros(dim), |acc, k| acc.add(&k.kron(&k.conj())))
    }
}

/// Single-qubit idle channel for a slice of `dt` seconds: amplitude damping
/// `γ = 1 − e^{−dt/T1}`, pure dephasing at rate `1/T2 − 1/(2T1)` and a
/// coherent `Rz(2π f dt)` drift, composed in that order.
pub fn idle_channel<T: Real>(dt: f64, t1: f64, t2: f64, f_drift_hz: f64) -> Result<Channel<T>> {
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("idle duration {dt}")));
    }
    check_t1_t2(t1, t2)?;
    let gamma = 1.0 - (-dt / t1).exp();
    let dephasing_rate = (1.0 / t2 - 0.5 / t1).max(0.0);
    let lambda = (-dt * dephasing_rate).exp();

    let zero = c::<T>(0., 0.);
    let one = c::<T>(1., 0.);
    let mut amp = vec![Matrix::diag(&[one, c((1.0 - gamma).sqrt(), 0.)])];
    if gamma > 0.0 {
        amp.push(Matrix::from_rows(2, vec![zero, c(gamma.sqrt(), 0.), zero, zero]));
    }
    let mut deph = vec![Matrix::identity(2).scale(c(((1.0 + lambda) / 2.0).sqrt(), 0.))];
    if lambda < 1.0 {
        deph.push(Matrix::diag(&[one, -one]).scale(c(((1.0 - lambda) / 2.0).sqrt(), 0.)));
    }
    let u = GateKind::Rz(T::lit(2.0 * std::f64::consts::PI * f_drift_hz * dt)).matrix();

    let kraus = deph
        .iter()
        .flat_map(|d| amp.iter().map(move |a| d.matmul(a)))
        .map(|k| u.matmul(&k))
        .collect();
    Channel::from_kraus(1, kraus)
}

/// Two-qubit depolarizing: with probability `p` the pair is replaced by
/// `I/4`. Kraus weights are `1 − 15p/16` on the identity and `p/16` on
/// each of the 15 non-identity Paulis.
pub fn cnot_error_channel<T: Real>(p: f64) -> Result<Channel<T>> {
    check_probability(p)?;
    let paulis = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let mut kraus = Vec::with_capacity(16);
    for &a in &paulis {
        for &b in &paulis {
            let weight = if a == Pauli::I && b == Pauli::I {
                1.0 - 15.0 * p / 16.0
            } else {
                p / 16.0
            };
            if weight == 0.0 {
                continue;
            }
            let m = pauli_matrix::<T>(a).kron(&pauli_matrix(b));
            kraus.push(m.scale(c(weight.sqrt(), 0.)));
        }
    }
    Channel::from_kraus(2, kraus)
}

pub(crate) fn pauli_matrix<T: Real>(p: Pauli) -> Matrix<T> {
    match p {
        Pauli::I => Matrix::identity(2),
        Pauli::X => GateKind::X.matrix(),
        Pauli::Y => GateKind::Y.matrix(),
        Pauli::Z => GateKind::Z.matrix(),
    }
}

/// Dense matrix of a signed Pauli string (qubit 0 most significant).
pub fn pauli_string_matrix<T: Real>(p: &PauliString) -> Matrix<T> {
    let m = p
        .ops()
        .iter()
        .fold(Matrix::identity(1), |acc, &op| acc.kron(&pauli_matrix(op)));
    if p.is_negative() {
        m.scale(C::new(-T::one(), T::zero()))
    } else {
        m
    }
}

/// Draws one trajectory's per-qubit frequency offsets (Hz). Offsets are
/// independent across qubits. In telegraph-sum mode this is the stationary
/// initial value of each qubit's fluctuator sum.
pub fn sample_quasistatic_detunings<R: Rng + ?Sized>(model: &NoiseModel, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    Ok(DetuningProcess::sample(model, n, rng)?.offsets())
}

#[derive(Debug, Clone)]
struct Telegraph {
    amplitude: f64,
    rates_hz: Vec<f64>,
    /// `states[q][k]`: sign of fluctuator `k` on qubit `q`.
    states: Vec<Vec<bool>>,
}

/// Per-trajectory frequency-offset process for every qubit.
#[derive(Debug, Clone)]
pub enum DetuningProcess {
    Static(Vec<f64>),
    Telegraph(TelegraphState),
}

#[derive(Debug, Clone)]
pub struct TelegraphState(Telegraph);

impl DetuningProcess {
    pub fn none(n: usize) -> Self {
        DetuningProcess::Static(vec![0.0; n])
    }

    pub fn sample<R: Rng + ?Sized>(model: &NoiseModel, n: usize, rng: &mut R) -> Result<Self> {
        let o = &model.oneoverf;
        if o.trajectories < 1 {
            return Err(Error::InvalidParameter("1/f trajectories must be >= 1".into()));
        }
        if !o.enabled || o.sigma_hz == 0.0 {
            return Ok(Self::none(n));
        }
        match o.spectrum {
            Spectrum::QuasiStatic => {
                let normal =
                    Normal::new(0.0, o.sigma_hz).map_err(|e| Error::InvalidParameter(format!("1/f sigma: {e}")))?;
                Ok(DetuningProcess::Static((0..n).map(|_| normal.sample(rng)).collect()))
            }
            Spectrum::TelegraphSum => {
                let decades = (o.max_rate_hz / o.min_rate_hz).log10();
                let k = ((decades * o.fluctuators_per_decade as f64).round() as usize).max(1);
                let lo = o.min_rate_hz.log10();
                let rates_hz = (0..k)
                    .map(|i| 10f64.powf(lo + decades * (i as f64 + 0.5) / k as f64))
                    .collect();
                let amplitude = o.sigma_hz / (k as f64).sqrt();
                let states = (0..n).map(|_| (0..k).map(|_| rng.random::<bool>()).collect()).collect();
                Ok(DetuningProcess::Telegraph(TelegraphState(Telegraph {
                    amplitude,
                    rates_hz,
                    states,
                })))
            }
        }
    }

    pub fn offset(&self, q: usize) -> f64 {
        match self {
            DetuningProcess::Static(v) => v[q],
            DetuningProcess::Telegraph(TelegraphState(t)) => t.states[q]
                .iter()
                .map(|&s| if s { t.amplitude } else { -t.amplitude })
                .sum(),
        }
    }

    pub fn offsets(&self) -> Vec<f64> {
        let n = match self {
            DetuningProcess::Static(v) => v.len(),
            DetuningProcess::Telegraph(TelegraphState(t)) => t.states.len(),
        };
        (0..n).map(|q| self.offset(q)).collect()
    }

    pub fn is_static(&self) -> bool {
        matches!(self, DetuningProcess::Static(_))
    }

    /// Evolves qubit `q`'s fluctuators over `dt` seconds. Each symmetric
    /// telegraph process with rate `γ` flips with probability
    /// `(1 − e^{−2γ dt}) / 2`.
    pub fn advance<R: Rng + ?Sized>(&mut self, q: usize, dt: f64, rng: &mut R) {
        if let DetuningProcess::Telegraph(TelegraphState(t)) = self {
            for (s, &rate) in t.states[q].iter_mut().zip(&t.rates_hz) {
                let p_flip = 0.5 * (1.0 - (-2.0 * rate * dt).exp());
                if rng.random::<f64>() < p_flip {
                    *s = !*s;
                }
            }
        }
    }
}

/// Per-qubit column-stochastic readout maps
/// `[[1 − e0, e1], [e0, 1 − e1]]` (rows: reported bit, columns: true bit).
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutMap {
    errors: Vec<ReadoutError>,
}

/// Builds the tensor-product readout map.
pub fn confusion_channel(errors: &[ReadoutError]) -> Result<ReadoutMap> {
    for e in errors {
        check_probability(e.e0)?;
        check_probability(e.e1)?;
    }
    Ok(ReadoutMap {
        errors: errors.to_vec(),
    })
}

impl ReadoutMap {
    pub fn n_qubits(&self) -> usize {
        self.errors.len()
    }

    pub fn errors(&self) -> &[ReadoutError] {
        &self.errors
    }

    pub fn is_identity(&self) -> bool {
        self.errors.iter().all(ReadoutError::is_zero)
    }

    pub(crate) fn matrices(&self) -> Vec<[f64; 4]> {
        self.errors
            .iter()
            .map(|e| [1.0 - e.e0, e.e1, e.e0, 1.0 - e.e1])
            .collect()
    }

    /// Inverse per-qubit matrices; fails if any qubit has `e0 + e1 >= 1`.
    pub(crate) fn inverse_matrices(&self) -> Result<Vec<[f64; 4]>> {
        self.errors
            .iter()
            .enumerate()
            .map(|(q, e)| {
                let det = 1.0 - e.e0 - e.e1;
                if det <= 1e-12 {
                    return Err(Error::SingularConfusion(q));
                }
                Ok([(1.0 - e.e1) / det, -e.e1 / det, -e.e0 / det, (1.0 - e.e0) / det])
            })
            .collect()
    }
}

/// Applies one 2×2 matrix per qubit to a distribution over `2^n` bitstrings.
pub(crate) fn apply_per_qubit<T: Real>(dist: &[T], mats: &[[f64; 4]]) -> Vec<T> {
    let n = mats.len();
    let mut out = dist.to_vec();
    for (q, m) in mats.iter().enumerate() {
        let bit = 1usize << (n - 1 - q);
        let [a, b, cc, d] = m.map(T::lit);
        for i in 0..out.len() {
            if i & bit != 0 {
                continue;
            }
            let (p0, p1) = (out[i], out[i | bit]);
            out[i] = a * p0 + b * p1;
            out[i | bit] = cc * p0 + d * p1;
        }
    }
    out
}

/// Forward readout model applied to an exact bitstring distribution.
pub fn apply_confusion<T: Real>(dist: &[T], map: &ReadoutMap) -> Result<Vec<T>> {
    if dist.len() != 1usize << map.n_qubits() {
        return Err(Error::QubitCountMismatch {
            expected: map.n_qubits(),
            got: dist.len().trailing_zeros() as usize,
        });
    }
    Ok(apply_per_qubit(dist, &map.matrices()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{Gate, QuantumState};
    use crate::rng::rng_from;
    use approx::assert_abs_diff_eq;

    type S = QuantumState<f64>;

    #[test]
    fn idle_channels_are_trace_preserving() {
        for &(dt, t1, t2, f) in &[
            (80e-9, 50e-6, 40e-6, 55e3),
            (0.0, 50e-6, 40e-6, 0.0),
            (1e-3, 1e-6, 2e-6, 1e6),
            (80e-9, f64::INFINITY, f64::INFINITY, 1e5),
            (80e-9, 30e-6, 60e-6, 0.0),
        ] {
            let ch = idle_channel::<f64>(dt, t1, t2, f).unwrap();
            assert!(ch.completeness_error() < 1e-12);
        }
    }

    #[test]
    fn idle_channel_rejects_t2_above_two_t1() {
        assert!(matches!(
            idle_channel::<f64>(1e-9, 10e-6, 25e-6, 0.0),
            Err(Error::T2ExceedsLimit { .. })
        ));
        assert!(idle_channel::<f64>(-1.0, 10e-6, 10e-6, 0.0).is_err());
    }

    #[test]
    fn zero_duration_idle_is_identity() {
        let ch = idle_channel::<f64>(0.0, 50e-6, 40e-6, 1e5).unwrap();
        assert!(ch.superoperator().max_abs_diff(&Matrix::identity(4)) < 1e-15);
    }

    #[test]
    fn long_idle_relaxes_to_ground() {
        let ch = idle_channel::<f64>(1.0, 1e-6, 1e-6, 0.0).unwrap();
        let mut s = S::basis(1, 1).unwrap();
        s.apply_superoperator(&[0], &ch.superoperator()).unwrap();
        assert_abs_diff_eq!(
            s.pauli_expectation(&"Z".parse().unwrap()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn coherence_decays_at_t2() {
        let (t1, t2, dt) = (50e-6, 40e-6, 3e-6);
        let ch = idle_channel::<f64>(dt, t1, t2, 0.0).unwrap();
        let mut s = S::zero(1).unwrap().apply_gate(&Gate::h(0)).unwrap();
        s.apply_superoperator(&[0], &ch.superoperator()).unwrap();
        let x = s.pauli_expectation(&"X".parse().unwrap()).unwrap();
        assert_abs_diff_eq!(x, (-dt / t2).exp(), epsilon = 1e-12);
    }

    #[test]
    fn cnot_depolarizing_channel() {
        for p in [0.0, 0.05, 0.5, 1.0] {
            assert!(cnot_error_channel::<f64>(p).unwrap().completeness_error() < 1e-12);
        }
        assert_eq!(cnot_error_channel::<f64>(0.0).unwrap().kraus().len(), 1);
        assert!(cnot_error_channel::<f64>(1.5).is_err());

        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut bell = S::from_amplitudes(2, vec![c(r, 0.), c(0., 0.), c(0., 0.), c(r, 0.)]).unwrap();
        bell.apply_superoperator(&[0, 1], &cnot_error_channel::<f64>(1.0).unwrap().superoperator())
            .unwrap();
        let rho = bell.density_matrix();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 0.25 } else { 0.0 };
                assert_abs_diff_eq!(rho[i * 4 + j].re, expect, epsilon = 1e-12);
                assert_abs_diff_eq!(rho[i * 4 + j].im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn zero_sigma_gives_zero_offsets() {
        let mut m = NoiseModel::ideal(3);
        m.oneoverf.enabled = true;
        m.oneoverf.sigma_hz = 0.0;
        let mut rng = rng_from(1, &[]);
        assert_eq!(sample_quasistatic_detunings(&m, 3, &mut rng).unwrap(), vec![0.0; 3]);
        m.oneoverf.trajectories = 0;
        assert!(sample_quasistatic_detunings(&m, 3, &mut rng).is_err());
    }

    #[test]
    fn detunings_are_spatially_uncorrelated() {
        let mut m = NoiseModel::ideal(2);
        m.oneoverf.enabled = true;
        let mut rng = rng_from(7, &[]);
        let draws: Vec<Vec<f64>> = (0..10_000)
            .map(|_| sample_quasistatic_detunings(&m, 2, &mut rng).unwrap())
            .collect();
        let mean = |q: usize| draws.iter().map(|d| d[q]).sum::<f64>() / draws.len() as f64;
        let (m0, m1) = (mean(0), mean(1));
        let cov: f64 = draws.iter().map(|d| (d[0] - m0) * (d[1] - m1)).sum();
        let v0: f64 = draws.iter().map(|d| (d[0] - m0).powi(2)).sum();
        let v1: f64 = draws.iter().map(|d| (d[1] - m1).powi(2)).sum();
        let r = cov / (v0 * v1).sqrt();
        assert!(r.abs() < 0.05, "r = {r}");
        let sd = (v0 / draws.len() as f64).sqrt();
        assert!((sd - DEFAULT_SIGMA_HZ).abs() < 0.05 * DEFAULT_SIGMA_HZ);
    }

    #[test]
    fn telegraph_sum_has_configured_spread() {
        let mut m = NoiseModel::ideal(1);
        m.oneoverf.enabled = true;
        m.oneoverf.spectrum = Spectrum::TelegraphSum;
        let mut rng = rng_from(3, &[]);
        let vals: Vec<f64> = (0..5000)
            .map(|_| sample_quasistatic_detunings(&m, 1, &mut rng).unwrap()[0])
            .collect();
        let var = vals.iter().map(|v| v * v).sum::<f64>() / vals.len() as f64;
        assert!((var.sqrt() - DEFAULT_SIGMA_HZ).abs() < 0.05 * DEFAULT_SIGMA_HZ);

        let mut proc = DetuningProcess::sample(&m, 1, &mut rng).unwrap();
        let before = proc.offset(0);
        // fast fluctuators must switch within a microsecond
        for _ in 0..50 {
            proc.advance(0, 80e-9, &mut rng);
        }
        assert_ne!(before, proc.offset(0));
    }

    #[test]
    fn readout_confusion_examples() {
        let id = confusion_channel(&[ReadoutError::NONE]).unwrap();
        assert_eq!(apply_confusion(&[0.3, 0.7], &id).unwrap(), vec![0.3, 0.7]);

        let sym = confusion_channel(&[ReadoutError::symmetric(0.1)]).unwrap();
        let d = apply_confusion(&[1.0, 0.0], &sym).unwrap();
        assert_abs_diff_eq!(d[0] - d[1], 0.8, epsilon = 1e-15);

        let asym = confusion_channel(&[ReadoutError { e0: 0.02, e1: 0.08 }]).unwrap();
        let d = apply_confusion(&[0.0, 1.0], &asym).unwrap();
        assert_abs_diff_eq!(d[1], 0.92, epsilon = 1e-15);

        assert!(confusion_channel(&[ReadoutError { e0: -0.1, e1: 0.0 }]).is_err());
        let singular = confusion_channel(&[ReadoutError::symmetric(0.5)]).unwrap();
        assert_eq!(singular.inverse_matrices(), Err(Error::SingularConfusion(0)));
    }

    #[test]
    fn model_validation() {
        assert!(NoiseModel::with_defaults(3).validate(3).is_ok());
        assert!(NoiseModel::with_defaults(3).validate(4).is_err());
        assert!(NoiseModel::ideal(2).is_unitary());
        assert!(NoiseModel::ideal(2).with_collective_drift(1e5).is_unitary());
        assert!(!NoiseModel::with_defaults(2).is_unitary());
        let bad = NoiseModel::ideal(1).with_t1_t2(10e-6, 30e-6);
        assert!(matches!(bad.validate(1), Err(Error::T2ExceedsLimit { .. })));
    }
}
