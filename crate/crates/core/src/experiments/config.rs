use serde::{Deserialize, Serialize};

use crate::circuits::StateFamily;
use crate::error::{Error, Result};
use crate::measure::DEFAULT_SHOTS;
use crate::monotones::{E4bVariant, EvalMode, MonotoneName, DEFAULT_BOOTSTRAP};
use crate::noise::{NoiseModel, OneOverF, ReadoutError};
use crate::qstate::{PauliString, IDLE_SLICE_S, MAX_QUBITS};

pub const DEFAULT_REPETITIONS: usize = 32;
pub const DEFAULT_PAULIS_PER_REP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    PrepError,
    #[default]
    MonotoneScan,
    PauliScan,
    RamseyScan,
    BellScan,
}

/// Where Pauli expectations come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// `tr(ρP)` (or `ψᵀPψ`) straight from the simulated state.
    #[default]
    Exact,
    /// Finite-shot counts with readout confusion, optionally corrected.
    Sampled,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Exact => "exact",
            Source::Sampled => "sampled",
        }
    }
}

/// A value given once for every qubit or as an explicit per-qubit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerQubit {
    All(f64),
    Each(Vec<f64>),
}

impl PerQubit {
    pub fn expand(&self, n: usize, what: &str) -> Result<Vec<f64>> {
        match self {
            PerQubit::All(v) => Ok(vec![*v; n]),
            PerQubit::Each(v) if v.len() == n => Ok(v.clone()),
            PerQubit::Each(v) => Err(Error::InvalidConfig(format!(
                "{what} lists {} values for {n} qubits",
                v.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoisePreset {
    /// No noise at all; fields below switch individual mechanisms on.
    Ideal,
    /// T1 = 50 µs, T2 = 40 µs, collective drift, CNOT depolarizing and
    /// readout error.
    #[default]
    Default,
}

/// Noise section of the config, in lab units (µs, kHz). Unset fields keep
/// the preset's value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub preset: NoisePreset,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1_us: Option<PerQubit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2_us: Option<PerQubit>,
    /// Collective GHZ phase-drift frequency, split evenly over the qubits.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fz_khz: Option<f64>,
    /// Per-qubit drift frequencies; exclusive with `fz_khz`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift_khz: Option<PerQubit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cnot_depolarizing: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub readout_e0: Option<PerQubit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub readout_e1: Option<PerQubit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oneoverf: Option<OneOverF>,
}

impl NoiseConfig {
    pub fn ideal() -> Self {
        Self {
            preset: NoisePreset::Ideal,
            ..Self::default()
        }
    }

    pub fn to_model(&self, n: usize) -> Result<NoiseModel> {
        let mut m = match self.preset {
            NoisePreset::Ideal => NoiseModel::ideal(n),
            NoisePreset::Default => NoiseModel::with_defaults(n),
        };
        if let Some(v) = &self.t1_us {
            m.t1_s = v.expand(n, "t1_us")?.into_iter().map(|t| t / 1e6).collect();
        }
        if let Some(v) = &self.t2_us {
            m.t2_s = v.expand(n, "t2_us")?.into_iter().map(|t| t / 1e6).collect();
        }
        match (self.fz_khz, &self.drift_khz) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig("set either fz_khz or drift_khz, not both".into()));
            }
            (Some(fz), None) => m = m.with_collective_drift(fz * 1e3),
            (None, Some(v)) => m.drift_hz = v.expand(n, "drift_khz")?.into_iter().map(|f| f * 1e3).collect(),
            (None, None) => {}
        }
        if let Some(p) = self.cnot_depolarizing {
            m.cnot_depolarizing = p;
        }
        if self.readout_e0.is_some() || self.readout_e1.is_some() {
            let cur = m.readout.clone();
            let e0 = match &self.readout_e0 {
                Some(v) => v.expand(n, "readout_e0")?,
                None => cur.iter().map(|r| r.e0).collect(),
            };
            let e1 = match &self.readout_e1 {
                Some(v) => v.expand(n, "readout_e1")?,
                None => cur.iter().map(|r| r.e1).collect(),
            };
            m.readout = e0.into_iter().zip(e1).map(|(e0, e1)| ReadoutError { e0, e1 }).collect();
        }
        if let Some(o) = &self.oneoverf {
            m.oneoverf = o.clone();
        }
        m.validate(n).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Ok(m)
    }
}

/// Virtual-Z compensation after each 80 ns slice.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompensationConfig {
    pub enabled: bool,
    /// Per-qubit compensation frequency; defaults to the model's total drift
    /// divided by `n` on every qubit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub khz: Option<PerQubit>,
}

impl CompensationConfig {
    pub fn frequencies_hz(&self, model: &NoiseModel) -> Result<Option<Vec<f64>>> {
        if !self.enabled {
            return Ok(None);
        }
        let n = model.n_qubits();
        Ok(Some(match &self.khz {
            Some(v) => v.expand(n, "compensation khz")?.into_iter().map(|f| f * 1e3).collect(),
            None => vec![model.total_drift_hz() / n as f64; n],
        }))
    }
}

/// Evenly spaced requested delays in µs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeGrid {
    pub start_us: f64,
    pub stop_us: f64,
    pub points: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            start_us: 0.0,
            stop_us: 10.0,
            points: 51,
        }
    }
}

impl TimeGrid {
    pub fn new(start_us: f64, stop_us: f64, points: usize) -> Self {
        Self {
            start_us,
            stop_us,
            points,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 1 {
            return Err(Error::InvalidConfig("grid needs at least one point".into()));
        }
        if !(self.start_us >= 0.0 && self.stop_us >= self.start_us && self.stop_us.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "grid must satisfy 0 <= start_us <= stop_us < inf, got [{}, {}]",
                self.start_us, self.stop_us
            )));
        }
        Ok(())
    }

    pub fn times_us(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start_us];
        }
        let step = (self.stop_us - self.start_us) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.start_us + step * i as f64).collect()
    }
}

/// Realized delay in µs for `slices` identity slices.
pub fn slices_to_us(slices: usize) -> f64 {
    slices as f64 * (IDLE_SLICE_S * 1e9).round() / 1e3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub family: StateFamily,
    pub n: usize,
    pub seed: u64,
    pub shots: u64,
    pub repetitions: usize,
    pub paulis_per_rep: usize,
    pub source: Source,
    pub mode: EvalMode,
    /// Monotones to evaluate in a monotone scan; empty picks the natural
    /// set for `n` (C2, E3, or E4a + E4b).
    pub quantities: Vec<MonotoneName>,
    pub readout_correction: bool,
    pub bootstrap: usize,
    pub ramsey_qubit: usize,
    /// Observable of a Pauli scan; `X^⊗n` when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pauli: Option<PauliString>,
    pub e4b_variant: E4bVariant,
    pub grid: TimeGrid,
    pub noise: NoiseConfig,
    pub compensation: CompensationConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentKind::default(),
            family: StateFamily::Ghz,
            n: 3,
            seed: 0,
            shots: DEFAULT_SHOTS,
            repetitions: DEFAULT_REPETITIONS,
            paulis_per_rep: DEFAULT_PAULIS_PER_REP,
            source: Source::default(),
            mode: EvalMode::default(),
            quantities: Vec::new(),
            readout_correction: true,
            bootstrap: DEFAULT_BOOTSTRAP,
            ramsey_qubit: 0,
            pauli: None,
            e4b_variant: E4bVariant::default(),
            grid: TimeGrid::default(),
            noise: NoiseConfig::default(),
            compensation: CompensationConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        let min_n = if self.experiment == ExperimentKind::RamseyScan {
            1
        } else {
            2
        };
        if !(min_n..=MAX_QUBITS).contains(&self.n) {
            return bad(format!("n = {} outside {min_n}..={MAX_QUBITS}", self.n));
        }
        if self.family == StateFamily::Bell && self.n != 2 {
            return bad("bell family requires n = 2".into());
        }
        if self.shots < 1 {
            return bad("shots must be >= 1".into());
        }
        if self.repetitions < 1 {
            return bad("repetitions must be >= 1".into());
        }
        if self.paulis_per_rep < 1 {
            return bad("paulis_per_rep must be >= 1".into());
        }
        self.grid.validate()?;
        if self.source == Source::Sampled && self.mode == EvalMode::ExactAntilinear {
            return bad("exact-antilinear mode needs exact expectations; use source = \"exact\"".into());
        }
        match self.experiment {
            ExperimentKind::PrepError => {
                if !matches!(self.family, StateFamily::Ghz | StateFamily::Cluster | StateFamily::Bell) {
                    return bad(format!("prep-error needs a stabilizer target, not {}", self.family));
                }
            }
            ExperimentKind::MonotoneScan => {
                for q in self.monotones() {
                    if q.n_qubits() != self.n {
                        return bad(format!("{q} is a {}-qubit monotone but n = {}", q.n_qubits(), self.n));
                    }
                }
            }
            ExperimentKind::PauliScan => {
                if let Some(p) = &self.pauli {
                    if p.len() != self.n {
                        return bad(format!("pauli {p} has length {} but n = {}", p.len(), self.n));
                    }
                }
            }
            ExperimentKind::RamseyScan => {
                if self.ramsey_qubit >= self.n {
                    return bad(format!(
                        "ramsey_qubit {} out of range for n = {}",
                        self.ramsey_qubit, self.n
                    ));
                }
            }
            ExperimentKind::BellScan => {
                if self.n != 2 {
                    return bad("bell scan requires n = 2".into());
                }
            }
        }
        self.noise_model()?;
        Ok(())
    }

    pub fn noise_model(&self) -> Result<NoiseModel> {
        self.noise.to_model(self.n)
    }

    /// Monotones a scan reports.
    pub fn monotones(&self) -> Vec<MonotoneName> {
        if !self.quantities.is_empty() {
            return self.quantities.clone();
        }
        match self.n {
            2 => vec![MonotoneName::C2],
            4 => vec![MonotoneName::E4a, MonotoneName::E4b],
            _ => vec![MonotoneName::E3],
        }
    }

    pub fn scan_pauli(&self) -> PauliString {
        self.pauli
            .clone()
            .unwrap_or_else(|| PauliString::uniform(crate::qstate::Pauli::X, self.n))
    }
}
