//! State-preparation, delay, compensation and Ramsey circuits, and their
//! execution with or without a noise model.

use std::collections::hash_map::{Entry, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{cnot_error_channel, idle_channel, DetuningProcess, NoiseModel};
use crate::qstate::{Gate, GateKind, Matrix, QuantumState, IDLE_SLICE_S, MAX_QUBITS};
use crate::rng::rng_from;
use crate::scalar::{c, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateFamily {
    Ghz,
    Cluster,
    /// `|+⟩^⊗n`, the unentangled control.
    Uniform,
    /// Two-qubit GHZ.
    Bell,
}

impl StateFamily {
    pub fn name(self) -> &'static str {
        match self {
            StateFamily::Ghz => "ghz",
            StateFamily::Cluster => "cluster",
            StateFamily::Uniform => "uniform",
            StateFamily::Bell => "bell",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ghz" => Ok(StateFamily::Ghz),
            "cluster" => Ok(StateFamily::Cluster),
            "uniform" => Ok(StateFamily::Uniform),
            "bell" => Ok(StateFamily::Bell),
            _ => Err(Error::InvalidParameter(format!("unknown state family {s:?}"))),
        }
    }
}

impl std::fmt::Display for StateFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered gate list on `n_qubits`, with the number of 80 ns delay slices
/// inserted so far.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit<T> {
    n_qubits: usize,
    events: Vec<Gate<T>>,
    delay_slices: usize,
}

impl<T: Real> Circuit<T> {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::UnsupportedQubitCount(n_qubits));
        }
        Ok(Self {
            n_qubits,
            events: Vec::new(),
            delay_slices: 0,
        })
    }

    pub fn push(&mut self, gate: Gate<T>) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.events.push(gate);
        Ok(())
    }

    pub fn with(mut self, gate: Gate<T>) -> Result<Self> {
        self.push(gate)?;
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn events(&self) -> &[Gate<T>] {
        &self.events
    }

    pub fn delay_slices(&self) -> usize {
        self.delay_slices
    }

    /// Delay actually realized after 80 ns quantization, seconds.
    pub fn realized_delay_s(&self) -> f64 {
        self.delay_slices as f64 * IDLE_SLICE_S
    }

    /// Longest per-qubit timeline (sum of durations of gates touching it).
    pub fn total_duration(&self) -> T {
        let mut per_qubit = vec![T::zero(); self.n_qubits];
        for g in &self.events {
            for &q in &g.targets {
                per_qubit[q] = per_qubit[q] + g.duration;
            }
        }
        per_qubit.into_iter().fold(T::zero(), T::max)
    }

    pub fn count(&self, pred: impl Fn(&GateKind<T>) -> bool) -> usize {
        self.events.iter().filter(|g| pred(&g.kind)).count()
    }
}

fn check_prep_n(family: StateFamily, n: usize) -> Result<()> {
    if family == StateFamily::Bell {
        if n != 2 {
            return Err(Error::InvalidParameter(format!("Bell family requires n = 2, got {n}")));
        }
    } else if !(2..=MAX_QUBITS).contains(&n) {
        return Err(Error::UnsupportedQubitCount(n));
    }
    Ok(())
}

/// Preparation circuit: `H` on qubit 0, then for each link a CNOT down the
/// chain followed by `H` on the new qubit for the cluster family (nothing
/// for GHZ/Bell). The uniform control is `H` on every qubit.
pub fn build_prep<T: Real>(family: StateFamily, n: usize) -> Result<Circuit<T>> {
    check_prep_n(family, n)?;
    let mut c = Circuit::new(n)?;
    if family == StateFamily::Uniform {
        for q in 0..n {
            c.push(Gate::h(q))?;
        }
        return Ok(c);
    }
    c.push(Gate::h(0))?;
    for i in 0..n - 1 {
        c.push(Gate::cnot(i, i + 1))?;
        if family == StateFamily::Cluster {
            c.push(Gate::h(i + 1))?;
        }
    }
    Ok(c)
}

/// Ideal target state built directly from its definition: the GHZ
/// superposition, `∏ CZ_{i,i+1} |+⟩^⊗n`, or `|+⟩^⊗n`.
pub fn target_state<T: Real>(family: StateFamily, n: usize) -> Result<QuantumState<T>> {
    check_prep_n(family, n)?;
    let dim = 1usize << n;
    match family {
        StateFamily::Ghz | StateFamily::Bell => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            let mut amps = vec![c::<T>(0., 0.); dim];
            amps[0] = c(r, 0.);
            amps[dim - 1] = c(r, 0.);
            QuantumState::from_amplitudes(n, amps)
        }
        StateFamily::Cluster | StateFamily::Uniform => {
            let a = 1.0 / (dim as f64).sqrt();
            let amps = (0..dim)
                .map(|i| {
                    // CZ chain phase: (-1)^{#adjacent 11 pairs}
                    let adjacent = if family == StateFamily::Cluster {
                        (i & (i >> 1)).count_ones()
                    } else {
                        0
                    };
                    c(if adjacent % 2 == 0 { a } else { -a }, 0.)
                })
                .collect();
            QuantumState::from_amplitudes(n, amps)
        }
    }
}

/// Number of 80 ns slices realizing a requested delay (round to nearest).
pub fn delay_slices_for(t_s: f64) -> Result<usize> {
    if !(t_s >= 0.0 && t_s.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "delay must be finite and >= 0, got {t_s}"
        )));
    }
    Ok((t_s / IDLE_SLICE_S).round() as usize)
}

/// Appends `round(t / 80 ns)` identity slices on every qubit.
pub fn insert_delay<T: Real>(c: &Circuit<T>, t_s: f64) -> Result<Circuit<T>> {
    let slices = delay_slices_for(t_s)?;
    let mut out = c.clone();
    for _ in 0..slices {
        for q in 0..c.n_qubits {
            out.events.push(Gate::idle(q));
        }
    }
    out.delay_slices += slices;
    Ok(out)
}

/// Follows every identity slice on qubit `j` with a zero-duration virtual
/// `Rz(−2π f_comp[j] · 80 ns)`. Qubits with zero frequency are untouched.
pub fn apply_compensation<T: Real>(c: &Circuit<T>, f_comp_hz: &[f64]) -> Result<Circuit<T>> {
    if f_comp_hz.len() != c.n_qubits {
        return Err(Error::QubitCountMismatch {
            expected: c.n_qubits,
            got: f_comp_hz.len(),
        });
    }
    let mut events = Vec::with_capacity(c.events.len());
    for g in &c.events {
        events.push(g.clone());
        if g.kind == GateKind::Idle {
            let q = g.targets[0];
            let f = f_comp_hz[q];
            if f != 0.0 {
                let theta = -2.0 * std::f64::consts::PI * f * g.duration.as_f64();
                events.push(Gate::rz(q, T::lit(theta)));
            }
        }
    }
    Ok(Circuit {
        n_qubits: c.n_qubits,
        events,
        delay_slices: c.delay_slices,
    })
}

/// Ramsey sequence on `qubit`: `e^{−iπY/4}`, delay `t` on the register,
/// `e^{+iπY/4}`; read out `⟨Z⟩` on that qubit.
pub fn build_ramsey<T: Real>(n_total: usize, qubit: usize, delay_s: f64) -> Result<Circuit<T>> {
    if qubit >= n_total {
        return Err(Error::QubitOutOfRange {
            index: qubit,
            n_qubits: n_total,
        });
    }
    let c = Circuit::new(n_total)?.with(Gate::y90(qubit))?;
    insert_delay(&c, delay_s)?.with(Gate::ym90(qubit))
}

/// Executes `c` from `|0…0⟩`.
///
/// Without a model, or with a model whose evolution is unitary (drift only),
/// the result is a pure state. Otherwise it is the density operator after
/// each gate's channel and each idle slice's T1/T2/drift channel, averaged
/// over 1/f trajectories when those are enabled.
pub fn run<T: Real>(c: &Circuit<T>, noise: Option<&NoiseModel>, seed: u64) -> Result<QuantumState<T>> {
    let states = run_trajectories(c, noise, seed)?;
    if states.len() == 1 {
        return Ok(states.into_iter().next().expect("one trajectory"));
    }
    QuantumState::mix(&states, T::one() / T::lit(states.len() as f64))
}

/// Per-trajectory final states; trajectory `k` uses the stream
/// `(seed, k)` so results do not depend on scheduling.
pub fn run_trajectories<T: Real>(
    c: &Circuit<T>,
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Result<Vec<QuantumState<T>>> {
    let n = c.n_qubits;
    let Some(model) = noise else {
        return Ok(vec![run_unitary(c, None)?]);
    };
    model.validate(n)?;
    if model.is_unitary() {
        return Ok(vec![run_unitary(c, Some(&model.drift_hz))?]);
    }

    let cnot_sup = if model.cnot_depolarizing > 0.0 {
        Some(cnot_error_channel::<T>(model.cnot_depolarizing)?.superoperator())
    } else {
        None
    };
    let m = if model.stochastic_detuning() {
        model.oneoverf.trajectories
    } else {
        1
    };
    (0..m)
        .into_par_iter()
        .map(|k| run_density_trajectory(c, model, cnot_sup.as_ref(), seed, k as u64))
        .collect()
}

fn run_unitary<T: Real>(c: &Circuit<T>, drift_hz: Option<&[f64]>) -> Result<QuantumState<T>> {
    let mut s = QuantumState::zero(c.n_qubits)?;
    for g in &c.events {
        if g.kind == GateKind::Idle {
            if let Some(f) = drift_hz.map(|d| d[g.targets[0]]).filter(|&f| f != 0.0) {
                let theta = 2.0 * std::f64::consts::PI * f * g.duration.as_f64();
                s.apply_gate_mut(&Gate::rz(g.targets[0], T::lit(theta)))?;
            }
        } else {
            s.apply_gate_mut(g)?;
        }
    }
    Ok(s)
}

fn run_density_trajectory<T: Real>(
    c: &Circuit<T>,
    model: &NoiseModel,
    cnot_sup: Option<&Matrix<T>>,
    seed: u64,
    trajectory: u64,
) -> Result<QuantumState<T>> {
    let mut rng = rng_from(seed, &[trajectory]);
    let mut detuning = if model.stochastic_detuning() {
        DetuningProcess::sample(model, c.n_qubits, &mut rng)?
    } else {
        DetuningProcess::none(c.n_qubits)
    };
    let mut cache: HashMap<(usize, u64), Matrix<T>> = HashMap::new();
    let mut s = QuantumState::zero(c.n_qubits)?.to_density();

    for g in &c.events {
        match g.kind {
            GateKind::Idle => {
                let q = g.targets[0];
                let dt = g.duration.as_f64();
                let build = |offset: f64| -> Result<Matrix<T>> {
                    Ok(
                        idle_channel::<T>(dt, model.t1_s[q], model.t2_s[q], model.drift_hz[q] + offset)?
                            .superoperator(),
                    )
                };
                if detuning.is_static() {
                    let key = (q, dt.to_bits());
                    let sup = match cache.entry(key) {
                        Entry::Occupied(e) => e.into_mut(),
                        Entry::Vacant(e) => e.insert(build(detuning.offset(q))?),
                    };
                    s.apply_superoperator(&[q], sup)?;
                } else {
                    s.apply_superoperator(&[q], &build(detuning.offset(q))?)?;
                    detuning.advance(q, dt, &mut rng);
                }
            }
            GateKind::Cnot => {
                s.apply_gate_mut(g)?;
                if let Some(sup) = cnot_sup {
                    s.apply_superoperator(&g.targets, sup)?;
                }
            }
            _ => s.apply_gate_mut(g)?,
        }
    }
    Ok(s)
}
