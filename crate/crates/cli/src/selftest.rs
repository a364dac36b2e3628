use std::collections::BTreeMap;

use monotone_lab::circuits::{build_prep, run, target_state, StateFamily};
use monotone_lab::measure::{expectation_from_counts, CountsRecord};
use monotone_lab::monotones::{e3, e4a, stabilizer_group, EvalMode};
use monotone_lab::noise::{apply_confusion, cnot_error_channel, confusion_channel, idle_channel, ReadoutError};
use monotone_lab::{Gate, PauliString, State};

type Check = fn() -> Result<(), String>;

fn close(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what}: got {got}, expected {want}"))
    }
}

fn ps(s: &str) -> PauliString {
    s.parse().expect("static label")
}

fn e<T: std::fmt::Display>(err: T) -> String {
    err.to_string()
}

fn hadamard() -> Result<(), String> {
    let s = State::zero(1).map_err(e)?.apply_gate(&Gate::h(0)).map_err(e)?;
    close("<X> after H", s.pauli_expectation(&ps("X")).map_err(e)?, 1.0, 1e-12)
}

fn bell_cnot() -> Result<(), String> {
    let mut s = State::zero(2).map_err(e)?;
    s.apply_gate_mut(&Gate::h(0)).map_err(e)?;
    s.apply_gate_mut(&Gate::cnot(0, 1)).map_err(e)?;
    let bell: State = target_state(StateFamily::Bell, 2).map_err(e)?;
    close("Bell fidelity", s.fidelity_with_pure(&bell).map_err(e)?, 1.0, 1e-12)
}

fn ghz_stabilizers() -> Result<(), String> {
    let s = run(&build_prep(StateFamily::Ghz, 3).map_err(e)?, None, 0).map_err(e)?;
    for l in ["XXX", "ZZI", "IZZ"] {
        close(l, s.pauli_expectation(&ps(l)).map_err(e)?, 1.0, 1e-12)?;
    }
    close(
        "<Z> on |0>",
        State::zero(1).map_err(e)?.pauli_expectation(&ps("Z")).map_err(e)?,
        1.0,
        0.0,
    )
}

fn partial_trace() -> Result<(), String> {
    let bell = target_state::<f64>(StateFamily::Bell, 2).map_err(e)?;
    let r = bell.partial_trace(&[0]).map_err(e)?;
    close("purity of Bell marginal", r.purity(), 0.5, 1e-12)
}

fn channels_complete() -> Result<(), String> {
    let idle = idle_channel::<f64>(80e-9, 50e-6, 40e-6, 55e3).map_err(e)?;
    close("idle completeness", idle.completeness_error(), 0.0, 1e-12)?;
    let cnot = cnot_error_channel::<f64>(0.3).map_err(e)?;
    close("cnot completeness", cnot.completeness_error(), 0.0, 1e-12)
}

fn readout_examples() -> Result<(), String> {
    let map = confusion_channel(&[ReadoutError::symmetric(0.1)]).map_err(e)?;
    let d = apply_confusion(&[1.0, 0.0], &map).map_err(e)?;
    close("raw <Z> with 10% flips", d[0] - d[1], 0.8, 1e-12)?;
    let map = confusion_channel(&[ReadoutError { e0: 0.02, e1: 0.08 }]).map_err(e)?;
    let d = apply_confusion(&[0.0, 1.0], &map).map_err(e)?;
    close("P(read 1 | 1)", d[1], 0.92, 1e-12)
}

fn parity_estimator() -> Result<(), String> {
    let rec = CountsRecord {
        basis: ps("IZ"),
        n_qubits: 2,
        shots: 8000,
        counts: BTreeMap::from([("00".to_string(), 6000), ("10".to_string(), 2000)]),
        delay_us: None,
        metadata: BTreeMap::new(),
    };
    close("IZ parity", expectation_from_counts(&rec).map_err(e)?.value, 1.0, 0.0)
}

fn stabilizer_groups() -> Result<(), String> {
    let g = stabilizer_group(StateFamily::Ghz, 3).map_err(e)?;
    for l in ["XXX", "ZZI", "IZZ"] {
        if !g.contains(&ps(l)) {
            return Err(format!("GHZ3 group lacks {l}"));
        }
    }
    if g.len() != 8 {
        return Err(format!("GHZ3 group has {} elements", g.len()));
    }
    Ok(())
}

fn ideal_monotones() -> Result<(), String> {
    let ghz3: State = target_state(StateFamily::Ghz, 3).map_err(e)?;
    close(
        "E3(GHZ3)",
        e3(&ghz3, EvalMode::RealApproximation).map_err(e)?.value,
        1.0,
        1e-12,
    )?;
    let plus: State = target_state(StateFamily::Uniform, 3).map_err(e)?;
    close(
        "E3(|+>^3)",
        e3(&plus, EvalMode::RealApproximation).map_err(e)?.value,
        0.0,
        1e-12,
    )?;
    let zero4 = State::zero(4).map_err(e)?;
    close(
        "E4a(|0000>)",
        e4a(&zero4, EvalMode::RealApproximation).map_err(e)?.value,
        0.0,
        1e-12,
    )
}

pub const CHECKS: [(&str, Check); 9] = [
    ("hadamard", hadamard),
    ("bell-cnot", bell_cnot),
    ("ghz-stabilizers", ghz_stabilizers),
    ("partial-trace", partial_trace),
    ("channel-completeness", channels_complete),
    ("readout-confusion", readout_examples),
    ("parity-estimator", parity_estimator),
    ("stabilizer-groups", stabilizer_groups),
    ("ideal-monotones", ideal_monotones),
];

/// Runs every check, printing one `ok`/`FAIL` line each; returns the
/// number of failures.
pub fn run_selftest(out: &mut dyn std::io::Write) -> usize {
    let mut failures = 0;
    for (name, check) in CHECKS {
        match check() {
            Ok(()) => {
                let _ = writeln!(out, "ok   {name}");
            }
            Err(msg) => {
                failures += 1;
                let _ = writeln!(out, "FAIL {name}: {msg}");
            }
        }
    }
    failures
}
