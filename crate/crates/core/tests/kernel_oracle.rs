mod common;

use approx::assert_abs_diff_eq;
use common::*;
use monotone_lab::circuits::{build_prep, run, target_state, StateFamily};
use monotone_lab::random;
use monotone_lab::rng::rng_from;
use monotone_lab::{Gate, GateKind, PauliString, State, StateF32};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn textbook(kind: &GateKind<f64>) -> DMatrix<Complex64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let o = c(0., 0.);
    match *kind {
        GateKind::H => m2([c(r, 0.), c(r, 0.), c(r, 0.), c(-r, 0.)]),
        GateKind::X => pauli('X'),
        GateKind::Y => pauli('Y'),
        GateKind::Z => pauli('Z'),
        GateKind::Rz(t) => m2([
            Complex64::from_polar(1.0, -t / 2.0),
            o,
            o,
            Complex64::from_polar(1.0, t / 2.0),
        ]),
        // exp(-iθσ/2) = cos(θ/2) I - i sin(θ/2) σ
        GateKind::X90 => id(2).scale(r) - pauli('X') * c(0., r),
        GateKind::Y90 => id(2).scale(r) - pauli('Y') * c(0., r),
        GateKind::Ym90 => id(2).scale(r) + pauli('Y') * c(0., r),
        GateKind::Idle => id(2),
        GateKind::Cnot | GateKind::Cz => unreachable!("two-qubit gates embed separately"),
    }
}

fn dense_gate(g: &Gate<f64>, n: usize) -> DMatrix<Complex64> {
    match g.kind {
        GateKind::Cnot => cnot_dense(g.targets[0], g.targets[1], n),
        GateKind::Cz => cz_dense(g.targets[0], g.targets[1], n),
        ref k => embed1(&textbook(k), g.targets[0], n),
    }
}

fn random_gate<R: Rng>(n: usize, rng: &mut R) -> Gate<f64> {
    let q = rng.random_range(0..n);
    let mut other = rng.random_range(0..n - 1);
    if other >= q {
        other += 1;
    }
    match rng.random_range(0..10) {
        0 => Gate::h(q),
        1 => Gate::x(q),
        2 => Gate::y(q),
        3 => Gate::z(q),
        4 => Gate::rz(q, rng.random_range(-7.0..7.0)),
        5 => Gate::x90(q),
        6 => Gate::y90(q),
        7 => Gate::ym90(q),
        8 => Gate::cnot(q, other),
        _ => Gate::cz(q, other),
    }
}

fn ps(s: &str) -> PauliString {
    s.parse().unwrap()
}

#[test]
fn gates_match_dense_embedding_on_pure_and_mixed_states() {
    let mut rng = rng_from(11, &[]);
    for trial in 0..200 {
        let n = 2 + trial % 3;
        let g = random_gate(n, &mut rng);
        let u = dense_gate(&g, n);

        let psi: State = random::pure_state(n, &mut rng).unwrap();
        let want = &u * psi_dense(&psi);
        let got = psi_dense(&psi.apply_gate(&g).unwrap());
        let diff = (want - got).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12, "{g:?} on n={n}: {diff}");

        let rho: State = random::mixed_state(n, 3, &mut rng).unwrap();
        let want = &u * rho_dense(&rho) * u.adjoint();
        let got = rho_dense(&rho.apply_gate(&g).unwrap());
        assert!(max_diff(&want, &got) < 1e-12, "{g:?} on mixed n={n}");
    }
}

#[test]
fn cnot_is_a_basis_permutation_with_msb_first_ordering() {
    // |10⟩ (qubit 0 set) -> |11⟩ under CNOT(0,1); |01⟩ is unchanged.
    let s = State::basis(2, 0b10).unwrap().apply_gate(&Gate::cnot(0, 1)).unwrap();
    assert_abs_diff_eq!(s.amplitudes().unwrap()[0b11].re, 1.0);
    let s = State::basis(2, 0b01).unwrap().apply_gate(&Gate::cnot(0, 1)).unwrap();
    assert_abs_diff_eq!(s.amplitudes().unwrap()[0b01].re, 1.0);
    // Non-adjacent, reversed control/target on three qubits.
    for i in 0..8 {
        let s = State::basis(3, i).unwrap().apply_gate(&Gate::cnot(2, 0)).unwrap();
        let j = if i & 1 == 1 { i ^ 0b100 } else { i };
        assert_abs_diff_eq!(s.amplitudes().unwrap()[j].re, 1.0);
    }
}

#[test]
fn cz_equals_h_cnot_h() {
    let mut rng = rng_from(3, &[]);
    for _ in 0..20 {
        let psi: State = random::pure_state(3, &mut rng).unwrap();
        let a = psi.apply_gate(&Gate::cz(0, 2)).unwrap();
        let mut b = psi.clone();
        for g in [Gate::h(2), Gate::cnot(0, 2), Gate::h(2)] {
            b.apply_gate_mut(&g).unwrap();
        }
        assert!(a.fidelity_with_pure(&b).unwrap() > 1.0 - 1e-12);
    }
}

#[test]
fn triple_pi_rotation_flips_ghz3_parity() {
    let mut s = run(&build_prep::<f64>(StateFamily::Ghz, 3).unwrap(), None, 0).unwrap();
    assert_abs_diff_eq!(s.pauli_expectation(&ps("XXX")).unwrap(), 1.0, epsilon = 1e-12);
    for _ in 0..3 {
        s.apply_gate_mut(&Gate::rz(0, std::f64::consts::PI)).unwrap();
    }
    assert_abs_diff_eq!(s.pauli_expectation(&ps("XXX")).unwrap(), -1.0, epsilon = 1e-12);
}

#[test]
fn prep_circuits_reach_their_targets() {
    for fam in [StateFamily::Ghz, StateFamily::Cluster, StateFamily::Uniform] {
        for n in 2..=6 {
            let s: State = run(&build_prep(fam, n).unwrap(), None, 0).unwrap();
            let t: State = target_state(fam, n).unwrap();
            assert_abs_diff_eq!(s.fidelity_with_pure(&t).unwrap(), 1.0, epsilon = 1e-12);
        }
    }
}

#[test]
fn cluster_target_matches_cz_chain_on_plus_states() {
    for n in 2..=5 {
        let plus: DMatrix<Complex64> = DMatrix::from_element(1 << n, 1, c(0.5f64.powi(n as i32).sqrt(), 0.));
        let mut u = id(1 << n);
        for i in 0..n - 1 {
            u = cz_dense(i, i + 1, n) * u;
        }
        let want = u * plus;
        let got = psi_dense(&target_state::<f64>(StateFamily::Cluster, n).unwrap());
        let diff = (want - got).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12, "n={n}");
    }
}

#[test]
fn trace_is_preserved_over_long_random_circuits() {
    let mut rng = rng_from(5, &[]);
    let mut pure = State::zero(4).unwrap();
    let mut mixed: State = random::mixed_state(4, 16, &mut rng).unwrap();
    for _ in 0..1000 {
        let g = random_gate(4, &mut rng);
        pure.apply_gate_mut(&g).unwrap();
        mixed.apply_gate_mut(&g).unwrap();
    }
    assert_abs_diff_eq!(pure.trace(), 1.0, epsilon = 1e-10);
    assert_abs_diff_eq!(mixed.trace(), 1.0, epsilon = 1e-10);
    assert_abs_diff_eq!(pure.purity(), 1.0, epsilon = 1e-10);
    assert!(mixed.validate().is_ok());
}

#[test]
fn pauli_expectation_matches_dense_trace() {
    let mut rng = rng_from(8, &[]);
    for trial in 0..100 {
        let n = 1 + trial % 5;
        let label: String = (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)]).collect();
        let p: PauliString = label.parse::<PauliString>().unwrap().with_sign(rng.random_bool(0.5));
        let s: State = if trial % 2 == 0 {
            random::pure_state(n, &mut rng)
        } else {
            random::mixed_state(n, 2, &mut rng)
        }
        .unwrap();
        let want = expectation_dense(&rho_dense(&s), &p);
        assert_abs_diff_eq!(s.pauli_expectation(&p).unwrap(), want, epsilon = 1e-12);
        if p.is_identity() {
            assert_abs_diff_eq!(want, p.sign::<f64>(), epsilon = 1e-12);
        }
    }
}

#[test]
fn antilinear_expectation_is_psi_transpose_p_psi() {
    let mut rng = rng_from(9, &[]);
    for n in 1..=4 {
        let label: String = (0..n).map(|i| ['X', 'Y', 'Z', 'I'][(i + n) % 4]).collect();
        let p: PauliString = label.parse().unwrap();
        let psi: State = random::pure_state(n, &mut rng).unwrap();
        let v = psi_dense(&psi);
        let want = (v.transpose() * pauli_dense(&p) * &v)[(0, 0)];
        let got = psi.antilinear_expectation(&p).unwrap();
        assert_abs_diff_eq!(got.re, want.re, epsilon = 1e-12);
        assert_abs_diff_eq!(got.im, want.im, epsilon = 1e-12);

        let real: State = random::real_pure_state(n, &mut rng).unwrap();
        let a = real.antilinear_expectation(&p).unwrap();
        assert_abs_diff_eq!(a.re, real.pauli_expectation(&p).unwrap(), epsilon = 1e-12);
        assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-12);
    }
}

#[test]
fn partial_trace_matches_dense_contraction() {
    let mut rng = rng_from(10, &[]);
    let s: State = random::mixed_state(3, 8, &mut rng).unwrap();
    let rho = rho_dense(&s);
    // keep qubits 0 and 2: sum over the middle bit
    let mut want = DMatrix::<Complex64>::zeros(4, 4);
    for a in 0..4 {
        for b in 0..4 {
            for m in 0..2 {
                let full = |k: usize| ((k >> 1) << 2) | (m << 1) | (k & 1);
                want[(a, b)] += rho[(full(a), full(b))];
            }
        }
    }
    let got = rho_dense(&s.partial_trace(&[0, 2]).unwrap());
    assert!(max_diff(&want, &got) < 1e-12);
}

#[test]
fn single_precision_tracks_double_precision() {
    let g64: State = run(&build_prep(StateFamily::Cluster, 4).unwrap(), None, 0).unwrap();
    let g32: StateF32 = run(&build_prep(StateFamily::Cluster, 4).unwrap(), None, 0).unwrap();
    for label in ["XZII", "ZXZI", "IZXZ", "IIZX", "XXXX"] {
        let a = g64.pauli_expectation(&ps(label)).unwrap();
        let b = g32.pauli_expectation(&ps(label)).unwrap() as f64;
        assert!((a - b).abs() < 1e-5, "{label}: {a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rz_composes_additively(a in -10.0f64..10.0, b in -10.0f64..10.0, seed in any::<u64>()) {
        let mut rng = rng_from(seed, &[]);
        let psi: State = random::pure_state(1, &mut rng).unwrap();
        let two = psi.apply_gate(&Gate::rz(0, a)).unwrap().apply_gate(&Gate::rz(0, b)).unwrap();
        let one = psi.apply_gate(&Gate::rz(0, a + b)).unwrap();
        let (x, y) = (two.amplitudes().unwrap(), one.amplitudes().unwrap());
        for k in 0..2 {
            prop_assert!((x[k] - y[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn gates_are_involutive_or_inverse_pairs(seed in any::<u64>(), q in 0usize..3) {
        let mut rng = rng_from(seed, &[]);
        let psi: State = random::pure_state(3, &mut rng).unwrap();
        let back = psi.apply_gate(&Gate::y90(q)).unwrap().apply_gate(&Gate::ym90(q)).unwrap();
        prop_assert!(back.fidelity_with_pure(&psi).unwrap() > 1.0 - 1e-12);
        let hh = psi.apply_gate(&Gate::h(q)).unwrap().apply_gate(&Gate::h(q)).unwrap();
        prop_assert!(hh.fidelity_with_pure(&psi).unwrap() > 1.0 - 1e-12);
    }
}
