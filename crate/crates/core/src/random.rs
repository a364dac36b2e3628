//! Random states and unitaries for property tests and oracles.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::qstate::{Matrix, QuantumState};
use crate::scalar::{c, czero, Real, C};

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    let x: f64 = StandardNormal.sample(rng);
    T::lit(x)
}

fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    C::new(gaussian(rng), gaussian(rng))
}

/// Haar-random pure state.
pub fn pure_state<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<QuantumState<T>> {
    let amps: Vec<C<T>> = (0..1usize << n).map(|_| complex_gaussian(rng)).collect();
    QuantumState::from_amplitudes(n, normalized(amps))
}

/// Random pure state with real amplitudes.
pub fn real_pure_state<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<QuantumState<T>> {
    let amps: Vec<C<T>> = (0..1usize << n).map(|_| C::new(gaussian(rng), T::zero())).collect();
    QuantumState::from_amplitudes(n, normalized(amps))
}

fn normalized<T: Real>(mut amps: Vec<C<T>>) -> Vec<C<T>> {
    let norm = amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |x, y| x + y).sqrt();
    for a in &mut amps {
        *a = *a / norm;
    }
    amps
}

/// Random density operator `G G† / tr(G G†)` from a `2^n × rank` complex
/// Ginibre matrix `G`. `rank = 2^n` gives the Hilbert-Schmidt measure.
pub fn mixed_state<T: Real, R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Result<QuantumState<T>> {
    ginibre_state(n, rank, rng, complex_gaussian)
}

/// Random density operator with real matrix elements.
pub fn real_mixed_state<T: Real, R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Result<QuantumState<T>> {
    ginibre_state(n, rank, rng, |r| C::new(gaussian(r), T::zero()))
}

fn ginibre_state<T: Real, R: Rng + ?Sized>(
    n: usize,
    rank: usize,
    rng: &mut R,
    mut draw: impl FnMut(&mut R) -> C<T>,
) -> Result<QuantumState<T>> {
    let d = 1usize << n;
    let rank = rank.clamp(1, d);
    let g: Vec<C<T>> = (0..d * rank).map(|_| draw(rng)).collect();
    let mut rho = vec![czero::<T>(); d * d];
    for i in 0..d {
        for j in 0..d {
            let mut acc = czero::<T>();
            for k in 0..rank {
                acc = acc + g[i * rank + k] * g[j * rank + k].conj();
            }
            rho[i * d + j] = acc;
        }
    }
    let tr = (0..d).map(|i| rho[i * d + i].re).fold(T::zero(), |x, y| x + y);
    for v in &mut rho {
        *v = *v / tr;
    }
    QuantumState::from_density(n, rho)
}

/// Haar-random `dim × dim` unitary (Gram-Schmidt on a complex Ginibre matrix).
pub fn unitary<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix<T> {
    let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C<T>> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        for u in &cols {
            let proj = u.iter().zip(&v).fold(czero::<T>(), |acc, (a, b)| acc + a.conj() * b);
            for (x, a) in v.iter_mut().zip(u) {
                *x = *x - *a * proj;
            }
        }
        let norm = v.iter().map(|a| a.norm_sqr()).fold(T::zero(), |x, y| x + y).sqrt();
        if norm > T::lit(1e-6) {
            cols.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    let mut m = Matrix::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            m.set(i, j, v);
        }
    }
    m
}

/// Applies an independent Haar-random single-qubit unitary to every qubit.
pub fn apply_local_unitaries<T: Real, R: Rng + ?Sized>(state: &mut QuantumState<T>, rng: &mut R) -> Result<()> {
    for q in 0..state.n_qubits() {
        state.apply_unitary(&[q], &unitary(2, rng))?;
    }
    Ok(())
}

/// Single-qubit real density operator `(I + xX + zZ)/2` with `(x, z)`
/// uniform in the unit disk.
pub fn real_qubit_density<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Result<QuantumState<T>> {
    let r = rng.random::<f64>().sqrt();
    let theta = rng.random::<f64>() * std::f64::consts::TAU;
    let (x, z) = (r * theta.cos(), r * theta.sin());
    QuantumState::from_density(
        1,
        vec![
            c((1.0 + z) / 2.0, 0.0),
            c(x / 2.0, 0.0),
            c(x / 2.0, 0.0),
            c((1.0 - z) / 2.0, 0.0),
        ],
    )
}

/// `ρ₁ ⊗ … ⊗ ρ_n` of independent random real single-qubit states.
pub fn real_product_state<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<QuantumState<T>> {
    let mut s = real_qubit_density(rng)?;
    for _ in 1..n {
        s = s.tensor(&real_qubit_density(rng)?)?;
    }
    Ok(s)
}
