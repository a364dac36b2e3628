//! Dense reference implementations built on nalgebra, independent of the
//! crate's index-twiddling kernel.
#![allow(dead_code)]

use monotone_lab::{PauliString, State};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn m2(a: [C; 4]) -> DMatrix<C> {
    DMatrix::from_row_slice(2, 2, &a)
}

pub fn id(d: usize) -> DMatrix<C> {
    DMatrix::identity(d, d)
}

pub fn pauli(ch: char) -> DMatrix<C> {
    let (o, l, i) = (c(0., 0.), c(1., 0.), c(0., 1.));
    match ch {
        'I' => id(2),
        'X' => m2([o, l, l, o]),
        'Y' => m2([o, -i, i, o]),
        'Z' => m2([l, o, o, -l]),
        _ => panic!("bad pauli {ch}"),
    }
}

pub fn kron_all(ms: &[DMatrix<C>]) -> DMatrix<C> {
    ms.iter().skip(1).fold(ms[0].clone(), |acc, m| acc.kronecker(m))
}

/// Qubit 0 is the leftmost factor.
pub fn embed1(u: &DMatrix<C>, q: usize, n: usize) -> DMatrix<C> {
    let fs: Vec<DMatrix<C>> = (0..n).map(|k| if k == q { u.clone() } else { id(2) }).collect();
    kron_all(&fs)
}

pub fn pauli_dense(p: &PauliString) -> DMatrix<C> {
    let fs: Vec<DMatrix<C>> = p.label().chars().map(pauli).collect();
    let m = kron_all(&fs);
    if p.is_negative() {
        -m
    } else {
        m
    }
}

/// `|0⟩⟨0|_c ⊗ I + |1⟩⟨1|_c ⊗ X_t`.
pub fn cnot_dense(ctl: usize, tgt: usize, n: usize) -> DMatrix<C> {
    let p0 = m2([c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
    let p1 = m2([c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]);
    let a: Vec<DMatrix<C>> = (0..n).map(|k| if k == ctl { p0.clone() } else { id(2) }).collect();
    let b: Vec<DMatrix<C>> = (0..n)
        .map(|k| {
            if k == ctl {
                p1.clone()
            } else if k == tgt {
                pauli('X')
            } else {
                id(2)
            }
        })
        .collect();
    kron_all(&a) + kron_all(&b)
}

pub fn cz_dense(a: usize, b: usize, n: usize) -> DMatrix<C> {
    let d = 1 << n;
    let mut m = id(d);
    for i in 0..d {
        let bit = |q: usize| (i >> (n - 1 - q)) & 1;
        if bit(a) == 1 && bit(b) == 1 {
            m[(i, i)] = -m[(i, i)];
        }
    }
    m
}

pub fn rho_dense(s: &State) -> DMatrix<C> {
    DMatrix::from_row_slice(s.dim(), s.dim(), &s.density_matrix())
}

pub fn psi_dense(s: &State) -> DVector<C> {
    DVector::from_column_slice(s.amplitudes().expect("pure"))
}

pub fn expectation_dense(rho: &DMatrix<C>, p: &PauliString) -> f64 {
    (rho * pauli_dense(p)).trace().re
}

pub fn max_diff(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(rho: &DMatrix<C>) -> f64 {
    rho.clone()
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}
