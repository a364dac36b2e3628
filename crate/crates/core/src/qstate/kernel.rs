//! Small dense complex matrices and the strided "apply a k-qubit operator"
//! routine everything else is built on.
//!
//! Bit convention: in a register of `total` qubits, qubit `q` is bit
//! `total - 1 - q` of the basis index, so qubit 0 is the most significant
//! (leftmost) position. A density matrix stored row-major is treated as a
//! `2n`-qubit vector whose first `n` qubits index the row and last `n` the
//! column.

use crate::scalar::{czero, Real, C};

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![czero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_rows(dim: usize, data: Vec<C<T>>) -> Self {
        assert_eq!(data.len(), dim * dim, "matrix data length");
        Self { dim, data }
    }

    pub fn diag(entries: &[C<T>]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * entries.len() + i] = e;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn data(&self) -> &[C<T>] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C<T> {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C<T>) {
        self.data[r * self.dim + c] = v;
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == czero() {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] = out.data[i * d + j] + a * other.data[k * d + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    /// Kronecker product `self ⊗ other` (self on the more significant bits).
    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.dim, other.dim);
        let d = a * b;
        let mut out = Self::zeros(d);
        for i in 0..a {
            for j in 0..a {
                let s = self.data[i * a + j];
                for k in 0..b {
                    for l in 0..b {
                        out.data[(i * b + k) * d + (j * b + l)] = s * other.data[k * b + l];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }
}

/// Applies `op` (dimension `2^targets.len()`) to the qubits `targets` of a
/// `total`-qubit vector in place. `targets[0]` is the most significant local
/// bit of `op`. Targets must be distinct and `< total`; callers validate.
pub fn apply_on<T: Real>(vec: &mut [C<T>], total: usize, targets: &[usize], op: &Matrix<T>) {
    let k = targets.len();
    let local = 1usize << k;
    debug_assert_eq!(op.dim(), local);
    debug_assert_eq!(vec.len(), 1usize << total);

    let bit = |q: usize| 1usize << (total - 1 - q);
    let offsets: Vec<usize> = (0..local)
        .map(|l| {
            targets
                .iter()
                .enumerate()
                .filter(|&(pos, _)| (l >> (k - 1 - pos)) & 1 == 1)
                .map(|(_, &q)| bit(q))
                .sum()
        })
        .collect();
    let mask: usize = targets.iter().map(|&q| bit(q)).sum();

    let mut gathered = vec![czero::<T>(); local];
    let m = op.data();
    for base in 0..vec.len() {
        if base & mask != 0 {
            continue;
        }
        for (g, &off) in gathered.iter_mut().zip(&offsets) {
            *g = vec[base + off];
        }
        for (r, &off) in offsets.iter().enumerate() {
            let row = &m[r * local..(r + 1) * local];
            let mut acc = czero::<T>();
            for (&a, &g) in row.iter().zip(&gathered) {
                acc = acc + a * g;
            }
            vec[base + off] = acc;
        }
    }
}
