//! Dense pure and mixed qubit states, gate application and Pauli expectations.

mod gate;
pub mod kernel;
mod pauli;

pub(crate) use gate::validate_targets;
pub use gate::{Gate, GateKind, IDLE_SLICE_S};
pub use kernel::Matrix;
pub use pauli::{Pauli, PauliString};

use crate::error::{Error, Result};
use crate::scalar::{cone, czero, Real, C};

/// Hard cap on register size for the dense representation.
pub const MAX_QUBITS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum Repr<T> {
    /// `2^n` amplitudes.
    Pure(Vec<C<T>>),
    /// Row-major `2^n × 2^n` density operator.
    Mixed(Vec<C<T>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState<T> {
    n_qubits: usize,
    repr: Repr<T>,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::UnsupportedQubitCount(n));
    }
    Ok(())
}

impl<T: Real> QuantumState<T> {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_n(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::InvalidParameter(format!("basis index {index} >= {dim}")));
        }
        let mut amps = vec![czero(); dim];
        amps[index] = cone();
        Ok(Self {
            n_qubits: n,
            repr: Repr::Pure(amps),
        })
    }

    /// Validated pure state (normalization within 1e-10 for f64).
    pub fn from_amplitudes(n: usize, amps: Vec<C<T>>) -> Result<Self> {
        check_n(n)?;
        if amps.len() != 1usize << n {
            return Err(Error::InvalidState(format!("{} amplitudes for {n} qubits", amps.len())));
        }
        let s = Self {
            n_qubits: n,
            repr: Repr::Pure(amps),
        };
        s.validate()?;
        Ok(s)
    }

    /// Validated density operator (row-major).
    pub fn from_density(n: usize, rho: Vec<C<T>>) -> Result<Self> {
        check_n(n)?;
        let dim = 1usize << n;
        if rho.len() != dim * dim {
            return Err(Error::InvalidState(format!(
                "{} entries for {n}-qubit density",
                rho.len()
            )));
        }
        let s = Self {
            n_qubits: n,
            repr: Repr::Mixed(rho),
        };
        s.validate()?;
        Ok(s)
    }

    /// Builds a pure state without checking normalization.
    pub(crate) fn pure_unchecked(n: usize, amps: Vec<C<T>>) -> Self {
        Self {
            n_qubits: n,
            repr: Repr::Pure(amps),
        }
    }

    pub(crate) fn mixed_unchecked(n: usize, rho: Vec<C<T>>) -> Self {
        Self {
            n_qubits: n,
            repr: Repr::Mixed(rho),
        }
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    #[inline]
    pub fn repr(&self) -> &Repr<T> {
        &self.repr
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Repr::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&[C<T>]> {
        match &self.repr {
            Repr::Pure(a) => Some(a),
            Repr::Mixed(_) => None,
        }
    }

    /// Tolerances scale with machine precision so `f32` states validate too.
    fn tol(base: f64) -> T {
        let eps_scale = T::epsilon().as_f64() / f64::EPSILON;
        T::lit(base * eps_scale.max(1.0))
    }

    /// Checks the representation invariants: unit norm for pure states;
    /// Hermiticity, unit trace and a non-negative diagonal for mixed ones.
    pub fn validate(&self) -> Result<()> {
        match &self.repr {
            Repr::Pure(a) => {
                let norm: T = a.iter().map(|z| z.norm_sqr()).sum();
                if (norm - T::one()).abs() > Self::tol(1e-10) || !norm.is_finite() {
                    return Err(Error::InvalidState(format!("norm {norm}")));
                }
            }
            Repr::Mixed(rho) => {
                let d = self.dim();
                for i in 0..d {
                    for j in i..d {
                        if (rho[i * d + j] - rho[j * d + i].conj()).norm() > Self::tol(1e-12) {
                            return Err(Error::InvalidState("density operator not Hermitian".into()));
                        }
                    }
                    if rho[i * d + i].re < -Self::tol(1e-10) {
                        return Err(Error::InvalidState("negative diagonal".into()));
                    }
                }
                let tr = self.trace();
                if (tr - T::one()).abs() > Self::tol(1e-10) {
                    return Err(Error::InvalidState(format!("trace {tr}")));
                }
            }
        }
        Ok(())
    }

    /// `tr ρ` (or `⟨ψ|ψ⟩`).
    pub fn trace(&self) -> T {
        match &self.repr {
            Repr::Pure(a) => a.iter().map(|z| z.norm_sqr()).sum(),
            Repr::Mixed(rho) => {
                let d = self.dim();
                (0..d).map(|i| rho[i * d + i].re).sum()
            }
        }
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> T {
        match &self.repr {
            Repr::Pure(a) => {
                let n: T = a.iter().map(|z| z.norm_sqr()).sum();
                n * n
            }
            Repr::Mixed(rho) => rho.iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    /// `|ψ⟩⟨ψ|`; mixed states are returned unchanged.
    pub fn to_density(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            repr: Repr::Mixed(self.density_matrix()),
        }
    }

    /// Row-major density operator of the state (promoting pure states).
    pub fn density_matrix(&self) -> Vec<C<T>> {
        match &self.repr {
            Repr::Mixed(rho) => rho.clone(),
            Repr::Pure(a) => {
                let d = a.len();
                let mut rho = vec![czero(); d * d];
                for i in 0..d {
                    for j in 0..d {
                        rho[i * d + j] = a[i] * a[j].conj();
                    }
                }
                rho
            }
        }
    }

    /// `U|ψ⟩` or `UρU†`.
    pub fn apply_gate(&self, gate: &Gate<T>) -> Result<Self> {
        let mut out = self.clone();
        out.apply_gate_mut(gate)?;
        Ok(out)
    }

    pub fn apply_gate_mut(&mut self, gate: &Gate<T>) -> Result<()> {
        gate.validate(self.n_qubits)?;
        if gate.kind == GateKind::Idle {
            return Ok(());
        }
        self.apply_unitary(&gate.targets, &gate.matrix())
    }

    /// Applies an arbitrary `2^k × 2^k` unitary on `targets`.
    pub fn apply_unitary(&mut self, targets: &[usize], u: &Matrix<T>) -> Result<()> {
        validate_targets(targets, self.n_qubits)?;
        if u.dim() != 1usize << targets.len() {
            return Err(Error::InvalidParameter(
                "operator dimension does not match targets".into(),
            ));
        }
        let n = self.n_qubits;
        match &mut self.repr {
            Repr::Pure(a) => kernel::apply_on(a, n, targets, u),
            Repr::Mixed(rho) => {
                let cols: Vec<usize> = targets.iter().map(|&q| q + n).collect();
                kernel::apply_on(rho, 2 * n, targets, u);
                kernel::apply_on(rho, 2 * n, &cols, &u.conj());
            }
        }
        Ok(())
    }

    /// Applies a superoperator `S = Σ K ⊗ K*` (dimension `4^k`) acting on
    /// `targets`. Pure states are promoted to density operators.
    pub fn apply_superoperator(&mut self, targets: &[usize], sup: &Matrix<T>) -> Result<()> {
        validate_targets(targets, self.n_qubits)?;
        if sup.dim() != 1usize << (2 * targets.len()) {
            return Err(Error::InvalidParameter(
                "superoperator dimension does not match targets".into(),
            ));
        }
        if self.is_pure() {
            *self = self.to_density();
        }
        let n = self.n_qubits;
        let mut all: Vec<usize> = targets.to_vec();
        all.extend(targets.iter().map(|&q| q + n));
        if let Repr::Mixed(rho) = &mut self.repr {
            kernel::apply_on(rho, 2 * n, &all, sup);
        }
        Ok(())
    }

    /// `sign · tr(ρP)`; exact real part (the imaginary part vanishes for
    /// Hermitian `P`).
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<T> {
        p.check_len(self.n_qubits)?;
        let m = p.masks();
        let v = match &self.repr {
            Repr::Pure(a) => a
                .iter()
                .enumerate()
                .map(|(j, &aj)| (a[j ^ m.flip].conj() * m.phase_of::<T>(j) * aj).re)
                .sum::<T>(),
            Repr::Mixed(rho) => {
                let d = self.dim();
                (0..d)
                    .map(|j| (rho[j * d + (j ^ m.flip)] * m.phase_of::<T>(j)).re)
                    .sum::<T>()
            }
        };
        Ok(p.sign::<T>() * v)
    }

    /// `sign · ψᵀPψ`, the expectation of `P` composed with complex
    /// conjugation. Defined for pure states only.
    pub fn antilinear_expectation(&self, p: &PauliString) -> Result<C<T>> {
        p.check_len(self.n_qubits)?;
        let a = self.amplitudes().ok_or(Error::RequiresPureState)?;
        let m = p.masks();
        let mut acc = czero::<T>();
        for (j, &aj) in a.iter().enumerate() {
            acc = acc + a[j ^ m.flip] * m.phase_of::<T>(j) * aj;
        }
        Ok(acc * p.sign::<T>())
    }

    /// Reduced state on `keep` (ascending qubit order in the output).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidParameter("empty keep set".into()));
        }
        validate_targets(keep, self.n_qubits)?;
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let n = self.n_qubits;
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let k = keep.len();
        let dk = 1usize << k;
        let de = 1usize << traced.len();

        let compose = |kept_bits: usize, env_bits: usize| -> usize {
            let mut idx = 0usize;
            for (pos, &q) in keep.iter().enumerate() {
                if (kept_bits >> (k - 1 - pos)) & 1 == 1 {
                    idx |= 1 << (n - 1 - q);
                }
            }
            for (pos, &q) in traced.iter().enumerate() {
                if (env_bits >> (traced.len() - 1 - pos)) & 1 == 1 {
                    idx |= 1 << (n - 1 - q);
                }
            }
            idx
        };

        let d = self.dim();
        let mut out = vec![czero::<T>(); dk * dk];
        match &self.repr {
            Repr::Pure(a) => {
                for e in 0..de {
                    for r in 0..dk {
                        let ar = a[compose(r, e)];
                        for c in 0..dk {
                            out[r * dk + c] = out[r * dk + c] + ar * a[compose(c, e)].conj();
                        }
                    }
                }
            }
            Repr::Mixed(rho) => {
                for e in 0..de {
                    for r in 0..dk {
                        let ir = compose(r, e);
                        for c in 0..dk {
                            out[r * dk + c] = out[r * dk + c] + rho[ir * d + compose(c, e)];
                        }
                    }
                }
            }
        }
        Ok(Self::mixed_unchecked(k, out))
    }

    /// `self ⊗ other`, keeping the pure representation when both are pure.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.n_qubits + other.n_qubits;
        check_n(n)?;
        match (&self.repr, &other.repr) {
            (Repr::Pure(a), Repr::Pure(b)) => {
                let amps = a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect();
                Ok(Self::pure_unchecked(n, amps))
            }
            _ => {
                let ra = Matrix::from_rows(self.dim(), self.density_matrix());
                let rb = Matrix::from_rows(other.dim(), other.density_matrix());
                Ok(Self::mixed_unchecked(n, ra.kron(&rb).data().to_vec()))
            }
        }
    }

    /// `⟨ψ|ρ|ψ⟩` against a pure target.
    pub fn fidelity_with_pure(&self, target: &Self) -> Result<T> {
        if target.n_qubits != self.n_qubits {
            return Err(Error::QubitCountMismatch {
                expected: target.n_qubits,
                got: self.n_qubits,
            });
        }
        let psi = target.amplitudes().ok_or(Error::RequiresPureState)?;
        Ok(match &self.repr {
            Repr::Pure(a) => {
                let ov: C<T> = psi.iter().zip(a).fold(czero(), |acc, (&p, &x)| acc + p.conj() * x);
                ov.norm_sqr()
            }
            Repr::Mixed(rho) => {
                let d = self.dim();
                let mut acc = czero::<T>();
                for i in 0..d {
                    for j in 0..d {
                        acc = acc + psi[i].conj() * rho[i * d + j] * psi[j];
                    }
                }
                acc.re
            }
        })
    }

    /// Largest `|Im|` over the stored entries.
    pub fn max_imag(&self) -> T {
        let data = match &self.repr {
            Repr::Pure(a) => a,
            Repr::Mixed(r) => r,
        };
        data.iter().map(|z| z.im.abs()).fold(T::zero(), T::max)
    }

    /// Entrywise linear combination of density operators; used to average
    /// trajectories.
    pub(crate) fn mix(states: &[Self], weight: T) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidParameter("no states to mix".into()))?;
        let n = first.n_qubits;
        let d = first.dim();
        let mut acc = vec![czero::<T>(); d * d];
        for s in states {
            if s.n_qubits != n {
                return Err(Error::QubitCountMismatch {
                    expected: n,
                    got: s.n_qubits,
                });
            }
            for (a, b) in acc.iter_mut().zip(s.density_matrix()) {
                *a = *a + b * weight;
            }
        }
        Ok(Self::mixed_unchecked(n, acc))
    }
}
