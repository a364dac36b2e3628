use crate::error::{Error, Result};
use crate::qstate::kernel::Matrix;
use crate::scalar::{c, Real, C};

/// Duration of one identity slice used to build delays, in seconds.
pub const IDLE_SLICE_S: f64 = 80e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind<T> {
    H,
    X,
    Y,
    Z,
    /// `diag(e^{-iθ/2}, e^{+iθ/2})`.
    Rz(T),
    /// `e^{-iπX/4}`.
    X90,
    /// `e^{-iπY/4}`.
    Y90,
    /// `e^{+iπY/4}`.
    Ym90,
    /// Identity slice of finite duration; noise models attach idle channels here.
    Idle,
    /// Control is `targets[0]`.
    Cnot,
    Cz,
}

impl<T: Real> GateKind<T> {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz => 2,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::Rz(_) => "Rz",
            GateKind::X90 => "X90",
            GateKind::Y90 => "Y90",
            GateKind::Ym90 => "Y-90",
            GateKind::Idle => "I_delay",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
        }
    }

    pub fn matrix(&self) -> Matrix<T> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let z = c::<T>(0., 0.);
        let o = c::<T>(1., 0.);
        match *self {
            GateKind::H => Matrix::from_rows(2, vec![c(r, 0.), c(r, 0.), c(r, 0.), c(-r, 0.)]),
            GateKind::X => Matrix::from_rows(2, vec![z, o, o, z]),
            GateKind::Y => Matrix::from_rows(2, vec![z, c(0., -1.), c(0., 1.), z]),
            GateKind::Z => Matrix::diag(&[o, -o]),
            GateKind::Rz(theta) => {
                let half = theta / T::lit(2.0);
                Matrix::diag(&[C::from_polar(T::one(), -half), C::from_polar(T::one(), half)])
            }
            GateKind::X90 => Matrix::from_rows(2, vec![c(r, 0.), c(0., -r), c(0., -r), c(r, 0.)]),
            GateKind::Y90 => Matrix::from_rows(2, vec![c(r, 0.), c(-r, 0.), c(r, 0.), c(r, 0.)]),
            GateKind::Ym90 => Matrix::from_rows(2, vec![c(r, 0.), c(r, 0.), c(-r, 0.), c(r, 0.)]),
            GateKind::Idle => Matrix::identity(2),
            GateKind::Cnot => {
                let mut m = Matrix::zeros(4);
                m.set(0, 0, o);
                m.set(1, 1, o);
                m.set(2, 3, o);
                m.set(3, 2, o);
                m
            }
            GateKind::Cz => Matrix::diag(&[o, o, o, -o]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate<T> {
    pub kind: GateKind<T>,
    pub targets: Vec<usize>,
    /// Seconds of wall-clock time the gate occupies on its targets.
    pub duration: T,
}

impl<T: Real> Gate<T> {
    fn make(kind: GateKind<T>, targets: Vec<usize>) -> Self {
        let duration = if kind == GateKind::Idle {
            T::lit(IDLE_SLICE_S)
        } else {
            T::zero()
        };
        Self {
            kind,
            targets,
            duration,
        }
    }

    pub fn h(q: usize) -> Self {
        Self::make(GateKind::H, vec![q])
    }
    pub fn x(q: usize) -> Self {
        Self::make(GateKind::X, vec![q])
    }
    pub fn y(q: usize) -> Self {
        Self::make(GateKind::Y, vec![q])
    }
    pub fn z(q: usize) -> Self {
        Self::make(GateKind::Z, vec![q])
    }
    pub fn rz(q: usize, theta: T) -> Self {
        Self::make(GateKind::Rz(theta), vec![q])
    }
    pub fn x90(q: usize) -> Self {
        Self::make(GateKind::X90, vec![q])
    }
    pub fn y90(q: usize) -> Self {
        Self::make(GateKind::Y90, vec![q])
    }
    pub fn ym90(q: usize) -> Self {
        Self::make(GateKind::Ym90, vec![q])
    }
    /// One 80 ns identity slice.
    pub fn idle(q: usize) -> Self {
        Self::make(GateKind::Idle, vec![q])
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::make(GateKind::Cnot, vec![control, target])
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::make(GateKind::Cz, vec![a, b])
    }

    pub fn matrix(&self) -> Matrix<T> {
        self.kind.matrix()
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.targets.len() != self.kind.arity() {
            return Err(Error::InvalidParameter(format!(
                "{} expects {} target(s), got {}",
                self.kind.name(),
                self.kind.arity(),
                self.targets.len()
            )));
        }
        validate_targets(&self.targets, n_qubits)
    }
}

pub(crate) fn validate_targets(targets: &[usize], n_qubits: usize) -> Result<()> {
    for (i, &q) in targets.iter().enumerate() {
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits });
        }
        if targets[..i].contains(&q) {
            return Err(Error::DuplicateTarget(q));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_kinds() -> Vec<GateKind<f64>> {
        vec![
            GateKind::H,
            GateKind::X,
            GateKind::Y,
            GateKind::Z,
            GateKind::Rz(0.37),
            GateKind::X90,
            GateKind::Y90,
            GateKind::Ym90,
            GateKind::Idle,
            GateKind::Cnot,
            GateKind::Cz,
        ]
    }

    #[test]
    fn every_gate_is_unitary() {
        for kind in all_kinds() {
            let u = kind.matrix();
            let id = Matrix::identity(u.dim());
            assert!(u.adjoint().matmul(&u).max_abs_diff(&id) < 1e-12, "{}", kind.name());
        }
    }

    #[test]
    fn half_pi_rotations_are_inverse() {
        let a = GateKind::<f64>::Y90.matrix();
        let b = GateKind::<f64>::Ym90.matrix();
        assert!(a.matmul(&b).max_abs_diff(&Matrix::identity(2)) < 1e-15);
    }

    #[test]
    fn idle_slice_has_80ns_duration() {
        assert_eq!(Gate::<f64>::idle(0).duration, 80e-9);
        assert_eq!(Gate::<f64>::h(0).duration, 0.0);
    }

    #[test]
    fn target_validation() {
        assert_eq!(Gate::<f64>::cnot(0, 0).validate(2), Err(Error::DuplicateTarget(0)));
        assert_eq!(
            Gate::<f64>::h(3).validate(2),
            Err(Error::QubitOutOfRange { index: 3, n_qubits: 2 })
        );
        assert!(Gate::<f64>::cnot(1, 0).validate(2).is_ok());
    }
}
