use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(ch: char) -> Option<Self> {
        match ch {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Single-qubit product `self · other = i^k · P`, returned as `(k, P)`.
    pub fn product(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }
}

/// Signed tensor product of single-qubit Paulis. Position 0 is the leftmost
/// character of the label and acts on qubit 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    negative: bool,
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Self {
        Self { negative: false, ops }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![Pauli::I; n])
    }

    /// The same single Pauli on every qubit, e.g. `X^⊗n`.
    pub fn uniform(p: Pauli, n: usize) -> Self {
        Self::new(vec![p; n])
    }

    /// `p` on qubit `q`, identity elsewhere.
    pub fn single(p: Pauli, q: usize, n: usize) -> Self {
        let mut ops = vec![Pauli::I; n];
        ops[q] = p;
        Self::new(ops)
    }

    pub fn with_sign(mut self, negative: bool) -> Self {
        self.negative = negative;
        self
    }

    pub fn negated(&self) -> Self {
        Self {
            negative: !self.negative,
            ops: self.ops.clone(),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    #[inline]
    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    #[inline]
    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// `+1.0` or `-1.0`.
    pub fn sign<T: Real>(&self) -> T {
        if self.negative {
            -T::one()
        } else {
            T::one()
        }
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|&p| p == Pauli::I)
    }

    /// Unsigned label, e.g. `"XYY"`.
    pub fn label(&self) -> String {
        self.ops.iter().map(|p| p.as_char()).collect()
    }

    /// Positions carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        self.ops
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::QubitCountMismatch {
                expected: n,
                got: self.len(),
            });
        }
        Ok(())
    }

    /// Basis-index action: `P|j⟩ = phase(j) |j ⊕ flip_mask⟩`, with
    /// `phase(j) = i^{#Y} (-1)^{popcount(j & phase_mask)}`. The sign is not
    /// included.
    pub(crate) fn masks(&self) -> PauliMasks {
        let n = self.len();
        let mut flip = 0usize;
        let mut phase = 0usize;
        let mut n_y = 0u32;
        for (q, &p) in self.ops.iter().enumerate() {
            let b = 1usize << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => flip |= b,
                Pauli::Y => {
                    flip |= b;
                    phase |= b;
                    n_y += 1;
                }
                Pauli::Z => phase |= b,
            }
        }
        PauliMasks { flip, phase, n_y }
    }

    /// Operator product `self · other`, returned as `i^k · P` with `k ∈ 0..4`
    /// (signs of both inputs folded into `k`).
    pub fn mul(&self, other: &PauliString) -> Result<(u8, PauliString)> {
        other.check_len(self.len())?;
        let mut k = 2 * (self.negative as u8) + 2 * (other.negative as u8);
        let ops = self
            .ops
            .iter()
            .zip(&other.ops)
            .map(|(&a, &b)| {
                let (kk, p) = a.product(b);
                k += kk;
                p
            })
            .collect();
        Ok((k % 4, PauliString::new(ops)))
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .ops
            .iter()
            .zip(&other.ops)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct PauliMasks {
    pub flip: usize,
    pub phase: usize,
    pub n_y: u32,
}

impl PauliMasks {
    #[inline]
    pub fn phase_of<T: Real>(&self, j: usize) -> C<T> {
        let base = match self.n_y % 4 {
            0 => C::new(T::one(), T::zero()),
            1 => C::new(T::zero(), T::one()),
            2 => C::new(-T::one(), T::zero()),
            _ => C::new(T::zero(), -T::one()),
        };
        if (j & self.phase).count_ones() % 2 == 1 {
            -base
        } else {
            base
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            write!(f, "-")?;
        }
        write!(f, "{}", self.label())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts an optional leading `+`/`-` followed by `I`, `X`, `Y`, `Z`.
    fn from_str(s: &str) -> Result<Self> {
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        if body.is_empty() {
            return Err(Error::InvalidPauli(s.to_string()));
        }
        let ops = body
            .chars()
            .map(|ch| Pauli::from_char(ch).ok_or_else(|| Error::InvalidPauli(s.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { negative, ops })
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
