use crate::circuits::StateFamily;
use crate::error::{Error, Result};
use crate::qstate::{Pauli, PauliString, MAX_QUBITS};

/// The `2^n` signed Paulis fixing a GHZ or linear-cluster state.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerGroup {
    family: StateFamily,
    n: usize,
    generators: Vec<PauliString>,
    elements: Vec<PauliString>,
}

/// GHZ: `X^⊗n` and `Z_i Z_{i+1}`. Cluster: `Z_{i−1} X_i Z_{i+1}` with the
/// out-of-range `Z` dropped at the ends.
pub fn generators(family: StateFamily, n: usize) -> Result<Vec<PauliString>> {
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(Error::UnsupportedQubitCount(n));
    }
    match family {
        StateFamily::Ghz | StateFamily::Bell => {
            if family == StateFamily::Bell && n != 2 {
                return Err(Error::InvalidParameter("Bell family requires n = 2".into()));
            }
            let mut g = vec![PauliString::uniform(Pauli::X, n)];
            for i in 0..n - 1 {
                let mut ops = vec![Pauli::I; n];
                ops[i] = Pauli::Z;
                ops[i + 1] = Pauli::Z;
                g.push(PauliString::new(ops));
            }
            Ok(g)
        }
        StateFamily::Cluster => Ok((0..n)
            .map(|i| {
                let mut ops = vec![Pauli::I; n];
                ops[i] = Pauli::X;
                if i > 0 {
                    ops[i - 1] = Pauli::Z;
                }
                if i + 1 < n {
                    ops[i + 1] = Pauli::Z;
                }
                PauliString::new(ops)
            })
            .collect()),
        StateFamily::Uniform => Err(Error::InvalidParameter(
            "stabilizer groups are provided for ghz, bell and cluster targets".into(),
        )),
    }
}

pub fn stabilizer_group(family: StateFamily, n: usize) -> Result<StabilizerGroup> {
    let generators = generators(family, n)?;
    let mut elements = Vec::with_capacity(1 << n);
    for subset in 0usize..(1 << n) {
        let mut acc = PauliString::identity(n);
        for (g_idx, g) in generators.iter().enumerate() {
            if (subset >> g_idx) & 1 == 1 {
                let (phase, p) = acc.mul(g)?;
                // commuting Hermitian generators: phase is ±1
                debug_assert!(phase % 2 == 0);
                acc = p.with_sign(phase == 2);
            }
        }
        elements.push(acc);
    }
    Ok(StabilizerGroup {
        family,
        n,
        generators,
        elements,
    })
}

impl StabilizerGroup {
    pub fn family(&self) -> StateFamily {
        self.family
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    /// All `2^n` elements; index 0 is `+I^⊗n`.
    pub fn elements(&self) -> &[PauliString] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        self.elements.contains(p)
    }
}
