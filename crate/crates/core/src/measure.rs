//! Measurement distributions, finite-shot sampling, and parity-based Pauli
//! expectation estimates with optional readout correction.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{apply_per_qubit, ReadoutMap};
use crate::qstate::{GateKind, Matrix, Pauli, PauliString, QuantumState, Repr};
use crate::scalar::{c, Real};

pub const DEFAULT_SHOTS: u64 = 8000;

/// Histogram of measured bitstrings in one Pauli basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsRecord {
    pub basis: PauliString,
    #[serde(rename = "n")]
    pub n_qubits: usize,
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay_us: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationEstimate {
    pub value: f64,
    pub stderr: f64,
    pub shots: u64,
}

impl ExpectationEstimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            stderr: 0.0,
            shots: 0,
        }
    }
}

pub fn bitstring(index: usize, n: usize) -> String {
    format!("{index:0n$b}")
}

fn parse_bitstring(s: &str, n: usize) -> Result<usize> {
    if s.len() != n || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::InvalidCounts(format!(
            "bitstring {s:?} is not {n} binary digits"
        )));
    }
    usize::from_str_radix(s, 2).map_err(|e| Error::InvalidCounts(e.to_string()))
}

impl CountsRecord {
    pub fn validate(&self) -> Result<()> {
        if self.basis.len() != self.n_qubits {
            return Err(Error::InvalidCounts(format!(
                "basis {} has length {} but n = {}",
                self.basis,
                self.basis.len(),
                self.n_qubits
            )));
        }
        if self.shots == 0 {
            return Err(Error::InvalidCounts("shots must be > 0".into()));
        }
        if self.counts.is_empty() {
            return Err(Error::InvalidCounts("empty counts".into()));
        }
        let mut total = 0u64;
        for (k, &v) in &self.counts {
            parse_bitstring(k, self.n_qubits)?;
            total += v;
        }
        if total != self.shots {
            return Err(Error::InvalidCounts(format!(
                "counts sum to {total} but shots = {}",
                self.shots
            )));
        }
        Ok(())
    }

    /// Empirical frequencies as a dense vector over `2^n` bitstrings.
    pub fn frequencies(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let mut f = vec![0.0; 1usize << self.n_qubits];
        for (k, &v) in &self.counts {
            f[parse_bitstring(k, self.n_qubits)?] = v as f64 / self.shots as f64;
        }
        Ok(f)
    }
}

/// Probabilities of each bitstring after rotating every non-`Z` position
/// into the computational basis (`H` for X, `H·S†` for Y; `I` positions are
/// measured in Z).
pub fn measurement_distribution<T: Real>(state: &QuantumState<T>, basis: &PauliString) -> Result<Vec<T>> {
    basis.check_len(state.n_qubits())?;
    let h = GateKind::<T>::H.matrix();
    let h_sdg = h.matmul(&Matrix::diag(&[c(1., 0.), c(0., -1.)]));
    let mut s = state.clone();
    for (q, &p) in basis.ops().iter().enumerate() {
        match p {
            Pauli::X => s.apply_unitary(&[q], &h)?,
            Pauli::Y => s.apply_unitary(&[q], &h_sdg)?,
            Pauli::Z | Pauli::I => {}
        }
    }
    Ok(match s.repr() {
        Repr::Pure(a) => a.iter().map(|z| z.norm_sqr()).collect(),
        Repr::Mixed(rho) => {
            let d = s.dim();
            (0..d).map(|i| rho[i * d + i].re).collect()
        }
    })
}

/// Multinomial draw of `shots` outcomes from `dist`, via sequential
/// conditional binomials.
pub fn sample_counts<T: Real, R: Rng + ?Sized>(
    dist: &[T],
    basis: &PauliString,
    shots: u64,
    rng: &mut R,
) -> Result<CountsRecord> {
    let n = basis.len();
    if dist.len() != 1usize << n {
        return Err(Error::QubitCountMismatch {
            expected: n,
            got: dist.len().trailing_zeros() as usize,
        });
    }
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be >= 1".into()));
    }
    let probs: Vec<f64> = dist.iter().map(|p| p.as_f64().max(0.0)).collect();
    let mut mass_left: f64 = probs.iter().sum();
    let mut shots_left = shots;
    let mut counts = BTreeMap::new();
    for (i, &p) in probs.iter().enumerate() {
        if shots_left == 0 {
            break;
        }
        let k = if i == probs.len() - 1 || p >= mass_left {
            shots_left
        } else if p <= 0.0 {
            0
        } else {
            Binomial::new(shots_left, (p / mass_left).min(1.0))
                .map_err(|e| Error::InvalidParameter(format!("binomial: {e}")))?
                .sample(rng)
        };
        if k > 0 {
            counts.insert(bitstring(i, n), k);
        }
        shots_left -= k;
        mass_left -= p;
    }
    Ok(CountsRecord {
        basis: basis.clone(),
        n_qubits: n,
        shots,
        counts,
        delay_us: None,
        metadata: BTreeMap::new(),
    })
}

/// `(-1)^{#ones on the basis support}` for every bitstring, times the
/// basis sign.
fn parity_weights(basis: &PauliString) -> Vec<f64> {
    let n = basis.len();
    let mask: usize = basis.support().iter().map(|&q| 1usize << (n - 1 - q)).sum();
    let sign: f64 = basis.sign();
    (0..1usize << n)
        .map(|i| {
            if (i & mask).count_ones().is_multiple_of(2) {
                sign
            } else {
                -sign
            }
        })
        .collect()
}

/// Mean and standard error of a per-shot variable taking value `w[b]` on
/// outcome `b`, given empirical frequencies. Uses the `N/(N−1)` sample
/// variance.
fn weighted_estimate(freqs: &[f64], weights: &[f64], shots: u64) -> ExpectationEstimate {
    let mean: f64 = freqs.iter().zip(weights).map(|(f, w)| f * w).sum();
    let second: f64 = freqs.iter().zip(weights).map(|(f, w)| f * w * w).sum();
    let n = shots as f64;
    let var = if shots > 1 {
        ((second - mean * mean) * n / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    ExpectationEstimate {
        value: mean,
        stderr: (var / n).sqrt(),
        shots,
    }
}

/// Parity estimator of the basis Pauli. Bits at `I` positions are ignored;
/// an all-identity basis returns its sign exactly.
pub fn expectation_from_counts(rec: &CountsRecord) -> Result<ExpectationEstimate> {
    let freqs = rec.frequencies()?;
    if rec.basis.is_identity() {
        return Ok(ExpectationEstimate {
            value: rec.basis.sign(),
            stderr: 0.0,
            shots: rec.shots,
        });
    }
    Ok(weighted_estimate(&freqs, &parity_weights(&rec.basis), rec.shots))
}

/// Same parity rule applied to an exact (infinite-shot) distribution.
pub fn expectation_from_distribution<T: Real>(dist: &[T], basis: &PauliString) -> Result<f64> {
    if dist.len() != 1usize << basis.len() {
        return Err(Error::QubitCountMismatch {
            expected: basis.len(),
            got: dist.len().trailing_zeros() as usize,
        });
    }
    Ok(dist
        .iter()
        .zip(parity_weights(basis))
        .map(|(p, w)| p.as_f64() * w)
        .sum())
}

/// Inverse of the tensor-product confusion map applied to a distribution.
pub fn correct_distribution<T: Real>(dist: &[T], map: &ReadoutMap) -> Result<Vec<T>> {
    if dist.len() != 1usize << map.n_qubits() {
        return Err(Error::QubitCountMismatch {
            expected: map.n_qubits(),
            got: dist.len().trailing_zeros() as usize,
        });
    }
    Ok(apply_per_qubit(dist, &map.inverse_matrices()?))
}

/// Readout-corrected quasi-probabilities and the corrected parity estimate.
/// Negative quasi-probabilities are kept. The standard error propagates
/// through the linear inverse map: each shot contributes `((M⁻¹)ᵀ parity)_b`.
pub fn readout_correct(rec: &CountsRecord, map: &ReadoutMap) -> Result<(Vec<f64>, ExpectationEstimate)> {
    if map.n_qubits() != rec.n_qubits {
        return Err(Error::QubitCountMismatch {
            expected: rec.n_qubits,
            got: map.n_qubits(),
        });
    }
    let freqs = rec.frequencies()?;
    let inv = map.inverse_matrices()?;
    let corrected = apply_per_qubit(&freqs, &inv);
    if rec.basis.is_identity() {
        return Ok((
            corrected,
            ExpectationEstimate {
                value: rec.basis.sign(),
                stderr: 0.0,
                shots: rec.shots,
            },
        ));
    }
    let parity = parity_weights(&rec.basis);
    let transposed: Vec<[f64; 4]> = inv.iter().map(|&[a, b, c, d]| [a, c, b, d]).collect();
    let weights = apply_per_qubit(&parity, &transposed);
    let mut est = weighted_estimate(&freqs, &weights, rec.shots);
    est.value = corrected.iter().zip(&parity).map(|(q, w)| q * w).sum();
    Ok((corrected, est))
}
