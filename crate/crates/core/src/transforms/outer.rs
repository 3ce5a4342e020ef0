use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TransformError;
use crate::code::checked_pow;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterCodeFamily {
    Repetition,
    ReedSolomon,
}

/// An outer code of length `m` over an alphabet of size `q` with `k`
/// information symbols and minimum distance `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OuterCodeSpec {
    pub family: OuterCodeFamily,
    pub m: usize,
    pub q: u64,
    pub k: usize,
    pub d: u64,
}

fn is_prime(q: u64) -> bool {
    q >= 2 && (2..).take_while(|p| p * p <= q).all(|p| !q.is_multiple_of(p))
}

impl OuterCodeSpec {
    pub fn repetition(q: u64, m: usize) -> Result<Self, TransformError> {
        if m == 0 || q == 0 {
            return Err(TransformError::BadParameter("m and q must be positive".into()));
        }
        Ok(OuterCodeSpec {
            family: OuterCodeFamily::Repetition,
            m,
            q,
            k: 1,
            d: m as u64,
        })
    }

    /// Reed–Solomon code over the prime field of size `q`, evaluated at
    /// `0, 1, ..., m - 1`, with `k = ceil(rate m)` information symbols.
    pub fn reed_solomon(q: u64, m: usize, rate: &Rational) -> Result<Self, TransformError> {
        let k = (rate * Rational::from(m)).ceil();
        let k: usize = k
            .try_into()
            .map_err(|_| TransformError::BadParameter(format!("bad rate {rate}")))?;
        Self::reed_solomon_k(q, m, k)
    }

    pub fn reed_solomon_k(q: u64, m: usize, k: usize) -> Result<Self, TransformError> {
        if !is_prime(q) || q < m as u64 {
            return Err(TransformError::AlphabetTooSmallForRs { q, m });
        }
        if k == 0 || k > m {
            return Err(TransformError::BadParameter(format!(
                "need 1 <= k <= m, got k = {k}, m = {m}"
            )));
        }
        Ok(OuterCodeSpec {
            family: OuterCodeFamily::ReedSolomon,
            m,
            q,
            k,
            d: (m - k + 1) as u64,
        })
    }

    /// Number of messages, `q^k`.
    pub fn messages(&self) -> Result<u64, TransformError> {
        Ok(checked_pow(self.q, self.k)?)
    }

    pub fn encode(&self, message: u64) -> Vec<u64> {
        match self.family {
            OuterCodeFamily::Repetition => vec![message; self.m],
            OuterCodeFamily::ReedSolomon => {
                let q = self.q as u128;
                let coeffs: Vec<u128> = crate::code::decompose(message, &vec![self.q; self.k])
                    .into_iter()
                    .map(u128::from)
                    .collect();
                (0..self.m as u128)
                    .map(|x| coeffs.iter().rev().fold(0u128, |acc, &c| (acc * x + c) % q) as u64)
                    .collect()
            }
        }
    }

    /// Number of correctable corruptions, `floor((d - 1) / 2)`.
    pub fn radius(&self) -> u64 {
        (self.d - 1) / 2
    }
}

fn hamming(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// The message whose codeword is closest to `word` in Hamming distance; ties
/// go to the smallest message.
pub fn nearest_codeword_decode(word: &[u64], spec: &OuterCodeSpec) -> u64 {
    match spec.family {
        OuterCodeFamily::Repetition => {
            let mut counts = std::collections::BTreeMap::new();
            for &s in word.iter().filter(|&&s| s < spec.q) {
                *counts.entry(s).or_insert(0usize) += 1;
            }
            let best = counts.values().copied().max().unwrap_or(0);
            counts
                .into_iter()
                .find(|&(_, c)| c == best)
                .map(|(s, _)| s)
                .unwrap_or(0)
        }
        OuterCodeFamily::ReedSolomon => {
            let total = spec.messages().unwrap_or(u64::MAX);
            let mut best = (usize::MAX, 0);
            for w in 0..total {
                let dist = hamming(&spec.encode(w), word);
                if dist < best.0 {
                    best = (dist, w);
                    if dist == 0 {
                        break;
                    }
                }
            }
            best.1
        }
    }
}

/// One permutation of `[q_i]` per source `i` and session `j`, drawn from a
/// seeded generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationSet {
    pub seed: u64,
    forward: Vec<Vec<Vec<u64>>>,
    inverse: Vec<Vec<Vec<u64>>>,
}

/// Largest alphabet for which permutations are materialized.
const MAX_PERMUTED_ALPHABET: u64 = 1 << 20;

impl PermutationSet {
    pub fn generate(seed: u64, sizes: &[u64], m: usize) -> Result<Self, TransformError> {
        if let Some(&q) = sizes.iter().find(|&&q| q > MAX_PERMUTED_ALPHABET) {
            return Err(TransformError::BadParameter(format!(
                "alphabet {q} too large to permute (limit {MAX_PERMUTED_ALPHABET})"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut forward = Vec::with_capacity(sizes.len());
        let mut inverse = Vec::with_capacity(sizes.len());
        for &q in sizes {
            let mut fw = Vec::with_capacity(m);
            let mut inv = Vec::with_capacity(m);
            for _ in 0..m {
                let mut p: Vec<u64> = (0..q).collect();
                p.shuffle(&mut rng);
                let mut ip = vec![0; q as usize];
                for (x, &y) in p.iter().enumerate() {
                    ip[y as usize] = x as u64;
                }
                fw.push(p);
                inv.push(ip);
            }
            forward.push(fw);
            inverse.push(inv);
        }
        Ok(PermutationSet {
            seed,
            forward,
            inverse,
        })
    }

    /// `sigma_ij(x)`.
    pub fn apply(&self, source: usize, session: usize, x: u64) -> u64 {
        self.forward[source][session][x as usize]
    }

    /// `sigma_ij^{-1}(y)`; values outside the alphabet map to themselves.
    pub fn invert(&self, source: usize, session: usize, y: u64) -> u64 {
        self.inverse[source][session]
            .get(y as usize)
            .copied()
            .unwrap_or(y)
    }
}
