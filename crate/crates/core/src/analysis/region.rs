//! Brute-force zero-error rate region of micro instances.
//!
//! A node's knowledge after `t` timesteps is a partition of the message tuples.
//! An encoder is any function of that partition, so up to relabelling of its
//! alphabet it is a partition of the node's classes into at most `|alphabet|`
//! blocks; those are enumerated as restricted-growth strings. A code is
//! zero-error iff every terminal class determines the demanded messages.

use serde::Serialize;

use super::AnalysisError;
use crate::code::{Direction, MessageTuples};
use crate::graph::{EdgeId, NetworkInstance, RateVector};
use crate::rational::{alphabet_size, exact_log2, ratio, saturating_u128};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionLimits {
    pub max_edges: usize,
    pub max_alphabet: u64,
    pub max_rounds: usize,
    pub max_messages: u64,
    /// Search nodes visited across all message-size tuples.
    pub max_search: u64,
}

impl Default for RegionLimits {
    fn default() -> Self {
        RegionLimits {
            max_edges: 3,
            max_alphabet: 2,
            max_rounds: 2,
            max_messages: 4,
            max_search: 20_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegionReport {
    pub n: u64,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub limits: RegionLimits,
    /// Message-size tuples that admit a zero-error code, maximal ones only.
    pub maximal_sizes: Vec<Vec<u64>>,
    /// `log2 |W_i| / (N n)` for each maximal tuple.
    pub points: Vec<RateVector>,
    /// Some source reached `max_messages`: the region may extend further.
    pub saturated: bool,
    pub tuples_searched: u64,
    pub search_nodes: u64,
}

fn over(what: &str, size: impl ToString, limit: impl ToString) -> AnalysisError {
    AnalysisError::EnumerationTooLarge {
        what: what.into(),
        size: size.to_string(),
        limit: limit.to_string(),
    }
}

/// Every zero-error-achievable rate point at blocklengths `(n, N)` with
/// power-of-two message sizes up to `limits.max_messages`.
pub fn rate_region_micro(
    inst: &NetworkInstance,
    n: u64,
    big_n: usize,
    limits: &RegionLimits,
) -> Result<RegionReport, AnalysisError> {
    if inst.edges().len() > limits.max_edges {
        return Err(over("edges", inst.edges().len(), limits.max_edges));
    }
    if big_n > limits.max_rounds {
        return Err(over("rounds", big_n, limits.max_rounds));
    }
    let alphabets: Vec<u64> = inst
        .edges()
        .iter()
        .map(|e| saturating_u128(&alphabet_size(&e.capacity, n)))
        .map(|a| a.min(u64::MAX as u128) as u64)
        .collect();
    if let Some(&a) = alphabets.iter().find(|&&a| a > limits.max_alphabet) {
        return Err(over("alphabet", a, limits.max_alphabet));
    }
    let options: Vec<u64> = (0..)
        .map(|k| 1u64 << k)
        .take_while(|&s| s <= limits.max_messages)
        .collect();
    let k = inst.sources().len();
    let mut candidates: Vec<Vec<u64>> = MessageTuples::new(&vec![options.len() as u64; k], 1 << 20)
        .map_err(|_| over("message-size tuples", "many", 1u64 << 20))?
        .iter()
        .map(|t| t.iter().map(|&d| options[d as usize]).collect())
        .collect();
    // largest first, so that smaller tuples are usually settled by dominance
    candidates.sort_by_key(|t: &Vec<u64>| std::cmp::Reverse(t.iter().map(|&s| s.trailing_zeros()).sum::<u32>()));
    let mut search = Search {
        inst,
        alphabets,
        big_n,
        budget: limits.max_search,
        nodes: 0,
    };
    let mut achieved: Vec<Vec<u64>> = Vec::new();
    let mut searched = 0u64;
    for sizes in candidates {
        if achieved.iter().any(|a| dominates(a, &sizes)) {
            continue;
        }
        searched += 1;
        if search.feasible(&sizes)? {
            achieved.push(sizes);
        }
    }
    let mut maximal: Vec<Vec<u64>> = achieved
        .iter()
        .filter(|a| !achieved.iter().any(|b| b != *a && dominates(b, a)))
        .cloned()
        .collect();
    maximal.sort();
    maximal.dedup();
    let block = n * big_n as u64;
    let points = maximal
        .iter()
        .map(|t| {
            let rates = t
                .iter()
                .map(|&s| ratio(exact_log2(s).expect("power of two") as u64, block))
                .collect();
            RateVector::new(rates, k).expect("nonnegative rates")
        })
        .collect();
    Ok(RegionReport {
        n,
        big_n,
        limits: *limits,
        saturated: maximal.iter().flatten().any(|&s| s == limits.max_messages),
        maximal_sizes: maximal,
        points,
        tuples_searched: searched,
        search_nodes: search.nodes,
    })
}

fn dominates(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y)
}

/// Maximal directional splits `(f, b)` with `f b <= a`.
fn maximal_splits(a: u64) -> Vec<(u64, u64)> {
    (1..=a)
        .filter(|&f| f == a || a / f > a / (f + 1))
        .map(|f| (f, a / f))
        .collect()
}

/// Restricted-growth strings of length `len` with at most `blocks` blocks,
/// finest first.
fn growth_strings(len: usize, blocks: u64) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, max: u32, len: usize, blocks: u32, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        let top = if prefix.is_empty() { 0 } else { (max + 1).min(blocks - 1) };
        for v in (0..=top).rev() {
            prefix.push(v);
            rec(prefix, max.max(v), len, blocks, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if len == 0 {
        out.push(Vec::new());
    } else {
        rec(&mut Vec::new(), 0, len, blocks.min(len as u64) as u32, &mut out);
    }
    out
}

/// Class labels (`0..count`) of a partition of the message tuples.
#[derive(Debug, Clone)]
struct Partition {
    labels: Vec<u32>,
    count: usize,
}

impl Partition {
    fn from_keys<K: Ord + Clone>(keys: &[K]) -> Partition {
        let mut order = std::collections::BTreeMap::new();
        let labels = keys
            .iter()
            .map(|k| {
                let next = order.len() as u32;
                *order.entry(k.clone()).or_insert(next)
            })
            .collect();
        Partition {
            labels,
            count: order.len(),
        }
    }
}

struct Search<'a> {
    inst: &'a NetworkInstance,
    alphabets: Vec<u64>,
    big_n: usize,
    budget: u64,
    nodes: u64,
}

struct Problem {
    tuples: Vec<Vec<u64>>,
}

impl Search<'_> {
    fn feasible(&mut self, sizes: &[u64]) -> Result<bool, AnalysisError> {
        let space = MessageTuples::new(sizes, 1 << 16)
            .map_err(|_| over("message tuples", sizes.iter().product::<u64>(), 1u64 << 16))?;
        let problem = Problem {
            tuples: space.iter().collect(),
        };
        let states: Vec<Partition> = (0..self.inst.num_vertices())
            .map(|v| {
                let own = self.inst.sources_at(v);
                let keys: Vec<Vec<u64>> = problem
                    .tuples
                    .iter()
                    .map(|w| own.iter().map(|&i| w[i]).collect())
                    .collect();
                Partition::from_keys(&keys)
            })
            .collect();
        self.round(&problem, 1, states)
    }

    fn tick(&mut self) -> Result<(), AnalysisError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(over("code search", self.nodes, self.budget));
        }
        Ok(())
    }

    fn round(&mut self, p: &Problem, t: usize, states: Vec<Partition>) -> Result<bool, AnalysisError> {
        if t > self.big_n {
            return Ok(self.decodable(p, &states));
        }
        let mut symbols = vec![(Vec::new(), Vec::new()); self.inst.edges().len()];
        self.edge(p, t, 0, &states, &mut symbols)
    }

    /// Chooses the split and both encoders of edge `e` at round `t`.
    fn edge(
        &mut self,
        p: &Problem,
        t: usize,
        e: EdgeId,
        states: &[Partition],
        symbols: &mut Vec<(Vec<u32>, Vec<u32>)>,
    ) -> Result<bool, AnalysisError> {
        if e == self.inst.edges().len() {
            let next = self.commit(p, states, symbols);
            return self.round(p, t + 1, next);
        }
        let edge = self.inst.edge(e);
        let (ta, tb) = (&states[edge.a], &states[edge.b]);
        for (f, b) in maximal_splits(self.alphabets[e]) {
            let fwd = growth_strings(ta.count, f);
            let bwd = growth_strings(tb.count, b);
            for gf in &fwd {
                for gb in &bwd {
                    self.tick()?;
                    symbols[e] = (
                        ta.labels.iter().map(|&c| gf[c as usize]).collect(),
                        tb.labels.iter().map(|&c| gb[c as usize]).collect(),
                    );
                    if self.edge(p, t, e + 1, states, symbols)? {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }

    /// Refines every node's partition by the symbols it received this round.
    fn commit(&self, p: &Problem, states: &[Partition], symbols: &[(Vec<u32>, Vec<u32>)]) -> Vec<Partition> {
        (0..self.inst.num_vertices())
            .map(|v| {
                let arrivals: Vec<(EdgeId, Direction)> = self
                    .inst
                    .incident(v)
                    .into_iter()
                    .map(|e| (e, Direction::leaving(self.inst.edge(e).a, v).flip()))
                    .collect();
                let keys: Vec<Vec<u32>> = (0..p.tuples.len())
                    .map(|x| {
                        let mut key = vec![states[v].labels[x]];
                        for &(e, dir) in &arrivals {
                            key.push(match dir {
                                Direction::Forward => symbols[e].0[x],
                                Direction::Backward => symbols[e].1[x],
                            });
                        }
                        key
                    })
                    .collect();
                Partition::from_keys(&keys)
            })
            .collect()
    }

    fn decodable(&self, p: &Problem, states: &[Partition]) -> bool {
        (0..self.inst.terminals().len()).all(|j| {
            let d = self.inst.terminals()[j];
            let demanded = self.inst.demanded_by(j);
            let mut seen: std::collections::BTreeMap<u32, Vec<u64>> = Default::default();
            p.tuples.iter().enumerate().all(|(x, w)| {
                let want: Vec<u64> = demanded.iter().map(|&i| w[i]).collect();
                let entry = seen.entry(states[d].labels[x]).or_insert_with(|| want.clone());
                *entry == want
            })
        })
    }
}
