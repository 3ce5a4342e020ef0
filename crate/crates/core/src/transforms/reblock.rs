use num_traits::ToPrimitive;

use super::TransformError;
use crate::code::{compose, decompose, validate_code, Direction, Incoming, InfoState, NetworkCode, SharedCode, Split};
use crate::graph::{EdgeId, NetworkInstance};
use crate::rational::{alphabet_size, Rational};

/// A code of inner blocklength `n m` re-run with inner blocklength `n + 1`:
/// each round becomes `m` consecutive rounds carrying the mixed-radix digits
/// of the original symbols.
#[derive(Debug, Clone)]
pub struct ReblockedCode {
    base: SharedCode,
    m: usize,
    n: u64,
    /// `[e][t - 1]` = the `m` per-step splits of original round `t`.
    alloc: Vec<Vec<Vec<Split>>>,
}

/// Per-step splits whose forward sizes multiply to at least `need_f` and
/// backward sizes to at least `need_b`, with every step within `cap`.
fn allocate(need_f: u64, need_b: u64, cap: u64, m: usize) -> Option<Vec<Split>> {
    let greedy = |first: u64, second: u64| -> Option<Vec<(u64, u64)>> {
        let mut rem = first;
        let mut steps = Vec::with_capacity(m);
        for _ in 0..m {
            let x = rem.clamp(1, cap);
            rem = rem.div_ceil(x);
            steps.push((x, cap / x));
        }
        let other: u128 = steps
            .iter()
            .fold(1u128, |acc, &(_, y)| acc.saturating_mul(y as u128));
        (rem <= 1 && other >= second as u128).then_some(steps)
    };
    if let Some(steps) = greedy(need_f, need_b) {
        return Some(steps.into_iter().map(|(f, b)| Split::new(f, b)).collect());
    }
    greedy(need_b, need_f).map(|steps| steps.into_iter().map(|(b, f)| Split::new(f, b)).collect())
}

pub fn reblock(
    code: SharedCode,
    inst: &NetworkInstance,
    m: usize,
) -> Result<ReblockedCode, TransformError> {
    validate_code(code.as_ref(), inst)?;
    let total = code.inner_blocklength();
    if m == 0 || !total.is_multiple_of(m as u64) {
        return Err(TransformError::BadParameter(format!(
            "inner blocklength {total} is not a multiple of {m}"
        )));
    }
    let n = total / m as u64;
    let mut alloc = Vec::with_capacity(inst.edges().len());
    for (e, edge) in inst.edges().iter().enumerate() {
        let big = alphabet_size(&edge.capacity, total);
        let small = alphabet_size(&edge.capacity, n + 1);
        if big > small.pow(m as u32) {
            return Err(TransformError::AlphabetInclusionFails {
                edge: e,
                detail: format!("{big} > {small}^{m}"),
            });
        }
        let cap = small.to_u64().unwrap_or(u64::MAX);
        let mut per_t = Vec::with_capacity(code.outer_blocklength());
        for t in 1..=code.outer_blocklength() {
            let s = code.split(e, t);
            let steps = allocate(s.forward, s.backward, cap, m).ok_or_else(|| {
                TransformError::AlphabetInclusionFails {
                    edge: e,
                    detail: format!(
                        "split {} x {} at t={t} has no {m}-step directional layout within {cap}",
                        s.forward, s.backward
                    ),
                }
            })?;
            per_t.push(steps);
        }
        alloc.push(per_t);
    }
    let out = ReblockedCode {
        base: code,
        m,
        n: n + 1,
        alloc,
    };
    validate_code(&out, inst)?;
    Ok(out)
}

impl ReblockedCode {
    /// `n m / ((n + 1) m)`: the factor applied to every rate.
    pub fn rate_factor(&self) -> Rational {
        crate::rational::ratio(self.base.inner_blocklength(), self.n * self.m as u64)
    }

    fn radices(&self, edge: EdgeId, t: usize, dir: Direction) -> Vec<u64> {
        self.alloc[edge][t - 1].iter().map(|s| s.size(dir)).collect()
    }

    /// The base state after `rounds` original rounds.
    fn base_state(&self, state: &InfoState, rounds: usize) -> InfoState {
        let m = self.m;
        InfoState {
            node: state.node,
            time: rounds,
            own: state.own.clone(),
            incoming: state
                .incoming
                .iter()
                .map(|inc| Incoming {
                    edge: inc.edge,
                    dir: inc.dir,
                    symbols: (1..=rounds)
                        .map(|t| {
                            let digits: Vec<u64> = (0..m)
                                .map(|k| inc.symbols.get((t - 1) * m + k).copied().unwrap_or(0))
                                .collect();
                            compose(&digits, &self.radices(inc.edge, t, inc.dir))
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl NetworkCode for ReblockedCode {
    fn inner_blocklength(&self) -> u64 {
        self.n
    }

    fn outer_blocklength(&self) -> usize {
        self.base.outer_blocklength() * self.m
    }

    fn message_sizes(&self) -> &[u64] {
        self.base.message_sizes()
    }

    fn num_edges(&self) -> usize {
        self.base.num_edges()
    }

    fn num_terminals(&self) -> usize {
        self.base.num_terminals()
    }

    fn split(&self, edge: EdgeId, tau: usize) -> Split {
        let (t, k) = ((tau - 1) / self.m + 1, (tau - 1) % self.m);
        self.alloc[edge][t - 1][k]
    }

    fn encode(&self, edge: EdgeId, tau: usize, dir: Direction, state: &InfoState) -> u64 {
        let (t, k) = ((tau - 1) / self.m + 1, (tau - 1) % self.m);
        let symbol = self
            .base
            .encode(edge, t, dir, &self.base_state(state, t - 1));
        decompose(symbol, &self.radices(edge, t, dir))[k]
    }

    fn decode(&self, terminal: usize, state: &InfoState) -> Vec<u64> {
        self.base
            .decode(terminal, &self.base_state(state, self.base.outer_blocklength()))
    }

    fn kind(&self) -> String {
        format!("reblock({}, m={})", self.base.kind(), self.m)
    }
}
