use crate::code::{
    checked_pow, compose, decompose, validate_code, CodeError, Direction, Incoming, InfoState,
    NetworkCode, SharedCode, Split,
};
use crate::graph::{EdgeId, NetworkInstance};

/// `m` independent sessions of a code run side by side: every symbol and every
/// message is an `m`-tuple, session 1 in the least significant digit.
#[derive(Debug, Clone)]
pub struct RepeatedCode {
    base: SharedCode,
    m: usize,
    sizes: Vec<u64>,
    demands: Vec<Vec<usize>>,
}

/// Packs per-session decoder tuples into one tuple, session 1 least significant.
/// An out-of-range session output makes the packed value `u64::MAX`, which is
/// never a valid message.
pub(crate) fn join_sessions(sessions: &[Vec<u64>], demanded: &[usize], sizes: &[u64]) -> Vec<u64> {
    demanded
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let radix = sizes[i];
            let digits: Vec<u64> = sessions
                .iter()
                .map(|s| s.get(k).copied().unwrap_or(0))
                .collect();
            if digits.iter().any(|&d| d >= radix) {
                return u64::MAX;
            }
            compose(&digits, &vec![radix; sessions.len()])
        })
        .collect()
}

pub fn parallel_repeat(
    base: SharedCode,
    inst: &NetworkInstance,
    m: usize,
) -> Result<RepeatedCode, CodeError> {
    validate_code(base.as_ref(), inst)?;
    if m == 0 {
        return Err(CodeError::Overflow("repetition count must be positive".into()));
    }
    let sizes = base
        .message_sizes()
        .iter()
        .map(|&w| checked_pow(w, m))
        .collect::<Result<Vec<_>, _>>()?;
    for e in 0..base.num_edges() {
        for t in 1..=base.outer_blocklength() {
            let s = base.split(e, t);
            checked_pow(s.forward, m)?;
            checked_pow(s.backward, m)?;
        }
    }
    base.inner_blocklength()
        .checked_mul(m as u64)
        .ok_or_else(|| CodeError::Overflow("inner blocklength".into()))?;
    let demands = (0..inst.terminals().len())
        .map(|j| inst.demanded_by(j))
        .collect();
    Ok(RepeatedCode {
        base,
        m,
        sizes,
        demands,
    })
}

impl RepeatedCode {
    pub fn sessions(&self) -> usize {
        self.m
    }

    pub fn base(&self) -> &SharedCode {
        &self.base
    }

    /// The base-code state of one session.
    pub fn session_state(&self, state: &InfoState, session: usize) -> InfoState {
        let base_sizes = self.base.message_sizes();
        let pick = |value: u64, radix: u64| decompose(value, &vec![radix; self.m])[session];
        InfoState {
            node: state.node,
            time: state.time,
            own: state
                .own
                .iter()
                .map(|&(i, w)| (i, pick(w, base_sizes[i])))
                .collect(),
            incoming: state
                .incoming
                .iter()
                .map(|inc| Incoming {
                    edge: inc.edge,
                    dir: inc.dir,
                    symbols: inc
                        .symbols
                        .iter()
                        .enumerate()
                        .map(|(k, &s)| pick(s, self.base.split(inc.edge, k + 1).size(inc.dir)))
                        .collect(),
                })
                .collect(),
        }
    }

    /// Per-session decoder outputs.
    pub fn decode_sessions(&self, terminal: usize, state: &InfoState) -> Vec<Vec<u64>> {
        (0..self.m)
            .map(|j| self.base.decode(terminal, &self.session_state(state, j)))
            .collect()
    }
}

impl NetworkCode for RepeatedCode {
    fn inner_blocklength(&self) -> u64 {
        self.base.inner_blocklength() * self.m as u64
    }

    fn outer_blocklength(&self) -> usize {
        self.base.outer_blocklength()
    }

    fn message_sizes(&self) -> &[u64] {
        &self.sizes
    }

    fn num_edges(&self) -> usize {
        self.base.num_edges()
    }

    fn num_terminals(&self) -> usize {
        self.base.num_terminals()
    }

    fn split(&self, edge: EdgeId, t: usize) -> Split {
        let s = self.base.split(edge, t);
        Split::new(
            s.forward.pow(self.m as u32),
            s.backward.pow(self.m as u32),
        )
    }

    fn encode(&self, edge: EdgeId, t: usize, dir: Direction, state: &InfoState) -> u64 {
        let radix = self.base.split(edge, t).size(dir);
        let digits: Vec<u64> = (0..self.m)
            .map(|j| self.base.encode(edge, t, dir, &self.session_state(state, j)))
            .collect();
        compose(&digits, &vec![radix; self.m])
    }

    fn decode(&self, terminal: usize, state: &InfoState) -> Vec<u64> {
        let sessions = self.decode_sessions(terminal, state);
        join_sessions(&sessions, &self.demands[terminal], self.base.message_sizes())
    }

    fn sub_block(&self) -> Option<usize> {
        self.base.sub_block()
    }

    fn kind(&self) -> String {
        format!("parallel_repeat({}, m={})", self.base.kind(), self.m)
    }
}
