use super::repeat::join_sessions;
use crate::code::{
    checked_pow, decompose, validate_code, CodeError, Direction, Incoming, InfoState, NetworkCode,
    SharedCode, Split,
};
use crate::graph::{EdgeId, NetworkInstance};

/// `N` sessions of an `N`-round code, staggered so that session `j` runs its
/// round `i` at timestep `(i - 1) N + j`. Timesteps come in sub-blocks of
/// length `N` and each sub-block reads only earlier sub-blocks.
#[derive(Debug, Clone)]
pub struct InterleavedCode {
    base: SharedCode,
    sessions: usize,
    sizes: Vec<u64>,
    demands: Vec<Vec<usize>>,
}

pub fn interleave(base: SharedCode, inst: &NetworkInstance) -> Result<InterleavedCode, CodeError> {
    validate_code(base.as_ref(), inst)?;
    let sessions = base.outer_blocklength();
    let sizes = base
        .message_sizes()
        .iter()
        .map(|&w| checked_pow(w, sessions))
        .collect::<Result<Vec<_>, _>>()?;
    sessions
        .checked_mul(sessions)
        .ok_or_else(|| CodeError::Overflow("outer blocklength".into()))?;
    Ok(InterleavedCode {
        base,
        sessions,
        sizes,
        demands: (0..inst.terminals().len())
            .map(|j| inst.demanded_by(j))
            .collect(),
    })
}

impl InterleavedCode {
    pub fn base(&self) -> &SharedCode {
        &self.base
    }

    /// `(session j, base round i)` of timestep `t`, both 1-based.
    pub fn position(&self, t: usize) -> (usize, usize) {
        let b = self.sessions;
        ((t - 1) % b + 1, (t - 1) / b + 1)
    }

    /// Base state of session `j` (1-based) after base round `rounds`.
    pub fn session_state(&self, state: &InfoState, j: usize, rounds: usize) -> InfoState {
        let b = self.sessions;
        let sizes = self.base.message_sizes();
        InfoState {
            node: state.node,
            time: rounds,
            own: state
                .own
                .iter()
                .map(|&(i, w)| (i, decompose(w, &vec![sizes[i]; b])[j - 1]))
                .collect(),
            incoming: state
                .incoming
                .iter()
                .map(|inc| Incoming {
                    edge: inc.edge,
                    dir: inc.dir,
                    symbols: (1..=rounds)
                        .map(|i| inc.symbols.get((i - 1) * b + j - 1).copied().unwrap_or(0))
                        .collect(),
                })
                .collect(),
        }
    }
}

impl NetworkCode for InterleavedCode {
    fn inner_blocklength(&self) -> u64 {
        self.base.inner_blocklength()
    }

    fn outer_blocklength(&self) -> usize {
        self.sessions * self.sessions
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
        let (_, i) = self.position(t);
        self.base.split(edge, i)
    }

    fn encode(&self, edge: EdgeId, t: usize, dir: Direction, state: &InfoState) -> u64 {
        let (j, i) = self.position(t);
        self.base
            .encode(edge, i, dir, &self.session_state(state, j, i - 1))
    }

    fn decode(&self, terminal: usize, state: &InfoState) -> Vec<u64> {
        let b = self.sessions;
        let sessions: Vec<Vec<u64>> = (1..=b)
            .map(|j| self.base.decode(terminal, &self.session_state(state, j, b)))
            .collect();
        join_sessions(&sessions, &self.demands[terminal], self.base.message_sizes())
    }

    fn sub_block(&self) -> Option<usize> {
        Some(self.sessions)
    }

    fn kind(&self) -> String {
        format!("interleave({})", self.base.kind())
    }
}
