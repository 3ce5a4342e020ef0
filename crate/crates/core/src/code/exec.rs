use num_bigint::BigUint;
use serde::Serialize;

use super::{state_from_trace, CodeError, Direction, Incoming, InfoState, NetworkCode};
use crate::graph::{EdgeId, NetworkInstance, VertexId};
use crate::rational::{alphabet_size, saturating_u128};

/// Every directed symbol on every edge at every timestep for one message tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ExecutionTrace {
    pub messages: Vec<u64>,
    /// `forward[e][t - 1]`
    pub forward: Vec<Vec<u64>>,
    /// `backward[e][t - 1]`
    pub backward: Vec<Vec<u64>>,
    pub steps: usize,
}

impl ExecutionTrace {
    pub fn symbol(&self, edge: EdgeId, t: usize, dir: Direction) -> u64 {
        match dir {
            Direction::Forward => self.forward[edge][t - 1],
            Direction::Backward => self.backward[edge][t - 1],
        }
    }

    pub fn num_steps(&self) -> usize {
        self.steps
    }
}

/// Checks that `code` fits `inst`: matching edge/source/terminal counts, and for
/// every edge and timestep both alphabet sizes are at least one and their
/// product is at most `floor(2^(capacity * n))`.
pub fn validate_code(code: &dyn NetworkCode, inst: &NetworkInstance) -> Result<(), CodeError> {
    let counts = |e: usize, k: usize, r: usize| format!("{e}/{r}/{k}");
    if code.num_edges() != inst.edges().len()
        || code.message_sizes().len() != inst.sources().len()
        || code.num_terminals() != inst.terminals().len()
    {
        return Err(CodeError::InstanceMismatch {
            code: counts(code.num_edges(), code.message_sizes().len(), code.num_terminals()),
            instance: counts(
                inst.edges().len(),
                inst.sources().len(),
                inst.terminals().len(),
            ),
        });
    }
    if let Some(i) = code.message_sizes().iter().position(|&w| w == 0) {
        return Err(CodeError::MessageOutOfRange {
            source_index: i,
            value: 0,
            size: 0,
        });
    }
    let n = code.inner_blocklength();
    for (e, edge) in inst.edges().iter().enumerate() {
        let bound: BigUint = alphabet_size(&edge.capacity, n);
        let limit = saturating_u128(&bound);
        for t in 1..=code.outer_blocklength() {
            let split = code.split(e, t);
            if split.forward == 0 || split.backward == 0 {
                return Err(CodeError::EmptyAlphabet { edge: e, t });
            }
            if split.product() > limit {
                return Err(CodeError::SplitCapacityViolation {
                    edge: e,
                    t,
                    forward: split.forward,
                    backward: split.backward,
                    bound: bound.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// A code bound to an instance after validation; runs message tuples.
#[derive(Debug)]
pub struct Executor<'a> {
    code: &'a dyn NetworkCode,
    inst: &'a NetworkInstance,
    /// `(edge, dir of arrival)` per node, ascending by edge.
    arrivals: Vec<Vec<(EdgeId, Direction)>>,
    /// For edge `e`: slot of `e` in the incoming list of its endpoints `a` and `b`.
    slots: Vec<(usize, usize)>,
    own: Vec<Vec<usize>>,
}

impl<'a> Executor<'a> {
    pub fn new(code: &'a dyn NetworkCode, inst: &'a NetworkInstance) -> Result<Self, CodeError> {
        validate_code(code, inst)?;
        let n = inst.num_vertices();
        let mut arrivals: Vec<Vec<(EdgeId, Direction)>> = vec![Vec::new(); n];
        let mut slots = vec![(0, 0); inst.edges().len()];
        for (e, edge) in inst.edges().iter().enumerate() {
            slots[e].0 = arrivals[edge.a].len();
            arrivals[edge.a].push((e, Direction::Backward));
            slots[e].1 = arrivals[edge.b].len();
            arrivals[edge.b].push((e, Direction::Forward));
        }
        let own = (0..n).map(|v| inst.sources_at(v)).collect();
        Ok(Executor {
            code,
            inst,
            arrivals,
            slots,
            own,
        })
    }

    pub fn instance(&self) -> &NetworkInstance {
        self.inst
    }

    pub fn code(&self) -> &dyn NetworkCode {
        self.code
    }

    fn check_messages(&self, messages: &[u64]) -> Result<(), CodeError> {
        let sizes = self.code.message_sizes();
        if messages.len() != sizes.len() {
            return Err(CodeError::InstanceMismatch {
                code: format!("{} sources", sizes.len()),
                instance: format!("{} messages", messages.len()),
            });
        }
        for (i, (&w, &size)) in messages.iter().zip(sizes).enumerate() {
            if w >= size {
                return Err(CodeError::MessageOutOfRange {
                    source_index: i,
                    value: w,
                    size,
                });
            }
        }
        Ok(())
    }

    /// Runs all `N` rounds. Each round first evaluates every encoder on the
    /// states after the previous round, then commits all the new symbols.
    pub fn run_with_states(
        &self,
        messages: &[u64],
    ) -> Result<(ExecutionTrace, Vec<InfoState>), CodeError> {
        self.check_messages(messages)?;
        let big_n = self.code.outer_blocklength();
        let edges = self.inst.edges();
        let mut states: Vec<InfoState> = (0..self.inst.num_vertices())
            .map(|v| InfoState {
                node: v,
                time: 0,
                own: self.own[v].iter().map(|&i| (i, messages[i])).collect(),
                incoming: self.arrivals[v]
                    .iter()
                    .map(|&(edge, dir)| Incoming {
                        edge,
                        dir,
                        symbols: Vec::with_capacity(big_n),
                    })
                    .collect(),
            })
            .collect();
        let mut forward = vec![Vec::with_capacity(big_n); edges.len()];
        let mut backward = vec![Vec::with_capacity(big_n); edges.len()];
        let mut round = vec![(0u64, 0u64); edges.len()];
        for t in 1..=big_n {
            for (e, edge) in edges.iter().enumerate() {
                let split = self.code.split(e, t);
                let f = self.code.encode(e, t, Direction::Forward, &states[edge.a]);
                let b = self.code.encode(e, t, Direction::Backward, &states[edge.b]);
                for (symbol, dir) in [(f, Direction::Forward), (b, Direction::Backward)] {
                    if symbol >= split.size(dir) {
                        return Err(CodeError::SymbolOutOfRange {
                            edge: e,
                            t,
                            dir,
                            symbol,
                            size: split.size(dir),
                        });
                    }
                }
                round[e] = (f, b);
            }
            for (e, edge) in edges.iter().enumerate() {
                let (f, b) = round[e];
                let (slot_a, slot_b) = self.slots[e];
                states[edge.b].incoming[slot_b].symbols.push(f);
                states[edge.a].incoming[slot_a].symbols.push(b);
                forward[e].push(f);
                backward[e].push(b);
            }
            for s in &mut states {
                s.time = t;
            }
        }
        Ok((
            ExecutionTrace {
                messages: messages.to_vec(),
                forward,
                backward,
                steps: big_n,
            },
            states,
        ))
    }

    pub fn run(&self, messages: &[u64]) -> Result<ExecutionTrace, CodeError> {
        self.run_with_states(messages).map(|(trace, _)| trace)
    }

    /// Per-terminal reproductions for one message tuple.
    pub fn outputs(&self, messages: &[u64]) -> Result<Vec<Vec<u64>>, CodeError> {
        let (_, states) = self.run_with_states(messages)?;
        Ok(self.decode_states(&states))
    }

    fn decode_states(&self, states: &[InfoState]) -> Vec<Vec<u64>> {
        self.inst
            .terminals()
            .iter()
            .enumerate()
            .map(|(j, &d)| self.code.decode(j, &states[d]))
            .collect()
    }

    /// Indices of terminals whose reproduction differs from the demanded messages.
    pub fn failures(&self, messages: &[u64], outputs: &[Vec<u64>]) -> Vec<usize> {
        (0..self.inst.terminals().len())
            .filter(|&j| {
                let want: Vec<u64> = self
                    .inst
                    .demanded_by(j)
                    .into_iter()
                    .map(|i| messages[i])
                    .collect();
                outputs[j] != want
            })
            .collect()
    }

    pub fn state_at(&self, trace: &ExecutionTrace, v: VertexId, time: usize) -> InfoState {
        state_from_trace(self.inst, trace, v, time)
    }
}

/// Validates `code` against `inst` and runs it on one message tuple.
pub fn execute(
    code: &dyn NetworkCode,
    inst: &NetworkInstance,
    messages: &[u64],
) -> Result<ExecutionTrace, CodeError> {
    Executor::new(code, inst)?.run(messages)
}

/// Evaluates every terminal's decoder on its state after the full trace.
pub fn decode_outputs(
    code: &dyn NetworkCode,
    inst: &NetworkInstance,
    trace: &ExecutionTrace,
) -> Vec<Vec<u64>> {
    let big_n = trace.num_steps();
    inst.terminals()
        .iter()
        .enumerate()
        .map(|(j, &d)| code.decode(j, &state_from_trace(inst, trace, d, big_n)))
        .collect()
}
