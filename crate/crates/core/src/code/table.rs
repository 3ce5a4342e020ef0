use serde::{Deserialize, Serialize};

use super::{
    compose, decompose, validate_code, CodeError, Direction, Incoming, InfoState, NetworkCode,
    Split,
};
use crate::graph::{EdgeId, NetworkInstance, VertexId};

/// Mixed-radix layout of a node's info states at a given time.
///
/// Digits, least significant first: the node's own messages in source order,
/// then for each incident edge in ascending order the symbols that arrived at
/// timesteps `1..=time`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfoStateSpace {
    pub node: VertexId,
    pub time: usize,
    pub radices: Vec<u64>,
    pub size: u64,
}

pub fn info_state_space(
    code: &dyn NetworkCode,
    inst: &NetworkInstance,
    node: VertexId,
    time: usize,
) -> Result<InfoStateSpace, CodeError> {
    let mut radices: Vec<u64> = inst
        .sources_at(node)
        .into_iter()
        .map(|i| code.message_sizes()[i])
        .collect();
    for e in inst.incident(node) {
        let dir = Direction::leaving(inst.edge(e).a, node).flip();
        radices.extend((1..=time).map(|t| code.split(e, t).size(dir)));
    }
    let size = radices
        .iter()
        .try_fold(1u64, |acc, &r| acc.checked_mul(r))
        .ok_or_else(|| {
            CodeError::TableTooLarge(format!(
                "info states of {} at time {time} exceed 64 bits",
                inst.name(node)
            ))
        })?;
    Ok(InfoStateSpace {
        node,
        time,
        radices,
        size,
    })
}

/// Index of `state` in its [`InfoStateSpace`].
pub fn info_state_index(code: &dyn NetworkCode, state: &InfoState) -> u64 {
    let mut digits = Vec::new();
    let mut radices = Vec::new();
    for &(i, w) in &state.own {
        digits.push(w);
        radices.push(code.message_sizes()[i]);
    }
    for inc in &state.incoming {
        for (k, &s) in inc.symbols.iter().enumerate() {
            digits.push(s);
            radices.push(code.split(inc.edge, k + 1).size(inc.dir));
        }
    }
    compose(&digits, &radices)
}

fn state_from_index(inst: &NetworkInstance, space: &InfoStateSpace, index: u64) -> InfoState {
    let digits = decompose(index, &space.radices);
    let mut it = digits.into_iter();
    let own = inst
        .sources_at(space.node)
        .into_iter()
        .map(|i| (i, it.next().unwrap_or(0)))
        .collect();
    let incoming = inst
        .incident(space.node)
        .into_iter()
        .map(|e| Incoming {
            edge: e,
            dir: Direction::leaving(inst.edge(e).a, space.node).flip(),
            symbols: (0..space.time).map(|_| it.next().unwrap_or(0)).collect(),
        })
        .collect();
    InfoState {
        node: space.node,
        time: space.time,
        own,
        incoming,
    }
}

/// Encoder tables of one edge at one timestep. An empty table means the
/// constant symbol 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderTables {
    pub forward: Vec<u64>,
    pub backward: Vec<u64>,
}

/// A code stored as explicit lookup tables over info-state indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableCode {
    pub n: u64,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub message_sizes: Vec<u64>,
    /// `[e][t - 1] = [forward size, backward size]`
    pub splits: Vec<Vec<[u64; 2]>>,
    /// `[e][t - 1]`, indexed by the tail node's state after `t - 1` steps.
    pub encoders: Vec<Vec<EncoderTables>>,
    /// `[j][state index]` = reproduced messages of the sources terminal `j` demands.
    pub decoders: Vec<Vec<Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sub_block: Option<usize>,
}

impl TableCode {
    /// Evaluates every encoder and decoder of `code` on every info state.
    /// `limit` bounds the total number of table entries.
    pub fn materialize(
        code: &dyn NetworkCode,
        inst: &NetworkInstance,
        limit: u64,
    ) -> Result<TableCode, CodeError> {
        validate_code(code, inst)?;
        let big_n = code.outer_blocklength();
        let mut budget = limit;
        let mut take = |size: u64| -> Result<(), CodeError> {
            budget = budget.checked_sub(size).ok_or_else(|| {
                CodeError::TableTooLarge(format!("more than {limit} table entries"))
            })?;
            Ok(())
        };
        let mut encoders = Vec::with_capacity(inst.edges().len());
        for (e, edge) in inst.edges().iter().enumerate() {
            let mut per_t = Vec::with_capacity(big_n);
            for t in 1..=big_n {
                let split = code.split(e, t);
                let mut table = |node: VertexId, dir: Direction| -> Result<Vec<u64>, CodeError> {
                    if split.size(dir) == 1 {
                        return Ok(Vec::new());
                    }
                    let space = info_state_space(code, inst, node, t - 1)?;
                    take(space.size)?;
                    Ok((0..space.size)
                        .map(|k| code.encode(e, t, dir, &state_from_index(inst, &space, k)))
                        .collect())
                };
                per_t.push(EncoderTables {
                    forward: table(edge.a, Direction::Forward)?,
                    backward: table(edge.b, Direction::Backward)?,
                });
            }
            encoders.push(per_t);
        }
        let mut decoders = Vec::with_capacity(inst.terminals().len());
        for (j, &d) in inst.terminals().iter().enumerate() {
            let space = info_state_space(code, inst, d, big_n)?;
            take(space.size)?;
            decoders.push(
                (0..space.size)
                    .map(|k| code.decode(j, &state_from_index(inst, &space, k)))
                    .collect(),
            );
        }
        Ok(TableCode {
            n: code.inner_blocklength(),
            big_n,
            message_sizes: code.message_sizes().to_vec(),
            splits: (0..inst.edges().len())
                .map(|e| {
                    (1..=big_n)
                        .map(|t| {
                            let s = code.split(e, t);
                            [s.forward, s.backward]
                        })
                        .collect()
                })
                .collect(),
            encoders,
            decoders,
            sub_block: code.sub_block(),
        })
    }

    /// Structural check against `inst`: split constraints, table shapes and
    /// table entries in range.
    pub fn check(&self, inst: &NetworkInstance) -> Result<(), CodeError> {
        let bad = |msg: String| CodeError::MalformedCode(msg);
        let m = inst.edges().len();
        if self.splits.len() != m || self.encoders.len() != m {
            return Err(bad(format!("expected split and encoder lists for {m} edges")));
        }
        if self.splits.iter().any(|s| s.len() != self.big_n)
            || self.encoders.iter().any(|s| s.len() != self.big_n)
        {
            return Err(bad(format!("every edge needs {} timesteps", self.big_n)));
        }
        if self.decoders.len() != inst.terminals().len() {
            return Err(bad("one decoder per terminal expected".into()));
        }
        validate_code(self, inst)?;
        for (e, edge) in inst.edges().iter().enumerate() {
            for t in 1..=self.big_n {
                let split = self.split(e, t);
                let tables = &self.encoders[e][t - 1];
                for (node, dir, table) in [
                    (edge.a, Direction::Forward, &tables.forward),
                    (edge.b, Direction::Backward, &tables.backward),
                ] {
                    if table.is_empty() {
                        continue;
                    }
                    let space = info_state_space(self, inst, node, t - 1)?;
                    if table.len() as u64 != space.size {
                        return Err(bad(format!(
                            "encoder ({}, t={t}, {dir:?}) has {} entries, expected {}",
                            inst.edge_label(e),
                            table.len(),
                            space.size
                        )));
                    }
                    if let Some(&s) = table.iter().find(|&&s| s >= split.size(dir)) {
                        return Err(CodeError::SymbolOutOfRange {
                            edge: e,
                            t,
                            dir,
                            symbol: s,
                            size: split.size(dir),
                        });
                    }
                }
            }
        }
        for (j, &d) in inst.terminals().iter().enumerate() {
            let space = info_state_space(self, inst, d, self.big_n)?;
            let want = inst.demanded_by(j).len();
            if self.decoders[j].len() as u64 != space.size
                || self.decoders[j].iter().any(|out| out.len() != want)
            {
                return Err(bad(format!(
                    "decoder {j} must map {} states to {want}-tuples",
                    space.size
                )));
            }
        }
        Ok(())
    }
}

impl NetworkCode for TableCode {
    fn inner_blocklength(&self) -> u64 {
        self.n
    }

    fn outer_blocklength(&self) -> usize {
        self.big_n
    }

    fn message_sizes(&self) -> &[u64] {
        &self.message_sizes
    }

    fn num_edges(&self) -> usize {
        self.splits.len()
    }

    fn num_terminals(&self) -> usize {
        self.decoders.len()
    }

    fn split(&self, edge: EdgeId, t: usize) -> Split {
        let [f, b] = self.splits[edge][t - 1];
        Split::new(f, b)
    }

    fn encode(&self, edge: EdgeId, t: usize, dir: Direction, state: &InfoState) -> u64 {
        let tables = &self.encoders[edge][t - 1];
        let table = match dir {
            Direction::Forward => &tables.forward,
            Direction::Backward => &tables.backward,
        };
        if table.is_empty() {
            return 0;
        }
        table
            .get(info_state_index(self, state) as usize)
            .copied()
            .unwrap_or(0)
    }

    fn decode(&self, terminal: usize, state: &InfoState) -> Vec<u64> {
        self.decoders[terminal]
            .get(info_state_index(self, state) as usize)
            .cloned()
            .unwrap_or_default()
    }

    fn sub_block(&self) -> Option<usize> {
        self.sub_block
    }

    fn kind(&self) -> String {
        "table".to_string()
    }
}
