//! Finite-blocklength network codes on undirected instances.
//!
//! A code runs for `N` rounds (outer blocklength) with `n` channel uses per
//! round (inner blocklength). In every round each edge carries one symbol in
//! each direction; the two directional alphabet sizes multiply to at most
//! `floor(2^(capacity * n))`. Symbol `0` is the "no information" symbol.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, NetworkInstance, VertexId};
use crate::rational::{log2_bounds, Rational};

mod exec;
mod feasibility;
pub mod file;
mod routing;
mod table;

pub use exec::{decode_outputs, execute, validate_code, ExecutionTrace, Executor};
pub use feasibility::{
    check_feasibility, exhaustive_failing_set, CheckMode, FeasibilityReport, FeasibilityTarget, MessageTuples,
    DEFAULT_ENUMERATION_LIMIT,
};
pub use routing::{make_routing_code, Route, RoutingCode};
pub use table::{info_state_index, info_state_space, InfoStateSpace, TableCode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// From the edge's first listed endpoint to its second.
    Forward,
    Backward,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }

    /// Direction of travel from `from` along an edge `(a, b)`.
    pub fn leaving(edge_a: VertexId, from: VertexId) -> Direction {
        if from == edge_a {
            Direction::Forward
        } else {
            Direction::Backward
        }
    }
}

/// Directional alphabet sizes of one edge at one timestep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Split {
    pub forward: u64,
    pub backward: u64,
}

impl Split {
    pub const IDLE: Split = Split {
        forward: 1,
        backward: 1,
    };

    pub fn new(forward: u64, backward: u64) -> Self {
        Split { forward, backward }
    }

    pub fn size(&self, dir: Direction) -> u64 {
        match dir {
            Direction::Forward => self.forward,
            Direction::Backward => self.backward,
        }
    }

    pub fn oriented(&self, flip: bool) -> Split {
        if flip {
            Split::new(self.backward, self.forward)
        } else {
            *self
        }
    }

    pub fn product(&self) -> u128 {
        self.forward as u128 * self.backward as u128
    }
}

/// Symbols that arrived at a node over one incident edge, one per timestep.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Incoming {
    pub edge: EdgeId,
    /// Direction of travel of these symbols (towards the node holding the state).
    pub dir: Direction,
    pub symbols: Vec<u64>,
}

/// Everything a node knows after `time` timesteps: its own source messages and
/// every symbol that arrived over its incident edges at timesteps `1..=time`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InfoState {
    pub node: VertexId,
    pub time: usize,
    /// `(source index, message)` for each source located at this node.
    pub own: Vec<(usize, u64)>,
    /// One entry per incident edge, ascending by edge id.
    pub incoming: Vec<Incoming>,
}

impl InfoState {
    pub fn message(&self, source: usize) -> Option<u64> {
        self.own.iter().find(|(i, _)| *i == source).map(|&(_, w)| w)
    }

    pub fn received(&self, edge: EdgeId) -> Option<&Incoming> {
        self.incoming.iter().find(|inc| inc.edge == edge)
    }

    /// Symbol that arrived over `edge` at timestep `t` (1-based).
    pub fn symbol(&self, edge: EdgeId, t: usize) -> Option<u64> {
        let inc = self.received(edge)?;
        t.checked_sub(1).and_then(|k| inc.symbols.get(k)).copied()
    }
}

/// A deterministic network code: per-(edge, timestep) directional alphabets,
/// encoders for both directions of every edge, and a decoder per terminal.
///
/// Encoders at timestep `t` receive the tail node's state after `t - 1`
/// timesteps; decoders receive the terminal's state after `N` timesteps and
/// return the reproduced messages of the sources it demands, ascending by
/// source index.
pub trait NetworkCode: Send + Sync + fmt::Debug {
    fn inner_blocklength(&self) -> u64;
    fn outer_blocklength(&self) -> usize;
    fn message_sizes(&self) -> &[u64];
    /// Edge count of the instance the code is written for.
    fn num_edges(&self) -> usize;
    fn num_terminals(&self) -> usize;
    /// Alphabet sizes on `edge` at timestep `t` (1-based).
    fn split(&self, edge: EdgeId, t: usize) -> Split;
    fn encode(&self, edge: EdgeId, t: usize, dir: Direction, state: &InfoState) -> u64;
    fn decode(&self, terminal: usize, state: &InfoState) -> Vec<u64>;

    /// `Some(b)` when timesteps come in sub-blocks of length `b` with constant
    /// splits per sub-block, and encoders in sub-block `i` read only symbols
    /// from sub-blocks before `i`.
    fn sub_block(&self) -> Option<usize> {
        None
    }

    /// Short human-readable name of the construction.
    fn kind(&self) -> String;
}

pub type SharedCode = Arc<dyn NetworkCode>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("code targets {code} edges/terminals/sources but the instance has {instance}")]
    InstanceMismatch { code: String, instance: String },
    #[error("split on edge {edge} at t={t} exceeds capacity: {forward} x {backward} > {bound}")]
    SplitCapacityViolation {
        edge: EdgeId,
        t: usize,
        forward: u64,
        backward: u64,
        bound: String,
    },
    #[error("zero-size alphabet on edge {edge} at t={t}")]
    EmptyAlphabet { edge: EdgeId, t: usize },
    #[error("encoder on edge {edge} at t={t} ({dir:?}) returned {symbol}, alphabet size {size}")]
    SymbolOutOfRange {
        edge: EdgeId,
        t: usize,
        dir: Direction,
        symbol: u64,
        size: u64,
    },
    #[error("message {value} for source {source_index} outside [0, {size})")]
    MessageOutOfRange {
        source_index: usize,
        value: u64,
        size: u64,
    },
    #[error("message tuple space of size {size} exceeds the enumeration limit {limit}")]
    EnumerationTooLarge { size: String, limit: u64 },
    #[error("code message sizes {code:?} do not match the target rates (expected {expected:?})")]
    RateMismatch { code: Vec<u64>, expected: Vec<String> },
    #[error("route capacity overflow on edge {edge} at t={t}: {detail}")]
    CapacityOverflow { edge: EdgeId, t: usize, detail: String },
    #[error("bad route: {0}")]
    BadRoute(String),
    #[error("value does not fit in 64 bits: {0}")]
    Overflow(String),
    #[error("table too large: {0}")]
    TableTooLarge(String),
    #[error("malformed code document: {0}")]
    MalformedCode(String),
}

/// Per-source achieved rate `log2|W_i| / (N n)`, as exact bounds
/// (equal when `|W_i|` is a power of two).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AchievedRate {
    pub message_size: String,
    pub block_length: u64,
    pub lower: Rational,
    pub upper: Rational,
    pub exact: bool,
}

impl AchievedRate {
    pub fn new(message_size: &BigUint, block_length: u64) -> Self {
        let (lo, hi) = log2_bounds(message_size);
        AchievedRate {
            message_size: message_size.to_string(),
            block_length,
            lower: crate::rational::ratio(lo, block_length),
            upper: crate::rational::ratio(hi, block_length),
            exact: lo == hi,
        }
    }
}

/// Achieved per-source rates of a code.
pub fn achieved_rates(code: &dyn NetworkCode) -> Vec<AchievedRate> {
    let block = code.inner_blocklength() * code.outer_blocklength() as u64;
    code.message_sizes()
        .iter()
        .map(|&w| AchievedRate::new(&BigUint::from(w), block))
        .collect()
}

/// Mixed-radix composition: `digits[0]` is least significant.
pub fn compose(digits: &[u64], radices: &[u64]) -> u64 {
    let mut value = 0u64;
    for (d, r) in digits.iter().zip(radices).rev() {
        value = value * r + d;
    }
    value
}

/// Inverse of [`compose`].
pub fn decompose(mut value: u64, radices: &[u64]) -> Vec<u64> {
    radices
        .iter()
        .map(|&r| {
            let d = value % r;
            value /= r;
            d
        })
        .collect()
}

/// `base^exp`, or an overflow error.
pub fn checked_pow(base: u64, exp: usize) -> Result<u64, CodeError> {
    let mut acc = 1u64;
    for _ in 0..exp {
        acc = acc
            .checked_mul(base)
            .ok_or_else(|| CodeError::Overflow(format!("{base}^{exp}")))?;
    }
    Ok(acc)
}

/// Builds node `v`'s info state from a prefix of a trace.
pub fn state_from_trace(
    inst: &NetworkInstance,
    trace: &ExecutionTrace,
    v: VertexId,
    time: usize,
) -> InfoState {
    let own = inst
        .sources_at(v)
        .into_iter()
        .map(|i| (i, trace.messages[i]))
        .collect();
    let incoming = inst
        .incident(v)
        .into_iter()
        .map(|e| {
            let dir = Direction::leaving(inst.edge(e).a, v).flip();
            Incoming {
                edge: e,
                dir,
                symbols: (1..=time).map(|t| trace.symbol(e, t, dir)).collect(),
            }
        })
        .collect();
    InfoState {
        node: v,
        time,
        own,
        incoming,
    }
}
