//! The bridge case: fix the messages of sources whose demands cross the edge,
//! then let the endpoint on each side replay the other side's transmissions.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::AnalysisError;
use crate::code::{
    validate_code, Direction, Executor, Incoming, InfoState, MessageTuples, NetworkCode,
    SharedCode, Split,
};
use crate::graph::{EdgeId, InstanceDocument, NetworkInstance, VertexId};
use crate::rational::{ratio, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BridgeOptions {
    /// Largest number of full message tuples enumerated per side.
    pub limit: u64,
    /// `(count, seed)`: sample this many fixings when enumerating all of them
    /// would pass `limit`.
    pub samples: Option<(u64, u64)>,
}

impl Default for BridgeOptions {
    fn default() -> Self {
        BridgeOptions {
            limit: crate::code::DEFAULT_ENUMERATION_LIMIT,
            samples: None,
        }
    }
}

/// A code on one side of the bridge: node `u` replays everything the far side
/// would have sent over the edge, given fixed foreign messages.
#[derive(Debug, Clone)]
pub struct SimulatedCode {
    full: SharedCode,
    full_inst: NetworkInstance,
    /// Full vertex of each sub vertex.
    vmap: Vec<VertexId>,
    /// Full edge of each sub edge, and the inverse (`None` off this side).
    emap: Vec<EdgeId>,
    edge_back: Vec<Option<EdgeId>>,
    /// Sub source of each full source.
    source_back: Vec<Option<usize>>,
    tmap: Vec<usize>,
    /// Fixed message of every foreign source (`None` for sources on this side).
    fixed: Vec<Option<u64>>,
    sizes: Vec<u64>,
    /// Positions in the full decoder output kept by each sub terminal.
    keep: Vec<Vec<usize>>,
    bridge: EdgeId,
    u: VertexId,
    side: Vec<bool>,
}

impl SimulatedCode {
    /// Full state of the full vertex `v` on this side given the sub state.
    fn full_state(&self, state: &InfoState) -> InfoState {
        let mut full = self.full_state_without_bridge(state);
        if full.node == self.u {
            let replayed = self.replay(state);
            if let Some(inc) = full.incoming.iter_mut().find(|inc| inc.edge == self.bridge) {
                inc.symbols = replayed;
            }
        }
        full
    }

    /// Symbols arriving at `u` over the bridge at timesteps `1..=state.time`,
    /// from a replay of the far side driven by `u`'s own transmissions.
    fn replay(&self, state: &InfoState) -> Vec<u64> {
        let inst = &self.full_inst;
        let far: Vec<VertexId> = (0..inst.num_vertices()).filter(|&v| !self.side[v]).collect();
        let mut far_states: Vec<Option<InfoState>> = vec![None; inst.num_vertices()];
        for &v in &far {
            far_states[v] = Some(InfoState {
                node: v,
                time: 0,
                own: inst
                    .sources_at(v)
                    .into_iter()
                    .map(|i| (i, self.fixed[i].unwrap_or(0)))
                    .collect(),
                incoming: inst
                    .incident(v)
                    .into_iter()
                    .map(|e| Incoming {
                        edge: e,
                        dir: Direction::leaving(inst.edge(e).a, v).flip(),
                        symbols: Vec::new(),
                    })
                    .collect(),
            });
        }
        let far_edges: Vec<EdgeId> = (0..inst.edges().len())
            .filter(|&e| {
                let edge = inst.edge(e);
                !self.side[edge.a] || !self.side[edge.b]
            })
            .collect();
        let from_u = Direction::leaving(inst.edge(self.bridge).a, self.u);
        let mut arrived: Vec<u64> = Vec::with_capacity(state.time);
        for t in 1..=state.time {
            let mut u_full = self.full_state_without_bridge(&truncate(state, t - 1));
            if let Some(inc) = u_full.incoming.iter_mut().find(|inc| inc.edge == self.bridge) {
                inc.symbols = arrived.clone();
            }
            let sent = self.full.encode(self.bridge, t, from_u, &u_full);
            let mut deliveries: Vec<(VertexId, EdgeId, u64)> = Vec::new();
            for &e in &far_edges {
                let edge = inst.edge(e);
                for (tail, dir) in [(edge.a, Direction::Forward), (edge.b, Direction::Backward)] {
                    let head = edge.other(tail);
                    let symbol = if tail == self.u && e == self.bridge {
                        sent
                    } else if let Some(s) = &far_states[tail] {
                        self.full.encode(e, t, dir, s)
                    } else {
                        continue;
                    };
                    deliveries.push((head, e, symbol));
                }
            }
            for (head, e, symbol) in deliveries {
                if head == self.u && e == self.bridge {
                    arrived.push(symbol);
                } else if let Some(s) = far_states[head].as_mut() {
                    if let Some(inc) = s.incoming.iter_mut().find(|inc| inc.edge == e) {
                        inc.symbols.push(symbol);
                    }
                }
            }
            for s in far_states.iter_mut().flatten() {
                s.time = t;
            }
        }
        arrived
    }

    /// Like [`Self::full_state`] but with an empty bridge history.
    fn full_state_without_bridge(&self, state: &InfoState) -> InfoState {
        let v = self.vmap[state.node];
        let mut s = InfoState {
            node: v,
            time: state.time,
            own: Vec::new(),
            incoming: Vec::new(),
        };
        s.own = self
            .full_inst
            .sources_at(v)
            .into_iter()
            .map(|i| {
                let w = match self.source_back[i] {
                    Some(k) => state.message(k).unwrap_or(0),
                    None => self.fixed[i].unwrap_or(0),
                };
                (i, w)
            })
            .collect();
        s.incoming = self
            .full_inst
            .incident(v)
            .into_iter()
            .map(|e| Incoming {
                edge: e,
                dir: Direction::leaving(self.full_inst.edge(e).a, v).flip(),
                symbols: if e == self.bridge {
                    Vec::new()
                } else {
                    self.edge_back[e]
                        .and_then(|sub| state.received(sub))
                        .map(|inc| inc.symbols.clone())
                        .unwrap_or_else(|| vec![0; state.time])
                },
            })
            .collect();
        s
    }
}

fn truncate(state: &InfoState, time: usize) -> InfoState {
    InfoState {
        node: state.node,
        time,
        own: state.own.clone(),
        incoming: state
            .incoming
            .iter()
            .map(|inc| Incoming {
                edge: inc.edge,
                dir: inc.dir,
                symbols: inc.symbols[..time.min(inc.symbols.len())].to_vec(),
            })
            .collect(),
    }
}

impl NetworkCode for SimulatedCode {
    fn inner_blocklength(&self) -> u64 {
        self.full.inner_blocklength()
    }

    fn outer_blocklength(&self) -> usize {
        self.full.outer_blocklength()
    }

    fn message_sizes(&self) -> &[u64] {
        &self.sizes
    }

    fn num_edges(&self) -> usize {
        self.emap.len()
    }

    fn num_terminals(&self) -> usize {
        self.tmap.len()
    }

    fn split(&self, edge: EdgeId, t: usize) -> Split {
        self.full.split(self.emap[edge], t)
    }

    fn encode(&self, edge: EdgeId, t: usize, dir: Direction, state: &InfoState) -> u64 {
        self.full.encode(self.emap[edge], t, dir, &self.full_state(state))
    }

    fn decode(&self, terminal: usize, state: &InfoState) -> Vec<u64> {
        let out = self.full.decode(self.tmap[terminal], &self.full_state(state));
        self.keep[terminal]
            .iter()
            .map(|&p| out.get(p).copied().unwrap_or(u64::MAX))
            .collect()
    }

    fn kind(&self) -> String {
        format!("simulate({})", self.full.kind())
    }
}

/// One side of the bridge after fixing foreign messages.
#[derive(Debug, Clone, Serialize)]
pub struct SideDecomposition {
    /// The endpoint of the edge on this side.
    pub endpoint: String,
    pub instance: InstanceDocument,
    /// Full source indices kept on this side (all their demands stay here).
    pub sources: Vec<usize>,
    pub terminals: Vec<usize>,
    /// `(full source index, fixed message)` for every other source.
    pub fixing: Vec<(usize, u64)>,
    pub conditional_error: Rational,
    /// Error of the whole code; `None` when fixings were sampled.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overall_error: Option<Rational>,
    pub fixings_examined: u64,
    pub sampled: bool,
    /// Exhaustive error of the simulated code on this side.
    pub sub_error: Rational,
    pub traces_match: bool,
    /// First few `(sub edge, t, direction)` mismatches.
    pub mismatches: Vec<(usize, usize, String)>,
    #[serde(skip)]
    pub code: Option<Arc<SimulatedCode>>,
    #[serde(skip)]
    pub sub_instance: Option<NetworkInstance>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BridgeDecomposition {
    pub sides: Vec<SideDecomposition>,
}

/// Splits a code on `inst_with_e` into codes on the two sides of the bridge `(u, u2)`.
pub fn bridge_decompose(
    inst_with_e: &NetworkInstance,
    u: &str,
    u2: &str,
    code: SharedCode,
    options: &BridgeOptions,
) -> Result<BridgeDecomposition, AnalysisError> {
    let a = inst_with_e.require_vertex(u)?;
    let b = inst_with_e.require_vertex(u2)?;
    let bridge = inst_with_e
        .edge_between(a, b)
        .ok_or_else(|| crate::graph::InstanceError::EdgeMissing(u.into(), u2.into()))?;
    validate_code(code.as_ref(), inst_with_e)?;
    let without = inst_with_e.without_edge(u, u2)?;
    let comps = without.connected_components();
    let comp_of = |v: VertexId| comps.iter().position(|c| c.contains(&v)).expect("every vertex has a component");
    if comp_of(a) == comp_of(b) {
        return Err(AnalysisError::NotABridge(u.into(), u2.into()));
    }
    let sides = [a, b]
        .into_iter()
        .map(|end| {
            let side: Vec<bool> = (0..inst_with_e.num_vertices())
                .map(|v| comp_of(v) == comp_of(end))
                .collect();
            decompose_side(inst_with_e, &code, bridge, end, side, options)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BridgeDecomposition { sides })
}

fn too_large(what: &str, size: u128, limit: u64) -> AnalysisError {
    AnalysisError::EnumerationTooLarge {
        what: what.into(),
        size: size.to_string(),
        limit: limit.to_string(),
    }
}

fn decompose_side(
    inst: &NetworkInstance,
    code: &SharedCode,
    bridge: EdgeId,
    end: VertexId,
    side: Vec<bool>,
    options: &BridgeOptions,
) -> Result<SideDecomposition, AnalysisError> {
    let sizes = code.message_sizes();
    let k = inst.sources().len();
    // sources on this side whose every demanding terminal is also on this side
    let kept: Vec<usize> = (0..k)
        .filter(|&i| {
            side[inst.sources()[i]]
                && inst
                    .terminals()
                    .iter()
                    .enumerate()
                    .all(|(j, &d)| !inst.demand()[i][j] || side[d])
        })
        .collect();
    let foreign: Vec<usize> = (0..k).filter(|i| !kept.contains(i)).collect();
    let kept_sizes: Vec<u64> = kept.iter().map(|&i| sizes[i]).collect();
    let foreign_sizes: Vec<u64> = foreign.iter().map(|&i| sizes[i]).collect();
    let inner_count: u128 = kept_sizes.iter().map(|&s| s as u128).product();
    let fixing_count: u128 = foreign_sizes.iter().map(|&s| s as u128).product();
    let limit = options.limit;
    let inner = MessageTuples::new(&kept_sizes, limit)?;
    let exhaustive = inner_count.saturating_mul(fixing_count) <= limit as u128;
    let fixings: Vec<Vec<u64>> = if exhaustive {
        MessageTuples::new(&foreign_sizes, limit)?.iter().collect()
    } else {
        let (count, seed) = options
            .samples
            .ok_or_else(|| too_large("fixings", inner_count.saturating_mul(fixing_count), limit))?;
        if inner_count.saturating_mul(count as u128) > limit as u128 {
            return Err(too_large("sampled fixings", inner_count.saturating_mul(count as u128), limit));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| foreign_sizes.iter().map(|&s| rng.gen_range(0..s)).collect())
            .collect()
    };
    let exec = Executor::new(code.as_ref(), inst)?;
    let combine = |fix: &[u64], own: &[u64]| {
        let mut w = vec![0u64; k];
        for (&i, &x) in foreign.iter().zip(fix) {
            w[i] = x;
        }
        for (&i, &x) in kept.iter().zip(own) {
            w[i] = x;
        }
        w
    };
    let failures: Vec<u64> = fixings
        .par_iter()
        .map(|fix| {
            let mut count = 0u64;
            for own in inner.iter() {
                let w = combine(fix, &own);
                let out = exec.outputs(&w)?;
                if !exec.failures(&w, &out).is_empty() {
                    count += 1;
                }
            }
            Ok(count)
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let (best, &best_failures) = failures
        .iter()
        .enumerate()
        .min_by_key(|&(idx, &f)| (f, idx))
        .expect("at least one fixing");
    let per = inner.len().max(1);
    let conditional_error = ratio(best_failures, per);
    let overall_error = exhaustive.then(|| {
        let total: u64 = failures.iter().sum();
        ratio(total, per * fixings.len() as u64)
    });
    let fix = fixings[best].clone();

    let (sub_inst, sim) = build_side(inst, code, bridge, end, &side, &kept, &foreign, &fix)?;
    let sub_exec = Executor::new(&sim, &sub_inst)?;
    let big_n = code.outer_blocklength();
    let mut sub_failures = 0u64;
    let mut mismatches = Vec::new();
    let mut traces_match = true;
    for own in inner.iter() {
        let full_trace = exec.run(&combine(&fix, &own))?;
        let sub_trace = sub_exec.run(&own)?;
        for (se, &fe) in sim.emap.iter().enumerate() {
            for t in 1..=big_n {
                for dir in [Direction::Forward, Direction::Backward] {
                    if sub_trace.symbol(se, t, dir) != full_trace.symbol(fe, t, dir) {
                        traces_match = false;
                        if mismatches.len() < 8 {
                            mismatches.push((se, t, format!("{dir:?}").to_lowercase()));
                        }
                    }
                }
            }
        }
        let out = sub_exec.outputs(&own)?;
        if !sub_exec.failures(&own, &out).is_empty() {
            sub_failures += 1;
        }
    }
    Ok(SideDecomposition {
        endpoint: inst.name(end).to_string(),
        instance: sub_inst.to_document(),
        sources: kept,
        terminals: sim.tmap.clone(),
        fixing: foreign.iter().copied().zip(fix).collect(),
        conditional_error,
        overall_error,
        fixings_examined: fixings.len() as u64,
        sampled: !exhaustive,
        sub_error: ratio(sub_failures, per),
        traces_match,
        mismatches,
        code: Some(Arc::new(sim)),
        sub_instance: Some(sub_inst),
    })
}

#[allow(clippy::too_many_arguments)]
fn build_side(
    inst: &NetworkInstance,
    code: &SharedCode,
    bridge: EdgeId,
    end: VertexId,
    side: &[bool],
    kept: &[usize],
    foreign: &[usize],
    fix: &[u64],
) -> Result<(NetworkInstance, SimulatedCode), AnalysisError> {
    let vmap: Vec<VertexId> = (0..inst.num_vertices()).filter(|&v| side[v]).collect();
    let mut vback = vec![usize::MAX; inst.num_vertices()];
    for (s, &v) in vmap.iter().enumerate() {
        vback[v] = s;
    }
    let emap: Vec<EdgeId> = (0..inst.edges().len())
        .filter(|&e| e != bridge && side[inst.edge(e).a] && side[inst.edge(e).b])
        .collect();
    let mut edge_back = vec![None; inst.edges().len()];
    for (s, &e) in emap.iter().enumerate() {
        edge_back[e] = Some(s);
    }
    let edges = emap
        .iter()
        .map(|&e| {
            let edge = inst.edge(e);
            crate::graph::Edge {
                a: vback[edge.a],
                b: vback[edge.b],
                capacity: edge.capacity.clone(),
            }
        })
        .collect();
    let tmap: Vec<usize> = (0..inst.terminals().len())
        .filter(|&j| side[inst.terminals()[j]])
        .collect();
    let mut source_back = vec![None; inst.sources().len()];
    for (s, &i) in kept.iter().enumerate() {
        source_back[i] = Some(s);
    }
    let demand: Vec<Vec<bool>> = kept
        .iter()
        .map(|&i| tmap.iter().map(|&j| inst.demand()[i][j]).collect())
        .collect();
    let sub = NetworkInstance::from_parts(
        vmap.iter().map(|&v| inst.name(v).to_string()).collect(),
        edges,
        kept.iter().map(|&i| vback[inst.sources()[i]]).collect(),
        tmap.iter().map(|&j| vback[inst.terminals()[j]]).collect(),
        demand,
    )?;
    let keep = tmap
        .iter()
        .map(|&j| {
            inst.demanded_by(j)
                .iter()
                .enumerate()
                .filter(|(_, i)| source_back[**i].is_some())
                .map(|(p, _)| p)
                .collect()
        })
        .collect();
    let mut fixed = vec![None; inst.sources().len()];
    for (&i, &x) in foreign.iter().zip(fix) {
        fixed[i] = Some(x);
    }
    let sim = SimulatedCode {
        full: code.clone(),
        full_inst: inst.clone(),
        vmap,
        emap,
        edge_back,
        sizes: kept.iter().map(|&i| code.message_sizes()[i]).collect(),
        source_back,
        tmap,
        fixed,
        keep,
        bridge,
        u: end,
        side: side.to_vec(),
    };
    Ok((sub, sim))
}
