use std::collections::BTreeMap;

use super::TransformError;
use crate::code::{
    compose, decompose, validate_code, Direction, Incoming, InfoState, NetworkCode, SharedCode,
    Split,
};
use crate::graph::{EdgeId, NetworkInstance, VertexId};

/// A code moved from a "star" instance onto a target instance by merging
/// nodes: every star node maps to a target node, and every star edge to the
/// target edge between the images of its endpoints. The star edges sharing a
/// target edge share its symbols in mixed radix, so the target edge needs the
/// sum of their capacities.
#[derive(Debug, Clone)]
pub struct RehostedCode {
    base: SharedCode,
    star: NetworkInstance,
    node_map: Vec<VertexId>,
    /// Per target edge: `(star edge, flipped)` in ascending star-edge order.
    bundles: Vec<Vec<(EdgeId, bool)>>,
    /// Per star edge: `(target edge, position in bundle)`.
    placement: Vec<(EdgeId, usize)>,
    /// Per target node: the star nodes mapped onto it.
    preimage: Vec<Vec<VertexId>>,
}

/// Re-hosts `code` (valid on `star`) onto `target` along `node_map`, given by
/// vertex name; unmapped star vertices map to the target vertex of the same name.
pub fn rehost(
    code: SharedCode,
    star: &NetworkInstance,
    target: &NetworkInstance,
    node_map: &BTreeMap<String, String>,
) -> Result<RehostedCode, TransformError> {
    validate_code(code.as_ref(), star)?;
    let bad = |msg: String| TransformError::BadParameter(format!("rehost: {msg}"));
    let map = (0..star.num_vertices())
        .map(|v| {
            let name = star.name(v);
            let image = node_map.get(name).map(String::as_str).unwrap_or(name);
            target
                .vertex(image)
                .ok_or_else(|| bad(format!("{name:?} maps to unknown vertex {image:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let same_roles = star.sources().iter().map(|&s| map[s]).eq(target.sources().iter().copied())
        && star.terminals().iter().map(|&d| map[d]).eq(target.terminals().iter().copied())
        && star.demand() == target.demand();
    if !same_roles {
        return Err(bad("sources, terminals and demands must correspond".into()));
    }
    let mut bundles = vec![Vec::new(); target.edges().len()];
    let mut placement = Vec::with_capacity(star.edges().len());
    for (e, edge) in star.edges().iter().enumerate() {
        let (x, y) = (map[edge.a], map[edge.b]);
        let te = target.edge_between(x, y).ok_or_else(|| {
            bad(format!(
                "star edge {} has no target edge",
                star.edge_label(e)
            ))
        })?;
        let flipped = target.edge(te).a != x;
        placement.push((te, bundles[te].len()));
        bundles[te].push((e, flipped));
    }
    let mut preimage = vec![Vec::new(); target.num_vertices()];
    for (v, &x) in map.iter().enumerate() {
        preimage[x].push(v);
    }
    Ok(RehostedCode {
        base: code,
        star: star.clone(),
        node_map: map,
        bundles,
        placement,
        preimage,
    })
}

/// Moves a code from the fresh-path instance onto the instance whose existing
/// path `path` absorbed the fresh path `fresh` (same endpoints, same length).
pub fn rehost_path(
    code: SharedCode,
    star: &NetworkInstance,
    fresh: &[String],
    target: &NetworkInstance,
    path: &[String],
) -> Result<RehostedCode, TransformError> {
    if fresh.len() != path.len()
        || fresh.first() != path.first()
        || fresh.last() != path.last()
    {
        return Err(TransformError::BadParameter(
            "fresh and existing paths must share endpoints and length".into(),
        ));
    }
    let map = fresh
        .iter()
        .zip(path)
        .map(|(a, b)| (a.clone(), b.clone()))
        .collect();
    rehost(code, star, target, &map)
}

impl RehostedCode {
    fn bundle_radices(&self, te: EdgeId, t: usize, dir: Direction) -> Vec<u64> {
        self.bundles[te]
            .iter()
            .map(|&(e, flipped)| self.base.split(e, t).oriented(flipped).size(dir))
            .collect()
    }

    /// The star state of `v` rebuilt from the target state of its image.
    fn star_state(&self, v: VertexId, state: &InfoState) -> InfoState {
        let own = self
            .star
            .sources_at(v)
            .into_iter()
            .map(|i| (i, state.message(i).unwrap_or(0)))
            .collect();
        let incoming = self
            .star
            .incident(v)
            .into_iter()
            .map(|e| {
                let (te, k) = self.placement[e];
                let flipped = self.bundles[te][k].1;
                let dir = Direction::leaving(self.star.edge(e).a, v).flip();
                let target_dir = if flipped { dir.flip() } else { dir };
                let symbols = (1..=state.time)
                    .map(|t| {
                        let s = state.symbol(te, t).unwrap_or(0);
                        decompose(s, &self.bundle_radices(te, t, target_dir))[k]
                    })
                    .collect();
                Incoming {
                    edge: e,
                    dir,
                    symbols,
                }
            })
            .collect();
        InfoState {
            node: v,
            time: state.time,
            own,
            incoming,
        }
    }
}

impl NetworkCode for RehostedCode {
    fn inner_blocklength(&self) -> u64 {
        self.base.inner_blocklength()
    }

    fn outer_blocklength(&self) -> usize {
        self.base.outer_blocklength()
    }

    fn message_sizes(&self) -> &[u64] {
        self.base.message_sizes()
    }

    fn num_edges(&self) -> usize {
        self.bundles.len()
    }

    fn num_terminals(&self) -> usize {
        self.base.num_terminals()
    }

    fn split(&self, edge: EdgeId, t: usize) -> Split {
        let f = self.bundle_radices(edge, t, Direction::Forward);
        let b = self.bundle_radices(edge, t, Direction::Backward);
        Split::new(
            f.iter().copied().fold(1u64, u64::saturating_mul),
            b.iter().copied().fold(1u64, u64::saturating_mul),
        )
    }

    fn encode(&self, edge: EdgeId, t: usize, dir: Direction, state: &InfoState) -> u64 {
        let digits: Vec<u64> = self.bundles[edge]
            .iter()
            .map(|&(e, flipped)| {
                let star_dir = if flipped { dir.flip() } else { dir };
                let star_edge = self.star.edge(e);
                let sender = match star_dir {
                    Direction::Forward => star_edge.a,
                    Direction::Backward => star_edge.b,
                };
                debug_assert_eq!(self.node_map[sender], state.node);
                self.base
                    .encode(e, t, star_dir, &self.star_state(sender, state))
            })
            .collect();
        compose(&digits, &self.bundle_radices(edge, t, dir))
    }

    fn decode(&self, terminal: usize, state: &InfoState) -> Vec<u64> {
        let d = self.star.terminals()[terminal];
        debug_assert!(self.preimage[state.node].contains(&d));
        self.base.decode(terminal, &self.star_state(d, state))
    }

    fn sub_block(&self) -> Option<usize> {
        self.base.sub_block()
    }

    fn kind(&self) -> String {
        format!("rehost({})", self.base.kind())
    }
}
