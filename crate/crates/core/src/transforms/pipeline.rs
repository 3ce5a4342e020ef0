use super::TransformError;
use crate::code::{validate_code, Direction, Incoming, InfoState, NetworkCode, SharedCode, Split};
use crate::graph::{EdgeId, NetworkInstance, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PathEdge {
    /// An edge of the original instance.
    Kept(EdgeId),
    /// Hop `r` (1-based) of the replacement path, oriented towards `u'`.
    Hop(usize),
}

/// The edge `(u, u')` of an interleaved code replaced by a path of `ell` nodes
/// whose hops pipeline its symbols. Each sub-block of `B` timesteps is
/// stretched to `B + ell`; kept edges idle (symbol 0) in the extra steps.
#[derive(Debug, Clone)]
pub struct PipelinedCode {
    tilde: SharedCode,
    inst: NetworkInstance,
    block: usize,
    blocks: usize,
    ell: usize,
    e: EdgeId,
    u: VertexId,
    u2: VertexId,
    /// Direction along `e` (in the original orientation) from `u` to `u'`.
    towards_u2: Direction,
    edges: Vec<PathEdge>,
    hops: Vec<EdgeId>,
}

/// `[u, p1, ..., u']` with `ell - 2` fresh interior names.
pub fn fresh_path(inst: &NetworkInstance, u: &str, u2: &str, ell: usize) -> Vec<String> {
    let mut path = vec![u.to_string()];
    path.extend(inst.fresh_names("p", ell.saturating_sub(2)));
    path.push(u2.to_string());
    path
}

pub fn pipeline_path(
    tilde: SharedCode,
    inst: &NetworkInstance,
    u: &str,
    u2: &str,
    path_inst: &NetworkInstance,
    ell: usize,
) -> Result<PipelinedCode, TransformError> {
    validate_code(tilde.as_ref(), inst)?;
    if ell < 2 {
        return Err(TransformError::BadParameter("ell must be at least 2".into()));
    }
    let ua = inst.require_vertex(u)?;
    let ub = inst.require_vertex(u2)?;
    let e = inst
        .edge_between(ua, ub)
        .ok_or_else(|| crate::graph::InstanceError::EdgeMissing(u.into(), u2.into()))?;
    let block = tilde
        .sub_block()
        .ok_or_else(|| TransformError::NotInterleaved("code carries no sub-block tag".into()))?;
    let total = tilde.outer_blocklength();
    if block == 0 || !total.is_multiple_of(block) {
        return Err(TransformError::NotInterleaved(format!(
            "sub-block {block} does not divide N = {total}"
        )));
    }
    let blocks = total / block;
    for i in 0..blocks {
        let first = tilde.split(e, i * block + 1);
        if (2..=block).any(|j| tilde.split(e, i * block + j) != first) {
            return Err(TransformError::NotInterleaved(format!(
                "split of {} varies within sub-block {}",
                inst.edge_label(e),
                i + 1
            )));
        }
    }
    // the path instance must be exactly the fresh-path replacement of e
    let n = inst.num_vertices();
    if path_inst.num_vertices() < n || path_inst.vertices()[..n] != inst.vertices()[..] {
        return Err(TransformError::BadPathInstance(
            "vertices must extend the original instance".into(),
        ));
    }
    let mut path = vec![u.to_string()];
    path.extend(path_inst.vertices()[n..].iter().cloned());
    path.push(u2.to_string());
    if path.len() != ell {
        return Err(TransformError::BadPathInstance(format!(
            "path has {} nodes, expected {ell}",
            path.len()
        )));
    }
    let expected = inst.replace_edge_with_path(u, u2, &path, true)?;
    if expected != *path_inst {
        return Err(TransformError::BadPathInstance(
            "instance is not the fresh-path replacement of the edge".into(),
        ));
    }
    let m = inst.edges().len();
    let mut edges: Vec<PathEdge> = (0..m - 1)
        .map(|p| PathEdge::Kept(if p < e { p } else { p + 1 }))
        .collect();
    edges.extend((1..ell).map(PathEdge::Hop));
    let hops = (0..ell - 1).map(|r| m - 1 + r).collect();
    Ok(PipelinedCode {
        tilde,
        inst: inst.clone(),
        block,
        blocks,
        ell,
        e,
        u: ua,
        u2: ub,
        towards_u2: Direction::leaving(inst.edge(e).a, ua),
        edges,
        hops,
    })
}

impl PipelinedCode {
    fn stride(&self) -> usize {
        self.block + self.ell
    }

    /// `(block i, step j')` of timestep `tau`, both 1-based.
    fn position(&self, tau: usize) -> (usize, usize) {
        ((tau - 1) / self.stride() + 1, (tau - 1) % self.stride() + 1)
    }

    /// Timestep at which the symbol of interleaved timestep `s` is sent on a kept edge.
    fn kept_time(&self, s: usize) -> usize {
        let (i, j) = ((s - 1) / self.block + 1, (s - 1) % self.block + 1);
        (i - 1) * self.stride() + j
    }

    /// Timestep at which session `j` of block `i` crosses hop `r` towards `u'`.
    pub fn forward_time(&self, i: usize, j: usize, r: usize) -> usize {
        (i - 1) * self.stride() + j + r - 1
    }

    /// Timestep at which session `j` of block `i` crosses hop `r` towards `u`.
    pub fn backward_time(&self, i: usize, j: usize, r: usize) -> usize {
        (i - 1) * self.stride() + j + self.ell - r - 1
    }

    /// Edge ids of the path hops in the path instance, hop 1 first.
    pub fn hop_edges(&self) -> &[EdgeId] {
        &self.hops
    }

    /// Direction along the removed edge (original orientation) from `u` to `u'`.
    pub fn towards_u2(&self) -> Direction {
        self.towards_u2
    }

    pub fn removed_edge(&self) -> EdgeId {
        self.e
    }

    pub fn block(&self) -> usize {
        self.block
    }

    /// The interleaved code's state of original node `v` after interleaved
    /// timestep `s`, rebuilt from a state of the pipelined code.
    fn tilde_state(&self, v: VertexId, state: &InfoState, s: usize) -> InfoState {
        let m = self.inst.edges().len();
        let incoming = self
            .inst
            .incident(v)
            .into_iter()
            .map(|e2| {
                let dir = Direction::leaving(self.inst.edge(e2).a, v).flip();
                let symbols = if e2 == self.e {
                    let hop = if v == self.u {
                        self.hops[0]
                    } else {
                        self.hops[self.ell - 2]
                    };
                    (1..=s)
                        .map(|k| {
                            let at = self.kept_time(k) + self.ell - 2;
                            state.symbol(hop, at).unwrap_or(0)
                        })
                        .collect()
                } else {
                    let p = if e2 < self.e { e2 } else { e2 - 1 };
                    debug_assert!(p < m - 1);
                    (1..=s)
                        .map(|k| state.symbol(p, self.kept_time(k)).unwrap_or(0))
                        .collect()
                };
                Incoming {
                    edge: e2,
                    dir,
                    symbols,
                }
            })
            .collect();
        InfoState {
            node: v,
            time: s,
            own: state.own.clone(),
            incoming,
        }
    }
}

impl NetworkCode for PipelinedCode {
    fn inner_blocklength(&self) -> u64 {
        self.tilde.inner_blocklength()
    }

    fn outer_blocklength(&self) -> usize {
        self.blocks * self.stride()
    }

    fn message_sizes(&self) -> &[u64] {
        self.tilde.message_sizes()
    }

    fn num_edges(&self) -> usize {
        self.edges.len()
    }

    fn num_terminals(&self) -> usize {
        self.tilde.num_terminals()
    }

    fn split(&self, edge: EdgeId, tau: usize) -> Split {
        let (i, j) = self.position(tau);
        match self.edges[edge] {
            PathEdge::Kept(e2) if j <= self.block => self.tilde.split(e2, (i - 1) * self.block + j),
            PathEdge::Kept(_) => Split::IDLE,
            PathEdge::Hop(_) => {
                let s = self.tilde.split(self.e, (i - 1) * self.block + 1);
                s.oriented(self.towards_u2 == Direction::Backward)
            }
        }
    }

    fn encode(&self, edge: EdgeId, tau: usize, dir: Direction, state: &InfoState) -> u64 {
        let (i, jp) = self.position(tau);
        let in_block = |j: isize| (j >= 1 && j as usize <= self.block).then_some(j as usize);
        match self.edges[edge] {
            PathEdge::Kept(e2) => match in_block(jp as isize) {
                Some(j) => {
                    let s = (i - 1) * self.block + j;
                    self.tilde
                        .encode(e2, s, dir, &self.tilde_state(state.node, state, s - 1))
                }
                None => 0,
            },
            PathEdge::Hop(r) => {
                let (offset, end, tilde_dir, relay_from) = match dir {
                    Direction::Forward => (r - 1, r == 1, self.towards_u2, r.wrapping_sub(2)),
                    Direction::Backward => {
                        (self.ell - r - 1, r == self.ell - 1, self.towards_u2.flip(), r)
                    }
                };
                let Some(j) = in_block(jp as isize - offset as isize) else {
                    return 0;
                };
                if end {
                    let s = (i - 1) * self.block + j;
                    let sender = if dir == Direction::Forward { self.u } else { self.u2 };
                    self.tilde
                        .encode(self.e, s, tilde_dir, &self.tilde_state(sender, state, s - 1))
                } else {
                    state.symbol(self.hops[relay_from], tau - 1).unwrap_or(0)
                }
            }
        }
    }

    fn decode(&self, terminal: usize, state: &InfoState) -> Vec<u64> {
        let s = self.blocks * self.block;
        self.tilde
            .decode(terminal, &self.tilde_state(state.node, state, s))
    }

    fn kind(&self) -> String {
        format!("pipeline_path({}, ell={})", self.tilde.kind(), self.ell)
    }
}
