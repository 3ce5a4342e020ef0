//! Undirected network-coding instances and the graph procedures used by the
//! edge-removal analysis: validation, edge addition, capacity scaling,
//! path replacement, components, widest paths and cut bounds.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("malformed instance document: {0}")]
    MalformedDocument(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("edge ({a}, {b}) has non-positive capacity {cap}")]
    NonPositiveCapacity { a: String, b: String, cap: Rational },
    #[error("bad demand matrix: {0}")]
    BadDemandMatrix(String),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(String, String),
    #[error("self-loop on vertex {0:?}")]
    SelfLoop(String),
    #[error("edge ({0}, {1}) already exists")]
    EdgeExists(String, String),
    #[error("edge ({0}, {1}) does not exist")]
    EdgeMissing(String, String),
    #[error("scale factor {0} is not positive")]
    NonPositiveScale(Rational),
    #[error("bad path: {0}")]
    BadPath(String),
    #[error("interior path node {0:?} already exists")]
    InteriorNodeCollision(String),
    #[error("{0:?} and {1:?} are not connected")]
    NotConnected(String, String),
    #[error("bad vertex sets: {0}")]
    BadSets(String),
    #[error("instance has no edges")]
    NoEdges,
    #[error("bad rate vector: {0}")]
    BadRates(String),
}

impl InstanceError {
    /// Stable variant name used in machine-readable error lists.
    pub fn kind(&self) -> &'static str {
        match self {
            InstanceError::MalformedDocument(_) => "MalformedDocument",
            InstanceError::UnknownVertex(_) => "UnknownVertex",
            InstanceError::NonPositiveCapacity { .. } => "NonPositiveCapacity",
            InstanceError::BadDemandMatrix(_) => "BadDemandMatrix",
            InstanceError::DuplicateEdge(..) => "DuplicateEdge",
            InstanceError::SelfLoop(_) => "SelfLoop",
            InstanceError::EdgeExists(..) => "EdgeExists",
            InstanceError::EdgeMissing(..) => "EdgeMissing",
            InstanceError::NonPositiveScale(_) => "NonPositiveScale",
            InstanceError::BadPath(_) => "BadPath",
            InstanceError::InteriorNodeCollision(_) => "InteriorNodeCollision",
            InstanceError::NotConnected(..) => "NotConnected",
            InstanceError::BadSets(_) => "BadSets",
            InstanceError::NoEdges => "NoEdges",
            InstanceError::BadRates(_) => "BadRates",
        }
    }
}

/// JSON form of an edge: `{"a": "u", "b": "v", "cap": "3/2"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDocument {
    pub a: String,
    pub b: String,
    pub cap: String,
}

/// JSON form of an instance, before validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDocument>,
    pub sources: Vec<String>,
    pub terminals: Vec<String>,
    pub demand: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
    pub capacity: Rational,
}

impl Edge {
    pub fn other(&self, v: VertexId) -> VertexId {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }

    pub fn touches(&self, v: VertexId) -> bool {
        self.a == v || self.b == v
    }
}

/// An undirected instance: capacitated graph, sources, terminals and the
/// binary requirement matrix (row `i` = source `i`, column `j` = terminal `j`).
///
/// Immutable once built; every edit returns a new instance.
#[derive(Debug, Clone)]
pub struct NetworkInstance {
    vertices: Vec<String>,
    index: BTreeMap<String, VertexId>,
    edges: Vec<Edge>,
    sources: Vec<VertexId>,
    terminals: Vec<VertexId>,
    demand: Vec<Vec<bool>>,
}

impl PartialEq for NetworkInstance {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.edges == other.edges
            && self.sources == other.sources
            && self.terminals == other.terminals
            && self.demand == other.demand
    }
}

impl Eq for NetworkInstance {}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RemovalConstant {
    #[serde(rename = "W")]
    pub total: Rational,
    #[serde(rename = "w")]
    pub min: Rational,
    pub c: Rational,
}

/// Per-source rates in bits per channel use.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RateVector(Vec<Rational>);

impl RateVector {
    pub fn new(rates: Vec<Rational>, num_sources: usize) -> Result<Self, InstanceError> {
        if rates.len() != num_sources {
            return Err(InstanceError::BadRates(format!(
                "{} rates for {num_sources} sources",
                rates.len()
            )));
        }
        if let Some(r) = rates.iter().find(|r| r.is_negative()) {
            return Err(InstanceError::BadRates(format!("negative rate {r}")));
        }
        Ok(RateVector(rates))
    }

    pub fn rates(&self) -> &[Rational] {
        &self.0
    }

    /// Parses a comma-separated list such as `1,1/2`.
    pub fn parse(list: &str, num_sources: usize) -> Result<Self, InstanceError> {
        let rates = list
            .split(',')
            .map(|s| {
                s.parse::<Rational>()
                    .map_err(|e| InstanceError::BadRates(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        RateVector::new(rates, num_sources)
    }
}

/// Parses and validates a JSON instance document, returning the first problem found.
pub fn validate_instance(json: &str) -> Result<NetworkInstance, InstanceError> {
    let doc: InstanceDocument =
        serde_json::from_str(json).map_err(|e| InstanceError::MalformedDocument(e.to_string()))?;
    NetworkInstance::from_document(&doc)
}

/// Every problem in a JSON instance document (empty when valid).
pub fn validation_errors(json: &str) -> Vec<InstanceError> {
    match serde_json::from_str::<InstanceDocument>(json) {
        Ok(doc) => document_errors(&doc),
        Err(e) => vec![InstanceError::MalformedDocument(e.to_string())],
    }
}

fn document_errors(doc: &InstanceDocument) -> Vec<InstanceError> {
    let mut errors = Vec::new();
    let mut seen = BTreeSet::new();
    for v in &doc.vertices {
        if !seen.insert(v.as_str()) {
            errors.push(InstanceError::MalformedDocument(format!(
                "vertex {v:?} declared twice"
            )));
        }
    }
    let known = |v: &String, errors: &mut Vec<InstanceError>| {
        if !seen.contains(v.as_str()) {
            errors.push(InstanceError::UnknownVertex(v.clone()));
        }
    };
    let mut pairs = BTreeSet::new();
    for e in &doc.edges {
        known(&e.a, &mut errors);
        known(&e.b, &mut errors);
        match e.cap.parse::<Rational>() {
            Ok(cap) if !cap.is_positive() => errors.push(InstanceError::NonPositiveCapacity {
                a: e.a.clone(),
                b: e.b.clone(),
                cap,
            }),
            Ok(_) => {}
            Err(err) => errors.push(InstanceError::MalformedDocument(err.to_string())),
        }
        if e.a == e.b {
            errors.push(InstanceError::SelfLoop(e.a.clone()));
        } else {
            let key = if e.a < e.b {
                (e.a.as_str(), e.b.as_str())
            } else {
                (e.b.as_str(), e.a.as_str())
            };
            if !pairs.insert(key) {
                errors.push(InstanceError::DuplicateEdge(e.a.clone(), e.b.clone()));
            }
        }
    }
    for v in doc.sources.iter().chain(doc.terminals.iter()) {
        known(v, &mut errors);
    }
    let (k, r) = (doc.sources.len(), doc.terminals.len());
    if doc.demand.len() != k {
        errors.push(InstanceError::BadDemandMatrix(format!(
            "expected {k} rows, found {}",
            doc.demand.len()
        )));
    }
    let mut any_one = false;
    for (i, row) in doc.demand.iter().enumerate() {
        if row.len() != r {
            errors.push(InstanceError::BadDemandMatrix(format!(
                "row {i} has {} entries, expected {r}",
                row.len()
            )));
        }
        for &m in row {
            match m {
                0 => {}
                1 => any_one = true,
                other => errors.push(InstanceError::BadDemandMatrix(format!(
                    "entry {other} in row {i} is not 0 or 1"
                ))),
            }
        }
    }
    if !any_one {
        errors.push(InstanceError::BadDemandMatrix(
            "no terminal demands any source".into(),
        ));
    }
    errors
}

impl NetworkInstance {
    pub fn from_document(doc: &InstanceDocument) -> Result<Self, InstanceError> {
        if let Some(e) = document_errors(doc).into_iter().next() {
            return Err(e);
        }
        let index: BTreeMap<String, VertexId> = doc
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let edges = doc
            .edges
            .iter()
            .map(|e| Edge {
                a: index[&e.a],
                b: index[&e.b],
                capacity: e.cap.parse().expect("checked"),
            })
            .collect();
        Ok(NetworkInstance {
            vertices: doc.vertices.clone(),
            edges,
            sources: doc.sources.iter().map(|v| index[v]).collect(),
            terminals: doc.terminals.iter().map(|v| index[v]).collect(),
            demand: doc
                .demand
                .iter()
                .map(|row| row.iter().map(|&m| m == 1).collect())
                .collect(),
            index,
        })
    }

    /// Builds an instance from already-resolved parts. Graph invariants are
    /// checked; an all-zero (or empty) demand matrix is allowed so that
    /// sub-instances with no remaining demands can be represented.
    pub fn from_parts(
        vertices: Vec<String>,
        edges: Vec<Edge>,
        sources: Vec<VertexId>,
        terminals: Vec<VertexId>,
        demand: Vec<Vec<bool>>,
    ) -> Result<Self, InstanceError> {
        let mut index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(InstanceError::MalformedDocument(format!(
                    "vertex {v:?} declared twice"
                )));
            }
        }
        let n = vertices.len();
        let name = |v: VertexId| vertices.get(v).cloned().unwrap_or_else(|| format!("#{v}"));
        let mut pairs = BTreeSet::new();
        for e in &edges {
            if e.a >= n {
                return Err(InstanceError::UnknownVertex(name(e.a)));
            }
            if e.b >= n {
                return Err(InstanceError::UnknownVertex(name(e.b)));
            }
            if e.a == e.b {
                return Err(InstanceError::SelfLoop(name(e.a)));
            }
            if !e.capacity.is_positive() {
                return Err(InstanceError::NonPositiveCapacity {
                    a: name(e.a),
                    b: name(e.b),
                    cap: e.capacity.clone(),
                });
            }
            if !pairs.insert((e.a.min(e.b), e.a.max(e.b))) {
                return Err(InstanceError::DuplicateEdge(name(e.a), name(e.b)));
            }
        }
        if let Some(&v) = sources.iter().chain(terminals.iter()).find(|&&v| v >= n) {
            return Err(InstanceError::UnknownVertex(name(v)));
        }
        if demand.len() != sources.len() || demand.iter().any(|r| r.len() != terminals.len()) {
            return Err(InstanceError::BadDemandMatrix("shape mismatch".into()));
        }
        Ok(NetworkInstance {
            vertices,
            index,
            edges,
            sources,
            terminals,
            demand,
        })
    }

    pub fn to_document(&self) -> InstanceDocument {
        InstanceDocument {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDocument {
                    a: self.vertices[e.a].clone(),
                    b: self.vertices[e.b].clone(),
                    cap: e.capacity.to_string(),
                })
                .collect(),
            sources: self.sources.iter().map(|&v| self.vertices[v].clone()).collect(),
            terminals: self
                .terminals
                .iter()
                .map(|&v| self.vertices[v].clone())
                .collect(),
            demand: self
                .demand
                .iter()
                .map(|row| row.iter().map(|&m| m as i64).collect())
                .collect(),
        }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn sources(&self) -> &[VertexId] {
        &self.sources
    }

    pub fn terminals(&self) -> &[VertexId] {
        &self.terminals
    }

    pub fn demand(&self) -> &[Vec<bool>] {
        &self.demand
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.vertices[v]
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.index.get(name).copied()
    }

    pub fn require_vertex(&self, name: &str) -> Result<VertexId, InstanceError> {
        self.vertex(name)
            .ok_or_else(|| InstanceError::UnknownVertex(name.to_string()))
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.edges
            .iter()
            .position(|e| (e.a == u && e.b == v) || (e.a == v && e.b == u))
    }

    /// Edges incident to `v`, in ascending edge order.
    pub fn incident(&self, v: VertexId) -> Vec<EdgeId> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].touches(v))
            .collect()
    }

    /// Source indices whose message originates at `v`.
    pub fn sources_at(&self, v: VertexId) -> Vec<usize> {
        (0..self.sources.len())
            .filter(|&i| self.sources[i] == v)
            .collect()
    }

    /// Source indices demanded by terminal `j`, ascending.
    pub fn demanded_by(&self, j: usize) -> Vec<usize> {
        (0..self.sources.len())
            .filter(|&i| self.demand[i][j])
            .collect()
    }

    pub fn edge_label(&self, e: EdgeId) -> String {
        let edge = &self.edges[e];
        format!("({}, {})", self.vertices[edge.a], self.vertices[edge.b])
    }

    /// The instance with one extra edge `(u, u2)` of capacity `lambda`, appended last.
    pub fn add_edge(&self, u: &str, u2: &str, lambda: &Rational) -> Result<Self, InstanceError> {
        let a = self.require_vertex(u)?;
        let b = self.require_vertex(u2)?;
        if a == b {
            return Err(InstanceError::SelfLoop(u.to_string()));
        }
        if self.edge_between(a, b).is_some() {
            return Err(InstanceError::EdgeExists(u.to_string(), u2.to_string()));
        }
        if !lambda.is_positive() {
            return Err(InstanceError::NonPositiveCapacity {
                a: u.to_string(),
                b: u2.to_string(),
                cap: lambda.clone(),
            });
        }
        let mut out = self.clone();
        out.edges.push(Edge {
            a,
            b,
            capacity: lambda.clone(),
        });
        Ok(out)
    }

    /// The instance without edge `(u, u2)`; later edges move down by one.
    pub fn without_edge(&self, u: &str, u2: &str) -> Result<Self, InstanceError> {
        let e = self
            .edge_between(self.require_vertex(u)?, self.require_vertex(u2)?)
            .ok_or_else(|| InstanceError::EdgeMissing(u.to_string(), u2.to_string()))?;
        let mut out = self.clone();
        out.edges.remove(e);
        Ok(out)
    }

    /// Every capacity multiplied by `alpha`.
    pub fn scale(&self, alpha: &Rational) -> Result<Self, InstanceError> {
        if !alpha.is_positive() {
            return Err(InstanceError::NonPositiveScale(alpha.clone()));
        }
        let mut out = self.clone();
        for e in &mut out.edges {
            e.capacity = &e.capacity * alpha;
        }
        Ok(out)
    }

    /// Removes edge `(u, u2)` of capacity `lambda` and routes a path of capacity
    /// `lambda` from `u` to `u2` through `path` in its place.
    ///
    /// With `fresh`, interior nodes must be new identifiers and each hop becomes a
    /// new edge (appended in path order, oriented along the path). Otherwise the
    /// interior nodes must exist, each hop must be an existing edge, and each hop's
    /// capacity grows by `lambda`.
    pub fn replace_edge_with_path(
        &self,
        u: &str,
        u2: &str,
        path: &[String],
        fresh: bool,
    ) -> Result<Self, InstanceError> {
        let a = self.require_vertex(u)?;
        let b = self.require_vertex(u2)?;
        let e = self
            .edge_between(a, b)
            .ok_or_else(|| InstanceError::EdgeMissing(u.to_string(), u2.to_string()))?;
        let lambda = self.edges[e].capacity.clone();
        if path.len() < 2 {
            return Err(InstanceError::BadPath("path needs at least two nodes".into()));
        }
        if path[0] != u {
            return Err(InstanceError::BadPath(format!("path must start at {u:?}")));
        }
        if path[path.len() - 1] != u2 {
            return Err(InstanceError::BadPath(format!("path must end at {u2:?}")));
        }
        let distinct: BTreeSet<&String> = path.iter().collect();
        if distinct.len() != path.len() {
            return Err(InstanceError::BadPath("path repeats a node".into()));
        }
        let interior = &path[1..path.len() - 1];
        let mut out = self.clone();
        out.edges.remove(e);
        if fresh {
            for v in interior {
                if self.index.contains_key(v) {
                    return Err(InstanceError::InteriorNodeCollision(v.clone()));
                }
                out.index.insert(v.clone(), out.vertices.len());
                out.vertices.push(v.clone());
            }
            for hop in path.windows(2) {
                out.edges.push(Edge {
                    a: out.index[&hop[0]],
                    b: out.index[&hop[1]],
                    capacity: lambda.clone(),
                });
            }
        } else {
            if interior.is_empty() {
                return Err(InstanceError::BadPath(
                    "an existing-node path needs at least one interior node".into(),
                ));
            }
            for v in interior {
                self.require_vertex(v)?;
            }
            for hop in path.windows(2) {
                let (x, y) = (out.index[&hop[0]], out.index[&hop[1]]);
                let h = out.edge_between(x, y).ok_or_else(|| {
                    InstanceError::BadPath(format!("no edge ({}, {})", hop[0], hop[1]))
                })?;
                out.edges[h].capacity = &out.edges[h].capacity + &lambda;
            }
        }
        Ok(out)
    }

    /// Fresh vertex identifiers `prefix1, prefix2, ...` that do not collide with
    /// existing vertices.
    pub fn fresh_names(&self, prefix: &str, count: usize) -> Vec<String> {
        let mut out = Vec::with_capacity(count);
        let mut k = 1;
        while out.len() < count {
            let candidate = format!("{prefix}{k}");
            if !self.index.contains_key(&candidate) {
                out.push(candidate);
            }
            k += 1;
        }
        out
    }

    /// Maximal connected components, each sorted by vertex order, listed by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<VertexId>> {
        let n = self.vertices.len();
        let adj = self.adjacency(|_| true);
        let mut comp = vec![usize::MAX; n];
        let mut out: Vec<Vec<VertexId>> = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &(w, _) in &adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        queue.push_back(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    fn adjacency(&self, keep: impl Fn(&Edge) -> bool) -> Vec<Vec<(VertexId, EdgeId)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            if keep(e) {
                adj[e.a].push((e.b, i));
                adj[e.b].push((e.a, i));
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// A `u`–`u2` path maximizing the minimum edge capacity. Ties go to the
    /// fewest hops, then to the lexicographically smallest sequence of vertex
    /// indices (declaration order).
    pub fn widest_path(
        &self,
        u: VertexId,
        u2: VertexId,
    ) -> Result<(Vec<VertexId>, Rational), InstanceError> {
        let not_connected =
            || InstanceError::NotConnected(self.vertices[u].clone(), self.vertices[u2].clone());
        if u == u2 {
            return Err(InstanceError::BadPath("endpoints coincide".into()));
        }
        // Kruskal in decreasing capacity: the bottleneck is the capacity of the
        // edge whose insertion first joins u and u2.
        let mut order: Vec<EdgeId> = (0..self.edges.len()).collect();
        order.sort_by(|&x, &y| self.edges[y].capacity.cmp(&self.edges[x].capacity));
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut gamma = None;
        for &e in &order {
            let (ra, rb) = (find(&mut parent, self.edges[e].a), find(&mut parent, self.edges[e].b));
            if ra != rb {
                parent[ra] = rb;
            }
            if find(&mut parent, u) == find(&mut parent, u2) {
                gamma = Some(self.edges[e].capacity.clone());
                break;
            }
        }
        let gamma = gamma.ok_or_else(not_connected)?;
        let adj = self.adjacency(|e| e.capacity >= gamma);
        // hop distances to u2, then greedy smallest-next walk from u
        let mut dist = vec![usize::MAX; self.vertices.len()];
        dist[u2] = 0;
        let mut queue = VecDeque::from([u2]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        let mut path = vec![u];
        let mut cur = u;
        while cur != u2 {
            cur = adj[cur]
                .iter()
                .map(|&(w, _)| w)
                .filter(|&w| dist[w] != usize::MAX && dist[w] + 1 == dist[cur])
                .min()
                .expect("distance labels are consistent");
            path.push(cur);
        }
        Ok((path, gamma))
    }

    /// Minimum capacity of a cut separating `set_a` from `set_b`, as an undirected
    /// max-flow with a super-source over `set_a` and a super-sink over `set_b`.
    pub fn cut_bound(&self, set_a: &[VertexId], set_b: &[VertexId]) -> Result<Rational, InstanceError> {
        let n = self.vertices.len();
        if set_a.is_empty() || set_b.is_empty() {
            return Err(InstanceError::BadSets("sets must be nonempty".into()));
        }
        if set_a.iter().chain(set_b).any(|&v| v >= n) {
            return Err(InstanceError::BadSets("vertex out of range".into()));
        }
        let a: BTreeSet<_> = set_a.iter().copied().collect();
        if set_b.iter().any(|v| a.contains(v)) {
            return Err(InstanceError::BadSets("sets must be disjoint".into()));
        }
        let big: Rational = self.edges.iter().map(|e| &e.capacity).sum::<Rational>() + Rational::one();
        let mut flow = FlowNetwork::new(n + 2);
        for e in &self.edges {
            flow.add_undirected(e.a, e.b, e.capacity.clone());
        }
        let (s, t) = (n, n + 1);
        for &v in &a {
            flow.add_arc(s, v, big.clone());
        }
        for &v in set_b.iter().collect::<BTreeSet<_>>() {
            flow.add_arc(v, t, big.clone());
        }
        Ok(flow.max_flow(s, t))
    }

    /// `W` (total capacity), `w` (minimum capacity) and `c = 2W/w`.
    pub fn removal_constant(&self) -> Result<RemovalConstant, InstanceError> {
        let min = self
            .edges
            .iter()
            .map(|e| e.capacity.clone())
            .min()
            .ok_or(InstanceError::NoEdges)?;
        let total: Rational = self.edges.iter().map(|e| &e.capacity).sum();
        let c = Rational::from_integer(2) * &total / &min;
        Ok(RemovalConstant { total, min, c })
    }
}

/// Residual network with exact rational capacities (Edmonds–Karp).
struct FlowNetwork {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<Rational>,
}

impl FlowNetwork {
    fn new(n: usize) -> Self {
        FlowNetwork {
            head: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn push_pair(&mut self, u: usize, v: usize, fwd: Rational, bwd: Rational) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(fwd);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(bwd);
    }

    fn add_arc(&mut self, u: usize, v: usize, c: Rational) {
        self.push_pair(u, v, c, Rational::zero());
    }

    // one residual pair with capacity c each way models the undirected edge
    fn add_undirected(&mut self, u: usize, v: usize, c: Rational) {
        self.push_pair(u, v, c.clone(), c);
    }

    fn max_flow(&mut self, s: usize, t: usize) -> Rational {
        let mut total = Rational::zero();
        loop {
            let mut prev: Vec<Option<usize>> = vec![None; self.head.len()];
            let mut seen = vec![false; self.head.len()];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                if v == t {
                    break;
                }
                for &arc in &self.head[v] {
                    let w = self.to[arc];
                    if !seen[w] && self.cap[arc].is_positive() {
                        seen[w] = true;
                        prev[w] = Some(arc);
                        queue.push_back(w);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut bottleneck: Option<Rational> = None;
            let mut v = t;
            while let Some(arc) = prev[v] {
                bottleneck = Some(match bottleneck {
                    Some(b) => b.min(self.cap[arc].clone()),
                    None => self.cap[arc].clone(),
                });
                v = self.to[arc ^ 1];
            }
            let b = bottleneck.expect("path has at least one arc");
            let mut v = t;
            while let Some(arc) = prev[v] {
                self.cap[arc] = &self.cap[arc] - &b;
                self.cap[arc ^ 1] = &self.cap[arc ^ 1] + &b;
                v = self.to[arc ^ 1];
            }
            total = total + b;
        }
    }
}
