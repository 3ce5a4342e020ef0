//! Shared fixtures and brute-force oracles for the integration tests.
#![allow(dead_code)]

pub mod criteria;

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::PathBuf;
use std::sync::Arc;

use edgerem::code::{
    Direction, InfoState, NetworkCode, SharedCode, Split,
};
use edgerem::graph::{EdgeDocument, EdgeId, InstanceDocument, NetworkInstance, VertexId};
use edgerem::rational::{alphabet_size, saturating_u128, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

pub fn inst(
    vertices: &[&str],
    edges: &[(&str, &str, &str)],
    sources: &[&str],
    terminals: &[&str],
    demand: &[&[i64]],
) -> NetworkInstance {
    let doc = InstanceDocument {
        vertices: vertices.iter().map(|s| s.to_string()).collect(),
        edges: edges
            .iter()
            .map(|(a, b, c)| EdgeDocument {
                a: a.to_string(),
                b: b.to_string(),
                cap: c.to_string(),
            })
            .collect(),
        sources: sources.iter().map(|s| s.to_string()).collect(),
        terminals: terminals.iter().map(|s| s.to_string()).collect(),
        demand: demand.iter().map(|r| r.to_vec()).collect(),
    };
    NetworkInstance::from_document(&doc).unwrap()
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

/// Every corpus instance, sorted by file name.
pub fn corpus() -> Vec<(String, NetworkInstance)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, edgerem::graph::validate_instance(&text).unwrap())
        })
        .collect()
}

/// Small instances for transform laws.
pub fn micro_instances() -> Vec<(&'static str, NetworkInstance)> {
    vec![
        ("single_edge", inst(&["a", "b"], &[("a", "b", "1")], &["a"], &["b"], &[&[1]])),
        (
            "two_hop_line",
            inst(&["a", "b", "c"], &[("a", "b", "1"), ("b", "c", "1")], &["a"], &["c"], &[&[1]]),
        ),
        ("relay_with_chord", relay_with_chord()),
        (
            "opposite_unicasts",
            inst(&["a", "b"], &[("a", "b", "3/2")], &["a", "b"], &["b", "a"], &[&[1, 0], &[0, 1]]),
        ),
        (
            "triangle_multicast",
            inst(
                &["a", "b", "c"],
                &[("a", "b", "1"), ("b", "c", "1/2"), ("c", "a", "1")],
                &["a"],
                &["b", "c"],
                &[&[1, 1]],
            ),
        ),
        (
            "path_two_sources",
            inst(
                &["a", "b", "c", "d"],
                &[("a", "b", "1"), ("b", "c", "1"), ("c", "d", "1")],
                &["a", "d"],
                &["c", "b"],
                &[&[1, 0], &[0, 1]],
            ),
        ),
    ]
}

pub fn relay_with_chord() -> NetworkInstance {
    inst(
        &["a", "r", "b"],
        &[("a", "r", "1"), ("r", "b", "1"), ("a", "b", "1")],
        &["a", "r"],
        &["b", "a"],
        &[&[1, 0], &[0, 1]],
    )
}

pub fn four_cycle() -> NetworkInstance {
    inst(
        &["a", "b", "c", "d"],
        &[("a", "b", "1"), ("b", "c", "1"), ("c", "d", "1"), ("d", "a", "1")],
        &["a", "b"],
        &["c", "d"],
        &[&[1, 0], &[0, 1]],
    )
}

pub fn two_triangles() -> NetworkInstance {
    inst(
        &["a", "b", "c", "x", "y", "z"],
        &[
            ("a", "b", "1"),
            ("b", "c", "1"),
            ("c", "a", "1"),
            ("x", "y", "1"),
            ("y", "z", "1"),
            ("z", "x", "1"),
        ],
        &["a", "y"],
        &["b", "z"],
        &[&[1, 1], &[0, 1]],
    )
}

fn hash_of(parts: impl Hash) -> u64 {
    let mut h = DefaultHasher::new();
    parts.hash(&mut h);
    h.finish()
}

/// A code whose encoders and decoders are fixed pseudo-random functions of the
/// full info state, with random maximal splits. Useful to exercise transforms
/// on arbitrary (mostly wrong) codes.
#[derive(Debug, Clone)]
pub struct HashCode {
    n: u64,
    big_n: usize,
    sizes: Vec<u64>,
    splits: Vec<Vec<Split>>,
    demands: Vec<Vec<usize>>,
    seed: u64,
    /// Encoders read only own messages: keeps sub-block causality trivial.
    pub memoryless: bool,
}

impl HashCode {
    pub fn new(inst: &NetworkInstance, n: u64, big_n: usize, sizes: &[u64], seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let splits = inst
            .edges()
            .iter()
            .map(|e| {
                let a = saturating_u128(&alphabet_size(&e.capacity, n)).min(16) as u64;
                (0..big_n)
                    .map(|_| {
                        let f = rng.gen_range(1..=a);
                        Split::new(f, a / f)
                    })
                    .collect()
            })
            .collect();
        HashCode {
            n,
            big_n,
            sizes: sizes.to_vec(),
            splits,
            demands: (0..inst.terminals().len()).map(|j| inst.demanded_by(j)).collect(),
            seed,
            memoryless: false,
        }
    }
}

impl NetworkCode for HashCode {
    fn inner_blocklength(&self) -> u64 {
        self.n
    }
    fn outer_blocklength(&self) -> usize {
        self.big_n
    }
    fn message_sizes(&self) -> &[u64] {
        &self.sizes
    }
    fn num_edges(&self) -> usize {
        self.splits.len()
    }
    fn num_terminals(&self) -> usize {
        self.demands.len()
    }
    fn split(&self, edge: EdgeId, t: usize) -> Split {
        self.splits[edge][t - 1]
    }
    fn encode(&self, edge: EdgeId, t: usize, dir: Direction, state: &InfoState) -> u64 {
        let size = self.split(edge, t).size(dir);
        let h = if self.memoryless {
            hash_of((self.seed, edge, t, dir as u8, &state.own))
        } else {
            hash_of((self.seed, edge, t, dir as u8, state))
        };
        h % size
    }
    fn decode(&self, terminal: usize, state: &InfoState) -> Vec<u64> {
        self.demands[terminal]
            .iter()
            .map(|&i| {
                state
                    .message(i)
                    .unwrap_or_else(|| hash_of((self.seed, terminal, i, state)) % self.sizes[i])
            })
            .collect()
    }
    fn kind(&self) -> String {
        "hash".into()
    }
}

/// Wraps a code and corrupts terminal `terminal`'s output whenever the base
/// decoder returns `trigger`.
#[derive(Debug, Clone)]
pub struct Faulty {
    pub base: SharedCode,
    pub terminal: usize,
    pub trigger: Vec<u64>,
    pub sizes_of_demanded: Vec<u64>,
}

impl NetworkCode for Faulty {
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
        self.base.num_edges()
    }
    fn num_terminals(&self) -> usize {
        self.base.num_terminals()
    }
    fn split(&self, edge: EdgeId, t: usize) -> Split {
        self.base.split(edge, t)
    }
    fn encode(&self, edge: EdgeId, t: usize, dir: Direction, state: &InfoState) -> u64 {
        self.base.encode(edge, t, dir, state)
    }
    fn decode(&self, terminal: usize, state: &InfoState) -> Vec<u64> {
        let mut out = self.base.decode(terminal, state);
        if terminal == self.terminal && out == self.trigger {
            out[0] = (out[0] + 1) % self.sizes_of_demanded[0];
        }
        out
    }
    fn kind(&self) -> String {
        format!("faulty({})", self.base.kind())
    }
}

pub fn shared(code: impl NetworkCode + 'static) -> SharedCode {
    Arc::new(code)
}

/// Random instance with `2..=max_v` vertices, capacities from a small set of
/// rationals, one source and one terminal on distinct vertices.
pub fn random_instance(seed: u64, max_v: usize) -> NetworkInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let caps = ["1/3", "1/2", "1", "3/2", "2", "5/2", "3"];
    let nv = rng.gen_range(2..=max_v);
    let names: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for a in 0..nv {
        for b in a + 1..nv {
            if rng.gen_bool(0.45) {
                edges.push((a, b));
            }
        }
    }
    if edges.is_empty() {
        edges.push((0, 1));
    }
    let s = rng.gen_range(0..nv);
    let mut t = rng.gen_range(0..nv);
    if t == s {
        t = (s + 1) % nv;
    }
    let doc = InstanceDocument {
        vertices: names.clone(),
        edges: edges
            .iter()
            .map(|&(a, b)| EdgeDocument {
                a: names[a].clone(),
                b: names[b].clone(),
                cap: caps[rng.gen_range(0..caps.len())].to_string(),
            })
            .collect(),
        sources: vec![names[s].clone()],
        terminals: vec![names[t].clone()],
        demand: vec![vec![1]],
    };
    NetworkInstance::from_document(&doc).unwrap()
}

/// Minimum over all vertex bipartitions `(S, V \ S)` with `A ⊆ S`, `B ∩ S = ∅`
/// of the total capacity crossing.
pub fn brute_cut(inst: &NetworkInstance, a: &[VertexId], b: &[VertexId]) -> Rational {
    let n = inst.num_vertices();
    let free: Vec<VertexId> = (0..n).filter(|v| !a.contains(v) && !b.contains(v)).collect();
    let mut best: Option<Rational> = None;
    for mask in 0u64..(1u64 << free.len()) {
        let mut in_s = vec![false; n];
        for &v in a {
            in_s[v] = true;
        }
        for (k, &v) in free.iter().enumerate() {
            if mask >> k & 1 == 1 {
                in_s[v] = true;
            }
        }
        let cut: Rational = inst
            .edges()
            .iter()
            .filter(|e| in_s[e.a] != in_s[e.b])
            .map(|e| e.capacity.clone())
            .sum();
        if best.as_ref().is_none_or(|b| cut < *b) {
            best = Some(cut);
        }
    }
    best.unwrap()
}

/// All simple `u`–`v` paths as vertex lists.
pub fn simple_paths(inst: &NetworkInstance, u: VertexId, v: VertexId) -> Vec<Vec<VertexId>> {
    fn dfs(inst: &NetworkInstance, cur: VertexId, goal: VertexId, path: &mut Vec<VertexId>, out: &mut Vec<Vec<VertexId>>) {
        if cur == goal {
            out.push(path.clone());
            return;
        }
        for e in inst.incident(cur) {
            let next = inst.edge(e).other(cur);
            if !path.contains(&next) {
                path.push(next);
                dfs(inst, next, goal, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    dfs(inst, u, v, &mut vec![u], &mut out);
    out
}

pub fn bottleneck(inst: &NetworkInstance, path: &[VertexId]) -> Rational {
    path.windows(2)
        .map(|h| inst.edge(inst.edge_between(h[0], h[1]).unwrap()).capacity.clone())
        .min()
        .unwrap()
}

/// Largest bottleneck over all simple paths, or `None` when disconnected.
pub fn brute_widest(inst: &NetworkInstance, u: VertexId, v: VertexId) -> Option<Rational> {
    simple_paths(inst, u, v).iter().map(|p| bottleneck(inst, p)).max()
}

/// Reachability closure: `same[u][v]` iff connected.
pub fn brute_connected(inst: &NetworkInstance) -> Vec<Vec<bool>> {
    let n = inst.num_vertices();
    let mut r = vec![vec![false; n]; n];
    for (v, row) in r.iter_mut().enumerate() {
        row[v] = true;
    }
    for e in inst.edges() {
        r[e.a][e.b] = true;
        r[e.b][e.a] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    r
}

/// Every message tuple of `sizes`, first source slowest.
pub fn all_tuples(sizes: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..s).map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}
