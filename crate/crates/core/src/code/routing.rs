use serde::{Deserialize, Serialize};

use super::{compose, decompose, CodeError, Direction, InfoState, NetworkCode, Split};
use crate::graph::{EdgeId, NetworkInstance, VertexId};
use crate::rational::{alphabet_size, saturating_u128};

/// Store-and-forward delivery of one source message to one terminal.
///
/// Hop `h` (0-based) of `path` is used in round `start + h`, and carries the
/// whole message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Route {
    pub source: usize,
    pub terminal: usize,
    pub path: Vec<VertexId>,
    pub start: usize,
}

/// Which routes use one direction of one edge in one round: `(route, hop)`.
type Loads = Vec<(usize, usize)>;

#[derive(Debug, Clone)]
pub struct RoutingCode {
    n: u64,
    big_n: usize,
    sizes: Vec<u64>,
    num_terminals: usize,
    routes: Vec<Route>,
    hops: Vec<Vec<(EdgeId, Direction)>>,
    /// `[e][t - 1]` -> (forward loads, backward loads)
    loads: Vec<Vec<(Loads, Loads)>>,
    splits: Vec<Vec<Split>>,
    /// Per terminal, per demanded source: the route that serves it.
    serving: Vec<Vec<(usize, Option<usize>)>>,
}

impl RoutingCode {
    pub fn routes(&self) -> &[Route] {
        &self.routes
    }

    fn radices(&self, loads: &Loads) -> Vec<u64> {
        loads.iter().map(|&(r, _)| self.sizes[self.routes[r].source]).collect()
    }

    /// Value route `r` carries on hop `h`, read from the sender's state.
    fn hop_value(&self, r: usize, h: usize, state: &InfoState) -> u64 {
        let route = &self.routes[r];
        if h == 0 {
            return state.message(route.source).unwrap_or(0);
        }
        let (prev_edge, prev_dir) = self.hops[r][h - 1];
        let t_prev = route.start + h - 1;
        let symbol = state.symbol(prev_edge, t_prev).unwrap_or(0);
        let (fwd, bwd) = &self.loads[prev_edge][t_prev - 1];
        let loads = match prev_dir {
            Direction::Forward => fwd,
            Direction::Backward => bwd,
        };
        let digits = decompose(symbol, &self.radices(loads));
        loads
            .iter()
            .position(|&(rr, hh)| rr == r && hh == h - 1)
            .map(|k| digits[k])
            .unwrap_or(0)
    }
}

/// Builds a store-and-forward code from explicit routes. Several routes on the
/// same edge, direction and round share the symbol in mixed radix.
pub fn make_routing_code(
    inst: &NetworkInstance,
    n: u64,
    big_n: usize,
    message_sizes: &[u64],
    routes: &[Route],
) -> Result<RoutingCode, CodeError> {
    if message_sizes.len() != inst.sources().len() {
        return Err(CodeError::InstanceMismatch {
            code: format!("{} message sizes", message_sizes.len()),
            instance: format!("{} sources", inst.sources().len()),
        });
    }
    let m = inst.edges().len();
    let mut loads: Vec<Vec<(Loads, Loads)>> = vec![vec![(Vec::new(), Vec::new()); big_n]; m];
    let mut hops = Vec::with_capacity(routes.len());
    for (r, route) in routes.iter().enumerate() {
        let bad = |msg: String| CodeError::BadRoute(format!("route {r}: {msg}"));
        if route.source >= inst.sources().len() || route.terminal >= inst.terminals().len() {
            return Err(bad("source or terminal index out of range".into()));
        }
        if !inst.demand()[route.source][route.terminal] {
            return Err(bad("terminal does not demand this source".into()));
        }
        if route.path.first() != Some(&inst.sources()[route.source])
            || route.path.last() != Some(&inst.terminals()[route.terminal])
        {
            return Err(bad("path must run from the source to the terminal".into()));
        }
        if route.start == 0 {
            return Err(bad("rounds are numbered from 1".into()));
        }
        let mut route_hops = Vec::new();
        for (h, pair) in route.path.windows(2).enumerate() {
            let e = inst.edge_between(pair[0], pair[1]).ok_or_else(|| {
                bad(format!(
                    "no edge between {} and {}",
                    inst.name(pair[0]),
                    inst.name(pair[1])
                ))
            })?;
            let t = route.start + h;
            if t > big_n {
                return Err(bad(format!("hop {h} falls in round {t} > N = {big_n}")));
            }
            let dir = Direction::leaving(inst.edge(e).a, pair[0]);
            let slot = &mut loads[e][t - 1];
            match dir {
                Direction::Forward => slot.0.push((r, h)),
                Direction::Backward => slot.1.push((r, h)),
            }
            route_hops.push((e, dir));
        }
        hops.push(route_hops);
    }
    let mut splits = vec![vec![Split::IDLE; big_n]; m];
    for (e, edge) in inst.edges().iter().enumerate() {
        let bound = alphabet_size(&edge.capacity, n);
        for t in 1..=big_n {
            let (fwd, bwd) = &loads[e][t - 1];
            let size = |l: &Loads| -> Option<u64> {
                l.iter()
                    .try_fold(1u64, |acc, &(r, _)| acc.checked_mul(message_sizes[routes[r].source]))
            };
            let overflow = |detail: String| CodeError::CapacityOverflow { edge: e, t, detail };
            let f = size(fwd).ok_or_else(|| overflow("load exceeds 64 bits".into()))?;
            let b = size(bwd).ok_or_else(|| overflow("load exceeds 64 bits".into()))?;
            let split = Split::new(f, b);
            if split.product() > saturating_u128(&bound) {
                return Err(overflow(format!("{f} x {b} > {bound}")));
            }
            splits[e][t - 1] = split;
        }
    }
    let serving = (0..inst.terminals().len())
        .map(|j| {
            inst.demanded_by(j)
                .into_iter()
                .map(|i| (i, routes.iter().position(|r| r.source == i && r.terminal == j)))
                .collect()
        })
        .collect();
    Ok(RoutingCode {
        n,
        big_n,
        sizes: message_sizes.to_vec(),
        num_terminals: inst.terminals().len(),
        routes: routes.to_vec(),
        hops,
        loads,
        splits,
        serving,
    })
}

impl NetworkCode for RoutingCode {
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
        self.num_terminals
    }

    fn split(&self, edge: EdgeId, t: usize) -> Split {
        self.splits[edge][t - 1]
    }

    fn encode(&self, edge: EdgeId, t: usize, dir: Direction, state: &InfoState) -> u64 {
        let (fwd, bwd) = &self.loads[edge][t - 1];
        let loads = match dir {
            Direction::Forward => fwd,
            Direction::Backward => bwd,
        };
        let digits: Vec<u64> = loads
            .iter()
            .map(|&(r, h)| self.hop_value(r, h, state))
            .collect();
        compose(&digits, &self.radices(loads))
    }

    fn decode(&self, terminal: usize, state: &InfoState) -> Vec<u64> {
        self.serving[terminal]
            .iter()
            .map(|&(i, route)| {
                if let Some(w) = state.message(i) {
                    return w;
                }
                match route {
                    Some(r) => {
                        let hops = self.hops[r].len();
                        self.hop_value(r, hops, state)
                    }
                    None => 0,
                }
            })
            .collect()
    }

    fn kind(&self) -> String {
        "routing".to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{check_feasibility, execute, CheckMode, FeasibilityTarget};
    use crate::graph::tests::inst;

    fn line() -> NetworkInstance {
        inst(
            &["a", "b", "c"],
            &[("a", "b", "1"), ("b", "c", "1")],
            &["a"],
            &["c"],
            &[&[1]],
        )
    }

    #[test]
    fn two_hop_store_and_forward() {
        let g = line();
        let route = Route {
            source: 0,
            terminal: 0,
            path: vec![0, 1, 2],
            start: 1,
        };
        let code = make_routing_code(&g, 1, 2, &[2], &[route]).unwrap();
        let trace = execute(&code, &g, &[1]).unwrap();
        assert_eq!(trace.symbol(0, 1, Direction::Forward), 1);
        assert_eq!(trace.symbol(1, 2, Direction::Forward), 1);
        assert_eq!(trace.symbol(0, 1, Direction::Backward), 0);
        let report = check_feasibility(
            &code,
            &g,
            &FeasibilityTarget::zero_error(),
            CheckMode::exhaustive(),
        )
        .unwrap();
        assert!(report.pass);
    }

    #[test]
    fn shared_edge_overflows() {
        let g = inst(
            &["a", "b"],
            &[("a", "b", "1")],
            &["a", "a"],
            &["b"],
            &[&[1], &[1]],
        );
        let route = |s| Route {
            source: s,
            terminal: 0,
            path: vec![0, 1],
            start: 1,
        };
        let err = make_routing_code(&g, 1, 1, &[2, 2], &[route(0), route(1)]).unwrap_err();
        assert!(matches!(err, CodeError::CapacityOverflow { .. }));
    }

    #[test]
    fn no_routes_is_valid() {
        let g = line();
        let code = make_routing_code(&g, 1, 1, &[1], &[]).unwrap();
        assert!(execute(&code, &g, &[0]).is_ok());
    }
}
