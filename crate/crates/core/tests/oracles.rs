#![allow(clippy::needless_range_loop)]
//! Graph primitives against brute-force enumeration.

mod common;

use common::*;
use edgerem::analysis::{classify_edge, EdgeClass};
use edgerem::code::MessageTuples;
use edgerem::graph::RateVector;
use edgerem::rational::Rational;
use proptest::prelude::*;

#[test]
fn corpus_cuts_match_bipartition_enumeration() {
    for (name, g) in corpus() {
        let n = g.num_vertices();
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    assert_eq!(g.cut_bound(&[a], &[b]).unwrap(), brute_cut(&g, &[a], &[b]), "{name} {a} {b}");
                }
            }
        }
    }
}

#[test]
fn corpus_components_match_reachability() {
    for (name, g) in corpus() {
        let conn = brute_connected(&g);
        for comp in g.connected_components() {
            for &x in &comp {
                for v in 0..g.num_vertices() {
                    assert_eq!(comp.contains(&v), conn[x][v], "{name}");
                }
            }
        }
    }
}

#[test]
fn corpus_files_validate() {
    assert!(corpus().len() >= 10);
}

fn brute_widest_path(g: &edgerem::graph::NetworkInstance, u: usize, v: usize) -> Option<(Vec<usize>, Rational)> {
    simple_paths(g, u, v)
        .into_iter()
        .map(|p| {
            let b = bottleneck(g, &p);
            (p, b)
        })
        .min_by(|(p, b), (p2, b2)| b2.cmp(b).then(p.len().cmp(&p2.len())).then(p.cmp(p2)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cut_bound_is_the_minimum_bipartition(seed in any::<u64>()) {
        let g = random_instance(seed, 6);
        let n = g.num_vertices();
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    prop_assert_eq!(g.cut_bound(&[a], &[b]).unwrap(), brute_cut(&g, &[a], &[b]));
                }
            }
        }
    }

    #[test]
    fn widest_path_matches_enumeration_and_tie_break(seed in any::<u64>()) {
        let g = random_instance(seed, 6);
        let n = g.num_vertices();
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                match (g.widest_path(u, v), brute_widest_path(&g, u, v)) {
                    (Ok((p, w)), Some((bp, bw))) => {
                        prop_assert_eq!(&w, &bw);
                        prop_assert_eq!(p, bp);
                    }
                    (Err(_), None) => {}
                    (got, want) => prop_assert!(false, "widest {:?} vs {:?}", got, want),
                }
            }
        }
    }

    #[test]
    fn classification_follows_connectivity(seed in any::<u64>()) {
        let g = random_instance(seed, 6);
        let conn = brute_connected(&g);
        let n = g.num_vertices();
        for u in 0..n {
            for v in u + 1..n {
                if g.edge_between(u, v).is_some() {
                    prop_assert!(classify_edge(&g, g.name(u), g.name(v)).is_err());
                    continue;
                }
                let class = classify_edge(&g, g.name(u), g.name(v)).unwrap();
                match class {
                    EdgeClass::Bridge { .. } => prop_assert!(!conn[u][v]),
                    EdgeClass::PathCase { gamma, .. } => {
                        prop_assert!(conn[u][v]);
                        prop_assert_eq!(Some(gamma), brute_widest(&g, u, v));
                    }
                }
            }
        }
    }

    #[test]
    fn removal_constant_matches_definition(seed in any::<u64>()) {
        let g = random_instance(seed, 7);
        let rc = g.removal_constant().unwrap();
        let total: Rational = g.edges().iter().map(|e| e.capacity.clone()).sum();
        let min = g.edges().iter().map(|e| e.capacity.clone()).min().unwrap();
        prop_assert_eq!(&rc.c, &(Rational::from(2u64) * &total / &min));
        prop_assert!(rc.c >= 2);
    }

    #[test]
    fn rationals_round_trip_through_strings(p in -1000i64..1000, q in 1i64..1000) {
        let r = Rational::new(p, q);
        let back: Rational = r.to_string().parse().unwrap();
        prop_assert_eq!(&back, &r);
        let json = serde_json::to_string(&r).unwrap();
        prop_assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), r);
    }

    #[test]
    fn message_tuples_are_row_major(sizes in proptest::collection::vec(1u64..5, 1..4)) {
        let t = MessageTuples::new(&sizes, 1 << 20).unwrap();
        prop_assert_eq!(t.iter().collect::<Vec<_>>(), all_tuples(&sizes));
    }
}

#[test]
fn rate_vectors_reject_wrong_length() {
    assert!(RateVector::parse("1,1/2", 2).is_ok());
    assert!(RateVector::parse("1", 2).is_err());
}
