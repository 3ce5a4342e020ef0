//! One check per acceptance criterion. Each returns a short detail line on
//! success and the first violation on failure.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use edgerem::analysis::{
    bridge_decompose, classify_edge, edge_removal_report, path_case_bound, rate_region_micro,
    BridgeOptions, EdgeClass, RegionLimits, VerifyInput,
};
use edgerem::code::{
    check_feasibility, make_routing_code, CheckMode, Direction, Executor, FeasibilityTarget,
    NetworkCode, Route, SharedCode,
};
use edgerem::graph::NetworkInstance;
use edgerem::rational::Rational;
use edgerem::transforms::{
    amplify, fresh_path, interleave, nearest_codeword_decode, parallel_repeat, pipeline_path,
    reblock, scale_code, DistancePolicy, OuterCodeFamily, OuterCodeSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::*;

pub type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn routes(inst: &NetworkInstance, list: &[(usize, usize, &[&str], usize)]) -> Vec<Route> {
    list.iter()
        .map(|&(source, terminal, path, start)| Route {
            source,
            terminal,
            path: path.iter().map(|v| inst.vertex(v).unwrap()).collect(),
            start,
        })
        .collect()
}

fn routing(
    inst: &NetworkInstance,
    n: u64,
    big_n: usize,
    sizes: &[u64],
    list: &[(usize, usize, &[&str], usize)],
) -> Result<SharedCode, String> {
    Ok(Arc::new(
        make_routing_code(inst, n, big_n, sizes, &routes(inst, list)).map_err(err)?,
    ))
}

/// Traces and decoded outputs of two codes agree on every message tuple.
fn same_behaviour(a: &dyn NetworkCode, b: &dyn NetworkCode, inst: &NetworkInstance) -> Result<usize, String> {
    let ea = Executor::new(a, inst).map_err(err)?;
    let eb = Executor::new(b, inst).map_err(err)?;
    let tuples = all_tuples(a.message_sizes());
    for w in &tuples {
        let (ta, tb) = (ea.run(w).map_err(err)?, eb.run(w).map_err(err)?);
        ensure!(
            ta.forward == tb.forward && ta.backward == tb.backward,
            "traces differ for messages {w:?}"
        );
        ensure!(
            ea.outputs(w).map_err(err)? == eb.outputs(w).map_err(err)?,
            "outputs differ for messages {w:?}"
        );
    }
    Ok(tuples.len())
}

/// Identity laws: one session, one-round interleaving, unit scaling and
/// one-fold re-blocking all leave traces and outputs unchanged.
pub fn identity_suite() -> Check {
    let mut tuples = 0;
    let mut cases = 0;
    for (name, g) in micro_instances() {
        let sizes = vec![3; g.sources().len()];
        for (seed, big_n) in [(1u64, 1usize), (2, 2)] {
            let base = HashCode::new(&g, 2, big_n, &sizes, seed);
            let shared: SharedCode = Arc::new(base.clone());
            let repeated = parallel_repeat(shared.clone(), &g, 1).map_err(err)?;
            tuples += same_behaviour(&base, &repeated, &g).map_err(|e| format!("{name} repeat: {e}"))?;
            let scaled = scale_code(shared.clone(), &g, &Rational::one()).map_err(err)?;
            tuples += same_behaviour(&base, &scaled, &g).map_err(|e| format!("{name} scale: {e}"))?;
            let reblocked = reblock(shared.clone(), &g, 1).map_err(err)?;
            tuples += same_behaviour(&base, &reblocked, &g).map_err(|e| format!("{name} reblock: {e}"))?;
            if big_n == 1 {
                let inter = interleave(shared.clone(), &g).map_err(err)?;
                tuples +=
                    same_behaviour(&base, &inter, &g).map_err(|e| format!("{name} interleave: {e}"))?;
                cases += 1;
            }
            cases += 3;
        }
    }
    Ok(format!("{cases} transform/instance pairs, {tuples} message tuples"))
}

/// Symbols of the removed edge travel hop by hop along the fresh path and
/// arrive unchanged; kept edges replay the interleaved code's symbols.
pub fn pipeline_delivery() -> Check {
    let g = relay_with_chord();
    let mut checked = 0u64;
    for big_n in [2usize, 3] {
        let base: SharedCode = Arc::new(HashCode::new(&g, 1, big_n, &[2, 2], 10 + big_n as u64));
        let tilde: SharedCode = Arc::new(interleave(base, &g).map_err(err)?);
        for ell in [2usize, 3, 5] {
            let path = fresh_path(&g, "a", "b", ell);
            let star = g.replace_edge_with_path("a", "b", &path, true).map_err(err)?;
            let piped = pipeline_path(tilde.clone(), &g, "a", "b", &star, ell).map_err(err)?;
            edgerem::code::validate_code(&piped, &star).map_err(err)?;
            let bound = |e: usize| {
                edgerem::rational::saturating_u128(&edgerem::rational::alphabet_size(
                    &star.edge(e).capacity,
                    piped.inner_blocklength(),
                ))
            };
            for e in 0..star.edges().len() {
                for t in 1..=piped.outer_blocklength() {
                    ensure!(
                        piped.split(e, t).product() <= bound(e),
                        "split product exceeds capacity on edge {e} at t={t}"
                    );
                }
            }
            let et = Executor::new(tilde.as_ref(), &g).map_err(err)?;
            let ep = Executor::new(&piped, &star).map_err(err)?;
            let e = piped.removed_edge();
            let fwd = piped.towards_u2();
            for w in all_tuples(tilde.message_sizes()) {
                let tt = et.run(&w).map_err(err)?;
                let tp = ep.run(&w).map_err(err)?;
                for i in 1..=big_n {
                    for j in 1..=big_n {
                        let s = (i - 1) * big_n + j;
                        for (r, &hop) in piped.hop_edges().iter().enumerate() {
                            let r = r + 1;
                            let got = tp.symbol(hop, piped.forward_time(i, j, r), Direction::Forward);
                            ensure!(
                                got == tt.symbol(e, s, fwd),
                                "N={big_n} ell={ell} block {i} session {j} hop {r}: forward symbol {got} != {}",
                                tt.symbol(e, s, fwd)
                            );
                            let got = tp.symbol(hop, piped.backward_time(i, j, r), Direction::Backward);
                            ensure!(
                                got == tt.symbol(e, s, fwd.flip()),
                                "N={big_n} ell={ell} block {i} session {j} hop {r}: backward symbol {got} != {}",
                                tt.symbol(e, s, fwd.flip())
                            );
                            checked += 2;
                        }
                    }
                }
                ensure!(
                    ep.outputs(&w).map_err(err)? == et.outputs(&w).map_err(err)?,
                    "N={big_n} ell={ell}: outputs differ for {w:?}"
                );
            }
        }
    }
    Ok(format!("{checked} hop symbols delivered"))
}

/// A routing code on the four-cycle with chord `(a, c)`.
pub fn chord_routing(lambda: &str) -> Result<(NetworkInstance, NetworkInstance, SharedCode), String> {
    let g = four_cycle();
    let with = g.add_edge("a", "c", &q(lambda)).map_err(err)?;
    let code = match lambda {
        "1/2" => routing(&with, 2, 2, &[2, 4], &[(0, 0, &["a", "c"], 1), (1, 1, &["b", "c", "d"], 1)])?,
        _ => routing(&with, 1, 2, &[2, 2], &[(0, 0, &["a", "c"], 1), (1, 1, &["b", "c", "d"], 1)])?,
    };
    Ok((g, with, code))
}

/// The path-case chain turns a zero-error code on the instance with the chord
/// into a zero-error code on the four-cycle at exactly the predicted rate.
pub fn constructive_path_case() -> Check {
    let mut lines = Vec::new();
    for lambda in ["1/2", "1"] {
        let (g, _, code) = chord_routing(lambda)?;
        let report = edge_removal_report(
            &g,
            "a",
            "c",
            &q(lambda),
            None,
            Some(&VerifyInput {
                code,
                limit: 1 << 16,
            }),
        )
        .map_err(err)?;
        let bound = report.path_case.as_ref().ok_or("expected a path case")?;
        let v = report.verification.as_ref().ok_or("no verification")?;
        ensure!(v.base_check.measured_error.is_zero(), "base code is not zero-error");
        let fin = v.final_check.as_ref().ok_or("no final check")?;
        ensure!(
            fin.mode == "exhaustive" && fin.measured_error.is_zero(),
            "lambda={lambda}: transformed code has error {}",
            fin.measured_error
        );
        let big_n = Rational::from(2u64);
        let factor = &bound.alpha * &big_n / (&big_n + Rational::from(bound.ell));
        ensure!(v.rate_factor.as_ref() == Some(&factor), "rate factor mismatch");
        for s in &v.sources {
            ensure!(s.achieved.exact && s.base.exact, "rates are not exact");
            let predicted = &factor * &s.base.lower;
            ensure!(
                s.achieved.lower >= predicted,
                "lambda={lambda} source {}: rate {} below {}",
                s.source,
                s.achieved.lower,
                predicted
            );
            ensure!(
                s.achieved.lower == predicted,
                "lambda={lambda} source {}: rate {} differs from the exact prediction {}",
                s.source,
                s.achieved.lower,
                predicted
            );
        }
        ensure!(v.pass, "verification did not pass");
        lines.push(format!(
            "lambda={lambda}: alpha={} ell={} rates {}",
            bound.alpha,
            bound.ell,
            v.sources
                .iter()
                .map(|s| s.achieved.lower.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ));
    }
    Ok(lines.join("; "))
}

fn bridge_code(faulty: bool) -> Result<(NetworkInstance, SharedCode), String> {
    let g = two_triangles().add_edge("c", "x", &q("1")).map_err(err)?;
    let code = routing(
        &g,
        1,
        3,
        &[2, 2],
        &[
            (0, 0, &["a", "b"], 1),
            (0, 1, &["a", "c", "x", "z"], 1),
            (1, 1, &["y", "z"], 1),
        ],
    )?;
    if !faulty {
        return Ok((g, code));
    }
    let code = shared(Faulty {
        base: code,
        terminal: 1,
        trigger: vec![1, 1],
        sizes_of_demanded: vec![2, 2],
    });
    Ok((g, code))
}

/// Averaging over fixings of foreign messages: the chosen fixing's conditional
/// error is the minimum (checked by an independent enumeration), is at most the
/// code's error, and the simulated side codes reproduce every trace.
pub fn bridge_averaging() -> Check {
    let mut lines = Vec::new();
    for (faulty, expected) in [(false, "0"), (true, "1/4")] {
        let (g, code) = bridge_code(faulty)?;
        let eps = check_feasibility(code.as_ref(), &g, &FeasibilityTarget::zero_error(), CheckMode::exhaustive())
            .map_err(err)?
            .measured_error;
        ensure!(eps == q(expected), "base error {eps}, expected {expected}");
        let d = bridge_decompose(&g, "c", "x", code.clone(), &BridgeOptions::default()).map_err(err)?;
        let exec = Executor::new(code.as_ref(), &g).map_err(err)?;
        for side in &d.sides {
            ensure!(side.traces_match, "side {}: traces differ at {:?}", side.endpoint, side.mismatches);
            ensure!(
                side.conditional_error <= eps,
                "side {}: conditional error {} exceeds {eps}",
                side.endpoint,
                side.conditional_error
            );
            ensure!(side.sub_error <= side.conditional_error, "sub-instance error exceeds the conditional error");
            // oracle: conditional error of every fixing
            let foreign: Vec<usize> = side.fixing.iter().map(|&(i, _)| i).collect();
            let sizes = code.message_sizes();
            let mut best: Option<Rational> = None;
            for fix in all_tuples(&foreign.iter().map(|&i| sizes[i]).collect::<Vec<_>>()) {
                let mut fails = 0u64;
                let mut total = 0u64;
                for w in all_tuples(sizes) {
                    if foreign.iter().zip(&fix).any(|(&i, &x)| w[i] != x) {
                        continue;
                    }
                    total += 1;
                    if !exec.failures(&w, &exec.outputs(&w).map_err(err)?).is_empty() {
                        fails += 1;
                    }
                }
                let e = Rational::from(fails) / Rational::from(total);
                if best.as_ref().is_none_or(|b| e < *b) {
                    best = Some(e);
                }
            }
            ensure!(
                best.as_ref() == Some(&side.conditional_error),
                "side {}: returned {} but the best fixing has {:?}",
                side.endpoint,
                side.conditional_error,
                best
            );
        }
        lines.push(format!(
            "eps={eps}: conditional errors {}",
            d.sides
                .iter()
                .map(|s| s.conditional_error.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ));
    }
    Ok(lines.join("; "))
}

/// Cut bounds agree with a bipartition enumeration on the corpus, and the
/// brute-force rate region never exceeds them.
pub fn cut_consistency() -> Check {
    let mut pairs = 0;
    for (name, g) in corpus() {
        if g.num_vertices() > 8 {
            continue;
        }
        let n = g.num_vertices();
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let fast = g.cut_bound(&[a], &[b]).map_err(err)?;
                let slow = brute_cut(&g, &[a], &[b]);
                ensure!(fast == slow, "{name}: cut({a},{b}) = {fast}, brute force {slow}");
                pairs += 1;
            }
        }
        for j in 0..g.terminals().len() {
            let mut srcs: Vec<usize> = g.demanded_by(j).iter().map(|&i| g.sources()[i]).collect();
            srcs.sort();
            srcs.dedup();
            let d = g.terminals()[j];
            if srcs.contains(&d) {
                continue;
            }
            ensure!(
                g.cut_bound(&srcs, &[d]).map_err(err)? == brute_cut(&g, &srcs, &[d]),
                "{name}: demand cut for terminal {j}"
            );
            pairs += 1;
        }
    }
    let bridge = inst(
        &["a", "b", "c"],
        &[("a", "b", "1"), ("b", "c", "1")],
        &["a", "c"],
        &["c", "a"],
        &[&[1, 0], &[0, 1]],
    );
    let cases: Vec<(NetworkInstance, u64, usize, Option<(&str, &str)>)> = vec![
        (inst(&["a", "b"], &[("a", "b", "1")], &["a"], &["b"], &[&[1]]), 1, 1, None),
        (
            inst(&["a", "b"], &[("a", "b", "1")], &["a", "b"], &["b", "a"], &[&[1, 0], &[0, 1]]),
            1,
            2,
            None,
        ),
        (
            inst(&["a", "b", "c"], &[("a", "b", "1"), ("b", "c", "1")], &["a"], &["c"], &[&[1]]),
            1,
            2,
            None,
        ),
        (
            inst(
                &["a", "b", "c"],
                &[("a", "b", "1"), ("b", "c", "1"), ("a", "c", "1/2")],
                &["a"],
                &["c"],
                &[&[1]],
            ),
            2,
            1,
            None,
        ),
        (bridge, 1, 2, Some(("b", "c"))),
    ];
    let mut points = 0;
    for (g, n, big_n, probe) in cases {
        let limits = RegionLimits {
            max_alphabet: 4,
            ..RegionLimits::default()
        };
        let region = rate_region_micro(&g, n, big_n, &limits).map_err(err)?;
        for p in &region.points {
            for (i, r) in p.rates().iter().enumerate() {
                for j in 0..g.terminals().len() {
                    if !g.demand()[i][j] {
                        continue;
                    }
                    let cut = g.cut_bound(&[g.sources()[i]], &[g.terminals()[j]]).map_err(err)?;
                    ensure!(*r <= cut, "region point {r} exceeds cut {cut}");
                }
            }
            if let Some((u, u2)) = probe {
                // the probe edge is a bridge of the instance without it
                let lambda = g.edge(g.edge_between(g.vertex(u).unwrap(), g.vertex(u2).unwrap()).unwrap()).capacity.clone();
                let base = g.without_edge(u, u2).map_err(err)?;
                let report = edge_removal_report(&base, u, u2, &lambda, Some(p), None).map_err(err)?;
                let b = report.bridge.ok_or("probe is not a bridge")?;
                ensure!(b.cut_violations == 0, "bridge demand above lambda");
                for c in &b.cross_demands {
                    ensure!(c.cut_bound <= lambda, "cross cut {} above lambda", c.cut_bound);
                }
            }
            points += 1;
        }
    }
    Ok(format!("{pairs} cut pairs, {points} region points"))
}

fn faulty_single(n: u64, size: u64, big_n: usize, g: &NetworkInstance, path: &[&str]) -> Result<SharedCode, String> {
    let base = routing(g, n, big_n, &[size], &[(0, 0, path, 1)])?;
    Ok(shared(Faulty {
        base,
        terminal: 0,
        trigger: vec![size - 1],
        sizes_of_demanded: vec![size],
    }))
}

/// Interleaving multiplies the error by at most `N`; amplification drives a
/// base error of 1/4 below 1/4; nearest-codeword decoding corrects every
/// pattern within half the distance.
pub fn error_accounting() -> Check {
    let single = inst(&["a", "b"], &[("a", "b", "1")], &["a"], &["b"], &[&[1]]);
    let line = inst(&["a", "b", "c"], &[("a", "b", "1"), ("b", "c", "1")], &["a"], &["c"], &[&[1]]);
    let chord = inst(
        &["a", "r", "b"],
        &[("a", "r", "1"), ("r", "b", "1"), ("a", "b", "1")],
        &["a"],
        &["b"],
        &[&[1]],
    );
    let codes = vec![
        (single.clone(), faulty_single(2, 4, 2, &single, &["a", "b"])?),
        (line.clone(), faulty_single(2, 4, 3, &line, &["a", "b", "c"])?),
        (chord.clone(), faulty_single(1, 2, 3, &chord, &["a", "b"])?),
    ];
    let mut lines = Vec::new();
    for (g, code) in codes {
        let big_n = code.outer_blocklength();
        let base = check_feasibility(code.as_ref(), &g, &FeasibilityTarget::zero_error(), CheckMode::exhaustive())
            .map_err(err)?
            .measured_error;
        let inter = interleave(code, &g).map_err(err)?;
        let e = check_feasibility(&inter, &g, &FeasibilityTarget::zero_error(), CheckMode::exhaustive())
            .map_err(err)?
            .measured_error;
        ensure!(base.is_positive(), "base code should err");
        ensure!(
            e <= Rational::from(big_n) * &base,
            "interleaved error {e} exceeds {big_n} x {base}"
        );
        lines.push(format!("{e}<={big_n}x{base}"));
    }
    let base = faulty_single(2, 4, 1, &single, &["a", "b"])?;
    let amplified = amplify(
        base,
        &single,
        16,
        OuterCodeFamily::Repetition,
        None,
        &q("1/4"),
        DistancePolicy::Unchecked,
        0,
    )
    .map_err(err)?;
    let report = check_feasibility(
        &amplified,
        &single,
        &FeasibilityTarget::with_epsilon(q("1/4")),
        CheckMode::Sampled {
            trials: 10_000,
            seed: 7,
        },
    )
    .map_err(err)?;
    ensure!(
        report.measured_error < q("1/4"),
        "amplified error {} is not below 1/4",
        report.measured_error
    );
    lines.push(format!("amplified {}", report.measured_error));
    let mut words = 0u64;
    let mut specs: Vec<OuterCodeSpec> = (1..=7)
        .map(|m| OuterCodeSpec::repetition(3, m).unwrap())
        .collect();
    specs.push(OuterCodeSpec::reed_solomon_k(7, 4, 2).map_err(err)?);
    for spec in specs {
        let t = (spec.d - 1) / 2;
        let all = all_tuples(&vec![spec.q; spec.m]);
        for w in 0..spec.messages().map_err(err)? {
            let c = spec.encode(w);
            for word in &all {
                let dist = word.iter().zip(&c).filter(|(a, b)| a != b).count() as u64;
                if dist <= t {
                    ensure!(
                        nearest_codeword_decode(word, &spec) == w,
                        "{:?} m={} fails on {word:?}",
                        spec.family,
                        spec.m
                    );
                    words += 1;
                }
            }
        }
    }
    lines.push(format!("{words} correctable words"));
    Ok(lines.join("; "))
}

/// Exact identities of the removal constant, the path-case bound and the
/// domination of the scaled path, on random instances.
pub fn exact_arithmetic() -> Check {
    let lambdas = ["1/3", "1/2", "1", "2", "7/3", "40"];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    for seed in 0..100u64 {
        let g = random_instance(seed, 6);
        let total: Rational = g.edges().iter().map(|e| e.capacity.clone()).sum();
        let min = g.edges().iter().map(|e| e.capacity.clone()).min().unwrap();
        let rc = g.removal_constant().map_err(err)?;
        ensure!(rc.total == total && rc.min == min, "seed {seed}: W or w wrong");
        ensure!(rc.c == Rational::from(2u64) * &total / &min, "seed {seed}: c wrong");
        let conn = brute_connected(&g);
        let n = g.num_vertices();
        for u in 0..n {
            for v in u + 1..n {
                if g.edge_between(u, v).is_some() {
                    continue;
                }
                let lambda = q(lambdas[rng.gen_range(0..lambdas.len())]);
                let (un, vn) = (g.name(u).to_string(), g.name(v).to_string());
                let class = classify_edge(&g, &un, &vn).map_err(err)?;
                let report = edge_removal_report(&g, &un, &vn, &lambda, None, None).map_err(err)?;
                ensure!(
                    report.f_lambda <= &rc.c * &lambda,
                    "seed {seed}: f/lambda exceeds c"
                );
                match class {
                    EdgeClass::Bridge { .. } => {
                        ensure!(!conn[u][v], "seed {seed}: bridge between connected vertices");
                        ensure!(report.f_lambda == lambda, "seed {seed}: bridge f != lambda");
                    }
                    EdgeClass::PathCase { path, gamma } => {
                        ensure!(conn[u][v], "seed {seed}: path case between components");
                        ensure!(
                            Some(&gamma) == brute_widest(&g, u, v).as_ref(),
                            "seed {seed}: gamma {gamma} is not the widest bottleneck"
                        );
                        ensure!(bottleneck(&g, &path) == gamma, "seed {seed}: path bottleneck");
                        let b = path_case_bound(&g, &un, &vn, &lambda).map_err(err)?;
                        let one = Rational::one();
                        ensure!(&b.delta * &gamma == lambda, "seed {seed}: delta gamma != lambda");
                        ensure!(&b.alpha * (&one + &b.delta) == one, "seed {seed}: alpha (1 + delta) != 1");
                        ensure!(
                            b.alpha == &gamma / (&gamma + &lambda),
                            "seed {seed}: alpha != gamma / (gamma + lambda)"
                        );
                        ensure!(b.loss_total == b.loss_gamma, "seed {seed}: 2 delta W != 2W lambda / gamma");
                        for h in path.windows(2) {
                            let cap = g.edge(g.edge_between(h[0], h[1]).unwrap()).capacity.clone();
                            ensure!(
                                &b.alpha * (&cap + &lambda) <= cap,
                                "seed {seed}: scaled path edge not dominated"
                            );
                        }
                        ensure!(b.all_dominated, "seed {seed}: report misses domination");
                        if lambda <= total {
                            ensure!(report.f_lambda == &rc.c * &lambda, "seed {seed}: f != c lambda");
                            ensure!(
                                b.loss_from_max_rate <= b.loss_relaxed
                                    && b.loss_relaxed <= b.loss_total
                                    && b.loss_gamma <= report.f_lambda,
                                "seed {seed}: loss chain out of order"
                            );
                        } else {
                            ensure!(report.degenerate, "seed {seed}: degenerate branch not taken");
                            ensure!(report.f_lambda == Rational::from(2u64) * &lambda, "seed {seed}: f != 2 lambda");
                        }
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} probes on 100 instances"))
}

fn write_json(dir: &Path, name: &str, v: &serde_json::Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn write_instance(dir: &Path, name: &str, g: &NetworkInstance) -> PathBuf {
    write_json(dir, name, &serde_json::to_value(g.to_document()).unwrap())
}

/// Every CLI command, run twice with the same flags, prints the same bytes
/// and writes the same files.
pub fn cli_determinism(bin: &str) -> Check {
    let dir = std::env::temp_dir().join(format!("edgerem-determinism-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(err)?;
    let c4 = write_instance(&dir, "c4.json", &four_cycle());
    let (_, with, _) = chord_routing("1/2")?;
    let c4e = write_instance(&dir, "c4e.json", &with);
    let route = write_json(
        &dir,
        "route.json",
        &json!({"form": "routing", "n": 2, "N": 2, "message_sizes": [2, 4], "routes": [
            {"source": 0, "terminal": 0, "path": ["a", "c"], "start": 1},
            {"source": 1, "terminal": 1, "path": ["b", "c", "d"], "start": 1}]}),
    );
    let tri = write_instance(&dir, "tri.json", &two_triangles());
    let tri_code = write_json(
        &dir,
        "tri_code.json",
        &json!({"form": "routing", "n": 1, "N": 3, "message_sizes": [2, 2], "routes": [
            {"source": 0, "terminal": 0, "path": ["a", "b"], "start": 1},
            {"source": 0, "terminal": 1, "path": ["a", "c", "x", "z"], "start": 1},
            {"source": 1, "terminal": 1, "path": ["y", "z"], "start": 1}]}),
    );
    let line = write_instance(
        &dir,
        "line.json",
        &inst(&["a", "b", "c"], &[("a", "b", "1"), ("b", "c", "1")], &["a"], &["c"], &[&[1]]),
    );
    let single = write_instance(&dir, "single.json", &inst(&["a", "b"], &[("a", "b", "1")], &["a"], &["b"], &[&[1]]));
    let single_code = write_json(
        &dir,
        "single_code.json",
        &json!({"form": "routing", "n": 1, "N": 2, "message_sizes": [2], "routes": [
            {"source": 0, "terminal": 0, "path": ["a", "b"], "start": 2}]}),
    );
    let chain = write_json(
        &dir,
        "chain.json",
        &json!([{"op": "interleave"}, {"op": "pipeline_path", "params": {"edge": ["a", "c"], "ell": 3}}]),
    );
    let amp_chain = write_json(
        &dir,
        "amp.json",
        &json!([{"op": "amplify", "params": {"m": 3, "family": "repetition", "epsilon": "0"}, "seed": 5}]),
    );
    let s = |p: &PathBuf| p.to_string_lossy().into_owned();
    let out1 = dir.join("out1.json");
    let commands: Vec<Vec<String>> = vec![
        vec!["validate".into(), s(&c4)],
        vec!["analyze".into(), s(&c4), "--edge".into(), "a,c".into(), "--lambda".into(), "1/2".into()],
        vec![
            "analyze".into(), s(&c4), "--edge".into(), "a,c".into(), "--lambda".into(), "1/2".into(),
            "--code".into(), s(&route), "--rate".into(), "1/4,1/2".into(),
        ],
        vec![
            "analyze".into(), s(&tri), "--edge".into(), "c,x".into(), "--lambda".into(), "1".into(),
            "--code".into(), s(&tri_code),
        ],
        vec!["check".into(), s(&c4e), s(&route)],
        vec!["check".into(), s(&c4e), s(&route), "--epsilon".into(), "1/10".into(), "--mode".into(), "sampled:1000:42".into()],
        vec!["region".into(), s(&line), "--N".into(), "2".into()],
        vec!["transform".into(), s(&c4e), s(&route), s(&chain), "--out".into(), s(&out1)],
        vec!["transform".into(), s(&single), s(&single_code), s(&amp_chain), "--out".into(), s(&out1)],
    ];
    for args in &commands {
        let run = || -> Result<(Option<i32>, Vec<u8>, Vec<u8>), String> {
            let o = Command::new(bin).args(args).output().map_err(err)?;
            let written = std::fs::read(&out1).unwrap_or_default();
            Ok((o.status.code(), o.stdout, written))
        };
        let first = run()?;
        let _ = std::fs::remove_file(&out1);
        let second = run()?;
        let _ = std::fs::remove_file(&out1);
        ensure!(first == second, "output differs between runs of {args:?}");
        ensure!(first.0 == Some(0), "{args:?} exited with {:?}", first.0);
        ensure!(!first.1.is_empty(), "{args:?} printed nothing");
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} commands", commands.len()))
}
