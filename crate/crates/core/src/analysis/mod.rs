//! Edge-removal analysis: classify a probed edge, bound the rate loss of
//! removing it, and optionally verify the bound constructively on a code.

use serde::Serialize;
use thiserror::Error;

use crate::code::{
    achieved_rates, check_feasibility, AchievedRate, CheckMode, CodeError, FeasibilityReport,
    FeasibilityTarget, SharedCode,
};
use crate::graph::{InstanceError, NetworkInstance, RateVector, VertexId};
use crate::rational::Rational;
use crate::transforms::chain::{run_chain, ChainError, ChainStep};
use crate::transforms::{code_error_kind, TransformError};

mod bridge;
mod region;

pub use bridge::{bridge_decompose, BridgeDecomposition, BridgeOptions, SideDecomposition, SimulatedCode};
pub use region::{rate_region_micro, RegionLimits, RegionReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Transform(Box<TransformError>),
    #[error(transparent)]
    Chain(Box<ChainError>),
    #[error("edge ({0}, {1}) is already present")]
    EdgePresent(String, String),
    #[error("({0}, {1}) does not join two components")]
    NotABridge(String, String),
    #[error("({0}, {1}) is not a path case")]
    NotPathCase(String, String),
    #[error("enumeration of {what} too large: {size} exceeds limit {limit}")]
    EnumerationTooLarge {
        what: String,
        size: String,
        limit: String,
    },
}

impl From<TransformError> for AnalysisError {
    fn from(e: TransformError) -> Self {
        AnalysisError::Transform(Box::new(e))
    }
}

impl From<ChainError> for AnalysisError {
    fn from(e: ChainError) -> Self {
        AnalysisError::Chain(Box::new(e))
    }
}

impl AnalysisError {
    pub fn kind(&self) -> String {
        match self {
            AnalysisError::Instance(e) => e.kind().to_string(),
            AnalysisError::Code(e) => code_error_kind(e).to_string(),
            AnalysisError::Transform(e) => e.kind(),
            AnalysisError::Chain(e) => e.error.kind(),
            AnalysisError::EdgePresent(..) => "EdgePresent".into(),
            AnalysisError::NotABridge(..) => "NotABridge".into(),
            AnalysisError::NotPathCase(..) => "NotPathCase".into(),
            AnalysisError::EnumerationTooLarge { .. } => "EnumerationTooLarge".into(),
        }
    }

    /// True when the failure is a size limit rather than bad input.
    pub fn is_resource_limit(&self) -> bool {
        let code_limit =
            |e: &CodeError| matches!(e, CodeError::EnumerationTooLarge { .. } | CodeError::TableTooLarge(_));
        let transform_limit = |e: &TransformError| matches!(e, TransformError::Code(c) if code_limit(c));
        match self {
            AnalysisError::EnumerationTooLarge { .. } => true,
            AnalysisError::Code(e) => code_limit(e),
            AnalysisError::Transform(e) => transform_limit(e),
            AnalysisError::Chain(e) => transform_limit(&e.error),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeClass {
    /// `u` and `u'` lie in different components; each component sorted by vertex order.
    Bridge {
        component_u: Vec<VertexId>,
        component_u2: Vec<VertexId>,
    },
    /// `u` and `u'` are already connected; a widest path and its bottleneck.
    PathCase { path: Vec<VertexId>, gamma: Rational },
}

/// Bridge or path case for adding `(u, u2)` to `inst`.
pub fn classify_edge(inst: &NetworkInstance, u: &str, u2: &str) -> Result<EdgeClass, AnalysisError> {
    let a = inst.require_vertex(u)?;
    let b = inst.require_vertex(u2)?;
    if a == b {
        return Err(InstanceError::SelfLoop(u.to_string()).into());
    }
    if inst.edge_between(a, b).is_some() {
        return Err(AnalysisError::EdgePresent(u.to_string(), u2.to_string()));
    }
    let comps = inst.connected_components();
    let find = |v: VertexId| comps.iter().find(|c| c.contains(&v)).cloned().unwrap_or_default();
    let (ca, cb) = (find(a), find(b));
    if ca != cb {
        return Ok(EdgeClass::Bridge {
            component_u: ca,
            component_u2: cb,
        });
    }
    let (path, gamma) = inst.widest_path(a, b)?;
    Ok(EdgeClass::PathCase { path, gamma })
}

/// One edge of the chosen path and its domination check `alpha (gamma' + lambda) <= gamma'`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathEdgeCheck {
    pub a: String,
    pub b: String,
    pub capacity: Rational,
    pub scaled: Rational,
    pub dominated: bool,
}

/// Path-case quantities, all exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathCaseBound {
    pub path: Vec<String>,
    /// Number of nodes on the path.
    pub ell: usize,
    pub gamma: Rational,
    pub delta: Rational,
    pub alpha: Rational,
    /// `delta / (1 + delta)`: fraction of each rate lost to scaling.
    pub loss_factor: Rational,
    /// `delta / (1 + delta) (W + lambda)`, using `max R_i <= W + lambda`.
    pub loss_from_max_rate: Rational,
    /// `delta (W + lambda)`.
    pub loss_relaxed: Rational,
    /// `2 delta W`.
    pub loss_total: Rational,
    /// `(2W / gamma) lambda`.
    pub loss_gamma: Rational,
    /// `delta / (1 + delta) max_i R_i` when rates are supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss_from_rates: Option<Rational>,
    pub path_edges: Vec<PathEdgeCheck>,
    pub all_dominated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossDemand {
    pub source: usize,
    pub terminal: usize,
    /// Cut bound between the source and terminal nodes with the edge present.
    pub cut_bound: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<Rational>,
    /// `R_i <= lambda`, when a rate is given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_bound: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BridgeCase {
    pub component_u: Vec<String>,
    pub component_u2: Vec<String>,
    pub cross_demands: Vec<CrossDemand>,
    pub cut_violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RemovalReport {
    pub edge: [String; 2],
    pub lambda: Rational,
    pub case: String,
    #[serde(rename = "W")]
    pub total: Rational,
    #[serde(rename = "w", skip_serializing_if = "Option::is_none")]
    pub min: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Rational>,
    pub f_lambda: Rational,
    /// `lambda > W`: every rate is at most `2 lambda`, so `f = 2 lambda`.
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<Rational>>,
    /// `(R_i - f)^+` per source, when rates are supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduced_rates: Option<Vec<Rational>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path_case: Option<PathCaseBound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bridge: Option<BridgeCase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
}

fn names(inst: &NetworkInstance, vs: &[VertexId]) -> Vec<String> {
    vs.iter().map(|&v| inst.name(v).to_string()).collect()
}

/// `W` of `inst`, or zero without edges.
fn total_capacity(inst: &NetworkInstance) -> Rational {
    inst.edges().iter().map(|e| &e.capacity).sum()
}

/// Path-case bound for adding `(u, u2)` with capacity `lambda` to `inst`.
pub fn path_case_bound(
    inst: &NetworkInstance,
    u: &str,
    u2: &str,
    lambda: &Rational,
) -> Result<PathCaseBound, AnalysisError> {
    let (path, gamma) = match classify_edge(inst, u, u2)? {
        EdgeClass::PathCase { path, gamma } => (path, gamma),
        EdgeClass::Bridge { .. } => return Err(AnalysisError::NotPathCase(u.into(), u2.into())),
    };
    let one = Rational::one();
    let two = Rational::from_integer(2);
    let total = total_capacity(inst);
    let delta = lambda / &gamma;
    let alpha = (&one + &delta).recip();
    let loss_factor = &delta / (&one + &delta);
    let path_edges: Vec<PathEdgeCheck> = path
        .windows(2)
        .map(|hop| {
            let e = inst.edge_between(hop[0], hop[1]).expect("path follows edges");
            let capacity = inst.edge(e).capacity.clone();
            let scaled = &alpha * (&capacity + lambda);
            PathEdgeCheck {
                a: inst.name(hop[0]).to_string(),
                b: inst.name(hop[1]).to_string(),
                dominated: scaled <= capacity,
                capacity,
                scaled,
            }
        })
        .collect();
    Ok(PathCaseBound {
        ell: path.len(),
        path: names(inst, &path),
        loss_from_max_rate: &loss_factor * (&total + lambda),
        loss_relaxed: &delta * (&total + lambda),
        loss_total: &two * &delta * &total,
        loss_gamma: &two * &total / &gamma * lambda,
        loss_from_rates: None,
        all_dominated: path_edges.iter().all(|p| p.dominated),
        path_edges,
        gamma,
        delta,
        alpha,
        loss_factor,
    })
}

/// Per-source outcome of the constructive chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceRate {
    pub source: usize,
    pub base: AchievedRate,
    pub achieved: AchievedRate,
    /// `alpha N / (N + ell)` times the base rate bounds.
    pub predicted: [Rational; 2],
    pub meets_prediction: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meets_reduced_rate: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verification {
    pub chain: Vec<ChainStep>,
    pub base_check: FeasibilityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_check: Option<FeasibilityReport>,
    /// `alpha N / (N + ell)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_factor: Option<Rational>,
    /// `n / (alpha ceil(n / alpha))`: achieved over predicted rate, for every
    /// source with more than one message.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_ratio: Option<Rational>,
    pub sources: Vec<SourceRate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bridge: Option<BridgeDecomposition>,
    pub pass: bool,
}

/// Optional code to verify against: a code on the instance with the edge added,
/// and the enumeration limit for every exhaustive check.
#[derive(Debug, Clone)]
pub struct VerifyInput {
    pub code: SharedCode,
    pub limit: u64,
}

/// Analyzes adding edge `(u, u2)` of capacity `lambda` to `inst`.
pub fn edge_removal_report(
    inst: &NetworkInstance,
    u: &str,
    u2: &str,
    lambda: &Rational,
    rates: Option<&RateVector>,
    verify: Option<&VerifyInput>,
) -> Result<RemovalReport, AnalysisError> {
    let class = classify_edge(inst, u, u2)?;
    let with_edge = inst.add_edge(u, u2, lambda)?;
    let total = total_capacity(inst);
    let constant = inst.removal_constant().ok();
    let degenerate = *lambda > total;
    let two = Rational::from_integer(2);
    let mut report = RemovalReport {
        edge: [u.to_string(), u2.to_string()],
        lambda: lambda.clone(),
        case: String::new(),
        total: total.clone(),
        min: constant.as_ref().map(|c| c.min.clone()),
        c: constant.as_ref().map(|c| c.c.clone()),
        f_lambda: Rational::zero(),
        degenerate: false,
        rates: rates.map(|r| r.rates().to_vec()),
        reduced_rates: None,
        path_case: None,
        bridge: None,
        verification: None,
    };
    if let Some(r) = rates {
        if r.rates().len() != inst.sources().len() {
            return Err(InstanceError::BadRates(format!(
                "{} rates for {} sources",
                r.rates().len(),
                inst.sources().len()
            ))
            .into());
        }
    }
    match class {
        EdgeClass::Bridge {
            component_u,
            component_u2,
        } => {
            report.case = "bridge".into();
            report.f_lambda = lambda.clone();
            let in_u: Vec<bool> = (0..inst.num_vertices()).map(|v| component_u.contains(&v)).collect();
            let in_u2: Vec<bool> = (0..inst.num_vertices()).map(|v| component_u2.contains(&v)).collect();
            let mut cross = Vec::new();
            for (i, &s) in inst.sources().iter().enumerate() {
                for (j, &d) in inst.terminals().iter().enumerate() {
                    let crosses = (in_u[s] && in_u2[d]) || (in_u2[s] && in_u[d]);
                    if !inst.demand()[i][j] || !crosses {
                        continue;
                    }
                    let rate = rates.map(|r| r.rates()[i].clone());
                    cross.push(CrossDemand {
                        source: i,
                        terminal: j,
                        cut_bound: with_edge.cut_bound(&[s], &[d])?,
                        within_bound: rate.as_ref().map(|r| r <= lambda),
                        rate,
                    });
                }
            }
            report.bridge = Some(BridgeCase {
                component_u: names(inst, &component_u),
                component_u2: names(inst, &component_u2),
                cut_violations: cross.iter().filter(|c| c.within_bound == Some(false)).count(),
                cross_demands: cross,
            });
        }
        EdgeClass::PathCase { .. } => {
            report.case = "path".into();
            let mut bound = path_case_bound(inst, u, u2, lambda)?;
            if let Some(r) = rates {
                let max = r.rates().iter().cloned().max().unwrap_or_else(Rational::zero);
                bound.loss_from_rates = Some(&bound.loss_factor * &max);
            }
            report.degenerate = degenerate;
            report.f_lambda = if degenerate {
                &two * lambda
            } else {
                constant.as_ref().map(|c| &c.c * lambda).expect("path case has edges")
            };
            report.path_case = Some(bound);
        }
    }
    if let Some(r) = rates {
        report.reduced_rates = Some(
            r.rates()
                .iter()
                .map(|x| x.saturating_sub(&report.f_lambda))
                .collect(),
        );
    }
    if let Some(v) = verify {
        report.verification = Some(verify_removal(inst, &with_edge, u, u2, &report, v)?);
    }
    Ok(report)
}

fn verify_removal(
    inst: &NetworkInstance,
    with_edge: &NetworkInstance,
    u: &str,
    u2: &str,
    report: &RemovalReport,
    input: &VerifyInput,
) -> Result<Verification, AnalysisError> {
    let code = input.code.clone();
    let mode = CheckMode::Exhaustive { limit: input.limit };
    let base_check = check_feasibility(code.as_ref(), with_edge, &FeasibilityTarget::zero_error(), mode)?;
    let base_rates = achieved_rates(code.as_ref());
    let reduced = report.reduced_rates.as_ref();
    let Some(bound) = &report.path_case else {
        let decomposition = bridge_decompose(
            with_edge,
            u,
            u2,
            code,
            &BridgeOptions {
                limit: input.limit,
                samples: None,
            },
        )?;
        let pass = decomposition.sides.iter().all(|s| {
            s.traces_match && s.overall_error.as_ref().is_none_or(|e| s.conditional_error <= *e)
        });
        return Ok(Verification {
            chain: Vec::new(),
            base_check,
            final_check: None,
            rate_factor: None,
            rate_ratio: None,
            sources: Vec::new(),
            bridge: Some(decomposition),
            pass,
        });
    };
    let steps = vec![
        ChainStep::new("interleave", serde_json::json!({})),
        ChainStep::new("pipeline_path", serde_json::json!({"edge": [u, u2], "ell": bound.ell})),
        ChainStep::new("rehost_path", serde_json::json!({"path": bound.path})),
        ChainStep::new(
            "scale",
            serde_json::json!({"alpha": bound.alpha.recip().to_string(), "target": "base"}),
        ),
    ];
    let (state, resolved) = run_chain(code.clone(), with_edge, &steps)?;
    debug_assert!(state.inst == *inst);
    let big_n = code.outer_blocklength();
    let eps = (Rational::from(big_n) * &base_check.measured_error).min(Rational::one());
    let final_check = check_feasibility(
        state.code.as_ref(),
        inst,
        &FeasibilityTarget::with_epsilon(eps),
        mode,
    )?;
    let ell = Rational::from(bound.ell);
    let n_big = Rational::from(big_n);
    let rate_factor = &bound.alpha * &n_big / (&n_big + &ell);
    let n = code.inner_blocklength();
    let rate_ratio = Rational::from(n) / (&bound.alpha * Rational::from(state.code.inner_blocklength()));
    let achieved = achieved_rates(state.code.as_ref());
    let sources: Vec<SourceRate> = base_rates
        .into_iter()
        .zip(achieved)
        .enumerate()
        .map(|(i, (base, achieved))| {
            let single = base.message_size == "1";
            SourceRate {
                source: i,
                predicted: [&rate_factor * &base.lower, &rate_factor * &base.upper],
                meets_prediction: single || rate_ratio >= Rational::one(),
                meets_reduced_rate: reduced.map(|r| achieved.lower >= r[i]),
                base,
                achieved,
            }
        })
        .collect();
    let pass = final_check.pass && sources.iter().all(|s| s.meets_prediction);
    Ok(Verification {
        chain: resolved,
        base_check,
        final_check: Some(final_check),
        rate_factor: Some(rate_factor),
        rate_ratio: Some(rate_ratio),
        sources,
        bridge: None,
        pass,
    })
}
