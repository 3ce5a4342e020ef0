//! Transform chains as data: an ordered list of `{op, params, seed}` steps
//! applied to a code and the instance it runs on.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{
    amplify, amplify_search, fresh_path, interleave, parallel_repeat, pipeline_path, reblock,
    rehost_path, scale_code, DistancePolicy, OuterCodeFamily, TransformError,
};
use crate::code::{check_feasibility, CheckMode, FeasibilityTarget, SharedCode};
use crate::graph::NetworkInstance;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub op: String,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub params: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ChainStep {
    pub fn new(op: &str, params: Value) -> Self {
        ChainStep {
            op: op.to_string(),
            params: params.as_object().cloned().unwrap_or_default(),
            seed: None,
        }
    }
}

/// Where a replacement path came from, kept so later steps can re-host and scale.
#[derive(Debug, Clone)]
pub struct PathOrigin {
    /// The instance that still had the edge.
    pub with_edge: NetworkInstance,
    pub u: String,
    pub u2: String,
    pub fresh: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ChainState {
    pub code: SharedCode,
    pub inst: NetworkInstance,
    pub origin: Option<PathOrigin>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("step {index} ({op}): {error}")]
pub struct ChainError {
    pub index: usize,
    pub op: String,
    pub error: Box<TransformError>,
}

fn param<'a>(step: &'a ChainStep, key: &str) -> Option<&'a Value> {
    step.params.get(key)
}

fn bad(msg: String) -> TransformError {
    TransformError::BadParameter(msg)
}

fn usize_param(step: &ChainStep, key: &str) -> Result<usize, TransformError> {
    param(step, key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| bad(format!("{} needs integer parameter {key:?}", step.op)))
}

fn rational_param(step: &ChainStep, key: &str) -> Result<Option<Rational>, TransformError> {
    match param(step, key) {
        None => Ok(None),
        Some(Value::String(s)) => s
            .parse()
            .map(Some)
            .map_err(|e| bad(format!("{key}: {e}"))),
        Some(Value::Number(n)) => n
            .as_i64()
            .map(|v| Some(Rational::from_integer(v)))
            .ok_or_else(|| bad(format!("{key}: expected an integer or \"p/q\""))),
        Some(_) => Err(bad(format!("{key}: expected an integer or \"p/q\""))),
    }
}

fn names_param(step: &ChainStep, key: &str) -> Result<Option<Vec<String>>, TransformError> {
    match param(step, key) {
        None => Ok(None),
        Some(v) => serde_json::from_value(v.clone())
            .map(Some)
            .map_err(|_| bad(format!("{key}: expected a list of vertex names"))),
    }
}

/// Parses `exhaustive` or `sampled:TRIALS:SEED`.
pub fn parse_mode(s: &str) -> Result<CheckMode, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["exhaustive"] => Ok(CheckMode::exhaustive()),
        ["exhaustive", limit] => limit
            .parse()
            .map(|limit| CheckMode::Exhaustive { limit })
            .map_err(|_| format!("bad enumeration limit {limit:?}")),
        ["sampled", trials, seed] => Ok(CheckMode::Sampled {
            trials: trials.parse().map_err(|_| format!("bad trial count {trials:?}"))?,
            seed: seed.parse().map_err(|_| format!("bad seed {seed:?}"))?,
        }),
        _ => Err(format!(
            "mode must be exhaustive or sampled:TRIALS:SEED, got {s:?}"
        )),
    }
}

/// Applies one step. Returns the new state and the step as actually run
/// (with any discovered seed filled in).
pub fn apply_step(state: ChainState, step: &ChainStep) -> Result<(ChainState, ChainStep), TransformError> {
    let ChainState { code, inst, origin } = state;
    let mut resolved = step.clone();
    let (code, inst, origin): (SharedCode, NetworkInstance, Option<PathOrigin>) = match step.op.as_str() {
        "parallel_repeat" => {
            let m = usize_param(step, "m")?;
            (Arc::new(parallel_repeat(code, &inst, m)?), inst, origin)
        }
        "interleave" => (Arc::new(interleave(code, &inst)?), inst, origin),
        "amplify" => {
            let m = usize_param(step, "m")?;
            let family: OuterCodeFamily = match param(step, "family") {
                None => OuterCodeFamily::Repetition,
                Some(v) => serde_json::from_value(v.clone())
                    .map_err(|_| bad("family must be repetition or reed_solomon".into()))?,
            };
            let policy: DistancePolicy = match param(step, "policy") {
                None => DistancePolicy::Strict,
                Some(v) => serde_json::from_value(v.clone())
                    .map_err(|_| bad("policy must be strict or unchecked".into()))?,
            };
            let rate = rational_param(step, "rate")?;
            let eps = match rational_param(step, "epsilon")? {
                Some(e) => e,
                None => {
                    let report = check_feasibility(
                        code.as_ref(),
                        &inst,
                        &FeasibilityTarget::zero_error(),
                        CheckMode::exhaustive(),
                    )?;
                    resolved.params.insert("epsilon".into(), json!(report.measured_error));
                    report.measured_error
                }
            };
            let attempts = param(step, "attempts").and_then(Value::as_u64).unwrap_or(1);
            let first = step.seed.unwrap_or(0);
            let amplified = if attempts > 1 {
                let mode = match param(step, "mode").and_then(Value::as_str) {
                    Some(s) => parse_mode(s).map_err(bad)?,
                    None => CheckMode::exhaustive(),
                };
                let accept = rational_param(step, "accept_below")?.unwrap_or_else(|| eps.clone());
                let found = amplify_search(
                    code, &inst, m, family, rate.as_ref(), &eps, policy, first, attempts, mode,
                    &accept,
                )?;
                found.code
            } else {
                amplify(code, &inst, m, family, rate.as_ref(), &eps, policy, first)?
            };
            resolved.seed = Some(amplified.seed());
            (Arc::new(amplified) as SharedCode, inst, origin)
        }
        "pipeline_path" => {
            let edge = names_param(step, "edge")?
                .filter(|e| e.len() == 2)
                .ok_or_else(|| bad("pipeline_path needs \"edge\": [u, u2]".into()))?;
            let ell = usize_param(step, "ell")?;
            let fresh = fresh_path(&inst, &edge[0], &edge[1], ell);
            let path_inst = inst.replace_edge_with_path(&edge[0], &edge[1], &fresh, true)?;
            let code = pipeline_path(code, &inst, &edge[0], &edge[1], &path_inst, ell)?;
            let origin = PathOrigin {
                with_edge: inst,
                u: edge[0].clone(),
                u2: edge[1].clone(),
                fresh,
            };
            (Arc::new(code) as SharedCode, path_inst, Some(origin))
        }
        "rehost_path" => {
            let o = origin
                .as_ref()
                .ok_or_else(|| bad("rehost_path must follow pipeline_path".into()))?;
            let path = match names_param(step, "path")? {
                Some(p) => p,
                None => {
                    let base = o.with_edge.without_edge(&o.u, &o.u2)?;
                    let (p, _) = base.widest_path(base.require_vertex(&o.u)?, base.require_vertex(&o.u2)?)?;
                    let names: Vec<String> = p.iter().map(|&v| base.name(v).to_string()).collect();
                    resolved.params.insert("path".into(), json!(names));
                    names
                }
            };
            let target = o.with_edge.replace_edge_with_path(&o.u, &o.u2, &path, false)?;
            let code = rehost_path(code, &inst, &o.fresh, &target, &path)?;
            (Arc::new(code) as SharedCode, target, origin)
        }
        "scale" => {
            let alpha = rational_param(step, "alpha")?
                .ok_or_else(|| bad("scale needs \"alpha\"".into()))?;
            let target = match param(step, "target").and_then(Value::as_str) {
                None => inst.scale(&alpha.recip())?,
                Some("base") => {
                    let o = origin
                        .as_ref()
                        .ok_or_else(|| bad("target \"base\" needs an earlier pipeline_path".into()))?;
                    o.with_edge.without_edge(&o.u, &o.u2)?
                }
                Some(other) => return Err(bad(format!("unknown scale target {other:?}"))),
            };
            (Arc::new(scale_code(code, &target, &alpha)?) as SharedCode, target, origin)
        }
        "reblock" => {
            let m = usize_param(step, "m")?;
            (Arc::new(reblock(code, &inst, m)?) as SharedCode, inst, origin)
        }
        other => return Err(bad(format!("unknown transform {other:?}"))),
    };
    Ok((ChainState { code, inst, origin }, resolved))
}

/// Runs every step in order.
pub fn run_chain(
    code: SharedCode,
    inst: &NetworkInstance,
    steps: &[ChainStep],
) -> Result<(ChainState, Vec<ChainStep>), ChainError> {
    let mut state = ChainState {
        code,
        inst: inst.clone(),
        origin: None,
    };
    let mut resolved = Vec::with_capacity(steps.len());
    for (index, step) in steps.iter().enumerate() {
        let (next, done) = apply_step(state, step).map_err(|error| ChainError {
            index,
            op: step.op.clone(),
            error: Box::new(error),
        })?;
        state = next;
        resolved.push(done);
    }
    Ok((state, resolved))
}
