use serde::{Deserialize, Serialize};

use super::outer::{nearest_codeword_decode, OuterCodeFamily, OuterCodeSpec, PermutationSet};
use super::repeat::{parallel_repeat, RepeatedCode};
use super::TransformError;
use crate::code::{
    check_feasibility, compose, CheckMode, Direction, FeasibilityReport, FeasibilityTarget,
    InfoState, NetworkCode, SharedCode, Split,
};
use crate::graph::{EdgeId, NetworkInstance};
use crate::rational::Rational;

/// Whether `amplify` insists on outer distance `d >= 4 ceil(eps m) + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistancePolicy {
    #[default]
    Strict,
    Unchecked,
}

/// `m` sessions of a base code carrying outer-code symbols: each source
/// encodes its message with an outer code, permutes coordinate `j` with
/// `sigma_ij` and feeds it to session `j`. Terminals undo the permutations and
/// decode to the nearest codeword.
#[derive(Debug, Clone)]
pub struct AmplifiedCode {
    inner: RepeatedCode,
    specs: Vec<OuterCodeSpec>,
    perms: PermutationSet,
    sizes: Vec<u64>,
    demands: Vec<Vec<usize>>,
}

/// Smallest distance the outer code needs to absorb a base error `eps`.
pub fn required_distance(eps: &Rational, m: usize) -> u64 {
    let failures = (eps * Rational::from(m)).ceil();
    4 * u64::try_from(failures).unwrap_or(u64::MAX / 8) + 1
}

#[allow(clippy::too_many_arguments)]
pub fn amplify(
    base: SharedCode,
    inst: &NetworkInstance,
    m: usize,
    family: OuterCodeFamily,
    rate: Option<&Rational>,
    base_eps: &Rational,
    policy: DistancePolicy,
    seed: u64,
) -> Result<AmplifiedCode, TransformError> {
    let specs = base
        .message_sizes()
        .iter()
        .map(|&q| match family {
            OuterCodeFamily::Repetition => OuterCodeSpec::repetition(q, m),
            OuterCodeFamily::ReedSolomon => {
                let rate = rate.ok_or_else(|| {
                    TransformError::BadParameter("reed_solomon needs a rate".into())
                })?;
                OuterCodeSpec::reed_solomon(q, m, rate)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    if policy == DistancePolicy::Strict {
        let required = required_distance(base_eps, m);
        if let Some(s) = specs.iter().find(|s| s.d < required) {
            return Err(TransformError::DistanceTooSmall { d: s.d, required });
        }
    }
    let sizes = specs
        .iter()
        .map(OuterCodeSpec::messages)
        .collect::<Result<Vec<_>, _>>()?;
    let perms = PermutationSet::generate(seed, base.message_sizes(), m)?;
    let inner = parallel_repeat(base, inst, m)?;
    Ok(AmplifiedCode {
        inner,
        specs,
        perms,
        sizes,
        demands: (0..inst.terminals().len())
            .map(|j| inst.demanded_by(j))
            .collect(),
    })
}

impl AmplifiedCode {
    pub fn seed(&self) -> u64 {
        self.perms.seed
    }

    pub fn specs(&self) -> &[OuterCodeSpec] {
        &self.specs
    }

    pub fn sessions(&self) -> usize {
        self.inner.sessions()
    }

    /// The repeated-code message carrying outer message `w` of source `i`.
    fn session_message(&self, i: usize, w: u64) -> u64 {
        let spec = &self.specs[i];
        let digits: Vec<u64> = spec
            .encode(w)
            .into_iter()
            .enumerate()
            .map(|(j, c)| self.perms.apply(i, j, c))
            .collect();
        compose(&digits, &vec![spec.q; spec.m])
    }

    fn inner_state(&self, state: &InfoState) -> InfoState {
        InfoState {
            own: state
                .own
                .iter()
                .map(|&(i, w)| (i, self.session_message(i, w)))
                .collect(),
            ..state.clone()
        }
    }

    /// Decoder outputs of each session, before the outer decoder.
    pub fn session_outputs(&self, terminal: usize, state: &InfoState) -> Vec<Vec<u64>> {
        self.inner
            .decode_sessions(terminal, &self.inner_state(state))
    }
}

impl NetworkCode for AmplifiedCode {
    fn inner_blocklength(&self) -> u64 {
        self.inner.inner_blocklength()
    }

    fn outer_blocklength(&self) -> usize {
        self.inner.outer_blocklength()
    }

    fn message_sizes(&self) -> &[u64] {
        &self.sizes
    }

    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    fn num_terminals(&self) -> usize {
        self.inner.num_terminals()
    }

    fn split(&self, edge: EdgeId, t: usize) -> Split {
        self.inner.split(edge, t)
    }

    fn encode(&self, edge: EdgeId, t: usize, dir: Direction, state: &InfoState) -> u64 {
        self.inner.encode(edge, t, dir, &self.inner_state(state))
    }

    fn decode(&self, terminal: usize, state: &InfoState) -> Vec<u64> {
        let sessions = self.session_outputs(terminal, state);
        self.demands[terminal]
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                let word: Vec<u64> = sessions
                    .iter()
                    .enumerate()
                    .map(|(j, out)| self.perms.invert(i, j, out.get(k).copied().unwrap_or(0)))
                    .collect();
                nearest_codeword_decode(&word, &self.specs[i])
            })
            .collect()
    }

    fn kind(&self) -> String {
        format!("amplify({}, seed={})", self.inner.kind(), self.perms.seed)
    }
}

/// Outcome of the permutation-seed search.
#[derive(Debug, Clone)]
pub struct AmplifySearch {
    pub code: AmplifiedCode,
    pub report: FeasibilityReport,
    pub seed: u64,
    pub attempts: u64,
}

/// Tries seeds `first_seed, first_seed + 1, ...` until the amplified code's
/// measured error is strictly below `accept_below`.
#[allow(clippy::too_many_arguments)]
pub fn amplify_search(
    base: SharedCode,
    inst: &NetworkInstance,
    m: usize,
    family: OuterCodeFamily,
    rate: Option<&Rational>,
    base_eps: &Rational,
    policy: DistancePolicy,
    first_seed: u64,
    max_attempts: u64,
    mode: CheckMode,
    accept_below: &Rational,
) -> Result<AmplifySearch, TransformError> {
    let target = FeasibilityTarget::with_epsilon(accept_below.clone());
    for attempt in 0..max_attempts {
        let seed = first_seed.wrapping_add(attempt);
        let code = amplify(base.clone(), inst, m, family, rate, base_eps, policy, seed)?;
        let report = check_feasibility(&code, inst, &target, mode)?;
        if report.measured_error < *accept_below {
            return Ok(AmplifySearch {
                code,
                report,
                seed,
                attempts: attempt + 1,
            });
        }
    }
    Err(TransformError::NoGoodSeed {
        tried: max_attempts,
    })
}
