use crate::code::{validate_code, CodeError, Direction, InfoState, NetworkCode, SharedCode, Split};
use crate::graph::{EdgeId, NetworkInstance};
use crate::rational::Rational;

/// A code for `alpha * I` run on `I` with inner blocklength `ceil(alpha n)`.
/// Everything except the inner blocklength is unchanged, so traces are identical.
#[derive(Debug, Clone)]
pub struct ScaledCode {
    base: SharedCode,
    n: u64,
}

/// Hosts `code`, valid on `alpha * target`, on `target`.
pub fn scale_code(
    code: SharedCode,
    target: &NetworkInstance,
    alpha: &Rational,
) -> Result<ScaledCode, CodeError> {
    let scaled = target
        .scale(alpha)
        .map_err(|e| CodeError::MalformedCode(e.to_string()))?;
    validate_code(code.as_ref(), &scaled)?;
    let n = (alpha * Rational::from(code.inner_blocklength())).ceil();
    let n: u64 = u64::try_from(&n)
        .map_err(|_| CodeError::Overflow(format!("inner blocklength {n}")))?;
    let out = ScaledCode { base: code, n };
    validate_code(&out, target)?;
    Ok(out)
}

impl ScaledCode {
    /// `n / ceil(alpha n)`: the factor applied to every rate.
    pub fn rate_factor(&self) -> Rational {
        crate::rational::ratio(self.base.inner_blocklength(), self.n)
    }
}

impl NetworkCode for ScaledCode {
    fn inner_blocklength(&self) -> u64 {
        self.n
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
        self.base.decode(terminal, state)
    }

    fn sub_block(&self) -> Option<usize> {
        self.base.sub_block()
    }

    fn kind(&self) -> String {
        format!("scale({}, n={})", self.base.kind(), self.n)
    }
}
