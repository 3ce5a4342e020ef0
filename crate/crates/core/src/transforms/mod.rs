//! Code-to-code constructions. Each transform wraps its input code and
//! delegates encoding and decoding to it, so the output is a valid code on the
//! corresponding transformed instance.

use thiserror::Error;

use crate::code::CodeError;
use crate::graph::InstanceError;

mod amplify;
pub mod chain;
mod interleave;
mod outer;
mod pipeline;
mod reblock;
mod rehost;
mod repeat;
mod scale;

pub use amplify::{
    amplify, amplify_search, required_distance, AmplifiedCode, AmplifySearch, DistancePolicy,
};
pub use interleave::{interleave, InterleavedCode};
pub use outer::{nearest_codeword_decode, OuterCodeFamily, OuterCodeSpec, PermutationSet};
pub use pipeline::{fresh_path, pipeline_path, PipelinedCode};
pub use reblock::{reblock, ReblockedCode};
pub use rehost::{rehost, rehost_path, RehostedCode};
pub use repeat::{parallel_repeat, RepeatedCode};
pub use scale::{scale_code, ScaledCode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("outer code distance {d} is below the required {required}")]
    DistanceTooSmall { d: u64, required: u64 },
    #[error("Reed-Solomon needs a prime alphabet of size at least {m}, got {q}")]
    AlphabetTooSmallForRs { q: u64, m: usize },
    #[error("code is not interleaved: {0}")]
    NotInterleaved(String),
    #[error("bad path instance: {0}")]
    BadPathInstance(String),
    #[error("alphabet inclusion fails on edge {edge}: {detail}")]
    AlphabetInclusionFails { edge: usize, detail: String },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("no permutation seed met the target after {tried} attempts")]
    NoGoodSeed { tried: u64 },
}

impl TransformError {
    /// Stable variant name used in machine-readable error output.
    pub fn kind(&self) -> String {
        match self {
            TransformError::Code(e) => code_error_kind(e).to_string(),
            TransformError::Instance(e) => e.kind().to_string(),
            TransformError::DistanceTooSmall { .. } => "DistanceTooSmall".into(),
            TransformError::AlphabetTooSmallForRs { .. } => "AlphabetTooSmallForRS".into(),
            TransformError::NotInterleaved(_) => "NotInterleaved".into(),
            TransformError::BadPathInstance(_) => "BadPathInstance".into(),
            TransformError::AlphabetInclusionFails { .. } => "AlphabetInclusionFails".into(),
            TransformError::BadParameter(_) => "BadParameter".into(),
            TransformError::NoGoodSeed { .. } => "NoGoodSeed".into(),
        }
    }
}

/// Stable variant name of a [`CodeError`].
pub fn code_error_kind(e: &CodeError) -> &'static str {
    match e {
        CodeError::InstanceMismatch { .. } => "InstanceMismatch",
        CodeError::SplitCapacityViolation { .. } => "SplitCapacityViolation",
        CodeError::EmptyAlphabet { .. } => "EmptyAlphabet",
        CodeError::SymbolOutOfRange { .. } => "SymbolOutOfRange",
        CodeError::MessageOutOfRange { .. } => "MessageOutOfRange",
        CodeError::EnumerationTooLarge { .. } => "EnumerationTooLarge",
        CodeError::RateMismatch { .. } => "RateMismatch",
        CodeError::CapacityOverflow { .. } => "CapacityOverflow",
        CodeError::BadRoute(_) => "BadRoute",
        CodeError::Overflow(_) => "Overflow",
        CodeError::TableTooLarge(_) => "TableTooLarge",
        CodeError::MalformedCode(_) => "MalformedCode",
    }
}
