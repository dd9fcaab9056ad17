use thiserror::Error;

use crate::transducer::StateId;

/// Errors raised by the toolkit. Merge rejections are not errors; they are
/// reported as values by the merge module.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("symbol {0:?} is not in the input alphabet")]
    UnknownSymbol(char),

    #[error("input {input:?} has conflicting outputs {first:?} and {second:?}")]
    FunctionalConflict {
        input: String,
        first: String,
        second: String,
    },

    #[error("pair ({input:?}, {output:?}) cannot be stored: empty input must map to empty output")]
    EpsilonOutput { input: String, output: String },

    #[error("pair ({input:?}, {output:?}) cannot be represented by the prefix tree")]
    Inconsistent { input: String, output: String },

    #[error("reject symbol {0:?} already belongs to the output alphabet")]
    ReservedSymbol(char),

    #[error("longest common prefix of an empty set")]
    EmptyLcp,

    #[error("state {0} does not exist")]
    UnknownState(StateId),

    #[error("duplicate transition {src} -{symbol}-> {dst}")]
    DuplicateTransition {
        src: StateId,
        symbol: char,
        dst: StateId,
    },

    #[error("machine is not functional: input {input:?} yields {outputs:?}")]
    NotFunctional { input: String, outputs: Vec<String> },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
