//! Learning nondeterministic functional transducers from input/output
//! samples by state merging.
//!
//! The learner builds an onward prefix tree from the samples, then tries to
//! merge states in length-lexicographic order. Every merge is checked for
//! ambiguity with a squared-automaton search; ambiguous path pairs are
//! unified by merging their states and pushing outputs back along single
//! incoming edges. Deterministic learners for acceptors and subsequential
//! transducers fall out as special cases.
//!
//! The [`oracle`] module holds brute-force counterparts of the main
//! algorithms for desk-scale verification.

pub mod ambiguity;
pub mod error;
pub mod infer;
pub mod merge;
pub mod oracle;
pub mod ptree;
pub mod random;
pub mod transducer;
pub mod transform;
pub mod words;

pub use ambiguity::{
    ambiguity_witness, find_ambiguity, merge_update, square_reach, AliasMap, AmbiguousPathPair,
    PairSearchState,
};
pub use error::{Error, Result};
pub use infer::{
    infer, infer_samples, split_epsilon, LearnedModel, LearnerConfig, TieBreak, TraceEvent,
};
pub use merge::{try_merge, try_merge_with, MergeContext, MergeOutcome, PushBack, Rejection};
pub use oracle::BoundedCheckReport;
pub use ptree::{PTreeAnnotation, PrefixTree, SampleSet};
pub use transducer::{Configuration, EdgeId, Path, StateId, Transducer, Transition};
