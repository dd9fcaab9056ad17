//! The learner: prefix tree, then ordered state merging.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::merge::{try_merge_with, MergeContext, MergeOutcome, PushBack, Rejection};
use crate::ptree::{build_prefix_tree, PTreeAnnotation, SampleSet};
use crate::transducer::{StateId, Transducer, Transition};
use crate::words::lex_len_cmp;

/// How states sharing an access input are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Length-lexicographic on the output accumulated on the way in.
    #[default]
    OutputLexLen,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearnerConfig {
    /// Number of full sweeps over the state order. Further sweeps only run
    /// while the previous one merged something.
    pub max_merge_passes: usize,
    pub tie_break: TieBreak,
    pub emit_trace: bool,
    /// Keep machine snapshots around push-backs in the trace.
    pub audit_push_backs: bool,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            max_merge_passes: 1,
            tie_break: TieBreak::OutputLexLen,
            emit_trace: false,
            audit_push_backs: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    Merged {
        keep: StateId,
        drop: StateId,
        forced: Vec<(StateId, StateId)>,
        push_log: Vec<PushBack>,
        states_after: usize,
    },
    Rejected {
        keep: StateId,
        drop: StateId,
        reason: Rejection,
    },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Merged {
                keep,
                drop,
                forced,
                push_log,
                states_after,
            } => write!(
                f,
                "merge {keep} <- {drop}: ok, {} forced, {} push-backs, {states_after} states",
                forced.len(),
                push_log.len()
            ),
            TraceEvent::Rejected { keep, drop, reason } => {
                write!(f, "merge {keep} <- {drop}: rejected, {reason}")
            }
        }
    }
}

/// A learned machine plus the output for the empty input, which the
/// machine itself cannot carry without state outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearnedModel {
    pub machine: Transducer,
    pub epsilon_output: Option<String>,
    pub trace: Vec<TraceEvent>,
}

impl LearnedModel {
    /// Outputs for `input`. The empty input is answered from the sidecar when
    /// the samples fixed it, and by the machine otherwise.
    pub fn transduce(&self, input: &str) -> Result<std::collections::BTreeSet<String>> {
        match (&self.epsilon_output, input.is_empty()) {
            (Some(z), true) => Ok([z.clone()].into()),
            _ => self.machine.transduce(input),
        }
    }
}

/// Removes the pair with empty input from `raw`. If there is one, `(ε, ε)`
/// takes its place so the machine still accepts the empty input, and its
/// output is returned separately.
pub fn split_epsilon<I, A, B>(raw: I) -> Result<(SampleSet, Option<String>)>
where
    I: IntoIterator<Item = (A, B)>,
    A: Into<String>,
    B: Into<String>,
{
    let mut samples = SampleSet::new();
    let mut eps: Option<String> = None;
    for (i, o) in raw {
        let (i, o): (String, String) = (i.into(), o.into());
        if i.is_empty() {
            match &eps {
                Some(prev) if *prev != o => {
                    return Err(Error::FunctionalConflict {
                        input: i,
                        first: prev.clone(),
                        second: o,
                    })
                }
                _ => eps = Some(o),
            }
        } else {
            samples.insert(i, o)?;
        }
    }
    if eps.is_some() {
        samples.insert("", "")?;
    }
    Ok((samples, eps))
}

/// Prefix-tree states in merge order: by access input, then by the output
/// read on the way in, both length-lexicographic.
pub fn state_order(ann: &PTreeAnnotation, tie_break: TieBreak) -> Vec<StateId> {
    let mut order: Vec<StateId> = ann.states.keys().copied().collect();
    order.sort_by(|&p, &q| {
        let (a, b) = (&ann.states[&p], &ann.states[&q]);
        let by_input = lex_len_cmp(&a.input, &b.input);
        let by_output = match tie_break {
            TieBreak::OutputLexLen => lex_len_cmp(&a.output, &b.output),
        };
        by_input.then(by_output).then(p.cmp(&q))
    });
    order
}

fn renumber(t: &Transducer, order: &[StateId]) -> Transducer {
    let rank: BTreeMap<StateId, StateId> = order
        .iter()
        .enumerate()
        .map(|(i, &q)| (q, StateId(i as u32)))
        .collect();
    let mut out = Transducer::new(rank[&t.initial()])
        .with_input_alphabet(t.input_alphabet().iter().copied())
        .with_output_alphabet(t.output_alphabet().iter().copied());
    for &q in order {
        out.add_state(rank[&q]);
        out.set_accepting(rank[&q], t.is_accepting(q));
    }
    let mut edges: Vec<Transition> = t
        .transitions()
        .iter()
        .map(|e| Transition::new(rank[&e.src], e.symbol, rank[&e.dst], e.output.clone()))
        .collect();
    edges.sort_by_key(|e| (e.src, e.dst));
    for e in edges {
        out.push_transition(e);
    }
    out
}

/// Learns from a sample set that may already contain `(ε, ε)`.
pub fn infer_samples(
    samples: &SampleSet,
    config: &LearnerConfig,
) -> Result<(Transducer, Vec<TraceEvent>)> {
    let tree = build_prefix_tree(samples)?;
    let order = state_order(&tree.annotation, config.tie_break);
    let mut h = renumber(&tree.machine, &order);
    let ids: Vec<StateId> = (0..order.len() as u32).map(StateId).collect();
    let mut trace = Vec::new();

    for _ in 0..config.max_merge_passes.max(1) {
        let mut changed = false;
        let mut ctx = MergeContext::new(&h).audited(config.audit_push_backs);
        for &q2 in &ids {
            if !h.contains_state(q2) {
                continue;
            }
            for &q1 in ids.iter().take_while(|&&q| q < q2) {
                if !h.contains_state(q1) {
                    continue;
                }
                match try_merge_with(&h, &mut ctx, q1, q2) {
                    MergeOutcome::Merged {
                        machine,
                        forced,
                        push_log,
                        ..
                    } => {
                        h = machine;
                        ctx = MergeContext::new(&h).audited(config.audit_push_backs);
                        changed = true;
                        if config.emit_trace {
                            trace.push(TraceEvent::Merged {
                                keep: q1,
                                drop: q2,
                                forced,
                                push_log,
                                states_after: h.num_states(),
                            });
                        }
                        break;
                    }
                    MergeOutcome::Rejected(reason) => {
                        if config.emit_trace {
                            trace.push(TraceEvent::Rejected {
                                keep: q1,
                                drop: q2,
                                reason,
                            });
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok((h.trim().renumbered(), trace))
}

/// Learns a transducer from raw input/output pairs.
pub fn infer<I, A, B>(raw: I, config: &LearnerConfig) -> Result<LearnedModel>
where
    I: IntoIterator<Item = (A, B)>,
    A: Into<String>,
    B: Into<String>,
{
    let (samples, epsilon_output) = split_epsilon(raw)?;
    let (machine, trace) = infer_samples(&samples, config)?;
    Ok(LearnedModel {
        machine,
        epsilon_output,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambiguity::ambiguity_witness;
    use std::collections::BTreeSet;

    #[test]
    fn split_epsilon_cases() {
        let (s, e) = split_epsilon([("", "x"), ("a", "y")]).unwrap();
        assert_eq!(e.as_deref(), Some("x"));
        assert!(s.contains("", ""));
        assert!(s.contains("a", "y"));
        let (s, e) = split_epsilon([("a", "y")]).unwrap();
        assert_eq!(e, None);
        assert!(!s.contains("", ""));
        assert!(split_epsilon([("", "x"), ("", "z")]).is_err());
        assert!(split_epsilon([("a", "x"), ("a", "z")]).is_err());
    }

    #[test]
    fn learns_copy_of_a_star() {
        let raw: Vec<(String, String)> = (0..4).map(|n| ("a".repeat(n), "x".repeat(n))).collect();
        let m = infer(raw, &LearnerConfig::default()).unwrap();
        assert_eq!(m.machine.num_states(), 1);
        assert_eq!(m.epsilon_output.as_deref(), Some(""));
        for n in 0..8 {
            assert_eq!(
                m.transduce(&"a".repeat(n)).unwrap(),
                BTreeSet::from(["x".repeat(n)])
            );
        }
    }

    #[test]
    fn state_order_breaks_ties_on_output() {
        let s = SampleSet::from_pairs([("a", "x"), ("ab", "yz")]).unwrap();
        let tree = build_prefix_tree(&s).unwrap();
        let order = state_order(&tree.annotation, TieBreak::OutputLexLen);
        let outs: Vec<&str> = order
            .iter()
            .map(|q| tree.annotation.states[q].output.as_str())
            .collect();
        assert_eq!(outs[0], "");
        assert_eq!(&outs[1..3], &["x", "yz"]);
    }

    #[test]
    fn output_is_consistent_and_unambiguous() {
        let raw = [
            ("a", "x"),
            ("b", "y"),
            ("ab", "xy"),
            ("ba", "yx"),
            ("aa", "xx"),
            ("bb", "yy"),
        ];
        let m = infer(
            raw,
            &LearnerConfig {
                emit_trace: true,
                ..Default::default()
            },
        )
        .unwrap();
        for (i, o) in raw {
            assert!(m.transduce(i).unwrap().contains(o), "{i}");
        }
        assert!(ambiguity_witness(&m.machine).is_none());
        assert!(!m.trace.is_empty());
    }

    #[test]
    fn state_count_never_grows() {
        let raw = [("a", "x"), ("aa", "y"), ("ab", "xz"), ("b", "w")];
        let m = infer(
            raw,
            &LearnerConfig {
                emit_trace: true,
                ..Default::default()
            },
        )
        .unwrap();
        let mut last = usize::MAX;
        for ev in &m.trace {
            if let TraceEvent::Merged { states_after, .. } = ev {
                assert!(*states_after < last);
                last = *states_after;
            }
        }
    }
}
