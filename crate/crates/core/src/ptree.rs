//! Sample sets and the onward prefix tree built from them.
//!
//! Each tree state `q_{i:o}` remembers the input prefix `i` and output prefix
//! `o` that lead to it, together with its residual: the part of the sample
//! set it is responsible for, with `(i, o)` stripped off.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::transducer::{StateId, Transducer, Transition};

/// A finite functional relation from input strings to output strings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SampleSet {
    pairs: BTreeMap<String, String>,
}

impl SampleSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a pair. Re-inserting an input with a different output is a
    /// functional conflict; an empty input may only map to the empty output.
    pub fn insert(&mut self, input: impl Into<String>, output: impl Into<String>) -> Result<()> {
        let (input, output) = (input.into(), output.into());
        if input.is_empty() && !output.is_empty() {
            return Err(Error::EpsilonOutput { input, output });
        }
        match self.pairs.get(&input) {
            Some(prev) if *prev != output => Err(Error::FunctionalConflict {
                first: prev.clone(),
                second: output,
                input,
            }),
            Some(_) => Ok(()),
            None => {
                self.pairs.insert(input, output);
                Ok(())
            }
        }
    }

    pub fn from_pairs<I, A, B>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let mut s = SampleSet::new();
        for (i, o) in pairs {
            s.insert(i, o)?;
        }
        Ok(s)
    }

    pub fn get(&self, input: &str) -> Option<&str> {
        self.pairs.get(input).map(String::as_str)
    }

    pub fn contains(&self, input: &str, output: &str) -> bool {
        self.get(input) == Some(output)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.pairs.iter().map(|(i, o)| (i.as_str(), o.as_str()))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn input_alphabet(&self) -> Vec<char> {
        let mut v: Vec<char> = self.pairs.keys().flat_map(|i| i.chars()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn output_alphabet(&self) -> Vec<char> {
        let mut v: Vec<char> = self.pairs.values().flat_map(|o| o.chars()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn max_input_len(&self) -> usize {
        self.pairs
            .keys()
            .map(|i| i.chars().count())
            .max()
            .unwrap_or(0)
    }

    pub fn max_output_len(&self) -> usize {
        self.pairs
            .values()
            .map(|o| o.chars().count())
            .max()
            .unwrap_or(0)
    }

    /// Pairs are kept functional by construction, so the raw map is enough
    /// for the derivative helpers below.
    fn insert_unchecked(&mut self, input: String, output: String) {
        self.pairs.insert(input, output);
    }
}

impl fmt::Display for SampleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, (i, o)) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({i:?},{o:?})")?;
        }
        write!(f, "}}")
    }
}

/// `{(σ', γ') : (σσ', γγ') ∈ s}` for a single input symbol `sigma`.
pub fn derivative(s: &SampleSet, sigma: char, gamma: &str) -> SampleSet {
    let mut out = SampleSet::new();
    for (i, o) in s.iter() {
        let mut chars = i.chars();
        if chars.next() != Some(sigma) {
            continue;
        }
        if let Some(rest) = o.strip_prefix(gamma) {
            out.insert_unchecked(chars.as_str().to_string(), rest.to_string());
        }
    }
    out
}

/// Derivative by a whole input word.
pub fn derivative_word(s: &SampleSet, input: &str, output: &str) -> SampleSet {
    let mut out = SampleSet::new();
    for (i, o) in s.iter() {
        if let (Some(ri), Some(ro)) = (i.strip_prefix(input), o.strip_prefix(output)) {
            out.insert_unchecked(ri.to_string(), ro.to_string());
        }
    }
    out
}

/// Longest common prefix of a non-empty collection of strings.
pub fn lcp<'a, I>(strings: I) -> Result<String>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut iter = strings.into_iter();
    let first = iter.next().ok_or(Error::EmptyLcp)?;
    let mut len = first.len();
    for s in iter {
        len = first
            .char_indices()
            .zip(s.chars())
            .take_while(|((_, a), b)| a == b)
            .last()
            .map_or(0, |((idx, a), _)| idx + a.len_utf8())
            .min(len);
    }
    Ok(first[..len].to_string())
}

/// Identity and residual of one prefix tree state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateInfo {
    pub input: String,
    pub output: String,
    pub residual: SampleSet,
}

/// Per-state annotation of a prefix tree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PTreeAnnotation {
    pub states: BTreeMap<StateId, StateInfo>,
}

impl PTreeAnnotation {
    pub fn get(&self, q: StateId) -> Option<&StateInfo> {
        self.states.get(&q)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixTree {
    pub machine: Transducer,
    pub annotation: PTreeAnnotation,
}

/// Builds the onward prefix tree of `s`.
///
/// Continuations that cannot ride on the exact-pair branch and whose
/// remaining output is empty are collected under a branch with empty output.
pub fn build_prefix_tree(s: &SampleSet) -> Result<PrefixTree> {
    build(s, true)
}

/// Same as [`build_prefix_tree`] but refuses samples that need an
/// empty-output branch, reporting the first offending pair.
pub fn build_prefix_tree_strict(s: &SampleSet) -> Result<PrefixTree> {
    build(s, false)
}

fn build(s: &SampleSet, allow_empty_branch: bool) -> Result<PrefixTree> {
    let sigma = s.input_alphabet();
    let root = StateId(0);
    let mut machine = Transducer::new(root)
        .with_input_alphabet(sigma.iter().copied())
        .with_output_alphabet(s.output_alphabet());
    let mut annotation = PTreeAnnotation::default();
    let mut next_id = 1u32;
    let mut queue = VecDeque::from([(root, String::new(), String::new(), s.clone())]);

    while let Some((q, i, o, residual)) = queue.pop_front() {
        if residual.contains("", "") {
            machine.set_accepting(q, true);
        }
        let mut children: Vec<(String, SampleSet)> = Vec::new();
        for &c in &sigma {
            let exact = residual.get(&c.to_string()).map(str::to_string);
            let mut exact_residual = SampleSet::new();
            let mut empty_group = SampleSet::new();
            let mut groups: BTreeMap<char, Vec<(String, String)>> = BTreeMap::new();
            for (inp, out) in residual.iter() {
                let mut chars = inp.chars();
                if chars.next() != Some(c) || chars.as_str().is_empty() {
                    continue;
                }
                let rest = chars.as_str().to_string();
                if let Some(a) = &exact {
                    if let Some(tail) = out.strip_prefix(a.as_str()) {
                        exact_residual.insert_unchecked(rest, tail.to_string());
                        continue;
                    }
                }
                match out.chars().next() {
                    Some(g) => groups.entry(g).or_default().push((rest, out.to_string())),
                    None => {
                        if !allow_empty_branch {
                            return Err(Error::Inconsistent {
                                input: format!("{i}{c}{rest}"),
                                output: o.clone(),
                            });
                        }
                        empty_group.insert_unchecked(rest, String::new());
                    }
                }
            }
            if let Some(a) = exact {
                exact_residual.insert_unchecked(String::new(), String::new());
                children.push((a, exact_residual));
            }
            if !empty_group.is_empty() {
                children.push((String::new(), empty_group));
            }
            for (_, members) in groups {
                let label = lcp(members.iter().map(|(_, out)| out.as_str()))?;
                let mut child = SampleSet::new();
                for (rest, out) in members {
                    child.insert_unchecked(rest, out[label.len()..].to_string());
                }
                children.push((label, child));
            }
            for (label, child) in children.drain(..) {
                let id = StateId(next_id);
                next_id += 1;
                machine.push_transition(Transition::new(q, c, id, label.clone()));
                queue.push_back((id, format!("{i}{c}"), format!("{o}{label}"), child));
            }
        }
        annotation.states.insert(
            q,
            StateInfo {
                input: i,
                output: o,
                residual,
            },
        );
    }
    Ok(PrefixTree {
        machine,
        annotation,
    })
}

/// One path per pair; the first transition of each path carries the whole
/// output and the remaining ones output nothing.
pub fn build_star(s: &SampleSet) -> Transducer {
    let mut t = Transducer::new(StateId(0))
        .with_input_alphabet(s.input_alphabet())
        .with_output_alphabet(s.output_alphabet());
    let mut next = 1u32;
    for (input, output) in s.iter() {
        if input.is_empty() {
            t.set_accepting(StateId(0), true);
            continue;
        }
        let mut q = StateId(0);
        for (n, c) in input.chars().enumerate() {
            let d = StateId(next);
            next += 1;
            let out = if n == 0 { output } else { "" };
            t.push_transition(Transition::new(q, c, d, out));
            q = d;
        }
        t.set_accepting(q, true);
    }
    t
}

/// For every two transitions leaving the same state over the same symbol:
/// exactly one of them leads to an accepting state, or neither does and
/// their outputs share no common prefix.
pub fn sibling_property_holds(t: &Transducer) -> bool {
    let index = t.out_index();
    index.values().all(|edges| {
        edges.iter().enumerate().all(|(n, &e1)| {
            edges[n + 1..].iter().all(|&e2| {
                let (a, b) = (&t.transitions()[e1], &t.transitions()[e2]);
                if a.symbol != b.symbol {
                    return true;
                }
                match (t.is_accepting(a.dst), t.is_accepting(b.dst)) {
                    (true, true) => false,
                    (false, false) => {
                        a.output.chars().next() != b.output.chars().next() || a.output.is_empty()
                    }
                    _ => true,
                }
            })
        })
    })
}
