//! Brute-force counterparts of the main algorithms. Everything here works by
//! enumerating words or paths up to a length bound, so it is only meant for
//! small machines.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::ptree::SampleSet;
use crate::transducer::{EdgeId, Path, StateId, Transducer, Transition};
use crate::words::words_up_to;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub input: String,
    /// Output sets involved, one per machine or one per path.
    pub outputs: Vec<BTreeSet<String>>,
    pub paths: Vec<Path>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedCheckReport {
    pub property: &'static str,
    pub bound: usize,
    pub verdict: bool,
    pub counterexample: Option<Counterexample>,
}

impl BoundedCheckReport {
    fn pass(property: &'static str, bound: usize) -> Self {
        BoundedCheckReport {
            property,
            bound,
            verdict: true,
            counterexample: None,
        }
    }

    fn fail(property: &'static str, bound: usize, c: Counterexample) -> Self {
        BoundedCheckReport {
            property,
            bound,
            verdict: false,
            counterexample: Some(c),
        }
    }
}

impl fmt::Display for BoundedCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} up to {}: {}",
            self.property,
            self.bound,
            if self.verdict { "holds" } else { "fails" }
        )?;
        if let Some(c) = &self.counterexample {
            write!(f, " at input {:?}", c.input)?;
            for o in &c.outputs {
                write!(f, " {o:?}")?;
            }
        }
        Ok(())
    }
}

fn alphabet(t: &Transducer) -> Vec<char> {
    t.input_alphabet().iter().copied().collect()
}

/// Compares the two relations on every input up to `max_len` over the union
/// of both input alphabets.
pub fn equivalent_up_to(a: &Transducer, b: &Transducer, max_len: usize) -> BoundedCheckReport {
    let sigma: Vec<char> = a
        .input_alphabet()
        .union(b.input_alphabet())
        .copied()
        .collect();
    for w in words_up_to(&sigma, max_len) {
        let (x, y) = (a.transduce_lenient(&w), b.transduce_lenient(&w));
        if x != y {
            return BoundedCheckReport::fail(
                "equivalence",
                max_len,
                Counterexample {
                    input: w,
                    outputs: vec![x, y],
                    paths: Vec::new(),
                },
            );
        }
    }
    BoundedCheckReport::pass("equivalence", max_len)
}

pub fn check_functional_up_to(t: &Transducer, max_len: usize) -> BoundedCheckReport {
    for w in words_up_to(&alphabet(t), max_len) {
        let out = t.transduce_lenient(&w);
        if out.len() > 1 {
            return BoundedCheckReport::fail(
                "functionality",
                max_len,
                Counterexample {
                    input: w,
                    outputs: vec![out],
                    paths: Vec::new(),
                },
            );
        }
    }
    BoundedCheckReport::pass("functionality", max_len)
}

/// Number of accepting paths over `input`, by counting paths into each state.
pub fn count_accepting_paths(t: &Transducer, input: &str) -> u64 {
    let mut counts: std::collections::BTreeMap<StateId, u64> = [(t.initial(), 1)].into();
    for c in input.chars() {
        let mut next = std::collections::BTreeMap::new();
        for e in t.transitions().iter().filter(|e| e.symbol == c) {
            if let Some(&n) = counts.get(&e.src) {
                *next.entry(e.dst).or_insert(0) += n;
            }
        }
        counts = next;
    }
    counts
        .iter()
        .filter(|(q, _)| t.is_accepting(**q))
        .map(|(_, n)| n)
        .sum()
}

/// The least input up to `max_len` with two or more accepting paths.
pub fn brute_force_ambiguous_input(t: &Transducer, max_len: usize) -> Option<String> {
    words_up_to(&alphabet(t), max_len)
        .into_iter()
        .find(|w| count_accepting_paths(t, w) >= 2)
}

pub fn check_unambiguous_up_to(t: &Transducer, max_len: usize) -> BoundedCheckReport {
    match brute_force_ambiguous_input(t, max_len) {
        None => BoundedCheckReport::pass("unambiguity", max_len),
        Some(w) => BoundedCheckReport::fail(
            "unambiguity",
            max_len,
            Counterexample {
                outputs: vec![t.transduce_lenient(&w)],
                input: w,
                paths: Vec::new(),
            },
        ),
    }
}

#[derive(Clone)]
struct PartialPath {
    edges: Vec<EdgeId>,
    output: String,
    end: StateId,
}

fn to_path(t: &Transducer, p: &PartialPath) -> Path {
    Path::new(
        t.initial(),
        p.edges
            .iter()
            .map(|&e| t.transitions()[e].clone())
            .collect(),
    )
}

/// Enumerates every pair of paths from the initial state whose inputs are
/// within `max_len` and checks that whenever one path's input and output
/// prefix the other's, it is a prefix-path of it.
pub fn check_local_prefix_preservation_up_to(t: &Transducer, max_len: usize) -> BoundedCheckReport {
    const NAME: &str = "local prefix preservation";
    let sigma = alphabet(t);
    let root = PartialPath {
        edges: Vec::new(),
        output: String::new(),
        end: t.initial(),
    };
    let mut stack = vec![(String::new(), vec![root])];
    while let Some((u, paths)) = stack.pop() {
        let k = u.chars().count();
        // A longer p2 passes through some same-input path p2'; if p1's output
        // prefixes p2's then p1's and p2''s outputs are prefix-comparable, so
        // comparing paths over the same input suffices.
        for p1 in &paths {
            for p2 in &paths {
                if p1.edges == p2.edges {
                    continue;
                }
                if p2.output.starts_with(p1.output.as_str()) {
                    return BoundedCheckReport::fail(
                        NAME,
                        max_len,
                        Counterexample {
                            input: u.clone(),
                            outputs: vec![
                                BTreeSet::from([p1.output.clone()]),
                                BTreeSet::from([p2.output.clone()]),
                            ],
                            paths: vec![to_path(t, p1), to_path(t, p2)],
                        },
                    );
                }
            }
        }
        if k == max_len {
            continue;
        }
        for &c in sigma.iter().rev() {
            let mut next = Vec::new();
            for p in &paths {
                for (id, e) in t.outgoing(p.end).filter(|(_, e)| e.symbol == c) {
                    let mut q = p.clone();
                    q.edges.push(id);
                    q.output.push_str(&e.output);
                    q.end = e.dst;
                    next.push(q);
                }
            }
            if !next.is_empty() {
                let mut w = u.clone();
                w.push(c);
                stack.push((w, next));
            }
        }
    }
    BoundedCheckReport::pass(NAME, max_len)
}

/// Lists `(input, output)` for every input up to `max_len` in the domain,
/// in length-lexicographic order.
pub fn generate_informant(t: &Transducer, max_len: usize) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for w in words_up_to(&alphabet(t), max_len) {
        let o = t.transduce_lenient(&w);
        match o.len() {
            0 => {}
            1 => out.push((w, o.into_iter().next().unwrap())),
            _ => {
                return Err(Error::NotFunctional {
                    input: w,
                    outputs: o.into_iter().collect(),
                })
            }
        }
    }
    Ok(out)
}

struct Enumerator {
    n: u32,
    accepting: Vec<bool>,
    samples: Vec<(Vec<char>, String)>,
    edges: Vec<Transition>,
}

impl Enumerator {
    fn machine(&self) -> Transducer {
        let mut t = Transducer::new(StateId(0));
        for q in 0..self.n {
            t.add_state(StateId(q));
            t.set_accepting(StateId(q), self.accepting[q as usize]);
        }
        for e in &self.edges {
            t.push_transition(e.clone());
        }
        t
    }

    /// Every sample up to `idx` still maps to exactly its output.
    fn exact_up_to(&self, idx: usize) -> bool {
        let t = self.machine();
        self.samples[..=idx].iter().all(|(i, o)| {
            let w: String = i.iter().collect();
            let out = t.transduce_lenient(&w);
            out.len() == 1 && out.contains(o)
        })
    }

    fn solve(&mut self, idx: usize) -> bool {
        if idx == self.samples.len() {
            return true;
        }
        let (input, output) = self.samples[idx].clone();
        self.explain(idx, &input, &output, 0, StateId(0), 0)
    }

    fn explain(
        &mut self,
        idx: usize,
        input: &[char],
        output: &str,
        k: usize,
        q: StateId,
        j: usize,
    ) -> bool {
        if k == input.len() {
            return self.accepting[q.0 as usize]
                && j == output.len()
                && self.exact_up_to(idx)
                && self.solve(idx + 1);
        }
        let c = input[k];
        let rest = &output[j..];
        let existing: Vec<Transition> = self
            .edges
            .iter()
            .filter(|e| e.src == q && e.symbol == c && rest.starts_with(e.output.as_str()))
            .cloned()
            .collect();
        for e in existing {
            if self.explain(idx, input, output, k + 1, e.dst, j + e.output.len()) {
                return true;
            }
        }
        let cuts: Vec<usize> = rest
            .char_indices()
            .map(|(i, _)| i)
            .chain(std::iter::once(rest.len()))
            .collect();
        for d in (0..self.n).map(StateId) {
            if self
                .edges
                .iter()
                .any(|e| e.src == q && e.symbol == c && e.dst == d)
            {
                continue;
            }
            for &cut in &cuts {
                self.edges.push(Transition::new(q, c, d, &rest[..cut]));
                if self.explain(idx, input, output, k + 1, d, j + cut) {
                    return true;
                }
                self.edges.pop();
            }
        }
        false
    }
}

/// The first machine, by number of states and then in depth-first search
/// order, that maps every sample input to exactly its output.
///
/// Only transitions used by some sample's accepting path are ever created,
/// and their outputs are factors of sample outputs; any consistent machine
/// keeps its consistency when stripped to such transitions.
pub fn enumerate_minimal_consistent(s: &SampleSet, max_states: usize) -> Option<Transducer> {
    let mut samples: Vec<(Vec<char>, String)> = s
        .iter()
        .map(|(i, o)| (i.chars().collect(), o.to_string()))
        .collect();
    samples.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(&b.0)));
    let sigma = s.input_alphabet();
    let gamma = s.output_alphabet();
    for n in 1..=max_states as u32 {
        for mask in 0u64..(1 << n) {
            let mut e = Enumerator {
                n,
                accepting: (0..n).map(|q| mask >> q & 1 == 1).collect(),
                samples: samples.clone(),
                edges: Vec::new(),
            };
            if e.solve(0) {
                let t = e.machine().trim();
                return Some(
                    t.with_input_alphabet(sigma.iter().copied())
                        .with_output_alphabet(gamma.iter().copied()),
                );
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equivalence_reflexive_and_trim_invariant() {
        let a = Transducer::build(
            0,
            &[1],
            &[(0, 'a', 1, "x"), (1, 'b', 1, "y"), (0, 'b', 2, "z")],
        );
        assert!(equivalent_up_to(&a, &a, 5).verdict);
        assert!(equivalent_up_to(&a, &a.trim(), 5).verdict);
    }

    #[test]
    fn equivalence_reports_least_difference() {
        let a = Transducer::build(
            0,
            &[3],
            &[
                (0, 'a', 1, "x"),
                (1, 'a', 2, "x"),
                (2, 'a', 3, "x"),
                (0, 'b', 3, "y"),
            ],
        );
        let b = Transducer::build(
            0,
            &[3],
            &[
                (0, 'a', 1, "x"),
                (1, 'a', 2, "x"),
                (2, 'a', 3, "z"),
                (0, 'b', 3, "y"),
            ],
        );
        let r = equivalent_up_to(&a, &b, 4);
        assert!(!r.verdict);
        let c = r.counterexample.unwrap();
        assert_eq!(c.input, "aaa");
        assert_eq!(
            c.outputs,
            vec![
                BTreeSet::from(["xxx".into()]),
                BTreeSet::from(["xxz".into()])
            ]
        );
    }

    #[test]
    fn functionality_checks() {
        let det = Transducer::build(0, &[0], &[(0, 'a', 0, "x")]);
        assert!(check_functional_up_to(&det, 5).verdict);
        let bad = Transducer::build(0, &[1, 2], &[(0, 'a', 1, "x"), (0, 'a', 2, "y")]);
        let r = check_functional_up_to(&bad, 3);
        assert!(!r.verdict);
        assert_eq!(r.counterexample.unwrap().input, "a");
    }

    #[test]
    fn local_prefix_preservation_checks() {
        let chain = Transducer::build(0, &[2], &[(0, 'a', 1, "x"), (1, 'b', 2, "y")]);
        assert!(check_local_prefix_preservation_up_to(&chain, 4).verdict);
        let bad = Transducer::build(
            0,
            &[2],
            &[(0, 'a', 1, ""), (0, 'a', 2, "x"), (1, 'a', 2, "y")],
        );
        let r = check_local_prefix_preservation_up_to(&bad, 3);
        assert!(!r.verdict);
        assert_eq!(r.counterexample.unwrap().input, "a");
        // diverging outputs keep the paths apart
        let ok = Transducer::build(
            0,
            &[1, 3],
            &[(0, 'a', 1, "x"), (0, 'a', 2, "yz"), (2, 'b', 3, "")],
        );
        assert!(check_local_prefix_preservation_up_to(&ok, 4).verdict);
    }

    #[test]
    fn lpp_violation_found_at_shortest_input() {
        let t = Transducer::build(
            0,
            &[3],
            &[
                (0, 'a', 1, "x"),
                (1, 'b', 3, "y"),
                (0, 'a', 2, "z"),
                (2, 'b', 4, "y"),
                (4, 'b', 3, ""),
            ],
        );
        assert!(check_local_prefix_preservation_up_to(&t, 3).verdict);
        let t = Transducer::build(
            0,
            &[3],
            &[
                (0, 'a', 1, "x"),
                (1, 'b', 3, "y"),
                (0, 'b', 2, ""),
                (2, 'b', 4, "x"),
                (4, 'a', 3, ""),
            ],
        );
        assert!(check_local_prefix_preservation_up_to(&t, 3).verdict);
        let t = Transducer::build(
            0,
            &[3],
            &[
                (0, 'a', 1, "x"),
                (1, 'b', 3, "y"),
                (0, 'a', 2, ""),
                (2, 'b', 3, "xy"),
            ],
        );
        let r = check_local_prefix_preservation_up_to(&t, 2);
        assert!(!r.verdict);
        assert_eq!(r.counterexample.unwrap().input, "a");
    }

    #[test]
    fn path_counting() {
        let t = Transducer::build(
            0,
            &[2],
            &[
                (0, 'a', 1, ""),
                (0, 'a', 2, ""),
                (1, 'a', 2, ""),
                (2, 'a', 2, ""),
            ],
        );
        assert_eq!(count_accepting_paths(&t, "a"), 1);
        assert_eq!(count_accepting_paths(&t, "aa"), 2);
        assert_eq!(brute_force_ambiguous_input(&t, 4).as_deref(), Some("aa"));
        assert!(!check_unambiguous_up_to(&t, 4).verdict);
    }

    #[test]
    fn informant_of_a_loop() {
        let t = Transducer::build(0, &[0], &[(0, 'a', 0, "x")]);
        let inf = generate_informant(&t, 3).unwrap();
        let expect: Vec<(String, String)> = ["", "a", "aa", "aaa"]
            .iter()
            .map(|w| (w.to_string(), "x".repeat(w.len())))
            .collect();
        assert_eq!(inf, expect);
        let empty = Transducer::new(StateId(0)).with_input_alphabet(['a']);
        assert!(generate_informant(&empty, 3).unwrap().is_empty());
        let bad = Transducer::build(0, &[1, 2], &[(0, 'a', 1, "x"), (0, 'a', 2, "y")]);
        assert!(matches!(
            generate_informant(&bad, 2),
            Err(Error::NotFunctional { .. })
        ));
    }

    #[test]
    fn enumeration_basics() {
        let empty = enumerate_minimal_consistent(&SampleSet::new(), 2).unwrap();
        assert_eq!(empty.num_states(), 1);
        assert!(empty.transitions().is_empty());

        let s = SampleSet::from_pairs([("a", "x")]).unwrap();
        let t = enumerate_minimal_consistent(&s, 3).unwrap();
        assert_eq!(t.transduce("a").unwrap(), BTreeSet::from(["x".to_string()]));

        // ε accepted with ε, "a" rejected by omission is impossible to force,
        // but "a"->"x" and "aa"->"y" cannot share one state
        let s = SampleSet::from_pairs([("", ""), ("a", "x"), ("aa", "y")]).unwrap();
        assert!(enumerate_minimal_consistent(&s, 1).is_none());
        let t = enumerate_minimal_consistent(&s, 3).unwrap();
        for (i, o) in s.iter() {
            assert_eq!(t.transduce(i).unwrap(), BTreeSet::from([o.to_string()]));
        }
    }
}
