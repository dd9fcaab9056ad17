//! The transducer data model: states, transitions with output strings,
//! nondeterministic evaluation by configuration propagation, trimming and
//! structural validation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Opaque, totally ordered state identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for StateId {
    fn from(v: u32) -> Self {
        StateId(v)
    }
}

/// Index of a transition inside [`Transducer::transitions`].
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub src: StateId,
    pub symbol: char,
    pub dst: StateId,
    pub output: String,
}

impl Transition {
    pub fn new(src: StateId, symbol: char, dst: StateId, output: impl Into<String>) -> Self {
        Transition {
            src,
            symbol,
            dst,
            output: output.into(),
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -{}/{}-> {}",
            self.src, self.symbol, self.output, self.dst
        )
    }
}

/// A finite-state transducer without epsilon transitions and without state
/// outputs. Every transition reads exactly one input symbol and writes a
/// (possibly empty) output string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transducer {
    input_alphabet: BTreeSet<char>,
    output_alphabet: BTreeSet<char>,
    states: BTreeSet<StateId>,
    initial: StateId,
    accepting: BTreeSet<StateId>,
    transitions: Vec<Transition>,
}

impl Transducer {
    /// A machine with a single non-accepting initial state and no transitions.
    pub fn new(initial: StateId) -> Self {
        Transducer {
            input_alphabet: BTreeSet::new(),
            output_alphabet: BTreeSet::new(),
            states: BTreeSet::from([initial]),
            initial,
            accepting: BTreeSet::new(),
            transitions: Vec::new(),
        }
    }

    /// Convenience constructor used throughout tests and examples.
    ///
    /// Alphabets are inferred from the transitions. Panics on a duplicate
    /// `(src, symbol, dst)` triple.
    pub fn build(initial: u32, accepting: &[u32], edges: &[(u32, char, u32, &str)]) -> Self {
        let mut t = Transducer::new(StateId(initial));
        for &q in accepting {
            t.add_state(StateId(q));
            t.set_accepting(StateId(q), true);
        }
        for &(src, symbol, dst, out) in edges {
            t.add_transition(StateId(src), symbol, StateId(dst), out)
                .expect("duplicate transition in Transducer::build");
        }
        t
    }

    pub fn with_input_alphabet(mut self, sigma: impl IntoIterator<Item = char>) -> Self {
        self.input_alphabet.extend(sigma);
        self
    }

    pub fn with_output_alphabet(mut self, gamma: impl IntoIterator<Item = char>) -> Self {
        self.output_alphabet.extend(gamma);
        self
    }

    pub fn extend_input_alphabet(&mut self, sigma: impl IntoIterator<Item = char>) {
        self.input_alphabet.extend(sigma);
    }

    pub fn extend_output_alphabet(&mut self, gamma: impl IntoIterator<Item = char>) {
        self.output_alphabet.extend(gamma);
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn states(&self) -> &BTreeSet<StateId> {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn accepting(&self) -> &BTreeSet<StateId> {
        &self.accepting
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting.contains(&q)
    }

    pub fn input_alphabet(&self) -> &BTreeSet<char> {
        &self.input_alphabet
    }

    pub fn output_alphabet(&self) -> &BTreeSet<char> {
        &self.output_alphabet
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn contains_state(&self, q: StateId) -> bool {
        self.states.contains(&q)
    }

    /// Smallest identifier not yet used by any state.
    pub fn fresh_state(&self) -> StateId {
        self.states
            .iter()
            .next_back()
            .map_or(StateId(0), |q| StateId(q.0 + 1))
    }

    pub fn add_state(&mut self, q: StateId) {
        self.states.insert(q);
    }

    pub fn set_accepting(&mut self, q: StateId, accepting: bool) {
        self.states.insert(q);
        if accepting {
            self.accepting.insert(q);
        } else {
            self.accepting.remove(&q);
        }
    }

    /// Adds a transition, extending states and alphabets as needed.
    pub fn add_transition(
        &mut self,
        src: StateId,
        symbol: char,
        dst: StateId,
        output: &str,
    ) -> Result<EdgeId> {
        if self
            .transitions
            .iter()
            .any(|t| t.src == src && t.symbol == symbol && t.dst == dst)
        {
            return Err(Error::DuplicateTransition { src, symbol, dst });
        }
        Ok(self.push_transition(Transition::new(src, symbol, dst, output)))
    }

    /// Adds a transition without the functional-delta check. Used by parsers
    /// (so that [`Transducer::validate`] can report the problem) and by merge
    /// sessions, which transiently hold parallel edges.
    pub fn push_transition(&mut self, t: Transition) -> EdgeId {
        self.states.insert(t.src);
        self.states.insert(t.dst);
        self.input_alphabet.insert(t.symbol);
        self.output_alphabet.extend(t.output.chars());
        self.transitions.push(t);
        self.transitions.len() - 1
    }

    /// Adds a transition without touching states or alphabets.
    pub fn push_transition_raw(&mut self, t: Transition) -> EdgeId {
        self.transitions.push(t);
        self.transitions.len() - 1
    }

    /// Adds a state identifier without any further bookkeeping; parsers use
    /// it together with [`Transducer::push_transition_raw`].
    pub fn insert_state_raw(&mut self, q: StateId) {
        self.states.insert(q);
    }

    pub(crate) fn set_initial(&mut self, q: StateId) {
        self.states.insert(q);
        self.initial = q;
    }

    pub(crate) fn remove_state(&mut self, q: StateId) {
        self.states.remove(&q);
        self.accepting.remove(&q);
        self.transitions.retain(|t| t.src != q && t.dst != q);
    }

    /// Outgoing transitions of `q`, in insertion order.
    pub fn outgoing(&self, q: StateId) -> impl Iterator<Item = (EdgeId, &Transition)> {
        self.transitions
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.src == q)
    }

    /// Incoming transitions of `q`, in insertion order.
    pub fn incoming(&self, q: StateId) -> impl Iterator<Item = (EdgeId, &Transition)> {
        self.transitions
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.dst == q)
    }

    /// Outgoing edge lists for every state, built once for repeated lookups.
    pub fn out_index(&self) -> BTreeMap<StateId, Vec<EdgeId>> {
        let mut index: BTreeMap<StateId, Vec<EdgeId>> =
            self.states.iter().map(|&q| (q, Vec::new())).collect();
        for (i, t) in self.transitions.iter().enumerate() {
            index.entry(t.src).or_default().push(i);
        }
        index
    }

    fn check_input(&self, input: &str) -> Result<()> {
        match input.chars().find(|c| !self.input_alphabet.contains(c)) {
            Some(c) => Err(Error::UnknownSymbol(c)),
            None => Ok(()),
        }
    }

    /// The configuration reached after reading `input`: every state reachable
    /// over `input` paired with the output produced on the way.
    pub fn configuration_after(&self, input: &str) -> Result<Configuration> {
        self.check_input(input)?;
        Ok(self.propagate(input))
    }

    fn propagate(&self, input: &str) -> Configuration {
        let index = self.out_index();
        let mut current: BTreeSet<(StateId, String)> =
            BTreeSet::from([(self.initial, String::new())]);
        for c in input.chars() {
            let mut next = BTreeSet::new();
            for (q, out) in &current {
                for &e in index.get(q).map(Vec::as_slice).unwrap_or(&[]) {
                    let t = &self.transitions[e];
                    if t.symbol == c {
                        let mut o = out.clone();
                        o.push_str(&t.output);
                        next.insert((t.dst, o));
                    }
                }
            }
            if next.is_empty() {
                return Configuration { entries: next };
            }
            current = next;
        }
        Configuration { entries: current }
    }

    /// All outputs of accepting paths over `input`. For a functional machine
    /// the result has at most one element.
    pub fn transduce(&self, input: &str) -> Result<BTreeSet<String>> {
        self.check_input(input)?;
        Ok(self.transduce_lenient(input))
    }

    /// Like [`Transducer::transduce`] but treats unknown symbols as rejection.
    pub fn transduce_lenient(&self, input: &str) -> BTreeSet<String> {
        self.propagate(input)
            .entries
            .into_iter()
            .filter(|(q, _)| self.accepting.contains(q))
            .map(|(_, o)| o)
            .collect()
    }

    fn forward_reachable(&self) -> BTreeSet<StateId> {
        let index = self.out_index();
        let mut seen = BTreeSet::from([self.initial]);
        let mut queue = VecDeque::from([self.initial]);
        while let Some(q) = queue.pop_front() {
            for &e in index.get(&q).map(Vec::as_slice).unwrap_or(&[]) {
                let d = self.transitions[e].dst;
                if seen.insert(d) {
                    queue.push_back(d);
                }
            }
        }
        seen
    }

    fn backward_reachable(&self) -> BTreeSet<StateId> {
        let mut preds: BTreeMap<StateId, Vec<StateId>> = BTreeMap::new();
        for t in &self.transitions {
            preds.entry(t.dst).or_default().push(t.src);
        }
        let mut seen: BTreeSet<StateId> = self.accepting.clone();
        let mut queue: VecDeque<StateId> = seen.iter().copied().collect();
        while let Some(q) = queue.pop_front() {
            for &p in preds.get(&q).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(p) {
                    queue.push_back(p);
                }
            }
        }
        seen
    }

    /// Keeps exactly the states lying on some path from the initial state to
    /// an accepting state. When no accepting state is reachable the result is
    /// the one-state machine with the empty relation.
    pub fn trim(&self) -> Transducer {
        let live: BTreeSet<StateId> = self
            .forward_reachable()
            .intersection(&self.backward_reachable())
            .copied()
            .collect();
        let mut out = Transducer {
            input_alphabet: self.input_alphabet.clone(),
            output_alphabet: self.output_alphabet.clone(),
            states: BTreeSet::from([self.initial]),
            initial: self.initial,
            accepting: BTreeSet::new(),
            transitions: Vec::new(),
        };
        if !live.contains(&self.initial) {
            return out;
        }
        out.states = live.clone();
        out.accepting = self.accepting.intersection(&live).copied().collect();
        out.transitions = self
            .transitions
            .iter()
            .filter(|t| live.contains(&t.src) && live.contains(&t.dst))
            .cloned()
            .collect();
        out
    }

    pub fn is_trim(&self) -> bool {
        let t = self.trim();
        t.states == self.states && t.transitions.len() == self.transitions.len()
    }

    /// Renumbers states to `0..n` following the current state order and sorts
    /// transitions canonically.
    pub fn renumbered(&self) -> Transducer {
        let map: BTreeMap<StateId, StateId> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, &q)| (q, StateId(i as u32)))
            .collect();
        let mut transitions: Vec<Transition> = self
            .transitions
            .iter()
            .map(|t| Transition::new(map[&t.src], t.symbol, map[&t.dst], t.output.clone()))
            .collect();
        transitions.sort();
        Transducer {
            input_alphabet: self.input_alphabet.clone(),
            output_alphabet: self.output_alphabet.clone(),
            states: map.values().copied().collect(),
            initial: map[&self.initial],
            accepting: self.accepting.iter().map(|q| map[q]).collect(),
            transitions,
        }
    }

    /// Checks every structural invariant and lists the violations.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if !self.states.contains(&self.initial) {
            violations.push(Violation::MissingState(self.initial));
        }
        for q in &self.accepting {
            if !self.states.contains(q) {
                violations.push(Violation::MissingState(*q));
            }
        }
        let mut seen: BTreeMap<(StateId, char, StateId), &str> = BTreeMap::new();
        for t in &self.transitions {
            for q in [t.src, t.dst] {
                if !self.states.contains(&q) {
                    violations.push(Violation::MissingState(q));
                }
            }
            if !self.input_alphabet.contains(&t.symbol) {
                violations.push(Violation::InputSymbol(t.clone()));
            }
            if t.output.chars().any(|c| !self.output_alphabet.contains(&c)) {
                violations.push(Violation::OutputSymbol(t.clone()));
            }
            if let Some(prev) = seen.insert((t.src, t.symbol, t.dst), &t.output) {
                violations.push(Violation::DeltaNotFunction {
                    src: t.src,
                    symbol: t.symbol,
                    dst: t.dst,
                    outputs: (prev.to_string(), t.output.clone()),
                });
            }
        }
        violations.dedup();
        ValidationReport { violations }
    }
}

/// The set of (state, pending output) pairs reached after reading some input.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Configuration {
    entries: BTreeSet<(StateId, String)>,
}

impl Configuration {
    pub fn entries(&self) -> &BTreeSet<(StateId, String)> {
        &self.entries
    }

    pub fn states(&self) -> BTreeSet<StateId> {
        self.entries.iter().map(|(q, _)| *q).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn contains(&self, q: StateId, output: &str) -> bool {
        self.entries.contains(&(q, output.to_string()))
    }
}

impl FromIterator<(StateId, String)> for Configuration {
    fn from_iter<I: IntoIterator<Item = (StateId, String)>>(iter: I) -> Self {
        Configuration {
            entries: iter.into_iter().collect(),
        }
    }
}

/// A chained sequence of transitions starting at `start`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub start: StateId,
    pub edges: Vec<Transition>,
}

impl Path {
    pub fn new(start: StateId, edges: Vec<Transition>) -> Self {
        Path { start, edges }
    }

    /// Every edge starts where the previous one ended.
    pub fn is_chained(&self) -> bool {
        self.edges.first().is_none_or(|e| e.src == self.start)
            && self.edges.windows(2).all(|w| w[0].dst == w[1].src)
    }

    pub fn input(&self) -> String {
        self.edges.iter().map(|e| e.symbol).collect()
    }

    pub fn output(&self) -> String {
        self.edges.iter().map(|e| e.output.as_str()).collect()
    }

    pub fn end(&self) -> StateId {
        self.edges.last().map_or(self.start, |e| e.dst)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_prefix_of(&self, other: &Path) -> bool {
        self.start == other.start
            && self.edges.len() <= other.edges.len()
            && self.edges[..] == other.edges[..self.edges.len()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    MissingState(StateId),
    InputSymbol(Transition),
    OutputSymbol(Transition),
    DeltaNotFunction {
        src: StateId,
        symbol: char,
        dst: StateId,
        outputs: (String, String),
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingState(q) => write!(f, "state {q} is referenced but not declared"),
            Violation::InputSymbol(t) => {
                write!(f, "alphabet: input symbol of {t} not in input alphabet")
            }
            Violation::OutputSymbol(t) => {
                write!(f, "alphabet: output of {t} not over output alphabet")
            }
            Violation::DeltaNotFunction {
                src,
                symbol,
                dst,
                outputs,
            } => write!(
                f,
                "delta not a function: {src} -{symbol}-> {dst} has outputs {:?} and {:?}",
                outputs.0, outputs.1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn transduce_single_path() {
        let t = Transducer::build(0, &[1], &[(0, 'a', 1, "x")]).with_input_alphabet(['a', 'b']);
        assert_eq!(t.transduce("a").unwrap(), set(&["x"]));
        assert_eq!(t.transduce("b").unwrap(), set(&[]));
    }

    #[test]
    fn transduce_nondeterministic_branch() {
        let t = Transducer::build(
            0,
            &[1, 3],
            &[(0, 'a', 1, "x"), (0, 'a', 2, "y"), (2, 'b', 3, "z")],
        );
        assert_eq!(t.transduce("ab").unwrap(), set(&["yz"]));
        assert_eq!(t.transduce("a").unwrap(), set(&["x"]));
    }

    #[test]
    fn unknown_symbol_is_an_error() {
        let t = Transducer::build(0, &[1], &[(0, 'a', 1, "x")]);
        assert_eq!(t.transduce("c"), Err(Error::UnknownSymbol('c')));
        assert!(t.transduce_lenient("c").is_empty());
    }

    #[test]
    fn configurations() {
        let t = Transducer::build(0, &[], &[(0, 'a', 1, "x"), (0, 'a', 2, "y")]);
        let k0 = t.configuration_after("").unwrap();
        assert_eq!(k0.entries(), &BTreeSet::from([(StateId(0), String::new())]));
        let k1 = t.configuration_after("a").unwrap();
        assert!(k1.contains(StateId(1), "x"));
        assert!(k1.contains(StateId(2), "y"));
        assert_eq!(k1.len(), 2);
    }

    #[test]
    fn trim_removes_unreachable_and_dead_states() {
        let mut t = Transducer::build(
            0,
            &[1],
            &[(0, 'a', 1, "x"), (0, 'b', 5, "y"), (9, 'a', 1, "z")],
        );
        t.add_state(StateId(9));
        let trimmed = t.trim();
        assert_eq!(trimmed.states(), &BTreeSet::from([StateId(0), StateId(1)]));
        assert_eq!(trimmed.transitions().len(), 1);
        assert_eq!(trimmed.trim(), trimmed);
        // relation unchanged
        for w in ["", "a", "b", "ab"] {
            assert_eq!(t.transduce(w).unwrap(), trimmed.transduce(w).unwrap());
        }
    }

    #[test]
    fn trim_of_empty_relation_is_single_state() {
        let t = Transducer::build(0, &[], &[(0, 'a', 1, "x")]);
        let trimmed = t.trim();
        assert_eq!(trimmed.num_states(), 1);
        assert!(trimmed.transitions().is_empty());
        assert!(trimmed.accepting().is_empty());
    }

    #[test]
    fn validate_reports_violations() {
        let t = Transducer::build(0, &[1], &[(0, 'a', 1, "x")]);
        assert!(t.validate().is_ok());

        let mut dup = t.clone();
        dup.push_transition(Transition::new(StateId(0), 'a', StateId(1), "y"));
        let report = dup.validate();
        assert!(matches!(
            report.violations.as_slice(),
            [Violation::DeltaNotFunction { .. }]
        ));
        assert!(report.violations[0]
            .to_string()
            .contains("delta not a function"));

        let mut bad = Transducer::new(StateId(0)).with_output_alphabet(['x']);
        bad.insert_state_raw(StateId(1));
        bad.push_transition_raw(Transition::new(StateId(0), 'q', StateId(1), "x"));
        let report = bad.validate();
        assert!(matches!(
            report.violations.as_slice(),
            [Violation::InputSymbol(_)]
        ));
    }

    #[test]
    fn path_labels() {
        let p = Path::new(
            StateId(0),
            vec![
                Transition::new(StateId(0), 'a', StateId(1), "x"),
                Transition::new(StateId(1), 'b', StateId(2), "yz"),
            ],
        );
        assert_eq!(p.input(), "ab");
        assert_eq!(p.output(), "xyz");
        assert_eq!(p.end(), StateId(2));
        let q = Path::new(StateId(0), p.edges[..1].to_vec());
        assert!(q.is_prefix_of(&p));
        assert!(!p.is_prefix_of(&q));
    }
}
