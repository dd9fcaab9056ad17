//! Merge sessions: identify two states, then remove every ambiguity the
//! merge introduces by unifying ambiguous path pairs.
//!
//! Unifying two same-input paths merges their states position by position
//! and equalizes their outputs. Outputs may only move backwards along a path
//! (a suffix of one edge becomes a prefix of the next ones), and only across a
//! state that has a single incoming edge and is not accepting, so every
//! push-back preserves the relation. A session either reaches an unambiguous
//! machine and commits, or rejects and leaves the input machine untouched.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::ambiguity::{
    find_ambiguity, find_ambiguity_since, merge_update, square_reach, AliasMap, AmbiguousPathPair,
    PairSearchState,
};
use crate::transducer::{EdgeId, StateId, Transducer, Transition};

/// Why a merge was refused.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rejection {
    /// The merge would identify two states that one input reaches at the
    /// same time in the current hypothesis. In an unambiguous target such
    /// states can never coincide.
    RootPairAsymmetry { left: StateId, right: StateId },
    /// An output would have to be pushed back across a state that is
    /// accepting or has several incoming transitions.
    PushBackBlocked {
        edge: Transition,
        suffix: String,
        reason: BlockReason,
    },
    /// Two accepting paths over the same input produce different outputs.
    OutputConflict {
        input: String,
        outputs: (String, String),
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockReason {
    Accepting,
    Initial,
    MultipleIncoming(usize),
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::RootPairAsymmetry { left, right } => write!(
                f,
                "case i (root-pair asymmetry): states {left} and {right} share a configuration"
            ),
            Rejection::PushBackBlocked {
                edge,
                suffix,
                reason,
            } => {
                let why = match reason {
                    BlockReason::Accepting => "target is accepting".to_string(),
                    BlockReason::Initial => "target is the initial state".to_string(),
                    BlockReason::MultipleIncoming(n) => {
                        format!("target has {n} incoming transitions")
                    }
                };
                write!(
                    f,
                    "case ii (push-back blocked): {suffix:?} from {edge}: {why}"
                )
            }
            Rejection::OutputConflict { input, outputs } => write!(
                f,
                "case iii (output conflict): input {input:?} yields {:?} and {:?}",
                outputs.0, outputs.1
            ),
        }
    }
}

/// A suffix moved from `edge` onto the outgoing transitions of its target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushBack {
    /// The edge as it was before the operation.
    pub edge: Transition,
    pub suffix: String,
    /// Number of transitions entering the target when the push-back ran.
    pub target_incoming: usize,
    pub target_accepting: bool,
    /// The working machine before and after, kept only in audited sessions.
    pub snapshot: Option<Box<(Transducer, Transducer)>>,
}

/// Facts about the hypothesis a merge is attempted on, shared by all merge
/// attempts until a merge commits.
#[derive(Debug, Clone)]
pub struct MergeContext {
    base: PairSearchState,
    /// The hypothesis itself has no ambiguity witness.
    clean: bool,
    audit: bool,
}

impl MergeContext {
    pub fn new(h: &Transducer) -> Self {
        let base = square_reach(h, AliasMap::new());
        MergeContext {
            clean: find_ambiguity(h, &base).is_none(),
            base,
            audit: false,
        }
    }

    /// Makes sessions record machine snapshots around every push-back.
    pub fn audited(mut self, audit: bool) -> Self {
        self.audit = audit;
        self
    }

    pub fn pairs(&self) -> &PairSearchState {
        &self.base
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MergeOutcome {
    Merged {
        machine: Transducer,
        forced: Vec<(StateId, StateId)>,
        push_log: Vec<PushBack>,
        witnesses: usize,
    },
    Rejected(Rejection),
}

impl MergeOutcome {
    pub fn machine(self) -> Option<Transducer> {
        match self {
            MergeOutcome::Merged { machine, .. } => Some(machine),
            MergeOutcome::Rejected(_) => None,
        }
    }

    pub fn is_merged(&self) -> bool {
        matches!(self, MergeOutcome::Merged { .. })
    }
}

/// Mutable copy of a machine with adjacency indexes. Edge ids are stable;
/// fused edges leave a tombstone.
#[derive(Debug, Clone)]
struct Graph {
    template: Transducer,
    initial: StateId,
    states: BTreeSet<StateId>,
    accepting: BTreeSet<StateId>,
    edges: Vec<Option<Transition>>,
    out: BTreeMap<StateId, BTreeSet<EdgeId>>,
    inc: BTreeMap<StateId, BTreeSet<EdgeId>>,
    keys: BTreeMap<(StateId, char, StateId, String), EdgeId>,
    /// States with two outgoing edges on one symbol.
    forks: BTreeSet<StateId>,
}

impl Graph {
    fn new(h: &Transducer) -> Self {
        let mut g = Graph {
            template: Transducer::new(h.initial())
                .with_input_alphabet(h.input_alphabet().iter().copied())
                .with_output_alphabet(h.output_alphabet().iter().copied()),
            initial: h.initial(),
            states: h.states().clone(),
            accepting: h.accepting().clone(),
            edges: h.transitions().iter().cloned().map(Some).collect(),
            out: BTreeMap::new(),
            inc: BTreeMap::new(),
            keys: BTreeMap::new(),
            forks: BTreeSet::new(),
        };
        for e in 0..g.edges.len() {
            g.attach(e);
        }
        let states: Vec<StateId> = g.states.iter().copied().collect();
        for q in states {
            g.update_fork(q);
        }
        g
    }

    fn edge(&self, e: EdgeId) -> &Transition {
        self.edges[e].as_ref().expect("live edge")
    }

    fn key(t: &Transition) -> (StateId, char, StateId, String) {
        (t.src, t.symbol, t.dst, t.output.clone())
    }

    fn detach(&mut self, e: EdgeId) {
        let t = self.edges[e].as_ref().expect("live edge");
        let k = Self::key(t);
        let (src, dst) = (t.src, t.dst);
        self.keys.remove(&k);
        if let Some(s) = self.out.get_mut(&src) {
            s.remove(&e);
        }
        if let Some(s) = self.inc.get_mut(&dst) {
            s.remove(&e);
        }
    }

    /// Indexes `e`, or drops it if an identical edge exists.
    fn attach(&mut self, e: EdgeId) {
        let t = self.edges[e].as_ref().expect("live edge");
        let k = Self::key(t);
        if self.keys.contains_key(&k) {
            self.edges[e] = None;
            return;
        }
        let (src, dst) = (t.src, t.dst);
        self.keys.insert(k, e);
        self.out.entry(src).or_default().insert(e);
        self.inc.entry(dst).or_default().insert(e);
    }

    fn out_edges(&self, q: StateId) -> impl Iterator<Item = EdgeId> + '_ {
        self.out.get(&q).into_iter().flatten().copied()
    }

    fn incoming(&self, q: StateId) -> usize {
        self.inc.get(&q).map_or(0, BTreeSet::len)
    }

    fn update_fork(&mut self, q: StateId) {
        let mut seen = BTreeSet::new();
        let fork = self.out_edges(q).any(|e| !seen.insert(self.edge(e).symbol));
        if fork {
            self.forks.insert(q);
        } else {
            self.forks.remove(&q);
        }
    }

    fn merge(&mut self, keep: StateId, drop: StateId) {
        let moved: BTreeSet<EdgeId> = self
            .out_edges(drop)
            .chain(self.inc.get(&drop).into_iter().flatten().copied())
            .collect();
        let mut touched = BTreeSet::from([keep]);
        for &e in &moved {
            self.detach(e);
        }
        for &e in &moved {
            let t = self.edges[e].as_mut().expect("live edge");
            if t.src == drop {
                t.src = keep;
            }
            if t.dst == drop {
                t.dst = keep;
            }
            touched.insert(t.src);
        }
        for &e in &moved {
            self.attach(e);
        }
        if self.accepting.remove(&drop) {
            self.accepting.insert(keep);
        }
        if self.initial == drop {
            self.initial = keep;
        }
        self.states.remove(&drop);
        self.out.remove(&drop);
        self.inc.remove(&drop);
        self.forks.remove(&drop);
        for q in touched {
            self.update_fork(q);
        }
    }

    fn set_output(&mut self, e: EdgeId, output: String) {
        self.detach(e);
        self.edges[e].as_mut().expect("live edge").output = output;
        self.attach(e);
    }

    fn to_transducer(&self) -> Transducer {
        let mut t = self.template.clone();
        t.set_initial(self.initial);
        for &q in &self.states {
            t.add_state(q);
            t.set_accepting(q, self.accepting.contains(&q));
        }
        let dead: Vec<StateId> = t
            .states()
            .iter()
            .copied()
            .filter(|q| !self.states.contains(q))
            .collect();
        for q in dead {
            t.remove_state(q);
        }
        for e in self.edges.iter().flatten() {
            t.push_transition(e.clone());
        }
        t
    }

    /// Edges of a shortest path from the initial state to `q`.
    fn path_to(&self, q: StateId) -> Vec<EdgeId> {
        let mut prev: BTreeMap<StateId, Option<EdgeId>> = BTreeMap::from([(self.initial, None)]);
        let mut queue = VecDeque::from([self.initial]);
        while let Some(p) = queue.pop_front() {
            if p == q {
                break;
            }
            for e in self.out_edges(p) {
                let d = self.edge(e).dst;
                if let std::collections::btree_map::Entry::Vacant(v) = prev.entry(d) {
                    v.insert(Some(e));
                    queue.push_back(d);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = q;
        while let Some(Some(e)) = prev.get(&cur) {
            path.push(*e);
            cur = self.edge(*e).src;
        }
        path.reverse();
        path
    }

    /// The first ambiguity in breadth-first order over diverged state pairs
    /// seeded at forks: two edge sequences leaving the same fork by distinct
    /// edges and ending in one state or in two accepting states.
    fn witness(&self) -> Option<(StateId, Vec<EdgeId>, Vec<EdgeId>)> {
        enum Back {
            Start(StateId, EdgeId, EdgeId),
            Step((StateId, StateId), EdgeId, EdgeId),
        }
        let mut seen: BTreeMap<(StateId, StateId), Back> = BTreeMap::new();
        let mut queue = VecDeque::new();
        let found = |x: StateId, y: StateId| {
            x == y || (self.accepting.contains(&x) && self.accepting.contains(&y))
        };
        let mut hit = None;
        'seed: for &f in &self.forks {
            let out: Vec<EdgeId> = self.out_edges(f).collect();
            for (n, &e1) in out.iter().enumerate() {
                for &e2 in &out[n + 1..] {
                    let (a, b) = (self.edge(e1), self.edge(e2));
                    if a.symbol != b.symbol || seen.contains_key(&(a.dst, b.dst)) {
                        continue;
                    }
                    seen.insert((a.dst, b.dst), Back::Start(f, e1, e2));
                    if found(a.dst, b.dst) {
                        hit = Some((a.dst, b.dst));
                        break 'seed;
                    }
                    queue.push_back((a.dst, b.dst));
                }
            }
        }
        while hit.is_none() {
            let Some((x, y)) = queue.pop_front() else {
                break;
            };
            'pairs: for e1 in self.out_edges(x) {
                for e2 in self.out_edges(y) {
                    let (a, b) = (self.edge(e1), self.edge(e2));
                    if a.symbol != b.symbol || seen.contains_key(&(a.dst, b.dst)) {
                        continue;
                    }
                    seen.insert((a.dst, b.dst), Back::Step((x, y), e1, e2));
                    if found(a.dst, b.dst) {
                        hit = Some((a.dst, b.dst));
                        break 'pairs;
                    }
                    queue.push_back((a.dst, b.dst));
                }
            }
        }
        let mut cur = hit?;
        let (mut pa, mut pb) = (Vec::new(), Vec::new());
        loop {
            match seen[&cur] {
                Back::Start(f, e1, e2) => {
                    pa.push(e1);
                    pb.push(e2);
                    pa.reverse();
                    pb.reverse();
                    return Some((f, pa, pb));
                }
                Back::Step(pred, e1, e2) => {
                    pa.push(e1);
                    pb.push(e2);
                    cur = pred;
                }
            }
        }
    }
}

/// Private working state of one merge attempt.
#[derive(Debug, Clone)]
pub struct MergeSession<'a> {
    working: Graph,
    aliases: AliasMap,
    root_pair: (StateId, StateId),
    forced: Vec<(StateId, StateId)>,
    push_log: Vec<PushBack>,
    context: &'a MergeContext,
}

impl<'a> MergeSession<'a> {
    pub fn open(h: &Transducer, context: &'a MergeContext, a: StateId, b: StateId) -> Self {
        MergeSession {
            working: Graph::new(h),
            aliases: AliasMap::new(),
            root_pair: (a, b),
            forced: Vec::new(),
            push_log: Vec::new(),
            context,
        }
    }

    /// The current working machine. Edge order is preserved, but fused edges
    /// are gone, so edge ids of the result may differ from session edge ids.
    pub fn working(&self) -> Transducer {
        self.working.to_transducer()
    }

    /// The session's view of an edge.
    pub fn edge(&self, e: EdgeId) -> Option<&Transition> {
        self.working.edges.get(e).and_then(Option::as_ref)
    }

    pub fn push_log(&self) -> &[PushBack] {
        &self.push_log
    }

    pub fn root_pair(&self) -> (StateId, StateId) {
        self.root_pair
    }

    /// Some member of the class of `x` and some member of the class of `y`
    /// are reachable over one input in the pre-session hypothesis.
    fn share_configuration(&self, x: StateId, y: StateId) -> bool {
        let (cx, cy) = (self.aliases.class(x), self.aliases.class(y));
        cx.iter()
            .any(|&m| cy.iter().any(|&n| self.context.base.co_reachable(m, n)))
    }

    /// Physically identifies two states: edges are redirected to the lesser
    /// one, acceptance is the union, and identical edges are fused.
    pub fn merge_states(&mut self, x: StateId, y: StateId) {
        let (x, y) = (self.aliases.find(x), self.aliases.find(y));
        if x == y {
            return;
        }
        let (keep, drop) = if x < y { (x, y) } else { (y, x) };
        self.aliases.union(keep, drop);
        self.working.merge(keep, drop);
    }

    /// Moves `suffix` from the end of `edge`'s output to the front of every
    /// outgoing transition of its target.
    pub fn push_back(&mut self, edge: EdgeId, suffix: &str) -> Result<(), Rejection> {
        if suffix.is_empty() {
            return Ok(());
        }
        let e = self.working.edge(edge).clone();
        debug_assert!(e.output.ends_with(suffix));
        let target = e.dst;
        let incoming = self.working.incoming(target);
        let reason = if self.working.accepting.contains(&target) {
            Some(BlockReason::Accepting)
        } else if target == self.working.initial {
            Some(BlockReason::Initial)
        } else if incoming != 1 {
            Some(BlockReason::MultipleIncoming(incoming))
        } else {
            None
        };
        if let Some(reason) = reason {
            return Err(Rejection::PushBackBlocked {
                edge: e,
                suffix: suffix.to_string(),
                reason,
            });
        }
        let before = self.context.audit.then(|| self.working.to_transducer());
        self.working
            .set_output(edge, e.output[..e.output.len() - suffix.len()].to_string());
        let next: Vec<EdgeId> = self.working.out_edges(target).collect();
        for n in next {
            let out = format!("{suffix}{}", self.working.edge(n).output);
            self.working.set_output(n, out);
        }
        self.push_log.push(PushBack {
            edge: e,
            suffix: suffix.to_string(),
            target_incoming: incoming,
            target_accepting: false,
            snapshot: before.map(|b| Box::new((b, self.working.to_transducer()))),
        });
        Ok(())
    }

    /// Unifies one ambiguous path pair of the working machine: equalizes
    /// outputs position by position, then merges the states the two paths
    /// visit at equal positions. Edge ids are session edge ids.
    pub fn unify_paths(&mut self, w: &AmbiguousPathPair) -> Result<(), Rejection> {
        let g = &self.working;
        for (&ea, &eb) in w.path_a.iter().zip(&w.path_b) {
            let (x, y) = (g.edge(ea).dst, g.edge(eb).dst);
            if x != y && self.share_configuration(x, y) {
                return Err(Rejection::RootPairAsymmetry { left: x, right: y });
            }
        }
        let total =
            |p: &[EdgeId]| -> String { p.iter().map(|&e| g.edge(e).output.as_str()).collect() };
        let (out_a, out_b) = (total(&w.path_a), total(&w.path_b));
        if out_a != out_b {
            return Err(Rejection::OutputConflict {
                input: w.input.clone(),
                outputs: (out_a, out_b),
            });
        }

        for k in 0..w.path_a.len() {
            let (ea, eb) = (w.path_a[k], w.path_b[k]);
            if ea == eb {
                continue;
            }
            let x = self.working.edge(ea).output.clone();
            let y = self.working.edge(eb).output.clone();
            if x == y {
                continue;
            }
            if let Some(extra) = y.strip_prefix(x.as_str()) {
                self.push_back(eb, extra)?;
            } else if let Some(extra) = x.strip_prefix(y.as_str()) {
                self.push_back(ea, extra)?;
            } else {
                return Err(Rejection::OutputConflict {
                    input: w.input.clone(),
                    outputs: (out_a, out_b),
                });
            }
        }

        let pairs: Vec<(StateId, StateId)> = w
            .path_a
            .iter()
            .zip(&w.path_b)
            .map(|(&ea, &eb)| (self.working.edge(ea).dst, self.working.edge(eb).dst))
            .collect();
        for (x, y) in pairs {
            let (rx, ry) = (self.aliases.find(x), self.aliases.find(y));
            if rx != ry {
                self.forced.push((rx.min(ry), rx.max(ry)));
                self.merge_states(rx, ry);
            }
        }
        Ok(())
    }

    /// Runs the session to a fixpoint without ambiguity, or to a rejection.
    pub fn run(mut self) -> MergeOutcome {
        let (a, b) = self.root_pair;
        if self.context.base.co_reachable(a, b) {
            return MergeOutcome::Rejected(Rejection::RootPairAsymmetry { left: a, right: b });
        }
        self.merge_states(a, b);
        let mut witnesses = 0;
        loop {
            let Some((fork, pa, pb)) = self.working.witness() else {
                return MergeOutcome::Merged {
                    machine: self.working.to_transducer(),
                    forced: self.forced,
                    push_log: self.push_log,
                    witnesses,
                };
            };
            witnesses += 1;
            // The shared prefix up to the fork does not affect unification;
            // it is only spelled out for rejection reports.
            let input = pa.iter().map(|&e| self.working.edge(e).symbol).collect();
            let w = AmbiguousPathPair {
                input,
                path_a: pa,
                path_b: pb,
            };
            if let Err(r) = self.unify_paths(&w) {
                return MergeOutcome::Rejected(self.with_full_input(r, fork));
            }
        }
    }

    fn with_full_input(&self, r: Rejection, fork: StateId) -> Rejection {
        match r {
            Rejection::OutputConflict { input, outputs } => {
                let prefix: String = self
                    .working
                    .path_to(fork)
                    .iter()
                    .map(|&e| self.working.edge(e).symbol)
                    .collect();
                let shared: String = self
                    .working
                    .path_to(fork)
                    .iter()
                    .map(|&e| self.working.edge(e).output.as_str())
                    .collect();
                Rejection::OutputConflict {
                    input: prefix + &input,
                    outputs: (shared.clone() + &outputs.0, shared + &outputs.1),
                }
            }
            other => other,
        }
    }
}

/// Attempts to merge `b` into `a` (`a < b`) in the trim hypothesis `h`.
pub fn try_merge_with(
    h: &Transducer,
    context: &mut MergeContext,
    a: StateId,
    b: StateId,
) -> MergeOutcome {
    if !context.base.co_reachable(a, b) {
        // Fast path: if the aliased search finds no ambiguity the merge needs
        // no unification at all.
        let mark = context.base.mark();
        merge_update(&mut context.base, h, a, b);
        let witness = if context.clean {
            find_ambiguity_since(h, &context.base, &mark)
        } else {
            find_ambiguity(h, &context.base)
        };
        context.base.rollback(mark);
        if witness.is_none() {
            let mut session = MergeSession::open(h, context, a, b);
            session.merge_states(a, b);
            return MergeOutcome::Merged {
                machine: session.working(),
                forced: Vec::new(),
                push_log: Vec::new(),
                witnesses: 0,
            };
        }
    }
    MergeSession::open(h, context, a, b).run()
}

/// Attempts to merge `b` into `a`; `None` when the merge is rejected.
pub fn try_merge(h: &Transducer, a: StateId, b: StateId) -> Option<Transducer> {
    try_merge_with(h, &mut MergeContext::new(h), a, b).machine()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ptree::{build_prefix_tree, SampleSet};
    use crate::words::words_up_to;

    fn tree(pairs: &[(&str, &str)]) -> Transducer {
        build_prefix_tree(&SampleSet::from_pairs(pairs.iter().copied()).unwrap())
            .unwrap()
            .machine
    }

    #[test]
    fn push_back_moves_suffix() {
        let h = Transducer::build(
            0,
            &[3],
            &[(0, 'a', 1, "x"), (1, 'a', 2, "xy"), (2, 'b', 3, "z")],
        );
        let ctx = MergeContext::new(&h);
        let mut s = MergeSession::open(&h, &ctx, StateId(0), StateId(1));
        s.push_back(1, "y").unwrap();
        assert_eq!(s.working().transitions()[1].output, "x");
        assert_eq!(s.working().transitions()[2].output, "yz");
        assert_eq!(s.push_log().len(), 1);
        for w in words_up_to(&['a', 'b'], 4) {
            assert_eq!(s.working().transduce_lenient(&w), h.transduce_lenient(&w));
        }
        s.push_back(1, "").unwrap();
        assert_eq!(s.push_log().len(), 1);
    }

    #[test]
    fn push_back_into_accepting_fails() {
        let h = Transducer::build(0, &[1], &[(0, 'a', 1, "xy"), (1, 'b', 2, "z")]);
        let ctx = MergeContext::new(&h);
        let mut s = MergeSession::open(&h, &ctx, StateId(0), StateId(1));
        let before = s.working().clone();
        let err = s.push_back(0, "y").unwrap_err();
        assert!(matches!(
            err,
            Rejection::PushBackBlocked {
                reason: BlockReason::Accepting,
                ..
            }
        ));
        assert_eq!(s.working(), before);
    }

    #[test]
    fn push_back_into_shared_target_fails() {
        let h = Transducer::build(
            0,
            &[3],
            &[(0, 'a', 2, "xy"), (0, 'b', 2, "x"), (2, 'c', 3, "z")],
        );
        let ctx = MergeContext::new(&h);
        let mut s = MergeSession::open(&h, &ctx, StateId(0), StateId(2));
        assert!(matches!(
            s.push_back(0, "y"),
            Err(Rejection::PushBackBlocked {
                reason: BlockReason::MultipleIncoming(2),
                ..
            })
        ));
    }

    #[test]
    fn unify_equalizes_by_pushing_back() {
        // path A: 0 -a/xy-> 1 -b/z-> 3 ; path B: 0 -a/x-> 2 -b/yz-> 4
        let h = Transducer::build(
            0,
            &[3, 4],
            &[
                (0, 'a', 1, "xy"),
                (1, 'b', 3, "z"),
                (0, 'a', 2, "x"),
                (2, 'b', 4, "yz"),
            ],
        );
        let ctx = MergeContext::new(&h);
        let s = MergeSession::open(&h, &ctx, StateId(1), StateId(2));
        let w = AmbiguousPathPair {
            input: "ab".into(),
            path_a: vec![0, 1],
            path_b: vec![2, 3],
        };
        // states 1 and 2 are both reached by "a", so unification is refused
        assert!(matches!(
            s.clone().unify_paths(&w),
            Err(Rejection::RootPairAsymmetry { .. })
        ));
        // without the configuration check the outputs are pushed together
        let empty = MergeContext::new(&Transducer::new(StateId(0)));
        let mut s2 = MergeSession::open(&h, &empty, StateId(1), StateId(2));
        s2.unify_paths(&w).unwrap();
        let edges: BTreeSet<(u32, char, u32, String)> = s2
            .working()
            .transitions()
            .iter()
            .map(|e| (e.src.0, e.symbol, e.dst.0, e.output.clone()))
            .collect();
        assert_eq!(
            edges,
            BTreeSet::from([(0, 'a', 1, "x".to_string()), (1, 'b', 3, "yz".to_string())])
        );
        assert_eq!(s2.push_log().len(), 1);
        assert_eq!(s2.push_log()[0].suffix, "y");
    }

    #[test]
    fn unify_detects_functional_conflict() {
        let h = Transducer::build(0, &[1, 2], &[(0, 'a', 1, "xy"), (0, 'a', 2, "xz")]);
        let empty = MergeContext::new(&Transducer::new(StateId(0)));
        let mut s = MergeSession::open(&h, &empty, StateId(1), StateId(2));
        let w = AmbiguousPathPair {
            input: "a".into(),
            path_a: vec![0],
            path_b: vec![1],
        };
        assert!(matches!(
            s.unify_paths(&w),
            Err(Rejection::OutputConflict { .. })
        ));
    }

    #[test]
    fn conflicting_continuation_rejects_merge() {
        let h = tree(&[("", ""), ("a", "x"), ("aa", "y")]);
        let (root, q_a) = (StateId(0), StateId(1));
        assert!(try_merge(&h, root, q_a).is_none());
        let outcome = try_merge_with(&h, &mut MergeContext::new(&h), root, q_a);
        assert!(matches!(outcome, MergeOutcome::Rejected(_)));
    }

    #[test]
    fn folding_a_chain_into_a_loop() {
        let h = tree(&[("", ""), ("a", "x"), ("aa", "xx"), ("aaa", "xxx")]);
        let merged = try_merge(&h, StateId(0), StateId(1)).unwrap();
        assert_eq!(merged.num_states(), 1);
        assert_eq!(merged.transitions().len(), 1);
        assert_eq!(merged.transitions()[0].output, "x");
        for n in 0..=4 {
            let w = "a".repeat(n);
            assert_eq!(
                merged.transduce(&w).unwrap(),
                BTreeSet::from(["x".repeat(n)])
            );
        }
    }

    #[test]
    fn compatible_disjoint_merge_needs_no_unification() {
        // 0 -a/x-> 1(acc), 0 -b/y-> 2 -b/y-> 3(acc): merging 1 and 3 adds nothing ambiguous
        let h = Transducer::build(
            0,
            &[1, 3],
            &[(0, 'a', 1, "x"), (0, 'b', 2, "y"), (2, 'b', 3, "y")],
        );
        let outcome = try_merge_with(&h, &mut MergeContext::new(&h), StateId(1), StateId(3));
        match outcome {
            MergeOutcome::Merged {
                push_log,
                witnesses,
                machine,
                ..
            } => {
                assert!(push_log.is_empty());
                assert_eq!(witnesses, 0);
                assert_eq!(machine.num_states(), 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejection_leaves_hypothesis_untouched() {
        let h = tree(&[("a", "x"), ("b", "y"), ("ab", "xz"), ("bb", "yw")]);
        let copy = h.clone();
        for a in h.states().iter().copied() {
            for b in h.states().iter().copied().filter(|&b| b > a) {
                let _ = try_merge(&h, a, b);
                assert_eq!(h, copy);
            }
        }
    }
}
