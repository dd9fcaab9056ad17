//! Ambiguity detection on the squared automaton.
//!
//! The search walks pairs of states reachable over a common input from the
//! diagonal `{q0, q0}`. A pair is *diverged* once its two sides took
//! different transitions; a diverged pair whose sides meet again, or whose
//! sides are both accepting, witnesses two distinct accepting paths.
//!
//! Pending merges are expressed with an [`AliasMap`]: states of one class are
//! interchangeable when transitions are expanded, so the search can run on a
//! hypothetical merge without rewriting the machine.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::transducer::{EdgeId, Path, StateId, Transducer};

/// Union-find over states; the representative of a class is its least state.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AliasMap {
    rep: BTreeMap<StateId, StateId>,
    members: BTreeMap<StateId, BTreeSet<StateId>>,
}

impl AliasMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn find(&self, q: StateId) -> StateId {
        self.rep.get(&q).copied().unwrap_or(q)
    }

    pub fn same(&self, a: StateId, b: StateId) -> bool {
        self.find(a) == self.find(b)
    }

    /// Members of the class of `q`, in state order.
    pub fn class(&self, q: StateId) -> Vec<StateId> {
        match self.members.get(&self.find(q)) {
            Some(m) => m.iter().copied().collect(),
            None => vec![q],
        }
    }

    /// Joins the classes of `a` and `b`; returns the new representative.
    pub fn union(&mut self, a: StateId, b: StateId) -> StateId {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return ra;
        }
        let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
        let dropped = self
            .members
            .remove(&drop)
            .unwrap_or_else(|| BTreeSet::from([drop]));
        let kept = self
            .members
            .entry(keep)
            .or_insert_with(|| BTreeSet::from([keep]));
        for &q in &dropped {
            self.rep.insert(q, keep);
        }
        kept.extend(dropped);
        keep
    }

    pub fn is_identity(&self) -> bool {
        self.rep.is_empty()
    }
}

/// An unordered state pair (`low <= high`) with its divergence flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairKey {
    pub low: StateId,
    pub high: StateId,
    pub diverged: bool,
}

impl PairKey {
    fn oriented(x: StateId, y: StateId, diverged: bool) -> (PairKey, bool) {
        if x <= y {
            (
                PairKey {
                    low: x,
                    high: y,
                    diverged,
                },
                false,
            )
        } else {
            (
                PairKey {
                    low: y,
                    high: x,
                    diverged,
                },
                true,
            )
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BackPointer {
    Root,
    /// `edges.0` leads into `low`, `edges.1` into `high`. When `swapped`,
    /// the `low` side continues the predecessor's `high` side.
    Step {
        pred: PairKey,
        edges: (EdgeId, EdgeId),
        swapped: bool,
    },
    /// Obtained from `from` by substituting alias-equivalent states.
    Alias {
        from: PairKey,
        swapped: bool,
    },
}

/// Reachable pairs of the squared automaton, with back-pointers.
#[derive(Debug, Clone)]
pub struct PairSearchState {
    aliases: AliasMap,
    reached: BTreeMap<PairKey, BackPointer>,
    order: Vec<PairKey>,
    frontier: VecDeque<PairKey>,
    /// Reached pairs by the states they contain, in discovery order.
    by_state: BTreeMap<StateId, Vec<PairKey>>,
    /// Outgoing edges of the searched machine.
    index: BTreeMap<StateId, Vec<EdgeId>>,
}

/// A point in a search's history that it can be rolled back to.
#[derive(Debug, Clone)]
pub struct SearchMark {
    reached: usize,
    aliases: AliasMap,
}

impl PairSearchState {
    pub fn aliases(&self) -> &AliasMap {
        &self.aliases
    }

    pub fn reached(&self) -> BTreeSet<PairKey> {
        self.reached.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.reached.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reached.is_empty()
    }

    pub fn contains(&self, key: &PairKey) -> bool {
        self.reached.contains_key(key)
    }

    /// `true` iff `x != y` and both occur together in some reached pair,
    /// i.e. some input leads to both of them.
    pub fn co_reachable(&self, x: StateId, y: StateId) -> bool {
        if x == y {
            return false;
        }
        let (low, high) = if x < y { (x, y) } else { (y, x) };
        [false, true].iter().any(|&diverged| {
            self.reached.contains_key(&PairKey {
                low,
                high,
                diverged,
            })
        })
    }

    pub fn mark(&self) -> SearchMark {
        SearchMark {
            reached: self.order.len(),
            aliases: self.aliases.clone(),
        }
    }

    /// Forgets every pair and alias added since `mark` was taken.
    pub fn rollback(&mut self, mark: SearchMark) {
        for key in self.order.drain(mark.reached..).rev() {
            self.reached.remove(&key);
            for q in [key.low, key.high]
                .into_iter()
                .take(if key.low == key.high { 1 } else { 2 })
            {
                if let Some(v) = self.by_state.get_mut(&q) {
                    v.pop();
                }
            }
        }
        self.frontier.clear();
        self.aliases = mark.aliases;
    }

    fn insert(&mut self, key: PairKey, bp: BackPointer) -> bool {
        if self.reached.contains_key(&key) {
            return false;
        }
        self.reached.insert(key, bp);
        self.order.push(key);
        self.by_state.entry(key.low).or_default().push(key);
        if key.high != key.low {
            self.by_state.entry(key.high).or_default().push(key);
        }
        self.frontier.push_back(key);
        true
    }

    /// Inserts `key` and all its alias substitutes.
    fn add(&mut self, key: PairKey, bp: BackPointer) {
        if self.insert(key, bp) {
            self.close(key);
        }
    }

    fn close(&mut self, key: PairKey) {
        let lows = self.aliases.class(key.low);
        let highs = self.aliases.class(key.high);
        if lows.len() == 1 && highs.len() == 1 {
            return;
        }
        for &x in &lows {
            for &y in &highs {
                let (k, swapped) = PairKey::oriented(x, y, key.diverged);
                self.insert(k, BackPointer::Alias { from: key, swapped });
            }
        }
    }

    fn class_edges(&self, index: &BTreeMap<StateId, Vec<EdgeId>>, q: StateId) -> Vec<EdgeId> {
        let mut edges: Vec<EdgeId> = self
            .aliases
            .class(q)
            .iter()
            .flat_map(|m| index.get(m).into_iter().flatten().copied())
            .collect();
        edges.sort_unstable();
        edges
    }

    fn run(&mut self, t: &Transducer) {
        let index = std::mem::take(&mut self.index);
        self.run_with(t, &index);
        self.index = index;
    }

    fn run_with(&mut self, t: &Transducer, index: &BTreeMap<StateId, Vec<EdgeId>>) {
        let edges = t.transitions();
        while let Some(key) = self.frontier.pop_front() {
            let lows = self.class_edges(index, key.low);
            if !key.diverged {
                for (n, &e1) in lows.iter().enumerate() {
                    let a = &edges[e1];
                    let (k, _) = PairKey::oriented(a.dst, a.dst, false);
                    self.add(
                        k,
                        BackPointer::Step {
                            pred: key,
                            edges: (e1, e1),
                            swapped: false,
                        },
                    );
                    for &e2 in &lows[n + 1..] {
                        let b = &edges[e2];
                        if a.symbol != b.symbol {
                            continue;
                        }
                        self.step(key, e1, e2, a.dst, b.dst);
                    }
                }
            } else {
                let highs = self.class_edges(index, key.high);
                for &e1 in &lows {
                    for &e2 in &highs {
                        let (a, b) = (&edges[e1], &edges[e2]);
                        if a.symbol == b.symbol {
                            self.step(key, e1, e2, a.dst, b.dst);
                        }
                    }
                }
            }
        }
    }

    fn step(&mut self, pred: PairKey, e_low: EdgeId, e_high: EdgeId, x: StateId, y: StateId) {
        let (k, swapped) = PairKey::oriented(x, y, true);
        let edges = if swapped {
            (e_high, e_low)
        } else {
            (e_low, e_high)
        };
        self.add(
            k,
            BackPointer::Step {
                pred,
                edges,
                swapped,
            },
        );
    }

    /// Two edge sequences from the initial state leading to the two sides of
    /// `key` (`.0` ends at `key.low`, `.1` at `key.high`).
    fn reconstruct(&self, key: PairKey) -> (Vec<EdgeId>, Vec<EdgeId>) {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        let mut flip = false;
        let mut cur = key;
        loop {
            match self.reached[&cur] {
                BackPointer::Root => break,
                BackPointer::Alias { from, swapped } => {
                    flip ^= swapped;
                    cur = from;
                }
                BackPointer::Step {
                    pred,
                    edges,
                    swapped,
                } => {
                    if flip {
                        a.push(edges.1);
                        b.push(edges.0);
                    } else {
                        a.push(edges.0);
                        b.push(edges.1);
                    }
                    flip ^= swapped;
                    cur = pred;
                }
            }
        }
        a.reverse();
        b.reverse();
        (a, b)
    }
}

/// Reachable pairs of the squared automaton of `t` under `aliases`.
pub fn square_reach(t: &Transducer, aliases: AliasMap) -> PairSearchState {
    let mut st = PairSearchState {
        aliases,
        reached: BTreeMap::new(),
        order: Vec::new(),
        frontier: VecDeque::new(),
        by_state: BTreeMap::new(),
        index: t.out_index(),
    };
    let q0 = t.initial();
    st.add(
        PairKey {
            low: q0,
            high: q0,
            diverged: false,
        },
        BackPointer::Root,
    );
    st.run(t);
    st
}

/// Identifies `keep` and `drop`, adds the pairs obtained by substituting one
/// for the other in already reached pairs, and continues the search from the
/// new pairs only. `t` must be the machine `st` was built for.
pub fn merge_update(st: &mut PairSearchState, t: &Transducer, keep: StateId, drop: StateId) {
    st.aliases.union(keep, drop);
    let mut touched: Vec<PairKey> = st
        .aliases
        .class(keep)
        .iter()
        .flat_map(|q| st.by_state.get(q).into_iter().flatten().copied())
        .collect();
    let mut seen = BTreeSet::new();
    touched.retain(|k| seen.insert(*k));
    for key in touched {
        st.close(key);
    }
    st.run(t);
}

/// Two distinct transition sequences from the initial state reading the same
/// input. Edges are indices into the transitions of the searched machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbiguousPathPair {
    pub input: String,
    pub path_a: Vec<EdgeId>,
    pub path_b: Vec<EdgeId>,
}

impl AmbiguousPathPair {
    pub fn paths(&self, t: &Transducer) -> (Path, Path) {
        let mk = |p: &[EdgeId]| {
            Path::new(
                t.initial(),
                p.iter().map(|&e| t.transitions()[e].clone()).collect(),
            )
        };
        (mk(&self.path_a), mk(&self.path_b))
    }

    pub fn len(&self) -> usize {
        self.path_a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path_a.is_empty()
    }
}

fn class_accepting(t: &Transducer, aliases: &AliasMap, q: StateId) -> bool {
    aliases.class(q).iter().any(|&m| t.is_accepting(m))
}

/// Shortest continuation from the class of `from` to an accepting class.
fn path_to_acceptance(t: &Transducer, aliases: &AliasMap, from: StateId) -> Option<Vec<EdgeId>> {
    let index = t.out_index();
    let start = aliases.find(from);
    let mut prev: BTreeMap<StateId, Option<(StateId, EdgeId)>> = BTreeMap::from([(start, None)]);
    let mut queue = VecDeque::from([start]);
    while let Some(r) = queue.pop_front() {
        if class_accepting(t, aliases, r) {
            let mut edges = Vec::new();
            let mut cur = r;
            while let Some(Some((p, e))) = prev.get(&cur) {
                edges.push(*e);
                cur = *p;
            }
            edges.reverse();
            return Some(edges);
        }
        let mut next: Vec<(StateId, EdgeId)> = aliases
            .class(r)
            .iter()
            .flat_map(|m| index.get(m).into_iter().flatten().copied())
            .map(|e| (aliases.find(t.transitions()[e].dst), e))
            .collect();
        next.sort_unstable();
        for (d, e) in next {
            if let std::collections::btree_map::Entry::Vacant(v) = prev.entry(d) {
                v.insert(Some((r, e)));
                queue.push_back(d);
            }
        }
    }
    None
}

/// The first witness of ambiguity in discovery order, if any.
pub fn find_ambiguity(t: &Transducer, st: &PairSearchState) -> Option<AmbiguousPathPair> {
    first_witness(t, st, 0)
}

/// Like [`find_ambiguity`], but only pairs reached after `mark` are
/// considered. Sufficient after [`merge_update`] when the search had no
/// witness at `mark` and carried no aliases.
pub fn find_ambiguity_since(
    t: &Transducer,
    st: &PairSearchState,
    mark: &SearchMark,
) -> Option<AmbiguousPathPair> {
    first_witness(t, st, mark.reached)
}

fn first_witness(t: &Transducer, st: &PairSearchState, from: usize) -> Option<AmbiguousPathPair> {
    let aliases = &st.aliases;
    let witness = st.order[from..].iter().copied().find(|k| {
        k.diverged
            && (aliases.same(k.low, k.high)
                || (class_accepting(t, aliases, k.low) && class_accepting(t, aliases, k.high)))
    })?;
    let (mut a, mut b) = st.reconstruct(witness);
    if aliases.same(witness.low, witness.high) && !class_accepting(t, aliases, witness.low) {
        let tail = path_to_acceptance(t, aliases, witness.low)?;
        a.extend(&tail);
        b.extend(&tail);
    }
    let input = a.iter().map(|&e| t.transitions()[e].symbol).collect();
    Some(AmbiguousPathPair {
        input,
        path_a: a,
        path_b: b,
    })
}

/// Convenience: search `t` without aliases.
pub fn ambiguity_witness(t: &Transducer) -> Option<AmbiguousPathPair> {
    find_ambiguity(t, &square_reach(t, AliasMap::new()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(a: u32, b: u32, diverged: bool) -> PairKey {
        PairKey::oriented(StateId(a), StateId(b), diverged).0
    }

    #[test]
    fn deterministic_chain_has_only_diagonal_pairs() {
        let t = Transducer::build(0, &[2], &[(0, 'a', 1, "x"), (1, 'b', 2, "y")]);
        let st = square_reach(&t, AliasMap::new());
        assert!(st.reached().iter().all(|k| k.low == k.high && !k.diverged));
        assert_eq!(st.len(), 3);
        assert!(find_ambiguity(&t, &st).is_none());
    }

    #[test]
    fn one_divergence_step() {
        let t = Transducer::build(0, &[1, 2], &[(0, 'a', 1, "x"), (0, 'a', 2, "y")]);
        let st = square_reach(&t, AliasMap::new());
        assert!(st.contains(&key(1, 2, true)));
        let w = find_ambiguity(&t, &st).unwrap();
        assert_eq!(w.input, "a");
        let (pa, pb) = w.paths(&t);
        assert_ne!(pa, pb);
        assert_eq!(pa.start, StateId(0));
        let mut ends = [pa.end(), pb.end()];
        ends.sort();
        assert_eq!(ends, [StateId(1), StateId(2)]);
    }

    #[test]
    fn aliases_connect_pairs() {
        let t = Transducer::build(
            0,
            &[3, 4],
            &[
                (0, 'a', 1, "x"),
                (0, 'b', 2, "y"),
                (1, 'c', 3, "z"),
                (2, 'c', 4, "w"),
            ],
        );
        let mut aliases = AliasMap::new();
        aliases.union(StateId(1), StateId(2));
        let st = square_reach(&t, aliases);
        assert!(st.contains(&key(3, 4, true)));
    }

    #[test]
    fn reconvergence_witness_extends_to_acceptance() {
        let t = Transducer::build(
            0,
            &[4],
            &[
                (0, 'a', 1, "x"),
                (0, 'a', 2, "y"),
                (1, 'b', 3, "z"),
                (2, 'b', 3, "w"),
                (3, 'c', 4, ""),
            ],
        );
        let w = ambiguity_witness(&t).unwrap();
        assert_eq!(w.input, "abc");
        let (pa, pb) = w.paths(&t);
        assert!(pa.is_chained() && pb.is_chained());
        assert_eq!(pa.end(), StateId(4));
        assert_eq!(pb.end(), StateId(4));
    }

    #[test]
    fn two_length_two_paths() {
        let t = Transducer::build(
            0,
            &[3],
            &[
                (0, 'a', 1, "x"),
                (0, 'a', 2, "y"),
                (1, 'b', 3, "z"),
                (2, 'b', 3, "w"),
            ],
        );
        let w = ambiguity_witness(&t).unwrap();
        assert_eq!(w.input, "ab");
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn merge_update_adds_substituted_pair() {
        // reached contains {1,3}; merging 1 and 2 must add {2,3}
        let t = Transducer::build(
            0,
            &[1, 2, 3],
            &[(0, 'a', 1, "x"), (0, 'a', 3, "y"), (0, 'b', 2, "z")],
        );
        let mut st = square_reach(&t, AliasMap::new());
        assert!(st.contains(&key(1, 3, true)));
        assert!(!st.contains(&key(2, 3, true)));
        merge_update(&mut st, &t, StateId(1), StateId(2));
        assert!(st.contains(&key(2, 3, true)));
        let scratch = square_reach(&t, st.aliases().clone());
        assert_eq!(st.reached(), scratch.reached());
    }

    #[test]
    fn merge_of_unreached_states_changes_nothing() {
        let mut t = Transducer::build(0, &[1], &[(0, 'a', 1, "x")]);
        t.add_state(StateId(7));
        t.add_state(StateId(8));
        let mut st = square_reach(&t, AliasMap::new());
        let before = st.reached();
        merge_update(&mut st, &t, StateId(7), StateId(8));
        assert_eq!(st.reached(), before);
    }

    #[test]
    fn alias_map_classes() {
        let mut m = AliasMap::new();
        assert!(m.is_identity());
        assert_eq!(m.union(StateId(5), StateId(3)), StateId(3));
        assert_eq!(m.union(StateId(1), StateId(5)), StateId(1));
        assert_eq!(
            m.class(StateId(3)),
            vec![StateId(1), StateId(3), StateId(5)]
        );
        assert_eq!(m.find(StateId(5)), StateId(1));
        assert_eq!(m.find(StateId(9)), StateId(9));
    }
}
