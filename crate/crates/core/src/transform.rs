//! Closure constructions on transducers: the reduction of a partial machine
//! to a total one via a reject symbol, the powerset construction that makes a
//! functional machine unambiguous, and the helpers both rely on.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::transducer::{StateId, Transducer, Transition};

/// A nondeterministic finite acceptor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    pub states: BTreeSet<StateId>,
    pub alphabet: BTreeSet<char>,
    pub initial: StateId,
    pub accepting: BTreeSet<StateId>,
    pub transitions: BTreeSet<(StateId, char, StateId)>,
}

impl Nfa {
    pub fn accepts(&self, word: &str) -> bool {
        let mut current = BTreeSet::from([self.initial]);
        for c in word.chars() {
            current = self.step(&current, c);
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|q| self.accepting.contains(q))
    }

    fn step(&self, from: &BTreeSet<StateId>, c: char) -> BTreeSet<StateId> {
        self.transitions
            .iter()
            .filter(|(s, a, _)| *a == c && from.contains(s))
            .map(|&(_, _, d)| d)
            .collect()
    }

    /// Deterministic when every (state, symbol) has at most one successor.
    pub fn is_deterministic(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.transitions
            .iter()
            .all(|&(s, a, _)| seen.insert((s, a)))
    }

    /// Complete when every (state, symbol) has at least one successor.
    pub fn is_complete(&self) -> bool {
        self.states.iter().all(|&q| {
            self.alphabet
                .iter()
                .all(|&a| self.transitions.iter().any(|&(s, b, _)| s == q && b == a))
        })
    }
}

/// A state of the powerset construction: a state of the source machine
/// together with the set of source states reachable on the same input.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PowersetState {
    pub base: StateId,
    pub context: BTreeSet<StateId>,
}

/// The acceptor of the domain of `t`; outputs are discarded.
pub fn input_projection(t: &Transducer) -> Nfa {
    Nfa {
        states: t.states().clone(),
        alphabet: t.input_alphabet().clone(),
        initial: t.initial(),
        accepting: t.accepting().clone(),
        transitions: t
            .transitions()
            .iter()
            .map(|e| (e.src, e.symbol, e.dst))
            .collect(),
    }
}

/// Subset construction followed by complementation. The result is a complete
/// DFA over the alphabet of `n` accepting exactly the words `n` rejects.
pub fn complement_dfa(n: &Nfa) -> Nfa {
    let start = BTreeSet::from([n.initial]);
    let mut ids: BTreeMap<BTreeSet<StateId>, StateId> = BTreeMap::new();
    ids.insert(start.clone(), StateId(0));
    let mut queue = VecDeque::from([start]);
    let mut transitions = BTreeSet::new();
    let mut accepting = BTreeSet::new();
    while let Some(subset) = queue.pop_front() {
        let id = ids[&subset];
        if !subset.iter().any(|q| n.accepting.contains(q)) {
            accepting.insert(id);
        }
        for &c in &n.alphabet {
            let next = n.step(&subset, c);
            let next_id = match ids.get(&next) {
                Some(&i) => i,
                None => {
                    let i = StateId(ids.len() as u32);
                    ids.insert(next.clone(), i);
                    queue.push_back(next);
                    i
                }
            };
            transitions.insert((id, c, next_id));
        }
    }
    Nfa {
        states: ids.values().copied().collect(),
        alphabet: n.alphabet.clone(),
        initial: StateId(0),
        accepting,
        transitions,
    }
}

/// Copies the states of `t` into `out` under `offset`, returning the mapping.
fn embed(out: &mut Transducer, t: &Transducer, offset: u32) -> BTreeMap<StateId, StateId> {
    let map: BTreeMap<StateId, StateId> = t
        .states()
        .iter()
        .enumerate()
        .map(|(i, &q)| (q, StateId(offset + i as u32)))
        .collect();
    for (&q, &m) in &map {
        out.set_accepting(m, t.is_accepting(q));
    }
    for e in t.transitions() {
        out.push_transition(Transition::new(
            map[&e.src],
            e.symbol,
            map[&e.dst],
            e.output.clone(),
        ));
    }
    map
}

/// Union of two relations. A fresh initial state copies the out-transitions
/// of both initial states; it accepts iff either operand's initial does.
pub fn union(a: &Transducer, b: &Transducer) -> Transducer {
    let mut out = Transducer::new(StateId(0))
        .with_input_alphabet(a.input_alphabet().iter().chain(b.input_alphabet()).copied())
        .with_output_alphabet(
            a.output_alphabet()
                .iter()
                .chain(b.output_alphabet())
                .copied(),
        );
    let map_a = embed(&mut out, a, 1);
    let map_b = embed(&mut out, b, 1 + a.num_states() as u32);
    out.set_accepting(
        StateId(0),
        a.is_accepting(a.initial()) || b.is_accepting(b.initial()),
    );
    for (t, map) in [(a, &map_a), (b, &map_b)] {
        for (_, e) in t.outgoing(t.initial()) {
            out.push_transition(Transition::new(
                StateId(0),
                e.symbol,
                map[&e.dst],
                e.output.clone(),
            ));
        }
    }
    out
}

/// Makes a functional machine total on non-empty inputs: every non-empty
/// input rejected by `t` is mapped to the single-symbol output `reject`.
/// Whether `(ε, ε)` belongs to the relation is left as in `t`.
pub fn totalize(t: &Transducer, reject: char) -> Result<Transducer> {
    if t.output_alphabet().contains(&reject) {
        return Err(Error::ReservedSymbol(reject));
    }
    let negated = complement_dfa(&input_projection(t));

    // The negated acceptor becomes a transducer emitting `reject` on the
    // first symbol only. Its initial state is duplicated so that the reject
    // output cannot be re-emitted by cycles through the initial state.
    let mut neg = Transducer::new(StateId(0))
        .with_input_alphabet(t.input_alphabet().iter().copied())
        .with_output_alphabet([reject]);
    let shift = |q: StateId| StateId(q.0 + 1);
    for &q in &negated.states {
        neg.set_accepting(shift(q), negated.accepting.contains(&q));
    }
    let reject_str = reject.to_string();
    for &(s, c, d) in &negated.transitions {
        neg.push_transition(Transition::new(shift(s), c, shift(d), ""));
        if s == negated.initial {
            neg.push_transition(Transition::new(StateId(0), c, shift(d), reject_str.clone()));
        }
    }
    let mut total = union(t, &neg);
    total.set_accepting(total.initial(), t.is_accepting(t.initial()));
    total.extend_output_alphabet([reject]);
    Ok(total.trim())
}

type ChoiceKey = (StateId, char, BTreeSet<StateId>);

/// Powerset construction that turns a functional machine into an
/// unambiguous one defining the same relation.
///
/// Among transitions entering the same powerset state over the same symbol
/// from states sharing a context, only the one from the least source state is
/// kept; among accepting powerset states sharing a context only the least
/// keeps acceptance.
pub fn disambiguate(t: &Transducer) -> Transducer {
    let index = t.out_index();
    let start = PowersetState {
        base: t.initial(),
        context: BTreeSet::from([t.initial()]),
    };
    let mut ids: BTreeMap<PowersetState, StateId> = BTreeMap::new();
    let mut order: Vec<PowersetState> = Vec::new();
    ids.insert(start.clone(), StateId(0));
    order.push(start.clone());
    let mut queue = VecDeque::from([start]);

    // (target, symbol, source context) -> (source base, output, source id)
    let mut chosen: BTreeMap<ChoiceKey, (StateId, String, StateId)> = BTreeMap::new();

    while let Some(ps) = queue.pop_front() {
        let src_id = ids[&ps];
        for &c in t.input_alphabet() {
            let next_context: BTreeSet<StateId> = ps
                .context
                .iter()
                .flat_map(|q| index[q].iter().map(|&e| &t.transitions()[e]))
                .filter(|e| e.symbol == c)
                .map(|e| e.dst)
                .collect();
            for &e in &index[&ps.base] {
                let edge = &t.transitions()[e];
                if edge.symbol != c {
                    continue;
                }
                let target = PowersetState {
                    base: edge.dst,
                    context: next_context.clone(),
                };
                let dst_id = match ids.get(&target) {
                    Some(&i) => i,
                    None => {
                        let i = StateId(ids.len() as u32);
                        ids.insert(target.clone(), i);
                        order.push(target.clone());
                        queue.push_back(target);
                        i
                    }
                };
                let key = (dst_id, c, ps.context.clone());
                let candidate = (ps.base, edge.output.clone(), src_id);
                match chosen.get(&key) {
                    Some(existing) if existing.0 <= candidate.0 => {}
                    _ => {
                        chosen.insert(key, candidate);
                    }
                }
            }
        }
    }

    let mut out = Transducer::new(StateId(0))
        .with_input_alphabet(t.input_alphabet().iter().copied())
        .with_output_alphabet(t.output_alphabet().iter().copied());
    let mut accepting_context: BTreeSet<&BTreeSet<StateId>> = BTreeSet::new();
    // `order` is discovery order; acceptance goes to the least base per context.
    let mut by_base: Vec<(&PowersetState, StateId)> = order.iter().map(|p| (p, ids[p])).collect();
    by_base.sort_by(|x, y| x.0.base.cmp(&y.0.base).then(x.1.cmp(&y.1)));
    for (ps, id) in by_base {
        out.add_state(id);
        if t.is_accepting(ps.base) && accepting_context.insert(&ps.context) {
            out.set_accepting(id, true);
        }
    }
    let mut edges: Vec<Transition> = chosen
        .into_iter()
        .map(|((dst, c, _), (_, output, src))| Transition::new(src, c, dst, output))
        .collect();
    edges.sort();
    for e in edges {
        out.push_transition(e);
    }
    out.trim()
}
