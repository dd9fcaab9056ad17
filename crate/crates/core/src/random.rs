//! Seeded generators of small machines and sample sets for randomized tests.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ambiguity::ambiguity_witness;
use crate::oracle::{
    check_functional_up_to, check_local_prefix_preservation_up_to, generate_informant,
};
use crate::ptree::SampleSet;
use crate::transducer::{StateId, Transducer, Transition};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone)]
pub struct MachineShape {
    pub max_states: usize,
    pub input_alphabet: Vec<char>,
    pub output_alphabet: Vec<char>,
    pub max_output_len: usize,
    /// Chance that a given (state, symbol, state) triple carries an edge.
    pub edge_probability: f64,
    pub accept_probability: f64,
}

impl Default for MachineShape {
    fn default() -> Self {
        MachineShape {
            max_states: 5,
            input_alphabet: vec!['a', 'b'],
            output_alphabet: vec!['x', 'y'],
            max_output_len: 2,
            edge_probability: 0.3,
            accept_probability: 0.4,
        }
    }
}

fn random_word<R: Rng>(rng: &mut R, alphabet: &[char], max_len: usize) -> String {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

/// A random machine, trimmed. May be the single-state empty machine.
pub fn random_machine<R: Rng>(rng: &mut R, shape: &MachineShape) -> Transducer {
    let n = rng.gen_range(1..=shape.max_states) as u32;
    let mut t = Transducer::new(StateId(0))
        .with_input_alphabet(shape.input_alphabet.iter().copied())
        .with_output_alphabet(shape.output_alphabet.iter().copied());
    for q in 0..n {
        t.add_state(StateId(q));
        if rng.gen_bool(shape.accept_probability) {
            t.set_accepting(StateId(q), true);
        }
    }
    for src in 0..n {
        for &c in &shape.input_alphabet {
            for dst in 0..n {
                if rng.gen_bool(shape.edge_probability) {
                    let out = random_word(rng, &shape.output_alphabet, shape.max_output_len);
                    t.push_transition(Transition::new(StateId(src), c, StateId(dst), out));
                }
            }
        }
    }
    t.trim()
}

/// A random trim machine with at least one transition.
pub fn random_trim_machine<R: Rng>(rng: &mut R, shape: &MachineShape) -> Transducer {
    loop {
        let t = random_machine(rng, shape);
        if !t.transitions().is_empty() {
            return t;
        }
    }
}

/// A random trim machine that is functional on all inputs up to `bound`.
pub fn random_functional_machine<R: Rng>(
    rng: &mut R,
    shape: &MachineShape,
    bound: usize,
) -> Transducer {
    loop {
        let t = random_trim_machine(rng, shape);
        if check_functional_up_to(&t, bound).verdict {
            return t;
        }
    }
}

/// A random trim, unambiguous, functional and locally prefix-preserving
/// machine, with the last two properties checked up to `bound`.
pub fn random_conforming_machine<R: Rng>(
    rng: &mut R,
    shape: &MachineShape,
    bound: usize,
) -> Transducer {
    loop {
        let t = random_trim_machine(rng, shape);
        if ambiguity_witness(&t).is_none()
            && check_functional_up_to(&t, bound).verdict
            && check_local_prefix_preservation_up_to(&t, bound).verdict
        {
            return t;
        }
    }
}

/// A random nonempty subset of a conforming machine's informant up to
/// `max_len`. Inputs are never empty.
pub fn random_conforming_samples<R: Rng>(
    rng: &mut R,
    shape: &MachineShape,
    max_len: usize,
) -> SampleSet {
    loop {
        let t = random_conforming_machine(rng, shape, max_len);
        let informant =
            generate_informant(&t, max_len).expect("conforming machines are functional");
        let mut s = SampleSet::new();
        for (i, o) in informant {
            if !i.is_empty() && rng.gen_bool(0.6) {
                s.insert(i, o).expect("informant is functional");
            }
        }
        if !s.is_empty() {
            return s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generation_is_reproducible() {
        let shape = MachineShape::default();
        let a = random_trim_machine(&mut rng(7), &shape);
        let b = random_trim_machine(&mut rng(7), &shape);
        assert_eq!(a, b);
        assert!(a.is_trim());
    }

    #[test]
    fn conforming_machines_pass_checks() {
        let mut r = rng(3);
        let shape = MachineShape {
            max_states: 3,
            ..Default::default()
        };
        for _ in 0..5 {
            let t = random_conforming_machine(&mut r, &shape, 4);
            assert!(ambiguity_witness(&t).is_none());
            assert!(check_functional_up_to(&t, 4).verdict);
        }
    }
}
