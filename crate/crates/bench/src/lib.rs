//! Benchmark fixtures shared by the criterion benches.

use nfst_core::oracle::generate_informant;
use nfst_core::random::{random_trim_machine, rng, MachineShape};
use nfst_core::transform::totalize;
use nfst_core::Transducer;

/// A nondeterministic target whose first output depends on the next symbol.
pub fn lookahead() -> Transducer {
    let partial = Transducer::build(
        0,
        &[1, 3],
        &[(0, 'a', 1, "x"), (0, 'a', 2, "yz"), (2, 'b', 3, "")],
    )
    .with_input_alphabet(['a', 'b']);
    totalize(&partial, '#').expect("'#' is unused")
}

/// Subsequential target: counts `a`s modulo two and doubles `b`s.
pub fn parity() -> Transducer {
    Transducer::build(
        0,
        &[0, 1],
        &[
            (0, 'a', 1, "x"),
            (0, 'b', 0, "yy"),
            (1, 'a', 0, "x"),
            (1, 'b', 1, "y"),
        ],
    )
}

pub fn informant(t: &Transducer, max_len: usize) -> Vec<(String, String)> {
    generate_informant(t, max_len).expect("fixture targets are functional")
}

/// Seeded random machines with about `states` states and dense edges.
pub fn random_machines(count: usize, states: usize) -> Vec<Transducer> {
    let shape = MachineShape {
        max_states: states,
        edge_probability: 0.25,
        ..Default::default()
    };
    let mut r = rng(17);
    (0..count)
        .map(|_| random_trim_machine(&mut r, &shape))
        .collect()
}
