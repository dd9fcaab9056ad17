use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use nfst_bench::{informant, lookahead, parity, random_machines};
use nfst_core::ptree::build_prefix_tree;
use nfst_core::{ambiguity_witness, infer, LearnerConfig, SampleSet};

fn learner(c: &mut Criterion) {
    let mut g = c.benchmark_group("infer");
    g.sample_size(10);
    for (name, t) in [("parity", parity()), ("lookahead", lookahead())] {
        for n in [6usize, 8, 10] {
            let samples = informant(&t, n);
            g.bench_with_input(BenchmarkId::new(name, n), &samples, |b, s| {
                b.iter(|| infer(s.iter().cloned(), &LearnerConfig::default()).unwrap())
            });
        }
    }
    g.finish();
}

fn prefix_tree(c: &mut Criterion) {
    let samples = informant(&lookahead(), 10);
    let s = SampleSet::from_pairs(samples.iter().filter(|(i, _)| !i.is_empty()).cloned()).unwrap();
    c.bench_function("prefix_tree/lookahead/10", |b| {
        b.iter(|| build_prefix_tree(black_box(&s)).unwrap())
    });
}

fn ambiguity(c: &mut Criterion) {
    let machines = random_machines(50, 8);
    c.bench_function("ambiguity_witness/random8x50", |b| {
        b.iter(|| {
            machines
                .iter()
                .filter(|t| ambiguity_witness(t).is_some())
                .count()
        })
    });
}

criterion_group!(benches, learner, prefix_tree, ambiguity);
criterion_main!(benches);
