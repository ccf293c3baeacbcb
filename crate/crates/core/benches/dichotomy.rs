//! Sequential versus data-parallel execution of the batch loops: subset
//! enumeration in the kernel oracle, cover verification, and whole-suite
//! oracle runs.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sigma_scope::cli::oracle::oracle_checks;
use sigma_scope::cli::{parse_definitions, FIXTURE_SUITE};
use sigma_scope::dichotomy::kernel::kernel_oracle_with;
use sigma_scope::exec::Exec;
use sigma_scope::random::{random_ntree, rng};
use sigma_scope::witness::verify_cover_with;
use sigma_scope::{classify, Ideal, Method, Verdict};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn kernel_oracle(c: &mut Criterion) {
    let mut r = rng(11);
    // largest of a batch, so the subset enumeration has real work
    let tree = (0..200)
        .map(|_| random_ntree(&mut r, 12))
        .max_by_key(|t| t.len())
        .unwrap();
    let ideal = Ideal::fin();
    let mut group = c.benchmark_group("kernel_oracle");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, tree.len()), &exec, |b, &exec| {
            b.iter(|| kernel_oracle_with(black_box(&tree), &ideal, 12, exec).unwrap())
        });
    }
    group.finish();
}

fn verify_cover(c: &mut Criterion) {
    let defs = parse_definitions(FIXTURE_SUITE).unwrap();
    let s = defs.pair_tree("COMB").unwrap();
    let Verdict::SmallCover(scheme) = classify(&s, &Ideal::fin(), Method::Kernel).unwrap().verdict else {
        panic!("COMB is σ-compact");
    };
    let mut group = c.benchmark_group("verify_cover");
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| verify_cover_with(black_box(&scheme), 5, 8, 8, exec)));
    }
    group.finish();
}

fn suite_oracle(c: &mut Criterion) {
    let defs = parse_definitions(FIXTURE_SUITE).unwrap();
    let trees: Vec<_> = defs
        .tree_names()
        .iter()
        .map(|n| defs.pair_tree(n).unwrap())
        .collect();
    let ideal = Ideal::fin();
    let mut group = c.benchmark_group("suite_oracle");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                trees
                    .iter()
                    .map(|s| oracle_checks(s, &ideal, 4, 8, 8, exec))
                    .collect::<Vec<_>>()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, kernel_oracle, verify_cover, suite_oracle);
criterion_main!(benches);
