use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};

use c2_core::catalog::{random_composable_pair, rng, small_categories};
use c2_core::fincat::file::BaseAssignment;
use c2_core::fincat::FinCat;
use c2_core::parser::{parse, Declaration};
use c2_core::profunctor::{compose_over, Composite, Coord, Profunctor};
use c2_core::semantics::Semantics;

fn wide_pairs() -> Vec<(Profunctor, Profunctor, Coord)> {
    let cats: Vec<_> = small_categories().into_iter().filter(|(_, c)| c.n_objects() >= 2).map(|(_, c)| Arc::new(c)).collect();
    let mut r = rng(99);
    (0..24).map(|_| random_composable_pair(&cats, &mut r, 3)).collect()
}

fn compose_all(pairs: &[(Profunctor, Profunctor, Coord)]) -> Vec<Composite> {
    pairs.iter().map(|(p, q, o)| compose_over(p, q, o).unwrap()).collect()
}

const CELL: &str = "red pairs [x:+A, y:+A, k:-A /\\ A] : # = beta_mu(k; a. <(x, mu b. <y | b : A>) | a : A /\\ A>)";

fn cell(sem: &Semantics) {
    let file = parse(CELL).unwrap();
    let Declaration::ReductionDecl { context, judgment, reduction, .. } = &file.declarations[0] else { unreachable!() };
    black_box(sem.reduction(context, reduction, Some(judgment)).unwrap());
}

/// Runs `f` on the default pool, and on a one-thread pool when the
/// parallel feature is on. Without it both labels run the sequential code.
fn both(c: &mut Criterion, name: &str, f: impl Fn() + Sync) {
    let mut g = c.benchmark_group(name);
    g.sample_size(10);
    g.bench_function("default", |b| b.iter(&f));
    #[cfg(feature = "parallel")]
    {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        g.bench_function("sequential", |b| b.iter(|| one.install(&f)));
    }
    g.finish();
}

fn benches(c: &mut Criterion) {
    let pairs = wide_pairs();
    both(c, "compose", || {
        black_box(compose_all(&pairs));
    });
    let sem = Semantics::new(BaseAssignment::uniform(FinCat::chain(2)));
    both(c, "reduction-cell", || cell(&sem));
}

criterion_group!(coend, benches);
criterion_main!(coend);
