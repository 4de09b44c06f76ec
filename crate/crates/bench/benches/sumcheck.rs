use criterion::{criterion_group, criterion_main, Criterion};
use endokit_core::groups;
use endokit_core::kottwitz::verify_sum_formula;
use endokit_core::EndoTriple;
use num::BigInt;
use std::sync::Arc;

fn bench_sum_check(c: &mut Criterion) {
    let g = Arc::new(groups::gl(4));
    let trivial = EndoTriple::trivial(&g);
    let mu: Vec<BigInt> = [1, 1, 0, 0].iter().map(|&x| BigInt::from(x)).collect();
    let mut grp = c.benchmark_group("sum_check gl4 (1,1,0,0)");
    grp.sample_size(10);
    grp.bench_function("jobs=1", |bch| {
        bch.iter(|| verify_sum_formula(&g, &trivial, std::hint::black_box(&mu), 1))
    });
    grp.bench_function("jobs=4", |bch| {
        bch.iter(|| verify_sum_formula(&g, &trivial, std::hint::black_box(&mu), 4))
    });
    grp.finish();
}

criterion_group!(benches, bench_sum_check);
criterion_main!(benches);
