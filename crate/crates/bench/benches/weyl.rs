use criterion::{criterion_group, criterion_main, Criterion};
use endokit_core::groups;
use endokit_core::kottwitz::weyl_orbit;
use endokit_core::root_datum::standard_levi;
use num::BigInt;
use std::collections::BTreeSet;
use std::sync::Arc;

fn bench_weyl_orbit(c: &mut Criterion) {
    let g = Arc::new(groups::gl(5));
    let full: BTreeSet<usize> = (0..g.brd.base.len()).collect();
    let levi = standard_levi(&g.brd, &full);
    let mu: Vec<BigInt> = [2, 1, 1, 0, 0].iter().map(|&x| BigInt::from(x)).collect();
    c.bench_function("weyl_orbit gl5 (2,1,1,0,0)", |bch| {
        bch.iter(|| weyl_orbit(&g, &levi, std::hint::black_box(&mu)))
    });
}

criterion_group!(benches, bench_weyl_orbit);
criterion_main!(benches);
