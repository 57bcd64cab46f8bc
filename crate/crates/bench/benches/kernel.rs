use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use orbicat::functor::build_translation_groupoid;
use orbicat::io::{cone_pair, GalleryParams};
use orbicat::morita::{check_morita, reconstruct_atlas, subatlas_inclusion_morphism};
use orbicat::numerics::{sign_real, CycNum};
use orbicat_bench::{atlas, composable_pairs, groupoid};
use std::sync::Arc;

fn numerics(c: &mut Criterion) {
    let z = CycNum::zeta(12, 1);
    let a = &CycNum::from_ratio(12, 3, 7) + &(&z * &CycNum::from_ratio(12, -2, 5));
    let b = &z.pow(5) + &CycNum::from_ratio(12, 1, 3);
    c.bench_function("cyc_mul_12", |bench| bench.iter(|| black_box(&a) * black_box(&b)));
    c.bench_function("cyc_inv_12", |bench| bench.iter(|| black_box(&a).checked_inv().unwrap()));
    let close = &(&z + &z.conj()) - &CycNum::from_ratio(12, 1732050807568877, 1_000_000_000_000_000);
    c.bench_function("sign_near_zero", |bench| bench.iter(|| sign_real(black_box(&close)).unwrap()));
}

fn groupoids(c: &mut Criterion) {
    let football = atlas(GalleryParams::football(2, 3));
    c.bench_function("build_football", |bench| bench.iter(|| build_translation_groupoid(football.clone()).unwrap()));
    let g = groupoid(GalleryParams::teardrop(3));
    let pairs = composable_pairs(&g, 64);
    c.bench_function("multiply_teardrop_64", |bench| {
        bench.iter(|| {
            for (a, b) in &pairs {
                black_box(g.multiply(a, b).unwrap());
            }
        })
    });
}

fn morita(c: &mut Criterion) {
    let sub = atlas(GalleryParams::cone(3));
    let full = Arc::new(cone_pair(3).unwrap());
    let m = subatlas_inclusion_morphism(&sub, &full).unwrap();
    c.bench_function("morita_cone_pair_50", |bench| bench.iter(|| check_morita(&m, 50, 1)));
    let g = groupoid(GalleryParams::football(2, 3));
    let mut group = c.benchmark_group("slow");
    group.sample_size(10);
    group.bench_function("reconstruct_football", |bench| bench.iter(|| reconstruct_atlas(&g, 2, 1).unwrap()));
    group.finish();
}

criterion_group!(benches, numerics, groupoids, morita);
criterion_main!(benches);
