use criterion::{criterion_group, criterion_main, Criterion};
use ss3_bench::{element_pairs, generic_point_p2};
use ss3_core::fermat_curve::enumerate_points;
use ss3_core::field_tower::make_field;
use ss3_core::group_oracle::enumerate_g_m;
use ss3_core::intersection_atlas::intersection_census;
use std::hint::black_box;

fn field_mul(c: &mut Criterion) {
    for (p, m) in [(2u64, 6u32), (3, 4), (5, 3)] {
        let ctx = make_field(p, m).unwrap();
        let pairs = element_pairs(&ctx, 1024);
        c.bench_function(&format!("field_mul/p{p}/m{m}"), |b| {
            b.iter(|| pairs.iter().fold(ctx.one(), |acc, (x, y)| ctx.mul(&acc, &ctx.mul(x, y))))
        });
    }
}

fn curve(c: &mut Criterion) {
    c.bench_function("enumerate_points/p3/i3", |b| b.iter(|| enumerate_points(black_box(3), 3).unwrap().1.len()));
}

fn groups(c: &mut Criterion) {
    let (ctx, x) = generic_point_p2();
    let mut g = c.benchmark_group("groups");
    g.sample_size(10);
    g.bench_function("g_m/p2/generic", |b| b.iter(|| enumerate_g_m(&ctx, black_box(&x)).unwrap().order()));
    g.finish();
}

fn atlas(c: &mut Criterion) {
    let mut g = c.benchmark_group("atlas");
    g.sample_size(10);
    g.bench_function("census/p2", |b| b.iter(|| intersection_census(black_box(2)).unwrap().count));
    g.finish();
}

criterion_group!(benches, field_mul, curve, groups, atlas);
criterion_main!(benches);
