use std::hint::black_box;

use bconv_core::atoms::{enumerate_atoms, half, ExponentRange};
use bconv_core::density::{iterate_self_similar, GridMeasure};
use bconv_core::exact::rat;
use bconv_core::scale_entropy::entropy_at_scale;
use bconv_core::{certified_roots, count_atoms, ft_eval, AlgebraicNumber, IntPolynomial};
use criterion::{criterion_group, criterion_main, Criterion};

fn golden() -> AlgebraicNumber {
    AlgebraicNumber::in_unit_interval(&IntPolynomial::from_i64(&[-1, 1, 1]).unwrap()).unwrap()
}

fn atoms(c: &mut Criterion) {
    let g = golden();
    c.bench_function("count_atoms golden n=20", |b| b.iter(|| count_atoms(black_box(&g), 20).unwrap()));
}

fn roots(c: &mut Criterion) {
    let lehmer = IntPolynomial::from_i64(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]).unwrap();
    c.bench_function("certified_roots lehmer 1e-12", |b| b.iter(|| certified_roots(black_box(&lehmer), 1e-12).unwrap()));
}

fn fourier(c: &mut Criterion) {
    let g = golden();
    let t = rat(1000, 7);
    c.bench_function("ft_eval golden t=1000/7", |b| b.iter(|| ft_eval(black_box(&g), &t, 1e-9).unwrap()));
}

fn scale_entropy(c: &mut Criterion) {
    let g = golden();
    let mu = enumerate_atoms(&g, ExponentRange::first(16).unwrap(), &half()).unwrap();
    c.bench_function("entropy_at_scale golden n=16 r=2^-10", |b| {
        b.iter(|| entropy_at_scale(black_box(&mu), 2f64.powi(-10)).unwrap())
    });
}

fn density(c: &mut Criterion) {
    let g = golden();
    let start = GridMeasure::point_mass(10).unwrap();
    c.bench_function("density golden depth=10 x20", |b| b.iter(|| iterate_self_similar(black_box(&g), 20, &start).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = atoms, roots, fourier, scale_entropy, density
}
criterion_main!(benches);
