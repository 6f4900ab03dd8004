use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use irisval::encoding::normalize;
use irisval::synthetic::textured_iris;
use irisval::{segment_iris, BoundarySpec, IrisEncoder};

fn bench_encoding(c: &mut Criterion) {
    let img = textured_iris(7);
    let spec = BoundarySpec::default();
    let encoder = IrisEncoder::default();
    let b = segment_iris(&img, &spec).expect("synthetic frame segments");
    let n = normalize(&img, &b).expect("normalizes");
    c.bench_function("segment 256x256 frame", |bn| bn.iter(|| segment_iris(black_box(&img), &spec)));
    c.bench_function("log-gabor encode", |bn| bn.iter(|| encoder.encode(black_box(&n))));
    c.bench_function("image to code", |bn| bn.iter(|| encoder.encode_image(black_box(&img), &spec)));
}

criterion_group!(benches, bench_encoding);
criterion_main!(benches);
