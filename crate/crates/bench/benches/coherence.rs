use std::collections::BTreeSet;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ssg_core::{build_msv, build_pav, build_ssv, coherence_score, cosine_clamped, Document, Sentence};

fn random_doc(n: usize, dimension: usize, seed: u64) -> Document {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sentences = (0..n)
        .map(|index| Sentence {
            index,
            tokens: Vec::new(),
            entities: BTreeSet::from([format!("e{index}"), format!("e{}", index + 1)]),
            vector: Some((0..dimension).map(|_| rng.gen_range(-1.0..1.0)).collect()),
        })
        .collect();
    Document { id: "bench".into(), sentences }
}

fn bench_cosine(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u: Vec<f64> = (0..300).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let v: Vec<f64> = (0..300).map(|_| rng.gen_range(-1.0..1.0)).collect();
    c.bench_function("cosine_clamped_d300", |b| {
        b.iter(|| cosine_clamped(black_box(&u), black_box(&v)).unwrap())
    });
}

fn bench_builders(c: &mut Criterion) {
    let mut group = c.benchmark_group("builders");
    for &n in &[50usize, 200, 1000] {
        let doc = random_doc(n, 300, 42);
        group.bench_with_input(BenchmarkId::new("msv_theta0", n), &doc, |b, doc| {
            b.iter(|| coherence_score(&build_msv(black_box(doc), 0.0)))
        });
        if n <= 200 {
            group.bench_with_input(BenchmarkId::new("ssv", n), &doc, |b, doc| {
                b.iter(|| coherence_score(&build_ssv(black_box(doc))))
            });
            group.bench_with_input(BenchmarkId::new("pav_alpha05", n), &doc, |b, doc| {
                b.iter(|| coherence_score(&build_pav(black_box(doc), 0.5)))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_cosine, bench_builders);
criterion_main!(benches);
