use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use twistss_bench::{bundled_case, dense_matrix};
use twistss_core::library::random_case;
use twistss_core::linalg::rref;
use twistss_core::{twisted_cohomology, SpectralSequence};

fn linalg(c: &mut Criterion) {
    let mut g = c.benchmark_group("rref");
    for n in [16, 32, 48] {
        let m = dense_matrix(n, n + 4);
        g.bench_function(format!("{n}x{}", n + 4), |b| b.iter(|| rref(black_box(&m))));
    }
    g.finish();
}

fn twisted(c: &mut Criterion) {
    let mut g = c.benchmark_group("twisted_cohomology");
    for (name, twist) in [("torus5", "e1^e2^e3"), ("massey_s3", "a"), ("mixed", "a + b")] {
        let (m, h) = bundled_case(name, twist);
        g.bench_function(name, |b| {
            b.iter(|| twisted_cohomology(black_box(&m), black_box(&h)).unwrap())
        });
    }
    g.finish();
}

fn pages(c: &mut Criterion) {
    let mut g = c.benchmark_group("all_pages");
    g.sample_size(20);
    for (name, twist) in [("torus5", "e1^e2^e3"), ("massey_s2", "a"), ("mixed", "a + b")] {
        let (m, h) = bundled_case(name, twist);
        g.bench_function(name, |b| {
            b.iter(|| {
                let ss = SpectralSequence::new(&m, &h);
                black_box(
                    (1..=ss.stable_index())
                        .map(|r| ss.page(r).unwrap().dims())
                        .collect::<Vec<_>>(),
                )
            })
        });
    }
    let rc = (0..)
        .map(|seed| random_case(seed).unwrap())
        .find(|rc| rc.model.total_dim() >= 32)
        .unwrap();
    g.bench_function(format!("random ({} dims)", rc.model.total_dim()), |b| {
        b.iter(|| {
            let ss = SpectralSequence::new(&rc.model, &rc.twist);
            black_box(
                (1..=ss.stable_index())
                    .map(|r| ss.page(r).unwrap().dims())
                    .collect::<Vec<_>>(),
            )
        })
    });
    g.finish();
}

criterion_group!(benches, linalg, twisted, pages);
criterion_main!(benches);
