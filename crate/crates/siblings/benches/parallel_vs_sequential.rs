//! Compares the rayon and sequential sample-map paths on the same workload:
//! the bridge-identity residual over a batch of de Sitter sample points.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use siblings::gallery::de_sitter;
use siblings::geometry::riemann_at;
#[cfg(feature = "parallel")]
use siblings::par::try_map_par;
use siblings::par::try_map_seq;
use siblings::sample::halton_box;
use siblings::SiblingError;

fn residual_at(entry: &siblings::gallery::GalleryEntry, p: &Vec<f64>) -> Result<f64, SiblingError> {
    let pg = riemann_at(&entry.pair.g, p)?;
    let pgl = riemann_at(&entry.pair.g_l, p)?;
    Ok(pgl.riemann.sub(&pg.riemann).max_abs())
}

fn bench_maps(c: &mut Criterion) {
    let entry = de_sitter(3, 1.0).expect("gallery entry");
    let mut group = c.benchmark_group("curvature_batch");
    for &count in &[32usize, 128, 512] {
        let samples = halton_box(entry.pair.chart(), count);
        group.bench_with_input(BenchmarkId::new("sequential", count), &samples, |b, s| {
            b.iter(|| try_map_seq(s, |p| residual_at(&entry, p)).unwrap())
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", count), &samples, |b, s| {
            b.iter(|| try_map_par(s, |p| residual_at(&entry, p)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_maps);
criterion_main!(benches);
