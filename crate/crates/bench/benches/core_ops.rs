use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use np_core::bundled::{parse_curve, parse_family, CURVES, FAMILIES};
use np_core::lfunction::l_series;
use np_core::polygon::rat;
use np_core::{NewtonPolygon, RingSpec, WittElement};

fn source(table: &[(&'static str, &'static str)], name: &str) -> &'static str {
    table.iter().find(|(n, _)| *n == name).unwrap().1
}

fn polygons(c: &mut Criterion) {
    let polys: Vec<NewtonPolygon> = (0..16)
        .map(|i| NewtonPolygon::from_slopes(&(0..6).map(|j| rat((i * j) % 7, 1 + (i + j) % 4)).collect::<Vec<_>>()))
        .collect();
    c.bench_function("polygon_hull_16x6", |b| b.iter(|| NewtonPolygon::hull_of(black_box(&polys))));
    c.bench_function("polygon_exterior_3_of_6", |b| b.iter(|| black_box(&polys[5]).exterior_power(3).unwrap()));
}

fn witt(c: &mut Criterion) {
    for (p, f, m) in [(7u64, 1u32, 20u32), (3, 4, 12)] {
        let ring = RingSpec::new(p, f, 1, m).unwrap();
        let x = WittElement::from_coords(&ring, &(1..=f as i64).collect::<Vec<_>>()).unwrap();
        let y = WittElement::from_coords(&ring, &(0..f as i64).map(|i| 2 * i + 3).collect::<Vec<_>>()).unwrap();
        c.bench_function(&format!("witt_mul_p{p}_f{f}_M{m}"), |b| b.iter(|| black_box(&x) * black_box(&y)));
    }
}

fn point_counts(c: &mut Criterion) {
    let g2 = parse_curve(source(CURVES, "g2_f7")).unwrap();
    c.bench_function("zeta_genus2_f7", |b| b.iter(|| black_box(&g2).zeta().unwrap()));
    let e = parse_curve(source(CURVES, "ec_ord_f7")).unwrap();
    c.bench_function("count_ec_f7_deg3", |b| b.iter(|| black_box(&e).count_points(3).unwrap()));
}

fn lseries(c: &mut Criterion) {
    let fam = parse_family(source(FAMILIES, "legendre_7")).unwrap();
    let mut g = c.benchmark_group("l_series");
    g.sample_size(10);
    g.bench_function("legendre_7_order3_M4", |b| b.iter(|| l_series(black_box(&fam), 3, 4).unwrap()));
    g.finish();
    c.bench_function("jump_locus_legendre_7_deg2", |b| b.iter(|| black_box(&fam).jump_locus(2).unwrap()));
}

criterion_group!(benches, polygons, witt, point_counts, lseries);
criterion_main!(benches);
