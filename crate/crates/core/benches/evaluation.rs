use std::f64::consts::PI;
use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fracwave::basis::{interval_basis, rectangle_basis};
use fracwave::decay::log_grid;
use fracwave::observe::{ObservationMap, ObservationSpec};
use fracwave::solver::{FractionalProblem, InitialData, Quantity};
use fracwave::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn modal_factors(c: &mut Criterion) {
    let mut group = c.benchmark_group("modal_factors");
    for modes in [256usize, 4096] {
        let basis = Arc::new(interval_basis(PI, modes).unwrap());
        let data = InitialData::PolynomialBump { amplitude: 1.0 };
        for (name, exec) in MODES {
            let p = FractionalProblem::from_data(0.5, basis.clone(), &data, None, exec).unwrap();
            group.bench_with_input(BenchmarkId::new(name, modes), &p, |b, p| {
                b.iter(|| p.factors(Quantity::Field, black_box(37.0)).unwrap())
            });
        }
    }
    group.finish();
}

fn point_series(c: &mut Criterion) {
    let mut group = c.benchmark_group("point_series");
    group.sample_size(20);
    let basis = Arc::new(rectangle_basis(PI, PI, 32).unwrap());
    let data = InitialData::SmoothBump { center: vec![1.2, 1.7], radius: 0.8, amplitude: 1.0 };
    let times = log_grid(1e2, 1e6, 41).unwrap();
    let map = ObservationMap::new(ObservationSpec::point(vec![1.0, 2.0], Quantity::Field), &basis).unwrap();
    for (name, exec) in MODES {
        let p = FractionalProblem::from_data(0.7, basis.clone(), &data, None, exec).unwrap();
        group.bench_function(name, |b| b.iter(|| map.series(&p, black_box(&times), exec).unwrap()));
    }
    group.finish();
}

fn projection(c: &mut Criterion) {
    let mut group = c.benchmark_group("projection");
    group.sample_size(20);
    let basis = Arc::new(rectangle_basis(PI, PI, 32).unwrap());
    let data = InitialData::SmoothBump { center: vec![1.2, 1.7], radius: 0.8, amplitude: 1.0 };
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| fracwave::solver::project(&basis, black_box(&data), exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, modal_factors, point_series, projection);
criterion_main!(benches);
