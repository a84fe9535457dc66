use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64 as C;
use torus_greens::lattice::{Lattice3, Twist3};
use torus_greens::lattice_sum::{green3, r3, EvalConfig, GreenMode, Strategy};
use torus_greens::monopole::{AbelianField, Grid, MonopoleConfig};

const METRIC: [[f64; 3]; 3] = [[1.0, 0.1, 0.0], [0.0, 0.9, 0.2], [0.1, 0.0, 1.1]];

fn series(c: &mut Criterion) {
    let l = Lattice3::new(1.0, 0.2, 1.1, -0.3, 0.1, 0.9).unwrap();
    let tw = Twist3::plain([0.2, 0.5, 0.9]);
    let x = [0.3, 0.7, 0.1];
    let mut group = c.benchmark_group("r3");
    for strategy in [Strategy::Ewald, Strategy::Direct] {
        for parallel in [false, true] {
            let cfg = EvalConfig::default().with_strategy(strategy).with_parallel(parallel);
            let id = BenchmarkId::new(strategy.as_str(), if parallel { "parallel" } else { "sequential" });
            group.bench_with_input(id, &cfg, |b, cfg| b.iter(|| r3(black_box(C::new(2.3, 0.7)), &METRIC, &x, &tw, &l, cfg).unwrap()));
        }
    }
    group.finish();

    let mut group = c.benchmark_group("green3_fourier");
    for parallel in [false, true] {
        let cfg = EvalConfig::default().with_parallel(parallel);
        group.bench_function(if parallel { "parallel" } else { "sequential" }, |b| {
            b.iter(|| green3(black_box(&x), &tw, &Lattice3::cubic(), GreenMode::Fourier, &cfg).unwrap())
        });
    }
    group.finish();
}

fn monopole_grid(c: &mut Criterion) {
    let grid = Grid::new([0.5, 0.2, 0.5], [1.5, 1.2, 1.5], 0.02).unwrap();
    let cfg = MonopoleConfig::quantized(2);
    let mut group = c.benchmark_group("dirac_grid");
    for parallel in [false, true] {
        group.bench_function(if parallel { "parallel" } else { "sequential" }, |b| {
            b.iter(|| AbelianField::dirac(grid, &cfg, parallel).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, series, monopole_grid);
criterion_main!(benches);
