//! Assembly benchmarks: residual and Jacobian construction for both schemes,
//! plus the indexed-reduction helper against a plain sequential loop.
//!
//! Run `cargo bench` for the default (parallel) core and
//! `cargo bench --no-default-features` for the sequential core; comparing the
//! two reports shows the speedup of the data-parallel assembly path.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use entrofv::ddfv::{Combiner, DdfvProblem};
use entrofv::ddfv_mesh::DdfvMesh;
use entrofv::geom::Tensor;
use entrofv::kernels::MeanKind;
use entrofv::mesh::PrimalMesh;
use entrofv::newton::TimeStepScheme;
use entrofv::tpfa::TpfaProblem;

fn state(n: usize) -> Vec<f64> {
    (0..n).map(|i| 0.5 + 0.4 * ((i * 37 % 101) as f64 / 101.0)).collect()
}

fn bench_tpfa(c: &mut Criterion) {
    let mesh = PrimalMesh::generate_triangular(3).unwrap();
    let problem = TpfaProblem::new(mesh, |p| -p.x, None, MeanKind::Logarithmic, 1e-3).unwrap();
    let n = problem.n_cells();
    let u = state(n);
    let u_old = vec![1.0; n];
    let mut out = vec![0.0; n];
    c.bench_function("tpfa_residual", |b| {
        b.iter(|| TimeStepScheme::residual(&problem, black_box(&u), &u_old, &mut out))
    });
    c.bench_function("tpfa_jacobian", |b| b.iter(|| problem.jacobian(black_box(&u))));
}

fn bench_ddfv(c: &mut Criterion) {
    let primal = PrimalMesh::generate_cartesian(64, 64, [0.0, 1.0, 0.0, 1.0]).unwrap();
    let mesh = DdfvMesh::build(primal, &|_| Tensor::new(0.1, 0.0, 0.0, 1.0)).unwrap();
    let problem = DdfvProblem::new(
        mesh,
        |p| -p.y,
        MeanKind::Arithmetic,
        Combiner::Arithmetic,
        1e-3,
    )
    .unwrap();
    let n = problem.n_unknowns();
    let u = state(n);
    let u_old = vec![1.0; n];
    let mut out = vec![0.0; n];
    c.bench_function("ddfv_residual", |b| {
        b.iter(|| TimeStepScheme::residual(&problem, black_box(&u), &u_old, &mut out))
    });
    c.bench_function("ddfv_jacobian", |b| b.iter(|| problem.jacobian(black_box(&u))));
}

fn bench_reduction(c: &mut Criterion) {
    // A flux-like kernel: enough arithmetic per item for parallelism to pay.
    let n = 1 << 18;
    let kernel = |i: usize| {
        let x = 1.0 + (i % 977) as f64 / 977.0;
        let y = 1.0 + (i % 499) as f64 / 499.0;
        MeanKind::Logarithmic.value(x, y) * (x / y).ln()
    };
    c.bench_function("reduction_indexed", |b| {
        b.iter(|| entrofv::par::sum_indexed(black_box(n), kernel))
    });
    c.bench_function("reduction_sequential_loop", |b| {
        b.iter(|| (0..black_box(n)).map(kernel).sum::<f64>())
    });
}

criterion_group!(benches, bench_tpfa, bench_ddfv, bench_reduction);
criterion_main!(benches);
