//! Same workloads under `Exec::Parallel` and `Exec::Sequential`. Without the
//! `parallel` feature both arms run sequentially.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use oppq_core::mer::QzmSystem;
use oppq_core::mpnum::Precision;
use oppq_core::oppq::{minimize_in_window, scan, uniform_grid, EnergyFunction, Problem};
use oppq_core::par::Exec;
use std::time::Duration;

const MODES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn qzm_problem(m_s: usize, exec: Exec) -> Problem {
    let p = Precision::new(120).unwrap();
    let sys = QzmSystem::parse(p, "2", "1", "1").unwrap();
    Problem::qzm(sys, m_s, p).unwrap().with_exec(exec)
}

fn qzm_evaluation(c: &mut Criterion) {
    let mut group = c.benchmark_group("qzm_evaluate_with_derivative");
    group.sample_size(10).measurement_time(Duration::from_secs(10));
    for m_s in [4, 8] {
        for (name, exec) in MODES {
            let problem = qzm_problem(m_s, exec);
            let f = problem.order(m_s).unwrap();
            let eps = problem.precision().parse("1.03").unwrap();
            group.bench_with_input(BenchmarkId::new(name, m_s), &eps, |b, eps| {
                b.iter(|| f.evaluate(eps, true).unwrap())
            });
        }
    }
    group.finish();
}

fn harmonic_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("harmonic_scan_41_points");
    group.sample_size(10);
    for (name, exec) in MODES {
        let p = Precision::new(60).unwrap();
        let problem = Problem::harmonic(20, p).unwrap().with_exec(exec);
        let f = problem.order(20).unwrap();
        let grid = uniform_grid(&p.zero(), &p.int(20), 41, p);
        group.bench_function(name, |b| b.iter(|| scan(&f, &grid, exec).unwrap()));
    }
    group.finish();
}

fn qzm_minimize(c: &mut Criterion) {
    let mut group = c.benchmark_group("qzm_minimize_m_s_6");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    for (name, exec) in MODES {
        let problem = qzm_problem(6, exec);
        let p = problem.precision();
        let f = problem.order(6).unwrap();
        let (lo, hi, tol) = (p.parse("1.00001").unwrap(), p.parse("1.1").unwrap(), p.pow10(-20));
        group.bench_function(name, |b| b.iter(|| minimize_in_window(&f, &lo, &hi, 12, &tol, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, qzm_evaluation, harmonic_scan, qzm_minimize);
criterion_main!(benches);
