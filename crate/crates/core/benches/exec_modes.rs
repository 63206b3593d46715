// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qwass::exec::ExecMode;
use qwass::experiments::{run_low_rank, EnsembleConfig};
use qwass::metrics::trace_metric;
use qwass::states::random::random_mixed;
use qwass::transport::{estimate_wp, SearchBudget};

const MODES: [(&str, ExecMode); 2] = [("parallel", ExecMode::Parallel), ("sequential", ExecMode::Sequential)];

fn bracket_search(c: &mut Criterion) {
    let rho = random_mixed(&[3], 3, 1).unwrap();
    let sigma = random_mixed(&[3], 3, 2).unwrap();
    let metric = trace_metric(&[3]).unwrap();
    let mut group = c.benchmark_group("estimate_wp_qutrit");
    group.sample_size(10);
    for (name, exec) in MODES {
        let budget = SearchBudget { restarts: 8, iterations: 100, exec, ..SearchBudget::default() };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| estimate_wp(&rho, &sigma, &metric, 1.0, &budget).unwrap())
        });
    }
    group.finish();
}

fn low_rank_ensemble(c: &mut Criterion) {
    let mut group = c.benchmark_group("low_rank_trials");
    group.sample_size(10);
    for (name, exec) in MODES {
        let cfg = EnsembleConfig { trials: 32, exec, ..EnsembleConfig::default() };
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| run_low_rank(&cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bracket_search, low_rank_ensemble);
criterion_main!(benches);
