use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hetcov::config::ScenarioConfig;
use hetcov::sim::{
    controls, initial_ground_positions, initial_state, run_aerial_phase, run_ensemble, step,
    RngStream, Scenario, SimState,
};
use hetcov::Execution;
use std::hint::black_box;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn bundled_state(execution: Execution) -> (Scenario, SimState) {
    let config = ScenarioConfig::bundled_default();
    let scenario = Scenario::new(&config).unwrap().with_execution(execution);
    let mut rng = RngStream::new(config.seed);
    let ground = initial_ground_positions(&config, &scenario.domain, &mut rng);
    let aerial = run_aerial_phase(&config, &mut rng).unwrap();
    let state = initial_state(&scenario, &ground, Some(&aerial)).unwrap();
    (scenario, state)
}

fn per_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("bundled");
    for (name, execution) in MODES {
        let (scenario, state) = bundled_state(execution);
        group.bench_with_input(BenchmarkId::new("controls", name), &state, |b, s| {
            b.iter(|| controls(&scenario, black_box(s)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("step", name), &state, |b, s| {
            b.iter(|| step(black_box(s), &scenario).unwrap())
        });
    }
    group.finish();
}

fn ensemble(c: &mut Criterion) {
    let mut base = ScenarioConfig::bundled_default();
    base.max_iterations = 20;
    let configs: Vec<ScenarioConfig> = (0..8).map(|s| base.with_seed(s)).collect();
    let mut group = c.benchmark_group("ensemble");
    group.sample_size(10);
    for (name, execution) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| run_ensemble(black_box(&configs), execution))
        });
    }
    group.finish();
}

criterion_group!(benches, per_step, ensemble);
criterion_main!(benches);
