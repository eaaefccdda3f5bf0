use birkhoff::nth::AnchorMode;
use birkhoff::par::Execution;
use birkhoff::problems;
use birkhoff::spectra::{roots_of_unity, sector_ordering};
use birkhoff::verify::{dyadic, expansion_errors, oracle_errors, SWEEP_CELLS};
use criterion::{criterion_group, criterion_main, Criterion};

fn modes() -> Vec<(&'static str, Execution)> {
    let mut out = vec![("sequential", Execution::Sequential)];
    #[cfg(feature = "parallel")]
    out.push(("parallel", Execution::Parallel));
    out
}

fn expansion(c: &mut Criterion) {
    let spec = problems::smooth_n3();
    let frame = sector_ordering(&roots_of_unity(3).unwrap(), 0).unwrap();
    let moduli = dyadic(16.0, 2.0, 6).unwrap();
    let mut group = c.benchmark_group("expansion_sweep");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| {
                expansion_errors(
                    &spec,
                    &frame,
                    &moduli,
                    2,
                    AnchorMode::Anchored,
                    SWEEP_CELLS,
                    exec,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let spec = problems::constant_potential_n2();
    let frame = sector_ordering(&roots_of_unity(2).unwrap(), 0).unwrap();
    let moduli = dyadic(8.0, 2.0, 3).unwrap();
    let mut group = c.benchmark_group("oracle_sweep");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| oracle_errors(&spec, &frame, &moduli, SWEEP_CELLS, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, expansion, oracle);
criterion_main!(benches);
