use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use focusgen::frontend::load_dsl;
use focusgen::model::{resolve, Model};
use focusgen::oracle::{lower_all, run_oracle, Exec, OracleConfig};
use focusgen::semantics::validate;
use focusgen_testkit::{seeded_model, GenConfig};

fn corpus(file: &str) -> Model {
    let path = format!("{}/../../corpus/{file}", env!("CARGO_MANIFEST_DIR"));
    load_dsl(&std::fs::read_to_string(path).unwrap()).unwrap().0
}

fn execs() -> Vec<(&'static str, Exec)> {
    let mut v = vec![("sequential", Exec::Sequential)];
    #[cfg(feature = "parallel")]
    v.push(("parallel", Exec::Parallel));
    v
}

fn corpus_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle-corpus");
    group.sample_size(10);
    for file in ["arbiter.afm", "handshake.afm", "monitor.afm"] {
        let m = corpus(file);
        let frames = lower_all(&m);
        for (name, exec) in execs() {
            let cfg = OracleConfig {
                exec,
                ..OracleConfig::default()
            };
            group.bench_with_input(BenchmarkId::new(name, file), &cfg, |b, cfg| {
                b.iter(|| run_oracle(&m, m.root, &frames, cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn generated_oracle(c: &mut Criterion) {
    let gen = GenConfig::default();
    let models: Vec<Model> = (0..200)
        .map(|s| resolve(&seeded_model(s, &gen)).unwrap())
        .filter(|m| validate(m).all_deterministic())
        .take(20)
        .collect();
    let frames: Vec<_> = models.iter().map(lower_all).collect();
    let mut group = c.benchmark_group("oracle-generated");
    group.sample_size(10);
    for (name, exec) in execs() {
        let cfg = OracleConfig {
            horizon: 3,
            budget: 100_000,
            exec,
        };
        group.bench_function(name, |b| {
            b.iter(|| {
                models
                    .iter()
                    .zip(&frames)
                    .filter_map(|(m, f)| run_oracle(m, m.root, f, &cfg).ok())
                    .count()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, corpus_oracle, generated_oracle);
criterion_main!(benches);
