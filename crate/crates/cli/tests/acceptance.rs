//! Acceptance criteria, one PASS/FAIL line each.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use focusgen::frontend::{load_dsl, parse_dsl, print_dsl, Severity};
use focusgen::ir::lower_composite;
use focusgen::ir::mutate::Mutation;
use focusgen::model::{resolve, Causality, Endpoint, Model, Value};
use focusgen::render::{check_latex_structure, check_spec_source, component_document, DocKind, Document};
use focusgen::semantics::{simulate, validate, StreamKind, Trace};
use focusgen_cli::{cmd_diff, cmd_generate, cmd_oracle, drift, exit, Console, DriftStatus, RunConfig};
use focusgen_testkit::{random_inputs, seeded_model, GenConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "afm"))
        .collect();
    files.sort();
    files
}

fn load(path: &Path) -> Model {
    load_dsl(&fs::read_to_string(path).unwrap())
        .unwrap_or_else(|e| panic!("{}: {e:?}", path.display()))
        .0
}

fn quiet(f: impl FnOnce(&mut Console<'_>) -> i32) -> (i32, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = f(&mut Console {
        out: &mut out,
        err: &mut err,
    });
    (code, String::from_utf8_lossy(&out).into_owned() + &String::from_utf8_lossy(&err))
}

/// Per-component bounds for the faithfulness corpus.
fn within_caps(m: &Model) -> Result<(), String> {
    for c in m.components.iter().filter(|c| c.is_atomic()) {
        let states = c.automaton().map_or(1, |a| a.states.len());
        if states > 4 || c.inputs.len() > 2 {
            return Err(format!("{}: {states} states, {} inputs", c.name, c.inputs.len()));
        }
        let carriers = c.inputs.iter().chain(&c.outputs).map(|p| &p.ty.dtype).chain(c.variables().iter().map(|v| &v.ty.dtype));
        if let Some(d) = carriers.into_iter().find(|d| d.carrier_len() > 3) {
            return Err(format!("{}: carrier {d} too large", c.name));
        }
    }
    Ok(())
}

fn faithfulness() -> Verdict {
    let mut checked = 0;
    let mut causalities = BTreeSet::new();
    let mut sequences = 0u64;
    let start = Instant::now();
    for path in corpus_files() {
        let m = load(&path);
        within_caps(&m).map_err(|e| format!("{}: {e}", path.display()))?;
        for c in &m.components {
            causalities.insert(matches!(c.causality, Causality::Strong));
        }
        let (code, out) = quiet(|con| cmd_oracle(&RunConfig::new(vec![path.clone()]), con));
        if code != exit::OK {
            return Err(format!("{} exited {code}\n{out}", path.display()));
        }
        sequences += out
            .lines()
            .filter_map(|l| l.split(": ").nth(1)?.split(' ').next()?.parse::<u64>().ok())
            .sum::<u64>();
        checked += 1;
    }
    let elapsed = start.elapsed();
    if checked < 10 {
        return Err(format!("only {checked} corpus models"));
    }
    if causalities.len() < 2 {
        return Err("corpus lacks one causality".into());
    }
    if elapsed >= Duration::from_secs(30) {
        return Err(format!("took {:.1}s", elapsed.as_secs_f64()));
    }
    Ok(format!(
        "{checked} models, {sequences} input sequences at T=4, all satisfied in {:.1}s",
        elapsed.as_secs_f64()
    ))
}

fn mutation_sensitivity() -> Verdict {
    let models = ["echo.afm", "counter.afm", "toggle.afm", "arbiter.afm", "vending.afm", "gate.afm"];
    let mut killed = BTreeSet::new();
    let mut runs = 0;
    for name in models {
        for m in Mutation::ALL {
            let mut cfg = RunConfig::new(vec![corpus_dir().join(name)]);
            cfg.mutate = Some(m);
            let (code, out) = quiet(|con| cmd_oracle(&cfg, con));
            match code {
                exit::IO => continue,
                exit::FAILURE if out.contains("counterexample") => {
                    killed.insert(m.name());
                    runs += 1;
                }
                _ => return Err(format!("{m} on {name} exited {code}\n{out}")),
            }
        }
    }
    if killed.len() < 5 {
        return Err(format!("only {} mutations applied: {killed:?}", killed.len()));
    }
    Ok(format!(
        "{} mutations ({}) rejected with a counterexample in {runs} runs",
        killed.len(),
        killed.into_iter().collect::<Vec<_>>().join(", ")
    ))
}

fn determinism() -> Verdict {
    let dir = TempDir::new().unwrap();
    let mut snapshots = Vec::new();
    for run in ["first", "second"] {
        let mut cfg = RunConfig::new(corpus_files());
        cfg.out_dir = Some(dir.path().join(run));
        let (code, out) = quiet(|con| cmd_generate(&cfg, con));
        if code != exit::OK {
            return Err(format!("{run} run exited {code}\n{out}"));
        }
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir.path().join(run))
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        snapshots.push(files);
    }
    let (a, b) = (&snapshots[0], &snapshots[1]);
    if a != b {
        return Err("documents differ between runs".into());
    }
    let tex = a.iter().filter(|(f, _)| f.ends_with(".spec.tex")).count();
    let txt = a.iter().filter(|(f, _)| f.ends_with(".spec.txt")).count();
    if tex == 0 || tex != txt {
        return Err(format!("{tex} LaTeX and {txt} text documents"));
    }
    for (f, bytes) in a {
        if !Document::is_intact(std::str::from_utf8(bytes).unwrap()) {
            return Err(format!("{f}: checksum trailer does not match"));
        }
    }
    Ok(format!("{} documents ({tex} LaTeX, {txt} text) byte-identical with matching checksums", a.len()))
}

fn round_trip() -> Verdict {
    let cfg = GenConfig::default();
    for seed in 0..1000 {
        let raw = seeded_model(seed, &cfg);
        let m = resolve(&raw).map_err(|e| format!("seed {seed}: {e}"))?;
        if validate(&m).has_errors() {
            return Err(format!("seed {seed}: generated model is invalid"));
        }
        if parse_dsl(&print_dsl(&raw)).as_ref() != Ok(&raw) {
            return Err(format!("seed {seed}: parse(print(m)) differs\n{}", print_dsl(&raw)));
        }
    }
    Ok("1000 generated models: parse_dsl(print_dsl(m)) == m".into())
}

fn well_formedness() -> Verdict {
    let mut models: Vec<Model> = corpus_files().iter().map(|p| load(p)).collect();
    let cfg = GenConfig::default();
    models.extend((0..200).map(|s| resolve(&seeded_model(s, &cfg)).unwrap()));
    let mut counts = [0usize; 2];
    for m in &models {
        let report = validate(m);
        for (i, c) in m.components.iter().enumerate() {
            let det = report.is_deterministic(&c.name);
            let tex = component_document(m, i, det, DocKind::Latex, false).map_err(|e| e.to_string())?;
            if let Some(d) = check_latex_structure(&tex.text()).first() {
                return Err(format!("{}: {d}", c.name));
            }
            counts[0] += 1;
            for ascii in [false, true] {
                let txt = component_document(m, i, det, DocKind::PlainText, ascii).map_err(|e| e.to_string())?;
                let text = txt.text();
                if let Some(d) = check_spec_source(&text).iter().find(|d| d.severity == Severity::Error) {
                    return Err(format!("{}: {d}\n{text}", c.name));
                }
                counts[1] += 1;
            }
        }
    }
    Ok(format!(
        "{} LaTeX documents balanced, {} text documents (unicode and ascii) with zero errors",
        counts[0], counts[1]
    ))
}

/// Recompose a composite run from standalone runs of its parts and compare.
fn composed(m: &Model, component: usize, inputs: &[Vec<Value>]) -> Result<(), String> {
    let c = &m.components[component];
    let Some(comp) = c.composite() else { return Ok(()) };
    let flat: Trace = simulate(m, component, inputs).map_err(|e| e.to_string())?;
    let horizon = inputs.len();
    let mut outputs: Vec<Option<Vec<Vec<Value>>>> = vec![None; comp.subs.len()];
    let stream = |outputs: &[Option<Vec<Vec<Value>>>], ep: Endpoint, t: usize| -> Option<Value> {
        match comp.channels.iter().find(|ch| ch.sink == ep).map(|ch| ch.source) {
            Some(Endpoint::ParentIn(q)) => Some(inputs[t][q].clone()),
            Some(Endpoint::SubOut { sub, port }) => outputs[sub].as_ref().map(|o| o[t][port].clone()),
            _ => Some(Value::Absent),
        }
    };
    while outputs.iter().any(Option::is_none) {
        let ready = (0..comp.subs.len()).find(|&s| {
            outputs[s].is_none()
                && (0..m.components[comp.subs[s].component].inputs.len())
                    .all(|port| horizon == 0 || stream(&outputs, Endpoint::SubIn { sub: s, port }, 0).is_some())
        });
        let s = ready.ok_or_else(|| format!("{}: parts form a cycle", c.name))?;
        let sub = comp.subs[s].component;
        let part_inputs: Vec<Vec<Value>> = (0..horizon)
            .map(|t| {
                (0..m.components[sub].inputs.len())
                    .map(|port| stream(&outputs, Endpoint::SubIn { sub: s, port }, t).unwrap())
                    .collect()
            })
            .collect();
        let alone = simulate(m, sub, &part_inputs).map_err(|e| e.to_string())?;
        if alone.slots != flat.parts[s].slots {
            return Err(format!("{}.{}: part trace differs from standalone run", c.name, comp.subs[s].name));
        }
        composed(m, sub, &part_inputs)?;
        outputs[s] = Some(alone.columns(StreamKind::Output));
    }
    let expected: Vec<Vec<Value>> = (0..horizon)
        .map(|t| (0..c.outputs.len()).map(|q| stream(&outputs, Endpoint::ParentOut(q), t).unwrap()).collect())
        .collect();
    if expected != flat.columns(StreamKind::Output) {
        return Err(format!("{}: outputs differ from the composition of its parts", c.name));
    }
    Ok(())
}

fn composite_coherence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut composites = Vec::new();
    let mut locals = 0;
    for path in corpus_files() {
        let m = load(&path);
        if m.root_component().is_atomic() {
            continue;
        }
        for (i, c) in m.components.iter().enumerate() {
            let Some(comp) = c.composite() else { continue };
            let internal: BTreeSet<&str> = comp
                .channels
                .iter()
                .filter(|ch| matches!(ch.source, Endpoint::SubOut { .. }) && matches!(ch.sink, Endpoint::SubIn { .. }))
                .map(|ch| ch.name.as_str())
                .collect();
            let spec = lower_composite(&m, i);
            let declared: BTreeSet<&str> = spec.frame.stream_locals.iter().map(|d| d.name.as_str()).collect();
            if internal != declared {
                return Err(format!("{}: locals {declared:?}, internal channels {internal:?}", c.name));
            }
            locals += declared.len();
        }
        for _ in 0..200 {
            let inputs = random_inputs(&mut rng, m.root_component(), 6);
            composed(&m, m.root, &inputs)?;
        }
        composites.push(m.root_component().name.clone());
    }
    if composites.len() < 3 {
        return Err(format!("only {} composite corpus models", composites.len()));
    }
    Ok(format!(
        "{} composites ({}): 200 runs each equal the composition of part runs; {locals} locals match internal channels",
        composites.len(),
        composites.join(", ")
    ))
}

fn drift_detection() -> Verdict {
    let dir = TempDir::new().unwrap();
    let docs = dir.path().join("docs");
    let echo = corpus_dir().join("echo.afm");
    let gate = corpus_dir().join("gate.afm");
    let mut cfg = RunConfig::new(vec![echo.clone(), gate]);
    cfg.out_dir = Some(docs.clone());
    if quiet(|con| cmd_generate(&cfg, con)).0 != exit::OK {
        return Err("generate failed".into());
    }
    let renamed = dir.path().join("echo.afm");
    fs::write(&renamed, fs::read_to_string(&echo).unwrap().replace("Busy", "Waiting")).unwrap();
    let scenarios = [
        ("unchanged", cfg.inputs.clone(), "Echo.spec.txt", "unchanged", exit::OK),
        ("state-renamed", vec![renamed, corpus_dir().join("gate.afm")], "Echo.spec.txt", "changed", exit::DRIFT),
        ("component-deleted", vec![echo], "Gate.spec.txt", "orphaned", exit::DRIFT),
    ];
    let mut seen = Vec::new();
    for (label, inputs, file, status, code) in scenarios {
        let mut c = cfg.clone();
        c.inputs = inputs.clone();
        let (got, out) = quiet(|con| cmd_diff(&c, con));
        let mut generated = Vec::new();
        for p in &inputs {
            let m = load(p);
            let report = validate(&m);
            for (i, comp) in m.components.iter().enumerate() {
                for kind in [DocKind::Latex, DocKind::PlainText] {
                    let doc = component_document(&m, i, report.is_deterministic(&comp.name), kind, false).unwrap();
                    generated.push((format!("{}.{}", comp.name, kind.extension()), comp.name.clone(), doc));
                }
            }
        }
        let report = drift(generated, &docs, &[DocKind::Latex, DocKind::PlainText]).unwrap();
        let actual = report.status(file).map(DriftStatus::label);
        if got != code || actual != Some(status) {
            return Err(format!("{label}: {file} is {actual:?} with exit {got}\n{out}"));
        }
        if label == "state-renamed" && !out.lines().any(|l| l.starts_with('+') && l.contains("Waiting")) {
            return Err(format!("{label}: diff does not name the renamed state\n{out}"));
        }
        seen.push(format!("{label} -> {status}/{got}"));
    }
    Ok(seen.join(", "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("faithfulness", faithfulness),
        ("mutation sensitivity", mutation_sensitivity),
        ("determinism", determinism),
        ("round-trip", round_trip),
        ("emitter well-formedness", well_formedness),
        ("composite coherence", composite_coherence),
        ("drift detection", drift_detection),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", n + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
