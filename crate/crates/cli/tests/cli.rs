use std::fs;
use std::path::{Path, PathBuf};

use focusgen::ir::mutate::Mutation;
use focusgen::frontend::Severity;
use focusgen::render::{check_latex_structure, check_spec_source, listing};
use focusgen_cli::{
    cmd_check, cmd_diff, cmd_generate, cmd_operators, cmd_oracle, cmd_simulate, cmd_template, exit,
    Console, Format, Report, RunConfig, TieBreak,
};
use tempfile::TempDir;

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn run(f: impl FnOnce(&mut Console<'_>) -> i32) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = f(&mut Console {
        out: &mut out,
        err: &mut err,
    });
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn cfg(inputs: Vec<PathBuf>, out: &Path) -> RunConfig {
    let mut c = RunConfig::new(inputs);
    c.out_dir = Some(out.to_path_buf());
    c
}

fn listing_of(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .map(|rd| rd.map(|e| e.unwrap().file_name().into_string().unwrap()).collect())
        .unwrap_or_default();
    names.sort();
    names
}

const CYCLE: &str = "model Loop {
  component Id (weak) {
    in a: Bool
    out b: Bool
    function {
      b = a
    }
  }

  component Ring (weak) {
    in x: Bool
    out y: Bool
    sub p: Id
    sub q: Id
    channel x: Bool x -> p.a
    channel l1: Bool p.b -> q.a
    channel l2: Bool q.b -> p.a
    channel y: Bool q.b -> y
  }

  root Ring
}
";

const CHOICE: &str = "model ChoiceModel {
  component Choice (weak) {
    in x: Bool
    out y: Bool
    automaton {
      state A
      state B
      initial A
      when A -> B [x = true] emit y = true
      when A -> A [x = true] emit y = false
    }
  }

  root Choice
}
";

#[test]
fn generate_writes_one_file_per_format() {
    let dir = TempDir::new().unwrap();
    let r = run(|c| cmd_generate(&cfg(vec![corpus("echo.afm")], dir.path()), c));
    assert_eq!(r.code, exit::OK, "{}", r.err);
    assert_eq!(listing_of(dir.path()), ["Echo.spec.tex", "Echo.spec.txt"]);

    let mut latex = cfg(vec![corpus("echo.afm")], &dir.path().join("tex"));
    latex.format = Format::Latex;
    assert_eq!(run(|c| cmd_generate(&latex, c)).code, exit::OK);
    assert_eq!(listing_of(&dir.path().join("tex")), ["Echo.spec.tex"]);
}

#[test]
fn generate_rejects_a_causality_cycle_without_writing() {
    let dir = TempDir::new().unwrap();
    let model = write(dir.path(), "loop.afm", CYCLE);
    let out = dir.path().join("out");
    let r = run(|c| cmd_generate(&cfg(vec![model], &out), c));
    assert_eq!(r.code, exit::FAILURE);
    assert!(r.err.contains("error"), "{}", r.err);
    assert!(listing_of(&out).is_empty());
}

#[test]
fn generate_reports_unreadable_models_and_directories() {
    let dir = TempDir::new().unwrap();
    let r = run(|c| cmd_generate(&cfg(vec![dir.path().join("missing.afm")], dir.path()), c));
    assert_eq!(r.code, exit::IO);

    let blocker = write(dir.path(), "file", "");
    let r = run(|c| cmd_generate(&cfg(vec![corpus("echo.afm")], &blocker.join("sub")), c));
    assert_eq!(r.code, exit::IO);
}

#[test]
fn regeneration_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let models: Vec<PathBuf> = ["echo.afm", "arbiter.afm", "monitor.afm"].map(corpus).into();
    let c = cfg(models, dir.path());
    assert_eq!(run(|con| cmd_generate(&c, con)).code, exit::OK);
    let first: Vec<Vec<u8>> = listing_of(dir.path()).iter().map(|f| fs::read(dir.path().join(f)).unwrap()).collect();
    assert_eq!(run(|con| cmd_generate(&c, con)).code, exit::OK);
    let second: Vec<Vec<u8>> = listing_of(dir.path()).iter().map(|f| fs::read(dir.path().join(f)).unwrap()).collect();
    assert_eq!(first, second);
    assert!(first.len() > 6);
}

#[test]
fn check_accepts_the_corpus_and_generated_documents() {
    let dir = TempDir::new().unwrap();
    let models: Vec<PathBuf> = fs::read_dir(corpus(""))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "afm"))
        .collect();
    assert_eq!(run(|c| cmd_generate(&cfg(models.clone(), dir.path()), c)).code, exit::OK);
    let mut inputs = models;
    inputs.extend(listing_of(dir.path()).iter().map(|f| dir.path().join(f)));
    let r = run(|c| cmd_check(&RunConfig::new(inputs), c));
    assert_eq!(r.code, exit::OK, "{}", r.err);
}

#[test]
fn check_warns_on_nondeterminism_without_failing() {
    let dir = TempDir::new().unwrap();
    let model = write(dir.path(), "choice.afm", CHOICE);
    let r = run(|c| cmd_check(&RunConfig::new(vec![model]), c));
    assert_eq!(r.code, exit::OK);
    assert!(r.err.contains("warning"), "{}", r.err);
}

#[test]
fn check_rejects_an_unknown_operator() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        dir.path(),
        "Bad.spec.txt",
        "spec Bad (weak)\n  in  x : Bool\n  out y : Bool\n  univ t : Nat\nasm\n  (1) true\ngar\n  (1) y(t) = x(t) ⊕ x(t)\nend Bad\n",
    );
    let r = run(|c| cmd_check(&RunConfig::new(vec![spec]), c));
    assert_eq!(r.code, exit::FAILURE);
    assert!(r.err.contains("unknown-operator"), "{}", r.err);
}

#[test]
fn check_rejects_unbalanced_latex() {
    let dir = TempDir::new().unwrap();
    let tex = write(dir.path(), "Bad.spec.tex", "\\begin{spec}{Bad}\n\\fformula{1}{x\n");
    assert_eq!(run(|c| cmd_check(&RunConfig::new(vec![tex]), c)).code, exit::FAILURE);
    assert_eq!(
        run(|c| cmd_check(&RunConfig::new(vec![dir.path().join("none.spec.txt")]), c)).code,
        exit::IO
    );
}

#[test]
fn simulate_exports_one_slot_per_input_line() {
    let dir = TempDir::new().unwrap();
    let inputs = write(dir.path(), "in.txt", "0; x=on\n1; x=eps\n2; x=off\n");
    let c = cfg(vec![corpus("echo.afm")], dir.path());
    let r = run(|con| cmd_simulate(&c, &inputs, con));
    assert_eq!(r.code, exit::OK, "{}", r.err);
    let trace = fs::read_to_string(dir.path().join("Echo.trace")).unwrap();
    let slots: Vec<&str> = trace.lines().filter(|l| l.starts_with(|ch: char| ch.is_ascii_digit())).collect();
    assert_eq!(slots.len(), 3, "{trace}");
    assert!(slots[0].contains("y=on"));

    let mut longer = c.clone();
    longer.horizon = Some(5);
    longer.out_dir = None;
    let r = run(|con| cmd_simulate(&longer, &inputs, con));
    assert_eq!(r.out.lines().filter(|l| l.starts_with(|ch: char| ch.is_ascii_digit())).count(), 5);
}

#[test]
fn simulate_reports_missing_inputs_and_nondeterminism() {
    let dir = TempDir::new().unwrap();
    let c = cfg(vec![corpus("echo.afm")], dir.path());
    assert_eq!(run(|con| cmd_simulate(&c, &dir.path().join("none.txt"), con)).code, exit::IO);

    let model = write(dir.path(), "choice.afm", CHOICE);
    let inputs = write(dir.path(), "in.txt", "0; x=true\n1; x=false\n");
    let mut c = cfg(vec![model], dir.path());
    let r = run(|con| cmd_simulate(&c, &inputs, con));
    assert_eq!(r.code, exit::FAILURE);
    assert!(r.err.contains("Choice"), "{}", r.err);

    c.tie_break = Some(TieBreak::Order);
    let r = run(|con| cmd_simulate(&c, &inputs, con));
    assert_eq!(r.code, exit::OK, "{}", r.err);
    assert!(fs::read_to_string(dir.path().join("Choice.trace")).unwrap().contains("0; x=true; y=true"));
}

#[test]
fn oracle_exit_codes() {
    let mut c = RunConfig::new(vec![corpus("echo.afm")]);
    let r = run(|con| cmd_oracle(&c, con));
    assert_eq!(r.code, exit::OK, "{}", r.err);
    assert!(r.out.contains("Echo: 81 input sequences at horizon 4, all satisfied"), "{}", r.out);

    c.budget = 10;
    assert_eq!(run(|con| cmd_oracle(&c, con)).code, exit::BUDGET);

    c.budget = focusgen::semantics::DEFAULT_BUDGET;
    for m in [Mutation::DropStutter, Mutation::SwapEmissionTime, Mutation::WrongNextState] {
        c.mutate = Some(m);
        let r = run(|con| cmd_oracle(&c, con));
        assert_eq!(r.code, exit::FAILURE, "{m}");
        assert!(r.out.contains("counterexample") || r.err.contains("counterexample"), "{m}");
    }

    c.mutate = Some(Mutation::StaleUpdate);
    assert_eq!(run(|con| cmd_oracle(&c, con)).code, exit::IO);
}

#[test]
fn oracle_refuses_nondeterministic_models() {
    let dir = TempDir::new().unwrap();
    let model = write(dir.path(), "choice.afm", CHOICE);
    assert_eq!(run(|c| cmd_oracle(&RunConfig::new(vec![model]), c)).code, exit::FAILURE);
}

#[test]
fn simulated_trace_replays_through_the_oracle() {
    let c = RunConfig::new(vec![corpus("pipeline.afm")]);
    let r = run(|con| cmd_oracle(&c, con));
    assert_eq!(r.code, exit::OK, "{}", r.err);
    assert!(r.out.lines().count() >= 3, "{}", r.out);
}

const PAIR: &str = "model PairModel {
  type Signal = enum { on, off }

  component Echo (weak) {
    in x: Signal
    out y: Signal
    automaton {
      state Idle
      state Busy
      initial Idle
      when Idle -> Busy [x = on] emit y = x
      when Busy -> Idle [x = off]
    }
  }

  component Gate (weak) {
    in a: Bool
    out y: Bool
    function {
      y = !a
    }
  }

  root Echo
}
";

#[test]
fn diff_scenarios() {
    let dir = TempDir::new().unwrap();
    let docs = dir.path().join("docs");
    let model = write(dir.path(), "pair.afm", PAIR);
    let mut c = cfg(vec![model.clone()], &docs);
    assert_eq!(run(|con| cmd_generate(&c, con)).code, exit::OK);

    let r = run(|con| cmd_diff(&c, con));
    assert_eq!(r.code, exit::OK, "{}{}", r.out, r.err);

    write(dir.path(), "pair.afm", &PAIR.replace("Busy", "Waiting"));
    let r = run(|con| cmd_diff(&c, con));
    assert_eq!(r.code, exit::DRIFT);
    assert!(r.out.contains("changed   Echo.spec.txt"), "{}", r.out);
    assert!(r.out.lines().any(|l| l.starts_with('+') && l.contains("Waiting")), "{}", r.out);
    assert!(r.out.lines().any(|l| l.starts_with('-') && l.contains("Busy")), "{}", r.out);

    let gate = PAIR.find("  component Gate").unwrap();
    let end = PAIR.find("  root").unwrap();
    write(dir.path(), "pair.afm", &format!("{}{}", &PAIR[..gate], &PAIR[end..]));
    c.report = Report::Tsv;
    let r = run(|con| cmd_diff(&c, con));
    assert_eq!(r.code, exit::DRIFT);
    let rows: Vec<&str> = r.out.lines().collect();
    assert_eq!(rows[0], "status\tcomponent\tfile");
    assert!(rows.contains(&"orphaned\tGate\tGate.spec.txt"), "{}", r.out);
    assert!(rows.contains(&"unchanged\tEcho\tEcho.spec.tex"), "{}", r.out);

    fs::remove_file(docs.join("Echo.spec.tex")).unwrap();
    let r = run(|con| cmd_diff(&c, con));
    assert!(r.out.contains("new\tEcho\tEcho.spec.tex"), "{}", r.out);
}

#[test]
fn diff_flags_hand_edited_documents() {
    let dir = TempDir::new().unwrap();
    let c = cfg(vec![corpus("echo.afm")], dir.path());
    assert_eq!(run(|con| cmd_generate(&c, con)).code, exit::OK);
    let path = dir.path().join("Echo.spec.txt");
    let text = fs::read_to_string(&path).unwrap().replacen("asm", "asm\n  (0) false", 1);
    fs::write(&path, text).unwrap();
    let r = run(|con| cmd_diff(&c, con));
    assert_eq!(r.code, exit::DRIFT);
    assert!(r.out.contains("changed   Echo.spec.txt"), "{}", r.out);

    let missing = cfg(vec![corpus("echo.afm")], &dir.path().join("nowhere"));
    assert_eq!(run(|con| cmd_diff(&missing, con)).code, exit::IO);
}

#[test]
fn template_skeletons_pass_the_checkers() {
    for id in focusgen::render::template_ids() {
        let r = run(|c| cmd_template(&RunConfig::new(vec![]), id, c));
        assert_eq!(r.code, exit::OK);
        let errors: Vec<_> = check_spec_source(&r.out)
            .into_iter()
            .filter(|d| d.severity == Severity::Error)
            .collect();
        assert!(errors.is_empty(), "{id}: {errors:?}\n{}", r.out);

        let mut latex = RunConfig::new(vec![]);
        latex.format = Format::Latex;
        let r = run(|c| cmd_template(&latex, id, c));
        assert!(check_latex_structure(&r.out).is_empty(), "{id}\n{}", r.out);
    }
    let dir = TempDir::new().unwrap();
    let r = run(|c| cmd_template(&cfg(vec![], dir.path()), "component-frame", c));
    assert_eq!(r.code, exit::OK);
    assert_eq!(listing_of(dir.path()), ["component-frame.txt"]);
}

#[test]
fn unknown_template_fails() {
    let r = run(|c| cmd_template(&RunConfig::new(vec![]), "nope", c));
    assert_eq!(r.code, exit::FAILURE);
    assert!(r.err.contains("component-frame"));
}

#[test]
fn operators_lists_the_catalog() {
    let r = run(cmd_operators);
    assert_eq!(r.code, exit::OK);
    assert_eq!(r.out, listing());
    assert_eq!(r.out.lines().count(), focusgen::render::CATALOG.len());
}

#[test]
fn interchange_input_yields_the_same_documents() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("dsl"), dir.path().join("json"));
    assert_eq!(run(|c| cmd_generate(&cfg(vec![corpus("monitor.afm")], &a), c)).code, exit::OK);
    assert_eq!(run(|c| cmd_generate(&cfg(vec![corpus("json/monitor.json")], &b), c)).code, exit::OK);
    let names = listing_of(&a);
    assert_eq!(names, listing_of(&b));
    for f in names {
        assert_eq!(fs::read(a.join(&f)).unwrap(), fs::read(b.join(&f)).unwrap(), "{f}");
    }
}
