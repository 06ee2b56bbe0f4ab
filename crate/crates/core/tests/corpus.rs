use std::path::PathBuf;

use focusgen::frontend::{load_dsl, parse_dsl, parse_interchange, print_interchange, Severity};
use focusgen::model::Model;
use focusgen::oracle::{lower_all, run_oracle, OracleConfig};
use focusgen::render::{check_latex_structure, check_spec_source, component_document, operators_markdown, DocKind};
use focusgen::semantics::validate;

fn corpus() -> Vec<(String, Model)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "afm"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let (m, _) = load_dsl(&text).unwrap_or_else(|d| panic!("{name}: {d:?}"));
            (name, m)
        })
        .collect()
}

#[test]
fn corpus_validates_cleanly() {
    for (name, m) in corpus() {
        let report = validate(&m);
        let findings: Vec<_> = report.diagnostics.iter().map(|d| d.to_string()).collect();
        assert!(findings.is_empty(), "{name}: {findings:?}");
        assert!(report.all_deterministic(), "{name}");
    }
}

#[test]
fn every_corpus_component_is_faithful() {
    for (name, m) in corpus() {
        let frames = lower_all(&m);
        for c in 0..m.components.len() {
            let r = run_oracle(&m, c, &frames, &OracleConfig::default()).unwrap();
            assert!(
                r.counterexample.is_none(),
                "{name} {}: {}",
                m.components[c].name,
                r.counterexample.unwrap().failure
            );
        }
    }
}

#[test]
fn emitted_documents_are_well_formed() {
    for (name, m) in corpus() {
        for c in 0..m.components.len() {
            for ascii in [false, true] {
                let doc = component_document(&m, c, true, DocKind::PlainText, ascii).unwrap();
                let errors: Vec<_> = check_spec_source(&doc.text())
                    .into_iter()
                    .filter(|d| d.severity == Severity::Error)
                    .collect();
                assert!(errors.is_empty(), "{name}:\n{}\n{errors:?}", doc.text());
            }
            let tex = component_document(&m, c, true, DocKind::Latex, false).unwrap();
            let findings = check_latex_structure(&tex.text());
            assert!(findings.is_empty(), "{name}:\n{}\n{findings:?}", tex.text());
        }
    }
}

fn blessed(path: &std::path::Path, actual: &str) {
    if std::env::var_os("FOCUSGEN_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(path, actual).unwrap();
    }
}

#[test]
fn interchange_twins_parse_to_the_same_model() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    for (name, _) in corpus() {
        let dsl = std::fs::read_to_string(root.join(&name)).unwrap();
        let raw = parse_dsl(&dsl).unwrap();
        let twin = root.join("json").join(name.replace(".afm", ".json"));
        blessed(&twin, &print_interchange(&raw));
        let json = std::fs::read_to_string(&twin).unwrap_or_else(|_| panic!("missing {}", twin.display()));
        assert_eq!(parse_interchange(&json).as_ref(), Ok(&raw), "{name}");
    }
}

#[test]
fn operator_reference_is_current() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/operators.md");
    let expected = operators_markdown();
    blessed(&path, &expected);
    let actual = std::fs::read_to_string(&path).unwrap_or_default();
    assert_eq!(actual, expected, "docs/operators.md is stale; rerun with FOCUSGEN_BLESS=1");
}

#[test]
fn grammar_lists_every_keyword() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/grammar.ebnf");
    let text = std::fs::read_to_string(path).unwrap();
    let listed = text.split("(* Keywords:").nth(1).unwrap();
    let listed: Vec<&str> = listed.trim_end().trim_end_matches("*)").split_whitespace().collect();
    assert_eq!(listed, focusgen::frontend::KEYWORDS);
}
