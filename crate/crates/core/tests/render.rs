use std::collections::BTreeMap;
use std::path::PathBuf;

use proptest::prelude::*;

use focusgen::frontend::load_dsl;
use focusgen::ir::{build_timed_table, lower_component, lower_composite, FOp, Formula, Tick};
use focusgen::model::{Model, Value};
use focusgen::render::{
    check_latex_structure, check_spec_source, component_document, emit_latex, emit_plaintext, entry_for,
    expand_template, formula, template_ids, DocKind, SpecItem, Style, TemplateError, TemplateFormat,
};

fn load(file: &str) -> Model {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(file);
    load_dsl(&std::fs::read_to_string(path).unwrap()).unwrap().0
}

fn index(m: &Model, name: &str) -> usize {
    m.components.iter().position(|c| c.name == name).unwrap()
}

/// Compare against a frozen golden file; `FOCUSGEN_BLESS=1` rewrites it.
fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("FOCUSGEN_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {name}"));
    assert_eq!(actual, expected, "{name} drifted from its golden file");
}

#[test]
fn echo_goldens() {
    let m = load("echo.afm");
    let echo = index(&m, "Echo");
    for (kind, ascii, file) in [
        (DocKind::PlainText, false, "Echo.spec.txt"),
        (DocKind::PlainText, true, "Echo.ascii.spec.txt"),
        (DocKind::Latex, false, "Echo.spec.tex"),
    ] {
        golden(file, &component_document(&m, echo, true, kind, ascii).unwrap().text());
    }
}

#[test]
fn chain_composite_golden() {
    let m = load("chain.afm");
    let spec = lower_composite(&m, index(&m, "Chain"));
    let doc = emit_plaintext(SpecItem::Composite(&spec), false).unwrap();
    assert!(doc.body.contains("  loc l1 : Signal\n"), "{}", doc.body);
    assert!(doc.body.contains("(1) A(x; l1) ∧ B(l1; y)"), "{}", doc.body);
    golden("Chain.spec.txt", &doc.text());
    let tex = emit_latex(SpecItem::Composite(&spec)).unwrap();
    assert!(check_latex_structure(&tex.body).is_empty());
    assert!(tex.body.contains("\\fapp{A}{\\fname{x}}{\\fname{l1}} \\fand \\fapp{B}"), "{}", tex.body);
}

#[test]
fn pass_through_frame() {
    let m = load_dsl(
        "model P { component Pass (weak) { in x: Bool out y: Bool function { y = x } } root Pass }",
    )
    .unwrap()
    .0;
    let frame = lower_component(&m, 0, true);
    let doc = emit_plaintext(SpecItem::Frame(&frame), false).unwrap();
    assert!(doc.body.contains("spec Pass (weak)"));
    assert!(doc.body.contains("  in  x : Bool\n"));
    assert!(doc.body.contains("  out y : Bool\n"));
    assert!(doc.body.contains("  (1) y(t) = x(t)\n"));
    golden("Pass.spec.txt", &doc.text());
    golden("Pass.spec.tex", &emit_latex(SpecItem::Frame(&frame)).unwrap().text());
}

#[test]
fn echo_table_rows_are_aligned() {
    let m = load("echo.afm");
    let table = build_timed_table(&m.components[index(&m, "Echo")]);
    let doc = emit_plaintext(SpecItem::Table(&table), false).unwrap();
    let lines: Vec<&str> = doc.body.lines().collect();
    assert_eq!(lines.first(), Some(&"table Echo"));
    assert_eq!(lines.last(), Some(&"end table"));
    let rows = &lines[1..lines.len() - 1];
    // header, rule, two transition rows and the stutter row
    assert_eq!(rows.len(), 5);
    let bars = |l: &str| {
        l.char_indices()
            .filter(|(i, _)| l[*i..].starts_with(" | ") || l[*i..].starts_with("-+-"))
            .map(|(i, _)| l[..i].chars().count())
            .collect::<Vec<_>>()
    };
    for r in rows {
        assert_eq!(bars(r), bars(rows[0]), "misaligned row `{r}`");
    }
    assert!(rows[2].starts_with("  Idle"));
    assert!(rows[3].starts_with("  Busy"));
    assert!(rows[4].starts_with("  else"));
}

#[test]
fn ascii_mode_substitutes_catalog_forms() {
    let m = load("echo.afm");
    let frame = lower_component(&m, index(&m, "Echo"), true);
    let doc = emit_plaintext(SpecItem::Frame(&frame), true).unwrap();
    assert!(doc.body.contains("/\\"));
    assert!(doc.body.is_ascii(), "{}", doc.body);
    let unicode = emit_plaintext(SpecItem::Frame(&frame), false).unwrap();
    assert!(unicode.body.contains('∧'));
}

#[test]
fn emission_is_byte_deterministic() {
    for file in ["echo.afm", "counter.afm", "monitor.afm"] {
        let m = load(file);
        for c in 0..m.components.len() {
            for kind in [DocKind::Latex, DocKind::PlainText] {
                let a = component_document(&m, c, true, kind, false).unwrap();
                let b = component_document(&load(file), c, true, kind, false).unwrap();
                assert_eq!(a.text(), b.text());
                assert_eq!(a.checksum, b.checksum);
            }
        }
    }
}

#[test]
fn checksum_trailer_matches_body() {
    let m = load("echo.afm");
    let doc = component_document(&m, 0, true, DocKind::PlainText, false).unwrap();
    let text = doc.text();
    assert_eq!(focusgen::render::Document::recorded_checksum(&text), Some(doc.checksum.as_str()));
    assert_eq!(doc.checksum, focusgen::render::sha256_hex(doc.body.as_bytes()));
    assert!(text.ends_with(&format!("-- checksum sha256:{}\n", doc.checksum)));
}

fn skeleton(id: &str, format: TemplateFormat) -> String {
    let latex = format == TemplateFormat::Latex;
    let pick = |text: &str, tex: &str| if latex { tex.to_string() } else { text.to_string() };
    let subst = BTreeMap::from([
        ("name", "Name".to_string()),
        ("causality", "weak".to_string()),
        ("interface", pick("  in  x : Bool\n  out y : Bool", "\\finput{\\fname{x}}{\\fname{Bool}}")),
        ("locals", pick("  loc st : NameState", "\\flocal{\\fname{st}}{\\fname{NameState}}")),
        ("init", pick("  st(0) = Idle", "\\fequation{\\fzero{st} \\feq \\fconst{Idle}}")),
        ("init-section", pick("init\n  y(0) = false", "")),
        ("asm", pick("  (1) true", "\\fformula{1}{\\fconst{true}}")),
        ("gar", pick("  (1) y(t) = x(t)", "\\fformula{1}{\\fnow{y} \\feq \\fnow{x}}")),
        ("header", pick("  st(t) | x(t) | st(t+1)", "$\\fnow{st}$ \\\\")),
        ("rule", pick("  ------+------+--------", "")),
        ("rows", pick("  Idle  | true | Idle", "$\\fconst{Idle}$ \\\\")),
        ("columns", "l".to_string()),
        ("definition", pick("{a, b}", "\\fconst{a}, \\fconst{b}")),
    ]);
    expand_template(id, format, &subst).unwrap()
}

#[test]
fn expanded_templates_pass_the_checkers() {
    for id in template_ids() {
        let text = skeleton(id, TemplateFormat::Text);
        assert!(!text.contains("{{"), "{id}: {text}");
        assert_eq!(check_spec_source(&text), vec![], "{id}:\n{text}");
        let tex = skeleton(id, TemplateFormat::Latex);
        assert!(!tex.contains("{{"), "{id}: {tex}");
        assert!(check_latex_structure(&tex).is_empty(), "{id}:\n{tex}");
    }
}

#[test]
fn missing_placeholder_is_reported() {
    assert_eq!(
        expand_template("component-frame", TemplateFormat::Text, &BTreeMap::new()),
        Err(TemplateError::PlaceholderUnfilled("name".into()))
    );
}

fn formulas() -> impl Strategy<Value = Formula> {
    let tick = prop_oneof![Just(Tick::Zero), Just(Tick::Now), Just(Tick::Next)];
    let leaf = prop_oneof![
        Just(Formula::absent()),
        any::<bool>().prop_map(|b| Formula::Const(Value::Bool(b))),
        (-3i64..4).prop_map(|n| Formula::Const(Value::Int(n))),
        tick.clone().prop_map(|at| Formula::Stream { name: "x".into(), col: 0, at }),
        tick.clone().prop_map(|at| Formula::State { at }),
        tick.prop_map(|at| Formula::Var { name: "v".into(), var: 0, at }),
        Just(Formula::Apply { component: "A".into(), sub: 0, ins: vec![0], outs: vec![1] }),
    ];
    let op = prop_oneof![
        Just(FOp::Add),
        Just(FOp::Sub),
        Just(FOp::Eq),
        Just(FOp::Ne),
        Just(FOp::Lt),
        Just(FOp::Le),
        Just(FOp::Implies)
    ];
    leaf.prop_recursive(4, 32, 3, move |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (op.clone(), inner.clone(), inner.clone()).prop_map(|(o, l, r)| Formula::bin(o, l, r)),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
            inner.prop_map(|f| Formula::Clamp { inner: Box::new(f), lo: 0, hi: 2 }),
        ]
    })
}

proptest! {
    #[test]
    fn every_node_has_a_catalog_entry(f in formulas()) {
        let mut missing = Vec::new();
        f.visit(&mut |node| {
            let literal = matches!(node, Formula::Const(v) if *v != Value::Absent);
            if entry_for(node).is_none() != literal {
                missing.push(format!("{node:?}"));
            }
        });
        prop_assert!(missing.is_empty(), "{:?}", missing);
        for style in [Style::Unicode, Style::Ascii, Style::Latex] {
            prop_assert!(!formula(&f, style).is_empty());
        }
        prop_assert!(formula(&f, Style::Ascii).is_ascii());
        prop_assert!(check_latex_structure(&formula(&f, Style::Latex)).is_empty());
    }
}
