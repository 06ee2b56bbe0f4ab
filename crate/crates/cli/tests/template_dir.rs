use std::fs;
use std::path::Path;

use focusgen::render::TEMPLATE_DIR_VAR;
use focusgen_cli::{cmd_generate, exit, Console, RunConfig};
use tempfile::TempDir;

fn generate(out: &Path) -> (i32, String) {
    let model = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/echo.afm");
    let mut cfg = RunConfig::new(vec![model]);
    cfg.out_dir = Some(out.to_path_buf());
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let code = cmd_generate(&cfg, &mut Console { out: &mut o, err: &mut e });
    (code, String::from_utf8(e).unwrap())
}

// Single test: the variable is process-wide.
#[test]
fn template_directory_override() {
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/templates");
    let dir = TempDir::new().unwrap();
    for entry in fs::read_dir(&shipped).unwrap() {
        let p = entry.unwrap().path();
        fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
    }
    let frame = dir.path().join("component-frame.txt.tmpl");
    let text = fs::read_to_string(&frame).unwrap();
    fs::write(&frame, format!("-- house style\n{text}")).unwrap();

    std::env::set_var(TEMPLATE_DIR_VAR, dir.path());
    let out = dir.path().join("out");
    let (code, err) = generate(&out);
    assert_eq!(code, exit::OK, "{err}");
    let doc = fs::read_to_string(out.join("Echo.spec.txt")).unwrap();
    assert!(doc.contains("-- house style\nspec Echo (weak)"), "{doc}");

    fs::remove_file(&frame).unwrap();
    let (code, err) = generate(&dir.path().join("out2"));
    std::env::remove_var(TEMPLATE_DIR_VAR);
    assert_eq!(code, exit::IO);
    assert!(err.contains("component-frame"), "{err}");
    assert!(!dir.path().join("out2").exists());
}
