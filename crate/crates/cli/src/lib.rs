//! Command implementations behind the `focusgen` binary.
//!
//! Every command takes a [`RunConfig`] and a [`Console`] and returns its exit code.
//! Diagnostics go to the console's error stream, reports to its output stream
//! and artifacts to files.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use similar::TextDiff;

use focusgen::frontend::{has_errors, lookup_span, parse_by_extension, resolve_diagnostic, Diagnostic, SpanTable};
use focusgen::ir::mutate::{mutate, Mutation};
use focusgen::model::{resolve, Model};
use focusgen::oracle::{lower_all, run_oracle, Exec, OracleConfig, OracleError};
use focusgen::render::{
    check_latex_structure, check_spec_source, component_document, expand_template, listing,
    template_ids, DocKind, Document, TemplateError, TemplateFormat,
};
use focusgen::semantics::{bind_inputs, parse_lines, validate, Network, ValidationReport, DEFAULT_BUDGET};

pub mod exit {
    pub const OK: i32 = 0;
    /// Validation errors, counterexamples, unknown templates.
    pub const FAILURE: i32 = 1;
    /// Unreadable inputs or unwritable outputs.
    pub const IO: i32 = 2;
    pub const BUDGET: i32 = 3;
    pub const DRIFT: i32 = 4;
}

pub const DEFAULT_HORIZON: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Latex,
    Text,
    Both,
}

impl Format {
    fn kinds(self) -> Vec<DocKind> {
        match self {
            Format::Latex => vec![DocKind::Latex],
            Format::Text => vec![DocKind::PlainText],
            Format::Both => vec![DocKind::Latex, DocKind::PlainText],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TieBreak {
    /// The first enabled transition in declaration order fires.
    Order,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Report {
    Text,
    Tsv,
}

/// Options shared by all commands.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    #[arg(skip)]
    pub inputs: Vec<PathBuf>,
    /// Output directory.
    #[arg(long = "out", global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    pub format: Format,
    /// Plain-text documents use ASCII operator forms.
    #[arg(long, global = true)]
    pub ascii: bool,
    /// Number of slots for `oracle` (default 4) and `simulate` (default: length of the input file).
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    /// Largest number of input sequences `oracle` may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long = "tie-break", global = true, value_enum)]
    pub tie_break: Option<TieBreak>,
    #[arg(long, global = true, value_enum, default_value_t = Report::Text)]
    pub report: Report,
    /// Restrict `simulate` and `oracle` to one component (default: root, resp. all).
    #[arg(long, global = true)]
    pub component: Option<String>,
    /// Run the oracle on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    /// Check a deliberately corrupted lowering.
    #[arg(long, global = true, hide = true)]
    pub mutate: Option<Mutation>,
}

impl RunConfig {
    pub fn new(inputs: Vec<PathBuf>) -> Self {
        Self {
            inputs,
            out_dir: None,
            format: Format::Both,
            ascii: false,
            horizon: None,
            budget: DEFAULT_BUDGET,
            tie_break: None,
            report: Report::Text,
            component: None,
            sequential: false,
            mutate: None,
        }
    }

    fn out_dir(&self) -> &Path {
        self.out_dir.as_deref().unwrap_or(Path::new("."))
    }

    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        }
    }
}

pub struct Console<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

macro_rules! say {
    ($w:expr, $($arg:tt)*) => {{
        let _ = writeln!($w, $($arg)*);
    }};
}

enum LoadError {
    Io(String),
    Invalid(Vec<Diagnostic>),
}

fn load_model(path: &Path) -> Result<(Model, SpanTable), LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io(format!("{}: {e}", path.display())))?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("afm");
    let with_file = |ds: Vec<Diagnostic>| ds.into_iter().map(|d| d.with_file(path)).collect();
    let (raw, spans) = parse_by_extension(ext, &text).map_err(|ds| LoadError::Invalid(with_file(ds)))?;
    match resolve(&raw) {
        Ok(m) => Ok((m, spans)),
        Err(e) => Err(LoadError::Invalid(with_file(vec![resolve_diagnostic(&e, &spans)]))),
    }
}

/// Load and validate; prints findings and returns the exit code on failure.
fn load_validated(path: &Path, con: &mut Console<'_>) -> Result<(Model, ValidationReport), i32> {
    let (model, spans) = match load_model(path) {
        Ok(v) => v,
        Err(LoadError::Io(msg)) => {
            say!(con.err, "error: cannot read {msg}");
            return Err(exit::IO);
        }
        Err(LoadError::Invalid(ds)) => {
            for d in ds {
                say!(con.err, "{d}");
            }
            return Err(exit::FAILURE);
        }
    };
    let report = validate(&model);
    for d in &report.diagnostics {
        let mut d = d.clone();
        if d.span.is_none() {
            if let Some(span) = d.location.as_deref().and_then(|l| lookup_span(&spans, l)) {
                d = d.at(span);
            }
        }
        say!(con.err, "{}", d.with_file(path));
    }
    if report.has_errors() {
        return Err(exit::FAILURE);
    }
    Ok((model, report))
}

/// Names of nondeterministic atomic components reachable from `component`.
fn nondeterministic_parts(model: &Model, report: &ValidationReport, component: usize) -> Vec<String> {
    let c = &model.components[component];
    match c.composite() {
        Some(comp) => {
            let mut names: Vec<String> = comp
                .subs
                .iter()
                .flat_map(|s| nondeterministic_parts(model, report, s.component))
                .collect();
            names.sort();
            names.dedup();
            names
        }
        None if !report.is_deterministic(&c.name) => vec![c.name.clone()],
        None => Vec::new(),
    }
}

/// All documents of a model: file name, component and document.
fn documents(
    model: &Model,
    report: &ValidationReport,
    cfg: &RunConfig,
) -> Result<Vec<(String, String, Document)>, TemplateError> {
    let mut out = Vec::new();
    for (i, c) in model.components.iter().enumerate() {
        for kind in cfg.format.kinds() {
            let doc = component_document(model, i, report.is_deterministic(&c.name), kind, cfg.ascii)?;
            out.push((format!("{}.{}", c.name, kind.extension()), c.name.clone(), doc));
        }
    }
    Ok(out)
}

/// Write via a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Documents of every input model keyed by file name; a component defined by
/// several inputs must render identically.
fn collect_documents(cfg: &RunConfig, con: &mut Console<'_>) -> Result<Vec<(String, String, Document)>, i32> {
    let mut docs: BTreeMap<String, (String, Document)> = BTreeMap::new();
    for path in &cfg.inputs {
        let (model, report) = load_validated(path, con)?;
        let generated = documents(&model, &report, cfg).map_err(|e| {
            say!(con.err, "error: {e}");
            exit::IO
        })?;
        for (file, component, doc) in generated {
            match docs.get(&file) {
                Some((_, prior)) if *prior != doc => {
                    say!(con.err, "error: component `{component}` has conflicting definitions");
                    return Err(exit::FAILURE);
                }
                Some(_) => {}
                None => {
                    docs.insert(file, (component, doc));
                }
            }
        }
    }
    Ok(docs.into_iter().map(|(f, (c, d))| (f, c, d)).collect())
}

pub fn cmd_generate(cfg: &RunConfig, con: &mut Console<'_>) -> i32 {
    let docs = match collect_documents(cfg, con) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let dir = cfg.out_dir();
    if let Err(e) = std::fs::create_dir_all(dir) {
        say!(con.err, "error: cannot create {}: {e}", dir.display());
        return exit::IO;
    }
    for (file, _, doc) in &docs {
        let path = dir.join(file);
        if let Err(e) = write_atomic(&path, doc.text().as_bytes()) {
            say!(con.err, "error: cannot write {}: {e}", path.display());
            return exit::IO;
        }
        say!(con.out, "{}", path.display());
    }
    exit::OK
}

pub fn cmd_check(cfg: &RunConfig, con: &mut Console<'_>) -> i32 {
    let mut code = exit::OK;
    for path in &cfg.inputs {
        let name = path.to_string_lossy();
        let findings = if name.ends_with(".txt") || name.ends_with(".tex") {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    say!(con.err, "error: cannot read {}: {e}", path.display());
                    return exit::IO;
                }
            };
            let ds = if name.ends_with(".tex") {
                check_latex_structure(&text)
            } else {
                check_spec_source(&text)
            };
            for d in &ds {
                say!(con.err, "{}", d.clone().with_file(path));
            }
            if has_errors(&ds) {
                exit::FAILURE
            } else {
                exit::OK
            }
        } else {
            match load_validated(path, con) {
                Ok(_) => exit::OK,
                Err(c) => c,
            }
        };
        code = code.max(findings);
    }
    code
}

fn pick_component(model: &Model, cfg: &RunConfig, con: &mut Console<'_>) -> Result<Option<usize>, i32> {
    match &cfg.component {
        None => Ok(None),
        Some(name) => match model.component(name) {
            Some(i) => Ok(Some(i)),
            None => {
                say!(con.err, "error: no component `{name}` in the model");
                Err(exit::FAILURE)
            }
        },
    }
}

pub fn cmd_simulate(cfg: &RunConfig, inputs: &Path, con: &mut Console<'_>) -> i32 {
    let Some(model_path) = cfg.inputs.first() else {
        say!(con.err, "error: no model given");
        return exit::IO;
    };
    let (model, report) = match load_validated(model_path, con) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let component = match pick_component(&model, cfg, con) {
        Ok(c) => c.unwrap_or(model.root),
        Err(code) => return code,
    };
    let racy = nondeterministic_parts(&model, &report, component);
    if !racy.is_empty() && cfg.tie_break.is_none() {
        say!(
            con.err,
            "error: {} nondeterministic; pass --tie-break=order to fire the first enabled transition",
            racy.join(", ") + if racy.len() == 1 { " is" } else { " are" }
        );
        return exit::FAILURE;
    }
    let text = match std::fs::read_to_string(inputs) {
        Ok(t) => t,
        Err(e) => {
            say!(con.err, "error: cannot read {}: {e}", inputs.display());
            return exit::IO;
        }
    };
    let comp = &model.components[component];
    let mut slots = match parse_lines(&text).and_then(|lines| bind_inputs(comp, &lines)) {
        Ok(s) => s,
        Err(e) => {
            say!(con.err, "{}: error: {e}", inputs.display());
            return exit::FAILURE;
        }
    };
    if let Some(h) = cfg.horizon {
        slots.resize(h, vec![focusgen::model::Value::Absent; comp.inputs.len()]);
    }
    let trace = match Network::build(&model, component).map_err(|e| e.to_string()).and_then(|n| n.run(&slots).map_err(|e| e.to_string())) {
        Ok(t) => t,
        Err(e) => {
            say!(con.err, "error: {e}");
            return exit::FAILURE;
        }
    };
    let exported = trace.export(cfg.ascii);
    match &cfg.out_dir {
        Some(dir) => {
            let path = dir.join(format!("{}.trace", comp.name));
            if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| write_atomic(&path, exported.as_bytes())) {
                say!(con.err, "error: cannot write {}: {e}", path.display());
                return exit::IO;
            }
            say!(con.out, "{}", path.display());
        }
        None => {
            let _ = con.out.write_all(exported.as_bytes());
        }
    }
    exit::OK
}

pub fn cmd_oracle(cfg: &RunConfig, con: &mut Console<'_>) -> i32 {
    let Some(model_path) = cfg.inputs.first() else {
        say!(con.err, "error: no model given");
        return exit::IO;
    };
    let (model, report) = match load_validated(model_path, con) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let targets: Vec<usize> = match pick_component(&model, cfg, con) {
        Ok(Some(c)) => vec![c],
        Ok(None) => (0..model.components.len()).collect(),
        Err(code) => return code,
    };
    let oracle = OracleConfig {
        horizon: cfg.horizon.unwrap_or(DEFAULT_HORIZON),
        budget: cfg.budget,
        exec: cfg.exec(),
    };
    let frames = lower_all(&model);
    let mut code = exit::OK;
    let mut mutated_any = false;
    for c in targets {
        let name = &model.components[c].name;
        let racy = nondeterministic_parts(&model, &report, c);
        if !racy.is_empty() {
            say!(con.err, "error: {name}: nondeterministic parts {}; the oracle needs a deterministic model", racy.join(", "));
            code = code.max(exit::FAILURE);
            continue;
        }
        let mut frames = frames.clone();
        if let Some(m) = cfg.mutate {
            match mutate(&frames[c], m) {
                Some(f) => {
                    frames[c] = f;
                    mutated_any = true;
                }
                None => {
                    say!(con.out, "{name}: mutation {m} does not apply");
                    continue;
                }
            }
        }
        match run_oracle(&model, c, &frames, &oracle) {
            Ok(r) => match r.counterexample {
                None => say!(
                    con.out,
                    "{name}: {} input sequences at horizon {}, all satisfied",
                    r.sequences,
                    oracle.horizon
                ),
                Some(cx) => {
                    say!(con.out, "{name}: counterexample (input sequence {}): {}", cx.index, cx.failure);
                    let _ = con.out.write_all(cx.trace.export(cfg.ascii).as_bytes());
                    code = exit::FAILURE;
                }
            },
            Err(OracleError::Budget(b)) => {
                say!(con.err, "error: {name}: {b}");
                if code == exit::OK {
                    code = exit::BUDGET;
                }
            }
            Err(e @ OracleError::Cycle(_)) => {
                say!(con.err, "error: {name}: {e}");
                code = exit::FAILURE;
            }
        }
    }
    if cfg.mutate.is_some() && !mutated_any && code == exit::OK {
        say!(con.err, "error: the mutation applies to no checked component");
        return exit::IO;
    }
    code
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DriftStatus {
    Unchanged,
    /// Unified diff from the stored document to the regenerated one.
    Changed(String),
    New,
    /// A stored document without a model counterpart.
    Orphaned,
}

impl DriftStatus {
    pub fn label(&self) -> &'static str {
        match self {
            DriftStatus::Unchanged => "unchanged",
            DriftStatus::Changed(_) => "changed",
            DriftStatus::New => "new",
            DriftStatus::Orphaned => "orphaned",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DriftEntry {
    pub component: String,
    pub file: String,
    pub status: DriftStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DriftReport {
    pub entries: Vec<DriftEntry>,
}

impl DriftReport {
    pub fn all_unchanged(&self) -> bool {
        self.entries.iter().all(|e| e.status == DriftStatus::Unchanged)
    }

    pub fn status(&self, file: &str) -> Option<&DriftStatus> {
        self.entries.iter().find(|e| e.file == file).map(|e| &e.status)
    }
}

/// Compare regenerated documents with those stored in `dir`.
pub fn drift(generated: Vec<(String, String, Document)>, dir: &Path, kinds: &[DocKind]) -> std::io::Result<DriftReport> {
    let mut stored: BTreeMap<String, String> = BTreeMap::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(file) = path.file_name().and_then(|f| f.to_str()).map(str::to_string) else { continue };
        if kinds.iter().any(|k| file.ends_with(&format!(".{}", k.extension()))) {
            stored.insert(file, std::fs::read_to_string(&path)?);
        }
    }
    let mut entries = Vec::new();
    for (file, component, doc) in generated {
        let status = match stored.remove(&file) {
            None => DriftStatus::New,
            Some(old) => {
                if Document::is_intact(&old) && Document::recorded_checksum(&old) == Some(doc.checksum.as_str()) {
                    DriftStatus::Unchanged
                } else {
                    let new = doc.text();
                    let diff = TextDiff::from_lines(&old, &new)
                        .unified_diff()
                        .context_radius(2)
                        .header(&format!("stored/{file}"), &format!("model/{file}"))
                        .to_string();
                    DriftStatus::Changed(diff)
                }
            }
        };
        entries.push(DriftEntry { component, file, status });
    }
    for file in stored.into_keys() {
        let component = file.split('.').next().unwrap_or_default().to_string();
        entries.push(DriftEntry {
            component,
            file,
            status: DriftStatus::Orphaned,
        });
    }
    entries.sort_by(|a, b| a.file.cmp(&b.file));
    Ok(DriftReport { entries })
}

pub fn cmd_diff(cfg: &RunConfig, con: &mut Console<'_>) -> i32 {
    let generated = match collect_documents(cfg, con) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let report = match drift(generated, cfg.out_dir(), &cfg.format.kinds()) {
        Ok(r) => r,
        Err(e) => {
            say!(con.err, "error: cannot read stored documents in {}: {e}", cfg.out_dir().display());
            return exit::IO;
        }
    };
    match cfg.report {
        Report::Tsv => {
            say!(con.out, "status\tcomponent\tfile");
            for e in &report.entries {
                say!(con.out, "{}\t{}\t{}", e.status.label(), e.component, e.file);
            }
        }
        Report::Text => {
            for e in &report.entries {
                say!(con.out, "{:<9} {}", e.status.label(), e.file);
                if let DriftStatus::Changed(diff) = &e.status {
                    let _ = con.out.write_all(diff.as_bytes());
                }
            }
        }
    }
    if report.all_unchanged() {
        exit::OK
    } else {
        exit::DRIFT
    }
}

/// A filled-in skeleton of a template, ready for hand editing.
pub fn template_skeleton(id: &str, format: TemplateFormat) -> Result<String, TemplateError> {
    let latex = format == TemplateFormat::Latex;
    let pick = |text: &str, tex: &str| if latex { tex.to_string() } else { text.to_string() };
    let subst = BTreeMap::from([
        ("name", "Name".to_string()),
        ("causality", "weak".to_string()),
        (
            "interface",
            pick(
                "  in  x : Bool\n  out y : Bool",
                "\\finput{\\fname{x}}{\\fname{Bool}}\n\\foutput{\\fname{y}}{\\fname{Bool}}",
            ),
        ),
        (
            "locals",
            match id {
                "composite-frame" => String::new(),
                _ => pick("  loc st : NameState", "\\flocal{\\fname{st}}{\\fname{NameState}}"),
            },
        ),
        ("init", pick("  st(0) = Idle", "\\fequation{\\fzero{st} \\feq \\fconst{Idle}}")),
        ("init-section", String::new()),
        ("asm", pick("  (1) true", "\\fformula{1}{\\fconst{true}}")),
        (
            "gar",
            match id {
                "function-frame" => pick("  (1) y(t) = x(t)", "\\fformula{1}{\\fnow{y} \\feq \\fnow{x}}"),
                "composite-frame" => pick(
                    "  (1) Part(x; y)",
                    "\\fformula{1}{\\fapp{Part}{\\fname{x}}{\\fname{y}}}",
                ),
                _ => pick(
                    "  (1) st(t) = Idle → y(t) = x(t) ∧ st(t+1) = Idle",
                    "\\fformula{1}{\\fnow{st} \\feq \\fconst{Idle} \\fimp \\fnow{y} \\feq \\fnow{x} \\fand \\fnext{st} \\feq \\fconst{Idle}}",
                ),
            },
        ),
        (
            "header",
            pick(
                "  st(t) | x(t) | guard | y(t) | st(t+1)",
                "$\\fnow{st}$ & $\\fnow{x}$ & $\\text{guard}$ & $\\fnow{y}$ & $\\fnext{st}$ \\\\",
            ),
        ),
        ("rule", pick("  ------+------+-------+------+--------", "")),
        (
            "rows",
            pick(
                "  Idle  | —    | true  | x(t) | Idle",
                "$\\fconst{Idle}$ & $\\fdontcare$ & $\\fconst{true}$ & $\\fnow{x}$ & $\\fconst{Idle}$ \\\\",
            ),
        ),
        ("columns", "lllll".to_string()),
        ("definition", pick("{a, b}", "\\fconst{a}, \\fconst{b}")),
    ]);
    expand_template(id, format, &subst)
}

pub fn cmd_template(cfg: &RunConfig, id: &str, con: &mut Console<'_>) -> i32 {
    let format = match cfg.format {
        Format::Latex => TemplateFormat::Latex,
        _ => TemplateFormat::Text,
    };
    let text = match template_skeleton(id, format) {
        Ok(t) => t,
        Err(TemplateError::MissingTemplate(name)) => {
            let known: Vec<&str> = template_ids().collect();
            say!(con.err, "error: no template `{name}`; known: {}", known.join(", "));
            return exit::FAILURE;
        }
        Err(e) => {
            say!(con.err, "error: {e}");
            return exit::FAILURE;
        }
    };
    match &cfg.out_dir {
        Some(dir) => {
            let ext = if format == TemplateFormat::Latex { "tex" } else { "txt" };
            let path = dir.join(format!("{id}.{ext}"));
            if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| write_atomic(&path, text.as_bytes())) {
                say!(con.err, "error: cannot write {}: {e}", path.display());
                return exit::IO;
            }
            say!(con.out, "{}", path.display());
        }
        None => {
            let _ = con.out.write_all(text.as_bytes());
        }
    }
    exit::OK
}

pub fn cmd_operators(con: &mut Console<'_>) -> i32 {
    let _ = con.out.write_all(listing().as_bytes());
    exit::OK
}
