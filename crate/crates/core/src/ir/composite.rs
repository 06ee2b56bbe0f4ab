use crate::model::{Endpoint, Model};

use super::formula::Formula;
use super::frame::{used_types, Decl, FrameKind, SpecFrame};

/// One conjunct of the wiring formula: a sub-instance applied to actual streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wiring {
    pub instance: String,
    pub component: String,
    pub ins: Vec<String>,
    pub outs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeSpec {
    pub frame: SpecFrame,
    pub wiring: Vec<Wiring>,
}

/// Lower a composite: internal channels become stream locals and the
/// guarantee is the conjunction of the sub-instance behaviours.
pub fn lower_composite(model: &Model, component: usize) -> CompositeSpec {
    let c = &model.components[component];
    let comp = c.composite().expect("composite component");
    let inputs: Vec<Decl> = c.inputs.iter().map(|p| Decl::new(&p.name, &p.ty)).collect();
    let outputs: Vec<Decl> = c.outputs.iter().map(|p| Decl::new(&p.name, &p.ty)).collect();
    let locals: Vec<Decl> = comp
        .local_channels()
        .into_iter()
        .map(|i| Decl::new(&comp.channels[i].name, &comp.channels[i].ty))
        .collect();
    let columns: Vec<&str> = inputs
        .iter()
        .chain(&outputs)
        .chain(&locals)
        .map(|d| d.name.as_str())
        .collect();
    let col = |source: Endpoint| -> usize {
        let name = comp.source_name(c, source).expect("connected source");
        columns.iter().position(|n| *n == name).expect("declared stream")
    };

    let mut wiring = Vec::new();
    let mut applications = Vec::new();
    for (k, sub) in comp.subs.iter().enumerate() {
        let sc = &model.components[sub.component];
        let ins: Vec<usize> = (0..sc.inputs.len())
            .map(|p| col(comp.feeding(Endpoint::SubIn { sub: k, port: p }).expect("fed input").source))
            .collect();
        let outs: Vec<usize> = (0..sc.outputs.len())
            .map(|q| col(Endpoint::SubOut { sub: k, port: q }))
            .collect();
        wiring.push(Wiring {
            instance: sub.name.clone(),
            component: sc.name.clone(),
            ins: ins.iter().map(|i| columns[*i].to_string()).collect(),
            outs: outs.iter().map(|i| columns[*i].to_string()).collect(),
        });
        applications.push(Formula::Apply {
            component: sc.name.clone(),
            sub: k,
            ins,
            outs,
        });
    }
    let types = used_types(
        model,
        c.inputs
            .iter()
            .chain(&c.outputs)
            .map(|p| &p.ty)
            .chain(comp.local_channels().into_iter().map(|i| &comp.channels[i].ty)),
    );
    CompositeSpec {
        frame: SpecFrame {
            name: c.name.clone(),
            causality: c.causality,
            kind: FrameKind::Composite,
            types,
            inputs,
            outputs,
            stream_locals: locals,
            state: None,
            vars: Vec::new(),
            init: Vec::new(),
            asm: vec![Formula::truth()],
            gar: vec![Formula::and(applications)],
            notes: Vec::new(),
        },
        wiring,
    }
}
