//! Exhaustive bounded comparison of simulated runs against lowered frames.

use std::fmt;

use thiserror::Error;

use crate::ir::{check_trace, eval_frame, lower_component, Failure, FrameKind, SpecFrame, Verdict};
use crate::model::{Model, Value};
use crate::semantics::{
    enumerate_inputs, validate, BudgetExceeded, CausalityCycle, Network, RunError, Trace,
    DEFAULT_BUDGET,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[derive(Default)]
pub enum Exec {
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}


#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub horizon: usize,
    pub budget: u64,
    pub exec: Exec,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            horizon: 4,
            budget: DEFAULT_BUDGET,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error(transparent)]
    Cycle(#[from] CausalityCycle),
}

/// Where in the composition hierarchy a check failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocatedFailure {
    /// Component whose frame rejected the (part) trace.
    pub component: String,
    pub failure: Failure,
}

impl fmt::Display for LocatedFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.component, self.failure)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    /// Position of the input sequence in enumeration order.
    pub index: u64,
    pub inputs: Vec<Vec<Value>>,
    pub trace: Trace,
    pub failure: LocatedFailure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub component: String,
    pub sequences: u64,
    pub counterexample: Option<Counterexample>,
}

/// Lower every component of the model, in model order.
pub fn lower_all(model: &Model) -> Vec<SpecFrame> {
    let report = validate(model);
    (0..model.components.len())
        .map(|i| lower_component(model, i, report.is_deterministic(&model.components[i].name)))
        .collect()
}

/// Check a trace against its component's frame and, for composites, every part recursively.
pub fn check_recorded(model: &Model, frames: &[SpecFrame], trace: &Trace) -> Result<(), LocatedFailure> {
    let idx = model.component(&trace.component).expect("trace of a model component");
    let frame = &frames[idx];
    let located = |failure| LocatedFailure {
        component: trace.component.clone(),
        failure,
    };
    if frame.kind == FrameKind::Composite {
        if let Verdict::Violated { part, index, slot } = eval_frame(frame, trace) {
            return Err(located(Failure::Violated { part, index, slot }));
        }
    } else {
        check_trace(frame, trace).map_err(located)?;
    }
    for part in &trace.parts {
        check_recorded(model, frames, part)?;
    }
    Ok(())
}

/// Enumerate every input sequence of length `horizon`, simulate it and check
/// the trace. Returns the first counterexample in enumeration order.
pub fn run_oracle(
    model: &Model,
    component: usize,
    frames: &[SpecFrame],
    config: &OracleConfig,
) -> Result<OracleReport, OracleError> {
    let network = Network::build(model, component)?;
    let space = enumerate_inputs(&model.components[component], config.horizon, config.budget)?;
    let check = |index: u64| -> Option<Counterexample> {
        let inputs = space.get(index);
        let trace = match network.run(&inputs) {
            Ok(t) => t,
            Err(RunError::Cycle(_)) => unreachable!("network already scheduled"),
            Err(e) => panic!("enumerated inputs are well-typed: {e}"),
        };
        check_recorded(model, frames, &trace).err().map(|failure| Counterexample {
            index,
            inputs,
            trace,
            failure,
        })
    };
    let counterexample = match config.exec {
        Exec::Sequential => (0..space.len()).find_map(check),
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..space.len()).into_par_iter().find_map_first(check)
        }
    };
    Ok(OracleReport {
        component: model.components[component].name.clone(),
        sequences: space.len(),
        counterexample,
    })
}
