//! Validation and time-synchronous execution of resolved models.

mod enumerate;
mod network;
mod step;
mod trace;
mod validate;

pub use enumerate::{enumerate_inputs, BudgetExceeded, InputSpace, DEFAULT_BUDGET};
pub use network::{simulate, CausalityCycle, Instance, Network, Node, RunError, Signal};
pub use step::{step, Reaction, Snapshot};
pub use trace::{
    bind_inputs, parse_atomic_trace, parse_lines, parse_value, InstanceInfo, Stream, StreamKind,
    Trace, TraceError, TraceLine,
};
pub use validate::{
    needs_saturation, type_of, validate, Ty, ValidationReport, DETERMINISM_CHECK_CAP,
};
