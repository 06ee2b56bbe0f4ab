//! Specification IR: formulas, frames, timed tables and their evaluation.

mod composite;
mod eval;
mod formula;
mod frame;
mod lower;
pub mod mutate;
mod table;

pub use composite::{lower_composite, CompositeSpec, Wiring};
pub use eval::{
    cell_name, check_completeness, check_trace, eval_frame, Failure, FramePart, Incomplete, Verdict,
};
pub use formula::{cells_read, Cell, Env, FOp, Formula, Tick};
pub use frame::{used_types, Decl, FrameKind, SpecFrame, TypeDecl};
pub use lower::{enabling, lower_atomic, lower_component, lower_function, state_type, stutter};
pub use table::{build_timed_table, TableCell, TableRow, TimedTable};
