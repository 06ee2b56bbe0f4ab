//! Compile component-network models into stream-based assumption/guarantee
//! specifications, with a simulator and an exhaustive oracle relating the two.

pub mod frontend;
pub mod ir;
pub mod model;
pub mod oracle;
pub mod render;
pub mod semantics;
