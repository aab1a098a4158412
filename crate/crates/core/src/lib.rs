pub mod arith;
pub mod budget;
pub mod cli;
pub mod equidist;
pub mod error;
pub mod graph;
pub mod lattice;
pub mod modq_graph;
pub mod nbwalk;
pub mod quaternion;
pub mod spectral;
pub mod walk;

pub use budget::Budget;
pub use error::{Error, ErrorKind, Result};
