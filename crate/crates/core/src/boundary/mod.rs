//! Boundary-going sequences with equality in the contraction inequality.

pub mod matcher;
pub mod run;
pub mod sequence;
pub mod taxonomy;

pub use matcher::*;
pub use run::*;
pub use sequence::*;
pub use taxonomy::*;
