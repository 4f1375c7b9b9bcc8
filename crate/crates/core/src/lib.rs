//! Boundary representations of hyperbolic groups, computed on two concrete
//! models: free groups acting on their Cayley trees (exact arithmetic in
//! `Q(√(2k−1))`) and cocompact Fuchsian groups acting on the Poincaré disk.

pub mod acceptance;
pub mod counting;
pub mod error;
pub mod exact;
pub mod measure;
pub mod oracle;
pub mod output;
pub mod plane;
pub mod rep;
pub mod space;
pub mod spectra;
pub mod tree;

pub use error::{Error, Result};
pub use exact::ExactScalar;
