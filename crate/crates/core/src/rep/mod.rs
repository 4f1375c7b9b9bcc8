//! The boundary representation on the tree and the operators built from it.

pub mod lambda;
pub mod rank;
pub mod rho;
pub mod simple;
pub mod tail;
pub mod tt;

pub use lambda::{lambda, lambda_chopped, lambda_exact, lambda_l1_exact};
pub use rho::{apply_rho, coefficient_one, matrix_coefficient};
pub use simple::SimpleFunction;
pub use tt::{build_tt, convergence_experiment, sup_norm_tt1, GroupAlgebraVector};
