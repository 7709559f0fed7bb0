//! Critical spaces `H_f = (g·f)^⊥` of orthogonally invariant varieties (Veronese,
//! Segre–Veronese, Grassmann), solvers for the critical points of the squared distance
//! `d_f(x) = q(f − x, f − x)`, and exact ED-degree / flag-degree formulas.

pub mod cjson;
pub mod critical;
pub mod ed_degree;
pub mod error;
pub mod experiments;
pub mod exterior;
pub mod frobenius;
pub(crate) mod linalg;
pub mod solvers;
pub mod tensor;
pub mod tensor_io;

pub use error::{Error, Result};
