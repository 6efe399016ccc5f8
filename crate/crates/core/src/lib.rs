//! Inverse branches of `f(a,w) = sinh(aw)e^w`, the transition function
//! between them, and the p,q-binomial distributions they describe.

mod error;
mod numeric;

pub mod branches;
pub mod calculus;
pub mod cli;
pub mod lambert;
pub mod param;
pub mod parametrize;
pub mod pqbinom;
pub mod reference;
pub mod series;

pub use error::{Error, Result};
pub use param::{AsymmetryParam, BranchConstants, BranchId, ParamKind};
