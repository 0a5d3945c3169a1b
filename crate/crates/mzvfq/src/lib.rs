//! Carlitz multiple zeta values and multiple star polylogarithms over F_q[θ],
//! evaluated at the infinite place and at finite places through logarithms of
//! explicit t-modules.

pub mod bipoly;
pub mod carlitz;
pub mod coproduct;
pub mod decomp;
pub mod error;
pub mod field;
pub mod index;
pub mod inf;
pub mod matrix;
pub mod poly;
pub mod polylog;
pub mod rational;
pub mod relation;
pub mod scalar;
pub mod tmodule;
pub mod vadic_mzv;
pub mod vadic;
mod text;

pub use error::{Error, Result};
pub use field::{Fe, Field};
pub use poly::{Poly, TPoly, TVar, Theta, ThetaPoly};
pub use bipoly::BiPoly;
pub use carlitz::CarlitzTable;
pub use index::{Index, Word};
pub use inf::InfAdic;
pub use matrix::{Mat, TwistedMatrix};
pub use rational::Rat;
pub use scalar::{ExactK, InfCtx, ResidueField, Scalars, VCtx};
pub use vadic::{Place, VAdic};
