//! Multilinear Hausdorff operators on the p-adic space `Q_p^n`.
//!
//! The crate evaluates Hausdorff operators and their commutators on radial
//! power-log functions in closed form, computes Lebesgue, central Morrey and
//! CMO norms with power and Muckenhoupt weights, and checks the operator-norm
//! bounds `C1`..`C10` against those exact values.

pub mod error;
pub mod extended;
pub mod family;
pub mod harness;
pub mod operators;
pub mod padic;
pub mod radial;
pub mod weights;

pub use error::{Error, Result};
pub use extended::ExtendedValue;
pub use family::{MatrixFamily, NormProfile};
pub use harness::{compute_constant, ConstantId, Scenario};
pub use operators::{
    commutator_apply, hausdorff_apply, maximal, maximal_mod, KernelSpec, OperatorResult, RadialOutput,
};
pub use padic::{DetBounds, PAdicMatrix, PAdicScalar, PAdicVector, PNorm, Prime};
pub use radial::{ExactRadialFunction, RadialFunction, RadialTerm, ShellRange};
pub use weights::norms::{NormResult, Region};
pub use weights::Weight;
