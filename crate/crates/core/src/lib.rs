//! Exact computations around the exterior square of `GL_n`.
//!
//! Matrices live over ℤ, ℚ or ℤ/m. `∧²GL_n` sits inside `GL_N`,
//! `N = C(n,2)`, as the point set of an affine group scheme cut out by
//! quadratic equations in the entries; [`scheme::membership`] decides it and
//! returns either the witness θ-table or the first violated equation.

pub mod combinat;
pub mod diagram;
pub mod exalg;
pub mod io;
pub mod pluecker;
pub mod random;
pub mod scalar;
pub mod scheme;
pub mod selftest;
pub mod transvect;

pub use combinat::{IndexSet, Pair, Quad};
pub use exalg::{wedge, Indexing, SquareMatrix};
pub use scalar::{RingTag, Scalar};
pub use scheme::{membership, MembershipOptions, MembershipReport, ThetaTable, Verdict};
