//! Desk-scale toolkit for sieving solvable fibers of structured polynomials
//! `F(Y,X) = Y^{md} + Y^{m(d-1)} f_1(X) + ... + f_d(X)`.
//!
//! The crate computes every object in the sieve argument exactly or with an
//! explicit error budget: fiber counts over prime fields, exponential-sum
//! tables (bulk, via multidimensional DFT), tangency classification of
//! hyperplanes against the associated hypersurface `V(F(Z^e,X))`, the
//! coefficient-reduction dichotomy, smooth-weight Fourier data, and the
//! assembled sieve upper bound, together with verification suites for the
//! identities and inequalities tying them together.

pub mod algebra;
pub mod coeffreduce;
pub mod counting;
pub mod dualgeom;
pub mod expsum;
pub mod fixtures;
pub mod prng;
pub mod sieve;
pub mod structured;
pub mod verify;

pub use algebra::{FieldDesc, FieldElem, SparsePoly};
pub use structured::StructuredF;
