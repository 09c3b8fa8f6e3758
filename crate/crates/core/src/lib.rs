//! Exact computations with the algebra generated by the curvature 2-forms
//! of the tautological line bundles on the complete flag variety `SL_n/B`.
//!
//! The crate is organised around two independent routes to the Hilbert
//! series of `A_{k,n}`:
//!
//! * [`exact_linalg`] evaluates every degree-`d` monomial at the curvature
//!   forms inside the squarefree edge algebra ([`edge_algebra`]) and takes
//!   the rank of the resulting integer matrix;
//! * [`groebner`] computes a Gröbner basis of the ideal generated by the
//!   power-sum generators `(x_{i_1}+...+x_{i_j})^{j(n-j)+1}` and counts
//!   standard monomials.
//!
//! [`exterior_algebra`] handles the full algebra of invariant forms,
//! [`combinatorics`] the forest and Eulerian digraph counts, and
//! [`presentations`] ties everything together into reproducible checks.

pub mod combinatorics;
pub mod edge_algebra;
pub mod error;
pub mod exact_linalg;
pub mod exterior_algebra;
pub mod groebner;
pub mod hilbert;
pub mod presentations;

pub use error::{Error, Result};
pub use hilbert::HilbertSeries;

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x00C0_FFEE;
