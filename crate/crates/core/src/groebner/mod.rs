//! Gröbner bases over the rationals for the power-sum ideals `I_{k,n}`.

mod buchberger;
mod membership;
mod polynomial;

pub use buchberger::{buchberger, hilbert_series_quotient, normal_form, GroebnerBasis};
pub use membership::{
    build_ideal_generators, cohomology_poincare, cohomology_poincare_groebner,
    elementary_symmetric, generator_exponent, membership_via_derivatives, BasisSummary,
    IdealBases, IdealGenerator, IdealSpec,
};
pub use polynomial::{Monomial, RationalPolynomial, MAX_EXPONENT, MAX_VARS};
