//! Exact polynomial arithmetic: univariate root isolation, multivariate
//! polynomials over the rationals, truncated series exponentials and
//! determinants of polynomial matrices.

pub mod multi;
pub mod rational;
pub mod roots;
pub mod uni;

pub use multi::{poly_matrix_det, series_exp, series_exp_symbolic, Exponent, MultiPoly};
pub use rational::Rational;
pub use roots::{all_real_roots, count_real_roots, count_real_roots_f64, real_roots_exact, real_roots_in_interval, Root};
pub use uni::{RatPoly, UniPoly};
