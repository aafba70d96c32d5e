//! Spectral factorization of positive definite 2×2 matrix functions on the
//! unit circle, with an a-posteriori bound on the approximation error.

// `!(x > y)` comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circle_fourier;
pub mod completion;
pub mod error;
pub mod factorize;
pub mod files;
pub mod scalar_factor;
pub mod testkit;
pub mod triangular;

pub use circle_fourier::{AnalyticPoly, CircleGrid, GridFn, LaurentPoly, NormEstimate, C64};
pub use error::{Error, ErrorKind, Result};
pub use factorize::{factorize, factorize_to_target, ApproxSpectralFactor, ErrorBound, FactorizeConfig};
pub use triangular::HermitianTrigMatrix;
