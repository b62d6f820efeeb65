//! Special functions and quadrature shared by every other module.
//!
//! Everything here is a pure function of its arguments.

mod quadrature;
mod special;

pub use quadrature::{integrate, QuadratureSpec};
pub use special::{
    chi2_1_critical, chi2_1_sf, erf, erfc, normal_cdf, normal_pdf, normal_quantile,
};
