//! Special functions: Bessel J of real order, Gegenbauer and zonal functions,
//! real spherical harmonics on S¹/S², and Fourier transforms of harmonics.

mod bessel;
mod fourier;
mod gamma;
mod gegenbauer;
mod harmonics;
pub mod verify;

use thiserror::Error;

pub use bessel::{
    bessel_j, bessel_j_scaled, bessel_j_scaled_sequence, bessel_j_sequence, first_zero, BesselOrder,
};
pub(crate) use bessel::ln_series_envelope;
pub use fourier::{ft_constant, ft_sph_harm, minus_i_pow, p1_basis, spherical_transform};
pub use gamma::{gamma, ln_gamma};
pub use gegenbauer::{gegenbauer, zonal};
pub use harmonics::{
    harmonic_count_upto, harmonic_dimension, harmonics_upto, real_sph_harm, sphere_volume, HarmonicIndex,
};
pub(crate) use harmonics::harmonics_upto_unchecked;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported dimension n = {0} (only 2 and 3 are implemented)")]
    UnsupportedDimension(usize),
    #[error("degenerate Gegenbauer order: C_{ell}^{nu}(1) = 0")]
    DegenerateOrder { ell: u32, nu: f64 },
}
