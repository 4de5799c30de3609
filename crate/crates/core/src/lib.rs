//! Simulation and verification laboratory for monochromatic random waves.
//!
//! * [`specfun`]: Bessel, Gegenbauer, real spherical harmonics and their Fourier transforms.
//! * [`ensemble`]: Gaussian ensembles (P₁-truncated, plane-wave/band-limited, degree-ℓ on S²).
//! * [`nodal`]: zero-set extraction, connected components and topology classification.
//! * [`stats`]: topology measures, discrepancy, scaling fits and concentration runs.
//! * [`approx`]: P₁/T₁ approximation, ball eigenfunctions, isotopy checks and witnesses.
//! * [`cli`]: configuration, manifests, reports and the `monowave` commands.

pub mod field;
pub mod quadrature;
pub mod rng;
pub mod specfun;
pub mod ensemble;
pub mod nodal;
pub mod stats;
pub mod approx;
pub mod cli;
