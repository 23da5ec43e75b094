//! Spectral analysis of stationary bivariate signals with the quaternion
//! Fourier transform.
//!
//! A bivariate signal `x[t] = u[t] + i v[t]` has a quaternion-valued
//! spectral density `Γ(ν) = S0 + i S3 + j S1 + k S2` whose components are
//! the Stokes parameters. This crate provides the transform, signal models
//! with closed-form densities, periodogram and multitaper estimators,
//! polarization attributes, and the Monte-Carlo studies built on them.

pub mod error;
pub mod estimate;
pub mod model;
pub mod polar;
pub mod qft;
pub mod quaternion;
pub mod rng;
pub mod signal;
pub mod slepian;
pub mod study;

pub use error::{Error, Result};
pub use estimate::{
    est_cross_cov, est_quaternion_autocov, est_quaternion_cross_cov, expected_periodogram, multitaper_estimate,
    polarization_periodogram, EstimateMethod, LagSeries, QuaternionCovariance, SpectralDensityEstimate,
};
pub use model::{
    gen_monochromatic, gen_white_noise, MonochromaticSpec, TheoreticalSpectrum, WhiteNoiseSpec,
};
pub use polar::{degree_of_polarization, poincare_angles, up_decompose, StokesParams, StokesSpectrum};
pub use qft::{qft_forward, qft_forward_signal, qft_inverse, QftPlan, QuaternionSpectrum};
pub use quaternion::{Axis, EulerPolarForm, Quaternion};
pub use signal::BivariateSignal;
pub use slepian::{slepian_tapers, TaperSet};
pub use study::{averaged_dop_estimate, run_bias_study, run_section5_experiment, BiasStudyConfig, BiasTable};
