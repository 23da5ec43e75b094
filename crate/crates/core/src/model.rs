//! Synthetic bivariate signals with closed-form spectral densities.
//!
//! Spectral values use per-bin density units: on an `N`-point grid the
//! expected polarization periodogram of white noise with per-sample power
//! `E|w[t]|² = S0` is `S0` at every bin, and a Dirac line of weight `Γ0`
//! sitting on bin `k0` shows up as `N · Γ0` there. Ratios such as the
//! normalized Stokes parameters and `Φ` do not depend on this choice.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::estimate::QuaternionCovariance;
use crate::polar::StokesParams;
use crate::qft::mirror_bin;
use crate::quaternion::{Axis, Quaternion};
use crate::rng;
use crate::signal::BivariateSignal;

/// Elliptically polarized tone
/// `x[t] = 2a e^{iθ}(cos χ cos 2πν0t + i sin χ sin 2πν0t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonochromaticSpec {
    pub amplitude: f64,
    pub theta: f64,
    pub chi: f64,
    pub nu0: f64,
}

impl MonochromaticSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::param("a", format!("must be positive, got {}", self.amplitude)));
        }
        if !self.theta.is_finite() {
            return Err(Error::param("theta", "must be finite"));
        }
        if !(self.chi.abs() <= FRAC_PI_4 + 1e-12) {
            return Err(Error::param("chi", format!("must lie in [-pi/4, pi/4], got {}", self.chi)));
        }
        if !(self.nu0 > 0.0 && self.nu0 < 0.5) {
            return Err(Error::param("nu0", format!("must lie in (0, 1/2), got {}", self.nu0)));
        }
        Ok(())
    }

    /// Line weight `Γ0 = S0 + i S3 + j S1 + k S2` at `+ν0`.
    pub fn line_density(&self) -> Quaternion {
        oracle_monochromatic_stokes(self).to_quaternion()
    }

    /// Bin index of `ν0` on an `n`-point grid, if it falls on the grid.
    pub fn grid_bin(&self, n: usize) -> Option<usize> {
        let k = self.nu0 * n as f64;
        let rounded = k.round();
        ((k - rounded).abs() < 1e-9 && rounded >= 1.0).then_some(rounded as usize)
    }
}

pub fn gen_monochromatic(spec: &MonochromaticSpec, n: usize) -> Result<BivariateSignal> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::EmptySignal);
    }
    let (st, ct) = spec.theta.sin_cos();
    let (sc, cc) = spec.chi.sin_cos();
    let two_a = 2.0 * spec.amplitude;
    let (u, v) = (0..n)
        .map(|t| {
            // reduce the phase before scaling to keep long records exact
            let phase = 2.0 * PI * (spec.nu0 * t as f64).fract();
            let (sp, cp) = phase.sin_cos();
            let (u0, v0) = (two_a * cc * cp, two_a * sc * sp);
            (ct * u0 - st * v0, st * u0 + ct * v0)
        })
        .unzip();
    BivariateSignal::new(u, v)
}

/// `S0 = a²`, `(S1, S2, S3) = a² (cos 2χ cos 2θ, cos 2χ sin 2θ, sin 2χ)`.
pub fn oracle_monochromatic_stokes(spec: &MonochromaticSpec) -> StokesParams {
    let a2 = spec.amplitude * spec.amplitude;
    let (s2t, c2t) = (2.0 * spec.theta).sin_cos();
    let (s2c, c2c) = (2.0 * spec.chi).sin_cos();
    StokesParams::new(a2, a2 * c2c * c2t, a2 * c2c * s2t, a2 * s2c)
}

/// `γ[τ] = 2S0 cos ωτ + 2 j S1 cos ωτ + 2 k (S2 cos ωτ + S3 sin ωτ)` for
/// `τ = −τ_max..=τ_max`.
pub fn oracle_monochromatic_autocov(spec: &MonochromaticSpec, tau_max: usize) -> QuaternionCovariance {
    let s = oracle_monochromatic_stokes(spec);
    let values = (-(tau_max as i64)..=tau_max as i64)
        .map(|tau| {
            let (sn, cs) = (2.0 * PI * spec.nu0 * tau as f64).sin_cos();
            Quaternion::new(2.0 * s.s0 * cs, 0.0, 2.0 * s.s1 * cs, 2.0 * (s.s2 * cs + s.s3 * sn))
        })
        .collect();
    QuaternionCovariance::new(values, tau_max)
}

/// White noise built from its unpolarized/polarized split,
/// `w = √S0 (√(1−Φ) wᵘ + √Φ e^{iθ} wᵖ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhiteNoiseSpec {
    /// Per-sample power `E|w[t]|²`, equal to the constant spectral density.
    pub s0: f64,
    pub phi: f64,
    pub theta: f64,
    pub seed: u64,
}

impl WhiteNoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.s0 > 0.0 && self.s0.is_finite()) {
            return Err(Error::param("s0", format!("must be positive, got {}", self.s0)));
        }
        if !(0.0..=1.0).contains(&self.phi) {
            return Err(Error::param("phi", format!("must lie in [0, 1], got {}", self.phi)));
        }
        if !(self.theta.abs() <= FRAC_PI_2 + 1e-12) {
            return Err(Error::param("theta", format!("must lie in [-pi/2, pi/2], got {}", self.theta)));
        }
        Ok(())
    }

    /// `S0 + j S0 Φ cos 2θ + k S0 Φ sin 2θ` (no `i` part: white noise has no
    /// ellipticity).
    pub fn density(&self) -> Quaternion {
        let (s, c) = (2.0 * self.theta).sin_cos();
        Quaternion::new(self.s0, 0.0, self.s0 * self.phi * c, self.s0 * self.phi * s)
    }
}

/// Draws the noise from stream 0 of `spec.seed`.
pub fn gen_white_noise(spec: &WhiteNoiseSpec, n: usize) -> Result<BivariateSignal> {
    gen_white_noise_with(spec, n, &mut rng::stream(spec.seed, 0))
}

/// Per sample, three standard normals are drawn in the order
/// `g1, g2, g3`; `wᵘ = (g1 + i g2)/√2` and `wᵖ = g3`.
pub fn gen_white_noise_with<R: Rng + ?Sized>(
    spec: &WhiteNoiseSpec,
    n: usize,
    rng: &mut R,
) -> Result<BivariateSignal> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::EmptySignal);
    }
    let unpol = (spec.s0 * (1.0 - spec.phi) / 2.0).sqrt();
    let pol = (spec.s0 * spec.phi).sqrt();
    let (st, ct) = spec.theta.sin_cos();
    let (u, v) = (0..n)
        .map(|_| {
            let g1: f64 = rng.sample(StandardNormal);
            let g2: f64 = rng.sample(StandardNormal);
            let g3: f64 = rng.sample(StandardNormal);
            (unpol * g1 + pol * ct * g3, unpol * g2 + pol * st * g3)
        })
        .unzip();
    BivariateSignal::new(u, v)
}

fn check_noise_moments(sigma_u: f64, sigma_v: f64, rho: f64) -> Result<()> {
    if !(sigma_u >= 0.0) {
        return Err(Error::param("sigma_u", "must be non-negative"));
    }
    if !(sigma_v >= 0.0) {
        return Err(Error::param("sigma_v", "must be non-negative"));
    }
    if !(rho.abs() <= 1.0) {
        return Err(Error::param("rho", "must lie in [-1, 1]"));
    }
    Ok(())
}

/// `Γww = (σu² + σv²) + j (σu² − σv²) + 2 k ρ σu σv`.
pub fn oracle_white_noise_density(sigma_u: f64, sigma_v: f64, rho: f64) -> Result<Quaternion> {
    check_noise_moments(sigma_u, sigma_v, rho)?;
    let (pu, pv) = (sigma_u * sigma_u, sigma_v * sigma_v);
    Ok(Quaternion::new(pu + pv, 0.0, pu - pv, 2.0 * rho * sigma_u * sigma_v))
}

/// `Φ = √((σu² − σv²)² + 4ρ²σu²σv²) / (σu² + σv²)`.
pub fn white_noise_dop(sigma_u: f64, sigma_v: f64, rho: f64) -> Result<Option<f64>> {
    check_noise_moments(sigma_u, sigma_v, rho)?;
    let (pu, pv) = (sigma_u * sigma_u, sigma_v * sigma_v);
    let total = pu + pv;
    Ok((total > 0.0).then(|| ((pu - pv).powi(2) + 4.0 * rho * rho * pu * pv).sqrt() / total))
}

/// Orientation of the linear polarization, `θ = ½ atan2(2ρσuσv, σu² − σv²)`.
///
/// With `σu = σv` this gives `±π/4` (sign of `ρ`); with `ρ = 0` it gives 0
/// or `π/2` depending on which component dominates. Both agree with the
/// Poincaré azimuth `atan2(S2, S1)` exactly.
pub fn oracle_white_noise_angle(sigma_u: f64, sigma_v: f64, rho: f64) -> Result<f64> {
    match white_noise_dop(sigma_u, sigma_v, rho)? {
        Some(phi) if phi > 0.0 => {}
        _ => return Err(Error::Unpolarized),
    }
    let (pu, pv) = (sigma_u * sigma_u, sigma_v * sigma_v);
    Ok(0.5 * (2.0 * rho * sigma_u * sigma_v).atan2(pu - pv))
}

/// Dirac component of a theoretical density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    pub bin: usize,
    /// Line weight (integrated density).
    pub weight: Quaternion,
}

/// A theoretical density sampled on an `N`-point frequency grid, in per-bin
/// density units (see the module docs), plus the lines it contains.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoreticalSpectrum {
    pub density: Vec<Quaternion>,
    pub lines: Vec<SpectralLine>,
}

impl TheoreticalSpectrum {
    pub fn constant(value: Quaternion, n: usize) -> Self {
        Self {
            density: vec![value; n],
            lines: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.density.is_empty()
    }

    /// Adds a line of weight `Γ0` at bin `k0` and its mirror image
    /// `conj_involution_i(Γ0)` at `N − k0`.
    pub fn add_line(&mut self, k0: usize, weight: Quaternion) {
        let n = self.len();
        let scale = n as f64;
        let mirror = mirror_bin(k0, n);
        let image = weight.conj_involution(Axis::I);
        self.density[k0] += weight * scale;
        self.lines.push(SpectralLine { bin: k0, weight });
        if mirror != k0 {
            self.density[mirror] += image * scale;
            self.lines.push(SpectralLine {
                bin: mirror,
                weight: image,
            });
        }
    }

    /// Density of a sum of independent processes.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(Self {
            density: self.density.iter().zip(&other.density).map(|(a, b)| *a + *b).collect(),
            lines: self.lines.iter().chain(&other.lines).copied().collect(),
        })
    }

    pub fn stokes(&self, k: usize) -> StokesParams {
        StokesParams::from_quaternion(self.density[k])
    }
}

pub fn oracle_tone(spec: &MonochromaticSpec, n: usize) -> Result<TheoreticalSpectrum> {
    spec.validate()?;
    let k0 = spec
        .grid_bin(n)
        .ok_or_else(|| Error::param("nu0", format!("{} is not on the {n}-point frequency grid", spec.nu0)))?;
    let mut out = TheoreticalSpectrum::constant(Quaternion::ZERO, n);
    out.add_line(k0, spec.line_density());
    Ok(out)
}

pub fn oracle_white_noise(spec: &WhiteNoiseSpec, n: usize) -> Result<TheoreticalSpectrum> {
    spec.validate()?;
    Ok(TheoreticalSpectrum::constant(spec.density(), n))
}

/// Density of tone plus independent white noise: the noise floor at every
/// bin with the tone's lines on top.
pub fn oracle_tone_plus_noise(
    x_spec: &MonochromaticSpec,
    w_spec: &WhiteNoiseSpec,
    n: usize,
) -> Result<TheoreticalSpectrum> {
    oracle_tone(x_spec, n)?.sum(&oracle_white_noise(w_spec, n)?)
}

/// `Φy = SNR/(SNR + 1) · Φx` for a tone in unpolarized noise.
pub fn tone_in_unpolarized_noise_dop(snr: f64, phi_x: f64) -> f64 {
    snr / (snr + 1.0) * phi_x
}
