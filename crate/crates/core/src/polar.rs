//! Polarization attributes of a quaternion spectral density
//! `Γ = S0 + i S3 + j S1 + k S2`.
//!
//! Undefined quantities (degree of polarization at zero power, angles of an
//! unpolarized bin) are `None`, never NaN.

use std::f64::consts::FRAC_PI_2;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;

/// Slack allowed above `Φ = 1` before a density is rejected. Values inside
/// the slack are clamped to exactly 1.
pub const CLAMP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StokesParams {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl StokesParams {
    pub fn new(s0: f64, s1: f64, s2: f64, s3: f64) -> Self {
        Self { s0, s1, s2, s3 }
    }

    /// Note the axis permutation: `S3` rides on `i`, `S1` on `j`, `S2` on `k`.
    pub fn from_quaternion(g: Quaternion) -> Self {
        Self::new(g.a, g.c, g.d, g.b)
    }

    pub fn to_quaternion(self) -> Quaternion {
        Quaternion::new(self.s0, self.s3, self.s1, self.s2)
    }

    pub fn polarized_power(self) -> f64 {
        (self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3).sqrt()
    }

    /// `(s1, s2, s3) = (S1, S2, S3) / S0`.
    pub fn normalized(self) -> Option<[f64; 3]> {
        (self.s0 > 0.0).then(|| [self.s1 / self.s0, self.s2 / self.s0, self.s3 / self.s0])
    }
}

pub fn quaternion_to_stokes(g: Quaternion) -> StokesParams {
    StokesParams::from_quaternion(g)
}

pub fn stokes_to_quaternion(s: StokesParams) -> Quaternion {
    s.to_quaternion()
}

/// `Φ = |V(Γ)| / S(Γ)`; `None` when the scalar part is not positive.
pub fn degree_of_polarization(g: Quaternion) -> Option<f64> {
    (g.a > 0.0).then(|| g.vector_norm() / g.a)
}

/// Degree of polarization with round-off slack above 1 clamped. The flag
/// reports whether clamping happened.
pub fn clamped_degree_of_polarization(g: Quaternion) -> Option<(f64, bool)> {
    let phi = degree_of_polarization(g)?;
    if phi > 1.0 && phi <= 1.0 + CLAMP_TOL {
        Some((1.0, true))
    } else {
        Some((phi, false))
    }
}

/// Mean orientation `θ ∈ [−π/2, π/2)` and ellipticity `χ ∈ [−π/4, π/4]`,
/// the halves of the Poincaré-sphere azimuth `atan2(S2, S1)` and elevation
/// `asin(S3 / (Φ S0))`.
///
/// `θ` and `θ + π` describe the same ellipse; the returned value is the
/// representative inside `[−π/2, π/2)`.
pub fn poincare_angles(g: Quaternion) -> Option<(f64, f64)> {
    let s = StokesParams::from_quaternion(g);
    let pol = s.polarized_power();
    if s.s0 <= 0.0 || pol == 0.0 {
        return None;
    }
    let mut theta = 0.5 * s.s2.atan2(s.s1);
    if theta >= FRAC_PI_2 {
        theta -= std::f64::consts::PI;
    }
    let chi = 0.5 * (s.s3 / pol).clamp(-1.0, 1.0).asin();
    Some((theta, chi))
}

/// Unpolarized and fully polarized parts of one density value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpDecomposition {
    /// `(1 − Φ) S0`
    pub unpolarized: f64,
    /// `Φ S0 + i S3 + j S1 + k S2`
    pub polarized: Quaternion,
}

impl UpDecomposition {
    pub fn reconstruct(&self) -> Quaternion {
        self.polarized + Quaternion::from_real(self.unpolarized)
    }
}

pub fn up_decompose(g: Quaternion) -> Result<UpDecomposition> {
    let pol = g.vector_norm();
    if g.a <= 0.0 {
        // zero power: both parts vanish; negative power is not a density
        if g.a == 0.0 && pol == 0.0 {
            return Ok(UpDecomposition {
                unpolarized: 0.0,
                polarized: Quaternion::ZERO,
            });
        }
        return Err(Error::InvalidDensity(f64::INFINITY));
    }
    let phi = pol / g.a;
    if phi > 1.0 + CLAMP_TOL {
        return Err(Error::InvalidDensity(phi));
    }
    let polarized_power = pol.min(g.a);
    Ok(UpDecomposition {
        unpolarized: g.a - polarized_power,
        polarized: Quaternion::new(polarized_power, g.b, g.c, g.d),
    })
}

/// Rotary spectrum `P_xx = S0 + S3` and complementary density
/// `P̃_xx = S1 + i S2` at one frequency.
///
/// For `ν > 0`, `P_xx(ν)` is the clockwise power; a positive `S3` adds to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotary {
    pub p_xx: f64,
    pub p_tilde: Complex64,
}

pub fn to_rotary(g: Quaternion) -> Rotary {
    let s = StokesParams::from_quaternion(g);
    Rotary {
        p_xx: s.s0 + s.s3,
        p_tilde: Complex64::new(s.s1, s.s2),
    }
}

/// Inverts [`to_rotary`] given the rotary power at `+ν` and `−ν`, using
/// that `S0` is even and `S3` odd in frequency.
pub fn from_rotary(p_pos: f64, p_neg: f64, p_tilde: Complex64) -> StokesParams {
    StokesParams::new(
        0.5 * (p_pos + p_neg),
        p_tilde.re,
        p_tilde.im,
        0.5 * (p_pos - p_neg),
    )
}

/// Flags bins whose linear-polarization magnitude `√(s1² + s2²)` exceeds
/// `threshold`. A proper signal has `S1 = S2 = 0` at every frequency.
pub fn properness_test(density: &[Quaternion], threshold: f64) -> Vec<bool> {
    density
        .iter()
        .map(|g| {
            let s = StokesParams::from_quaternion(*g);
            if s.s1 == 0.0 && s.s2 == 0.0 {
                return false;
            }
            match s.normalized() {
                Some([s1, s2, _]) => s1.hypot(s2) > threshold,
                None => false,
            }
        })
        .collect()
}

/// Polarization attributes of one bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesBin {
    pub stokes: StokesParams,
    pub phi: Option<f64>,
    pub theta: Option<f64>,
    pub chi: Option<f64>,
}

impl StokesBin {
    pub fn normalized(&self) -> Option<[f64; 3]> {
        self.stokes.normalized()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StokesSpectrum {
    pub bins: Vec<StokesBin>,
    /// Bins whose `Φ` exceeded 1 by less than [`CLAMP_TOL`] and was clamped.
    pub clamped: usize,
}

impl StokesSpectrum {
    pub fn from_density(density: &[Quaternion]) -> Self {
        let mut clamped = 0;
        let bins = density
            .iter()
            .map(|&g| {
                let phi = clamped_degree_of_polarization(g).map(|(phi, was_clamped)| {
                    clamped += usize::from(was_clamped);
                    phi
                });
                let angles = poincare_angles(g);
                StokesBin {
                    stokes: StokesParams::from_quaternion(g),
                    phi,
                    theta: angles.map(|a| a.0),
                    chi: angles.map(|a| a.1),
                }
            })
            .collect();
        Self { bins, clamped }
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }
}
