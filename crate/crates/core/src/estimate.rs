//! Nonparametric estimators of the quaternion spectral density.
//!
//! All estimators index samples `t = 0..N−1`. Shifting the time origin
//! multiplies each transform bin by a unit phase, which leaves the
//! modulus-and-polarmod estimates unchanged.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::TheoreticalSpectrum;
use crate::polar::{clamped_degree_of_polarization, StokesParams, StokesSpectrum};
use crate::qft::{mirror_bin, QftPlan, QuaternionSpectrum};
use crate::quaternion::{Axis, Quaternion};
use crate::signal::BivariateSignal;
use crate::slepian::TaperSet;

/// Values indexed by lag `τ = −max_lag..=max_lag`, zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct LagSeries<T> {
    max_lag: usize,
    values: Vec<T>,
}

pub type QuaternionCovariance = LagSeries<Quaternion>;

impl<T: Copy + Default> LagSeries<T> {
    /// # Panics
    /// If `values.len() != 2 * max_lag + 1`.
    pub fn new(values: Vec<T>, max_lag: usize) -> Self {
        assert_eq!(values.len(), 2 * max_lag + 1, "lag series length");
        Self { max_lag, values }
    }

    pub fn max_lag(&self) -> usize {
        self.max_lag
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn at(&self, tau: i64) -> T {
        if tau.unsigned_abs() as usize > self.max_lag {
            return T::default();
        }
        self.values[(tau + self.max_lag as i64) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        let m = self.max_lag as i64;
        self.values.iter().enumerate().map(move |(i, v)| (i as i64 - m, *v))
    }
}

impl QuaternionCovariance {
    /// Folds the lags onto an `n`-point circle and takes the QFT. For a
    /// biased covariance of a length-`n` record this is the matching
    /// periodogram.
    pub fn spectrum(&self, n: usize) -> Result<QuaternionSpectrum> {
        if n == 0 {
            return Err(Error::EmptySignal);
        }
        let mut wrapped = vec![Quaternion::ZERO; n];
        for (tau, g) in self.iter() {
            wrapped[tau.rem_euclid(n as i64) as usize] += g;
        }
        QftPlan::new(n)?.forward(&wrapped)
    }
}

/// Biased cross-covariance `R̂_ab[τ] = (1/N) Σ_t a[t+τ] b[t]`, lags
/// `−(N−1)..=N−1`.
pub fn est_cross_cov(a: &[f64], b: &[f64]) -> Result<LagSeries<f64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    if n == 0 {
        return Err(Error::EmptySignal);
    }
    let scale = 1.0 / n as f64;
    let values = (-(n as i64 - 1)..n as i64)
        .map(|tau| {
            let sum: f64 = if tau >= 0 {
                let tau = tau as usize;
                a[tau..].iter().zip(b).map(|(x, y)| x * y).sum()
            } else {
                let tau = tau.unsigned_abs() as usize;
                a.iter().zip(&b[tau..]).map(|(x, y)| x * y).sum()
            };
            sum * scale
        })
        .collect();
    Ok(LagSeries::new(values, n - 1))
}

/// `γ̂[τ] = R̂uu + R̂vv + (R̂uu − R̂vv) j + 2 R̂uv[−τ] k`.
///
/// The `k` term takes the cross-covariance at the reversed lag so that the
/// QFT of `γ̂` is the polarization periodogram.
pub fn est_quaternion_autocov(x: &BivariateSignal) -> QuaternionCovariance {
    let ruu = est_cross_cov(x.u(), x.u()).expect("valid signal");
    let rvv = est_cross_cov(x.v(), x.v()).expect("valid signal");
    let ruv = est_cross_cov(x.u(), x.v()).expect("valid signal");
    let m = ruu.max_lag();
    let values = (-(m as i64)..=m as i64)
        .map(|tau| {
            let (uu, vv) = (ruu.at(tau), rvv.at(tau));
            Quaternion::new(uu + vv, 0.0, uu - vv, 2.0 * ruv.at(-tau))
        })
        .collect();
    LagSeries::new(values, m)
}

/// Cross-covariance whose QFT is [`cross_periodogram`]:
///
/// ```text
/// γ̂xy = (R̂[ux,uy] + R̂[vy,vx]) + i (R̂[vx,uy] − R̂[vy,ux])
///      + j (R̂[ux,uy] − R̂[vy,vx]) + k (R̂[vx,uy] + R̂[vy,ux])
/// ```
pub fn est_quaternion_cross_cov(x: &BivariateSignal, y: &BivariateSignal) -> Result<QuaternionCovariance> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let uu = est_cross_cov(x.u(), y.u())?;
    let vv = est_cross_cov(y.v(), x.v())?;
    let vu = est_cross_cov(x.v(), y.u())?;
    let uv = est_cross_cov(y.v(), x.u())?;
    let m = uu.max_lag();
    let values = (-(m as i64)..=m as i64)
        .map(|tau| {
            let (a, b, c, d) = (uu.at(tau), vv.at(tau), vu.at(tau), uv.at(tau));
            Quaternion::new(a + b, c - d, a - b, c + d)
        })
        .collect();
    Ok(LagSeries::new(values, m))
}

/// `(1/N)(X Ȳ + X Y^j j)` per bin, with `Y^j` the conjugate `j`-involution
/// (only the `j` component flips).
pub fn cross_periodogram(x: &BivariateSignal, y: &BivariateSignal) -> Result<QuaternionSpectrum> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let plan = QftPlan::new(x.len())?;
    let (fx, fy) = (plan.forward_signal(x)?, plan.forward_signal(y)?);
    let scale = 1.0 / x.len() as f64;
    Ok(QuaternionSpectrum::new(
        fx.bins
            .iter()
            .zip(&fy.bins)
            .map(|(&a, &b)| (a * b.conj() + a * b.conj_involution(Axis::J) * Quaternion::J) * scale)
            .collect(),
    ))
}

/// Lag-weighted sums
/// `(1/N) Σ_τ Σ_t x[t] e^{−j2πντ} ȳ[t−τ]` and the same with `y[t−τ]^j` in
/// place of `ȳ[t−τ]`, evaluated at `ν = k/N` by direct summation.
pub fn wk_lag_sums(x: &BivariateSignal, y: &BivariateSignal, k: usize) -> Result<(Quaternion, Quaternion)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    let (xq, yq) = (x.to_quaternions(), y.to_quaternions());
    let mut scalar_sum = Quaternion::ZERO;
    let mut vector_sum = Quaternion::ZERO;
    for tau in -(n as i64 - 1)..n as i64 {
        let phase = -2.0 * std::f64::consts::PI * ((k as i64 * tau).rem_euclid(n as i64)) as f64 / n as f64;
        let kernel = Quaternion::exp_axis(Axis::J, phase);
        for t in 0..n {
            let s = t as i64 - tau;
            if s < 0 || s >= n as i64 {
                continue;
            }
            let xk = xq[t] * kernel;
            scalar_sum += xk * yq[s as usize].conj();
            vector_sum += xk * yq[s as usize].conj_involution(Axis::J);
        }
    }
    let scale = 1.0 / n as f64;
    Ok((scalar_sum * scale, vector_sum * scale))
}

/// Increment moments `(1/N) X_k Ȳ_k` and `(1/N) X_k Y_k^j`.
pub fn increment_moments(x: &BivariateSignal, y: &BivariateSignal, k: usize) -> Result<(Quaternion, Quaternion)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let plan = QftPlan::new(x.len())?;
    let (fx, fy) = (plan.forward_signal(x)?, plan.forward_signal(y)?);
    let scale = 1.0 / x.len() as f64;
    Ok((
        fx[k] * fy[k].conj() * scale,
        fx[k] * fy[k].conj_involution(Axis::J) * scale,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMethod {
    Periodogram,
    DirectTapered,
    Multitaper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensityEstimate {
    pub spectrum: QuaternionSpectrum,
    pub method: EstimateMethod,
    /// Number of tapers averaged, for multitaper estimates.
    pub taper_count: Option<usize>,
}

impl SpectralDensityEstimate {
    pub fn len(&self) -> usize {
        self.spectrum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spectrum.is_empty()
    }

    pub fn bins(&self) -> &[Quaternion] {
        &self.spectrum.bins
    }

    pub fn stokes(&self, k: usize) -> StokesParams {
        StokesParams::from_quaternion(self.spectrum[k])
    }

    /// `None` where the estimate has no power.
    pub fn dop(&self, k: usize) -> Option<f64> {
        clamped_degree_of_polarization(self.spectrum[k]).map(|(phi, _)| phi)
    }

    pub fn stokes_spectrum(&self) -> StokesSpectrum {
        StokesSpectrum::from_density(&self.spectrum.bins)
    }

    /// `max_k |Γ̂_{N−k} − conj_involution_i(Γ̂_k)|`: `S3` is odd in
    /// frequency, the other Stokes parameters even.
    pub fn i_symmetry_error(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|k| self.spectrum[mirror_bin(k, n)].abs_diff(self.spectrum[k].conj_involution(Axis::I)))
            .fold(0.0, f64::max)
    }
}

/// Stokes quaternion of one bin from the component transforms, without the
/// `1/N` factor:
/// `|U|² + |V|² + i 2Im(UV̄) + j (|U|² − |V|²) + k 2Re(UV̄)`.
fn bin_density(u: Complex64, v: Complex64) -> Quaternion {
    let (pu, pv) = (u.norm_sqr(), v.norm_sqr());
    let cross = u * v.conj();
    Quaternion::new(pu + pv, 2.0 * cross.im, pu - pv, 2.0 * cross.re)
}

fn direct_density(plan: &QftPlan, x: &BivariateSignal, scale: f64) -> Result<Vec<Quaternion>> {
    let (u, v) = plan.component_dfts(x)?;
    Ok(u.into_iter().zip(v).map(|(a, b)| bin_density(a, b) * scale).collect())
}

/// `Γ̂_k = (1/N)(|F_k|² + polarmod_j(F_k) j)` with `F = QFT(x)`.
pub fn polarization_periodogram(x: &BivariateSignal) -> SpectralDensityEstimate {
    let plan = QftPlan::new(x.len()).expect("signal is non-empty");
    polarization_periodogram_with(&plan, x).expect("plan matches signal length")
}

pub fn polarization_periodogram_with(plan: &QftPlan, x: &BivariateSignal) -> Result<SpectralDensityEstimate> {
    let bins = direct_density(plan, x, 1.0 / x.len() as f64)?;
    Ok(SpectralDensityEstimate {
        spectrum: QuaternionSpectrum::new(bins),
        method: EstimateMethod::Periodogram,
        taper_count: None,
    })
}

/// Single-taper estimate `|F(hx)|² + polarmod_j(F(hx)) j`. With
/// `Σ h² = 1` no further normalization is applied.
pub fn tapered_estimate(x: &BivariateSignal, taper: &[f64]) -> Result<SpectralDensityEstimate> {
    let plan = QftPlan::new(x.len())?;
    Ok(SpectralDensityEstimate {
        spectrum: QuaternionSpectrum::new(direct_density(&plan, &x.tapered(taper)?, 1.0)?),
        method: EstimateMethod::DirectTapered,
        taper_count: None,
    })
}

/// Average of the single-taper estimates over the taper set.
pub fn multitaper_estimate(x: &BivariateSignal, tapers: &TaperSet) -> Result<SpectralDensityEstimate> {
    let plan = QftPlan::new(x.len())?;
    multitaper_estimate_with(&plan, x, tapers)
}

pub fn multitaper_estimate_with(
    plan: &QftPlan,
    x: &BivariateSignal,
    tapers: &TaperSet,
) -> Result<SpectralDensityEstimate> {
    if tapers.len() != x.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: tapers.len(),
        });
    }
    let singles: Vec<Vec<Quaternion>> = tapers
        .tapers()
        .par_iter()
        .map(|h| direct_density(plan, &x.tapered(h)?, 1.0))
        .collect::<Result<_>>()?;
    let k = singles.len() as f64;
    // sequential reduction keeps the sum order fixed
    let mut bins = vec![Quaternion::ZERO; x.len()];
    for single in &singles {
        for (acc, g) in bins.iter_mut().zip(single) {
            *acc += *g;
        }
    }
    for g in &mut bins {
        *g = *g / k;
    }
    Ok(SpectralDensityEstimate {
        spectrum: QuaternionSpectrum::new(bins),
        method: EstimateMethod::Multitaper,
        taper_count: Some(singles.len()),
    })
}

/// `F_N(ν) = sin²(πNν) / (N sin²(πν))`, equal to `N` at integer `ν`.
pub fn fejer_kernel(nu: f64, n: usize) -> f64 {
    let nf = n as f64;
    let s = (std::f64::consts::PI * nu).sin();
    if s.abs() < 1e-12 {
        return nf;
    }
    let num = (std::f64::consts::PI * nf * nu).sin();
    num * num / (nf * s * s)
}

/// Expected periodogram of a length-`n` record: the density convolved with
/// the Fejér kernel, `(1/L) Σ_l F_N(ν_m − ν_l) Γ_l` on the density's own
/// `L`-point grid.
///
/// With `L = n` this returns the input (the kernel vanishes at every nonzero
/// bin). The discrete sum equals the continuous convolution whenever the
/// density is a trigonometric polynomial of degree below `L − n + 1`, so use
/// a grid finer than the record for smooth densities.
pub fn expected_periodogram(density: &TheoreticalSpectrum, n: usize) -> Result<TheoreticalSpectrum> {
    if n == 0 || density.is_empty() {
        return Err(Error::EmptySignal);
    }
    let l = density.len();
    let kernel: Vec<f64> = (0..l).map(|d| fejer_kernel(d as f64 / l as f64, n) / l as f64).collect();
    let out = (0..l)
        .map(|m| {
            (0..l)
                .map(|j| density.density[j] * kernel[(m + l - j) % l])
                .sum()
        })
        .collect();
    Ok(TheoreticalSpectrum {
        density: out,
        lines: Vec::new(),
    })
}
