//! Discrete quaternion Fourier transform of axis `j`.
//!
//! ```text
//! X_k = Σ_t x[t] · exp(−j 2π k t / N)        (kernel on the right)
//! x[t] = (1/N) Σ_k X_k · exp(+j 2π k t / N)
//! ```
//!
//! Writing `x[t] = q1[t] + i q2[t]` with `q1, q2` in the `{1, j}` subfield,
//! right multiplication by the kernel acts on each half separately, so the
//! transform is two ordinary complex DFTs: `X = FFT(q1) + i FFT(q2)`.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::quaternion::{Axis, Quaternion};
use crate::signal::BivariateSignal;

/// Per-bin quaternion values at `ν_k = k/N`, `k = 0..N−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuaternionSpectrum {
    pub bins: Vec<Quaternion>,
}

impl QuaternionSpectrum {
    pub fn new(bins: Vec<Quaternion>) -> Self {
        Self { bins }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            bins: vec![Quaternion::ZERO; n],
        }
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn frequency(&self, k: usize) -> f64 {
        k as f64 / self.len() as f64
    }

    pub fn signed_frequency(&self, k: usize) -> f64 {
        signed_frequency(k, self.len())
    }

    /// Bin holding `−ν_k`.
    pub fn mirror(&self, k: usize) -> usize {
        mirror_bin(k, self.len())
    }
}

impl std::ops::Index<usize> for QuaternionSpectrum {
    type Output = Quaternion;
    fn index(&self, k: usize) -> &Quaternion {
        &self.bins[k]
    }
}

/// Maps bin `k` of an `n`-point grid to its frequency in `[−1/2, 1/2)`.
pub fn signed_frequency(k: usize, n: usize) -> f64 {
    let k = k % n;
    if 2 * k >= n {
        k as f64 / n as f64 - 1.0
    } else {
        k as f64 / n as f64
    }
}

pub fn mirror_bin(k: usize, n: usize) -> usize {
    (n - k % n) % n
}

/// Cached forward and inverse FFT plans for one length.
///
/// Plans are immutable once built and can be shared across threads; every
/// call allocates its own scratch buffers.
#[derive(Clone)]
pub struct QftPlan {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for QftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QftPlan").field("n", &self.n).finish()
    }
}

impl QftPlan {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySignal);
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: len,
            });
        }
        Ok(())
    }

    /// Complex DFT of a real sequence.
    pub fn real_dft(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        self.check(x.len())?;
        let mut buf: Vec<Complex64> = x.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        self.forward.process(&mut buf);
        Ok(buf)
    }

    /// Transforms of the two components, `U = FFT(u)` and `V = FFT(v)`.
    pub fn component_dfts(&self, x: &BivariateSignal) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        Ok((self.real_dft(x.u())?, self.real_dft(x.v())?))
    }

    pub fn forward(&self, x: &[Quaternion]) -> Result<QuaternionSpectrum> {
        self.check(x.len())?;
        if let Some(t) = x.iter().position(|q| !q.is_finite()) {
            return Err(Error::NonFinite(t));
        }
        let (mut q1, mut q2): (Vec<Complex64>, Vec<Complex64>) =
            x.iter().map(|q| q.symplectic_split()).unzip();
        self.forward.process(&mut q1);
        self.forward.process(&mut q2);
        Ok(QuaternionSpectrum::new(
            q1.into_iter()
                .zip(q2)
                .map(|(a, b)| Quaternion::from_symplectic(a, b))
                .collect(),
        ))
    }

    pub fn forward_signal(&self, x: &BivariateSignal) -> Result<QuaternionSpectrum> {
        let (u, v) = self.component_dfts(x)?;
        Ok(QuaternionSpectrum::new(
            u.into_iter()
                .zip(v)
                .map(|(a, b)| Quaternion::from_symplectic(a, b))
                .collect(),
        ))
    }

    pub fn inverse(&self, spectrum: &QuaternionSpectrum) -> Result<Vec<Quaternion>> {
        self.check(spectrum.len())?;
        let (mut q1, mut q2): (Vec<Complex64>, Vec<Complex64>) =
            spectrum.bins.iter().map(|q| q.symplectic_split()).unzip();
        self.inverse.process(&mut q1);
        self.inverse.process(&mut q2);
        let scale = 1.0 / self.n as f64;
        Ok(q1
            .into_iter()
            .zip(q2)
            .map(|(a, b)| Quaternion::from_symplectic(a * scale, b * scale))
            .collect())
    }
}

pub fn qft_forward(x: &[Quaternion]) -> Result<QuaternionSpectrum> {
    if x.is_empty() {
        return Err(Error::EmptySignal);
    }
    QftPlan::new(x.len())?.forward(x)
}

pub fn qft_forward_signal(x: &BivariateSignal) -> Result<QuaternionSpectrum> {
    QftPlan::new(x.len())?.forward_signal(x)
}

pub fn qft_inverse(spectrum: &QuaternionSpectrum) -> Result<Vec<Quaternion>> {
    QftPlan::new(spectrum.len())?.inverse(spectrum)
}

/// `max_k |X_{N−k} − involution_i(X_k)|`, zero for transforms of
/// `{1, i}`-valued signals.
pub fn check_i_hermitian(spectrum: &QuaternionSpectrum) -> f64 {
    let n = spectrum.len();
    (0..n)
        .map(|k| spectrum[mirror_bin(k, n)].abs_diff(spectrum[k].involution(Axis::I)))
        .fold(0.0, f64::max)
}
