use crate::error::{Error, Result};
use crate::quaternion::Quaternion;

/// A length-N record of `x[t] = u[t] + i v[t]`, unit sampling step.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateSignal {
    u: Vec<f64>,
    v: Vec<f64>,
}

impl BivariateSignal {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::LengthMismatch {
                left: u.len(),
                right: v.len(),
            });
        }
        if u.is_empty() {
            return Err(Error::EmptySignal);
        }
        if let Some(t) = u
            .iter()
            .zip(&v)
            .position(|(a, b)| !a.is_finite() || !b.is_finite())
        {
            return Err(Error::NonFinite(t));
        }
        Ok(Self { u, v })
    }

    pub fn from_pairs(samples: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let (u, v) = samples.into_iter().unzip();
        Self::new(u, v)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n], vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn sample(&self, t: usize) -> (f64, f64) {
        (self.u[t], self.v[t])
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.u.iter().copied().zip(self.v.iter().copied())
    }

    pub fn to_quaternions(&self) -> Vec<Quaternion> {
        self.iter()
            .map(|(u, v)| Quaternion::from_bivariate(u, v))
            .collect()
    }

    /// Samplewise sum, e.g. tone plus noise.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        let u = self.u.iter().zip(&other.u).map(|(a, b)| a + b).collect();
        let v = self.v.iter().zip(&other.v).map(|(a, b)| a + b).collect();
        Ok(Self { u, v })
    }

    /// Multiplies every sample by the real taper `h[t]`.
    pub fn tapered(&self, h: &[f64]) -> Result<Self> {
        if h.len() != self.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: h.len(),
            });
        }
        let u = self.u.iter().zip(h).map(|(a, w)| a * w).collect();
        let v = self.v.iter().zip(h).map(|(a, w)| a * w).collect();
        Ok(Self { u, v })
    }

    /// Rotates the `(u, v)` frame: `x → e^{iα} x`.
    pub fn rotated(&self, alpha: f64) -> Self {
        let (s, c) = alpha.sin_cos();
        let (u, v) = self
            .iter()
            .map(|(u, v)| (c * u - s * v, s * u + c * v))
            .unzip();
        Self { u, v }
    }
}
