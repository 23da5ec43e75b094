//! Discrete prolate spheroidal (Slepian) tapers.
//!
//! The tapers are eigenvectors of the symmetric tridiagonal matrix
//!
//! ```text
//! T[t][t]   = ((N − 1 − 2t) / 2)² cos 2πW
//! T[t][t−1] = t (N − t) / 2
//! ```
//!
//! with `W = NW / N`, which commutes with the sinc concentration kernel and
//! shares its eigenvectors. The largest eigenvalues are located by Sturm
//! bisection and the vectors by inverse iteration.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `K` real unit-energy tapers of length `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaperSet {
    tapers: Vec<Vec<f64>>,
    nw: f64,
    concentrations: Vec<f64>,
}

impl TaperSet {
    pub fn new(tapers: Vec<Vec<f64>>, nw: f64, concentrations: Vec<f64>) -> Result<Self> {
        let n = tapers.first().map(Vec::len).ok_or_else(|| Error::param("k", "at least one taper is required"))?;
        if n == 0 {
            return Err(Error::EmptySignal);
        }
        if let Some(bad) = tapers.iter().find(|h| h.len() != n) {
            return Err(Error::LengthMismatch {
                left: n,
                right: bad.len(),
            });
        }
        if concentrations.len() != tapers.len() {
            return Err(Error::LengthMismatch {
                left: tapers.len(),
                right: concentrations.len(),
            });
        }
        Ok(Self {
            tapers,
            nw,
            concentrations,
        })
    }

    /// The single rectangular taper `1/√N`.
    pub fn rectangular(n: usize) -> Result<Self> {
        Self::new(vec![vec![1.0 / (n as f64).sqrt(); n]], 0.0, vec![1.0])
    }

    /// Taper length `N`.
    pub fn len(&self) -> usize {
        self.tapers[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn count(&self) -> usize {
        self.tapers.len()
    }

    pub fn tapers(&self) -> &[Vec<f64>] {
        &self.tapers
    }

    pub fn nw(&self) -> f64 {
        self.nw
    }

    /// In-band energy fractions `λ_k`, decreasing.
    pub fn concentrations(&self) -> &[f64] {
        &self.concentrations
    }
}

pub const DEFAULT_NW: f64 = 4.0;
pub const DEFAULT_K: usize = 5;

pub fn slepian_tapers(n: usize, nw: f64, k: usize) -> Result<TaperSet> {
    if n == 0 {
        return Err(Error::EmptySignal);
    }
    if k == 0 {
        return Err(Error::param("k", "must be at least 1"));
    }
    if k > n {
        return Err(Error::param("k", format!("{k} tapers requested for length {n}")));
    }
    let w = nw / n as f64;
    if !(w > 0.0 && w < 0.5) {
        return Err(Error::param("nw", format!("NW/N must lie in (0, 1/2), got {w}")));
    }

    let diag: Vec<f64> = (0..n)
        .map(|t| {
            let c = (n as f64 - 1.0 - 2.0 * t as f64) / 2.0;
            c * c * (2.0 * PI * w).cos()
        })
        .collect();
    // off[t] couples rows t−1 and t; off[0] is unused
    let off: Vec<f64> = (0..n).map(|t| t as f64 * (n - t) as f64 / 2.0).collect();
    let tri = Tridiagonal { diag, off };

    let mut tapers: Vec<Vec<f64>> = Vec::with_capacity(k);
    for order in 0..k {
        let lambda = tri.eigenvalue_desc(order);
        let mut h = tri.eigenvector(lambda, &tapers)?;
        fix_sign(&mut h, order);
        tapers.push(h);
    }
    let concentrations = tapers.iter().map(|h| concentration(h, w)).collect();
    TaperSet::new(tapers, nw, concentrations)
}

/// Fraction of the taper's energy inside `|ν| < W`.
pub fn concentration(h: &[f64], w: f64) -> f64 {
    let n = h.len();
    let energy: f64 = h.iter().map(|x| x * x).sum();
    let mut inband = 2.0 * w * energy;
    for tau in 1..n {
        let r: f64 = h[tau..].iter().zip(h).map(|(a, b)| a * b).sum();
        inband += 2.0 * r * (2.0 * PI * w * tau as f64).sin() / (PI * tau as f64);
    }
    inband / energy
}

/// Even-order tapers get a non-negative sum, odd-order ones a non-negative
/// initial slope.
fn fix_sign(h: &mut [f64], order: usize) {
    let flip = if order % 2 == 0 {
        h.iter().sum::<f64>() < 0.0
    } else {
        h.len() > 1 && h[1] - h[0] < 0.0
    };
    if flip {
        h.iter_mut().for_each(|x| *x = -*x);
    }
}

struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiagonal {
    fn len(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for t in 0..self.len() {
            let coupling = if t == 0 { 0.0 } else { self.off[t] * self.off[t] / q };
            q = self.diag[t] - x - coupling;
            if q == 0.0 {
                q = -f64::EPSILON * (x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `order`-th largest eigenvalue (0 = largest).
    fn eigenvalue_desc(&self, order: usize) -> f64 {
        let n = self.len();
        let radius = |t: usize| {
            let lo = if t > 0 { self.off[t].abs() } else { 0.0 };
            let hi = if t + 1 < n { self.off[t + 1].abs() } else { 0.0 };
            lo + hi
        };
        let mut lo = (0..n).map(|t| self.diag[t] - radius(t)).fold(f64::INFINITY, f64::min);
        let mut hi = (0..n).map(|t| self.diag[t] + radius(t)).fold(f64::NEG_INFINITY, f64::max);
        // ascending index of the wanted eigenvalue
        let target = n - order;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves `(T − σI) y = r` by Gaussian elimination with partial
    /// pivoting. The upper factor has two superdiagonals after pivoting.
    fn shifted_solve(&self, sigma: f64, r: &[f64]) -> Vec<f64> {
        let n = self.len();
        let scale = self.diag.iter().chain(&self.off).fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
        let tiny = f64::EPSILON * scale;
        let guard = |p: f64| if p.abs() < tiny { tiny.copysign(p) } else { p };
        if n == 1 {
            return vec![r[0] / guard(self.diag[0] - sigma)];
        }
        let mut upper = vec![[0.0; 3]; n];
        let mut rhs = vec![0.0; n];
        let mut cur = [self.diag[0] - sigma, self.off[1], 0.0];
        let mut cur_r = r[0];
        for i in 0..n - 1 {
            let next = [
                self.off[i + 1],
                self.diag[i + 1] - sigma,
                if i + 2 < n { self.off[i + 2] } else { 0.0 },
            ];
            let next_r = r[i + 1];
            let (pivot, pivot_r, other, other_r) = if cur[0].abs() >= next[0].abs() {
                (cur, cur_r, next, next_r)
            } else {
                (next, next_r, cur, cur_r)
            };
            let p0 = guard(pivot[0]);
            let f = other[0] / p0;
            upper[i] = [p0, pivot[1], pivot[2]];
            rhs[i] = pivot_r;
            cur = [other[1] - f * pivot[1], other[2] - f * pivot[2], 0.0];
            cur_r = other_r - f * pivot_r;
        }
        upper[n - 1] = [guard(cur[0]), 0.0, 0.0];
        rhs[n - 1] = cur_r;

        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            if i + 1 < n {
                acc -= upper[i][1] * y[i + 1];
            }
            if i + 2 < n {
                acc -= upper[i][2] * y[i + 2];
            }
            y[i] = acc / upper[i][0];
        }
        y
    }

    /// Inverse iteration at `lambda`, kept orthogonal to `previous`.
    fn eigenvector(&self, lambda: f64, previous: &[Vec<f64>]) -> Result<Vec<f64>> {
        let n = self.len();
        // deterministic start with components along every eigenvector
        let mut y: Vec<f64> = (0..n).map(|t| 1.0 + 0.1 * ((t as f64 + 1.0) * 0.7).sin()).collect();
        normalize(&mut y)?;
        for _ in 0..6 {
            y = self.shifted_solve(lambda, &y);
            orthogonalize(&mut y, previous);
            normalize(&mut y)?;
        }
        Ok(y)
    }
}

fn orthogonalize(y: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let dot: f64 = y.iter().zip(b).map(|(a, c)| a * c).sum();
        y.iter_mut().zip(b).for_each(|(a, c)| *a -= dot * c);
    }
}

fn normalize(y: &mut [f64]) -> Result<()> {
    let norm = y.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !norm.is_finite() || norm == 0.0 {
        return Err(Error::Eigensolver("inverse iteration lost the eigenvector".into()));
    }
    y.iter_mut().for_each(|x| *x /= norm);
    Ok(())
}
