//! Real quaternions `a + b i + c j + d k` with `i² = j² = k² = ijk = −1`.
//!
//! Besides the usual Hamilton product this module carries the involutions
//! used throughout the spectral machinery, the `q · conj_involution(q, j)`
//! product, and the Euler polar form `|q| e^{iθ} e^{−kχ} e^{jφ}`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance for algebraic round trips.
pub const EQ_TOL: f64 = 1e-10;

/// One of the three imaginary units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    I,
    J,
    K,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::I, Axis::J, Axis::K];

    pub fn unit(self) -> Quaternion {
        match self {
            Axis::I => Quaternion::I,
            Axis::J => Quaternion::J,
            Axis::K => Quaternion::K,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    #[inline]
    pub const fn from_real(a: f64) -> Self {
        Self::new(a, 0.0, 0.0, 0.0)
    }

    /// Embeds the bivariate sample `u + i v`.
    #[inline]
    pub const fn from_bivariate(u: f64, v: f64) -> Self {
        Self::new(u, v, 0.0, 0.0)
    }

    #[inline]
    pub fn scalar(self) -> f64 {
        self.a
    }

    #[inline]
    pub fn vector(self) -> Quaternion {
        Self::new(0.0, self.b, self.c, self.d)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Modulus of the vector part.
    #[inline]
    pub fn vector_norm(self) -> f64 {
        (self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.a, -self.b, -self.c, -self.d)
    }

    /// `q⁻¹ = conj(q) / |q|²`, `None` for the zero quaternion.
    pub fn inverse(self) -> Option<Self> {
        let n = self.norm_sqr();
        (n > 0.0).then(|| self.conj() / n)
    }

    /// `−μ q μ`: keeps the scalar part and the `μ` component, negates the
    /// other two imaginary components.
    #[inline]
    pub fn involution(self, axis: Axis) -> Self {
        let Self { a, b, c, d } = self;
        match axis {
            Axis::I => Self::new(a, b, -c, -d),
            Axis::J => Self::new(a, -b, c, -d),
            Axis::K => Self::new(a, -b, -c, d),
        }
    }

    /// Conjugate of the `μ`-involution: negates only the `μ` component.
    #[inline]
    pub fn conj_involution(self, axis: Axis) -> Self {
        let Self { a, b, c, d } = self;
        match axis {
            Axis::I => Self::new(a, -b, c, d),
            Axis::J => Self::new(a, b, -c, d),
            Axis::K => Self::new(a, b, c, -d),
        }
    }

    /// `q · conj_involution(q, j)`.
    #[inline]
    pub fn polarmod_j(self) -> Self {
        self * self.conj_involution(Axis::J)
    }

    /// `exp(μθ) = cos θ + μ sin θ` for a unit pure quaternion `μ`.
    pub fn exp_pure(mu: Quaternion, theta: f64) -> Result<Self> {
        let modulus = mu.norm();
        if mu.a.abs() > EQ_TOL || (modulus - 1.0).abs() > EQ_TOL {
            return Err(Error::NotUnitPure {
                scalar: mu.a,
                modulus,
            });
        }
        let (s, c) = theta.sin_cos();
        Ok(Self::new(c, mu.b * s, mu.c * s, mu.d * s))
    }

    /// `exp(axis · θ)` without validation.
    #[inline]
    pub fn exp_axis(axis: Axis, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        match axis {
            Axis::I => Self::new(c, s, 0.0, 0.0),
            Axis::J => Self::new(c, 0.0, s, 0.0),
            Axis::K => Self::new(c, 0.0, 0.0, s),
        }
    }

    /// Symplectic split `q = q1 + i q2` with `q1 = a + c j`, `q2 = b + d j`.
    ///
    /// Both halves live in the complex subfield spanned by `{1, j}` and are
    /// returned as ordinary complex numbers (`j` playing the imaginary unit).
    #[inline]
    pub fn symplectic_split(self) -> (Complex64, Complex64) {
        (Complex64::new(self.a, self.c), Complex64::new(self.b, self.d))
    }

    #[inline]
    pub fn from_symplectic(q1: Complex64, q2: Complex64) -> Self {
        Self::new(q1.re, q2.re, q1.im, q2.im)
    }

    pub fn to_polar(self) -> Result<EulerPolarForm> {
        EulerPolarForm::from_quaternion(self)
    }

    pub fn from_polar(form: EulerPolarForm) -> Self {
        form.to_quaternion()
    }

    /// Componentwise closeness in absolute terms.
    pub fn abs_diff(self, other: Self) -> f64 {
        (self - other).norm()
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.a, self.b, self.c, self.d)
    }
}

impl Add for Quaternion {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, q: Self) -> Self {
        let p = self;
        Self::new(
            p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
            p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
            p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
            p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn div(self, s: f64) -> Self {
        Self::new(self.a / s, self.b / s, self.c / s, self.d / s)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl MulAssign<f64> for Quaternion {
    #[inline]
    fn mul_assign(&mut self, s: f64) {
        *self = *self * s;
    }
}

impl Sum for Quaternion {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Quaternion> for Quaternion {
    fn sum<I: Iterator<Item = &'a Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |acc, q| acc + *q)
    }
}

impl From<f64> for Quaternion {
    fn from(a: f64) -> Self {
        Self::from_real(a)
    }
}

/// `q = modulus · e^{iθ} e^{−kχ} e^{jφ}` with
/// `θ ∈ [−π/2, π/2]`, `χ ∈ [−π/4, π/4]`, `φ ∈ [−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerPolarForm {
    pub modulus: f64,
    pub theta: f64,
    pub chi: f64,
    pub phi: f64,
}

impl EulerPolarForm {
    pub fn new(modulus: f64, theta: f64, chi: f64, phi: f64) -> Self {
        Self {
            modulus,
            theta,
            chi,
            phi,
        }
    }

    /// Angle extraction order: `χ` and `θ` first, then `φ`.
    ///
    /// Right multiplication by `e^{jφ}` rotates the pairs `(a, c)` and
    /// `(b, d)` by the same angle, so `bc − ad`, `ab + cd` and
    /// `a² + c² − b² − d²` do not depend on `φ`:
    ///
    /// ```text
    /// 2(bc − ad)          = |q|² sin 2χ
    /// 2(ab + cd)          = |q|² cos 2χ sin 2θ
    /// a² + c² − b² − d²   = |q|² cos 2χ cos 2θ
    /// ```
    ///
    /// `φ` is then read off `conj(e^{iθ}e^{−kχ}) q / |q|`. At `|χ| = π/4` the
    /// orientation and phase are not separable (only `θ ∓ φ` is determined);
    /// the atan2 there returns whatever the rounding noise points to and `φ`
    /// absorbs the remainder, so reconstruction stays exact.
    pub fn from_quaternion(q: Quaternion) -> Result<Self> {
        let modulus = q.norm();
        if modulus == 0.0 || !modulus.is_finite() {
            return Err(Error::ZeroModulus);
        }
        let u = q / modulus;
        let y = 2.0 * (u.a * u.b + u.c * u.d);
        let x = u.a * u.a + u.c * u.c - u.b * u.b - u.d * u.d;
        // atan2 stays well conditioned near |χ| = π/4 where asin is not
        let chi = 0.5 * (2.0 * (u.b * u.c - u.a * u.d)).atan2(x.hypot(y));
        let mut theta = 0.5 * y.atan2(x);
        if theta > FRAC_PI_2 {
            theta = FRAC_PI_2;
        }

        let head = Quaternion::exp_axis(Axis::I, theta) * Quaternion::exp_axis(Axis::K, -chi);
        let tail = head.conj() * u;
        let phi = tail.c.atan2(tail.a);

        debug_assert!(chi.abs() <= FRAC_PI_4 + 1e-15);
        debug_assert!(phi.abs() <= PI);
        Ok(Self::new(modulus, theta, chi, phi))
    }

    pub fn to_quaternion(self) -> Quaternion {
        Quaternion::exp_axis(Axis::I, self.theta)
            * Quaternion::exp_axis(Axis::K, -self.chi)
            * Quaternion::exp_axis(Axis::J, self.phi)
            * self.modulus
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Product through the basis multiplication table only: `e_r e_s =
    /// sign · e_{idx}` for the canonical basis `{1, i, j, k}`.
    fn table_product(p: Quaternion, q: Quaternion) -> Quaternion {
        // (sign, index) of e_r * e_s, rows r = 1,i,j,k
        const TABLE: [[(f64, usize); 4]; 4] = [
            [(1.0, 0), (1.0, 1), (1.0, 2), (1.0, 3)],
            [(1.0, 1), (-1.0, 0), (1.0, 3), (-1.0, 2)],
            [(1.0, 2), (-1.0, 3), (-1.0, 0), (1.0, 1)],
            [(1.0, 3), (1.0, 2), (-1.0, 1), (-1.0, 0)],
        ];
        let pc = [p.a, p.b, p.c, p.d];
        let qc = [q.a, q.b, q.c, q.d];
        let mut out = [0.0; 4];
        for r in 0..4 {
            for s in 0..4 {
                let (sign, idx) = TABLE[r][s];
                out[idx] += sign * pc[r] * qc[s];
            }
        }
        Quaternion::new(out[0], out[1], out[2], out[3])
    }

    fn random_q(rng: &mut impl Rng) -> Quaternion {
        Quaternion::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        )
    }

    #[test]
    fn basis_table() {
        use Quaternion as Q;
        assert_eq!(Q::I * Q::J, Q::K);
        assert_eq!(Q::J * Q::I, -Q::K);
        assert_eq!(Q::J * Q::K, Q::I);
        assert_eq!(Q::K * Q::I, Q::J);
        for u in [Q::I, Q::J, Q::K] {
            assert_eq!(u * u, -Q::ONE);
        }
        assert_eq!(Q::I * Q::J * Q::K, -Q::ONE);
    }

    #[test]
    fn identity_and_inverse() {
        let q = Quaternion::new(0.3, -1.2, 2.0, 0.7);
        assert_eq!(Quaternion::ONE * q, q);
        assert_eq!(q * Quaternion::ONE, q);
        let inv = q.inverse().unwrap();
        assert!((q * inv).abs_diff(Quaternion::ONE) < 1e-14);
        assert!(Quaternion::ZERO.inverse().is_none());
    }

    #[test]
    fn product_matches_table_and_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (p, q, r) = (random_q(&mut rng), random_q(&mut rng), random_q(&mut rng));
            assert!((p * q).abs_diff(table_product(p, q)) < 1e-14);
            let lhs = table_product(table_product(p, q), r);
            let rhs = table_product(p, table_product(q, r));
            let scale = p.norm() * q.norm() * r.norm();
            assert!(((p * q) * r).abs_diff(lhs) <= 1e-12 * scale);
            assert!(((p * q) * r).abs_diff(p * (q * r)) <= 1e-12 * scale);
            assert!(lhs.abs_diff(rhs) <= 1e-12 * scale);
        }
    }

    #[test]
    fn conj_involution_j_example() {
        let q = Quaternion::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(
            q.conj_involution(Axis::J),
            Quaternion::new(1.0, 2.0, -3.0, 4.0)
        );
        assert_eq!(Quaternion::J.involution(Axis::J), Quaternion::J);
    }

    #[test]
    fn involutions_follow_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let q = random_q(&mut rng);
            for axis in Axis::ALL {
                let mu = axis.unit();
                let direct = -(mu * q * mu);
                assert!(q.involution(axis).abs_diff(direct) < 1e-14);
                assert!(q.conj_involution(axis).abs_diff(direct.conj()) < 1e-14);
                assert!(q.conj_involution(axis).abs_diff(q.conj().involution(axis)) < 1e-14);
                assert_eq!(q.involution(axis).involution(axis), q);
            }
        }
    }

    #[test]
    fn polarmod_j_cases() {
        let q = Quaternion::new(3.0, 0.0, 4.0, 0.0);
        assert_abs_diff_eq!(q.polarmod_j().a, 25.0, epsilon = 1e-14);
        assert!(q.polarmod_j().vector_norm() < 1e-14);
        assert_eq!(Quaternion::ONE.polarmod_j(), Quaternion::ONE);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let q = random_q(&mut rng);
            let expected = table_product(q, Quaternion::new(q.a, q.b, -q.c, q.d));
            assert!(q.polarmod_j().abs_diff(expected) < 1e-12);
            // |q conj_inv(q)| = |q|²
            assert_abs_diff_eq!(q.polarmod_j().norm(), q.norm_sqr(), epsilon = 1e-12);
        }
    }

    #[test]
    fn exp_pure_values() {
        use std::f64::consts::FRAC_PI_3;
        let e = Quaternion::exp_pure(Quaternion::J, FRAC_PI_2).unwrap();
        assert!(e.abs_diff(Quaternion::J) < 1e-15);
        assert_eq!(
            Quaternion::exp_pure(Quaternion::I, 0.0).unwrap(),
            Quaternion::ONE
        );
        let e = Quaternion::exp_pure(Quaternion::K, FRAC_PI_3).unwrap();
        assert!(e.abs_diff(Quaternion::new(0.5, 0.0, 0.0, 3f64.sqrt() / 2.0)) < 1e-15);

        let mu = Quaternion::new(0.0, 1.0, 1.0, 1.0) / 3f64.sqrt();
        assert_abs_diff_eq!(
            Quaternion::exp_pure(mu, 0.7).unwrap().norm(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn exp_pure_rejects_bad_axis() {
        assert!(matches!(
            Quaternion::exp_pure(Quaternion::new(0.1, 1.0, 0.0, 0.0), 1.0),
            Err(Error::NotUnitPure { .. })
        ));
        assert!(matches!(
            Quaternion::exp_pure(Quaternion::new(0.0, 2.0, 0.0, 0.0), 1.0),
            Err(Error::NotUnitPure { .. })
        ));
    }

    #[test]
    fn polar_of_identity() {
        let f = Quaternion::ONE.to_polar().unwrap();
        assert_eq!((f.modulus, f.theta, f.chi, f.phi), (1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn polar_zero_is_error() {
        assert_eq!(Quaternion::ZERO.to_polar(), Err(Error::ZeroModulus));
    }

    #[test]
    fn polar_tone_quaternion() {
        use std::f64::consts::{FRAC_PI_3, FRAC_PI_8};
        let f = EulerPolarForm::new(1.0, -FRAC_PI_3, FRAC_PI_8, 0.0);
        let q = Quaternion::from_polar(f);
        let (st, ct) = (-FRAC_PI_3).sin_cos();
        let (sc, cc) = FRAC_PI_8.sin_cos();
        // e^{iθ} e^{−kχ} expanded by hand
        let expected = Quaternion::new(ct * cc, st * cc, st * sc, -ct * sc);
        assert!(q.abs_diff(expected) < 1e-15);
        let back = q.to_polar().unwrap();
        assert_abs_diff_eq!(back.theta, -FRAC_PI_3, epsilon = 1e-12);
        assert_abs_diff_eq!(back.chi, FRAC_PI_8, epsilon = 1e-12);
        assert_abs_diff_eq!(back.phi, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn polar_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let q = random_q(&mut rng);
            let f = q.to_polar().unwrap();
            assert!(f.theta.abs() <= FRAC_PI_2 && f.chi.abs() <= FRAC_PI_4 + 1e-15);
            assert!(f.phi.abs() <= PI);
            worst = worst.max(Quaternion::from_polar(f).abs_diff(q));
        }
        assert!(worst < 1e-10, "worst round-trip error {worst}");
    }

    #[test]
    fn polar_round_trip_at_gimbal_lock() {
        for chi in [FRAC_PI_4, -FRAC_PI_4] {
            for (theta, phi) in [(0.3, 1.1), (-1.2, -2.5), (0.0, 3.0)] {
                let q = Quaternion::from_polar(EulerPolarForm::new(2.5, theta, chi, phi));
                let back = Quaternion::from_polar(q.to_polar().unwrap());
                assert!(back.abs_diff(q) < 1e-10);
            }
        }
    }

    #[test]
    fn symplectic_split_cases() {
        let (q1, q2) = Quaternion::new(1.0, 2.0, 3.0, 4.0).symplectic_split();
        assert_eq!((q1.re, q1.im, q2.re, q2.im), (1.0, 3.0, 2.0, 4.0));
        let (_, q2) = Quaternion::new(5.0, 0.0, -1.0, 0.0).symplectic_split();
        assert_eq!(q2, Complex64::new(0.0, 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let q = random_q(&mut rng);
            let (q1, q2) = q.symplectic_split();
            assert_eq!(Quaternion::from_symplectic(q1, q2), q);
            // q = q1 + i q2 as quaternion arithmetic
            let q1q = Quaternion::new(q1.re, 0.0, q1.im, 0.0);
            let q2q = Quaternion::new(q2.re, 0.0, q2.im, 0.0);
            assert!((q1q + Quaternion::I * q2q).abs_diff(q) < 1e-15);
        }
    }

    #[test]
    fn i_commutes_to_conjugate_on_cj() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let q = Quaternion::new(rng.random_range(-3.0..3.0), 0.0, rng.random_range(-3.0..3.0), 0.0);
            assert_eq!(Quaternion::I * q, q.conj() * Quaternion::I);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn quat() -> impl Strategy<Value = Quaternion> {
            (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64)
                .prop_map(|(a, b, c, d)| Quaternion::new(a, b, c, d))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            #[test]
            fn modulus_is_multiplicative(p in quat(), q in quat()) {
                let lhs = (p * q).norm();
                let rhs = p.norm() * q.norm();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
            }

            #[test]
            fn norm_is_q_conj_q(q in quat()) {
                let p = q * q.conj();
                prop_assert!((p.a - q.norm_sqr()).abs() <= 1e-12 * q.norm_sqr().max(1.0));
                prop_assert!(p.vector_norm() <= 1e-12 * q.norm_sqr().max(1.0));
            }

            #[test]
            fn conj_reverses_products(p in quat(), q in quat()) {
                let scale = p.norm() * q.norm() + 1.0;
                prop_assert!((p * q).conj().abs_diff(q.conj() * p.conj()) <= 1e-12 * scale);
                for axis in Axis::ALL {
                    let lhs = (p * q).conj_involution(axis);
                    let rhs = q.conj_involution(axis) * p.conj_involution(axis);
                    prop_assert!(lhs.abs_diff(rhs) <= 1e-12 * scale);
                    // the plain involution is an automorphism
                    let lhs = (p * q).involution(axis);
                    let rhs = p.involution(axis) * q.involution(axis);
                    prop_assert!(lhs.abs_diff(rhs) <= 1e-12 * scale);
                }
            }

            #[test]
            fn distributes_over_addition(p in quat(), q in quat(), r in quat()) {
                let scale = p.norm() * (q.norm() + r.norm()) + 1.0;
                prop_assert!((p * (q + r)).abs_diff(p * q + p * r) <= 1e-12 * scale);
                prop_assert!(((q + r) * p).abs_diff(q * p + r * p) <= 1e-12 * scale);
            }
        }
    }
}
