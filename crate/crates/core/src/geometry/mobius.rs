use std::ops::Mul;

use num_complex::Complex;

use super::{GeometryError, Real};

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtPoint<T> {
    Finite(Complex<T>),
    Infinity,
}

impl<T: Real> ExtPoint<T> {
    pub fn finite(re: T, im: T) -> Self {
        ExtPoint::Finite(Complex::new(re, im))
    }

    pub fn as_finite(&self) -> Option<Complex<T>> {
        match self {
            ExtPoint::Finite(z) => Some(*z),
            ExtPoint::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtPoint::Infinity)
    }
}

impl<T> From<Complex<T>> for ExtPoint<T> {
    fn from(z: Complex<T>) -> Self {
        ExtPoint::Finite(z)
    }
}

/// A point `(z, h)` of the upper half-space model of hyperbolic 3-space, `h > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpacePoint<T> {
    pub z: Complex<T>,
    pub h: T,
}

impl<T: Real> HalfSpacePoint<T> {
    pub fn new(z: Complex<T>, h: T) -> Self {
        debug_assert!(h > T::zero());
        Self { z, h }
    }

    /// The fixed basepoint `o = (0, 1)`.
    pub fn basepoint() -> Self {
        Self {
            z: Complex::new(T::zero(), T::zero()),
            h: T::one(),
        }
    }

    /// Hyperbolic distance (curvature -1).
    pub fn distance(&self, other: &Self) -> T {
        let two = T::lit(2.0);
        let num = (self.z - other.z).norm_sqr() + (self.h - other.h).powi(2);
        // cosh d = 1 + 2 sinh^2(d/2); this form keeps precision for large d.
        two * (num.sqrt() / (two * (self.h * other.h).sqrt())).asinh()
    }
}

/// `arccosh` with the rounding policy of the kernel: arguments within
/// [`Real::rounding_slack`] below 1 clamp to 0, anything lower is an error.
pub fn arccosh_clamped<T: Real>(x: T) -> Result<T, GeometryError> {
    if x >= T::one() {
        Ok(x.acosh())
    } else if x >= T::one() - T::rounding_slack() {
        Ok(T::zero())
    } else {
        Err(GeometryError::ArccoshDomain {
            argument: x.to_f64().unwrap_or(f64::NAN),
        })
    }
}

/// Orientation-preserving isometry of hyperbolic 3-space, stored as a
/// determinant-one complex matrix `(a b; c d)` acting by `z -> (az+b)/(cz+d)`.
///
/// The matrix is only defined up to a global sign; every derived quantity is
/// sign-invariant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap<T> {
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    d: Complex<T>,
}

impl<T: Real> MoebiusMap<T> {
    /// Builds the map from any nonsingular matrix, rescaling to determinant one.
    pub fn new(
        a: Complex<T>,
        b: Complex<T>,
        c: Complex<T>,
        d: Complex<T>,
    ) -> Result<Self, GeometryError> {
        let det = a * d - b * c;
        let scale = a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr();
        if !det.norm().is_finite() || det.norm() <= T::epsilon() * scale || scale == T::zero() {
            return Err(GeometryError::SingularMatrix);
        }
        Ok(Self { a, b, c, d }.rescaled(det))
    }

    fn rescaled(self, det: Complex<T>) -> Self {
        let k = det.sqrt().inv();
        Self {
            a: self.a * k,
            b: self.b * k,
            c: self.c * k,
            d: self.d * k,
        }
    }

    pub fn identity() -> Self {
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        Self {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    /// `z -> z + b`
    pub fn translation(b: Complex<T>) -> Self {
        Self {
            b,
            ..Self::identity()
        }
    }

    /// `z -> k z`, `k != 0`
    pub fn dilation(k: Complex<T>) -> Result<Self, GeometryError> {
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        Self::new(k, zero, zero, one)
    }

    /// Pure translation of length `|t|` along the geodesic `(0, ∞)`,
    /// i.e. `diag(e^{t/2}, e^{-t/2})`.
    pub fn axis_translation(t: T) -> Self {
        let half = t / T::lit(2.0);
        let zero = Complex::new(T::zero(), T::zero());
        Self {
            a: Complex::new(half.exp(), T::zero()),
            b: zero,
            c: zero,
            d: Complex::new((-half).exp(), T::zero()),
        }
    }

    /// `z -> 1/z`, which fixes the basepoint `o`.
    pub fn inversion() -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        Self {
            a: zero,
            b: i,
            c: i,
            d: zero,
        }
    }

    /// Raw matrix entries. Only meaningful up to a common sign.
    pub fn entries(&self) -> [Complex<T>; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn determinant(&self) -> Complex<T> {
        self.a * self.d - self.b * self.c
    }

    /// `self ∘ other`. Renormalized only when the determinant has drifted
    /// past the rounding floor of `ad − bc`.
    pub fn compose(&self, other: &Self) -> Self {
        let m = Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        };
        let det = m.determinant();
        let floor = T::lit(64.0) * T::epsilon() * m.frobenius_sq();
        if (det - Complex::new(T::one(), T::zero())).norm() > floor {
            m.rescaled(det)
        } else {
            m
        }
    }

    fn frobenius_sq(&self) -> T {
        self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn power(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(), |acc, _| acc.compose(self))
    }

    /// Squared trace, the sign-invariant conjugacy invariant.
    pub fn trace_sq(&self) -> Complex<T> {
        let t = self.a + self.d;
        t * t
    }

    pub fn apply(&self, z: ExtPoint<T>) -> ExtPoint<T> {
        match z {
            ExtPoint::Infinity => {
                if self.c == Complex::new(T::zero(), T::zero()) {
                    ExtPoint::Infinity
                } else {
                    ExtPoint::Finite(self.a / self.c)
                }
            }
            ExtPoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den == Complex::new(T::zero(), T::zero()) {
                    ExtPoint::Infinity
                } else {
                    ExtPoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Image of a finite point; `None` when it is the pole.
    pub fn apply_finite(&self, z: Complex<T>) -> Option<Complex<T>> {
        self.apply(ExtPoint::Finite(z)).as_finite()
    }

    /// `|m'(z)|` for finite `z` (infinite at the pole).
    pub fn derivative_modulus(&self, z: Complex<T>) -> T {
        (self.c * z + self.d).norm_sqr().recip()
    }

    /// Poincaré extension to the upper half-space.
    pub fn apply_half_space(&self, p: HalfSpacePoint<T>) -> HalfSpacePoint<T> {
        let t2 = p.h * p.h;
        let cz_d = self.c * p.z + self.d;
        let den = cz_d.norm_sqr() + self.c.norm_sqr() * t2;
        let num = (self.a * p.z + self.b) * cz_d.conj() + self.a * self.c.conj() * t2;
        HalfSpacePoint {
            z: num / den,
            h: p.h / den,
        }
    }

    /// Image of the basepoint `o = (0, 1)`.
    pub fn apply_basepoint(&self) -> HalfSpacePoint<T> {
        let den = self.c.norm_sqr() + self.d.norm_sqr();
        HalfSpacePoint {
            z: (self.a * self.c.conj() + self.b * self.d.conj()) / den,
            h: den.recip(),
        }
    }

    /// `d(m·o, o)`, one coordinate of the Cartan projection.
    pub fn hyp_displacement(&self) -> T {
        let half_norm =
            (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr())
                / T::lit(2.0);
        // Normalized matrices satisfy |a|²+|b|²+|c|²+|d|² >= 2|ad-bc| = 2.
        arccosh_clamped(half_norm).expect("determinant-one matrix has cosh-displacement >= 1")
    }

    /// Length of the closed geodesic of the conjugacy class: `2 log|λ|` for
    /// the eigenvalue of largest modulus, 0 for elliptic and parabolic maps.
    pub fn translation_length(&self) -> T {
        let two = T::lit(2.0);
        let tr = self.a + self.d;
        let s = (tr * tr - Complex::new(T::lit(4.0), T::zero())).sqrt();
        let plus = (tr + s).norm();
        let minus = (tr - s).norm();
        let lambda = plus.max(minus) / two;
        (two * lambda.ln()).max(T::zero())
    }

    /// Busemann cocycle `β_ξ(m·o, o)`.
    pub fn busemann(&self, xi: ExtPoint<T>) -> T {
        match xi {
            ExtPoint::Finite(xi) => {
                let p = self.apply_basepoint();
                ((p.z - xi).norm_sqr() + p.h * p.h).ln() - p.h.ln() - (T::one() + xi.norm_sqr()).ln()
            }
            // conjugate by z -> 1/z, which fixes o and swaps ∞ with 0
            ExtPoint::Infinity => Self::inversion()
                .compose(self)
                .busemann(ExtPoint::Finite(Complex::new(T::zero(), T::zero()))),
        }
    }

    /// Equality in PSL₂: entries agree up to a global sign within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        let same = [
            self.a - other.a,
            self.b - other.b,
            self.c - other.c,
            self.d - other.d,
        ];
        let flipped = [
            self.a + other.a,
            self.b + other.b,
            self.c + other.c,
            self.d + other.d,
        ];
        let max = |v: [Complex<T>; 4]| v.iter().fold(T::zero(), |m, e| m.max(e.norm()));
        max(same).min(max(flipped)) <= tol
    }
}

impl<T: Real> Mul for MoebiusMap<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}

impl<T: Real> Mul for &MoebiusMap<T> {
    type Output = MoebiusMap<T>;

    fn mul(self, rhs: Self) -> MoebiusMap<T> {
        self.compose(rhs)
    }
}

/// `∏_i (1 + |z_i|²)^{ψ_i}`, the density `e^{ψ(β_z(o, n_z·o))}` relating
/// the packing measure to the boundary measure.
pub fn busemann_density<T: Real>(z: &[Complex<T>], psi: &[T]) -> T {
    debug_assert_eq!(z.len(), psi.len());
    z.iter()
        .zip(psi)
        .fold(T::one(), |acc, (zi, &p)| acc * (T::one() + zi.norm_sqr()).powf(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = MoebiusMap<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn sample_maps() -> Vec<M> {
        vec![
            M::new(c(2.0, 1.0), c(0.5, -0.3), c(0.1, 0.7), c(1.0, 0.2)).unwrap(),
            M::new(c(0.3, 0.0), c(1.0, 1.0), c(-1.0, 0.5), c(2.0, -1.0)).unwrap(),
            M::new(c(1.5, -0.5), c(-0.2, 0.0), c(0.0, 0.9), c(0.4, 0.4)).unwrap(),
        ]
    }

    #[test]
    fn compose_with_identity_and_inverse() {
        for m in sample_maps() {
            assert!(M::identity().compose(&m).approx_eq(&m, 1e-12));
            assert!(m.compose(&m.inverse()).approx_eq(&M::identity(), 1e-12));
        }
    }

    #[test]
    fn compose_translation_then_dilation() {
        let t = M::translation(c(1.0, 0.0));
        let s = M::dilation(c(2.0, 0.0)).unwrap();
        let ts = t.compose(&s);
        for z in [c(0.0, 0.0), c(1.5, -2.0), c(-3.0, 0.25)] {
            let w = ts.apply_finite(z).unwrap();
            assert!((w - (z * 2.0 + 1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn point_action_cases() {
        let z = c(3.0, 4.0);
        assert_eq!(M::identity().apply(z.into()), ExtPoint::Finite(z));
        assert_eq!(M::inversion().apply(c(0.0, 0.0).into()), ExtPoint::Infinity);
        let m = M::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        let w = m.apply(ExtPoint::Infinity).as_finite().unwrap();
        assert!((w - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn singular_matrix_rejected() {
        let one = c(1.0, 0.0);
        assert!(M::new(one, one, one, one).is_err());
    }

    #[test]
    fn displacement_of_axis_translation() {
        for t in [0.1, 1.0, 10.0, -3.0] {
            let d = M::axis_translation(t).hyp_displacement();
            assert!((d - f64::abs(t)).abs() < 1e-12, "{t}: {d}");
        }
        assert_eq!(M::identity().hyp_displacement(), 0.0);
    }

    #[test]
    fn displacement_of_parabolic_matches_geodesic_distance() {
        let m = M::translation(c(1.0, 0.0));
        let expected = (1.5f64).acosh();
        let oracle = HalfSpacePoint::new(c(0.0, 0.0), 1.0)
            .distance(&HalfSpacePoint::new(c(1.0, 0.0), 1.0));
        assert!((oracle - expected).abs() < 1e-14);
        assert!((m.hyp_displacement() - expected).abs() < 1e-12);
    }

    #[test]
    fn arccosh_clamping_policy() {
        assert_eq!(arccosh_clamped(1.0 - 1e-13).unwrap(), 0.0);
        assert!(matches!(
            arccosh_clamped(1.0 - 1e-9),
            Err(GeometryError::ArccoshDomain { .. })
        ));
    }

    #[test]
    fn translation_length_cases() {
        let e = std::f64::consts::E;
        let m = M::new(c(e, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0 / e, 0.0)).unwrap();
        assert!((m.translation_length() - 2.0).abs() < 1e-12);
        assert_eq!(M::translation(c(1.0, 0.0)).translation_length(), 0.0);
        for h in sample_maps() {
            let conj = h.compose(&m).compose(&h.inverse());
            assert!((conj.translation_length() - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn busemann_trivial_cases() {
        let xi = ExtPoint::finite(0.3, -1.2);
        assert!(M::identity().busemann(xi).abs() < 1e-14);
        assert!(M::identity().busemann(ExtPoint::Infinity).abs() < 1e-14);
        let t: f64 = 1.7;
        let m = M::dilation(c(t.exp(), 0.0)).unwrap();
        assert!((m.busemann(ExtPoint::finite(0.0, 0.0)) - t).abs() < 1e-12);
        // moving toward ∞ decreases the distance to ∞
        assert!((m.busemann(ExtPoint::Infinity) + t).abs() < 1e-12);
    }

    #[test]
    fn basepoint_image_matches_general_extension() {
        for m in sample_maps() {
            let p = m.apply_basepoint();
            let q = m.apply_half_space(HalfSpacePoint::basepoint());
            assert!((p.z - q.z).norm() < 1e-12 && (p.h - q.h).abs() < 1e-12);
            let d = p.distance(&HalfSpacePoint::basepoint());
            assert!((d - m.hyp_displacement()).abs() < 1e-10);
        }
    }

    #[test]
    fn density_values() {
        assert_eq!(busemann_density(&[c(0.0, 0.0), c(0.0, 0.0)], &[0.3, 0.7]), 1.0);
        assert!((busemann_density(&[c(1.0, 0.0)], &[1.0]) - 2.0).abs() < 1e-14);
        let v = busemann_density(&[c(1.0, 0.0), c(0.0, 2.0)], &[0.3, 0.7]);
        assert!((v - 2f64.powf(0.3) * 5f64.powf(0.7)).abs() < 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let m = MoebiusMap::<f32>::axis_translation(2.0);
        assert!((m.hyp_displacement() - 2.0).abs() < 1e-5);
    }
}
