use num_complex::Complex;

use super::{AVector, GeometryError, MoebiusMap, Real};

/// Euclidean description of a [`Circle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircleShape<T> {
    Round { center: Complex<T>, radius: T },
    /// The line `{z : Re(conj(normal)·z) = offset}` with `|normal| = 1`.
    Line { normal: Complex<T>, offset: T },
}

/// An oriented circle or line on the Riemann sphere, stored as the Hermitian
/// form `q(z) = A|z|² + conj(B)·z + B·conj(z) + C`.
///
/// The circle is the zero set of `q`; its interior is `{q < 0}`. Forms are
/// scaled so that the discriminant `|B|² − AC` equals one, which Möbius
/// congruence preserves, so the radius is `1/|A|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle<T> {
    a: T,
    b: Complex<T>,
    c: T,
}

impl<T: Real> Circle<T> {
    pub fn from_form(a: T, b: Complex<T>, c: T) -> Result<Self, GeometryError> {
        let disc = b.norm_sqr() - a * c;
        let scale = a.abs().max(b.norm()).max(c.abs());
        if !disc.is_finite() || disc <= T::lit(1e-14) * scale * scale {
            return Err(GeometryError::DegenerateCircle {
                discriminant: disc.to_f64().unwrap_or(f64::NAN),
            });
        }
        let k = disc.sqrt().recip();
        Ok(Self {
            a: a * k,
            b: b * k,
            c: c * k,
        })
    }

    /// Positively oriented circle (interior is the bounded disk).
    pub fn new(center: Complex<T>, radius: T) -> Result<Self, GeometryError> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(GeometryError::InvalidRadius {
                radius: radius.to_f64().unwrap_or(f64::NAN),
            });
        }
        // |z - c|² - r²  =  |z|² - conj(c) z - c conj(z) + |c|² - r²
        Ok(Self {
            a: radius.recip(),
            b: -center / radius,
            c: (center.norm_sqr() - radius * radius) / radius,
        })
    }

    /// The line `Re(conj(normal)·z) = offset`; interior is the side where
    /// `Re(conj(normal)·z) < offset`.
    pub fn line(normal: Complex<T>, offset: T) -> Result<Self, GeometryError> {
        let n = normal.norm();
        if !(n > T::zero()) {
            return Err(GeometryError::DegenerateCircle { discriminant: 0.0 });
        }
        let unit = normal / n;
        Ok(Self {
            a: T::zero(),
            b: unit,
            c: -(offset + offset),
        })
    }

    pub fn form(&self) -> (T, Complex<T>, T) {
        (self.a, self.b, self.c)
    }

    /// `|B|² − AC`; equal to one up to rounding.
    pub fn discriminant(&self) -> T {
        self.b.norm_sqr() - self.a * self.c
    }

    pub fn evaluate(&self, z: Complex<T>) -> T {
        let bz = self.b.conj() * z;
        self.a * z.norm_sqr() + bz.re + bz.re + self.c
    }

    /// +1 when the interior is the bounded disk (or the left side of a line
    /// as given), −1 when the interior contains ∞.
    pub fn orientation(&self) -> i8 {
        if self.a < T::zero() {
            -1
        } else {
            1
        }
    }

    /// True when the form is a line up to rounding.
    pub fn is_line(&self) -> bool {
        self.a.abs() <= T::epsilon() * T::lit(16.0) * self.b.norm()
    }

    pub fn shape(&self) -> CircleShape<T> {
        if self.is_line() {
            let n = self.b.norm();
            CircleShape::Line {
                normal: self.b / n,
                offset: -self.c / (n + n),
            }
        } else {
            CircleShape::Round {
                center: -self.b / self.a,
                radius: self.a.abs().recip(),
            }
        }
    }

    /// `(center, radius)`; `None` for lines.
    pub fn center_radius(&self) -> Option<(Complex<T>, T)> {
        match self.shape() {
            CircleShape::Round { center, radius } => Some((center, radius)),
            CircleShape::Line { .. } => None,
        }
    }

    /// Radius from the normalized form, `1/|A|`. Infinite for lines.
    pub fn radius(&self) -> T {
        if self.is_line() {
            T::infinity()
        } else {
            self.a.abs().recip()
        }
    }

    pub fn center(&self) -> Option<Complex<T>> {
        if self.is_line() {
            None
        } else {
            Some(-self.b / self.a)
        }
    }

    /// Image of the circle under `m`: congruence of the form by `m⁻¹`.
    /// Orientation follows the interior, so the image of the interior is
    /// again `{q < 0}`.
    pub fn transformed(&self, m: &MoebiusMap<T>) -> Self {
        let [ma, mb, mc, md] = m.entries();
        // columns of m⁻¹ = (d -b; -c a)
        let (n11, n12, n21, n22) = (md, -mb, -mc, ma);
        let herm = |u: Complex<T>, v: Complex<T>| {
            let cross = u.conj() * self.b * v;
            self.a * u.norm_sqr() + cross.re + cross.re + self.c * v.norm_sqr()
        };
        let a = herm(n11, n21);
        let c = herm(n12, n22);
        let b = n11.conj() * (n12 * self.a + n22 * self.b)
            + n21.conj() * (n12 * self.b.conj() + n22 * self.c);
        let a = if a.abs() <= T::epsilon() * T::lit(16.0) * b.norm() {
            T::zero()
        } else {
            a
        };
        Self { a, b, c }
    }

    /// Distance from the curve to a closed disk; negative when they meet.
    pub fn gap_to_disk(&self, center: Complex<T>, radius: T) -> T {
        match self.shape() {
            CircleShape::Round { center: c0, radius: r0 } => {
                let dist = (c0 - center).norm();
                (dist - r0 - radius).max(r0 - dist - radius)
            }
            CircleShape::Line { normal, offset } => {
                let s = (normal.conj() * center).re - offset;
                s.abs() - radius
            }
        }
    }
}

/// Euclidean volume of a torus: finite, or infinite when a factor is a line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Volume<T> {
    Finite(T),
    Infinite,
}

/// A product `C₁ × ⋯ × C_d` of circles, one per factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Torus<T> {
    circles: Vec<Circle<T>>,
}

impl<T: Real> Torus<T> {
    pub fn new(circles: Vec<Circle<T>>) -> Result<Self, GeometryError> {
        if circles.is_empty() {
            return Err(GeometryError::EmptyTorus);
        }
        Ok(Self { circles })
    }

    pub fn dim(&self) -> usize {
        self.circles.len()
    }

    pub fn circles(&self) -> &[Circle<T>] {
        &self.circles
    }

    /// `∏ 2π · radius(C_i)`.
    pub fn volume(&self) -> Volume<T> {
        let two_pi = T::TAU();
        let mut vol = T::one();
        for c in &self.circles {
            if c.is_line() {
                return Volume::Infinite;
            }
            vol *= two_pi * c.radius();
        }
        Volume::Finite(vol)
    }

    /// `−(log r(C₁), …, log r(C_d))`; a line factor gives `−∞`.
    pub fn length_vector(&self) -> AVector<T> {
        AVector::new(self.circles.iter().map(|c| -c.radius().ln()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, TAU};

    type C = Circle<f64>;
    type M = MoebiusMap<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn assert_round(circle: &C, center: Complex<f64>, radius: f64) {
        let (c0, r0) = circle.center_radius().expect("round circle");
        assert!((c0 - center).norm() < 1e-12, "{c0} vs {center}");
        assert!((r0 - radius).abs() < 1e-12, "{r0} vs {radius}");
    }

    #[test]
    fn center_radius_views() {
        assert_round(&C::new(c(0.0, 0.0), 1.0).unwrap(), c(0.0, 0.0), 1.0);
        let l = C::line(c(1.0, 0.0), 2.0).unwrap();
        match l.shape() {
            CircleShape::Line { normal, offset } => {
                assert!((normal - c(1.0, 0.0)).norm() < 1e-15);
                assert!((offset - 2.0).abs() < 1e-15);
            }
            other => panic!("expected line, got {other:?}"),
        }
        assert_round(&C::new(c(-1.5, 0.25), 0.3).unwrap(), c(-1.5, 0.25), 0.3);
    }

    #[test]
    fn degenerate_forms_rejected() {
        assert!(C::from_form(1.0, c(0.0, 0.0), 0.0).is_err());
        assert!(C::from_form(1.0, c(0.0, 0.0), 1.0).is_err());
        assert!(C::new(c(0.0, 0.0), -1.0).is_err());
    }

    #[test]
    fn image_cases() {
        let circ = C::new(c(1.0, 0.0), 2.0).unwrap();
        assert_round(&circ.transformed(&M::identity()), c(1.0, 0.0), 2.0);
        let unit = C::new(c(0.0, 0.0), 1.0).unwrap();
        assert_round(&unit.transformed(&M::inversion()), c(0.0, 0.0), 1.0);
        let shifted = unit.transformed(&M::translation(c(3.0, 0.0)));
        assert_round(&shifted, c(3.0, 0.0), 1.0);
    }

    #[test]
    fn circle_through_pole_becomes_line() {
        // z -> 1/z sends the circle |z - 1| = 1 (through 0) to Re w = 1/2.
        let circ = C::new(c(1.0, 0.0), 1.0).unwrap();
        let img = circ.transformed(&M::inversion());
        assert!(img.is_line());
        match img.shape() {
            CircleShape::Line { normal, offset } => {
                let s = normal.re.signum();
                assert!((normal * s - c(1.0, 0.0)).norm() < 1e-12);
                assert!((offset * s - 0.5).abs() < 1e-12);
            }
            other => panic!("expected line, got {other:?}"),
        }
    }

    #[test]
    fn interior_follows_map() {
        let circ = C::new(c(0.0, 0.0), 0.5).unwrap();
        // pole of z -> 1/z lies inside, so the image interior contains ∞
        let img = circ.transformed(&M::inversion());
        assert_eq!(img.orientation(), -1);
        assert!(img.evaluate(c(0.0, 0.0)) > 0.0);
        assert!(img.evaluate(c(10.0, 0.0)) < 0.0);
    }

    #[test]
    fn volume_and_length_vector() {
        let unit = C::new(c(0.0, 0.0), 1.0).unwrap();
        let t = Torus::new(vec![unit, unit]).unwrap();
        match t.volume() {
            Volume::Finite(v) => assert!((v - TAU * TAU).abs() < 1e-12),
            Volume::Infinite => panic!(),
        }
        assert_eq!(t.length_vector().as_slice(), &[0.0, 0.0]);

        let t = Torus::new(vec![
            C::new(c(0.0, 0.0), 1.0 / E).unwrap(),
            C::new(c(0.0, 0.0), E).unwrap(),
        ])
        .unwrap();
        let v = t.length_vector();
        assert!((v[0] - 1.0).abs() < 1e-12 && (v[1] + 1.0).abs() < 1e-12);

        let t = Torus::new(vec![unit, C::line(c(0.0, 1.0), 0.0).unwrap()]).unwrap();
        assert_eq!(t.volume(), Volume::Infinite);
        assert_eq!(t.length_vector()[1], f64::NEG_INFINITY);
        assert!(Torus::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn shrinking_radius_increases_length() {
        let mut prev = f64::NEG_INFINITY;
        for r in [2.0, 1.0, 0.5, 0.01] {
            let t = Torus::new(vec![C::new(c(0.0, 0.0), r).unwrap()]).unwrap();
            let v = t.length_vector()[0];
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn gap_to_disk_inside_and_outside() {
        let unit = C::new(c(0.0, 0.0), 1.0).unwrap();
        assert!((unit.gap_to_disk(c(2.0, 0.0), 0.5) - 0.5).abs() < 1e-12);
        assert!((unit.gap_to_disk(c(0.1, 0.0), 0.2) - 0.7).abs() < 1e-12);
        assert!(unit.gap_to_disk(c(1.0, 0.0), 0.2) < 0.0);
        let line = C::line(c(1.0, 0.0), 0.0).unwrap();
        assert!((line.gap_to_disk(c(2.0, 5.0), 0.5) - 1.5).abs() < 1e-12);
    }
}
