use std::ops::Index;

use serde::{Deserialize, Serialize};

use super::{GeometryError, Real};

/// A vector in the Cartan subspace `𝔞 = ℝ^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AVector<T>(Vec<T>);

impl<T: Real> AVector<T> {
    pub fn new(t: Vec<T>) -> Self {
        Self(t)
    }

    pub fn zeros(d: usize) -> Self {
        Self(vec![T::zero(); d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// True when every coordinate is `>= 0` (the closed positive Weyl chamber).
    pub fn in_closed_chamber(&self) -> bool {
        self.0.iter().all(|&x| x >= T::zero())
    }

    pub fn sum(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, &x| acc + x)
    }

    pub fn norm(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > T::zero() && n.is_finite()).then(|| Self(self.0.iter().map(|&x| x / n).collect()))
    }

    pub fn min_coordinate(&self) -> T {
        self.0.iter().fold(T::infinity(), |m, &x| m.min(x))
    }
}

impl<T> Index<usize> for AVector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

/// A linear form `ψ(t) = Σ ψ_i t_i` on `𝔞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearForm<T>(Vec<T>);

impl<T: Real> LinearForm<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        Self(coeffs)
    }

    /// The coordinate sum `σ`.
    pub fn sum_form(d: usize) -> Self {
        Self(vec![T::one(); d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.0
    }

    pub fn eval(&self, t: &[T]) -> T {
        debug_assert_eq!(t.len(), self.0.len());
        self.0
            .iter()
            .zip(t)
            .fold(T::zero(), |acc, (&p, &x)| acc + p * x)
    }

    pub fn scaled(&self, s: T) -> Self {
        Self(self.0.iter().map(|&p| p * s).collect())
    }

    /// Checks `ψ > 0` on `𝔞⁺ ∖ {0}` by evaluating on the boundary rays
    /// `e_S = Σ_{i∈S} e_i` of the chamber, smallest subsets first, so the
    /// reported ray is a coordinate axis whenever one fails.
    pub fn check_positive(&self) -> Result<(), GeometryError> {
        let d = self.0.len();
        if d == 0 {
            return Err(GeometryError::NonPositiveForm { ray: vec![] });
        }
        if self.0.iter().any(|p| !p.is_finite()) {
            return Err(GeometryError::NonFiniteForm);
        }
        if d > 20 {
            // linear forms are determined by the extreme rays
            return match self.0.iter().position(|&p| p <= T::zero()) {
                Some(i) => Err(GeometryError::NonPositiveForm { ray: vec![i] }),
                None => Ok(()),
            };
        }
        let mut masks: Vec<u32> = (1..(1u32 << d)).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        for mask in masks {
            let value = (0..d)
                .filter(|i| mask & (1 << i) != 0)
                .fold(T::zero(), |acc, i| acc + self.0[i]);
            if value <= T::zero() {
                let ray = (0..d).filter(|i| mask & (1 << i) != 0).collect();
                return Err(GeometryError::NonPositiveForm { ray });
            }
        }
        Ok(())
    }
}

impl<T> Index<usize> for LinearForm<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positivity_names_failing_ray() {
        assert!(LinearForm::new(vec![1.0, 0.5]).check_positive().is_ok());
        match LinearForm::new(vec![1.0, 0.0, 2.0]).check_positive() {
            Err(GeometryError::NonPositiveForm { ray }) => assert_eq!(ray, vec![1]),
            other => panic!("{other:?}"),
        }
        assert!(LinearForm::<f64>::new(vec![]).check_positive().is_err());
    }

    #[test]
    fn eval_and_scaling() {
        let psi = LinearForm::<f64>::new(vec![0.3, 0.7]);
        assert!((psi.eval(&[1.0, 2.0]) - 1.7).abs() < 1e-15);
        assert_eq!(psi.scaled(2.0).coeffs(), &[0.6, 1.4]);
        assert_eq!(LinearForm::<f64>::sum_form(3).eval(&[1.0, 2.0, 3.0]), 6.0);
    }

    #[test]
    fn normalization() {
        let v = AVector::<f64>::new(vec![3.0, 4.0]);
        let n = v.normalized().unwrap();
        assert!((n[0] - 0.6).abs() < 1e-15 && (n[1] - 0.8).abs() < 1e-15);
        assert!(AVector::<f64>::zeros(2).normalized().is_none());
    }
}
