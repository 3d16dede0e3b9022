//! Möbius and hyperbolic geometry kernel, generic over the real scalar.
//!
//! Maps act on the Riemann sphere and, by Poincaré extension, on the upper
//! half-space model of ℍ³ with basepoint `o = (0, 1)`. Circles are Hermitian
//! forms, so lines and images of circles through a pole need no special case.

mod circle;
mod element;
mod linear;
mod mobius;
mod scalar;

use thiserror::Error;

pub use circle::{Circle, CircleShape, Torus, Volume};
pub use element::GroupElement;
pub use linear::{AVector, LinearForm};
pub use mobius::{arccosh_clamped, busemann_density, ExtPoint, HalfSpacePoint, MoebiusMap};
pub use scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("matrix is singular or not finite")]
    SingularMatrix,
    #[error("degenerate circle form (discriminant {discriminant})")]
    DegenerateCircle { discriminant: f64 },
    #[error("radius must be positive and finite, got {radius}")]
    InvalidRadius { radius: f64 },
    #[error("arccosh argument {argument} is below 1 beyond rounding")]
    ArccoshDomain { argument: f64 },
    #[error("a torus needs at least one factor")]
    EmptyTorus,
    #[error("linear form is not positive on the chamber: fails on ray e_S with S = {ray:?}")]
    NonPositiveForm { ray: Vec<usize> },
    #[error("linear form has non-finite coefficients")]
    NonFiniteForm,
}
