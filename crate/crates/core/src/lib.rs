//! Torus orbit counting for self-joinings of Schottky groups.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod exponents;
pub mod fixtures;
pub mod frontier;
pub mod geometry;
pub mod harness;
pub mod measures;
pub mod orbit;
pub mod persist;
pub mod render;
pub mod schottky;
pub mod traverse;
pub mod word;

pub use geometry::{
    AVector, Circle, GeometryError, GroupElement, LinearForm, MoebiusMap, Real, Torus, Volume,
};
pub use schottky::{JoiningSpec, SchottkyData, SeedTorus};
pub use word::{Letter, Word};

pub type Moebius64 = MoebiusMap<f64>;
pub type Moebius32 = MoebiusMap<f32>;
pub type Circle64 = Circle<f64>;
pub type Circle32 = Circle<f32>;
pub type Torus64 = Torus<f64>;
pub type AVector64 = AVector<f64>;
pub type LinearForm64 = LinearForm<f64>;
pub type Element64 = GroupElement<f64>;
pub type Joining64 = JoiningSpec<f64>;
