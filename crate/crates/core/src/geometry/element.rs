use super::{AVector, MoebiusMap, Real};
use crate::word::Word;

/// An element `(ρ₁(g), …, ρ_d(g))` of a self-joining, together with the
/// reduced word `g` it was evaluated from.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement<T> {
    factors: Vec<MoebiusMap<T>>,
    word: Word,
}

impl<T: Real> GroupElement<T> {
    pub fn new(factors: Vec<MoebiusMap<T>>, word: Word) -> Self {
        Self { factors, word }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            factors: vec![MoebiusMap::identity(); d],
            word: Word::empty(),
        }
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[MoebiusMap<T>] {
        &self.factors
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    /// Factorwise product; the word is the free reduction of the concatenation.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            factors: self
                .factors
                .iter()
                .zip(&other.factors)
                .map(|(a, b)| a.compose(b))
                .collect(),
            word: self.word.concat_reduced(&other.word),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            factors: self.factors.iter().map(MoebiusMap::inverse).collect(),
            word: self.word.inverse(),
        }
    }

    /// `μ(g) = (d(g₁o, o), …, d(g_d o, o))`.
    pub fn cartan_projection(&self) -> AVector<T> {
        AVector::new(self.factors.iter().map(MoebiusMap::hyp_displacement).collect())
    }

    /// `(ℓ₁(g), …, ℓ_d(g))`.
    pub fn translation_lengths(&self) -> AVector<T> {
        AVector::new(self.factors.iter().map(MoebiusMap::translation_length).collect())
    }
}
