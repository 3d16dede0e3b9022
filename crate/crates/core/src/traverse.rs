//! Deterministic parallel traversal of the reduced-word tree of a joining.
//!
//! The tree is walked breadth-first down to a fixed split depth, then each
//! split node's subtree is walked depth-first on a rayon pool. Every subtree
//! gets its own accumulator and the accumulators come back in canonical
//! prefix order, so results do not depend on the thread count.

use rayon::prelude::*;

use crate::geometry::{MoebiusMap, Real};
use crate::schottky::JoiningSpec;
use crate::word::{Letter, Word};

/// Depth at which the tree is cut into independent subtrees. Fixed so the
/// partition, and hence every floating-point fold, is schedule independent.
pub const SPLIT_DEPTH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Expand,
    Skip,
}

/// A tree node: the word and `(ρ₁(w), …, ρ_d(w))`.
#[derive(Debug, Clone)]
pub struct Node<T> {
    pub word: Word,
    pub maps: Vec<MoebiusMap<T>>,
}

impl<T: Real> Node<T> {
    pub fn root(d: usize) -> Self {
        Self {
            word: Word::empty(),
            maps: vec![MoebiusMap::identity(); d],
        }
    }

    pub fn child(&self, spec: &JoiningSpec<T>, l: Letter) -> Self {
        let mut word = self.word.clone();
        word.push(l);
        let maps = self
            .maps
            .iter()
            .zip(spec.reps())
            .map(|(m, rep)| m.compose(rep.letter_map(l)))
            .collect();
        Self { word, maps }
    }
}

/// Letters that may follow `last` in a reduced word, in alphabet order.
pub fn next_letters(k: usize, last: Option<Letter>) -> impl Iterator<Item = Letter> {
    (0..2 * k)
        .map(Letter::from_code)
        .filter(move |&l| Some(l.inverse()) != last)
}

/// Result of a traversal: the head accumulator (nodes above the split
/// depth) followed by one accumulator per split subtree, in canonical order.
#[derive(Debug)]
pub struct Partials<A> {
    pub parts: Vec<A>,
}

impl<A> Partials<A> {
    /// Left fold over the parts in canonical order.
    pub fn reduce(self, mut merge: impl FnMut(A, A) -> A) -> Option<A> {
        let mut it = self.parts.into_iter();
        let first = it.next()?;
        Some(it.fold(first, &mut merge))
    }
}

/// Visits every node of the reduced-word tree up to `max_depth` for which
/// all ancestors returned [`Control::Expand`]. Nodes at `max_depth` are
/// visited but never expanded.
pub fn traverse<T, A, F, V>(
    spec: &JoiningSpec<T>,
    max_depth: usize,
    threads: usize,
    make: F,
    visit: V,
) -> Partials<A>
where
    T: Real,
    A: Send,
    F: Fn() -> A + Sync,
    V: Fn(&Node<T>, &mut A) -> Control + Sync,
{
    let k = spec.rank();
    let split = SPLIT_DEPTH.min(max_depth + 1);
    let mut head = make();
    let mut level = vec![Node::root(spec.dim())];
    for depth in 0..split {
        let mut next = Vec::new();
        for node in &level {
            if visit(node, &mut head) == Control::Expand && depth < max_depth {
                next.extend(next_letters(k, node.word.last()).map(|l| node.child(spec, l)));
            }
        }
        level = next;
    }

    let subtree = |root: &Node<T>| {
        let mut acc = make();
        let mut stack = vec![root.clone()];
        while let Some(node) = stack.pop() {
            if visit(&node, &mut acc) == Control::Expand && node.word.len() < max_depth {
                // reversed so the smallest letter is popped first
                let children: Vec<Letter> = next_letters(k, node.word.last()).collect();
                for &l in children.iter().rev() {
                    stack.push(node.child(spec, l));
                }
            }
        }
        acc
    };

    let mut parts = vec![head];
    if threads <= 1 {
        parts.extend(level.iter().map(subtree));
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        parts.extend(pool.install(|| level.par_iter().map(subtree).collect::<Vec<_>>()));
    }
    Partials { parts }
}

/// Number of worker threads when the caller passes 0.
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
