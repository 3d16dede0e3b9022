//! Sets of coordinatewise lower bounds for unexplored subtrees.

/// Flat list of `d`-vectors `b` such that every unvisited element `x`
/// satisfies `x >= b` coordinatewise for some `b` in the set. Kept
/// Pareto-minimal, so `min_b ψ(b)` is a certified floor for any positive `ψ`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LowerBoundSet {
    d: usize,
    points: Vec<f64>,
    staged: usize,
}

const COMPRESS_AT: usize = 1 << 16;

impl LowerBoundSet {
    pub fn new(d: usize) -> Self {
        Self {
            d,
            points: Vec::new(),
            staged: 0,
        }
    }

    pub fn push(&mut self, b: &[f64]) {
        debug_assert_eq!(b.len(), self.d);
        self.points.extend_from_slice(b);
        self.staged += 1;
        if self.staged >= COMPRESS_AT {
            self.compress();
        }
    }

    pub fn merge(&mut self, other: &Self) {
        if self.d == 0 {
            self.d = other.d;
        }
        self.points.extend_from_slice(&other.points);
        self.compress();
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len().checked_div(self.d).unwrap_or(0)
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks(self.d.max(1))
    }

    /// `min_b Σ ψ_i b_i`; `∞` when nothing is left unexplored.
    pub fn floor(&self, psi: &[f64]) -> f64 {
        self.points()
            .map(|b| b.iter().zip(psi).map(|(x, c)| x * c).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn compress(&mut self) {
        self.staged = 0;
        if self.d == 0 || self.points.is_empty() {
            return;
        }
        let d = self.d;
        let mut pts: Vec<&[f64]> = self.points.chunks(d).collect();
        pts.sort_by(|a, b| {
            a.iter()
                .zip(*b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        pts.dedup();
        let mut front: Vec<&[f64]> = Vec::new();
        if d == 1 {
            front.push(pts[0]);
        } else if d == 2 {
            let mut best = f64::INFINITY;
            for p in pts {
                if p[1] < best {
                    best = p[1];
                    front.push(p);
                }
            }
        } else {
            // lexicographic order: a point can only be dominated by earlier ones
            for p in pts {
                if !front.iter().any(|q| q.iter().zip(p).all(|(a, b)| a <= b)) {
                    front.push(p);
                }
            }
        }
        self.points = front.concat();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_only_minimal_points() {
        let mut s = LowerBoundSet::new(2);
        for p in [[1.0, 5.0], [2.0, 2.0], [3.0, 3.0], [2.0, 4.0], [4.0, 1.0], [1.0, 6.0]] {
            s.push(&p);
        }
        s.compress();
        let pts: Vec<Vec<f64>> = s.points().map(|p| p.to_vec()).collect();
        assert_eq!(pts, vec![vec![1.0, 5.0], vec![2.0, 2.0], vec![4.0, 1.0]]);
        assert_eq!(s.floor(&[1.0, 1.0]), 4.0);
        assert_eq!(s.floor(&[1.0, 0.1]), 1.5);
    }

    #[test]
    fn floor_is_unchanged_by_compression_in_three_dimensions() {
        let mut s = LowerBoundSet::new(3);
        let mut raw = Vec::new();
        for i in 0..200 {
            let x = i as f64;
            let p = [(x * 0.37).sin() + 2.0, (x * 0.71).cos() + 2.0, (x * 0.13).sin() + 2.0];
            raw.push(p);
            s.push(&p);
        }
        let psi = [0.3, 1.0, 0.6];
        let direct = raw.iter().map(|p| p.iter().zip(&psi).map(|(a, b)| a * b).sum::<f64>()).fold(f64::INFINITY, f64::min);
        s.compress();
        assert_eq!(s.floor(&psi), direct);
        assert!(s.len() < 200);
    }

    #[test]
    fn empty_set_has_infinite_floor() {
        assert_eq!(LowerBoundSet::new(2).floor(&[1.0, 1.0]), f64::INFINITY);
    }
}
