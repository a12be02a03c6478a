//! Radical-inverse (Halton) low-discrepancy sequences.

use crate::Vec3;

/// Radical inverse of `index` in `base`: the base-`base` digits of `index`
/// mirrored about the radix point. `halton(1, 2) = 0.5`, `halton(3, 2) = 0.75`.
pub fn halton(index: u64, base: u64) -> f64 {
    assert!(base >= 2, "Halton base must be at least 2");
    let b = base as f64;
    let mut i = index;
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Three-dimensional Halton points in bases (2, 3, 5), starting at a given
/// index (≥ 1).
#[derive(Debug, Clone)]
pub struct HaltonPoints {
    next: u64,
}

impl HaltonPoints {
    pub fn new(start_index: u64) -> Self {
        Self {
            next: start_index.max(1),
        }
    }
}

impl Iterator for HaltonPoints {
    type Item = Vec3;

    fn next(&mut self) -> Option<Vec3> {
        let i = self.next;
        self.next += 1;
        Some(Vec3::new(halton(i, 2), halton(i, 3), halton(i, 5)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_examples() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(3, 2), 0.75);
        assert!((halton(2, 3) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(halton(4, 2), 0.125);
    }

    #[test]
    fn first_hundred_points_are_distinct_and_open() {
        let pts: Vec<Vec3> = HaltonPoints::new(1).take(100).collect();
        for p in &pts {
            assert!(p.iter().all(|&c| c > 0.0 && c < 1.0));
        }
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                assert_ne!(pts[i], pts[j]);
            }
        }
    }
}
