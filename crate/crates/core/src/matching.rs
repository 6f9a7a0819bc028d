//! Greedy nearest-neighbour correspondence between two point sets.
//!
//! Used to carry branch identity from one root set to the next. Pairs are
//! committed in order of increasing distance; equal distances are broken by
//! the candidate's real part, then its imaginary part.

use crate::scalar::{infinite_point, projective_distance, Real};
use num_complex::Complex;
use std::cmp::Ordering;

/// For each anchor, the index of the candidate assigned to it. When there are
/// fewer candidates than anchors, the leftover anchors get `None`.
pub fn greedy_match<T: Real>(anchors: &[Complex<T>], candidates: &[Complex<T>]) -> Vec<Option<usize>> {
    let mut pairs: Vec<(T, usize, usize)> = Vec::with_capacity(anchors.len() * candidates.len());
    for (i, &a) in anchors.iter().enumerate() {
        for (j, &c) in candidates.iter().enumerate() {
            pairs.push((projective_distance(a, c), i, j));
        }
    }
    pairs.sort_by(|x, y| {
        x.0.partial_cmp(&y.0)
            .unwrap_or(Ordering::Equal)
            .then_with(|| cmp_real(candidates[x.2].re, candidates[y.2].re))
            .then_with(|| cmp_real(candidates[x.2].im, candidates[y.2].im))
            .then_with(|| x.1.cmp(&y.1))
    });
    let mut assigned = vec![None; anchors.len()];
    let mut taken = vec![false; candidates.len()];
    let mut remaining = anchors.len().min(candidates.len());
    for (_, i, j) in pairs {
        if remaining == 0 {
            break;
        }
        if assigned[i].is_none() && !taken[j] {
            assigned[i] = Some(j);
            taken[j] = true;
            remaining -= 1;
        }
    }
    assigned
}

fn cmp_real<T: Real>(a: T, b: T) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

/// Candidates reordered to follow `anchors`; unmatched slots hold the point
/// at infinity.
pub fn align<T: Real>(anchors: &[Complex<T>], candidates: &[Complex<T>]) -> Vec<Complex<T>> {
    greedy_match(anchors, candidates)
        .into_iter()
        .map(|m| m.map_or_else(infinite_point, |j| candidates[j]))
        .collect()
}
