//! Brute-force reference computations by explicit enumeration of tilings.
//!
//! Nothing here touches the Kasteleyn matrix or the flip machinery; the
//! volume of a tiling is read directly from its type-1 tiles.

use std::collections::{BTreeSet, HashMap};

use num_traits::Zero;

use crate::lattice::{Domain, LatticePoint};
use crate::scalar::{pow, Scalar};

pub type Matching = Vec<(LatticePoint, LatticePoint)>;

/// All perfect matchings, each as `(white, black)` pairs sorted by black.
///
/// Panics when more than `limit` tilings exist.
pub fn enumerate_tilings(domain: &Domain, limit: usize) -> Vec<Matching> {
    let blacks = domain.black.clone();
    let whites: BTreeSet<LatticePoint> = domain.white.iter().copied().collect();
    let mut used = BTreeSet::new();
    let mut current = Vec::new();
    let mut out = Vec::new();
    if blacks.len() == whites.len() {
        recurse(&blacks, &whites, 0, &mut used, &mut current, &mut out, limit);
    }
    out
}

fn recurse(
    blacks: &[LatticePoint],
    whites: &BTreeSet<LatticePoint>,
    i: usize,
    used: &mut BTreeSet<LatticePoint>,
    current: &mut Matching,
    out: &mut Vec<Matching>,
    limit: usize,
) {
    if i == blacks.len() {
        assert!(out.len() < limit, "more than {limit} tilings");
        out.push(current.clone());
        return;
    }
    let b = blacks[i];
    for e in [[1, 0, 0], [0, 1, 0], [0, 0, 1]] {
        let w = b + LatticePoint(e);
        if whites.contains(&w) && !used.contains(&w) {
            used.insert(w);
            current.push((w, b));
            recurse(blacks, whites, i + 1, used, current, out, limit);
            current.pop();
            used.remove(&w);
        }
    }
}

/// Sum of `b2` over tiles whose white is `b + e1`.
pub fn raw_volume(m: &Matching) -> i64 {
    m.iter()
        .filter(|(w, b)| *w - *b == LatticePoint::new(1, 0, 0))
        .map(|(_, b)| b.0[1])
        .sum()
}

/// Tilings with their volumes above the minimum.
pub fn tilings_with_volume(domain: &Domain, limit: usize) -> Vec<(Matching, i64)> {
    let all = enumerate_tilings(domain, limit);
    let min = all.iter().map(raw_volume).min().unwrap_or(0);
    all.into_iter()
        .map(|m| {
            let v = raw_volume(&m) - min;
            (m, v)
        })
        .collect()
}

/// `sum_S q^V(S)`.
pub fn partition_function(domain: &Domain, q: &Scalar, limit: usize) -> Scalar {
    tilings_with_volume(domain, limit).iter().map(|(_, v)| pow(q, *v)).sum()
}

/// Probability of each tiling under the `q^V` law.
pub fn tiling_law(domain: &Domain, q: &Scalar, limit: usize) -> Vec<(Matching, i64, Scalar)> {
    let all = tilings_with_volume(domain, limit);
    let z: Scalar = all.iter().map(|(_, v)| pow(q, *v)).sum();
    all.into_iter().map(|(m, v)| {
        let p = pow(q, v) / &z;
        (m, v, p)
    }).collect()
}

/// Exact probability that every given edge is present.
pub fn edge_probability(domain: &Domain, q: &Scalar, edges: &[(LatticePoint, LatticePoint)], limit: usize) -> Scalar {
    let mut total = Scalar::zero();
    for (m, _, p) in tiling_law(domain, q, limit) {
        if edges.iter().all(|e| m.contains(e)) {
            total += p;
        }
    }
    total
}

/// Number of tilings at each volume.
pub fn volume_counts(domain: &Domain, limit: usize) -> HashMap<i64, usize> {
    let mut h = HashMap::new();
    for (_, v) in tilings_with_volume(domain, limit) {
        *h.entry(v).or_insert(0) += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn macmahon_counts() {
        assert_eq!(enumerate_tilings(&Domain::hexagon(1, 1, 1), 100).len(), 2);
        assert_eq!(enumerate_tilings(&Domain::hexagon(2, 1, 1), 100).len(), 3);
        assert_eq!(enumerate_tilings(&Domain::hexagon(2, 2, 1), 100).len(), 6);
        assert_eq!(enumerate_tilings(&Domain::hexagon(2, 2, 2), 100).len(), 20);
        assert_eq!(enumerate_tilings(&Domain::hexagon(3, 3, 3), 1000).len(), 980);
    }

    #[test]
    fn volume_spectrum_of_h222_is_symmetric() {
        let c = volume_counts(&Domain::hexagon(2, 2, 2), 100);
        let max = *c.keys().max().unwrap();
        assert_eq!(max, 8);
        for (v, n) in &c {
            assert_eq!(c[&(max - v)], *n);
        }
    }
}
