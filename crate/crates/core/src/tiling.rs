//! Lozenge tilings as perfect matchings, and the hexagon flips between them.

use std::collections::HashMap;

use crate::lattice::{maximum_matching, Axis, Domain, LatticeError, LatticePoint};

/// A perfect matching of a domain; `volume` counts cubes above the minimal tiling.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tiling {
    /// Matched `(white, black)` pairs, sorted by black.
    pub edges: Vec<(LatticePoint, LatticePoint)>,
    pub volume: i64,
}

impl Tiling {
    /// Orientation of each tile: the edge type joining its two triangles.
    pub fn orientations(&self) -> impl Iterator<Item = (LatticePoint, Axis)> + '_ {
        self.edges.iter().map(|(w, b)| {
            let d = *w - *b;
            let axis = Axis::ALL.into_iter().find(|&a| d == LatticePoint::unit(a)).expect("adjacent pair");
            (*b, axis)
        })
    }
}

/// An interior lattice vertex `p` with its three black neighbours
/// `p - e1 - e2`, `p - e2 - e3`, `p - e1 - e3` (as indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Face {
    pub vertex: LatticePoint,
    pub blacks: [usize; 3],
}

/// Flip state of a face: `Low` holds types (1, 2, 3) on its blacks, `High` holds (2, 3, 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceState {
    Low,
    High,
    Frozen,
}

/// Level-0 adjacency of a domain, indexed for fast flips.
#[derive(Clone, Debug)]
pub struct FaceGraph {
    pub black: Vec<LatticePoint>,
    pub white: Vec<LatticePoint>,
    pub black_index: HashMap<LatticePoint, usize>,
    pub white_index: HashMap<LatticePoint, usize>,
    pub faces: Vec<Face>,
    pub faces_of_black: Vec<Vec<usize>>,
}

const E1: LatticePoint = LatticePoint::new(1, 0, 0);
const E2: LatticePoint = LatticePoint::new(0, 1, 0);
const E3: LatticePoint = LatticePoint::new(0, 0, 1);
const LOW: [u8; 3] = [0, 1, 2];
const HIGH: [u8; 3] = [1, 2, 0];

impl FaceGraph {
    pub fn new(domain: &Domain) -> FaceGraph {
        let black = domain.black.clone();
        let white = domain.white.clone();
        let black_index: HashMap<_, _> = black.iter().enumerate().map(|(i, b)| (*b, i)).collect();
        let white_index: HashMap<_, _> = white.iter().enumerate().map(|(i, w)| (*w, i)).collect();
        let mut vertices: Vec<LatticePoint> = black.iter().flat_map(|b| [*b + E1 + E2, *b + E2 + E3, *b + E1 + E3]).collect();
        vertices.sort_unstable();
        vertices.dedup();
        let mut faces = Vec::new();
        for p in vertices {
            let bs = [p - E1 - E2, p - E2 - E3, p - E1 - E3];
            let ws = [p - E1, p - E2, p - E3];
            if ws.iter().all(|w| white_index.contains_key(w)) {
                if let [Some(a), Some(b), Some(c)] = bs.map(|b| black_index.get(&b).copied()) {
                    faces.push(Face { vertex: p, blacks: [a, b, c] });
                }
            }
        }
        let mut faces_of_black = vec![Vec::new(); black.len()];
        for (fi, f) in faces.iter().enumerate() {
            for &b in &f.blacks {
                faces_of_black[b].push(fi);
            }
        }
        FaceGraph { black, white, black_index, white_index, faces, faces_of_black }
    }

    pub fn state(&self, kinds: &[u8], face: usize) -> FaceState {
        let [a, b, c] = self.faces[face].blacks;
        let k = [kinds[a], kinds[b], kinds[c]];
        if k == LOW {
            FaceState::Low
        } else if k == HIGH {
            FaceState::High
        } else {
            FaceState::Frozen
        }
    }

    /// Sets a flippable face to the requested state.
    pub fn set(&self, kinds: &mut [u8], face: usize, high: bool) {
        let new = if high { HIGH } else { LOW };
        for (slot, k) in self.faces[face].blacks.iter().zip(new) {
            kinds[*slot] = k;
        }
    }

    /// Height functional: sum of `b2` over the type-1 tiles.
    pub fn height(&self, kinds: &[u8]) -> i64 {
        kinds.iter().zip(&self.black).filter(|(k, _)| **k == 0).map(|(_, b)| b.0[1]).sum()
    }

    pub fn kinds_from_edges(&self, edges: &[(LatticePoint, LatticePoint)]) -> Vec<u8> {
        let mut kinds = vec![u8::MAX; self.black.len()];
        for (w, b) in edges {
            let d = *w - *b;
            let k = Axis::ALL.into_iter().position(|a| d == LatticePoint::unit(a)).expect("adjacent pair");
            kinds[self.black_index[b]] = k as u8;
        }
        kinds
    }

    pub fn tiling(&self, kinds: &[u8], base_height: i64) -> Tiling {
        let edges = self
            .black
            .iter()
            .zip(kinds)
            .map(|(b, &k)| (*b + LatticePoint::unit(Axis::from_index(k as usize)), *b))
            .collect();
        Tiling { edges, volume: self.height(kinds) - base_height }
    }

    /// Some perfect matching, as edge kinds per black.
    pub fn any_matching(&self) -> Result<Vec<u8>, LatticeError> {
        let m = maximum_matching(&self.black, &self.white);
        if m.len() != self.black.len() || self.black.len() != self.white.len() {
            return Err(LatticeError::NotTileable { white: self.white.len(), black: self.black.len(), matched: m.len() });
        }
        let mut kinds = vec![0u8; self.black.len()];
        for (bi, wi) in m {
            let d = self.white[wi] - self.black[bi];
            kinds[bi] = Axis::ALL.into_iter().position(|a| d == LatticePoint::unit(a)).unwrap() as u8;
        }
        Ok(kinds)
    }

    /// Applies down flips until none remains; the result is the unique minimum.
    pub fn descend(&self, kinds: &mut [u8]) {
        let mut stack: Vec<usize> = (0..self.faces.len()).collect();
        let mut queued = vec![true; self.faces.len()];
        while let Some(f) = stack.pop() {
            queued[f] = false;
            if self.state(kinds, f) == FaceState::High {
                self.set(kinds, f, false);
                for &b in &self.faces[f].blacks {
                    for &g in &self.faces_of_black[b] {
                        if !queued[g] {
                            queued[g] = true;
                            stack.push(g);
                        }
                    }
                }
            }
        }
    }

    /// Kinds of the minimal-volume tiling.
    pub fn minimal(&self) -> Result<Vec<u8>, LatticeError> {
        let mut kinds = self.any_matching()?;
        self.descend(&mut kinds);
        Ok(kinds)
    }
}

pub fn minimal_tiling(domain: &Domain) -> Result<Tiling, LatticeError> {
    let g = FaceGraph::new(domain);
    let kinds = g.minimal()?;
    let h = g.height(&kinds);
    Ok(g.tiling(&kinds, h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hexagon_faces_and_minimum() {
        let h = Domain::hexagon(2, 2, 2);
        let g = FaceGraph::new(&h);
        assert_eq!(g.faces.len(), 7);
        let kinds = g.minimal().unwrap();
        assert!((0..g.faces.len()).all(|f| g.state(&kinds, f) != FaceState::High));
        let t = minimal_tiling(&h).unwrap();
        assert_eq!(t.volume, 0);
        assert_eq!(t.edges.len(), 12);
    }

    #[test]
    fn flip_changes_height_by_one() {
        let h = Domain::hexagon(1, 1, 1);
        let g = FaceGraph::new(&h);
        let mut kinds = g.minimal().unwrap();
        assert_eq!(g.faces.len(), 1);
        assert_eq!(g.state(&kinds, 0), FaceState::Low);
        let h0 = g.height(&kinds);
        g.set(&mut kinds, 0, true);
        assert_eq!(g.height(&kinds), h0 + 1);
    }
}
