//! Graded Kasteleyn maps `K: M_d -> M_{d+1}`, `K f = f (x1 + x2 + x3)`, and the
//! level-0 inverse with its local statistics.

use std::collections::HashMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::lattice::{Axis, Domain, LatticeError, LatticePoint, MonomialModule};
use crate::linalg::{self, LinalgError};
use crate::ncalg::{edge_weight, NCParams};
use crate::scalar::Scalar;
use crate::tiling::{minimal_tiling, Tiling};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KasteleynError {
    #[error("Kasteleyn matrix is singular (domain is not tileable)")]
    Singular,
    #[error("{white} and {black} are not adjacent")]
    NotAdjacent { white: LatticePoint, black: LatticePoint },
    #[error("{0} is not a triangle of the domain")]
    NotInDomain(LatticePoint),
    #[error("inverse check failed: {0}")]
    InverseCheck(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl From<LinalgError> for KasteleynError {
    fn from(_: LinalgError) -> Self {
        KasteleynError::Singular
    }
}

/// Right multiplication by `x1 + x2 + x3` between two graded pieces, stored by column.
#[derive(Clone, Debug)]
pub struct GradedMap {
    pub degree: i64,
    /// Basis of `M_d`.
    pub source: Vec<LatticePoint>,
    /// Basis of `M_{d+1}`.
    pub target: Vec<LatticePoint>,
    pub source_index: HashMap<LatticePoint, usize>,
    pub target_index: HashMap<LatticePoint, usize>,
    pub cols: Vec<Vec<(usize, Scalar)>>,
}

impl GradedMap {
    pub fn new(module: &MonomialModule, params: &NCParams, d: i64) -> GradedMap {
        let source = module.support(d);
        let target = module.support(d + 1);
        let source_index: HashMap<_, _> = source.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let target_index: HashMap<_, _> = target.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let cols = source
            .iter()
            .map(|b| {
                Axis::ALL
                    .iter()
                    .filter_map(|&k| {
                        let w = *b + LatticePoint::unit(k);
                        target_index.get(&w).map(|&r| (r, edge_weight(b, k, params)))
                    })
                    .collect()
            })
            .collect();
        GradedMap { degree: d, source, target, source_index, target_index, cols }
    }

    pub fn rows(&self) -> usize {
        self.target.len()
    }

    pub fn columns(&self) -> usize {
        self.source.len()
    }

    pub fn dense_rows(&self) -> Vec<Vec<Scalar>> {
        let mut m = vec![vec![Scalar::zero(); self.columns()]; self.rows()];
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                m[*i][j] = v.clone();
            }
        }
        m
    }

    pub fn entry(&self, white: &LatticePoint, black: &LatticePoint) -> Option<Scalar> {
        let j = *self.source_index.get(black)?;
        let i = *self.target_index.get(white)?;
        Some(
            self.cols[j]
                .iter()
                .find(|(r, _)| *r == i)
                .map(|(_, v)| v.clone())
                .unwrap_or_else(Scalar::zero),
        )
    }

    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        linalg::sparse_apply(&self.cols, self.rows(), x)
    }

    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        if self.rows() == 0 {
            return (0..self.columns())
                .map(|j| (0..self.columns()).map(|i| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
                .collect();
        }
        linalg::kernel(&self.dense_rows(), self.columns())
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.dense_rows(), self.columns())
    }
}

pub fn build_k(domain: &Domain, params: &NCParams, d: i64) -> GradedMap {
    GradedMap::new(&domain.module(), params, d)
}

/// The level-0 Kasteleyn matrix with its exact inverse.
#[derive(Clone, Debug)]
pub struct KasteleynSystem {
    pub params: NCParams,
    pub k0: GradedMap,
    /// Rows indexed by black triangles, columns by white triangles.
    pub inverse: Vec<Vec<Scalar>>,
    pub determinant: Scalar,
    pub partition_function: Scalar,
    pub min_tiling: Tiling,
}

impl KasteleynSystem {
    pub fn blacks(&self) -> &[LatticePoint] {
        &self.k0.source
    }

    pub fn whites(&self) -> &[LatticePoint] {
        &self.k0.target
    }

    pub fn inverse_entry(&self, black: &LatticePoint, white: &LatticePoint) -> Result<Scalar, KasteleynError> {
        let b = *self.k0.source_index.get(black).ok_or(KasteleynError::NotInDomain(*black))?;
        let w = *self.k0.target_index.get(white).ok_or(KasteleynError::NotInDomain(*white))?;
        Ok(self.inverse[b][w].clone())
    }

    /// Column `w` of the inverse, as a vector on the black triangles.
    pub fn column(&self, white: &LatticePoint) -> Result<Vec<Scalar>, KasteleynError> {
        let w = *self.k0.target_index.get(white).ok_or(KasteleynError::NotInDomain(*white))?;
        Ok(self.inverse.iter().map(|row| row[w].clone()).collect())
    }

    /// Checks `K K^-1 = I` and `K^-1 K = I` exactly.
    pub fn verify(&self) -> Result<(), KasteleynError> {
        let n = self.k0.columns();
        for w in 0..n {
            let col: Vec<Scalar> = self.inverse.iter().map(|row| row[w].clone()).collect();
            let kc = self.k0.apply(&col);
            for (i, v) in kc.iter().enumerate() {
                let expect = if i == w { Scalar::one() } else { Scalar::zero() };
                if *v != expect {
                    return Err(KasteleynError::InverseCheck(format!("(K K^-1)[{i}][{w}] = {v}")));
                }
            }
        }
        for (b, row) in self.inverse.iter().enumerate() {
            for (j, col) in self.k0.cols.iter().enumerate() {
                let s: Scalar = col.iter().map(|(i, v)| &row[*i] * v).sum();
                let expect = if b == j { Scalar::one() } else { Scalar::zero() };
                if s != expect {
                    return Err(KasteleynError::InverseCheck(format!("(K^-1 K)[{b}][{j}] = {s}")));
                }
            }
        }
        Ok(())
    }
}

fn permutation_sign(perm: &[usize]) -> i32 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// `sgn(sigma) * w(sigma)` of a tiling read as a term of `det K_0`.
fn signed_weight(k0: &GradedMap, tiling: &Tiling) -> Scalar {
    let mut perm = vec![0usize; k0.columns()];
    let mut w = Scalar::one();
    for (white, black) in &tiling.edges {
        let j = k0.source_index[black];
        let i = k0.target_index[white];
        perm[j] = i;
        w *= k0.entry(white, black).expect("tiling edge lies in the domain");
    }
    if permutation_sign(&perm) < 0 {
        -w
    } else {
        w
    }
}

/// `det K_0` normalized by the signed weight of the minimal tiling; zero when not tileable.
pub fn partition_function(domain: &Domain, params: &NCParams) -> Result<Scalar, KasteleynError> {
    if !domain.tileable {
        return Ok(Scalar::zero());
    }
    let k0 = build_k(domain, params, 0);
    let det = linalg::determinant(&k0.dense_rows())?;
    let min = minimal_tiling(domain)?;
    Ok(det / signed_weight(&k0, &min))
}

pub fn invert_k(domain: &Domain, params: &NCParams) -> Result<KasteleynSystem, KasteleynError> {
    if !domain.tileable {
        return Err(KasteleynError::Singular);
    }
    let k0 = build_k(domain, params, 0);
    let dense = k0.dense_rows();
    let inv_wb = linalg::inverse(&dense)?;
    let determinant = linalg::determinant(&dense)?;
    let min_tiling = minimal_tiling(domain)?;
    let partition_function = &determinant / signed_weight(&k0, &min_tiling);
    let sys = KasteleynSystem {
        params: params.clone(),
        k0,
        inverse: inv_wb,
        determinant,
        partition_function,
        min_tiling,
    };
    sys.verify()?;
    Ok(sys)
}

/// Probability that all `(white, black)` edges appear in a random tiling.
pub fn edge_probability(sys: &KasteleynSystem, edges: &[(LatticePoint, LatticePoint)]) -> Result<Scalar, KasteleynError> {
    let mut prefactor = Scalar::one();
    for (w, b) in edges {
        let d = *w - *b;
        if !Axis::ALL.iter().any(|&a| d == LatticePoint::unit(a)) {
            return Err(KasteleynError::NotAdjacent { white: *w, black: *b });
        }
        prefactor *= sys.k0.entry(w, b).ok_or_else(|| {
            let missing = if sys.k0.source_index.contains_key(b) { *w } else { *b };
            KasteleynError::NotInDomain(missing)
        })?;
    }
    let mut minor = Vec::with_capacity(edges.len());
    for (_, bi) in edges {
        let row = edges
            .iter()
            .map(|(wj, _)| sys.inverse_entry(bi, wj))
            .collect::<Result<Vec<_>, _>>()?;
        minor.push(row);
    }
    Ok(prefactor * linalg::determinant(&minor)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn small_hexagons() {
        let q = ratio(2, 1);
        let p = NCParams::gauge(q.clone()).unwrap();
        let z = partition_function(&Domain::hexagon(1, 1, 1), &p).unwrap();
        assert_eq!(z, int(1) + &q);
        let z = partition_function(&Domain::hexagon(2, 2, 2), &NCParams::commutative()).unwrap();
        assert_eq!(z, int(20));
    }

    #[test]
    fn inverse_is_exact_for_random_triple() {
        let p = NCParams::new(ratio(3, 5), ratio(7, 2), ratio(-4, 9)).unwrap();
        let sys = invert_k(&Domain::hexagon(2, 2, 1), &p).unwrap();
        sys.verify().unwrap();
    }

    #[test]
    fn single_edge_probability_on_h111() {
        let p = NCParams::gauge(int(2)).unwrap();
        let h = Domain::hexagon(1, 1, 1);
        let sys = invert_k(&h, &p).unwrap();
        let total: Scalar = h
            .black
            .iter()
            .flat_map(|b| Axis::ALL.map(|k| (*b + LatticePoint::unit(k), *b)))
            .filter(|(w, _)| h.white.contains(w))
            .map(|e| edge_probability(&sys, &[e]).unwrap())
            .sum();
        assert_eq!(total, int(3));
        let (w, b) = (h.white[0], h.black[0]);
        let far = LatticePoint::new(9, 9, 9);
        assert!(matches!(edge_probability(&sys, &[(far, b)]), Err(KasteleynError::NotAdjacent { .. })));
        let _ = w;
    }
}
