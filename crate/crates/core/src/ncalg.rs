//! The quantum plane `x_j x_i = q_ij x_i x_j` and its torus localization.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::lattice::{Axis, LatticePoint};
use crate::scalar::{format_scalar, pow, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("operands use different commutation parameters")]
    ParamMismatch,
    #[error("commutation parameter {0} is zero")]
    ZeroParameter(&'static str),
    #[error("negative exponent {0} outside the torus")]
    NegativeExponent(LatticePoint),
}

/// Commutation constants `q12, q23, q31`; `q = q12 q23 q31`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NCParams {
    q12: Scalar,
    q23: Scalar,
    q31: Scalar,
}

impl NCParams {
    pub fn new(q12: Scalar, q23: Scalar, q31: Scalar) -> Result<Self, AlgebraError> {
        for (v, name) in [(&q12, "q12"), (&q23, "q23"), (&q31, "q31")] {
            if v.is_zero() {
                return Err(AlgebraError::ZeroParameter(name));
            }
        }
        Ok(NCParams { q12, q23, q31 })
    }

    /// The gauge `(q, 1, 1)`.
    pub fn gauge(q: Scalar) -> Result<Self, AlgebraError> {
        Self::new(q, Scalar::one(), Scalar::one())
    }

    pub fn commutative() -> Self {
        NCParams { q12: Scalar::one(), q23: Scalar::one(), q31: Scalar::one() }
    }

    pub fn q(&self) -> Scalar {
        &self.q12 * &self.q23 * &self.q31
    }

    pub fn is_commutative(&self) -> bool {
        self.q12.is_one() && self.q23.is_one() && self.q31.is_one()
    }

    pub fn triple(&self) -> [&Scalar; 3] {
        [&self.q12, &self.q23, &self.q31]
    }

    /// `q_ij` with `q_ii = 1` and `q_ji = 1 / q_ij`.
    pub fn q_ij(&self, i: Axis, j: Axis) -> Scalar {
        use Axis::*;
        match (i, j) {
            (X1, X2) => self.q12.clone(),
            (X2, X3) => self.q23.clone(),
            (X3, X1) => self.q31.clone(),
            (X2, X1) => self.q12.recip(),
            (X3, X2) => self.q23.recip(),
            (X1, X3) => self.q31.recip(),
            _ => Scalar::one(),
        }
    }

    /// Parameters after renaming `x_{k+1}, x_{k+2}, x_k` to `x1, x2, x3`.
    pub fn relabeled(&self, k: Axis) -> NCParams {
        let y1 = k.next();
        let y2 = y1.next();
        NCParams { q12: self.q_ij(y1, y2), q23: self.q_ij(y2, k), q31: self.q_ij(k, y1) }
    }
}

impl fmt::Display for NCParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "q12={} q23={} q31={}",
            format_scalar(&self.q12),
            format_scalar(&self.q23),
            format_scalar(&self.q31)
        )
    }
}

/// The scalar `c(a, b)` with `x^a x^b = c(a, b) x^(a+b)`: the product over
/// `i < j` of `q_ij^(a_j b_i)`.
pub fn cocycle(a: &LatticePoint, b: &LatticePoint, params: &NCParams) -> Scalar {
    let [_, a2, a3] = a.0;
    let [b1, b2, _] = b.0;
    let e12 = a2 * b1;
    let e13 = a3 * b1;
    let e23 = a3 * b2;
    let mut c = Scalar::one();
    if e12 != 0 {
        c *= pow(&params.q12, e12);
    }
    if e13 != 0 {
        c *= pow(&params.q31, -e13);
    }
    if e23 != 0 {
        c *= pow(&params.q23, e23);
    }
    c
}

/// `c(a, e_i)`: the coefficient of the type-`i` edge leaving black `a`.
pub fn edge_weight(a: &LatticePoint, i: Axis, params: &NCParams) -> Scalar {
    cocycle(a, &LatticePoint::unit(i), params)
}

/// Element of the quantum plane (or its torus) in the normal-ordered basis `x1^a1 x2^a2 x3^a3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NCPoly {
    params: NCParams,
    terms: BTreeMap<LatticePoint, Scalar>,
}

impl NCPoly {
    pub fn zero(params: &NCParams) -> Self {
        NCPoly { params: params.clone(), terms: BTreeMap::new() }
    }

    pub fn one(params: &NCParams) -> Self {
        Self::monomial(params, LatticePoint::ZERO, Scalar::one())
    }

    pub fn monomial(params: &NCParams, exponent: LatticePoint, coeff: Scalar) -> Self {
        let mut p = Self::zero(params);
        p.add_term(exponent, coeff);
        p
    }

    pub fn var(params: &NCParams, axis: Axis) -> Self {
        Self::monomial(params, LatticePoint::unit(axis), Scalar::one())
    }

    pub fn from_terms(params: &NCParams, terms: impl IntoIterator<Item = (LatticePoint, Scalar)>) -> Self {
        let mut p = Self::zero(params);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exponent: LatticePoint, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(exponent).or_insert_with(Scalar::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&exponent);
        }
    }

    pub fn params(&self) -> &NCParams {
        &self.params
    }

    pub fn terms(&self) -> &BTreeMap<LatticePoint, Scalar> {
        &self.terms
    }

    pub fn coeff(&self, exponent: &LatticePoint) -> Scalar {
        self.terms.get(exponent).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every exponent is nonnegative, i.e. the element lies in the plane.
    pub fn in_plane(&self) -> bool {
        self.terms.keys().all(LatticePoint::is_nonnegative)
    }

    /// The common degree of all terms, if homogeneous and nonzero.
    pub fn degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(LatticePoint::degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn scale(&self, s: &Scalar) -> NCPoly {
        NCPoly::from_terms(&self.params, self.terms.iter().map(|(e, c)| (*e, c * s)))
    }

    pub fn mul(&self, other: &NCPoly) -> Result<NCPoly, AlgebraError> {
        if self.params != other.params {
            return Err(AlgebraError::ParamMismatch);
        }
        let mut out = NCPoly::zero(&self.params);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(*ea + *eb, ca * cb * cocycle(ea, eb, &self.params));
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &NCPoly) -> Result<NCPoly, AlgebraError> {
        if self.params != other.params {
            return Err(AlgebraError::ParamMismatch);
        }
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        Ok(out)
    }

    /// Inverse of a single torus monomial.
    pub fn monomial_inverse(params: &NCParams, exponent: LatticePoint) -> NCPoly {
        let c = cocycle(&exponent, &(-exponent), params);
        NCPoly::monomial(params, -exponent, c.recip())
    }
}

impl Add for &NCPoly {
    type Output = NCPoly;
    fn add(self, o: &NCPoly) -> NCPoly {
        self.try_add(o).expect("NCPoly addition with mismatched parameters")
    }
}

impl Neg for &NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        self.scale(&-Scalar::one())
    }
}

impl Sub for &NCPoly {
    type Output = NCPoly;
    fn sub(self, o: &NCPoly) -> NCPoly {
        self + &(-o)
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("{}*x^({},{},{})", format_scalar(c), e.0[0], e.0[1], e.0[2]))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Face points adjacent to black `b`, in the cyclic order used by [`face_flux`].
///
/// `v1 = b`, then alternately white and black around the lattice vertex `b + e1 + e2`.
pub fn face_cycle(b: LatticePoint) -> [LatticePoint; 6] {
    let e1 = LatticePoint::new(1, 0, 0);
    let e2 = LatticePoint::new(0, 1, 0);
    let e3 = LatticePoint::new(0, 0, 1);
    [b, b + e1, b + e1 - e3, b + e1 + e2 - e3, b + e2 - e3, b + e2]
}

/// Alternating product `K21 K43 K65 / (K23 K45 K61)` of edge weights around the
/// face of black `b`; equals `1 / q` for every `b`.
pub fn face_flux(params: &NCParams, b: LatticePoint) -> Scalar {
    let v = face_cycle(b);
    let k = |w: usize, blk: usize| {
        let (w, blk) = (v[w - 1], v[blk - 1]);
        let d = w - blk;
        let axis = Axis::ALL
            .into_iter()
            .find(|&a| d == LatticePoint::unit(a))
            .expect("face cycle steps along unit vectors");
        edge_weight(&blk, axis, params)
    };
    k(2, 1) * k(4, 3) * k(6, 5) / (k(2, 3) * k(4, 5) * k(6, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn params() -> NCParams {
        NCParams::new(ratio(2, 3), ratio(5, 7), ratio(11, 13)).unwrap()
    }

    #[test]
    fn commutation_relation() {
        let p = params();
        for (i, j) in [(Axis::X1, Axis::X2), (Axis::X2, Axis::X3), (Axis::X1, Axis::X3)] {
            let xi = NCPoly::var(&p, i);
            let xj = NCPoly::var(&p, j);
            let lhs = xj.mul(&xi).unwrap();
            let rhs = xi.mul(&xj).unwrap().scale(&p.q_ij(i, j));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn cocycle_small_cases() {
        let p = params();
        let e1 = LatticePoint::new(1, 0, 0);
        let e2 = LatticePoint::new(0, 1, 0);
        let e3 = LatticePoint::new(0, 0, 1);
        assert_eq!(cocycle(&e2, &e1, &p), ratio(2, 3));
        assert_eq!(cocycle(&e1, &e2, &p), int(1));
        // x3 (x1 x2) = q13 q23 x1 x2 x3.
        assert_eq!(cocycle(&e3, &(e1 + e2), &p), p.q_ij(Axis::X1, Axis::X3) * p.q_ij(Axis::X2, Axis::X3));
    }

    #[test]
    fn torus_inverse() {
        let p = params();
        let e = LatticePoint::new(2, -1, 3);
        let m = NCPoly::monomial(&p, e, int(1));
        assert_eq!(m.mul(&NCPoly::monomial_inverse(&p, e)).unwrap(), NCPoly::one(&p));
        assert!(!NCPoly::monomial_inverse(&p, e).in_plane());
    }

    #[test]
    fn param_mismatch() {
        let a = NCPoly::one(&params());
        let b = NCPoly::one(&NCParams::commutative());
        assert_eq!(a.mul(&b), Err(AlgebraError::ParamMismatch));
    }

    #[test]
    fn flux_is_inverse_q() {
        let p = params();
        for b in [LatticePoint::new(0, 0, 0), LatticePoint::new(-3, 2, 5)] {
            assert_eq!(face_flux(&p, b), p.q().recip());
        }
    }

    #[test]
    fn relabel_is_cyclic() {
        let p = params();
        assert_eq!(p.relabeled(Axis::X3), p);
        assert_eq!(p.relabeled(Axis::X1).q(), p.q());
        assert_eq!(p.relabeled(Axis::X1).relabeled(Axis::X1).relabeled(Axis::X1), p);
    }
}
