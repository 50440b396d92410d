use std::collections::BTreeSet;

use num_traits::{One, Zero};
use proptest::prelude::*;
use qdimer::lattice::{Axis, Domain, LatticePoint};
use qdimer::linalg::{determinant, inverse, kernel, rank};
use qdimer::ncalg::{cocycle, face_flux, NCParams, NCPoly};
use qdimer::sampler::Mcmc;
use qdimer::scalar::{format_scalar, int, parse_scalar, ratio, Scalar};

fn nonzero() -> impl Strategy<Value = Scalar> {
    (1i64..40, 1i64..40, any::<bool>()).prop_map(|(p, q, neg)| ratio(if neg { -p } else { p }, q))
}

fn params() -> impl Strategy<Value = NCParams> {
    (nonzero(), nonzero(), nonzero()).prop_map(|(a, b, c)| NCParams::new(a, b, c).unwrap())
}

fn point(r: i64) -> impl Strategy<Value = LatticePoint> {
    (-r..=r, -r..=r, -r..=r).prop_map(|(a, b, c)| LatticePoint::new(a, b, c))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<Scalar>>> {
    prop::collection::vec(prop::collection::vec((-3i64..=3).prop_map(int), cols), rows)
}

/// Leibniz expansion over all permutations.
fn leibniz(a: &[Vec<Scalar>]) -> Scalar {
    fn go(a: &[Vec<Scalar>], row: usize, used: &mut Vec<bool>, sign: i64) -> Scalar {
        if row == a.len() {
            return int(sign);
        }
        let mut total = Scalar::zero();
        let mut s = sign;
        for c in 0..a.len() {
            if used[c] {
                continue;
            }
            // Sign flips once per unused column passed over.
            if !a[row][c].is_zero() {
                used[c] = true;
                total += &a[row][c] * go(a, row + 1, used, s);
                used[c] = false;
            }
            s = -s;
        }
        total
    }
    go(a, 0, &mut vec![false; a.len()], 1)
}

fn times(a: &[Vec<Scalar>], v: &[Scalar]) -> Vec<Scalar> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

proptest! {
    #[test]
    fn determinant_matches_leibniz(n in 1usize..5, seed in matrix(4, 4)) {
        let a: Vec<Vec<Scalar>> = seed.iter().take(n).map(|r| r[..n].to_vec()).collect();
        let det = determinant(&a).unwrap();
        prop_assert_eq!(det, leibniz(&a));
    }

    #[test]
    fn rank_plus_nullity(rows in 1usize..5, cols in 1usize..6, seed in matrix(4, 5)) {
        let a: Vec<Vec<Scalar>> = seed.iter().take(rows).map(|r| r[..cols].to_vec()).collect();
        let ker = kernel(&a, cols);
        prop_assert_eq!(rank(&a, cols) + ker.len(), cols);
        for v in &ker {
            prop_assert!(times(&a, v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn inverse_is_two_sided(a in matrix(3, 3)) {
        prop_assume!(!leibniz(&a).is_zero());
        let inv = inverse(&a).unwrap();
        for i in 0..3 {
            let col: Vec<Scalar> = inv.iter().map(|r| r[i].clone()).collect();
            let e = times(&a, &col);
            for (j, x) in e.iter().enumerate() {
                prop_assert_eq!(x.clone(), if i == j { Scalar::one() } else { Scalar::zero() });
            }
        }
    }

    #[test]
    fn cocycle_identity(p in params(), a in point(3), b in point(3), c in point(3)) {
        prop_assert_eq!(
            cocycle(&a, &b, &p) * cocycle(&(a + b), &c, &p),
            cocycle(&b, &c, &p) * cocycle(&a, &(b + c), &p)
        );
    }

    #[test]
    fn monomial_product_is_associative(p in params(), a in point(2), b in point(2), c in point(2)) {
        let f = NCPoly::monomial(&p, a, int(1));
        let g = NCPoly::monomial(&p, b, int(2)).try_add(&NCPoly::monomial(&p, c, int(-1))).unwrap();
        let h = NCPoly::monomial(&p, c, ratio(1, 3));
        let left = f.mul(&g).unwrap().mul(&h).unwrap();
        let right = f.mul(&g.mul(&h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn variables_q_commute(p in params()) {
        for i in Axis::ALL {
            let j = i.next();
            let xi = NCPoly::var(&p, i);
            let xj = NCPoly::var(&p, j);
            prop_assert_eq!(xj.mul(&xi).unwrap(), xi.mul(&xj).unwrap().scale(&p.q_ij(i, j)));
        }
    }

    #[test]
    fn face_flux_is_inverse_q(p in params(), b in point(6)) {
        prop_assert_eq!(face_flux(&p, b), Scalar::one() / p.q());
    }

    #[test]
    fn scalar_text_round_trip(s in nonzero()) {
        prop_assert_eq!(parse_scalar(&format_scalar(&s)).unwrap(), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn chain_moves_volume_by_at_most_one(seed in any::<u64>(), q in 0.2f64..5.0, sides in (1i64..4, 1i64..4, 1i64..4)) {
        let d = Domain::hexagon(sides.0, sides.1, sides.2);
        let whites: BTreeSet<LatticePoint> = d.white.iter().copied().collect();
        let mut chain = Mcmc::new(&d, q, seed).unwrap();
        let mut prev = chain.volume();
        for _ in 0..200 {
            chain.step();
            let v = chain.volume();
            prop_assert!((v - prev).abs() <= 1);
            prop_assert!(v >= 0 && v <= sides.0 * sides.1 * sides.2);
            prev = v;
        }
        let t = chain.tiling();
        prop_assert_eq!(t.volume, chain.volume());
        let used: BTreeSet<LatticePoint> = t.edges.iter().map(|e| e.0).collect();
        prop_assert_eq!(used, whites);
        prop_assert_eq!(t.orientations().count(), d.black.len());
    }
}
