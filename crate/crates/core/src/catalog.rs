//! Named test domains.

use crate::lattice::{Domain, LatticeError, LatticePoint, Triangle};

/// Corner of the big triangle whose level-0 slice has side `n`, near the origin.
fn base_corner(n: i64) -> LatticePoint {
    let s = 2 - n;
    LatticePoint::new(s / 3, s / 3, s - 2 * (s / 3))
}

/// Two triangles of side `n` offset by `t (e1 - e2)`, with a cut on each outer corner.
///
/// `cuts` are the remaining side lengths after cutting: left along `e2`,
/// right along `e1`, and the two tops along `e3`.
pub fn union_domain(n: i64, t: i64, cuts: [i64; 4]) -> Result<Domain, LatticeError> {
    let a1 = base_corner(n);
    let a2 = a1 + LatticePoint::new(t, -t, 0);
    let [left, right, top1, top2] = cuts;
    let b = vec![
        Triangle::new(a1 + LatticePoint::new(0, n - left, 0)),
        Triangle::new(a2 + LatticePoint::new(n - right, 0, 0)),
        Triangle::new(a1 + LatticePoint::new(0, 0, n - top1)),
        Triangle::new(a2 + LatticePoint::new(0, 0, n - top2)),
    ];
    Domain::relaxed(vec![Triangle::new(a1), Triangle::new(a2)], b)
}

/// A hexagon with a triangular notch cut from its bottom side at offset `x`.
///
/// `cuts` are the three corner cuts followed by the notch size.
pub fn notched_domain(cuts: [i64; 4], x: i64) -> Result<Domain, LatticeError> {
    let n: i64 = cuts.iter().sum();
    let a = base_corner(n);
    let y = n - cuts[3] - x;
    let b = vec![
        Triangle::new(a + LatticePoint::new(n - cuts[0], 0, 0)),
        Triangle::new(a + LatticePoint::new(0, n - cuts[1], 0)),
        Triangle::new(a + LatticePoint::new(0, 0, n - cuts[2])),
        Triangle::new(a + LatticePoint::new(x, y, 0)),
    ];
    Domain::relaxed(vec![Triangle::new(a)], b)
}

/// Names accepted by [`named`], besides `hexA,B,C`.
pub const NAMES: [&str; 4] = ["u4", "u11a", "u11m", "n11a"];

/// Built-in domains: `hexA,B,C` or one of [`NAMES`].
///
/// `u4` is a small three-slope domain, `u11a` and `n11a` have stable range 3,
/// and every horizontal segment of `u11m` can be moved.
pub fn named(name: &str) -> Option<Domain> {
    if let Some(rest) = name.strip_prefix("hex") {
        let c: Vec<i64> = rest.split(',').map(|p| p.trim().parse().ok()).collect::<Option<_>>()?;
        return match c[..] {
            [c1, c2, c3] if c1 >= 1 && c2 >= 1 && c3 >= 1 => Some(Domain::hexagon(c1, c2, c3)),
            _ => None,
        };
    }
    let d = match name {
        "u4" => union_domain(4, 2, [2, 2, 1, 1]),
        "u11a" => union_domain(11, 5, [7, 6, 1, 2]),
        "u11m" => union_domain(11, 6, [6, 6, 2, 3]),
        "n11a" => notched_domain([2, 2, 6, 1], 5),
        _ => return None,
    };
    Some(d.expect("catalog domains are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_shapes() {
        for (name, degree, s) in [("u4", 3, 0), ("u11a", 3, 3), ("u11m", 3, 2), ("n11a", 3, 3), ("hex2,2,2", 2, 2)] {
            let d = named(name).unwrap();
            assert_eq!((d.degree, d.stable_range), (degree, s), "{name}");
            assert!(d.tileable, "{name}");
        }
        assert!(named("hex1,x,2").is_none());
        assert!(named("nope").is_none());
    }
}
