use qdimer::catalog;
use qdimer::lattice::{format_domain, parse_domain, Axis, Domain, LatticePoint};
use qdimer::modlab::{
    annihilator, annihilates, boundary_decomposition, build_q, build_qw, check_x_injective, default_marked_point,
    generators_relations, hilbert_m, marked_stable_range, verify_move, ModError,
};
use qdimer::ncalg::NCParams;
use qdimer::scalar::{int, ratio};

fn skew() -> NCParams {
    NCParams::new(ratio(3, 2), ratio(-5, 7), int(4)).unwrap()
}

#[test]
fn kernel_dimensions_in_stable_range() {
    for name in ["hex2,2,2", "hex3,3,3", "hex3,2,2", "u11a", "n11a"] {
        let d = catalog::named(name).unwrap();
        let s = d.stable_range as i64;
        let q = build_q(&d, &skew(), s).unwrap();
        for k in 0..=s {
            assert_eq!(q.dim(k).unwrap(), k as usize * d.degree, "{name} d={k}");
        }
        for k in 0..=s + 1 {
            hilbert_m(&d, k).unwrap();
        }
    }
}

#[test]
fn punctured_kernel_dimensions() {
    for name in ["hex3,3,3", "u11a"] {
        let d = catalog::named(name).unwrap();
        let w = default_marked_point(&d).unwrap();
        let sw = marked_stable_range(&d, w) as i64;
        let qw = build_qw(&d, &skew(), w, sw).unwrap();
        assert_eq!(qw.stable_range as i64, sw);
        for k in 0..=sw {
            assert_eq!(qw.dim(k).unwrap(), (d.degree + 1) * k as usize + 1, "{name} d={k}");
        }
    }
}

#[test]
fn hexagon_marked_centre_range() {
    for m in 2..=4 {
        let d = Domain::hexagon(m, m, m);
        assert_eq!(marked_stable_range(&d, LatticePoint::new(1, 1, -1)), (m - 1) as usize);
    }
}

#[test]
fn generic_presentation_shape() {
    let d = catalog::named("hex2,2,2").unwrap();
    let q = build_q(&d, &skew(), 2).unwrap();
    let data = generators_relations(&q, 2).unwrap();
    assert_eq!(data.summary(), "generators: 2 @ deg 1; relations: 2 @ deg 2");
    assert_eq!(data.relation_matrix.len(), 2);
}

#[test]
fn presentation_jumps_at_q_one() {
    let d = catalog::named("hex3,3,3").unwrap();
    let w = LatticePoint::new(1, 1, -1);
    let qw = build_qw(&d, &NCParams::commutative(), w, 2).unwrap();
    match generators_relations(&qw, 2) {
        Err(ModError::NongenericQ { data, .. }) => {
            assert_eq!(data.generators.get(&1), Some(&d.degree));
            assert_eq!(data.relations.get(&1), Some(&1));
        }
        other => panic!("expected a nongeneric presentation, got {other:?}"),
    }
    let generic = build_qw(&d, &skew(), w, 2).unwrap();
    let data = generators_relations(&generic, 2).unwrap();
    assert_eq!(data.generators.get(&0), Some(&1));
    assert_eq!(data.generators.get(&1), Some(&(d.degree - 1)));
}

#[test]
fn boundary_heights_recovered() {
    for name in ["hex3,3,3", "n11a"] {
        let d = catalog::named(name).unwrap();
        let q = build_q(&d, &skew(), 2).unwrap();
        for axis in Axis::ALL {
            let parts = boundary_decomposition(&q, axis, 1).unwrap();
            let mut heights: Vec<i64> =
                parts.iter().flat_map(|p| std::iter::repeat_n(p.height.unwrap(), p.multiplicity)).collect();
            heights.sort_unstable();
            assert_eq!(heights, d.heights(axis), "{name} {axis}");
            assert!(check_x_injective(&q, axis, 1).unwrap());
        }
    }
}

#[test]
fn moves_on_movable_domain() {
    let d = catalog::named("u11m").unwrap();
    let params = NCParams::gauge(ratio(5, 3)).unwrap();
    for seg in d.segments_of(Axis::X3) {
        let rep = verify_move(&d, &params, seg.id, d.stable_range as i64).unwrap();
        assert!(rep.passed(), "segment {}: {:?}", seg.id, rep.failures);
    }
}

#[test]
fn annihilator_operators_kill_the_column() {
    let d = Domain::hexagon(2, 2, 2);
    let qw = build_qw(&d, &skew(), LatticePoint::new(1, 1, -1), 0).unwrap();
    let ann = annihilator(&qw, 3).unwrap();
    assert_eq!(ann.degree, 2);
    for f in &ann.operators {
        assert!(annihilates(&qw, f).unwrap());
    }
}

#[test]
fn domain_files_round_trip() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../domains");
    for name in ["hex111", "hex222", "hex333", "u4", "u11a", "u11m", "n11a"] {
        let text = std::fs::read_to_string(format!("{dir}/{name}.dom")).unwrap();
        let (a, b) = parse_domain(&text).unwrap();
        let d = Domain::relaxed(a, b).unwrap();
        assert!(d.tileable, "{name}");
        let (a2, b2) = parse_domain(&format_domain(&d.a, &d.b)).unwrap();
        assert_eq!((a2, b2), (d.a.clone(), d.b.clone()));
    }
}
