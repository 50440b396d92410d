//! Kasteleyn computations and samplers against explicit enumeration.

use std::collections::BTreeSet;

use qdimer::catalog;
use qdimer::kasteleyn::{edge_probability, invert_k, partition_function};
use qdimer::lattice::{Domain, LatticePoint};
use qdimer::ncalg::NCParams;
use qdimer::oracle;
use qdimer::sampler::{sample_exact_many, Mcmc};
use qdimer::scalar::{int, ratio, Scalar};

const LIMIT: usize = 5000;

fn small_domains() -> Vec<(String, Domain)> {
    ["hex1,1,1", "hex2,1,1", "hex2,2,1", "hex2,2,2", "hex3,2,1", "u4"]
        .iter()
        .map(|n| (n.to_string(), catalog::named(n).unwrap()))
        .collect()
}

#[test]
fn partition_function_matches_enumeration() {
    for (name, d) in small_domains() {
        for q in [int(1), int(2), ratio(1, 3), ratio(-5, 7)] {
            let z = partition_function(&d, &NCParams::gauge(q.clone()).unwrap()).unwrap();
            assert_eq!(z, oracle::partition_function(&d, &q, LIMIT), "{name} q={q}");
        }
    }
}

#[test]
fn partition_function_depends_only_on_q() {
    let d = catalog::named("hex2,2,2").unwrap();
    let skew = NCParams::new(ratio(3, 2), ratio(-7, 5), ratio(11, 3)).unwrap();
    let z = partition_function(&d, &skew).unwrap();
    assert_eq!(z, oracle::partition_function(&d, &skew.q(), LIMIT));
}

#[test]
fn single_edge_probabilities_match_enumeration() {
    for (name, d) in small_domains() {
        let q = ratio(3, 2);
        let sys = invert_k(&d, &NCParams::gauge(q.clone()).unwrap()).unwrap();
        for &b in &d.black {
            for e in [[1, 0, 0], [0, 1, 0], [0, 0, 1]] {
                let w = b + LatticePoint(e);
                if !d.white.contains(&w) {
                    continue;
                }
                let edge = [(w, b)];
                assert_eq!(
                    edge_probability(&sys, &edge).unwrap(),
                    oracle::edge_probability(&d, &q, &edge, LIMIT),
                    "{name} edge {w} {b}"
                );
            }
        }
    }
}

#[test]
fn pair_probabilities_match_enumeration() {
    let d = catalog::named("hex2,2,2").unwrap();
    let q = ratio(2, 5);
    let sys = invert_k(&d, &NCParams::gauge(q.clone()).unwrap()).unwrap();
    let first = oracle::enumerate_tilings(&d, LIMIT).swap_remove(0);
    for i in 0..first.len() {
        for j in i + 1..first.len() {
            let pair = [first[i], first[j]];
            assert_eq!(edge_probability(&sys, &pair).unwrap(), oracle::edge_probability(&d, &q, &pair, LIMIT));
        }
    }
}

#[test]
fn samplers_are_deterministic() {
    let d = catalog::named("hex3,3,3").unwrap();
    let sys = invert_k(&d, &NCParams::gauge(int(2)).unwrap()).unwrap();
    assert_eq!(sample_exact_many(&sys, 5, 9).unwrap(), sample_exact_many(&sys, 5, 9).unwrap());
    assert_ne!(sample_exact_many(&sys, 5, 9).unwrap(), sample_exact_many(&sys, 5, 10).unwrap());
    let run = |seed| {
        let mut c = Mcmc::new(&d, 0.7, seed).unwrap();
        c.run(5000);
        c.tiling()
    };
    assert_eq!(run(3), run(3));
}

#[test]
fn flips_reach_every_tiling() {
    for name in ["hex2,2,2", "u4"] {
        let d = catalog::named(name).unwrap();
        let all: BTreeSet<_> = oracle::enumerate_tilings(&d, LIMIT).into_iter().collect();
        let mut seen = BTreeSet::new();
        let mut chain = Mcmc::new(&d, 1.0, 1).unwrap();
        for _ in 0..200_000 {
            chain.step();
            seen.insert(chain.tiling().edges);
            if seen.len() == all.len() {
                break;
            }
        }
        assert_eq!(seen, all, "{name}");
    }
}

#[test]
fn exact_sampler_volume_law() {
    // H(1,1,1): volume 1 with probability q / (1 + q).
    let d = catalog::named("hex1,1,1").unwrap();
    let q: Scalar = int(3);
    let sys = invert_k(&d, &NCParams::gauge(q).unwrap()).unwrap();
    let n = 4000;
    let ups = sample_exact_many(&sys, n, 4).unwrap().iter().filter(|t| t.volume == 1).count();
    let p = ups as f64 / n as f64;
    let sigma = (0.75f64 * 0.25 / n as f64).sqrt();
    assert!((p - 0.75).abs() < 4.0 * sigma, "frequency {p}");
}

#[test]
fn volume_of_enumerated_tilings() {
    // Plane partitions in a 2 x 2 x 2 box, counted by size.
    let d = catalog::named("hex2,2,2").unwrap();
    let mut by_volume: Vec<(i64, usize)> = oracle::volume_counts(&d, LIMIT).into_iter().collect();
    by_volume.sort_unstable();
    let min = by_volume[0].0;
    assert_eq!(by_volume.last().unwrap().0 - min, 8);
    let counts: Vec<usize> = by_volume.iter().map(|&(_, n)| n).collect();
    assert_eq!(counts, [1, 1, 3, 3, 4, 3, 3, 1, 1]);
}
