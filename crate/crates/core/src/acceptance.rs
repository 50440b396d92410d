//! End-to-end checks of the whole pipeline against brute-force oracles and
//! closed-form dimension counts. Each criterion reports PASS or FAIL with details.

use std::collections::HashMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::catalog;
use crate::kasteleyn::{edge_probability, invert_k, partition_function};
use crate::lattice::{Axis, Domain, LatticePoint};
use crate::modlab::{
    annihilator, boundary_decomposition, build_q, build_qw, check_x_injective, default_marked_point,
    generators_relations, hilbert_m, predicted_dim_m, verify_move, ModError,
};
use crate::ncalg::{face_flux, NCParams, NCPoly};
use crate::oracle;
use crate::render::{black_center, density_svg, screen, tiling_svg, Shading};
use crate::sampler::{density_run, sample_exact_many, DensityConfig, Mcmc, Method};
use crate::scalar::{format_scalar, int, pow, random_generic, ratio, Scalar};
use crate::tiling::{FaceGraph, FaceState};

#[derive(Clone, Debug)]
pub struct Settings {
    pub seed: u64,
    /// Where criterion 9 writes its pictures; nothing is written when `None`.
    pub out_dir: Option<PathBuf>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { seed: 2024, out_dir: None }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
}

impl Outcome {
    pub fn line(&self) -> String {
        let budget = self.budget.map_or(String::new(), |b| format!(" of {}s", b.as_secs()));
        format!(
            "criterion {} {}: {} ({:.2}s{budget})",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.elapsed.as_secs_f64()
        )
    }
}

/// Collects failures; a criterion passes when none was recorded.
struct Log {
    details: Vec<String>,
    failed: bool,
}

impl Log {
    fn new() -> Log {
        Log { details: Vec::new(), failed: false }
    }

    fn note(&mut self, s: String) {
        self.details.push(s);
    }

    fn check(&mut self, ok: bool, what: String) {
        if !ok {
            self.failed = true;
            self.details.push(format!("FAILED {what}"));
        }
    }

    fn error(&mut self, what: String) {
        self.failed = true;
        self.details.push(format!("ERROR {what}"));
    }
}

type Body = fn(&Settings, &mut Log);

pub const TITLES: [&str; 9] = [
    "partition function against enumeration",
    "flux around every face",
    "Hilbert functions of M, Q and Q^w",
    "minimal presentations of Q and Q^w",
    "boundary point modules and injectivity",
    "annihilators of the inverse Kasteleyn column",
    "boundary moves",
    "samplers against exact laws",
    "limit shape of H(40,40,40)",
];

const BUDGETS: [Option<u64>; 9] = [Some(30), Some(5), Some(120), None, None, Some(300), None, Some(180), None];

const BODIES: [Body; 9] = [c1, c2, c3, c4, c5, c6, c7, c8, c9];

/// Runs criterion `id` in `1..=9`.
pub fn run(id: u8, settings: &Settings) -> Outcome {
    assert!((1..=9).contains(&id), "criteria are numbered 1 to 9");
    let i = id as usize - 1;
    let mut log = Log::new();
    let start = Instant::now();
    BODIES[i](settings, &mut log);
    let elapsed = start.elapsed();
    let budget = BUDGETS[i].map(Duration::from_secs);
    if let Some(b) = budget {
        log.check(elapsed <= b, format!("runtime {:.2}s exceeds {}s", elapsed.as_secs_f64(), b.as_secs()));
    }
    Outcome { id, title: TITLES[i], passed: !log.failed, details: log.details, elapsed, budget }
}

pub fn run_all(settings: &Settings) -> Vec<Outcome> {
    (1..=9).map(|id| run(id, settings)).collect()
}

fn rng(settings: &Settings, criterion: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(settings.seed);
    r.set_stream(criterion);
    r
}

/// Random triple with `q = q12 q23 q31 != 1`.
fn random_params(r: &mut ChaCha8Rng) -> NCParams {
    loop {
        let p = NCParams::new(random_generic(r), random_generic(r), random_generic(r)).expect("nonzero");
        if !p.q().is_one() {
            return p;
        }
    }
}

fn suite() -> Vec<(String, Domain)> {
    let mut out: Vec<(String, Domain)> = [2, 3, 4].iter().map(|m| (format!("H({m},{m},{m})"), Domain::hexagon(*m, *m, *m))).collect();
    for name in ["u11a", "n11a"] {
        out.push((name.to_string(), catalog::named(name).expect("catalog domain")));
    }
    out
}

fn c1(_: &Settings, log: &mut Log) {
    let qs = [int(1), ratio(1, 2), int(2), ratio(5, 3)];
    let domains = [
        ("H(1,1,1)", Domain::hexagon(1, 1, 1)),
        ("H(2,1,1)", Domain::hexagon(2, 1, 1)),
        ("H(2,2,1)", Domain::hexagon(2, 2, 1)),
        ("H(2,2,2)", Domain::hexagon(2, 2, 2)),
        ("u4", catalog::named("u4").expect("catalog domain")),
    ];
    let u4 = &domains[4].1;
    let count = oracle::enumerate_tilings(u4, 201).len();
    log.check(u4.degree == 3 && count <= 200, format!("u4 has degree {} and {count} tilings", u4.degree));
    log.note(format!("u4: degree {}, {count} tilings", u4.degree));
    for (name, d) in &domains {
        for q in &qs {
            let brute = oracle::partition_function(d, q, 10_000);
            let params = NCParams::gauge(q.clone()).expect("q > 0");
            // A non-gauge triple with the same q.
            let skew = NCParams::new(ratio(3, 4), ratio(5, 2), q * ratio(8, 15)).expect("nonzero");
            for p in [params, skew] {
                match partition_function(d, &p) {
                    Ok(z) => log.check(z == brute, format!("{name} {p}: Z = {} but enumeration gives {}", format_scalar(&z), format_scalar(&brute))),
                    Err(e) => log.error(format!("{name} {p}: {e}")),
                }
            }
            log.note(format!("{name} q={}: Z = {}", format_scalar(q), format_scalar(&brute)));
        }
    }
    let h111 = partition_function(&domains[0].1, &NCParams::gauge(int(2)).expect("q > 0"));
    log.check(h111 == Ok(int(3)), "Z(H(1,1,1)) at q = 2 is 1 + q".into());
    let h222 = partition_function(&domains[3].1, &NCParams::commutative());
    log.check(h222 == Ok(int(20)), "Z(H(2,2,2)) at q = 1 is 20".into());
}

fn c2(settings: &Settings, log: &mut Log) {
    let mut r = rng(settings, 2);
    let h = Domain::hexagon(3, 3, 3);
    let g = FaceGraph::new(&h);
    let e12 = LatticePoint::new(1, 1, 0);
    for _ in 0..5 {
        let p = random_params(&mut r);
        let expected = p.q().recip();
        let bad = g.faces.iter().filter(|f| face_flux(&p, f.vertex - e12) != expected).count();
        log.check(bad == 0, format!("{p}: {bad} faces with flux other than 1/q"));
        log.note(format!("{p}: {} faces, flux 1/q = {}", g.faces.len(), format_scalar(&expected)));
    }
}

fn c3(settings: &Settings, log: &mut Log) {
    let mut r = rng(settings, 3);
    for (name, d) in suite() {
        let s = d.stable_range as i64;
        let deg = d.degree;
        for dd in 0..=s + 1 {
            if let Err(e) = hilbert_m(&d, dd) {
                log.error(format!("{name}: {e}"));
            }
        }
        let w = default_marked_point(&d).expect("domain has white triangles");
        for _ in 0..3 {
            let p = random_params(&mut r);
            let result = (|| -> Result<(), ModError> {
                let q = build_q(&d, &p, s)?;
                for k in 0..=s {
                    let dim = q.dim(k)?;
                    log.check(dim == k as usize * deg, format!("{name} {p}: dim Q_{k} = {dim}, expected {}", k as usize * deg));
                }
                let qw = build_qw(&d, &p, w, s)?;
                for k in 0..=qw.stable_range as i64 {
                    let dim = qw.dim(k)?;
                    let expected = (deg + 1) * k as usize + 1;
                    log.check(dim == expected, format!("{name} {p} w={w}: dim Q^w_{k} = {dim}, expected {expected}"));
                }
                log.note(format!("{name} {p}: s = {s}, w = {w}, s_w = {}", qw.stable_range));
                Ok(())
            })();
            if let Err(e) = result {
                log.error(format!("{name} {p}: {e}"));
            }
        }
        let dims: Vec<i64> = (0..=s + 1).map(|k| predicted_dim_m(&d, k)).collect();
        log.note(format!("{name}: dim M_d = {dims:?}"));
    }
}

fn c4(settings: &Settings, log: &mut Log) {
    let mut r = rng(settings, 4);
    for (name, d) in suite() {
        let s = d.stable_range as i64;
        let deg = d.degree;
        let w = default_marked_point(&d).expect("domain has white triangles");
        let p = random_params(&mut r);
        let generic = (|| -> Result<(), ModError> {
            let q = build_q(&d, &p, s)?;
            let rq = generators_relations(&q, 3)?;
            let qw = build_qw(&d, &p, w, s)?;
            let rw = generators_relations(&qw, 3)?;
            log.note(format!("{name} {p}: Q {}; Q^w {}", rq.summary(), rw.summary()));
            Ok(())
        })();
        if let Err(e) = generic {
            log.error(format!("{name} {p}: {e}"));
        }
        // At q_ij = 1 one more generator and one relation appear in degree 1.
        let c = NCParams::commutative();
        match build_qw(&d, &c, w, s).and_then(|qw| generators_relations(&qw, 3)) {
            Err(ModError::NongenericQ { data, .. }) => {
                let g1 = data.generators.get(&1).copied().unwrap_or(0);
                let r1 = data.relations.get(&1).copied().unwrap_or(0);
                log.check(g1 == deg && r1 == 1, format!("{name} q=1: {} degree-1 generators and {r1} degree-1 relations", g1));
                log.note(format!("{name} q=1: Q^w {}", data.summary()));
            }
            Ok(data) => log.check(false, format!("{name} q=1: Q^w has the generic shape {}", data.summary())),
            Err(e) => log.error(format!("{name} q=1: {e}")),
        }
    }
}

fn c5(settings: &Settings, log: &mut Log) {
    let mut r = rng(settings, 5);
    for (name, d) in suite() {
        let s = d.stable_range as i64;
        let p = random_params(&mut r);
        let q = match build_q(&d, &p, s) {
            Ok(q) => q,
            Err(e) => {
                log.error(format!("{name}: {e}"));
                continue;
            }
        };
        let degrees: Vec<i64> = (1..s).take(2).collect();
        log.check(!degrees.is_empty(), format!("{name}: no degree with Q_(d+1) in the stable range"));
        let expected = d.heights(Axis::X3);
        for &k in &degrees {
            match boundary_decomposition(&q, Axis::X3, k) {
                Ok(parts) => {
                    let mut heights: Vec<i64> = Vec::new();
                    for part in &parts {
                        let ok = part.raw_ratio == &part.ratio * &part.twist;
                        log.check(ok, format!("{name} d={k}: ratio is not q^a q21^(d+1)"));
                        match part.height {
                            Some(h) => {
                                let ok = part.ratio == pow(&p.q(), h);
                                log.check(ok, format!("{name} d={k}: ratio {} is not q^{h}", format_scalar(&part.ratio)));
                                heights.extend(std::iter::repeat_n(h, part.multiplicity));
                            }
                            None => log.check(false, format!("{name} d={k}: ambiguous height")),
                        }
                    }
                    heights.sort_unstable();
                    log.check(heights == expected, format!("{name} d={k}: heights {heights:?}, boundary {expected:?}"));
                    log.note(format!("{name} d={k}: heights {heights:?}"));
                }
                Err(e) => log.error(format!("{name} d={k}: {e}")),
            }
            for axis in Axis::ALL {
                match check_x_injective(&q, axis, k) {
                    Ok(ok) => log.check(ok, format!("{name}: {axis} is not injective on Q_{k}")),
                    Err(e) => log.error(format!("{name}: {e}")),
                }
            }
        }
    }
}

/// `f g` through the algebra multiplication, with `g` written as a polynomial.
fn column_product(f: &NCPoly, g: &[Scalar], points: &[LatticePoint]) -> NCPoly {
    let gp = NCPoly::from_terms(f.params(), points.iter().copied().zip(g.iter().cloned()));
    f.mul(&gp).expect("same parameters")
}

fn c6(settings: &Settings, log: &mut Log) {
    let mut r = rng(settings, 6);
    let p = random_params(&mut r);
    let w = LatticePoint::new(1, 1, -1);
    let mut degrees = Vec::new();
    for m in 2..=5 {
        let d = Domain::hexagon(m, m, m);
        let result = (|| -> Result<(), ModError> {
            let qw = build_qw(&d, &p, w, 0)?;
            let sw = qw.stable_range;
            let ann = annihilator(&qw, 4)?;
            let g = qw.marked_generator()?;
            let src = &qw.slice(0)?.basis.points;
            for f in &ann.operators {
                let prod = column_product(f, g, src);
                let bad = prod.terms().iter().filter(|(v, c)| qw.module.contains(v) && !c.is_zero()).count();
                log.check(!f.is_zero() && bad == 0, format!("H({m},{m},{m}): operator fails at {bad} points"));
            }
            log.note(format!(
                "H({m},{m},{m}): minimal degree {}, {} operators, marked stable range {sw}{}",
                ann.degree,
                ann.operators.len(),
                if ann.in_stable_range { "" } else { " (degree outside it)" }
            ));
            degrees.push(ann.degree);
            Ok(())
        })();
        if let Err(e) = result {
            log.error(format!("H({m},{m},{m}): {e}"));
        }
    }
    log.check(degrees.len() == 4 && degrees.iter().all(|&i| i == degrees[0] && i <= 4), format!("minimal degrees {degrees:?}"));
}

fn c7(settings: &Settings, log: &mut Log) {
    let mut r = rng(settings, 7);
    for name in ["hex2,2,2", "u11m"] {
        let d = catalog::named(name).expect("catalog domain");
        let p = NCParams::gauge(random_generic(&mut r)).expect("q > 0");
        for seg in d.segments_of(Axis::X3) {
            match verify_move(&d, &p, seg.id, d.stable_range as i64) {
                Ok(rep) => {
                    log.check(rep.passed(), format!("{name} segment {}: {:?}", seg.id, rep.failures));
                    log.note(format!(
                        "{name} segment {} ({}, height {}): dims {:?}, ratios {:?}",
                        seg.id,
                        seg.color,
                        seg.height,
                        rep.quotient_dims,
                        rep.params.iter().map(|x| format_scalar(&x.ratio)).collect::<Vec<_>>()
                    ));
                }
                Err(e) => log.error(format!("{name} segment {}: {e}", seg.id)),
            }
        }
    }
}

fn c8(settings: &Settings, log: &mut Log) {
    let h = Domain::hexagon(2, 2, 2);
    let edges: Vec<(LatticePoint, LatticePoint)> = h
        .black
        .iter()
        .flat_map(|b| Axis::ALL.map(|k| (*b + LatticePoint::unit(k), *b)))
        .filter(|(w, _)| h.white.contains(w))
        .collect();
    // (a) exact sampler against single-edge probabilities.
    let n = 10_000u64;
    for (i, q) in [ratio(1, 2), int(1), int(2)].into_iter().enumerate() {
        let result = (|| -> Result<(), String> {
            let sys = invert_k(&h, &NCParams::gauge(q.clone()).expect("q > 0")).map_err(|e| e.to_string())?;
            let samples = sample_exact_many(&sys, n as usize, settings.seed + i as u64).map_err(|e| e.to_string())?;
            let mut counts: HashMap<(LatticePoint, LatticePoint), u64> = HashMap::new();
            for t in &samples {
                for e in &t.edges {
                    *counts.entry(*e).or_default() += 1;
                }
            }
            let mut worst: f64 = 0.0;
            for e in &edges {
                let p = edge_probability(&sys, &[*e]).map_err(|e| e.to_string())?;
                let pf = crate::scalar::to_f64(&p);
                let f = counts.get(e).copied().unwrap_or(0) as f64 / n as f64;
                let sigma = (pf * (1.0 - pf) / n as f64).sqrt();
                let z = if sigma > 0.0 { (f - pf).abs() / sigma } else if f == pf { 0.0 } else { f64::INFINITY };
                worst = worst.max(z);
                log.check(z <= 3.0, format!("(a) q={} edge {} {}: frequency {f:.4}, probability {pf:.4}", format_scalar(&q), e.0, e.1));
            }
            log.note(format!("(a) q={}: {} edges, largest deviation {worst:.2} sigma", format_scalar(&q), edges.len()));
            Ok(())
        })();
        if let Err(e) = result {
            log.error(format!("(a) q={}: {e}", format_scalar(&q)));
        }
    }
    // (b) chain histogram against the enumerated law.
    let g = FaceGraph::new(&h);
    for (i, q) in [int(1), int(2)].into_iter().enumerate() {
        let law = oracle::tiling_law(&h, &q, 100);
        let index: HashMap<Vec<u8>, usize> = law.iter().enumerate().map(|(j, (m, _, _))| (g.kinds_from_edges(m), j)).collect();
        let probs: Vec<f64> = law.iter().map(|(_, _, p)| crate::scalar::to_f64(p)).collect();
        let mut chain = Mcmc::with_stream(&h, crate::scalar::to_f64(&q), settings.seed, 100 + i as u64).expect("valid q");
        chain.sweep(10 * chain.faces() as u64);
        let steps = 1_000_000u64;
        let mut hist = vec![0u64; law.len()];
        for _ in 0..steps {
            chain.step();
            hist[index[chain.kinds()]] += 1;
        }
        let tv: f64 = hist.iter().zip(&probs).map(|(c, p)| (*c as f64 / steps as f64 - p).abs()).sum::<f64>() / 2.0;
        log.check(tv < 0.02, format!("(b) q={}: total variation {tv:.4}", format_scalar(&q)));
        log.note(format!("(b) q={}: {} tilings, total variation {tv:.5}", format_scalar(&q), law.len()));
    }
    // (c) exact stationarity of the chain's transition matrix.
    for (name, d) in [("H(1,1,1)", Domain::hexagon(1, 1, 1)), ("H(2,1,1)", Domain::hexagon(2, 1, 1))] {
        for q in [ratio(1, 2), ratio(5, 3)] {
            let (rows_ok, stationary) = stationarity(&d, &q);
            log.check(rows_ok && stationary, format!("(c) {name} q={}: rows sum to one {rows_ok}, pi P = pi {stationary}", format_scalar(&q)));
            log.note(format!("(c) {name} q={}: pi P = pi exactly", format_scalar(&q)));
        }
    }
}

/// Transition matrix of the heat-bath chain in exact arithmetic; returns
/// whether rows are stochastic and whether the `q^V` law is stationary.
pub fn stationarity(d: &Domain, q: &Scalar) -> (bool, bool) {
    let g = FaceGraph::new(d);
    let law = oracle::tiling_law(d, q, 10_000);
    let states: Vec<Vec<u8>> = law.iter().map(|(m, _, _)| g.kinds_from_edges(m)).collect();
    let index: HashMap<&Vec<u8>, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let n = states.len();
    let f = Scalar::from_integer(g.faces.len().into());
    let up = q / (Scalar::one() + q);
    let down = Scalar::one() - &up;
    let mut p = vec![vec![Scalar::zero(); n]; n];
    for (i, s) in states.iter().enumerate() {
        for face in 0..g.faces.len() {
            for (high, w) in [(true, &up), (false, &down)] {
                let mut t = s.clone();
                match (g.state(s, face), high) {
                    (FaceState::Low, true) | (FaceState::High, false) => g.set(&mut t, face, high),
                    _ => {}
                }
                p[i][index[&t]] += w / &f;
            }
        }
    }
    let rows_ok = p.iter().all(|row| row.iter().sum::<Scalar>().is_one());
    let pi: Vec<&Scalar> = law.iter().map(|(_, _, x)| x).collect();
    let stationary = (0..n).all(|j| (0..n).map(|i| pi[i] * &p[i][j]).sum::<Scalar>() == *pi[j]);
    (rows_ok, stationary)
}

/// Corners of a region's outline: extreme vertices in six directions.
fn outline_corners(d: &Domain) -> Vec<(f64, f64)> {
    let pts: Vec<(f64, f64)> = d.black.iter().flat_map(|b| crate::render::black_corners(*b)).map(screen).collect();
    (0..6)
        .map(|k| {
            let a = std::f64::consts::PI / 3.0 * k as f64;
            let (c, s) = (a.cos(), a.sin());
            pts.iter().copied().fold((0.0, 0.0, f64::MIN), |best, (x, y)| {
                let v = x * c + y * s;
                if v > best.2 {
                    (x, y, v)
                } else {
                    best
                }
            })
        })
        .map(|(x, y, _)| (x, y))
        .collect()
}

fn c9(settings: &Settings, log: &mut Log) {
    let h = Domain::hexagon(40, 40, 40);
    let config = DensityConfig { method: Method::Mcmc, samples: 2000, burnin_sweeps: None, thin_sweeps: 20, chains: 4, seed: settings.seed };
    let (map, tiling) = match density_run(&h, &int(1), &config) {
        Ok(x) => x,
        Err(e) => {
            log.error(e.to_string());
            return;
        }
    };
    let centers: Vec<(f64, f64)> = h.black.iter().map(|b| black_center(*b)).collect();
    let dist = |i: usize, p: (f64, f64)| ((centers[i].0 - p.0).powi(2) + (centers[i].1 - p.1).powi(2)).sqrt();
    let mut worst_corner: f64 = 1.0;
    for c in outline_corners(&h) {
        let mut near: Vec<usize> = (0..h.black.len()).collect();
        near.sort_by(|&a, &b| dist(a, c).total_cmp(&dist(b, c)));
        for &i in near.iter().take(3) {
            let dominant = Axis::ALL.iter().map(|&k| map.frequency(i, k)).fold(0.0, f64::max);
            worst_corner = worst_corner.min(dominant);
            log.check(dominant > 0.99, format!("corner cell {}: dominant frequency {dominant:.4}", h.black[i]));
        }
    }
    let n = centers.len() as f64;
    let mid = (centers.iter().map(|c| c.0).sum::<f64>() / n, centers.iter().map(|c| c.1).sum::<f64>() / n);
    let center_cells: Vec<usize> = (0..h.black.len()).filter(|&i| dist(i, mid) <= 1.5).collect();
    log.check(!center_cells.is_empty(), "no centre cells".into());
    let mut range = (1.0f64, 0.0f64);
    for &i in &center_cells {
        for k in Axis::ALL {
            let f = map.frequency(i, k);
            range = (range.0.min(f), range.1.max(f));
            log.check((0.25..=0.42).contains(&f), format!("centre cell {} orientation {k}: frequency {f:.4}", h.black[i]));
        }
    }
    log.note(format!(
        "{} samples from {} chains, seed {}; corner cells >= {worst_corner:.4}; {} centre cells in [{:.3}, {:.3}]",
        map.samples,
        config.chains,
        settings.seed,
        center_cells.len(),
        range.0,
        range.1
    ));
    if let Some(dir) = &settings.out_dir {
        let title = format!("H(40,40,40) q=1 seed {}", settings.seed);
        let files = [
            ("h40_tiling.svg", tiling_svg(&tiling, &title)),
            ("h40_density.svg", density_svg(&map, Shading::Mix, &title)),
        ];
        for (file, body) in files {
            let path = dir.join(file);
            match std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, body)) {
                Ok(()) => log.note(format!("wrote {}", path.display())),
                Err(e) => log.error(format!("{}: {e}", path.display())),
            }
        }
    }
}
