//! Random tilings from the `q^volume` law: an exact sampler driven by the
//! inverse Kasteleyn matrix and a heat-bath Glauber chain on hexagon flips.

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::kasteleyn::{KasteleynError, KasteleynSystem};
use crate::lattice::{Axis, Domain, LatticeError, LatticePoint};
use crate::scalar::{to_f64, Scalar};
pub use crate::tiling::Tiling;
use crate::tiling::{FaceGraph, FaceState};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SamplerError {
    #[error("q must be positive, got {0}")]
    InvalidQ(String),
    #[error(transparent)]
    Kasteleyn(#[from] KasteleynError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Picks an index with exact rational probabilities summing to one.
fn choose_exact<R: Rng>(rng: &mut R, probs: &[Scalar]) -> usize {
    let den = probs.iter().fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
    let nums: Vec<BigInt> = probs.iter().map(|p| p.numer() * (&den / p.denom())).collect();
    let total: BigInt = nums.iter().sum();
    debug_assert_eq!(total, den, "conditional probabilities must sum to one");
    let r = rng.gen_bigint_range(&BigInt::zero(), &total);
    let mut acc = BigInt::zero();
    for (i, n) in nums.iter().enumerate() {
        acc += n;
        if r < acc {
            return i;
        }
    }
    nums.len() - 1
}

/// One exact sample by sequential conditioning over the white triangles.
pub fn sample_exact(sys: &KasteleynSystem, seed: u64) -> Result<Tiling, SamplerError> {
    sample_exact_stream(sys, seed, 0)
}

fn sample_exact_stream(sys: &KasteleynSystem, seed: u64, stream: u64) -> Result<Tiling, SamplerError> {
    let mut rng = rng_for(seed, stream);
    let k0 = &sys.k0;
    let n = k0.columns();
    let mut g = sys.inverse.clone();
    let mut alive = vec![true; n];
    let mut edges = Vec::with_capacity(n);
    for wi in 0..n {
        let w = k0.target[wi];
        let mut cands = Vec::new();
        let mut probs = Vec::new();
        for k in Axis::ALL {
            let b = w - LatticePoint::unit(k);
            let Some(&bi) = k0.source_index.get(&b) else { continue };
            if !alive[bi] {
                continue;
            }
            let p = k0.entry(&w, &b).expect("adjacent") * &g[bi][wi];
            if p.is_negative() {
                return Err(SamplerError::InvalidQ("negative conditional probability".into()));
            }
            if !p.is_zero() {
                cands.push(bi);
                probs.push(p);
            }
        }
        let b0 = cands[choose_exact(&mut rng, &probs)];
        edges.push((w, k0.source[b0]));
        alive[b0] = false;
        // Schur complement update of the remaining block.
        let pivot = g[b0][wi].clone();
        let row0: Vec<(usize, Scalar)> = ((wi + 1)..n)
            .filter(|&c| !g[b0][c].is_zero())
            .map(|c| (c, &g[b0][c] / &pivot))
            .collect();
        for (bi, row) in g.iter_mut().enumerate() {
            if !alive[bi] || row[wi].is_zero() {
                continue;
            }
            let f = row[wi].clone();
            for (c, v) in &row0 {
                row[*c] -= &f * v;
            }
        }
    }
    edges.sort_by_key(|e| e.1);
    let min_height = height_of(&sys.min_tiling.edges);
    let volume = height_of(&edges) - min_height;
    Ok(Tiling { edges, volume })
}

fn height_of(edges: &[(LatticePoint, LatticePoint)]) -> i64 {
    edges
        .iter()
        .filter(|(w, b)| *w - *b == LatticePoint::unit(Axis::X1))
        .map(|(_, b)| b.0[1])
        .sum()
}

/// `count` independent exact samples; sample `i` uses stream `i` of `seed`.
pub fn sample_exact_many(sys: &KasteleynSystem, count: usize, seed: u64) -> Result<Vec<Tiling>, SamplerError> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| sample_exact_stream(sys, seed, i))
        .collect()
}

/// Heat-bath chain: pick a face uniformly; if it can flip, put it in the
/// high state with probability `q / (1 + q)` and low otherwise.
#[derive(Clone, Debug)]
pub struct Mcmc {
    graph: FaceGraph,
    kinds: Vec<u8>,
    base_height: i64,
    height: i64,
    p_up: f64,
    rng: ChaCha8Rng,
}

impl Mcmc {
    pub fn new(domain: &Domain, q: f64, seed: u64) -> Result<Mcmc, SamplerError> {
        Self::with_stream(domain, q, seed, 0)
    }

    pub fn with_stream(domain: &Domain, q: f64, seed: u64, stream: u64) -> Result<Mcmc, SamplerError> {
        if !q.is_finite() || q <= 0.0 {
            return Err(SamplerError::InvalidQ(q.to_string()));
        }
        let graph = FaceGraph::new(domain);
        let kinds = graph.minimal()?;
        let base_height = graph.height(&kinds);
        Ok(Mcmc { height: base_height, base_height, kinds, graph, p_up: q / (1.0 + q), rng: rng_for(seed, stream) })
    }

    pub fn faces(&self) -> usize {
        self.graph.faces.len()
    }

    pub fn step(&mut self) {
        if self.graph.faces.is_empty() {
            return;
        }
        let f = self.rng.gen_range(0..self.graph.faces.len());
        let up = self.rng.gen::<f64>() < self.p_up;
        match (self.graph.state(&self.kinds, f), up) {
            (FaceState::Low, true) => {
                self.graph.set(&mut self.kinds, f, true);
                self.height += 1;
            }
            (FaceState::High, false) => {
                self.graph.set(&mut self.kinds, f, false);
                self.height -= 1;
            }
            _ => {}
        }
    }

    pub fn run(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
    }

    pub fn sweep(&mut self, sweeps: u64) {
        self.run(sweeps * self.faces().max(1) as u64);
    }

    pub fn volume(&self) -> i64 {
        self.height - self.base_height
    }

    /// Edge type index (0, 1, 2) of the tile covering each black, in domain order.
    pub fn kinds(&self) -> &[u8] {
        &self.kinds
    }

    pub fn tiling(&self) -> Tiling {
        self.graph.tiling(&self.kinds, self.base_height)
    }
}

/// Runs the chain for `steps` single-face updates from the minimal tiling.
pub fn sample_mcmc(domain: &Domain, q: f64, steps: u64, seed: u64) -> Result<Tiling, SamplerError> {
    let mut chain = Mcmc::new(domain, q, seed)?;
    chain.run(steps);
    Ok(chain.tiling())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    Mcmc,
}

#[derive(Clone, Debug)]
pub struct DensityConfig {
    pub method: Method,
    pub samples: u64,
    /// Chain burn-in in sweeps; `None` means ten sweeps per face.
    pub burnin_sweeps: Option<u64>,
    pub thin_sweeps: u64,
    pub chains: u64,
    pub seed: u64,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig { method: Method::Mcmc, samples: 100, burnin_sweeps: None, thin_sweeps: 1, chains: 1, seed: 0 }
    }
}

/// Per-black counts of the three tile orientations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityMap {
    pub blacks: Vec<LatticePoint>,
    pub counts: Vec<[u64; 3]>,
    pub samples: u64,
}

impl DensityMap {
    pub fn empty(blacks: Vec<LatticePoint>) -> DensityMap {
        let counts = vec![[0; 3]; blacks.len()];
        DensityMap { blacks, counts, samples: 0 }
    }

    pub fn record(&mut self, kinds: &[u8]) {
        for (c, &k) in self.counts.iter_mut().zip(kinds) {
            c[k as usize] += 1;
        }
        self.samples += 1;
    }

    pub fn record_tiling(&mut self, t: &Tiling) {
        let kinds: Vec<u8> = t
            .orientations()
            .map(|(_, a)| a.index() as u8)
            .collect();
        self.record(&kinds);
    }

    pub fn merge(&mut self, other: &DensityMap) {
        assert_eq!(self.blacks, other.blacks, "density maps of different domains");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for k in 0..3 {
                a[k] += b[k];
            }
        }
        self.samples += other.samples;
    }

    pub fn frequency(&self, black: usize, axis: Axis) -> f64 {
        if self.samples == 0 {
            return 0.0;
        }
        self.counts[black][axis.index()] as f64 / self.samples as f64
    }

    pub fn exact_frequency(&self, black: usize, axis: Axis) -> Scalar {
        Scalar::new(BigInt::from(self.counts[black][axis.index()]), BigInt::from(self.samples.max(1)))
    }
}

pub fn density_map(domain: &Domain, q: &Scalar, config: &DensityConfig) -> Result<DensityMap, SamplerError> {
    density_run(domain, q, config).map(|(map, _)| map)
}

/// Density map together with one representative tiling: the first exact
/// sample, or the final state of chain 0.
pub fn density_run(domain: &Domain, q: &Scalar, config: &DensityConfig) -> Result<(DensityMap, Tiling), SamplerError> {
    if !q.is_positive() {
        return Err(SamplerError::InvalidQ(crate::scalar::format_scalar(q)));
    }
    let mut map = DensityMap::empty(domain.black.clone());
    match config.method {
        Method::Exact => {
            let sys = crate::kasteleyn::invert_k(domain, &crate::ncalg::NCParams::gauge(q.clone()).expect("q > 0"))?;
            let samples = sample_exact_many(&sys, config.samples.max(1) as usize, config.seed)?;
            for t in &samples {
                map.record_tiling(t);
            }
            let first = samples.into_iter().next().expect("at least one sample");
            Ok((map, first))
        }
        Method::Mcmc => {
            let chains = config.chains.max(1);
            let qf = to_f64(q);
            let parts: Vec<(DensityMap, Tiling)> = (0..chains)
                .into_par_iter()
                .map(|c| {
                    let mut chain = Mcmc::with_stream(domain, qf, config.seed, c)?;
                    let burn = config.burnin_sweeps.unwrap_or(10 * chain.faces() as u64);
                    chain.sweep(burn);
                    let mut local = DensityMap::empty(domain.black.clone());
                    let share = config.samples / chains + u64::from(c < config.samples % chains);
                    for _ in 0..share {
                        chain.sweep(config.thin_sweeps);
                        local.record(chain.kinds());
                    }
                    Ok((local, chain.tiling()))
                })
                .collect::<Result<_, SamplerError>>()?;
            for (p, _) in &parts {
                map.merge(p);
            }
            let first = parts.into_iter().next().expect("at least one chain").1;
            Ok((map, first))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kasteleyn::invert_k;
    use crate::ncalg::NCParams;
    use crate::scalar::int;

    #[test]
    fn exact_samples_are_tilings() {
        let h = Domain::hexagon(2, 2, 2);
        let sys = invert_k(&h, &NCParams::gauge(int(2)).unwrap()).unwrap();
        for t in sample_exact_many(&sys, 20, 7).unwrap() {
            assert_eq!(t.edges.len(), 12);
            assert!((0..=8).contains(&t.volume));
        }
    }

    #[test]
    fn mcmc_is_deterministic_per_seed() {
        let h = Domain::hexagon(3, 3, 3);
        let a = sample_mcmc(&h, 1.5, 5000, 11).unwrap();
        let b = sample_mcmc(&h, 1.5, 5000, 11).unwrap();
        assert_eq!(a, b);
        assert!(sample_mcmc(&h, -1.0, 10, 0).is_err());
    }
}
