//! The graded left modules `Q = ker K` and `Q^w = ker K^w`, their minimal
//! presentations, boundary point modules, annihilators and boundary moves.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::kasteleyn::{GradedMap, KasteleynError};
use crate::lattice::{Axis, Color, Domain, LatticeError, LatticePoint, MonomialModule, MoveDirection};
use crate::linalg::{self, Subspace};
use crate::ncalg::{cocycle, NCParams, NCPoly};
use crate::scalar::{format_scalar, pow, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModError {
    #[error("K is not surjective in degree {degree}: rank {rank}, target dimension {target}")]
    SurjectivityFailed { degree: i64, rank: usize, target: usize },
    #[error("presentation deviates from the generic shape: {reason}")]
    NongenericQ { reason: String, data: Box<ResolutionData> },
    #[error("boundary decomposition mismatch in degree {degree}: recovered {recovered} of {expected} dimensions")]
    DecompositionMismatch { degree: i64, recovered: usize, expected: usize },
    #[error("no annihilating operator up to degree {max_degree}")]
    NotFound { max_degree: i64 },
    #[error("Hilbert function mismatch in degree {degree}: {actual} != {predicted}")]
    HilbertMismatch { degree: i64, actual: i64, predicted: i64 },
    #[error("degree {0} was not computed")]
    MissingDegree(i64),
    #[error("{0} is not a white triangle of the domain")]
    BadMarkedPoint(LatticePoint),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Kasteleyn(#[from] KasteleynError),
}

/// Monomials `x^u` of total degree `n`, `x1`-heavy first.
pub fn monomials(n: i64) -> Vec<LatticePoint> {
    let mut out = Vec::new();
    for u1 in (0..=n).rev() {
        for u2 in (0..=n - u1).rev() {
            out.push(LatticePoint::new(u1, u2, n - u1 - u2));
        }
    }
    out
}

/// Support of one degree with its index.
#[derive(Clone, Debug)]
pub struct Basis {
    pub degree: i64,
    pub points: Vec<LatticePoint>,
    pub index: HashMap<LatticePoint, usize>,
}

impl Basis {
    pub fn new(module: &MonomialModule, degree: i64) -> Basis {
        let points = module.support(degree);
        let index = points.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        Basis { degree, points, index }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `x^u . v` for `v` in `M_d`, landing in the basis `dst` of `M_{d+|u|}`.
pub fn act(params: &NCParams, u: &LatticePoint, src: &Basis, v: &[Scalar], dst: &Basis) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); dst.len()];
    for (p, c) in src.points.iter().zip(v) {
        if c.is_zero() {
            continue;
        }
        if let Some(&i) = dst.index.get(&(*u + *p)) {
            out[i] += c * cocycle(u, p, params);
        }
    }
    out
}

/// `f . v` for a homogeneous operator `f`.
pub fn act_poly(f: &NCPoly, src: &Basis, v: &[Scalar], dst: &Basis) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); dst.len()];
    for (u, c) in f.terms() {
        for (o, x) in out.iter_mut().zip(act(f.params(), u, src, v, dst)) {
            *o += c * x;
        }
    }
    out
}

/// One graded piece of a kernel module.
#[derive(Clone, Debug)]
pub struct KernelSlice {
    pub basis: Basis,
    pub vectors: Vec<Vec<Scalar>>,
    pub space: Subspace,
}

impl KernelSlice {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// `ker(K: M_d -> M_{d+1})`, optionally insisting that `K` is onto.
pub fn kernel_slice(module: &MonomialModule, params: &NCParams, d: i64, require_onto: bool) -> Result<KernelSlice, ModError> {
    let map = GradedMap::new(module, params, d);
    let basis = Basis::new(module, d);
    let (rank, vectors) = if map.rows() == 0 {
        (0, map.kernel())
    } else {
        let e = linalg::echelon(&map.dense_rows(), map.columns());
        let k = e
            .kernel_int()
            .into_iter()
            .map(|v| v.into_iter().map(Scalar::from_integer).collect())
            .collect();
        (e.rank(), k)
    };
    if require_onto && rank != map.rows() {
        return Err(ModError::SurjectivityFailed { degree: d, rank, target: map.rows() });
    }
    let space = Subspace::span(basis.len(), &vectors);
    Ok(KernelSlice { basis, vectors, space })
}

/// A graded kernel module computed on a range of degrees.
#[derive(Clone, Debug)]
pub struct KernelModule {
    pub module: MonomialModule,
    pub params: NCParams,
    pub marked: Option<LatticePoint>,
    pub degree_omega: usize,
    pub stable_range: usize,
    pub slices: BTreeMap<i64, KernelSlice>,
}

impl KernelModule {
    pub fn slice(&self, d: i64) -> Result<&KernelSlice, ModError> {
        self.slices.get(&d).ok_or(ModError::MissingDegree(d))
    }

    pub fn dim(&self, d: i64) -> Result<usize, ModError> {
        Ok(self.slice(d)?.dim())
    }

    pub fn max_degree(&self) -> i64 {
        self.slices.keys().next_back().copied().unwrap_or(-1)
    }

    /// Degree-0 generator of `Q^w`.
    pub fn marked_generator(&self) -> Result<&Vec<Scalar>, ModError> {
        let s = self.slice(0)?;
        s.vectors.first().ok_or(ModError::MissingDegree(0))
    }
}

pub fn build_q(domain: &Domain, params: &NCParams, max_d: i64) -> Result<KernelModule, ModError> {
    let module = domain.module();
    let mut slices = BTreeMap::new();
    for d in 0..=max_d {
        let onto = d <= domain.stable_range as i64;
        slices.insert(d, kernel_slice(&module, params, d, onto)?);
    }
    Ok(KernelModule {
        module,
        params: params.clone(),
        marked: None,
        degree_omega: domain.degree,
        stable_range: domain.stable_range,
        slices,
    })
}

/// Largest `s` up to the domain's stable range with `cone(w)` inside the support through degree `s + 1`.
pub fn marked_stable_range(domain: &Domain, w: LatticePoint) -> usize {
    let module = domain.module();
    let mut s = 0;
    for d in 1..=domain.stable_range as i64 {
        let inside = (0..=d + 1).all(|k| {
            crate::lattice::Triangle::new(w).points(k).iter().all(|p| module.contains(p))
        });
        if !inside {
            break;
        }
        s = d as usize;
    }
    s
}

/// White triangle with the largest marked stable range, nearest to the centroid on ties.
pub fn default_marked_point(domain: &Domain) -> Option<LatticePoint> {
    let n = domain.white.len().max(1) as i64;
    let c: [i64; 3] = std::array::from_fn(|i| domain.white.iter().map(|w| w.0[i]).sum::<i64>());
    let dist = |w: &LatticePoint| (0..3).map(|i| (n * w.0[i] - c[i]).pow(2)).sum::<i64>();
    domain
        .white
        .iter()
        .map(|w| (std::cmp::Reverse(marked_stable_range(domain, *w)), dist(w), *w))
        .min()
        .map(|(_, _, w)| w)
}

/// `Q^w` with its degree-0 generator checked against column `w` of `K^-1`.
pub fn build_qw(domain: &Domain, params: &NCParams, w: LatticePoint, max_d: i64) -> Result<KernelModule, ModError> {
    if w.degree() != 1 || !domain.white.contains(&w) {
        return Err(ModError::BadMarkedPoint(w));
    }
    let module = domain.module().punctured(w);
    let s = marked_stable_range(domain, w);
    let mut slices = BTreeMap::new();
    for d in 0..=max_d {
        slices.insert(d, kernel_slice(&module, params, d, d <= s as i64)?);
    }
    let g = &slices[&0].vectors;
    if g.len() != 1 {
        return Err(ModError::HilbertMismatch { degree: 0, actual: g.len() as i64, predicted: 1 });
    }
    // K g = e_w in M_1 pins the scale of the generator.
    let k0 = GradedMap::new(&domain.module(), params, 0);
    let image = k0.apply(&g[0]);
    let wi = k0.target_index[&w];
    let scale = image[wi].clone();
    if scale.is_zero() || image.iter().enumerate().any(|(i, v)| i != wi && !v.is_zero()) {
        return Err(ModError::Kasteleyn(KasteleynError::InverseCheck(
            "degree-0 generator of Q^w is not a multiple of K^-1 e_w".into(),
        )));
    }
    let g0: Vec<Scalar> = g[0].iter().map(|v| v / &scale).collect();
    let slice0 = slices.get_mut(&0).expect("degree 0 computed");
    slice0.vectors = vec![g0];
    Ok(KernelModule {
        module,
        params: params.clone(),
        marked: Some(w),
        degree_omega: domain.degree,
        stable_range: s,
        slices,
    })
}

/// `dim M_0 - D d(d-1)/2 - d ind K_0`.
pub fn predicted_dim_m(domain: &Domain, d: i64) -> i64 {
    let m0 = domain.black.len() as i64;
    m0 - domain.degree as i64 * d * (d - 1) / 2 - d * domain.index_k0()
}

/// `dim M_d`, checked against the predicted value for `d <= s + 1`.
pub fn hilbert_m(domain: &Domain, d: i64) -> Result<usize, ModError> {
    let actual = domain.module().dim(d);
    if d <= domain.stable_range as i64 + 1 {
        let predicted = predicted_dim_m(domain, d);
        if actual as i64 != predicted {
            return Err(ModError::HilbertMismatch { degree: d, actual: actual as i64, predicted });
        }
    }
    Ok(actual)
}

/// Minimal graded presentation data.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolutionData {
    /// Number of minimal generators per degree.
    pub generators: BTreeMap<i64, usize>,
    /// Number of minimal relations per degree.
    pub relations: BTreeMap<i64, usize>,
    /// Dimension of the syzygies among the relations, per degree.
    pub syzygies: BTreeMap<i64, usize>,
    pub generator_degrees: Vec<i64>,
    pub relation_degrees: Vec<i64>,
    /// Row `r` holds the coefficients of relation `r` on each generator.
    pub relation_matrix: Vec<Vec<NCPoly>>,
    pub max_degree: i64,
}

impl ResolutionData {
    pub fn summary(&self) -> String {
        let fmt = |m: &BTreeMap<i64, usize>| {
            let parts: Vec<String> = m.iter().filter(|(_, n)| **n > 0).map(|(d, n)| format!("{n} @ deg {d}")).collect();
            if parts.is_empty() {
                "none".to_string()
            } else {
                parts.join(", ")
            }
        };
        format!("generators: {}; relations: {}", fmt(&self.generators), fmt(&self.relations))
    }

    fn nonzero(m: &BTreeMap<i64, usize>) -> BTreeMap<i64, usize> {
        m.iter().filter(|(_, n)| **n > 0).map(|(d, n)| (*d, *n)).collect()
    }
}

/// Free-module basis element `x^u` times generator `g`.
type FreeBasis = Vec<(usize, LatticePoint)>;

fn free_basis(gen_degrees: &[i64], k: i64) -> FreeBasis {
    let mut out = Vec::new();
    for (g, &dg) in gen_degrees.iter().enumerate() {
        if dg <= k {
            for u in monomials(k - dg) {
                out.push((g, u));
            }
        }
    }
    out
}

/// `x^u` times a free-module element written on `from`, rewritten on `to`.
fn shift_free(params: &NCParams, u: &LatticePoint, v: &[Scalar], from: &FreeBasis, to: &HashMap<(usize, LatticePoint), usize>, len: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); len];
    for ((g, m), c) in from.iter().zip(v) {
        if c.is_zero() {
            continue;
        }
        let i = to[&(*g, *u + *m)];
        out[i] += c * cocycle(u, m, params);
    }
    out
}

/// Minimal generators, relations and relation syzygies through degree `hi`.
pub fn minimal_presentation(km: &KernelModule, hi: i64) -> Result<ResolutionData, ModError> {
    let params = &km.params;
    let lo = *km.slices.keys().next().ok_or(ModError::MissingDegree(0))?;
    let mut gen_degrees: Vec<i64> = Vec::new();
    let mut gen_vectors: Vec<Vec<Scalar>> = Vec::new();
    let mut generators = BTreeMap::new();
    let mut relations = BTreeMap::new();
    let mut syzygies = BTreeMap::new();
    let mut rel_reps: Vec<(i64, FreeBasis, Vec<Scalar>)> = Vec::new();
    let mut prev_rel: Vec<Vec<Scalar>> = Vec::new();
    let mut prev_free: FreeBasis = Vec::new();
    let e = Axis::ALL.map(LatticePoint::unit);
    for k in lo..=hi {
        let slice = km.slice(k)?;
        let dst = &slice.basis;
        // Image of A_1 N_{k-1}.
        let mut image = Vec::new();
        if k > lo {
            let prev = km.slice(k - 1)?;
            for v in &prev.vectors {
                for u in &e {
                    image.push(act(params, u, &prev.basis, v, dst));
                }
            }
        }
        let span = Subspace::span(dst.len(), &image);
        let fresh: Vec<Vec<Scalar>> = span.complement(&slice.vectors).into_iter().cloned().collect();
        generators.insert(k, fresh.len());
        for v in fresh {
            gen_degrees.push(k);
            gen_vectors.push(v);
        }
        // Relations: kernel of F_k -> N_k.
        let free = free_basis(&gen_degrees, k);
        let free_index: HashMap<(usize, LatticePoint), usize> = free.iter().enumerate().map(|(i, x)| (*x, i)).collect();
        let cols: Vec<Vec<Scalar>> = free
            .iter()
            .map(|(g, u)| {
                let src = km.slice(gen_degrees[*g])?;
                Ok(act(params, u, &src.basis, &gen_vectors[*g], dst))
            })
            .collect::<Result<_, ModError>>()?;
        let rel_basis: Vec<Vec<Scalar>> = if free.is_empty() {
            Vec::new()
        } else if dst.is_empty() {
            identity(free.len())
        } else {
            let rows: Vec<Vec<Scalar>> = (0..dst.len()).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
            linalg::kernel(&rows, free.len())
        };
        let induced: Vec<Vec<Scalar>> = prev_rel
            .iter()
            .flat_map(|r| e.iter().map(|u| shift_free(params, u, r, &prev_free, &free_index, free.len())).collect::<Vec<_>>())
            .collect();
        let ind = Subspace::span(free.len(), &induced);
        let new_rels: Vec<Vec<Scalar>> = ind.complement(&rel_basis).into_iter().cloned().collect();
        relations.insert(k, new_rels.len());
        for r in new_rels {
            rel_reps.push((k, free.clone(), r));
        }
        // Syzygies among the minimal relations in degree k.
        let mut syz_cols = Vec::new();
        for (dr, fb, r) in &rel_reps {
            for u in monomials(k - dr) {
                syz_cols.push(shift_free(params, &u, r, fb, &free_index, free.len()));
            }
        }
        let syz = syz_cols.len() - linalg::rank(&syz_cols, free.len());
        syzygies.insert(k, syz);
        prev_rel = rel_basis;
        prev_free = free;
    }
    let relation_matrix = rel_reps
        .iter()
        .map(|(_, fb, r)| {
            let mut row: Vec<NCPoly> = gen_degrees.iter().map(|_| NCPoly::zero(params)).collect();
            for ((g, u), c) in fb.iter().zip(r) {
                row[*g].add_term(*u, c.clone());
            }
            row
        })
        .collect();
    Ok(ResolutionData {
        generators,
        relations,
        syzygies,
        generator_degrees: gen_degrees,
        relation_degrees: rel_reps.iter().map(|(d, _, _)| *d).collect(),
        relation_matrix,
        max_degree: hi,
    })
}

fn identity(n: usize) -> Vec<Vec<Scalar>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect()).collect()
}

/// Presentation through degree `min(max_degree, s)`, checked against the generic shape:
/// `D` generators in degree 1 and `D` relations in degree 2 for `Q`, and
/// one generator in degree 0, `D - 1` in degree 1 and `D` relations in degree 2 for `Q^w`.
pub fn generators_relations(km: &KernelModule, max_degree: i64) -> Result<ResolutionData, ModError> {
    let hi = max_degree.min(km.stable_range as i64).min(km.max_degree());
    let data = minimal_presentation(km, hi)?;
    let d = km.degree_omega;
    let mut expect_gens = BTreeMap::new();
    let mut expect_rels = BTreeMap::new();
    match km.marked {
        None => {
            if hi >= 1 {
                expect_gens.insert(1, d);
            }
        }
        Some(_) => {
            expect_gens.insert(0, 1);
            if hi >= 1 && d > 1 {
                expect_gens.insert(1, d - 1);
            }
        }
    }
    if hi >= 2 {
        expect_rels.insert(2, d);
    }
    let gens = ResolutionData::nonzero(&data.generators);
    let rels = ResolutionData::nonzero(&data.relations);
    let syz = ResolutionData::nonzero(&data.syzygies);
    let reason = if gens != expect_gens {
        Some(format!("generators {gens:?}, expected {expect_gens:?}"))
    } else if rels != expect_rels {
        Some(format!("relations {rels:?}, expected {expect_rels:?}"))
    } else if !syz.is_empty() {
        Some(format!("syzygies among relations {syz:?}"))
    } else {
        None
    };
    match reason {
        Some(reason) => Err(ModError::NongenericQ { reason, data: Box::new(data) }),
        None => Ok(data),
    }
}

/// Parameter of one point module summand of `Q / x_k Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointModuleParam {
    pub axis: Axis,
    pub degree: i64,
    /// `mu` in `x_{k+1} + mu x_{k+2}` annihilating the summand in this degree.
    pub raw_ratio: Scalar,
    /// The degree twist `q_{k+2,k+1}^(d+1)`.
    pub twist: Scalar,
    /// `raw_ratio / twist`, equal to `q^a`.
    pub ratio: Scalar,
    /// `a`, when `q^a` determines it.
    pub height: Option<i64>,
    pub multiplicity: usize,
}

impl PointModuleParam {
    pub fn describe(&self) -> String {
        let h = self.height.map_or("?".to_string(), |h| h.to_string());
        format!(
            "axis {} degree {} height {} multiplicity {} ratio {} twist {}",
            self.axis,
            self.degree,
            h,
            self.multiplicity,
            format_scalar(&self.ratio),
            format_scalar(&self.twist)
        )
    }
}

fn twist(params: &NCParams, axis: Axis, d: i64) -> Scalar {
    let y1 = axis.next();
    let y2 = y1.next();
    pow(&params.q_ij(y2, y1), d + 1)
}

/// `x_{k+1} + mu x_{k+2}`.
pub fn line_operator(params: &NCParams, axis: Axis, mu: &Scalar) -> NCPoly {
    let y1 = axis.next();
    let y2 = y1.next();
    NCPoly::from_terms(params, [(LatticePoint::unit(y1), Scalar::one()), (LatticePoint::unit(y2), mu.clone())])
}

/// Decomposes `(Q / x_k Q)_d` by scanning `a` over the `x_k` range of the support.
pub fn boundary_decomposition(km: &KernelModule, axis: Axis, d: i64) -> Result<Vec<PointModuleParam>, ModError> {
    let params = &km.params;
    let prev = km.slice(d - 1)?;
    let cur = km.slice(d)?;
    let next = km.slice(d + 1)?;
    let xk = LatticePoint::unit(axis);
    let low: Vec<Vec<Scalar>> = prev.vectors.iter().map(|v| act(params, &xk, &prev.basis, v, &cur.basis)).collect();
    let reps: Vec<Vec<Scalar>> = Subspace::span(cur.basis.len(), &low).complement(&cur.vectors).into_iter().cloned().collect();
    let high: Vec<Vec<Scalar>> = cur.vectors.iter().map(|v| act(params, &xk, &cur.basis, v, &next.basis)).collect();
    let high = Subspace::span(next.basis.len(), &high);
    let q = params.q();
    let tw = twist(params, axis, d);
    let coords: Vec<i64> = cur.basis.points.iter().chain(&next.basis.points).map(|p| p.coord(axis)).collect();
    let (Some(&amin), Some(&amax)) = (coords.iter().min(), coords.iter().max()) else {
        return Ok(Vec::new());
    };
    let mut by_ratio: Vec<(Scalar, Vec<i64>)> = Vec::new();
    for a in (amin - 1)..=(amax + 1) {
        let r = pow(&q, a);
        match by_ratio.iter_mut().find(|(x, _)| *x == r) {
            Some((_, hs)) => hs.push(a),
            None => by_ratio.push((r, vec![a])),
        }
    }
    let mut out = Vec::new();
    let mut recovered = 0;
    for (ratio, heights) in by_ratio {
        let mu = &ratio * &tw;
        let op = line_operator(params, axis, &mu);
        let images: Vec<Vec<Scalar>> = reps.iter().map(|v| high.reduce(&act_poly(&op, &cur.basis, v, &next.basis))).collect();
        let drop = reps.len() - linalg::rank(&images, next.basis.len());
        if drop > 0 {
            recovered += drop;
            out.push(PointModuleParam {
                axis,
                degree: d,
                raw_ratio: mu,
                twist: tw.clone(),
                ratio,
                height: (heights.len() == 1).then(|| heights[0]),
                multiplicity: drop,
            });
        }
    }
    if recovered != reps.len() || reps.len() != km.degree_omega {
        return Err(ModError::DecompositionMismatch { degree: d, recovered, expected: km.degree_omega });
    }
    Ok(out)
}

/// Whether `x_k: Q_d -> Q_{d+1}` is injective.
pub fn check_x_injective(km: &KernelModule, axis: Axis, d: i64) -> Result<bool, ModError> {
    let cur = km.slice(d)?;
    let next = km.slice(d + 1)?;
    let xk = LatticePoint::unit(axis);
    let images: Vec<Vec<Scalar>> = cur.vectors.iter().map(|v| act(&km.params, &xk, &cur.basis, v, &next.basis)).collect();
    Ok(linalg::rank(&images, next.basis.len()) == cur.dim())
}

/// Operators of minimal degree annihilating the degree-0 generator of `Q^w`.
#[derive(Clone, Debug)]
pub struct Annihilator {
    pub degree: i64,
    pub operators: Vec<NCPoly>,
    /// Whether `degree` lies in the marked stable range, where `Q^w` has its generic Hilbert function.
    pub in_stable_range: bool,
}

pub fn annihilator(km: &KernelModule, max_i: i64) -> Result<Annihilator, ModError> {
    let g = km.marked_generator()?;
    let src = &km.slice(0)?.basis;
    for i in 0..=max_i {
        let dst = Basis::new(&km.module, i);
        let monos = monomials(i);
        let cols: Vec<Vec<Scalar>> = monos.iter().map(|u| act(&km.params, u, src, g, &dst)).collect();
        let kernel = if dst.is_empty() {
            identity(monos.len())
        } else {
            let rows: Vec<Vec<Scalar>> = (0..dst.len()).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
            linalg::kernel(&rows, monos.len())
        };
        if !kernel.is_empty() {
            let operators = kernel
                .iter()
                .map(|v| NCPoly::from_terms(&km.params, monos.iter().copied().zip(v.iter().cloned())))
                .collect();
            return Ok(Annihilator { degree: i, operators, in_stable_range: i <= km.stable_range as i64 });
        }
    }
    Err(ModError::NotFound { max_degree: max_i })
}

/// Checks `f . g = 0` at every point of the support in degree `deg f`.
pub fn annihilates(km: &KernelModule, f: &NCPoly) -> Result<bool, ModError> {
    let g = km.marked_generator()?;
    let src = &km.slice(0)?.basis;
    let Some(d) = f.degree() else { return Ok(f.is_zero()) };
    let dst = Basis::new(&km.module, d);
    Ok(linalg::is_zero_vec(&act_poly(f, src, g, &dst)))
}

/// `x^w (x1 + x2 + x3) x^-w`, a linear form of the plane.
pub fn conjugated_sum(params: &NCParams, w: LatticePoint) -> NCPoly {
    NCPoly::from_terms(
        params,
        Axis::ALL.map(|k| {
            let e = LatticePoint::unit(k);
            (e, cocycle(&w, &e, params) * cocycle(&(w + e), &(-w), params) / cocycle(&w, &(-w), params))
        }),
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineModuleReport {
    pub degrees: Vec<i64>,
    pub quotient_dims: Vec<usize>,
    pub line: String,
}

/// Verifies that `Q^w / Q` is the line module of `x^w (x1+x2+x3) x^-w` in degrees `1..=max_d`.
pub fn verify_line_module(qw: &KernelModule, q: &KernelModule, max_d: i64) -> Result<LineModuleReport, ModError> {
    let w = qw.marked.ok_or(ModError::BadMarkedPoint(LatticePoint::ZERO))?;
    let params = &qw.params;
    let l = conjugated_sum(params, w);
    let g = qw.marked_generator()?;
    let g_basis = &qw.slice(0)?.basis;
    let full_g_basis = Basis::new(&q.module, 0);
    let mut quotient_dims = Vec::new();
    let mut degrees = Vec::new();
    for d in 1..=max_d {
        let qd = q.slice(d)?;
        let qwd = qw.slice(d)?;
        // Restrict Q_d into M^w_d.
        let restricted: Vec<Vec<Scalar>> = qd
            .vectors
            .iter()
            .map(|v| qwd.basis.points.iter().map(|p| qd.basis.index.get(p).map_or(Scalar::zero(), |&i| v[i].clone())).collect())
            .collect();
        let sub = Subspace::span(qwd.basis.len(), &restricted);
        if sub.dim() != qd.dim() || !qwd.space.contains_space(&sub) {
            return Err(ModError::HilbertMismatch { degree: d, actual: sub.dim() as i64, predicted: qd.dim() as i64 });
        }
        let quotient = qwd.dim() - qd.dim();
        if quotient as i64 != d + 1 {
            return Err(ModError::HilbertMismatch { degree: d, actual: quotient as i64, predicted: d + 1 });
        }
        // ker(A_d -> Q^w_d / Q_d) must equal A_{d-1} l.
        let monos = monomials(d);
        let classes: Vec<Vec<Scalar>> = monos.iter().map(|u| sub.reduce(&act(params, u, g_basis, g, &qwd.basis))).collect();
        let rows: Vec<Vec<Scalar>> = (0..qwd.basis.len()).map(|r| classes.iter().map(|c| c[r].clone()).collect()).collect();
        let ker = Subspace::span(monos.len(), &linalg::kernel(&rows, monos.len()));
        let mono_index: HashMap<LatticePoint, usize> = monos.iter().enumerate().map(|(i, u)| (*u, i)).collect();
        let mut line_multiples = Vec::new();
        for u in monomials(d - 1) {
            let f = NCPoly::monomial(params, u, Scalar::one()).mul(&l).expect("same parameters");
            let mut v = vec![Scalar::zero(); monos.len()];
            for (e, c) in f.terms() {
                v[mono_index[e]] = c.clone();
            }
            line_multiples.push(v.clone());
            // (x^u l) g - x^u x^w lies in Q_d.
            let dst_full = Basis::new(&q.module, d);
            let mut h = act_poly(&f, &full_g_basis, &lift(g, g_basis, &full_g_basis), &dst_full);
            let xw = NCPoly::monomial(params, u, Scalar::one()).mul(&NCPoly::monomial(params, w, Scalar::one())).expect("same parameters");
            for (e, c) in xw.terms() {
                if let Some(&i) = dst_full.index.get(e) {
                    h[i] -= c;
                }
            }
            let k = GradedMap::new(&q.module, params, d);
            if !linalg::is_zero_vec(&k.apply(&h)) {
                return Err(ModError::HilbertMismatch { degree: d, actual: 1, predicted: 0 });
            }
        }
        let lm = Subspace::span(monos.len(), &line_multiples);
        if lm.dim() != ker.dim() || !ker.contains_space(&lm) {
            return Err(ModError::HilbertMismatch { degree: d, actual: ker.dim() as i64, predicted: lm.dim() as i64 });
        }
        degrees.push(d);
        quotient_dims.push(quotient);
    }
    Ok(LineModuleReport { degrees, quotient_dims, line: l.to_string() })
}

fn lift(v: &[Scalar], from: &Basis, to: &Basis) -> Vec<Scalar> {
    to.points.iter().map(|p| from.index.get(p).map_or(Scalar::zero(), |&i| v[i].clone())).collect()
}

/// Outcome of comparing `Q(Omega)` and `Q(Omega')` across one boundary move.
#[derive(Clone, Debug)]
pub struct MoveReport {
    pub segment: usize,
    pub color: Color,
    pub height: i64,
    pub quotient_dims: Vec<(i64, usize)>,
    pub params: Vec<PointModuleParam>,
    /// Empty when every check held.
    pub failures: Vec<String>,
}

impl MoveReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && !self.params.is_empty()
    }
}

/// Moves `segment` (white in, black out) and checks that `Q / Q'` is the point
/// module with ratio `q^a` in degrees `1..=max_d`.
///
/// For a black move `Q'` is the kernel on the enlarged domain restricted to the
/// old one, and the restriction must be injective.
pub fn verify_move(domain: &Domain, params: &NCParams, segment: usize, max_d: i64) -> Result<MoveReport, ModError> {
    let seg = domain.segment(segment)?.clone();
    let dir = match seg.color {
        Color::White => MoveDirection::In,
        Color::Black => MoveDirection::Out,
    };
    let other_module = domain.shift_boundary(segment, dir)?.module();
    let axis = seg.axis;
    let top = max_d.min(domain.stable_range as i64);
    let mut failures = Vec::new();
    let mut slices = BTreeMap::new();
    for d in 1..=top + 1 {
        let q = kernel_slice(&domain.module(), params, d, false)?;
        let other = kernel_slice(&other_module, params, d, false)?;
        let mapped: Vec<Vec<Scalar>> = other.vectors.iter().map(|v| lift(v, &other.basis, &q.basis)).collect();
        let sub = Subspace::span(q.basis.len(), &mapped);
        let ok = sub.dim() == other.dim() && q.space.contains_space(&sub);
        slices.insert(d, (q, sub, ok));
    }
    let mut quotient_dims = Vec::new();
    let mut point_params = Vec::new();
    for d in 1..=top {
        let (q, sub, ok) = &slices[&d];
        if !ok {
            failures.push(format!("degree {d}: Q' does not embed in Q"));
            continue;
        }
        let quotient = q.dim() - sub.dim();
        quotient_dims.push((d, quotient));
        if quotient != 1 {
            failures.push(format!("degree {d}: dim Q/Q' = {quotient}"));
            continue;
        }
        let (qn, subn, okn) = &slices[&(d + 1)];
        if !okn || qn.dim() - subn.dim() != 1 {
            // The ratio needs the next degree inside the stable range.
            continue;
        }
        let f = sub.complement(&q.vectors)[0].clone();
        let y1 = axis.next();
        let y2 = y1.next();
        let r1 = subn.reduce(&act(params, &LatticePoint::unit(y1), &q.basis, &f, &qn.basis));
        let r2 = subn.reduce(&act(params, &LatticePoint::unit(y2), &q.basis, &f, &qn.basis));
        let Some(i) = r2.iter().position(|x| !x.is_zero()) else {
            failures.push(format!("degree {d}: x_{} acts by zero on Q/Q'", y2.number()));
            continue;
        };
        let mu = -(&r1[i] / &r2[i]);
        if !r1.iter().zip(&r2).all(|(a, b)| (a + &mu * b).is_zero()) {
            failures.push(format!("degree {d}: no linear form annihilates Q/Q'"));
            continue;
        }
        let tw = twist(params, axis, d);
        let ratio = &mu / &tw;
        let expected = pow(&params.q(), seg.height);
        if ratio != expected {
            failures.push(format!("degree {d}: ratio {} differs from q^{}", format_scalar(&ratio), seg.height));
        }
        point_params.push(PointModuleParam {
            axis,
            degree: d,
            raw_ratio: mu,
            twist: tw,
            height: (ratio == expected).then_some(seg.height),
            ratio,
            multiplicity: 1,
        });
    }
    if point_params.is_empty() {
        failures.push("no degree had Q/Q' one-dimensional in two consecutive degrees".into());
    }
    Ok(MoveReport { segment, color: seg.color, height: seg.height, quotient_dims, params: point_params, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(0), vec![LatticePoint::ZERO]);
        assert_eq!(monomials(2).len(), 6);
        assert_eq!(monomials(3).len(), 10);
    }

    #[test]
    fn h222_kernel_dims() {
        let h = Domain::hexagon(2, 2, 2);
        let p = NCParams::gauge(ratio(3, 7)).unwrap();
        let q = build_q(&h, &p, 2).unwrap();
        assert_eq!((0..=2).map(|d| q.dim(d).unwrap()).collect::<Vec<_>>(), vec![0, 2, 4]);
        let w = LatticePoint::new(1, 1, -1);
        let qw = build_qw(&h, &p, w, 2).unwrap();
        assert_eq!(qw.stable_range, 1);
        assert_eq!((0..=2).map(|d| qw.dim(d).unwrap()).collect::<Vec<_>>(), vec![1, 4, 5]);
    }

    #[test]
    fn conjugated_sum_is_plain_sum_when_commutative() {
        let p = NCParams::commutative();
        let l = conjugated_sum(&p, LatticePoint::new(2, -1, 3));
        for k in Axis::ALL {
            assert_eq!(l.coeff(&LatticePoint::unit(k)), Scalar::one());
        }
    }
}
