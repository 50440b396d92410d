//! Lattice triangles, monomial supports and polygonal domains.
//!
//! A point `v` of `Z^3` has degree `v1 + v2 + v3`. At level `d` the black
//! triangles are the support points of degree `d` and the white triangles
//! those of degree `d + 1`; black `b` and white `b + e_i` share an edge of
//! type `i`. The plane picture uses the skew coordinates
//! `X = v1 - v2`, `Y = 2 v3 - v1 - v2`, so type-3 edges are horizontal and
//! white triangles point up.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("domain has no A triangles")]
    Empty,
    #[error("triangle {0} has corner degree above 1")]
    DegenerateTriangle(LatticePoint),
    #[error("B triangle {0} is not contained in the union of the A triangles")]
    ContainmentViolated(LatticePoint),
    #[error("domain is not simply connected: {0}")]
    NotSimplyConnected(String),
    #[error("domain is not tileable: {white} white and {black} black triangles, maximum matching {matched}")]
    NotTileable { white: usize, black: usize, matched: usize },
    #[error("boundary slopes do not advance cyclically at segment {segment} (turn of {turn} degrees)")]
    SlopeCycleViolated { segment: usize, turn: i32 },
    #[error("unsupported boundary move: {0}")]
    UnsupportedMove(String),
    #[error("no boundary segment with id {0}")]
    NoSuchSegment(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LatticePoint(pub [i64; 3]);

impl LatticePoint {
    pub const ZERO: LatticePoint = LatticePoint([0, 0, 0]);

    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        LatticePoint([a, b, c])
    }

    pub fn unit(axis: Axis) -> Self {
        let mut v = [0; 3];
        v[axis.index()] = 1;
        LatticePoint(v)
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn coord(&self, axis: Axis) -> i64 {
        self.0[axis.index()]
    }

    /// Componentwise `self >= other`.
    pub fn dominates(&self, other: &LatticePoint) -> bool {
        (0..3).all(|i| self.0[i] >= other.0[i])
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    pub fn screen(&self) -> (i64, i64) {
        let [a, b, c] = self.0;
        (a - b, 2 * c - a - b)
    }

    pub fn join(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(std::array::from_fn(|i| self.0[i].max(other.0[i])))
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

impl Add for LatticePoint {
    type Output = LatticePoint;
    fn add(self, o: LatticePoint) -> LatticePoint {
        LatticePoint(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for LatticePoint {
    type Output = LatticePoint;
    fn sub(self, o: LatticePoint) -> LatticePoint {
        LatticePoint(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for LatticePoint {
    type Output = LatticePoint;
    fn neg(self) -> LatticePoint {
        LatticePoint(self.0.map(|x| -x))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X1, Axis::X2, Axis::X3];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i % 3]
    }

    /// Cyclic successor: 1 -> 2 -> 3 -> 1.
    pub fn next(self) -> Axis {
        Axis::from_index(self.index() + 1)
    }

    pub fn number(self) -> usize {
        self.index() + 1
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.number())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    White,
    Black,
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::White => "white",
            Color::Black => "black",
        })
    }
}

/// The cone `{v >= corner}` of order `1 - deg(corner)`; its degree-1 slice has
/// `order + 1` white triangles along each side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triangle {
    pub corner: LatticePoint,
}

impl Triangle {
    pub fn new(corner: LatticePoint) -> Self {
        Triangle { corner }
    }

    pub fn order(&self) -> i64 {
        1 - self.corner.degree()
    }

    pub fn contains(&self, v: &LatticePoint) -> bool {
        v.dominates(&self.corner)
    }

    /// Cone points of degree `d`, in increasing order.
    pub fn points(&self, d: i64) -> Vec<LatticePoint> {
        let n = d - self.corner.degree();
        let mut out = Vec::new();
        if n < 0 {
            return out;
        }
        for u1 in 0..=n {
            for u2 in 0..=n - u1 {
                out.push(self.corner + LatticePoint::new(u1, u2, n - u1 - u2));
            }
        }
        out.sort_unstable();
        out
    }
}

/// The monomial module spanned by `generators` modulo the cones of `relations`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialModule {
    pub generators: Vec<LatticePoint>,
    pub relations: Vec<LatticePoint>,
}

impl MonomialModule {
    pub fn contains(&self, v: &LatticePoint) -> bool {
        self.generators.iter().any(|a| v.dominates(a)) && !self.relations.iter().any(|b| v.dominates(b))
    }

    /// Sorted support in degree `d`.
    pub fn support(&self, d: i64) -> Vec<LatticePoint> {
        let mut set = BTreeSet::new();
        for a in &self.generators {
            for v in Triangle::new(*a).points(d) {
                if !self.relations.iter().any(|b| v.dominates(b)) {
                    set.insert(v);
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn dim(&self, d: i64) -> usize {
        self.support(d).len()
    }

    /// Quotient by the cone of `w`.
    pub fn punctured(&self, w: LatticePoint) -> MonomialModule {
        let mut relations = self.relations.clone();
        relations.push(w);
        MonomialModule { generators: self.generators.clone(), relations }
    }
}

/// A maximal straight run of boundary edges of one level region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySegment {
    pub id: usize,
    pub axis: Axis,
    pub color: Color,
    /// Counterclockwise direction in units of 60 degrees, 0 = pointing right.
    pub direction: u8,
    pub length: usize,
    /// The `axis` coordinate of the white triangles bordering the segment.
    pub height: i64,
    /// Triangles of the region along the segment, in walking order.
    pub inside: Vec<LatticePoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveDirection {
    In,
    Out,
}

/// Triangles of one level: black points of degree `d`, white of degree `d + 1`.
#[derive(Clone, Debug)]
pub struct Region {
    pub level: i64,
    pub black: BTreeSet<LatticePoint>,
    pub white: BTreeSet<LatticePoint>,
}

impl Region {
    pub fn of(module: &MonomialModule, level: i64) -> Region {
        Region {
            level,
            black: module.support(level).into_iter().collect(),
            white: module.support(level + 1).into_iter().collect(),
        }
    }

    /// Euler characteristic of the closed triangulated region.
    pub fn euler_characteristic(&self) -> i64 {
        let mut verts = BTreeSet::new();
        let mut edges = BTreeSet::new();
        for b in &self.black {
            for k in Axis::ALL {
                let (p, q) = black_edge(*b, k);
                verts.insert(p);
                edges.insert((*b + LatticePoint::unit(k), k));
                let _ = q;
            }
        }
        for w in &self.white {
            for k in Axis::ALL {
                let (p, _) = white_edge(*w, k);
                verts.insert(p);
                edges.insert((*w, k));
            }
        }
        verts.len() as i64 - edges.len() as i64 + (self.black.len() + self.white.len()) as i64
    }

    fn is_connected(&self) -> bool {
        let Some(start) = self.white.iter().next().copied() else {
            return self.black.is_empty();
        };
        let mut seen_w = BTreeSet::from([start]);
        let mut seen_b = BTreeSet::new();
        let mut queue = VecDeque::from([(start, Color::White)]);
        while let Some((v, c)) = queue.pop_front() {
            for k in Axis::ALL {
                let e = LatticePoint::unit(k);
                match c {
                    Color::White => {
                        let b = v - e;
                        if self.black.contains(&b) && seen_b.insert(b) {
                            queue.push_back((b, Color::Black));
                        }
                    }
                    Color::Black => {
                        let w = v + e;
                        if self.white.contains(&w) && seen_w.insert(w) {
                            queue.push_back((w, Color::White));
                        }
                    }
                }
            }
        }
        seen_w.len() == self.white.len() && seen_b.len() == self.black.len()
    }

    /// Counterclockwise boundary segments, starting at a corner after the
    /// lowest, leftmost boundary vertex.
    pub fn boundary(&self) -> Result<Vec<BoundarySegment>, LatticeError> {
        if self.white.is_empty() && self.black.is_empty() {
            return Err(LatticeError::NotSimplyConnected("empty region".into()));
        }
        if !self.is_connected() {
            return Err(LatticeError::NotSimplyConnected("region is disconnected".into()));
        }
        let chi = self.euler_characteristic();
        if chi != 1 {
            return Err(LatticeError::NotSimplyConnected(format!("Euler characteristic {chi}")));
        }
        let mut edges: Vec<Edge> = Vec::new();
        for b in &self.black {
            for k in Axis::ALL {
                if !self.white.contains(&(*b + LatticePoint::unit(k))) {
                    let (p, q) = black_edge(*b, k);
                    edges.push(Edge::oriented(p, q, *b, k, Color::Black));
                }
            }
        }
        for w in &self.white {
            for k in Axis::ALL {
                if !self.black.contains(&(*w - LatticePoint::unit(k))) {
                    let (p, q) = white_edge(*w, k);
                    edges.push(Edge::oriented(p, q, *w, k, Color::White));
                }
            }
        }
        let mut by_start: HashMap<LatticePoint, usize> = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            if by_start.insert(e.start, i).is_some() {
                return Err(LatticeError::NotSimplyConnected(format!(
                    "boundary touches itself at {}",
                    e.start
                )));
            }
        }
        let first = (0..edges.len())
            .min_by_key(|&i| {
                let (x, y) = edges[i].start.screen();
                (y, x)
            })
            .expect("nonempty boundary");
        let mut order = vec![first];
        let mut cur = first;
        loop {
            let next = *by_start.get(&edges[cur].end).ok_or_else(|| {
                LatticeError::NotSimplyConnected("open boundary".into())
            })?;
            if next == first {
                break;
            }
            order.push(next);
            cur = next;
        }
        if order.len() != edges.len() {
            return Err(LatticeError::NotSimplyConnected("several boundary components".into()));
        }
        // Rotate so that the walk starts at a corner.
        let n = order.len();
        let shift = (0..n)
            .find(|&i| edges[order[i]].dir != edges[order[(i + n - 1) % n]].dir)
            .unwrap_or(0);
        order.rotate_left(shift);
        let mut segments: Vec<BoundarySegment> = Vec::new();
        for &i in &order {
            let e = &edges[i];
            let height = match e.color {
                Color::White => e.triangle.coord(e.axis),
                Color::Black => e.triangle.coord(e.axis) + 1,
            };
            match segments.last_mut() {
                Some(s) if s.direction == e.dir => {
                    s.length += 1;
                    s.inside.push(e.triangle);
                }
                _ => segments.push(BoundarySegment {
                    id: segments.len(),
                    axis: e.axis,
                    color: e.color,
                    direction: e.dir,
                    length: 1,
                    height,
                    inside: vec![e.triangle],
                }),
            }
        }
        Ok(segments)
    }
}

struct Edge {
    start: LatticePoint,
    end: LatticePoint,
    triangle: LatticePoint,
    axis: Axis,
    color: Color,
    dir: u8,
}

impl Edge {
    /// Orients `p -> q` so that the triangle lies to the left.
    fn oriented(p: LatticePoint, q: LatticePoint, triangle: LatticePoint, axis: Axis, color: Color) -> Edge {
        let (px, py) = p.screen();
        let (qx, qy) = q.screen();
        let (cx, cy) = triangle.screen();
        let cross = (qx - px) * (cy - py) - (qy - py) * (cx - px);
        let (start, end) = if cross > 0 { (p, q) } else { (q, p) };
        Edge { start, end, triangle, axis, color, dir: direction_of(end - start) }
    }
}

fn direction_of(v: LatticePoint) -> u8 {
    match v.screen() {
        (2, 0) => 0,
        (1, 3) => 1,
        (-1, 3) => 2,
        (-2, 0) => 3,
        (-1, -3) => 4,
        (1, -3) => 5,
        other => panic!("not a lattice edge vector: {other:?}"),
    }
}

fn others(k: Axis) -> (LatticePoint, LatticePoint) {
    (LatticePoint::unit(k.next()), LatticePoint::unit(k.next().next()))
}

/// Endpoints of the type-`k` edge of black `b`.
fn black_edge(b: LatticePoint, k: Axis) -> (LatticePoint, LatticePoint) {
    let (ei, ej) = others(k);
    let ek = LatticePoint::unit(k);
    (b + ek + ei, b + ek + ej)
}

/// Endpoints of the type-`k` edge of white `w`.
fn white_edge(w: LatticePoint, k: Axis) -> (LatticePoint, LatticePoint) {
    let (ei, ej) = others(k);
    (w + ei, w + ej)
}

/// Turn between consecutive segment directions, in units of 60 degrees, in `0..6`.
fn turn(from: u8, to: u8) -> u8 {
    (to + 6 - from) % 6
}

fn check_slope_cycle(segments: &[BoundarySegment]) -> Result<(), LatticeError> {
    let n = segments.len();
    for i in 0..n {
        let t = turn(segments[i].direction, segments[(i + 1) % n].direction);
        if t != 1 && t != 4 {
            let degrees = if t <= 3 { 60 * t as i32 } else { 60 * t as i32 - 360 };
            return Err(LatticeError::SlopeCycleViolated { segment: segments[(i + 1) % n].id, turn: degrees });
        }
    }
    Ok(())
}

/// A simply connected region cut out by triangles `A` and `B`.
#[derive(Clone, Debug)]
pub struct Domain {
    pub a: Vec<Triangle>,
    pub b: Vec<Triangle>,
    pub black: Vec<LatticePoint>,
    pub white: Vec<LatticePoint>,
    pub segments: Vec<BoundarySegment>,
    /// Number of segments of each slope.
    pub degree: usize,
    pub stable_range: usize,
    pub tileable: bool,
}

impl Domain {
    /// Validates everything except tileability, which is recorded.
    pub fn relaxed(a: Vec<Triangle>, b: Vec<Triangle>) -> Result<Domain, LatticeError> {
        if a.is_empty() {
            return Err(LatticeError::Empty);
        }
        for t in a.iter().chain(&b) {
            if t.order() < 0 {
                return Err(LatticeError::DegenerateTriangle(t.corner));
            }
        }
        for t in &b {
            let inside = t.points(1).iter().all(|v| a.iter().any(|s| s.contains(v)));
            if !inside {
                return Err(LatticeError::ContainmentViolated(t.corner));
            }
        }
        let module = MonomialModule {
            generators: a.iter().map(|t| t.corner).collect(),
            relations: b.iter().map(|t| t.corner).collect(),
        };
        let region = Region::of(&module, 0);
        let segments = region.boundary()?;
        check_slope_cycle(&segments)?;
        let degree = segments.len() / 3;
        let black: Vec<_> = region.black.iter().copied().collect();
        let white: Vec<_> = region.white.iter().copied().collect();
        let tileable = black.len() == white.len() && maximum_matching(&black, &white).len() == black.len();
        let mut d = Domain { a, b, black, white, segments, degree, stable_range: 0, tileable };
        d.stable_range = d.compute_stable_range();
        Ok(d)
    }

    pub fn module(&self) -> MonomialModule {
        MonomialModule {
            generators: self.a.iter().map(|t| t.corner).collect(),
            relations: self.b.iter().map(|t| t.corner).collect(),
        }
    }

    pub fn region(&self, level: i64) -> Region {
        Region::of(&self.module(), level)
    }

    pub fn segment(&self, id: usize) -> Result<&BoundarySegment, LatticeError> {
        self.segments.get(id).ok_or(LatticeError::NoSuchSegment(id))
    }

    /// Segments of the given slope, in boundary order.
    pub fn segments_of(&self, axis: Axis) -> Vec<&BoundarySegment> {
        self.segments.iter().filter(|s| s.axis == axis).collect()
    }

    /// Heights of the boundary segments of slope `axis`.
    pub fn heights(&self, axis: Axis) -> Vec<i64> {
        let mut h: Vec<i64> = self.segments_of(axis).iter().map(|s| s.height).collect();
        h.sort_unstable();
        h
    }

    pub fn index_k0(&self) -> i64 {
        self.black.len() as i64 - self.white.len() as i64
    }

    /// Largest `s` such that every level region up to `s` has the boundary
    /// pattern of level 0 with white runs shortened and black runs lengthened
    /// by the level.
    fn compute_stable_range(&self) -> usize {
        let base: Vec<(u8, Color, usize)> =
            self.segments.iter().map(|s| (s.direction, s.color, s.length)).collect();
        let max_level = self
            .segments
            .iter()
            .filter(|s| s.color == Color::White)
            .map(|s| s.length)
            .min()
            .unwrap_or(0);
        let module = self.module();
        let mut s = 0;
        for i in 1..=max_level {
            let expected: Vec<(u8, usize)> = base
                .iter()
                .map(|&(dir, c, l)| (dir, if c == Color::White { l - i } else { l + i }))
                .filter(|&(_, l)| l > 0)
                .collect();
            let Ok(actual) = Region::of(&module, i as i64).boundary() else { break };
            let actual: Vec<(u8, usize)> = actual.iter().map(|s| (s.direction, s.length)).collect();
            if !cyclic_eq(&expected, &actual) {
                break;
            }
            s = i;
        }
        s
    }

    /// Moves one boundary segment by one lattice step: white runs inward, black runs outward.
    pub fn shift_boundary(&self, segment_id: usize, direction: MoveDirection) -> Result<Domain, LatticeError> {
        let seg = self.segment(segment_id)?.clone();
        let k = seg.axis;
        let ek = LatticePoint::unit(k);
        let mut a = self.a.clone();
        let mut b = self.b.clone();
        match (seg.color, direction) {
            (Color::White, MoveDirection::In) => {
                let strip: BTreeSet<LatticePoint> = seg.inside.iter().copied().collect();
                let mut moved = false;
                for t in a.iter_mut() {
                    if t.corner.coord(k) == seg.height && seg.inside.iter().any(|w| t.contains(w)) {
                        let old = *t;
                        t.corner = t.corner + ek;
                        moved = true;
                        // Cuts leaning on the moved side shrink to their intersection with the new face.
                        for c in b.iter_mut() {
                            if old.contains(&c.corner) && !t.contains(&c.corner) {
                                c.corner = c.corner.join(&t.corner);
                            }
                        }
                    }
                }
                if !moved {
                    return Err(LatticeError::UnsupportedMove("no A face carries the segment".into()));
                }
                b.retain(|t| t.order() >= 0);
                a.retain(|t| t.order() >= 0);
                let after = MonomialModule {
                    generators: a.iter().map(|t| t.corner).collect(),
                    relations: b.iter().map(|t| t.corner).collect(),
                };
                let removed: BTreeSet<LatticePoint> =
                    self.white.iter().filter(|w| !after.contains(w)).copied().collect();
                if removed != strip {
                    return Err(LatticeError::UnsupportedMove(format!(
                        "moving segment {segment_id} removes {} white triangles instead of the {} along it",
                        removed.len(),
                        strip.len()
                    )));
                }
            }
            (Color::Black, MoveDirection::Out) => {
                let strip: BTreeSet<LatticePoint> = seg.inside.iter().map(|&x| x + ek).collect();
                let mut moved = false;
                for t in b.iter_mut() {
                    if t.corner.coord(k) == seg.height && strip.iter().any(|w| t.contains(w)) {
                        t.corner = t.corner + ek;
                        moved = true;
                    }
                }
                if !moved {
                    return Err(LatticeError::UnsupportedMove("no B face carries the segment".into()));
                }
                b.retain(|t| t.order() >= 0);
                let after = MonomialModule {
                    generators: a.iter().map(|t| t.corner).collect(),
                    relations: b.iter().map(|t| t.corner).collect(),
                };
                let before: BTreeSet<LatticePoint> = self.white.iter().copied().collect();
                let added: BTreeSet<LatticePoint> =
                    after.support(1).into_iter().filter(|w| !before.contains(w)).collect();
                if added != strip {
                    return Err(LatticeError::UnsupportedMove(format!(
                        "moving segment {segment_id} adds {} white triangles instead of the {} along it",
                        added.len(),
                        strip.len()
                    )));
                }
            }
            (c, d) => {
                return Err(LatticeError::UnsupportedMove(format!("{c} segments cannot move {d:?}")));
            }
        }
        Domain::relaxed(a, b)
    }

    /// The hexagon with corner cuts `(c1, c2, c3)` from a triangle of side `c1 + c2 + c3`.
    ///
    /// Its sides have lengths `c1, c2, c3` in pairs; the horizontal sides have length `c3`.
    pub fn hexagon(c1: i64, c2: i64, c3: i64) -> Domain {
        let (a, b) = hexagon_triangles(c1, c2, c3);
        Domain::relaxed(a, b).expect("hexagons are valid domains")
    }
}

/// Triangles of the hexagon `H(c1, c2, c3)`, placed near the origin.
pub fn hexagon_triangles(c1: i64, c2: i64, c3: i64) -> (Vec<Triangle>, Vec<Triangle>) {
    let n = c1 + c2 + c3;
    let s = 2 - n;
    let base = s.div_euclid(3);
    let rem = s - 3 * base;
    let a = LatticePoint::new(base + (rem > 1) as i64, base + (rem > 0) as i64, base);
    let cuts = [c1, c2, c3];
    let b = Axis::ALL
        .iter()
        .zip(cuts)
        .filter(|(_, c)| *c > 0)
        .map(|(&k, c)| {
            let mut p = a;
            p.0[k.index()] += n - c;
            Triangle::new(p)
        })
        .collect();
    (vec![Triangle::new(a)], b)
}

/// Domain built from validated triangle lists; rejects non-tileable input.
pub fn build_domain(a: Vec<Triangle>, b: Vec<Triangle>) -> Result<Domain, LatticeError> {
    let d = Domain::relaxed(a, b)?;
    if !d.tileable {
        let matched = maximum_matching(&d.black, &d.white).len();
        return Err(LatticeError::NotTileable { white: d.white.len(), black: d.black.len(), matched });
    }
    Ok(d)
}

pub fn support(domain: &Domain, d: i64) -> Vec<LatticePoint> {
    domain.module().support(d)
}

pub fn boundary_segments(domain: &Domain) -> &[BoundarySegment] {
    &domain.segments
}

pub fn shift_boundary(domain: &Domain, segment_id: usize, direction: MoveDirection) -> Result<Domain, LatticeError> {
    domain.shift_boundary(segment_id, direction)
}

pub fn stable_range(domain: &Domain) -> usize {
    domain.stable_range
}

fn cyclic_eq<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    a.len() == b.len() && (a.is_empty() || (0..b.len()).any(|r| (0..a.len()).all(|i| a[i] == b[(i + r) % b.len()])))
}

/// Parses lines `A c1 c2 c3` and `B c1 c2 c3`; `#` starts a comment.
pub fn parse_domain(text: &str) -> Result<(Vec<Triangle>, Vec<Triangle>), LatticeError> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| LatticeError::Parse { line: no + 1, message };
        let mut parts = line.split_whitespace();
        let tag = parts.next().unwrap_or_default();
        let coords: Vec<i64> = parts
            .map(|p| p.parse::<i64>().map_err(|_| err(format!("bad coordinate {p:?}"))))
            .collect::<Result<_, _>>()?;
        if coords.len() != 3 {
            return Err(err(format!("expected 3 coordinates, found {}", coords.len())));
        }
        let t = Triangle::new(LatticePoint::new(coords[0], coords[1], coords[2]));
        match tag {
            "A" | "a" => a.push(t),
            "B" | "b" => b.push(t),
            other => return Err(err(format!("unknown tag {other:?}"))),
        }
    }
    Ok((a, b))
}

pub fn format_domain(a: &[Triangle], b: &[Triangle]) -> String {
    let mut out = String::new();
    for t in a {
        let [x, y, z] = t.corner.0;
        out.push_str(&format!("A {x} {y} {z}\n"));
    }
    for t in b {
        let [x, y, z] = t.corner.0;
        out.push_str(&format!("B {x} {y} {z}\n"));
    }
    out
}

/// Maximum matching between black `b` and white `b + e_i` by breadth-first augmenting paths.
///
/// Returns pairs `(black index, white index)`.
pub fn maximum_matching(black: &[LatticePoint], white: &[LatticePoint]) -> Vec<(usize, usize)> {
    let widx: HashMap<LatticePoint, usize> = white.iter().enumerate().map(|(i, w)| (*w, i)).collect();
    let adj: Vec<Vec<usize>> = black
        .iter()
        .map(|b| Axis::ALL.iter().filter_map(|&k| widx.get(&(*b + LatticePoint::unit(k))).copied()).collect())
        .collect();
    let mut mate_b = vec![usize::MAX; black.len()];
    let mut mate_w = vec![usize::MAX; white.len()];
    // Greedy start.
    for (bi, nbrs) in adj.iter().enumerate() {
        if let Some(&wi) = nbrs.iter().find(|&&wi| mate_w[wi] == usize::MAX) {
            mate_b[bi] = wi;
            mate_w[wi] = bi;
        }
    }
    for root in 0..black.len() {
        if mate_b[root] != usize::MAX {
            continue;
        }
        let mut parent_w: BTreeMap<usize, usize> = BTreeMap::new();
        let mut queue = VecDeque::from([root]);
        let mut found = None;
        'bfs: while let Some(bi) = queue.pop_front() {
            for &wi in &adj[bi] {
                if parent_w.contains_key(&wi) {
                    continue;
                }
                parent_w.insert(wi, bi);
                if mate_w[wi] == usize::MAX {
                    found = Some(wi);
                    break 'bfs;
                }
                queue.push_back(mate_w[wi]);
            }
        }
        let Some(mut wi) = found else { continue };
        loop {
            let bi = parent_w[&wi];
            let prev = mate_b[bi];
            mate_b[bi] = wi;
            mate_w[wi] = bi;
            if bi == root {
                break;
            }
            wi = prev;
        }
    }
    mate_b
        .iter()
        .enumerate()
        .filter(|(_, &w)| w != usize::MAX)
        .map(|(b, &w)| (b, w))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_sizes() {
        let t = Triangle::new(LatticePoint::new(-1, -1, 0));
        assert_eq!(t.order(), 3);
        assert_eq!(t.points(1).len(), 10);
        assert_eq!(t.points(0).len(), 6);
        assert!(t.points(-3).is_empty());
    }

    #[test]
    fn hexagon_222_shape() {
        let h = Domain::hexagon(2, 2, 2);
        assert_eq!(h.black.len(), 12);
        assert_eq!(h.white.len(), 12);
        assert_eq!(h.segments.len(), 6);
        assert_eq!(h.degree, 2);
        assert!(h.tileable);
        assert_eq!(h.stable_range, 2);
        for s in &h.segments {
            assert_eq!(s.length, 2);
        }
        let dims: Vec<usize> = (0..5).map(|d| h.module().dim(d)).collect();
        assert_eq!(dims, vec![12, 12, 10, 6, 3]);
    }

    #[test]
    fn single_triangle_is_not_generic() {
        let a = vec![Triangle::new(LatticePoint::new(0, 0, -1))];
        let err = Domain::relaxed(a, vec![]).unwrap_err();
        assert!(matches!(err, LatticeError::SlopeCycleViolated { .. }), "{err}");
    }

    #[test]
    fn containment_is_checked() {
        let (a, mut b) = hexagon_triangles(1, 1, 1);
        b.push(Triangle::new(LatticePoint::new(5, 5, -9)));
        assert!(matches!(build_domain(a, b), Err(LatticeError::ContainmentViolated(_))));
    }

    #[test]
    fn hexagon_sides_alternate_colors() {
        let h = Domain::hexagon(3, 2, 1);
        let lens: Vec<(Color, usize)> = h.segments.iter().map(|s| (s.color, s.length)).collect();
        for w in lens.windows(2) {
            assert_ne!(w[0].0, w[1].0);
        }
        let horiz = h.segments_of(Axis::X3);
        assert_eq!(horiz.len(), 2);
        assert!(horiz.iter().all(|s| s.length == 1));
    }

    #[test]
    fn horizontal_moves_change_one_strip() {
        let h = Domain::hexagon(2, 2, 2);
        for seg in h.segments_of(Axis::X3) {
            let (dir, db, dw) = match seg.color {
                Color::White => (MoveDirection::In, -3, -2),
                Color::Black => (MoveDirection::Out, 1, 2),
            };
            let moved = h.shift_boundary(seg.id, dir).unwrap();
            assert_eq!(moved.black.len() as i64 - h.black.len() as i64, db, "{:?}", seg.color);
            assert_eq!(moved.white.len() as i64 - h.white.len() as i64, dw, "{:?}", seg.color);
            assert_eq!(moved.index_k0(), -1);
        }
    }

    #[test]
    fn parse_round_trip() {
        let (a, b) = hexagon_triangles(2, 2, 2);
        let text = format!("# hexagon\n{}", format_domain(&a, &b));
        assert_eq!(parse_domain(&text).unwrap(), (a, b));
        assert!(matches!(parse_domain("C 1 2 3"), Err(LatticeError::Parse { line: 1, .. })));
    }
}
