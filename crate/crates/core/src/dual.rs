//! Dual cube complexes of finite wallspaces.
//!
//! A 0-cube is an orientation: one chosen side per wall, with every two
//! chosen sides intersecting. Orientations are bitmasks over the wall list;
//! bit `i` is set when the orientation picks the side of wall `i` that does
//! not contain the base point, so the base point's own orientation is `0`.
//! Two 0-cubes span an edge when they differ on exactly one wall, and
//! higher cubes are the cliques of jointly flippable walls at a vertex.
//!
//! Walls are either affine hyperplanes cut down to an open box, or abstract
//! two-sided partitions of a finite point set. Both only need to answer
//! "do these two sides meet?", which is precomputed once per wallspace.

use std::collections::{BTreeSet, HashMap, VecDeque};

use itertools::Itertools;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exactlin::{self, int, RatVector, Rational};
use crate::sgnperm::{SgnPermError, SimplicialComplex};
use crate::walls::{GeometricWall, WallsError};

pub const MAX_WALLS: usize = 24;
pub const WALLS_FORMAT: &str = "cubecrys-walls/1";
pub const COMPLEX_FORMAT: &str = "cubecrys-complex/1";

pub type Orientation = u32;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum DualError {
    #[error("{walls} walls exceed the maximum of {MAX_WALLS}")]
    Size { walls: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("wall {index} does not split the window")]
    WallDoesNotSplit { index: usize },
    #[error("walls {first} and {second} coincide")]
    DuplicateWall { first: usize, second: usize },
    #[error("base point lies on wall {index}")]
    BasePointOnWall { index: usize },
    #[error("base point is not inside the window")]
    BasePointOutside,
    #[error("invalid wallspace: {0}")]
    Invalid(String),
    #[error("orientation {0} is not a 0-cube of the complex")]
    NotAZeroCube(String),
    #[error("flip graph is disconnected")]
    Disconnected,
    #[error("wall {first} separates x from both y and z")]
    Overlap { first: usize },
    #[error("walls {first} and {second} do not cross")]
    Crossing { first: usize, second: usize },
    #[error("malformed file: {0}")]
    Format(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Walls(#[from] WallsError),
    #[error(transparent)]
    SgnPerm(#[from] SgnPermError),
}

/// The open box `lower < x < upper`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lower: RatVector,
    pub upper: RatVector,
}

impl Window {
    pub fn cube(n: usize, lo: i64, hi: i64) -> Self {
        Window { lower: RatVector(vec![int(lo); n]), upper: RatVector(vec![int(hi); n]) }
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &RatVector) -> bool {
        x.len() == self.dimension() && (0..x.len()).all(|i| self.lower[i] < x[i] && x[i] < self.upper[i])
    }

    fn constraints(&self) -> Vec<Strict> {
        let n = self.dimension();
        (0..n)
            .flat_map(|i| {
                let unit = RatVector::unit(n, i);
                [
                    Strict { coeffs: unit.clone(), rhs: self.lower[i].clone() },
                    Strict { coeffs: -&unit, rhs: -self.upper[i].clone() },
                ]
            })
            .collect()
    }
}

/// `coeffs · x > rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Strict {
    coeffs: RatVector,
    rhs: Rational,
}

impl Strict {
    /// Positive rescaling so the first nonzero coefficient is `±1`.
    fn normalized(self) -> Strict {
        match self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            Some(k) => {
                let inv = Rational::from_integer(1.into()) / k;
                Strict { coeffs: self.coeffs.scale(&inv), rhs: self.rhs * inv }
            }
            None => self,
        }
    }
}

/// Fourier–Motzkin elimination for a system of strict inequalities.
fn strictly_feasible(mut system: Vec<Strict>, n: usize) -> bool {
    for k in (0..n).rev() {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for c in system {
            if c.coeffs[k].is_positive() {
                pos.push(c);
            } else if c.coeffs[k].is_negative() {
                neg.push(c);
            } else {
                rest.push(c);
            }
        }
        let mut next: BTreeSet<(Vec<String>, String)> = BTreeSet::new();
        let mut out = Vec::new();
        let mut push = |c: Strict, out: &mut Vec<Strict>| {
            let c = c.normalized();
            let key = (c.coeffs.iter().map(exactlin::format_rational).collect(), exactlin::format_rational(&c.rhs));
            if next.insert(key) {
                out.push(c);
            }
        };
        for c in rest {
            push(c, &mut out);
        }
        for (p, q) in pos.iter().cartesian_product(&neg) {
            let a = -q.coeffs[k].clone();
            let b = p.coeffs[k].clone();
            let coeffs = &p.coeffs.scale(&a) + &q.coeffs.scale(&b);
            let rhs = &p.rhs * &a + &q.rhs * &b;
            push(Strict { coeffs, rhs }, &mut out);
        }
        system = out;
    }
    system.iter().all(|c| c.rhs.is_negative())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometricWallspace {
    window: Window,
    walls: Vec<GeometricWall>,
    labels: Vec<String>,
    base_point: RatVector,
}

impl GeometricWallspace {
    pub fn new(window: Window, walls: Vec<GeometricWall>, base_point: RatVector) -> Result<Self, DualError> {
        let labels = (1..=walls.len()).map(|i| format!("w{i}")).collect();
        Self::with_labels(window, walls, labels, base_point)
    }

    pub fn with_labels(
        window: Window,
        walls: Vec<GeometricWall>,
        labels: Vec<String>,
        base_point: RatVector,
    ) -> Result<Self, DualError> {
        let n = window.dimension();
        if n == 0 || window.upper.len() != n {
            return Err(DualError::Dimension("window bounds must have equal positive length".into()));
        }
        if walls.len() > MAX_WALLS {
            return Err(DualError::Size { walls: walls.len() });
        }
        if labels.len() != walls.len() || labels.iter().collect::<BTreeSet<_>>().len() != labels.len() {
            return Err(DualError::Invalid("wall labels must be distinct, one per wall".into()));
        }
        if let Some(i) = walls.iter().position(|w| w.dimension() != n) {
            return Err(DualError::Dimension(format!("wall {i} is not in R^{n}")));
        }
        if base_point.len() != n {
            return Err(DualError::Dimension(format!("base point is not in R^{n}")));
        }
        if !window.contains(&base_point) {
            return Err(DualError::BasePointOutside);
        }
        if let Some((first, second)) = (0..walls.len()).tuple_combinations().find(|&(a, b)| walls[a] == walls[b]) {
            return Err(DualError::DuplicateWall { first, second });
        }
        if let Some(index) = walls.iter().position(|w| w.evaluate(&base_point).is_zero()) {
            return Err(DualError::BasePointOnWall { index });
        }
        let ws = GeometricWallspace { window, walls, labels, base_point };
        for i in 0..ws.walls.len() {
            if !(ws.sides_meet(&[(i, false)]) && ws.sides_meet(&[(i, true)])) {
                return Err(DualError::WallDoesNotSplit { index: i });
            }
        }
        Ok(ws)
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn walls(&self) -> &[GeometricWall] {
        &self.walls
    }

    pub fn base_point(&self) -> &RatVector {
        &self.base_point
    }

    pub fn dimension(&self) -> usize {
        self.window.dimension()
    }

    /// The open side of wall `i`: the base point's side when `far` is false.
    fn side(&self, i: usize, far: bool) -> Strict {
        let w = &self.walls[i];
        let base_positive = w.evaluate(&self.base_point).is_positive();
        let positive = base_positive != far;
        let (coeffs, rhs) = (w.normal().clone(), w.offset().clone());
        if positive {
            Strict { coeffs, rhs }
        } else {
            Strict { coeffs: -&coeffs, rhs: -rhs }
        }
    }

    fn sides_meet(&self, sides: &[(usize, bool)]) -> bool {
        let mut system = self.window.constraints();
        system.extend(sides.iter().map(|&(i, far)| self.side(i, far)));
        strictly_feasible(system, self.dimension())
    }

    /// Orientation of the region containing `x`, or `None` if `x` lies on a wall.
    pub fn orientation_of(&self, x: &RatVector) -> Option<Orientation> {
        let mut o = 0;
        for (i, w) in self.walls.iter().enumerate() {
            let v = w.evaluate(x);
            if v.is_zero() {
                return None;
            }
            if v.is_positive() != w.evaluate(&self.base_point).is_positive() {
                o |= 1 << i;
            }
        }
        Some(o)
    }
}

/// Walls given as two-sided partitions of a finite point set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractWallspace {
    points: Vec<String>,
    labels: Vec<String>,
    /// `far[w][p]` is true when point `p` is not on the base point's side of wall `w`.
    far: Vec<Vec<bool>>,
    base: usize,
}

impl AbstractWallspace {
    pub fn new(points: Vec<String>, labels: Vec<String>, far: Vec<Vec<bool>>, base: usize) -> Result<Self, DualError> {
        if far.len() > MAX_WALLS {
            return Err(DualError::Size { walls: far.len() });
        }
        if base >= points.len() {
            return Err(DualError::BasePointOutside);
        }
        if labels.len() != far.len() {
            return Err(DualError::Invalid("one label per wall is required".into()));
        }
        for (i, side) in far.iter().enumerate() {
            if side.len() != points.len() {
                return Err(DualError::Dimension(format!(
                    "wall {i} assigns {} of {} points",
                    side.len(),
                    points.len()
                )));
            }
            if side[base] {
                return Err(DualError::Invalid(format!("wall {i} puts the base point on its far side")));
            }
            if !side.iter().any(|&b| b) {
                return Err(DualError::WallDoesNotSplit { index: i });
            }
        }
        if let Some((first, second)) = (0..far.len()).tuple_combinations().find(|&(a, b)| far[a] == far[b]) {
            return Err(DualError::DuplicateWall { first, second });
        }
        Ok(AbstractWallspace { points, labels, far, base })
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn base(&self) -> usize {
        self.base
    }

    /// Points on the far side of wall `w`.
    pub fn far_side(&self, w: usize) -> Vec<usize> {
        (0..self.points.len()).filter(|&p| self.far[w][p]).collect()
    }

    fn sides_meet(&self, a: (usize, bool), b: (usize, bool)) -> bool {
        (0..self.points.len()).any(|p| self.far[a.0][p] == a.1 && self.far[b.0][p] == b.1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiniteWallspace {
    Geometric(GeometricWallspace),
    Abstract(AbstractWallspace),
}

impl FiniteWallspace {
    pub fn wall_count(&self) -> usize {
        match self {
            FiniteWallspace::Geometric(g) => g.walls.len(),
            FiniteWallspace::Abstract(a) => a.far.len(),
        }
    }

    pub fn labels(&self) -> &[String] {
        match self {
            FiniteWallspace::Geometric(g) => &g.labels,
            FiniteWallspace::Abstract(a) => &a.labels,
        }
    }

    /// Whether side `a` of one wall meets side `b` of another.
    pub fn sides_meet(&self, a: (usize, bool), b: (usize, bool)) -> bool {
        match self {
            FiniteWallspace::Geometric(g) => g.sides_meet(&[a, b]),
            FiniteWallspace::Abstract(s) => s.sides_meet(a, b),
        }
    }

    /// `table[i][j]` has bit `2 * si + sj` set when side `si` of wall `i`
    /// meets side `sj` of wall `j`.
    fn compatibility(&self) -> Vec<Vec<u8>> {
        let w = self.wall_count();
        let mut table = vec![vec![0b1111u8; w]; w];
        for (i, j) in (0..w).tuple_combinations() {
            let mut bits = 0u8;
            for (si, sj) in [(false, false), (false, true), (true, false), (true, true)] {
                if self.sides_meet((i, si), (j, sj)) {
                    bits |= 1 << (2 * si as u8 + sj as u8);
                }
            }
            table[i][j] = bits;
            table[j][i] = (bits & 0b1001) | ((bits & 0b0010) << 1) | ((bits & 0b0100) >> 1);
        }
        table
    }
}

fn bit(o: Orientation, i: usize) -> bool {
    o >> i & 1 == 1
}

/// Bitstring with character `i` giving wall `i`.
pub fn orientation_to_string(o: Orientation, walls: usize) -> String {
    (0..walls).map(|i| if bit(o, i) { '1' } else { '0' }).collect()
}

pub fn orientation_from_string(s: &str) -> Result<Orientation, DualError> {
    if s.len() > MAX_WALLS {
        return Err(DualError::Size { walls: s.len() });
    }
    s.chars().enumerate().try_fold(0, |acc, (i, ch)| match ch {
        '0' => Ok(acc),
        '1' => Ok(acc | 1 << i),
        _ => Err(DualError::Parse(format!("orientation {s:?} has {ch:?} at position {i}"))),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeComplex {
    walls: Vec<String>,
    zero_cubes: Vec<Orientation>,
    index: HashMap<Orientation, usize>,
    edges: Vec<(usize, usize)>,
    neighbours: Vec<Vec<usize>>,
}

impl CubeComplex {
    /// The complex whose 0-cubes are `zero_cubes` (sorted on construction)
    /// and whose edges join 0-cubes differing on exactly one wall.
    pub fn new(walls: Vec<String>, mut zero_cubes: Vec<Orientation>) -> Result<Self, DualError> {
        let w = walls.len();
        if w > MAX_WALLS {
            return Err(DualError::Size { walls: w });
        }
        if let Some(&o) = zero_cubes.iter().find(|&&o| w < 32 && o >> w != 0) {
            return Err(DualError::Invalid(format!("orientation {o:#b} uses more than {w} walls")));
        }
        zero_cubes.sort_unstable();
        if zero_cubes.windows(2).any(|p| p[0] == p[1]) {
            return Err(DualError::Invalid("repeated 0-cube".into()));
        }
        let index: HashMap<Orientation, usize> = zero_cubes.iter().enumerate().map(|(i, &o)| (o, i)).collect();
        let mut edges = Vec::new();
        let mut neighbours = vec![Vec::new(); zero_cubes.len()];
        for (a, &o) in zero_cubes.iter().enumerate() {
            for i in 0..w {
                if let Some(&b) = index.get(&(o ^ 1 << i)) {
                    neighbours[a].push(b);
                    if a < b {
                        edges.push((a, b));
                    }
                }
            }
        }
        edges.sort_unstable();
        Ok(CubeComplex { walls, zero_cubes, index, edges, neighbours })
    }

    pub fn wall_labels(&self) -> &[String] {
        &self.walls
    }

    pub fn wall_count(&self) -> usize {
        self.walls.len()
    }

    pub fn zero_cubes(&self) -> &[Orientation] {
        &self.zero_cubes
    }

    pub fn vertex_count(&self) -> usize {
        self.zero_cubes.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn contains(&self, o: Orientation) -> bool {
        self.index.contains_key(&o)
    }

    pub fn index_of(&self, o: Orientation) -> Option<usize> {
        self.index.get(&o).copied()
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.neighbours[v]
    }

    /// The wall dual to an edge.
    pub fn edge_wall(&self, (a, b): (usize, usize)) -> usize {
        (self.zero_cubes[a] ^ self.zero_cubes[b]).trailing_zeros() as usize
    }

    /// Walls dual to at least one edge.
    pub fn hyperplanes(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.edges.iter().map(|&e| self.edge_wall(e)).collect();
        set.into_iter().collect()
    }

    /// Breadth-first graph distances from `source`; `None` for unreachable 0-cubes.
    pub fn graph_distances(&self, source: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.vertex_count()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].expect("queued vertices have a distance");
            for &u in &self.neighbours[v] {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.zero_cubes.is_empty() || self.graph_distances(0).iter().all(Option::is_some)
    }

    fn require(&self, o: Orientation) -> Result<usize, DualError> {
        self.index_of(o).ok_or_else(|| DualError::NotAZeroCube(orientation_to_string(o, self.wall_count())))
    }

    pub fn to_file(&self) -> ComplexFile {
        ComplexFile {
            format: COMPLEX_FORMAT.to_string(),
            walls: self.walls.clone(),
            zero_cubes: self.zero_cubes.iter().map(|&o| orientation_to_string(o, self.wall_count())).collect(),
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    /// Rebuilds a complex and checks the listed edges against the 0-cubes.
    pub fn from_file(file: &ComplexFile) -> Result<Self, DualError> {
        if file.format != COMPLEX_FORMAT {
            return Err(DualError::Format(format!("expected format {COMPLEX_FORMAT:?}, found {:?}", file.format)));
        }
        let w = file.walls.len();
        let cubes = file
            .zero_cubes
            .iter()
            .map(|s| {
                if s.len() != w {
                    return Err(DualError::Format(format!("0-cube {s:?} does not have {w} entries")));
                }
                orientation_from_string(s)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let c = CubeComplex::new(file.walls.clone(), cubes)?;
        let listed: BTreeSet<(usize, usize)> = file
            .edges
            .iter()
            .map(|&[a, b]| {
                let (a, b) = (a.min(b), a.max(b));
                if b >= file.zero_cubes.len() {
                    return Err(DualError::Format(format!("edge [{a}, {b}] names a missing 0-cube")));
                }
                let oa = orientation_from_string(&file.zero_cubes[a])?;
                let ob = orientation_from_string(&file.zero_cubes[b])?;
                let (x, y) = (c.index[&oa], c.index[&ob]);
                Ok((x.min(y), x.max(y)))
            })
            .collect::<Result<_, DualError>>()?;
        if listed.into_iter().collect::<Vec<_>>() != c.edges {
            return Err(DualError::Format("edge list does not match the 0-cubes".into()));
        }
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub format: String,
    pub walls: Vec<String>,
    pub zero_cubes: Vec<String>,
    pub edges: Vec<[usize; 2]>,
}

impl ComplexFile {
    pub fn parse(text: &str) -> Result<Self, DualError> {
        serde_json::from_str(text).map_err(|e| DualError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("complex files serialize")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct RawWall {
    normal: RatVector,
    #[serde(with = "exactlin::serde_rational")]
    offset: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallspaceFile {
    pub format: String,
    pub dimension: usize,
    pub window: Window,
    walls: Vec<RawWall>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub base_point: RatVector,
}

impl WallspaceFile {
    pub fn parse(text: &str) -> Result<Self, DualError> {
        serde_json::from_str(text).map_err(|e| DualError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("wallspace files serialize")
    }

    pub fn from_wallspace(ws: &GeometricWallspace) -> Self {
        WallspaceFile {
            format: WALLS_FORMAT.to_string(),
            dimension: ws.dimension(),
            window: ws.window.clone(),
            walls: ws
                .walls
                .iter()
                .map(|w| RawWall { normal: w.normal().clone(), offset: w.offset().clone() })
                .collect(),
            labels: Some(ws.labels.clone()),
            base_point: ws.base_point.clone(),
        }
    }

    pub fn to_wallspace(&self) -> Result<GeometricWallspace, DualError> {
        if self.format != WALLS_FORMAT {
            return Err(DualError::Format(format!("expected format {WALLS_FORMAT:?}, found {:?}", self.format)));
        }
        if self.window.dimension() != self.dimension {
            return Err(DualError::Dimension(format!("window is not in R^{}", self.dimension)));
        }
        let walls = self
            .walls
            .iter()
            .map(|w| GeometricWall::new(w.normal.clone(), w.offset.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        match &self.labels {
            Some(labels) => {
                GeometricWallspace::with_labels(self.window.clone(), walls, labels.clone(), self.base_point.clone())
            }
            None => GeometricWallspace::new(self.window.clone(), walls, self.base_point.clone()),
        }
    }
}

/// 0-cubes by breadth-first wall flipping from the base orientation.
pub fn dual_complex(ws: &FiniteWallspace) -> Result<CubeComplex, DualError> {
    let w = ws.wall_count();
    if w > MAX_WALLS {
        return Err(DualError::Size { walls: w });
    }
    let compat = ws.compatibility();
    let flippable = |o: Orientation, i: usize| {
        let si = !bit(o, i);
        (0..w).filter(|&j| j != i).all(|j| compat[i][j] >> (2 * si as u8 + bit(o, j) as u8) & 1 == 1)
    };
    let mut seen: BTreeSet<Orientation> = BTreeSet::from([0]);
    let mut queue = VecDeque::from([0]);
    while let Some(o) = queue.pop_front() {
        for i in 0..w {
            let next = o ^ 1 << i;
            if !seen.contains(&next) && flippable(o, i) {
                seen.insert(next);
                queue.push_back(next);
            }
        }
    }
    let c = CubeComplex::new(ws.labels().to_vec(), seen.into_iter().collect())?;
    if c.hyperplanes().len() != w {
        return Err(DualError::Disconnected);
    }
    Ok(c)
}

pub fn distance(c: &CubeComplex, x: Orientation, y: Orientation) -> Result<u32, DualError> {
    c.require(x)?;
    c.require(y)?;
    Ok((x ^ y).count_ones())
}

pub fn majority(x: Orientation, y: Orientation, z: Orientation) -> Orientation {
    (x & y) | (y & z) | (x & z)
}

pub fn median(c: &CubeComplex, x: Orientation, y: Orientation, z: Orientation) -> Result<Orientation, DualError> {
    for o in [x, y, z] {
        c.require(o)?;
    }
    let m = majority(x, y, z);
    c.require(m)?;
    Ok(m)
}

/// Whether Hamming distance equals graph distance for every pair of
/// 0-cubes, returning the distance table when it does.
fn isometric_distances(c: &CubeComplex) -> Result<(), Vec<Vec<Option<u32>>>> {
    let mut table = Vec::with_capacity(c.vertex_count());
    let mut isometric = true;
    for v in 0..c.vertex_count() {
        let d = c.graph_distances(v);
        if isometric {
            isometric =
                d.iter().zip(c.zero_cubes()).all(|(dist, &o)| *dist == Some((o ^ c.zero_cubes[v]).count_ones()));
        }
        table.push(d);
    }
    if isometric {
        Ok(())
    } else {
        Err(table)
    }
}

/// Whether the 0-cube set is closed under majority vote.
///
/// Sets closed under majority are exactly the solution sets of 2-SAT
/// formulas, so the set is closed iff it has as many elements as the 2-SAT
/// formula given by its own two-wall projections has solutions.
fn median_closed(c: &CubeComplex) -> bool {
    let w = c.wall_count();
    let cubes = c.zero_cubes();
    if cubes.is_empty() {
        return true;
    }
    let mut unary = vec![0u8; w];
    let mut pair = vec![vec![0u8; w]; w];
    for &o in cubes {
        for (i, row) in pair.iter_mut().enumerate() {
            unary[i] |= 1 << bit(o, i) as u8;
            for (j, cell) in row.iter_mut().enumerate() {
                *cell |= 1 << (2 * bit(o, i) as u8 + bit(o, j) as u8);
            }
        }
    }
    let limit = cubes.len();
    let mut count = 0usize;
    let mut stack: Vec<(usize, Orientation)> = vec![(0, 0)];
    while let Some((depth, o)) = stack.pop() {
        if depth == w {
            count += 1;
            if count > limit {
                return false;
            }
            continue;
        }
        for value in [false, true] {
            if unary[depth] >> value as u8 & 1 == 0 {
                continue;
            }
            let ok = (0..depth).all(|j| pair[j][depth] >> (2 * bit(o, j) as u8 + value as u8) & 1 == 1);
            if ok {
                stack.push((depth + 1, o | (value as Orientation) << depth));
            }
        }
    }
    count == limit
}

/// Whether every triple of 0-cubes has its majority vote among the 0-cubes,
/// lying on a graph geodesic between each pair.
pub fn is_median_graph(c: &CubeComplex) -> bool {
    if !c.is_connected() {
        return false;
    }
    match isometric_distances(c) {
        Ok(()) => median_closed(c),
        Err(table) => {
            let cubes = c.zero_cubes();
            let d = |a: usize, b: usize| table[a][b].expect("connected");
            (0..cubes.len()).tuple_combinations().all(|(x, y, z)| {
                match c.index_of(majority(cubes[x], cubes[y], cubes[z])) {
                    None => false,
                    Some(m) => {
                        d(x, m) + d(m, y) == d(x, y) && d(y, m) + d(m, z) == d(y, z) && d(x, m) + d(m, z) == d(x, z)
                    }
                }
            })
        }
    }
}

/// One abstract wall per hyperplane, splitting the 0-cubes by their side;
/// the base point is the first 0-cube.
pub fn hyperplane_wallspace(c: &CubeComplex) -> Result<AbstractWallspace, DualError> {
    let cubes = c.zero_cubes();
    let base = *cubes.first().ok_or_else(|| DualError::Invalid("complex has no 0-cubes".into()))?;
    let hyperplanes = c.hyperplanes();
    let points = cubes.iter().map(|&o| orientation_to_string(o, c.wall_count())).collect();
    let labels = hyperplanes.iter().map(|&h| c.walls[h].clone()).collect();
    let far = hyperplanes.iter().map(|&h| cubes.iter().map(|&o| bit(o ^ base, h)).collect()).collect();
    AbstractWallspace::new(points, labels, far, 0)
}

/// Whether dualizing the hyperplane wallspace gives back the complex, with
/// the 0-cube `v` matched to its hyperplane sides relative to the base.
pub fn duality_check(c: &CubeComplex) -> bool {
    let Ok(ws) = hyperplane_wallspace(c) else {
        return false;
    };
    let Ok(d) = dual_complex(&FiniteWallspace::Abstract(ws)) else {
        return false;
    };
    let base = c.zero_cubes()[0];
    let hyperplanes = c.hyperplanes();
    let project = |o: Orientation| -> Orientation {
        hyperplanes.iter().enumerate().fold(0, |acc, (k, &h)| acc | (bit(o ^ base, h) as Orientation) << k)
    };
    let image: Vec<Orientation> = c.zero_cubes().iter().map(|&o| project(o)).collect();
    if image.iter().collect::<BTreeSet<_>>().len() != image.len() || image.len() != d.vertex_count() {
        return false;
    }
    let Some(map) = image.iter().map(|&o| d.index_of(o)).collect::<Option<Vec<usize>>>() else {
        return false;
    };
    let mapped: BTreeSet<(usize, usize)> =
        c.edges().iter().map(|&(a, b)| (map[a].min(map[b]), map[a].max(map[b]))).collect();
    let labels_match = c
        .edges()
        .iter()
        .all(|&(a, b)| c.walls[c.edge_wall((a, b))] == d.walls[d.edge_wall((map[a].min(map[b]), map[a].max(map[b])))]);
    mapped == d.edges().iter().copied().collect() && labels_match
}

/// Whether all four combinations of sides of walls `a` and `b` occur among the 0-cubes.
pub fn walls_cross(c: &CubeComplex, a: usize, b: usize) -> bool {
    let mut seen = 0u8;
    for &o in c.zero_cubes() {
        seen |= 1 << (2 * bit(o, a) as u8 + bit(o, b) as u8);
    }
    seen == 0b1111
}

/// Orientation agreeing with `y` on the walls separating `x` from `y`, with
/// `z` on those separating `x` from `z`, and with `x` elsewhere.
pub fn union_orientation(
    c: &CubeComplex,
    x: Orientation,
    y: Orientation,
    z: Orientation,
) -> Result<Orientation, DualError> {
    for o in [x, y, z] {
        c.require(o)?;
    }
    let (sep_y, sep_z) = (x ^ y, x ^ z);
    if sep_y & sep_z != 0 {
        return Err(DualError::Overlap { first: (sep_y & sep_z).trailing_zeros() as usize });
    }
    let members = |m: Orientation| (0..c.wall_count()).filter(move |&i| bit(m, i));
    for (a, b) in members(sep_y).cartesian_product(members(sep_z).collect::<Vec<_>>()) {
        if !walls_cross(c, a, b) {
            return Err(DualError::Crossing { first: a, second: b });
        }
    }
    let u = x ^ sep_y ^ sep_z;
    c.require(u)?;
    Ok(u)
}

/// One vertex per wall flippable at `v`, joined when the two flips can be
/// made together.
pub fn link_of_vertex(c: &CubeComplex, v: Orientation) -> Result<SimplicialComplex, DualError> {
    c.require(v)?;
    let flips: Vec<usize> = (0..c.wall_count()).filter(|&i| c.contains(v ^ 1 << i)).collect();
    let labels = flips.iter().map(|&i| c.walls[i].clone()).collect();
    let edges: Vec<(usize, usize)> =
        (0..flips.len()).tuple_combinations().filter(|&(a, b)| c.contains(v ^ 1 << flips[a] ^ 1 << flips[b])).collect();
    Ok(SimplicialComplex::new(labels, edges)?)
}

/// Wall sets of the cubes containing `v`, one per clique of the link.
pub fn cubes_at(c: &CubeComplex, v: Orientation) -> Result<Vec<Vec<usize>>, DualError> {
    let link = link_of_vertex(c, v)?;
    let flips: Vec<usize> = (0..c.wall_count()).filter(|&i| c.contains(v ^ 1 << i)).collect();
    Ok(link.cliques().into_iter().map(|k| k.into_iter().map(|i| flips[i]).collect()).collect())
}

/// A seeded random line arrangement in the open square `(0, 10)^2`.
///
/// Normals are drawn from a short list so that parallel families occur;
/// every wall passes through a random interior point, and the base point
/// avoids all walls.
pub fn random_wallspace(seed: u64, walls: usize) -> Result<GeometricWallspace, DualError> {
    const NORMALS: [[i64; 2]; 6] = [[1, 0], [0, 1], [1, 1], [1, -1], [1, 2], [2, -1]];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| {
        RatVector(vec![exactlin::rat(rng.gen_range(1..40), 4), exactlin::rat(rng.gen_range(1..40), 4)])
    };
    let mut chosen: Vec<GeometricWall> = Vec::new();
    while chosen.len() < walls {
        let normal = RatVector::from_i64(&NORMALS[rng.gen_range(0..NORMALS.len())]);
        let through = point(&mut rng);
        let wall = GeometricWall::new(normal.clone(), normal.dot(&through))?;
        if !chosen.contains(&wall) {
            chosen.push(wall);
        }
    }
    let base = loop {
        let p = RatVector(vec![
            exactlin::rat(rng.gen_range(1..80), 8) + exactlin::rat(1, 16),
            exactlin::rat(rng.gen_range(1..80), 8) + exactlin::rat(1, 32),
        ]);
        if chosen.iter().all(|w| !w.evaluate(&p).is_zero()) {
            break p;
        }
    };
    GeometricWallspace::new(Window::cube(2, 0, 10), chosen, base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rat;

    fn wall(normal: &[i64], offset: i64) -> GeometricWall {
        GeometricWall::new(RatVector::from_i64(normal), int(offset)).unwrap()
    }

    fn point(x: Rational, y: Rational) -> RatVector {
        RatVector(vec![x, y])
    }

    fn parallel() -> FiniteWallspace {
        let walls = (1..=3).map(|k| wall(&[1, 0], k)).collect();
        FiniteWallspace::Geometric(
            GeometricWallspace::new(Window::cube(2, 0, 4), walls, point(rat(1, 2), rat(1, 2))).unwrap(),
        )
    }

    fn triangle() -> FiniteWallspace {
        let walls = vec![wall(&[0, 1], 1), wall(&[1, 1], 6), wall(&[1, -1], 0)];
        FiniteWallspace::Geometric(
            GeometricWallspace::new(Window::cube(2, 0, 10), walls, point(int(5), int(3))).unwrap(),
        )
    }

    /// Vertical lines x = 1, 2 and horizontal lines y = 1, 2, 3.
    fn grid() -> GeometricWallspace {
        let walls = vec![wall(&[1, 0], 1), wall(&[1, 0], 2), wall(&[0, 1], 1), wall(&[0, 1], 2), wall(&[0, 1], 3)];
        GeometricWallspace::new(Window::cube(2, 0, 4), walls, point(rat(1, 2), rat(1, 2))).unwrap()
    }

    fn grid_region(g: &GeometricWallspace, col: i64, row: i64) -> Orientation {
        g.orientation_of(&point(rat(2 * col + 1, 2), rat(2 * row + 1, 2))).unwrap()
    }

    fn hexagon() -> CubeComplex {
        let cubes =
            ["000", "001", "011", "111", "110", "100"].iter().map(|s| orientation_from_string(s).unwrap()).collect();
        CubeComplex::new(vec!["a".into(), "b".into(), "c".into()], cubes).unwrap()
    }

    #[test]
    fn fourier_motzkin_examples() {
        let unit = |i| RatVector::unit(2, i);
        let window = Window::cube(2, 0, 1).constraints();
        assert!(strictly_feasible(window.clone(), 2));
        // x > 1 is outside the open unit square
        let mut s = window.clone();
        s.push(Strict { coeffs: unit(0), rhs: int(1) });
        assert!(!strictly_feasible(s, 2));
        // x + y > 1 and x + y < 1 + 1/100 meet in a thin strip
        let mut s = window.clone();
        s.push(Strict { coeffs: RatVector::from_i64(&[1, 1]), rhs: int(1) });
        s.push(Strict { coeffs: RatVector::from_i64(&[-1, -1]), rhs: -(int(1) + rat(1, 100)) });
        assert!(strictly_feasible(s, 2));
        // open sides of one line never meet
        let mut s = window;
        s.push(Strict { coeffs: RatVector::from_i64(&[1, 1]), rhs: int(1) });
        s.push(Strict { coeffs: RatVector::from_i64(&[-1, -1]), rhs: int(-1) });
        assert!(!strictly_feasible(s, 2));
    }

    #[test]
    fn parallel_walls_give_a_path() {
        let c = dual_complex(&parallel()).unwrap();
        assert_eq!(c.vertex_count(), 4);
        assert_eq!(c.edges().len(), 3);
        assert_eq!(c.hyperplanes(), vec![0, 1, 2]);
    }

    #[test]
    fn triangle_gives_a_three_cube() {
        let c = dual_complex(&triangle()).unwrap();
        assert_eq!(c.vertex_count(), 8);
        assert_eq!(c.edges().len(), 12);
        assert_eq!(distance(&c, 0, 0b111).unwrap(), 3);
        let link = link_of_vertex(&c, 0).unwrap();
        assert_eq!((link.vertex_count(), link.edge_count()), (3, 3));
        assert!(cubes_at(&c, 0).unwrap().iter().any(|k| k.len() == 3));
    }

    #[test]
    fn grid_gives_a_product_of_paths() {
        let g = grid();
        let c = dual_complex(&FiniteWallspace::Geometric(g.clone())).unwrap();
        assert_eq!(c.vertex_count(), 12);
        assert_eq!(c.edges().len(), 17);
        let (a, b) = (grid_region(&g, 0, 0), grid_region(&g, 2, 3));
        assert_eq!(distance(&c, a, b).unwrap(), 5);
        assert_eq!(distance(&c, a, a).unwrap(), 0);
    }

    #[test]
    fn median_examples() {
        let g = grid();
        let c = dual_complex(&FiniteWallspace::Geometric(g.clone())).unwrap();
        let (x, y, z) = (grid_region(&g, 0, 0), grid_region(&g, 2, 1), grid_region(&g, 1, 3));
        assert_eq!(median(&c, x, y, z).unwrap(), grid_region(&g, 1, 1));
        assert_eq!(median(&c, x, x, x).unwrap(), x);
        assert_eq!(median(&c, x, y, y).unwrap(), y);
        assert!(matches!(median(&c, x, y, 1 << 20), Err(DualError::NotAZeroCube(_))));
        assert!(matches!(distance(&c, x, 1 << 20), Err(DualError::NotAZeroCube(_))));
    }

    #[test]
    fn median_graph_examples() {
        for ws in [parallel(), triangle(), FiniteWallspace::Geometric(grid())] {
            assert!(is_median_graph(&dual_complex(&ws).unwrap()));
        }
        assert!(!is_median_graph(&hexagon()));
        let single = CubeComplex::new(vec![], vec![0]).unwrap();
        assert!(is_median_graph(&single));
        // a path embedded with a shortcut in the labels is not isometric
        let cubes = ["000", "100", "110", "111", "011"].iter().map(|s| orientation_from_string(s).unwrap()).collect();
        let bent = CubeComplex::new(vec!["a".into(), "b".into(), "c".into()], cubes).unwrap();
        assert!(!is_median_graph(&bent));
        let split = CubeComplex::new(vec!["a".into(), "b".into()], vec![0, 3]).unwrap();
        assert!(!is_median_graph(&split));
    }

    #[test]
    fn hyperplane_wallspace_examples() {
        let cube = dual_complex(&triangle()).unwrap();
        let ws = hyperplane_wallspace(&cube).unwrap();
        assert_eq!(ws.far.len(), 3);
        for w in 0..3 {
            assert_eq!(ws.far_side(w).len(), 4);
        }

        let path = dual_complex(&parallel()).unwrap();
        let ws = hyperplane_wallspace(&path).unwrap();
        let sides: Vec<BTreeSet<usize>> = (0..3).map(|w| ws.far_side(w).into_iter().collect()).collect();
        assert!(sides[2].is_subset(&sides[1]) && sides[1].is_subset(&sides[0]));

        let g = grid();
        let c = dual_complex(&FiniteWallspace::Geometric(g.clone())).unwrap();
        let ws = hyperplane_wallspace(&c).unwrap();
        assert_eq!(ws.far.len(), 5);
        // wall x = 1 puts every region with column >= 1 on its far side
        let far: BTreeSet<Orientation> = ws.far_side(0).iter().map(|&p| c.zero_cubes()[p]).collect();
        let expected: BTreeSet<Orientation> = (1..3)
            .flat_map(|col| (0..4).map(move |row| (col, row)))
            .map(|(col, row)| grid_region(&g, col, row))
            .collect();
        assert_eq!(far, expected);
    }

    #[test]
    fn duality_examples() {
        assert!(duality_check(&dual_complex(&triangle()).unwrap()));
        assert!(duality_check(&dual_complex(&parallel()).unwrap()));
        assert!(duality_check(&dual_complex(&FiniteWallspace::Geometric(grid())).unwrap()));
    }

    #[test]
    fn union_orientation_examples() {
        let g = grid();
        let c = dual_complex(&FiniteWallspace::Geometric(g.clone())).unwrap();
        let (x, y, z) = (grid_region(&g, 0, 0), grid_region(&g, 2, 0), grid_region(&g, 0, 3));
        let u = union_orientation(&c, x, y, z).unwrap();
        assert_eq!(u, grid_region(&g, 2, 3));
        assert_eq!(distance(&c, x, u).unwrap(), distance(&c, x, y).unwrap() + distance(&c, x, z).unwrap());
        assert_eq!(union_orientation(&c, x, x, z).unwrap(), z);

        let path = dual_complex(&parallel()).unwrap();
        let mid = 0b001;
        assert_eq!(union_orientation(&path, mid, 0b000, 0b111), Err(DualError::Crossing { first: 0, second: 1 }));
        assert_eq!(union_orientation(&path, 0, 0b001, 0b011), Err(DualError::Overlap { first: 0 }));
    }

    #[test]
    fn link_examples() {
        let g = grid();
        let c = dual_complex(&FiniteWallspace::Geometric(g.clone())).unwrap();
        let interior = link_of_vertex(&c, grid_region(&g, 1, 1)).unwrap();
        assert_eq!((interior.vertex_count(), interior.edge_count()), (4, 4));
        assert!(interior.degrees().iter().all(|&d| d == 2));
        let corner = link_of_vertex(&c, grid_region(&g, 0, 0)).unwrap();
        assert_eq!((corner.vertex_count(), corner.edge_count()), (2, 1));
        assert!(link_of_vertex(&c, 1 << 20).is_err());
    }

    #[test]
    fn wallspace_validation() {
        let base = point(rat(1, 2), rat(1, 2));
        let w = Window::cube(2, 0, 4);
        assert_eq!(
            GeometricWallspace::new(w.clone(), vec![wall(&[1, 0], 5)], base.clone()),
            Err(DualError::WallDoesNotSplit { index: 0 })
        );
        assert_eq!(
            GeometricWallspace::new(w.clone(), vec![wall(&[1, 0], 4)], base.clone()),
            Err(DualError::WallDoesNotSplit { index: 0 })
        );
        assert_eq!(
            GeometricWallspace::new(w.clone(), vec![wall(&[1, 0], 1), wall(&[-2, 0], -2)], base.clone()),
            Err(DualError::DuplicateWall { first: 0, second: 1 })
        );
        assert_eq!(
            GeometricWallspace::new(w.clone(), vec![wall(&[1, -1], 0)], base.clone()),
            Err(DualError::BasePointOnWall { index: 0 })
        );
        assert_eq!(GeometricWallspace::new(w.clone(), vec![], point(int(5), int(1))), Err(DualError::BasePointOutside));
        let many: Vec<GeometricWall> =
            (1..=25).map(|k| GeometricWall::new(RatVector::from_i64(&[1, 0]), rat(k, 8)).unwrap()).collect();
        assert_eq!(GeometricWallspace::new(w, many, point(rat(1, 16), int(1))), Err(DualError::Size { walls: 25 }));
    }

    #[test]
    fn files_round_trip() {
        let g = grid();
        let file = WallspaceFile::from_wallspace(&g);
        let back = WallspaceFile::parse(&file.to_json()).unwrap().to_wallspace().unwrap();
        assert_eq!(back, g);

        let c = dual_complex(&FiniteWallspace::Geometric(g)).unwrap();
        let text = c.to_file().to_json();
        assert_eq!(CubeComplex::from_file(&ComplexFile::parse(&text).unwrap()).unwrap(), c);

        let mut bad = c.to_file();
        bad.edges.pop();
        assert!(matches!(CubeComplex::from_file(&bad), Err(DualError::Format(_))));
        assert!(matches!(ComplexFile::parse("{"), Err(DualError::Parse(_))));
    }

    #[test]
    fn random_wallspaces_are_valid_and_reproducible() {
        let a = random_wallspace(3, 8).unwrap();
        assert_eq!(a, random_wallspace(3, 8).unwrap());
        assert_eq!(a.walls().len(), 8);
        let c = dual_complex(&FiniteWallspace::Geometric(a)).unwrap();
        assert!(is_median_graph(&c));
        assert!(duality_check(&c));
    }
}
