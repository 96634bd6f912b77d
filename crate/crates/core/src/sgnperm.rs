//! The signed permutation group `O(n, Z)` and the hyperoctahedron `Q_n`.
//!
//! A [`SignedPermutation`] sends the basis vector `e_i` to
//! `signs[i] * e_{perm[i]}`; its matrix is the corresponding signed
//! permutation matrix. Products compose as maps: `(s * t)(v) = s(t(v))`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use itertools::Itertools;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactlin::{int, RatMatrix};

/// Largest `n` for which [`enumerate_group`] will list `O(n, Z)`.
pub const MAX_ENUMERATION_RANK: usize = 6;
/// Largest `n` accepted by [`build_qn`].
pub const MAX_QN_RANK: usize = 8;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum SgnPermError {
    #[error("rank {n} outside the supported range 1..={max}")]
    Size { n: usize, max: usize },
    #[error("not a signed permutation: {0}")]
    Invalid(String),
    #[error("vertex label {0:?} occurs in both complexes")]
    LabelCollision(String),
    #[error("invalid simplicial complex: {0}")]
    Complex(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    /// `perm` is zero-based; `signs` entries must be `1` or `-1`.
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self, SgnPermError> {
        let n = perm.len();
        if signs.len() != n {
            return Err(SgnPermError::Invalid(format!("{n} images but {} signs", signs.len())));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(SgnPermError::Invalid(format!("{perm:?} is not a bijection")));
            }
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(SgnPermError::Invalid(format!("signs {signs:?} must be +1 or -1")));
        }
        Ok(SignedPermutation { perm, signs })
    }

    pub fn identity(n: usize) -> Self {
        SignedPermutation { perm: (0..n).collect(), signs: vec![1; n] }
    }

    pub fn rank(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Image of the axis `i`: `e_i -> sign * e_j`.
    pub fn apply_axis(&self, i: usize) -> (i8, usize) {
        (self.signs[i], self.perm[i])
    }

    pub fn compose(&self, rhs: &SignedPermutation) -> SignedPermutation {
        assert_eq!(self.rank(), rhs.rank(), "composing signed permutations of different rank");
        let (perm, signs) = (0..self.rank())
            .map(|i| {
                let (s, j) = rhs.apply_axis(i);
                let (t, k) = self.apply_axis(j);
                (k, s * t)
            })
            .unzip();
        SignedPermutation { perm, signs }
    }

    pub fn inverse(&self) -> SignedPermutation {
        let n = self.rank();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for i in 0..n {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        SignedPermutation { perm, signs }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p) && self.signs.iter().all(|&s| s == 1)
    }

    pub fn order(&self) -> usize {
        let mut acc = self.clone();
        let mut k = 1;
        while !acc.is_identity() {
            acc = acc.compose(self);
            k += 1;
        }
        k
    }

    /// `sign(perm) * prod(signs)`.
    pub fn determinant(&self) -> i32 {
        let mut seen = vec![false; self.rank()];
        let mut parity = 1;
        for start in 0..self.rank() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.perm[i];
                len += 1;
            }
            if len % 2 == 0 {
                parity = -parity;
            }
        }
        parity * self.signs.iter().map(|&s| s as i32).product::<i32>()
    }

    pub fn trace(&self) -> i32 {
        (0..self.rank()).filter(|&i| self.perm[i] == i).map(|i| self.signs[i] as i32).sum()
    }

    /// The matrix sending `e_i` to `signs[i] * e_{perm[i]}`.
    pub fn to_matrix(&self) -> RatMatrix {
        let n = self.rank();
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m[(self.perm[i], i)] = int(self.signs[i] as i64);
        }
        m
    }

    pub fn from_matrix(m: &RatMatrix) -> Option<SignedPermutation> {
        if !is_signed_permutation_matrix(m) {
            return None;
        }
        let n = m.rows();
        let (perm, signs) = (0..n)
            .map(|j| {
                let i = (0..n).find(|&i| !m[(i, j)].is_zero()).expect("column has a nonzero");
                (i, if m[(i, j)].is_one() { 1 } else { -1 })
            })
            .unzip();
        Some(SignedPermutation { perm, signs })
    }
}

impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let images = (0..self.rank())
            .map(|i| format!("{}{}", if self.signs[i] < 0 { "-" } else { "+" }, self.perm[i] + 1))
            .join(" ");
        write!(f, "[{images}]")
    }
}

#[derive(Serialize, Deserialize)]
struct SignedPermutationRepr {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl Serialize for SignedPermutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SignedPermutationRepr { perm: self.perm.iter().map(|p| p + 1).collect(), signs: self.signs.clone() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SignedPermutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = SignedPermutationRepr::deserialize(d)?;
        let perm = repr
            .perm
            .iter()
            .map(|&p| p.checked_sub(1).ok_or_else(|| serde::de::Error::custom("perm images are 1-based")))
            .collect::<Result<Vec<_>, _>>()?;
        SignedPermutation::new(perm, repr.signs).map_err(serde::de::Error::custom)
    }
}

/// All `2^n * n!` elements of `O(n, Z)`.
///
/// Order: permutations in lexicographic order of their image lists; within
/// one permutation, sign patterns count up in binary with bit `i` set meaning
/// axis `i` is negated.
pub fn enumerate_group(n: usize) -> Result<Vec<SignedPermutation>, SgnPermError> {
    if n == 0 || n > MAX_ENUMERATION_RANK {
        return Err(SgnPermError::Size { n, max: MAX_ENUMERATION_RANK });
    }
    let mut out = Vec::with_capacity((1 << n) * (1..=n).product::<usize>());
    for perm in (0..n).permutations(n) {
        for mask in 0u32..(1 << n) {
            let signs = (0..n).map(|i| if mask & (1 << i) != 0 { -1 } else { 1 }).collect();
            out.push(SignedPermutation { perm: perm.clone(), signs });
        }
    }
    Ok(out)
}

/// True iff every row and column has exactly one nonzero entry and it is `±1`.
pub fn is_signed_permutation_matrix(m: &RatMatrix) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.rows();
    let unit = |x: &crate::exactlin::Rational| x.is_one() || (-x).is_one();
    let rows_ok = (0..n).all(|i| {
        let nz: Vec<_> = (0..n).filter(|&j| !m[(i, j)].is_zero()).collect();
        nz.len() == 1 && unit(&m[(i, nz[0])])
    });
    let cols_ok = (0..n).all(|j| (0..n).filter(|&i| !m[(i, j)].is_zero()).count() == 1);
    rows_ok && cols_ok
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ElementClass {
    pub order: usize,
    pub determinant: i32,
}

pub fn classify_element(s: &SignedPermutation) -> ElementClass {
    ElementClass { order: s.order(), determinant: s.determinant() }
}

/// A flag simplicial complex, stored by its 1-skeleton.
///
/// Simplices are the cliques of the graph; they are only materialized on
/// demand by [`SimplicialComplex::cliques`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    labels: Vec<String>,
    edges: BTreeSet<(usize, usize)>,
}

impl SimplicialComplex {
    pub fn new(labels: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, SgnPermError> {
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(SgnPermError::Complex(format!("duplicate vertex label {l:?}")));
            }
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(SgnPermError::Complex(format!("loop at vertex {a}")));
            }
            if a >= labels.len() || b >= labels.len() {
                return Err(SgnPermError::Complex(format!("edge ({a}, {b}) out of range")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(SimplicialComplex { labels, edges: set })
    }

    pub fn empty() -> Self {
        SimplicialComplex { labels: Vec::new(), edges: BTreeSet::new() }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let n = self.vertex_count();
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in &self.edges {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count()];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Every nonempty clique, i.e. every simplex of the flag complex.
    pub fn cliques(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut out = Vec::new();
        let mut stack = Vec::new();
        fn extend(adj: &[Vec<bool>], start: usize, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            for v in start..adj.len() {
                if stack.iter().all(|&u| adj[u][v]) {
                    stack.push(v);
                    out.push(stack.clone());
                    extend(adj, v + 1, stack, out);
                    stack.pop();
                }
            }
        }
        extend(&adj, 0, &mut stack, &mut out);
        out
    }

    /// `f[k]` = number of `k`-simplices.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = Vec::new();
        for c in self.cliques() {
            let k = c.len() - 1;
            if f.len() <= k {
                f.resize(k + 1, 0);
            }
            f[k] += 1;
        }
        f
    }

    pub fn relabel(&self, mut f: impl FnMut(&str) -> String) -> Result<Self, SgnPermError> {
        SimplicialComplex::new(self.labels.iter().map(|l| f(l)).collect(), self.edges.iter().copied())
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexRepr {
    vertices: Vec<String>,
    edges: Vec<[usize; 2]>,
}

impl Serialize for SimplicialComplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ComplexRepr { vertices: self.labels.clone(), edges: self.edges.iter().map(|&(a, b)| [a, b]).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SimplicialComplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ComplexRepr::deserialize(d)?;
        SimplicialComplex::new(repr.vertices, repr.edges.into_iter().map(|[a, b]| (a, b)))
            .map_err(serde::de::Error::custom)
    }
}

/// Label of the `Q_n` vertex `sign * e_axis` (axis zero-based), e.g. `"-2"`.
pub fn qn_label(sign: i8, axis: usize) -> String {
    format!("{}{}", if sign < 0 { '-' } else { '+' }, axis + 1)
}

/// The hyperoctahedron `Q_n`: vertices `(sign, axis)`, two vertices adjacent
/// iff their axes differ.
pub fn build_qn(n: usize) -> Result<SimplicialComplex, SgnPermError> {
    if n == 0 || n > MAX_QN_RANK {
        return Err(SgnPermError::Size { n, max: MAX_QN_RANK });
    }
    let labels = (0..n).flat_map(|i| [qn_label(1, i), qn_label(-1, i)]).collect();
    let edges = (0..2 * n).tuple_combinations().filter(|&(a, b)| a / 2 != b / 2);
    SimplicialComplex::new(labels, edges)
}

/// Flag complex of the graph join. Vertex labels must be disjoint.
pub fn simplicial_join(a: &SimplicialComplex, b: &SimplicialComplex) -> Result<SimplicialComplex, SgnPermError> {
    let left: HashSet<&str> = a.labels.iter().map(String::as_str).collect();
    if let Some(clash) = b.labels.iter().find(|l| left.contains(l.as_str())) {
        return Err(SgnPermError::LabelCollision(clash.clone()));
    }
    let na = a.vertex_count();
    let labels = a.labels.iter().chain(&b.labels).cloned().collect();
    let edges = a
        .edges()
        .chain(b.edges().map(|(x, y)| (x + na, y + na)))
        .chain((0..na).cartesian_product(na..na + b.vertex_count()));
    SimplicialComplex::new(labels, edges)
}

/// Action of a signed permutation on the vertices of `Q_n`, as an index map
/// on the vertex order of [`build_qn`].
pub fn qn_vertex_action(s: &SignedPermutation) -> Vec<usize> {
    (0..2 * s.rank())
        .map(|v| {
            let (axis, sign) = (v / 2, if v % 2 == 0 { 1 } else { -1 });
            let (t, j) = s.apply_axis(axis);
            2 * j + usize::from(sign * t < 0)
        })
        .collect()
}
