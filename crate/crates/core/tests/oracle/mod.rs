//! Brute-force reference implementations shared by the integration tests.
//!
//! Nothing here calls the search, elimination or enumeration code under
//! test: integer orthogonal matrices are found by scanning all
//! `{-1, 0, 1}` matrices, determinants use cofactor expansion, nullspaces use
//! a plain row reduction, and halfplane intersections are computed by
//! polygon clipping.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};

use cubecrys::crys::CrystGroup;
use cubecrys::exactlin::{RatMatrix, RatVector, Rational};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// All `n x n` integer matrices with `M^T M = I`, found by scanning every
/// matrix with entries in `{-1, 0, 1}`.
pub fn integer_orthogonal(n: usize) -> Vec<RatMatrix> {
    let cells = n * n;
    let mut out = Vec::new();
    for code in 0..3u64.pow(cells as u32) {
        let mut c = code;
        let entries: Vec<Rational> = (0..cells)
            .map(|_| {
                let d = (c % 3) as i64 - 1;
                c /= 3;
                int(d)
            })
            .collect();
        let m = RatMatrix::new(n, n, entries).unwrap();
        if (&m.transpose() * &m).is_identity() {
            out.push(m);
        }
    }
    out
}

pub fn cofactor_det(m: &RatMatrix) -> Rational {
    let n = m.rows();
    if n == 0 {
        return Rational::one();
    }
    if n == 1 {
        return m[(0, 0)].clone();
    }
    let mut total = Rational::zero();
    for j in 0..n {
        if m[(0, j)].is_zero() {
            continue;
        }
        let minor_rows: Vec<Vec<Rational>> =
            (1..n).map(|i| (0..n).filter(|&k| k != j).map(|k| m[(i, k)].clone()).collect()).collect();
        let minor = RatMatrix::from_rows(minor_rows).unwrap();
        let term = &m[(0, j)] * cofactor_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Basis of the nullspace of `rows` (each of length `cols`).
pub fn nullspace(mut rows: Vec<Vec<Rational>>, cols: usize) -> Vec<Vec<Rational>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let lead = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = &*x / &lead;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= p * &f;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -rows[i][f].clone();
            }
            v
        })
        .collect()
}

/// Real form `L M L^-1` of a lattice matrix, via cofactor inversion.
fn real_form(g: &CrystGroup, m: &RatMatrix) -> RatMatrix {
    let l = g.lattice_basis();
    let n = l.rows();
    let d = cofactor_det(l);
    let mut adj = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let minor_rows: Vec<Vec<Rational>> = (0..n)
                .filter(|&a| a != j)
                .map(|a| (0..n).filter(|&b| b != i).map(|b| l[(a, b)].clone()).collect())
                .collect();
            let minor = if n == 1 { Rational::one() } else { cofactor_det(&RatMatrix::from_rows(minor_rows).unwrap()) };
            adj[(i, j)] = if (i + j) % 2 == 0 { minor } else { -minor };
        }
    }
    let inv = adj.scale(&(Rational::one() / d));
    &(l * m) * &inv
}

/// Whether `images` (one per point generator) extends to an injective
/// homomorphism of the point group, found by walking the Cayley graph.
pub fn extends_injectively(g: &CrystGroup, images: &[RatMatrix]) -> bool {
    let n = g.dimension();
    let gens = g.point_generators();
    let mut map: HashMap<RatMatrix, RatMatrix> = HashMap::new();
    map.insert(RatMatrix::identity(n), RatMatrix::identity(n));
    let mut queue = VecDeque::from([RatMatrix::identity(n)]);
    while let Some(x) = queue.pop_front() {
        let fx = map[&x].clone();
        for (s, fs) in gens.iter().zip(images) {
            let y = &x * s;
            let fy = &fx * fs;
            match map.get(&y) {
                Some(existing) if *existing != fy => return false,
                Some(_) => {}
                None => {
                    map.insert(y.clone(), fy);
                    queue.push_back(y);
                }
            }
        }
    }
    let distinct: BTreeSet<String> = map.values().map(|m| m.to_string()).collect();
    distinct.len() == map.len()
}

/// Whether some invertible real `X` has `X ι(s) = θ̄(s) X` for every
/// generator `s`. The solution space is a linear subspace; an invertible
/// member exists iff a random combination of its basis is invertible with
/// high probability, so several seeded combinations are tried.
pub fn conjugator_exists(g: &CrystGroup, images: &[RatMatrix]) -> bool {
    let n = g.dimension();
    let idx = |i: usize, j: usize| i * n + j;
    let mut rows = Vec::new();
    for (s, iota) in g.point_generators().iter().zip(images) {
        let theta = real_form(g, s);
        // (X iota - theta X)_{ij} = sum_k X_ik iota_kj - theta_ik X_kj
        for i in 0..n {
            for j in 0..n {
                let mut row = vec![Rational::zero(); n * n];
                for k in 0..n {
                    row[idx(i, k)] += &iota[(k, j)];
                    row[idx(k, j)] -= &theta[(i, k)];
                }
                rows.push(row);
            }
        }
    }
    let basis = nullspace(rows, n * n);
    if basis.is_empty() {
        return false;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    (0..24).any(|_| {
        let mut x = vec![Rational::zero(); n * n];
        for b in &basis {
            let t = int(rng.gen_range(-60..=60));
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += &t * bi;
            }
        }
        !cofactor_det(&RatMatrix::new(n, n, x).unwrap()).is_zero()
    })
}

/// Exhaustive search for an injective `ι: P_G -> O(n, Z)` with `θ̄ = A ι A^-1`.
/// Every assignment of generator images is tried, with no pre-filtering.
pub fn embedding_exists(g: &CrystGroup) -> bool {
    let n = g.dimension();
    assert!(n <= 3, "exhaustive oracle is limited to n <= 3");
    let candidates = integer_orthogonal(n);
    let k = g.point_generators().len();
    let mut choice = vec![0usize; k];
    loop {
        let images: Vec<RatMatrix> = choice.iter().map(|&c| candidates[c].clone()).collect();
        if extends_injectively(g, &images) && conjugator_exists(g, &images) {
            return true;
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return false;
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < candidates.len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// Halfplane `a x + b y < c` (or `>` when `greater`), clipped against a
/// convex polygon given by its vertices in order.
fn clip(
    poly: &[(Rational, Rational)],
    a: &Rational,
    b: &Rational,
    c: &Rational,
    greater: bool,
) -> Vec<(Rational, Rational)> {
    let side = |p: &(Rational, Rational)| {
        let v = a * &p.0 + b * &p.1 - c;
        if greater {
            v
        } else {
            -v
        }
    };
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let p = &poly[i];
        let q = &poly[(i + 1) % poly.len()];
        let (sp, sq) = (side(p), side(q));
        if !sp.is_negative() {
            out.push(p.clone());
        }
        if (sp.is_positive() && sq.is_negative()) || (sp.is_negative() && sq.is_positive()) {
            let t = &sp / (&sp - &sq);
            out.push((&p.0 + &t * (&q.0 - &p.0), &p.1 + &t * (&q.1 - &p.1)));
        }
    }
    out
}

fn area2(poly: &[(Rational, Rational)]) -> Rational {
    let mut s = Rational::zero();
    for i in 0..poly.len() {
        let (p, q) = (&poly[i], &poly[(i + 1) % poly.len()]);
        s += &p.0 * &q.1 - &q.0 * &p.1;
    }
    s.abs()
}

/// A planar line arrangement in an open box, as plain data.
pub struct PlanarArrangement {
    pub lower: (Rational, Rational),
    pub upper: (Rational, Rational),
    /// `(a, b, c)` for the line `a x + b y = c`.
    pub lines: Vec<(Rational, Rational, Rational)>,
    pub base: (Rational, Rational),
}

impl PlanarArrangement {
    /// Side of line `i` away from the base point when `far`.
    fn halfplane(&self, i: usize, far: bool) -> (Rational, Rational, Rational, bool) {
        let (a, b, c) = &self.lines[i];
        let base_greater = (a * &self.base.0 + b * &self.base.1 - c).is_positive();
        (a.clone(), b.clone(), c.clone(), base_greater != far)
    }

    /// Whether the chosen open sides meet inside the open box: the clipped
    /// closed polygon must have positive area.
    pub fn sides_meet(&self, sides: &[(usize, bool)]) -> bool {
        let (lo, hi) = (&self.lower, &self.upper);
        let mut poly = vec![
            (lo.0.clone(), lo.1.clone()),
            (hi.0.clone(), lo.1.clone()),
            (hi.0.clone(), hi.1.clone()),
            (lo.0.clone(), hi.1.clone()),
        ];
        for &(i, far) in sides {
            let (a, b, c, greater) = self.halfplane(i, far);
            poly = clip(&poly, &a, &b, &c, greater);
            if poly.len() < 3 {
                return false;
            }
        }
        area2(&poly).is_positive()
    }

    /// Every pairwise-consistent orientation, by scanning all `2^w` masks.
    pub fn consistent_orientations(&self) -> BTreeSet<u32> {
        let w = self.lines.len();
        let mut meets = HashMap::new();
        for i in 0..w {
            for j in 0..w {
                for si in [false, true] {
                    for sj in [false, true] {
                        let ok = i == j && si == sj || i != j && self.sides_meet(&[(i, si), (j, sj)]);
                        meets.insert((i, si, j, sj), ok);
                    }
                }
            }
        }
        (0..1u32 << w)
            .filter(|&o| (0..w).all(|i| (0..w).all(|j| meets[&(i, o >> i & 1 == 1, j, o >> j & 1 == 1)])))
            .collect()
    }
}

/// Hamming graph on a set of masks, with all-pairs BFS distances.
pub fn bfs_distances(vertices: &[u32]) -> Vec<Vec<Option<u32>>> {
    let index: HashMap<u32, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    vertices
        .iter()
        .map(|&s| {
            let mut dist = vec![None; vertices.len()];
            dist[index[&s]] = Some(0);
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                let d = dist[index[&v]].unwrap();
                for b in 0..32 {
                    if let Some(&u) = index.get(&(v ^ 1 << b)) {
                        if dist[u].is_none() {
                            dist[u] = Some(d + 1);
                            q.push_back(v ^ 1 << b);
                        }
                    }
                }
            }
            dist
        })
        .collect()
}

pub fn ratvec(xs: &[Rational]) -> RatVector {
    RatVector(xs.to_vec())
}
