//! Simplicial boundaries of products of simple cube complexes.
//!
//! The boundary of a product is the simplicial join of the factor
//! boundaries. Lines, rays and points have finite boundaries; a regular
//! tree has an infinite discrete boundary, which is kept symbolic.

use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::sgnperm::{simplicial_join, SgnPermError, SimplicialComplex, MAX_QN_RANK};

/// Largest complex [`is_isomorphic`] will search.
pub const MAX_ISO_VERTICES: usize = 32;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum BoundaryError {
    #[error("a product needs at least one factor")]
    Empty,
    #[error("regular trees need valence at least 3, got {0}")]
    Valence(u32),
    #[error("dimension {0} is outside 1..={MAX_QN_RANK}")]
    Dimension(usize),
    #[error("complexes with {0} vertices exceed the isomorphism cap of {MAX_ISO_VERTICES}")]
    Size(usize),
    #[error("cannot parse factor {0:?}; expected Point, HalfLine, Line or RegularTree(k)")]
    Parse(String),
    #[error(transparent)]
    SgnPerm(#[from] SgnPermError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", content = "valence")]
pub enum FactorDescriptor {
    Point,
    HalfLine,
    Line,
    RegularTree(u32),
}

impl FactorDescriptor {
    pub fn regular_tree(valence: u32) -> Result<Self, BoundaryError> {
        if valence < 3 {
            return Err(BoundaryError::Valence(valence));
        }
        Ok(FactorDescriptor::RegularTree(valence))
    }
}

impl fmt::Display for FactorDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorDescriptor::Point => write!(f, "Point"),
            FactorDescriptor::HalfLine => write!(f, "HalfLine"),
            FactorDescriptor::Line => write!(f, "Line"),
            FactorDescriptor::RegularTree(k) => write!(f, "RegularTree({k})"),
        }
    }
}

impl std::str::FromStr for FactorDescriptor {
    type Err = BoundaryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t {
            "Point" => return Ok(FactorDescriptor::Point),
            "HalfLine" => return Ok(FactorDescriptor::HalfLine),
            "Line" => return Ok(FactorDescriptor::Line),
            _ => {}
        }
        let inner = t
            .strip_prefix("RegularTree(")
            .or_else(|| t.strip_prefix("Tree("))
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| BoundaryError::Parse(t.to_string()))?;
        let valence = inner.trim().parse().map_err(|_| BoundaryError::Parse(t.to_string()))?;
        FactorDescriptor::regular_tree(valence)
    }
}

/// Parses a product such as `"Line*Line*HalfLine"`.
pub fn parse_factors(expr: &str) -> Result<Vec<FactorDescriptor>, BoundaryError> {
    if expr.trim().is_empty() {
        return Err(BoundaryError::Empty);
    }
    expr.split('*').map(str::parse).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum BoundaryDescriptor {
    Finite(SimplicialComplex),
    /// An infinite set of pairwise non-adjacent vertices.
    InfiniteDiscrete,
    /// A formal join, kept unevaluated because some part is infinite.
    Join(Vec<BoundaryDescriptor>),
}

impl BoundaryDescriptor {
    pub fn is_finite(&self) -> bool {
        matches!(self, BoundaryDescriptor::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&SimplicialComplex> {
        match self {
            BoundaryDescriptor::Finite(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for BoundaryDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryDescriptor::Finite(c) => {
                let labels = c.labels().join(", ");
                let edges = c.edges().map(|(a, b)| format!("{}-{}", c.labels()[a], c.labels()[b])).join(", ");
                write!(f, "finite complex, f-vector {:?}; vertices [{labels}]; edges [{edges}]", c.f_vector())
            }
            BoundaryDescriptor::InfiniteDiscrete => write!(f, "infinite-discrete"),
            BoundaryDescriptor::Join(parts) => write!(f, "join({})", parts.iter().join(", ")),
        }
    }
}

fn atomic_complex(f: FactorDescriptor) -> Option<SimplicialComplex> {
    let labels: &[&str] = match f {
        FactorDescriptor::Point => &[],
        FactorDescriptor::HalfLine => &["+"],
        FactorDescriptor::Line => &["+", "-"],
        FactorDescriptor::RegularTree(_) => return None,
    };
    Some(SimplicialComplex::new(labels.iter().map(|s| s.to_string()).collect(), []).expect("distinct labels"))
}

pub fn atomic_boundary(f: FactorDescriptor) -> BoundaryDescriptor {
    atomic_complex(f).map_or(BoundaryDescriptor::InfiniteDiscrete, BoundaryDescriptor::Finite)
}

/// Iterated join of the factor boundaries. Vertices of factor `k`
/// (1-based) get `k` appended to their label, so a product of `n` lines is
/// labelled like [`build_qn`].
pub fn product_boundary(factors: &[FactorDescriptor]) -> Result<BoundaryDescriptor, BoundaryError> {
    if factors.is_empty() {
        return Err(BoundaryError::Empty);
    }
    let parts: Vec<BoundaryDescriptor> = factors
        .iter()
        .enumerate()
        .map(|(k, &f)| match atomic_boundary(f) {
            BoundaryDescriptor::Finite(c) => Ok(BoundaryDescriptor::Finite(c.relabel(|l| format!("{l}{}", k + 1))?)),
            other => Ok(other),
        })
        .collect::<Result<_, BoundaryError>>()?;
    if parts.len() == 1 {
        return Ok(parts.into_iter().next().expect("one part"));
    }
    if parts.iter().all(BoundaryDescriptor::is_finite) {
        let joined = parts
            .iter()
            .filter_map(BoundaryDescriptor::as_finite)
            .try_fold(SimplicialComplex::empty(), |acc, c| simplicial_join(&acc, c))?;
        return Ok(BoundaryDescriptor::Finite(joined));
    }
    Ok(BoundaryDescriptor::Join(parts))
}

/// The boundary of the standard cubulation of `R^n`.
pub fn boundary_of_rn(n: usize) -> Result<SimplicialComplex, BoundaryError> {
    if !(1..=MAX_QN_RANK).contains(&n) {
        return Err(BoundaryError::Dimension(n));
    }
    match product_boundary(&vec![FactorDescriptor::Line; n])? {
        BoundaryDescriptor::Finite(c) => Ok(c),
        other => unreachable!("a product of lines has a finite boundary, got {other}"),
    }
}

/// Whether some bijection of vertices carries the edges of `a` exactly onto
/// those of `b`.
pub fn is_isomorphic(a: &SimplicialComplex, b: &SimplicialComplex) -> Result<bool, BoundaryError> {
    for c in [a, b] {
        if c.vertex_count() > MAX_ISO_VERTICES {
            return Err(BoundaryError::Size(c.vertex_count()));
        }
    }
    if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() {
        return Ok(false);
    }
    let (da, db) = (a.degrees(), b.degrees());
    if da.iter().sorted().ne(db.iter().sorted()) {
        return Ok(false);
    }
    let (adj_a, adj_b) = (a.adjacency(), b.adjacency());
    // most constrained vertices first
    let order: Vec<usize> = (0..a.vertex_count()).sorted_by_key(|&v| std::cmp::Reverse(da[v])).collect();
    let mut image = vec![usize::MAX; a.vertex_count()];
    let mut used = vec![false; b.vertex_count()];

    #[allow(clippy::too_many_arguments)]
    fn extend(
        depth: usize,
        order: &[usize],
        image: &mut [usize],
        used: &mut [bool],
        da: &[usize],
        db: &[usize],
        adj_a: &[Vec<bool>],
        adj_b: &[Vec<bool>],
    ) -> bool {
        let Some(&v) = order.get(depth) else {
            return true;
        };
        for w in 0..used.len() {
            if used[w] || db[w] != da[v] {
                continue;
            }
            let fits = order[..depth].iter().all(|&u| adj_a[v][u] == adj_b[w][image[u]]);
            if !fits {
                continue;
            }
            image[v] = w;
            used[w] = true;
            if extend(depth + 1, order, image, used, da, db, adj_a, adj_b) {
                return true;
            }
            used[w] = false;
        }
        false
    }

    Ok(extend(0, &order, &mut image, &mut used, &da, &db, &adj_a, &adj_b))
}
