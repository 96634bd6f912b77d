//! Deciding whether a crystallographic group is hyperoctahedral.
//!
//! A group is accepted when its point group embeds in `O(n, Z)` by some
//! `ι` with `θ̄(p) = A ι(p) A^-1` for a single real matrix `A`. Acceptance
//! returns the embedding and an exact conjugator; rejection returns a
//! certificate that rules out every embedding.
//!
//! Search: every point element must match some element of `O(n, Z)` in
//! (order, trace, determinant). Generator images are then enumerated in
//! lexicographic order of their index in [`enumerate_group`], extended along
//! the point-group multiplication table, and kept when the extension is an
//! injective homomorphism with the same character as `θ̄`. Equal characters
//! of two real representations of a finite group make them conjugate, and
//! `A` is recovered by group averaging over a fixed schedule of seed
//! matrices.

use std::collections::{BTreeSet, HashMap};

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::crys::{point_group_real, CrystGroup};
use crate::exactlin::{average_intertwiner, det, int, inverse, LinError, RatMatrix, RatVector};
use crate::sgnperm::{enumerate_group, SgnPermError, SignedPermutation};

/// Largest dimension the search will handle.
pub const MAX_DECIDE_RANK: usize = 4;
/// Number of seed matrices tried when averaging for a conjugator.
pub const SEED_CAP: usize = 1000;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error("dimension {n} exceeds the supported maximum {MAX_DECIDE_RANK}")]
    Size { n: usize },
    #[error("characters agree but no invertible conjugator was found in {seeds} seeds")]
    NoConjugator { seeds: usize },
    #[error("witness does not verify: {0}")]
    WitnessCorruption(String),
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error(transparent)]
    SgnPerm(#[from] SgnPermError),
}

/// `(order, trace, determinant)` of a finite-order integer matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Signature {
    pub order: usize,
    pub trace: i64,
    pub determinant: i64,
}

impl Signature {
    fn of_signed(s: &SignedPermutation) -> Signature {
        Signature { order: s.order(), trace: s.trace() as i64, determinant: s.determinant() as i64 }
    }
}

/// How a witness was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessRoute {
    /// The point generators already are signed permutations in lattice
    /// coordinates; `ι` is read off directly and `A` is the lattice basis.
    LatticeNative,
    /// Found by the embedding search and group averaging.
    Search,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HyperoctahedralWitness {
    pub route: WitnessRoute,
    /// `ι` of each generator, in generator order.
    pub generator_images: Vec<SignedPermutation>,
    /// `ι` of every point element, in point-element order.
    pub iota: Vec<SignedPermutation>,
    pub conjugator: RatMatrix,
    /// Columns of the conjugator.
    pub basis: Vec<RatVector>,
    /// Position in the seed schedule that produced `conjugator`, when searched.
    pub seed_index: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum RejectionCertificate {
    /// Some point element has an order that no element of `O(n, Z)` has.
    OrderObstruction { element: usize, matrix: RatMatrix, order: usize, available_orders: Vec<usize> },
    /// Some point element's (order, trace, det) is realized by no element of
    /// `O(n, Z)`; `candidates` lists the (trace, det) pairs of all elements of
    /// that order.
    CharacterMismatch { element: usize, matrix: RatMatrix, signature: Signature, candidates: Vec<(i64, i64)> },
    /// Every generator assignment compatible with the signatures was tried.
    NoEmbedding { candidates_per_generator: Vec<usize>, assignments_checked: usize },
}

impl RejectionCertificate {
    pub fn reason(&self) -> &'static str {
        match self {
            RejectionCertificate::OrderObstruction { .. } => "order-obstruction",
            RejectionCertificate::CharacterMismatch { .. } => "character-mismatch",
            RejectionCertificate::NoEmbedding { .. } => "no-embedding",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Accepted(HyperoctahedralWitness),
    Rejected(RejectionCertificate),
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted(_))
    }

    pub fn witness(&self) -> Option<&HyperoctahedralWitness> {
        match self {
            Verdict::Accepted(w) => Some(w),
            Verdict::Rejected(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&RejectionCertificate> {
        match self {
            Verdict::Accepted(_) => None,
            Verdict::Rejected(c) => Some(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ObstructionKind {
    OrderAbsent { available_orders: Vec<usize> },
    SignatureAbsent,
}

/// A point element whose signature no element of `O(n, Z)` has.
///
/// Violations are grouped by maximal cyclic subgroup: `element` generates a
/// cyclic subgroup not contained in any other violating one, and `covered`
/// lists every violating element inside it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Obstruction {
    pub element: usize,
    pub signature: Signature,
    pub kind: ObstructionKind,
    pub covered: Vec<usize>,
}

fn matrix_signature(g: &CrystGroup, k: usize) -> Signature {
    let m = g.point_group().element(k);
    let to_i64 = |r: crate::exactlin::Rational| r.to_integer().to_i64().expect("small integer");
    Signature {
        order: g.point_group().element_order(k),
        trace: to_i64(m.trace().expect("square")),
        determinant: to_i64(det(m).expect("square")),
    }
}

/// Signatures present in `O(n, Z)`, with the elements realizing each.
struct SignatureTable {
    elements: Vec<SignedPermutation>,
    by_signature: HashMap<Signature, Vec<usize>>,
    orders: BTreeSet<usize>,
}

impl SignatureTable {
    fn new(n: usize) -> Result<Self, DecideError> {
        let elements = enumerate_group(n)?;
        let mut by_signature: HashMap<Signature, Vec<usize>> = HashMap::new();
        for (i, s) in elements.iter().enumerate() {
            by_signature.entry(Signature::of_signed(s)).or_default().push(i);
        }
        let orders = by_signature.keys().map(|s| s.order).collect();
        Ok(SignatureTable { elements, by_signature, orders })
    }

    fn candidates_of_order(&self, order: usize) -> Vec<(i64, i64)> {
        let set: BTreeSet<(i64, i64)> =
            self.by_signature.keys().filter(|s| s.order == order).map(|s| (s.trace, s.determinant)).collect();
        set.into_iter().collect()
    }
}

fn check_rank(g: &CrystGroup) -> Result<usize, DecideError> {
    let n = g.dimension();
    if n == 0 || n > MAX_DECIDE_RANK {
        return Err(DecideError::Size { n });
    }
    Ok(n)
}

/// Per-element comparison against the signatures of `O(n, Z)`.
///
/// An empty result is necessary but not sufficient for acceptance.
pub fn quick_obstructions(g: &CrystGroup) -> Result<Vec<Obstruction>, DecideError> {
    let n = check_rank(g)?;
    let table = SignatureTable::new(n)?;
    let pg = g.point_group();
    let violating: Vec<usize> =
        (0..pg.order()).filter(|&k| !table.by_signature.contains_key(&matrix_signature(g, k))).collect();
    let cyclic = |x: usize| -> BTreeSet<usize> {
        let mut set = BTreeSet::from([0]);
        let mut cur = x;
        while cur != 0 {
            set.insert(cur);
            cur = pg.mul(cur, x);
        }
        set
    };
    let subgroups: Vec<BTreeSet<usize>> = violating.iter().map(|&x| cyclic(x)).collect();
    let mut out: Vec<Obstruction> = Vec::new();
    let mut reported: Vec<&BTreeSet<usize>> = Vec::new();
    for (i, &x) in violating.iter().enumerate() {
        let c = &subgroups[i];
        let dominated = subgroups.iter().any(|d| d.len() > c.len() && c.is_subset(d));
        if dominated || reported.contains(&c) {
            continue;
        }
        reported.push(c);
        let signature = matrix_signature(g, x);
        let kind = if table.orders.contains(&signature.order) {
            ObstructionKind::SignatureAbsent
        } else {
            ObstructionKind::OrderAbsent { available_orders: table.orders.iter().copied().collect() }
        };
        let covered = violating.iter().copied().filter(|v| c.contains(v)).collect();
        out.push(Obstruction { element: x, signature, kind, covered });
    }
    Ok(out)
}

/// Extends generator images along the BFS parent links of the point group.
/// Returns `None` unless the result is an injective homomorphism.
fn extend_images(g: &CrystGroup, gen_images: &[SignedPermutation]) -> Option<Vec<SignedPermutation>> {
    let pg = g.point_group();
    let n = g.dimension();
    let mut images: Vec<SignedPermutation> = Vec::with_capacity(pg.order());
    images.push(SignedPermutation::identity(n));
    for k in 1..pg.order() {
        let (parent, gen) = pg.parent(k).expect("non-identity element has a parent");
        images.push(images[parent].compose(&gen_images[gen]));
    }
    for k in 0..pg.order() {
        for (gi, &gk) in pg.generator_indices().iter().enumerate() {
            if images[pg.mul(k, gk)] != images[k].compose(&gen_images[gi]) {
                return None;
            }
        }
    }
    let distinct: std::collections::HashSet<_> = images.iter().collect();
    (distinct.len() == images.len()).then_some(images)
}

/// Deterministic seed matrices: the identity, then every `{0, 1}` matrix,
/// then every `{-1, 0, 1}` matrix, each family in counting order over the
/// row-major entries.
pub fn seed_schedule(n: usize) -> impl Iterator<Item = RatMatrix> {
    let cells = n * n;
    let binary = (1u64..1u64 << cells.min(40)).map(move |code| {
        let entries = (0..cells).map(|i| int(((code >> i) & 1) as i64)).collect();
        RatMatrix::new(n, n, entries).expect("square seed")
    });
    let ternary_limit = 3u64.checked_pow(cells as u32).unwrap_or(u64::MAX);
    let ternary = (1u64..ternary_limit).map(move |mut code| {
        let entries = (0..cells)
            .map(|_| {
                let digit = code % 3;
                code /= 3;
                int(match digit {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                })
            })
            .collect();
        RatMatrix::new(n, n, entries).expect("square seed")
    });
    std::iter::once(RatMatrix::identity(n))
        .chain(binary)
        .chain(ternary.filter(|m| m.entries().iter().any(|x| *x == int(-1))))
        .take(SEED_CAP)
}

fn conjugator(g: &CrystGroup, iota: &[SignedPermutation]) -> Result<(RatMatrix, usize), DecideError> {
    let theta = point_group_real(g);
    let iota_m: Vec<RatMatrix> = iota.iter().map(SignedPermutation::to_matrix).collect();
    for (i, seed) in seed_schedule(g.dimension()).enumerate() {
        let a = average_intertwiner(&theta, &iota_m, &seed)?;
        if !det(&a)?.is_zero() {
            return Ok((a, i));
        }
    }
    Err(DecideError::NoConjugator { seeds: SEED_CAP })
}

/// Residuals `A ι(p) A^-1 - θ̄(p)` for every point element, after checking
/// that `ι` is an injective homomorphism. All residuals are zero for a
/// valid witness.
pub fn verify_witness(g: &CrystGroup, w: &HyperoctahedralWitness) -> Result<Vec<RatMatrix>, DecideError> {
    let pg = g.point_group();
    if w.iota.len() != pg.order() {
        return Err(DecideError::WitnessCorruption(format!(
            "iota has {} images for {} point elements",
            w.iota.len(),
            pg.order()
        )));
    }
    for a in 0..pg.order() {
        for b in 0..pg.order() {
            if w.iota[pg.mul(a, b)] != w.iota[a].compose(&w.iota[b]) {
                return Err(DecideError::WitnessCorruption(format!("iota fails on the product of {a} and {b}")));
            }
        }
    }
    let distinct: std::collections::HashSet<_> = w.iota.iter().collect();
    if distinct.len() != w.iota.len() {
        return Err(DecideError::WitnessCorruption("iota is not injective".into()));
    }
    let a_inv = inverse(&w.conjugator)?;
    Ok(point_group_real(g)
        .iter()
        .zip(&w.iota)
        .map(|(theta, s)| &(&(&w.conjugator * &s.to_matrix()) * &a_inv) - theta)
        .collect())
}

fn finish(
    g: &CrystGroup,
    route: WitnessRoute,
    generator_images: Vec<SignedPermutation>,
    iota: Vec<SignedPermutation>,
    conjugator: RatMatrix,
    seed_index: Option<usize>,
) -> Result<HyperoctahedralWitness, DecideError> {
    let basis = conjugator.columns();
    let w = HyperoctahedralWitness { route, generator_images, iota, conjugator, basis, seed_index };
    let residuals = verify_witness(g, &w)?;
    if let Some(k) = residuals.iter().position(|r| !r.is_zero()) {
        return Err(DecideError::WitnessCorruption(format!("conjugation fails at point element {k}")));
    }
    Ok(w)
}

pub fn is_hyperoctahedral(g: &CrystGroup) -> Result<Verdict, DecideError> {
    let n = check_rank(g)?;
    let table = SignatureTable::new(n)?;
    let pg = g.point_group();

    let signatures: Vec<Signature> = (0..pg.order()).map(|k| matrix_signature(g, k)).collect();
    if let Some(k) = (0..pg.order()).find(|&k| !table.orders.contains(&signatures[k].order)) {
        return Ok(Verdict::Rejected(RejectionCertificate::OrderObstruction {
            element: k,
            matrix: pg.element(k).clone(),
            order: signatures[k].order,
            available_orders: table.orders.iter().copied().collect(),
        }));
    }
    if let Some(k) = (0..pg.order()).find(|&k| !table.by_signature.contains_key(&signatures[k])) {
        return Ok(Verdict::Rejected(RejectionCertificate::CharacterMismatch {
            element: k,
            matrix: pg.element(k).clone(),
            signature: signatures[k],
            candidates: table.candidates_of_order(signatures[k].order),
        }));
    }

    let native: Option<Vec<SignedPermutation>> =
        g.point_generators().iter().map(SignedPermutation::from_matrix).collect();
    if let Some(gen_images) = native {
        let iota = pg
            .elements()
            .iter()
            .map(|m| SignedPermutation::from_matrix(m).expect("closure of signed permutations"))
            .collect();
        let a = g.lattice_basis().clone();
        return Ok(Verdict::Accepted(finish(g, WitnessRoute::LatticeNative, gen_images, iota, a, None)?));
    }

    let candidates: Vec<&Vec<usize>> =
        pg.generator_indices().iter().map(|&k| &table.by_signature[&signatures[k]]).collect();
    let mut choice = vec![0usize; candidates.len()];
    let mut checked = 0usize;
    loop {
        let gen_images: Vec<SignedPermutation> =
            choice.iter().zip(&candidates).map(|(&c, cands)| table.elements[cands[c]].clone()).collect();
        checked += 1;
        if let Some(iota) = extend_images(g, &gen_images) {
            let character_ok = iota.iter().zip(&signatures).all(|(s, sig)| Signature::of_signed(s) == *sig);
            if character_ok {
                let (a, seed) = conjugator(g, &iota)?;
                return Ok(Verdict::Accepted(finish(g, WitnessRoute::Search, gen_images, iota, a, Some(seed))?));
            }
        }
        // advance the odometer, last generator fastest
        let mut pos = choice.len();
        loop {
            if pos == 0 {
                return Ok(Verdict::Rejected(RejectionCertificate::NoEmbedding {
                    candidates_per_generator: candidates.iter().map(|c| c.len()).collect(),
                    assignments_checked: checked,
                }));
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < candidates[pos].len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// The basis `ṫ_i = A e_i`, re-verified: each `θ̄(p)` must send `ṫ_i` to
/// `±ṫ_j` exactly as `ι(p)` dictates.
pub fn hyperoctahedral_basis(g: &CrystGroup, w: &HyperoctahedralWitness) -> Result<Vec<RatVector>, DecideError> {
    let basis = w.conjugator.columns();
    if basis.len() != g.dimension() || w.iota.len() != g.point_group().order() {
        return Err(DecideError::WitnessCorruption("witness does not match the group".into()));
    }
    for (k, theta) in point_group_real(g).iter().enumerate() {
        for (i, t) in basis.iter().enumerate() {
            let (sign, j) = w.iota[k].apply_axis(i);
            let expected = if sign > 0 { basis[j].clone() } else { -&basis[j] };
            if theta.mul_vec(t) != expected {
                return Err(DecideError::WitnessCorruption(format!(
                    "point element {k} does not send basis vector {i} to {}{}",
                    if sign > 0 { "+" } else { "-" },
                    j + 1
                )));
            }
        }
    }
    Ok(basis)
}
