//! The standard cubulation of a crystallographic group.
//!
//! Pick a basis `ṫ_1..ṫ_n` of `R^n`. Wall `X_i` is the span of the other
//! basis vectors, i.e. the kernel of the dual covector `ν_i`. The walls of
//! the cubulation are all `G`-translates of the `X_i`; up to translation
//! they fall into `N` parallelism classes, one per `P_G`-orbit of the lines
//! spanned by the `ν_i`. The resulting cube complex is a product of `N`
//! lines, and `G` acts on it through signed permutations of those lines.
//!
//! Covectors are row vectors. The image of the wall `{ν x = 0}` under a
//! linear map `T` is `{ν T^-1 x = 0}`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::crys::{point_group_real, CrysError, CrystGroup};
use crate::exactlin::{self, inverse, LinError, RatMatrix, RatVector, Rational};
use crate::sgnperm::{SgnPermError, SignedPermutation};

/// Side length of the sampling window used by [`sample_pairs`].
pub const SAMPLE_WINDOW: i64 = 10;
/// Coordinates of sampled points are multiples of `1 / SAMPLE_DENOMINATOR`.
pub const SAMPLE_DENOMINATOR: i64 = 8;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum WallsError {
    #[error("basis of {got} vectors does not span R^{n}")]
    Rank { n: usize, got: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("no sample pairs given")]
    NoSamples,
    #[error("linear separation fails for sample pair {index}: {detail}")]
    PropertyViolation { index: usize, detail: String },
    #[error("point element {element} does not permute the wall classes")]
    ClassNotPreserved { element: usize },
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error(transparent)]
    Crys(#[from] CrysError),
    #[error(transparent)]
    SgnPerm(#[from] SgnPermError),
}

/// The affine hyperplane `{x : normal · x = offset}`.
///
/// The normal is stored in canonical form: coprime integers with positive
/// leading entry. The closed side `normal · x <= offset` is the one called
/// `h*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeometricWall {
    normal: RatVector,
    #[serde(with = "exactlin::serde_rational")]
    offset: Rational,
}

impl GeometricWall {
    /// Rescales `(normal, offset)` so the normal is canonical. Note that this
    /// may swap which side is `h*`.
    pub fn new(normal: RatVector, offset: Rational) -> Result<Self, WallsError> {
        let (normal, k) = normal.primitive().ok_or_else(|| WallsError::Dimension("wall normal is zero".into()))?;
        Ok(GeometricWall { normal, offset: offset * k })
    }

    pub fn normal(&self) -> &RatVector {
        &self.normal
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn dimension(&self) -> usize {
        self.normal.len()
    }

    /// `normal · x - offset`; negative on the open `h*` side.
    pub fn evaluate(&self, x: &RatVector) -> Rational {
        self.normal.dot(x) - &self.offset
    }
}

/// Dual covectors of a basis: row `i` of the inverse of the basis matrix.
pub fn dual_covectors(basis: &[RatVector]) -> Result<Vec<RatVector>, WallsError> {
    let n = basis.first().map_or(0, RatVector::len);
    if n == 0 || basis.len() != n {
        return Err(WallsError::Rank { n, got: basis.len() });
    }
    let b = RatMatrix::from_columns(basis).map_err(|e| WallsError::Dimension(e.to_string()))?;
    match inverse(&b) {
        Ok(inv) => Ok((0..n).map(|i| inv.row(i)).collect()),
        Err(LinError::Singular { .. }) => Err(WallsError::Rank { n, got: basis.len() }),
        Err(e) => Err(e.into()),
    }
}

fn check_basis(g: &CrystGroup, basis: &[RatVector]) -> Result<Vec<RatVector>, WallsError> {
    if basis.iter().any(|v| v.len() != g.dimension()) || basis.len() != g.dimension() {
        return Err(WallsError::Dimension(format!(
            "a basis of R^{} needs {} vectors of that length",
            g.dimension(),
            g.dimension()
        )));
    }
    dual_covectors(basis)
}

/// The walls `X_i` through the origin, one per basis vector.
pub fn standard_walls(g: &CrystGroup, basis: &[RatVector]) -> Result<Vec<GeometricWall>, WallsError> {
    check_basis(g, basis)?.into_iter().map(|nu| GeometricWall::new(nu, Rational::zero())).collect()
}

/// One parallelism class of walls.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WallClass {
    /// Canonical normal; its direction is the positive direction of the class.
    pub normal: RatVector,
    /// The class contains the image of base wall `base` under point element `element`.
    pub base: usize,
    pub element: usize,
    /// `ν_base · θ̄(element)^-1`, negated if needed to be a positive multiple of `normal`.
    pub covector: RatVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WallFamily {
    pub basis: Vec<RatVector>,
    /// Dual covectors `ν_i`, with `ν_i(ṫ_j) = δ_ij`.
    pub dual: Vec<RatVector>,
    /// Spacing between consecutive lattice translates of `X_i`, measured by `ν_i`.
    #[serde(with = "rational_list")]
    pub spacings: Vec<Rational>,
    /// The first `n` classes are those of the base walls, in order.
    pub classes: Vec<WallClass>,
}

mod rational_list {
    use serde::Serializer;

    use crate::exactlin::{format_rational, Rational};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }
}

impl WallFamily {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// `N`, the number of wall classes.
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of_normal(&self, normal: &RatVector) -> Option<usize> {
        self.classes.iter().position(|c| &c.normal == normal)
    }
}

/// Positive generator of the additive group generated by `values`.
fn rational_gcd(values: impl IntoIterator<Item = Rational>) -> Rational {
    let values: Vec<Rational> = values.into_iter().collect();
    let lcm = values.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let gcd = values
        .iter()
        .map(|x| (x * Rational::from_integer(lcm.clone())).to_integer())
        .fold(BigInt::zero(), |acc, x| acc.gcd(&x));
    Rational::new(gcd, lcm)
}

pub fn direction_class_count(g: &CrystGroup, basis: &[RatVector]) -> Result<WallFamily, WallsError> {
    let dual = check_basis(g, basis)?;
    let lattice = g.lattice_vectors();
    let spacings = dual.iter().map(|nu| rational_gcd(lattice.iter().map(|l| nu.dot(l)))).collect();

    let pg = g.point_group();
    let theta = point_group_real(g);
    let mut classes: Vec<WallClass> = Vec::new();
    for k in 0..pg.order() {
        let theta_inv = &theta[pg.inverse(k)];
        for (i, nu) in dual.iter().enumerate() {
            let image = theta_inv.vec_mul(nu);
            let (normal, scale) = image.primitive().expect("image of a nonzero covector");
            if classes.iter().any(|c| c.normal == normal) {
                continue;
            }
            let covector = if scale.is_negative() { -&image } else { image };
            classes.push(WallClass { normal, base: i, element: k, covector });
        }
    }
    Ok(WallFamily { basis: basis.to_vec(), dual, spacings, classes })
}

/// Number of lattice translates of the base walls strictly separating `p`
/// from `q`. A wall through `p` or `q` does not separate them.
pub fn separation_count(p: &RatVector, q: &RatVector, fam: &WallFamily) -> u64 {
    fam.dual
        .iter()
        .zip(&fam.spacings)
        .map(|(nu, d)| {
            let a = nu.dot(p) / d;
            let b = nu.dot(q) / d;
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let between = hi.ceil().to_integer() - lo.floor().to_integer() - BigInt::one();
            between.max(BigInt::zero()).to_u64().expect("separation count fits in u64")
        })
        .sum()
}

/// Number of lattice translates of the base walls passing through `x`.
pub fn walls_through(x: &RatVector, fam: &WallFamily) -> u64 {
    fam.dual.iter().zip(&fam.spacings).filter(|(nu, d)| (nu.dot(x) / *d).is_integer()).count() as u64
}

/// `Σ |ν_i(p - q)| / d_i - n`, the lower bound for [`separation_count`].
pub fn separation_lower_bound(p: &RatVector, q: &RatVector, fam: &WallFamily) -> Rational {
    let r = p - q;
    let total: Rational = fam.dual.iter().zip(&fam.spacings).map(|(nu, d)| nu.dot(&r).abs() / d).sum();
    total - Rational::from_integer(fam.dimension().into())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    pub pairs: usize,
    /// `max_i |ṫ_i|^2`.
    #[serde(with = "exactlin::serde_rational")]
    pub max_basis_norm_sq: Rational,
    /// Largest value of `|r1 - r2|^2 / (max_i |ṫ_i|^2 (# + n)^2)` over the pairs.
    #[serde(with = "exactlin::serde_rational")]
    pub worst_ratio: Rational,
    pub worst_pair: usize,
    /// Smallest value of `# - (Σ |ν_i| - n)` over the pairs.
    #[serde(with = "exactlin::serde_rational")]
    pub min_lower_slack: Rational,
}

/// Checks `|r1 - r2|^2 <= max_i |ṫ_i|^2 (# + n)^2` and `# >= Σ |ν_i| - n` on
/// every pair, exactly.
pub fn check_linear_separation(
    g: &CrystGroup,
    fam: &WallFamily,
    samples: &[(RatVector, RatVector)],
) -> Result<SeparationReport, WallsError> {
    if samples.is_empty() {
        return Err(WallsError::NoSamples);
    }
    let n = fam.dimension();
    if n != g.dimension() {
        return Err(WallsError::Dimension(format!("family of rank {n} for a group of rank {}", g.dimension())));
    }
    let max_norm = fam.basis.iter().map(RatVector::norm_sq).max().expect("nonempty basis");
    let mut report = SeparationReport {
        pairs: samples.len(),
        max_basis_norm_sq: max_norm.clone(),
        worst_ratio: Rational::zero(),
        worst_pair: 0,
        min_lower_slack: Rational::zero(),
    };
    for (index, (p, q)) in samples.iter().enumerate() {
        if p.len() != n || q.len() != n {
            return Err(WallsError::Dimension(format!("sample pair {index} is not in R^{n}")));
        }
        let count = separation_count(p, q, fam);
        let lhs = (p - q).norm_sq();
        let factor = Rational::from_integer((count + n as u64).into());
        let rhs = &max_norm * &factor * &factor;
        if lhs > rhs {
            return Err(WallsError::PropertyViolation {
                index,
                detail: format!("|r1 - r2|^2 = {lhs} exceeds {rhs} with {count} separating walls"),
            });
        }
        let slack = Rational::from_integer(count.into()) - separation_lower_bound(p, q, fam);
        if slack.is_negative() {
            return Err(WallsError::PropertyViolation {
                index,
                detail: format!("{count} separating walls is below the lower bound by {}", -slack),
            });
        }
        let ratio = lhs / rhs;
        if index == 0 || ratio > report.worst_ratio {
            report.worst_ratio = ratio;
            report.worst_pair = index;
        }
        if index == 0 || slack < report.min_lower_slack {
            report.min_lower_slack = slack;
        }
    }
    Ok(report)
}

/// Deterministic sample pairs in `[0, SAMPLE_WINDOW)^n`.
pub fn sample_pairs(n: usize, count: usize, seed: u64) -> Vec<(RatVector, RatVector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| {
        RatVector(
            (0..n)
                .map(|_| exactlin::rat(rng.gen_range(0..SAMPLE_WINDOW * SAMPLE_DENOMINATOR), SAMPLE_DENOMINATOR))
                .collect(),
        )
    };
    (0..count).map(|_| (point(&mut rng), point(&mut rng))).collect()
}

/// The signed permutation of wall classes induced by each point element.
///
/// Class `k` goes to the class of `normal_k · θ̄(p)^-1 = λ normal_j`, with the
/// sign of `λ`.
pub fn induced_action_on_rn(g: &CrystGroup, fam: &WallFamily) -> Result<Vec<SignedPermutation>, WallsError> {
    let pg = g.point_group();
    let theta = point_group_real(g);
    (0..pg.order())
        .map(|k| {
            let theta_inv = &theta[pg.inverse(k)];
            let mut perm = Vec::with_capacity(fam.class_count());
            let mut signs = Vec::with_capacity(fam.class_count());
            for class in &fam.classes {
                let (normal, scale) = theta_inv.vec_mul(&class.normal).primitive().expect("nonzero normal");
                let j = fam.class_of_normal(&normal).ok_or(WallsError::ClassNotPreserved { element: k })?;
                perm.push(j);
                signs.push(if scale.is_negative() { -1 } else { 1 });
            }
            SignedPermutation::new(perm, signs).map_err(|_| WallsError::ClassNotPreserved { element: k })
        })
        .collect()
}

/// The group acting on `R^N` through the standard cubulation built from the
/// lattice basis: lattice `Z^N`, point generators the induced signed
/// permutations, translation parts read off by the class covectors.
pub fn stabilize(g: &CrystGroup) -> Result<CrystGroup, WallsError> {
    let fam = direction_class_count(g, &g.lattice_vectors())?;
    let action = induced_action_on_rn(g, &fam)?;
    let big_n = fam.class_count();
    let lattice = g.lattice_basis();
    // class covectors in lattice coordinates; integral since M_p is unimodular
    let coords: Vec<RatVector> = fam.classes.iter().map(|c| lattice.vec_mul(&c.covector)).collect();
    debug_assert!(coords.iter().all(RatVector::is_integral));
    let pg = g.point_group();
    let generators = pg.generator_indices().iter().map(|&k| action[k].to_matrix()).collect();
    let translations =
        g.translation_parts().iter().map(|tau| RatVector(coords.iter().map(|c| c.dot(tau)).collect())).collect();
    let m = big_n - g.dimension();
    let name = if m == 0 { g.name().to_string() } else { format!("Z^{m} x| {}", g.name()) };
    Ok(CrystGroup::new(name, RatMatrix::identity(big_n), generators, translations)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crys::{catalog_entry, load_catalog};
    use crate::decide::{is_hyperoctahedral, verify_witness, WitnessRoute};
    use crate::exactlin::{int, rat};
    use crate::sgnperm::classify_element;
    use proptest::prelude::*;

    fn entry(name: &str) -> CrystGroup {
        catalog_entry(name).unwrap()
    }

    fn v(xs: &[Rational]) -> RatVector {
        RatVector(xs.to_vec())
    }

    #[test]
    fn standard_wall_examples() {
        let sq = entry("p4m");
        let walls = standard_walls(&sq, &sq.lattice_vectors()).unwrap();
        assert_eq!(walls[0].normal(), &RatVector::from_i64(&[1, 0]));
        assert_eq!(walls[1].normal(), &RatVector::from_i64(&[0, 1]));
        assert!(walls.iter().all(|w| w.offset().is_zero()));

        let line = CrystGroup::new("Z", RatMatrix::identity(1), vec![], vec![]).unwrap();
        let walls = standard_walls(&line, &line.lattice_vectors()).unwrap();
        assert_eq!(walls.len(), 1);
        assert_eq!(walls[0].normal(), &RatVector::from_i64(&[1]));

        let cm = entry("cm");
        let basis = cm.lattice_vectors();
        let walls = standard_walls(&cm, &basis).unwrap();
        // wall i contains the other basis vector
        assert!(walls[0].evaluate(&basis[1]).is_zero());
        assert!(walls[1].evaluate(&basis[0]).is_zero());
        assert!(!walls[0].evaluate(&basis[0]).is_zero());
    }

    #[test]
    fn dependent_basis_is_rejected() {
        let sq = entry("p4m");
        let bad = vec![RatVector::from_i64(&[1, 2]), RatVector::from_i64(&[2, 4])];
        assert!(matches!(standard_walls(&sq, &bad), Err(WallsError::Rank { .. })));
        assert!(matches!(direction_class_count(&sq, &bad), Err(WallsError::Rank { .. })));
    }

    #[test]
    fn class_count_examples() {
        let p1 = entry("p1");
        assert_eq!(direction_class_count(&p1, &p1.lattice_vectors()).unwrap().class_count(), 2);
        let p4m = entry("p4m");
        assert_eq!(direction_class_count(&p4m, &p4m.lattice_vectors()).unwrap().class_count(), 2);
        for name in ["p3", "p3m1", "p31m", "p6", "p6m", "W"] {
            let g = entry(name);
            let fam = direction_class_count(&g, &g.lattice_vectors()).unwrap();
            assert_eq!(fam.class_count(), 3, "{name}");
        }
    }

    #[test]
    fn w_classes_are_the_three_lattice_directions() {
        // In the plane the wall X_1 is the line through b, X_2 the line through a.
        let g = entry("W");
        let fam = direction_class_count(&g, &g.lattice_vectors()).unwrap();
        let lv = g.lattice_vectors();
        let a_minus_b = &lv[0] - &lv[1];
        let contains = |normal: &RatVector, x: &RatVector| normal.dot(x).is_zero();
        let lines = [&lv[1], &lv[0], &a_minus_b];
        for (class, line) in fam.classes.iter().zip(lines) {
            assert!(contains(&class.normal, line));
        }
    }

    #[test]
    fn separation_examples() {
        let sq = entry("p4m");
        let fam = direction_class_count(&sq, &sq.lattice_vectors()).unwrap();
        let p = v(&[rat(1, 4), rat(1, 4)]);
        let q = v(&[rat(11, 4), rat(7, 4)]);
        assert_eq!(separation_count(&p, &p, &fam), 0);
        assert_eq!(separation_count(&p, &q, &fam), 3);
        assert_eq!(separation_lower_bound(&p, &q, &fam), int(2));

        // walls through an endpoint do not separate
        let on_wall = v(&[int(1), rat(1, 4)]);
        assert_eq!(separation_count(&on_wall, &v(&[int(3), rat(1, 4)]), &fam), 1);
        assert_eq!(walls_through(&on_wall, &fam), 1);
        let a = v(&[rat(1, 2), rat(1, 4)]);
        let b = v(&[rat(3, 2), rat(1, 4)]);
        assert_eq!(separation_count(&a, &b, &fam), 1);
        assert_eq!(separation_count(&a, &on_wall, &fam) + separation_count(&on_wall, &b, &fam), 0);

        let report = check_linear_separation(&sq, &fam, &[(p.clone(), q.clone())]).unwrap();
        assert_eq!(report.worst_ratio, rat(17, 2) / int(25));
        let report = check_linear_separation(&sq, &fam, &[(p.clone(), p)]).unwrap();
        assert_eq!(report.worst_ratio, int(0));
        assert_eq!(check_linear_separation(&sq, &fam, &[]), Err(WallsError::NoSamples));
    }

    #[test]
    fn spacing_for_a_sublattice_basis() {
        // Half the lattice basis: translates of X_i sit at every second ν_i-level.
        let sq = entry("p4m");
        let basis = vec![v(&[rat(1, 2), int(0)]), v(&[int(0), rat(1, 2)])];
        let fam = direction_class_count(&sq, &basis).unwrap();
        assert_eq!(fam.spacings, vec![int(2), int(2)]);
        let p = v(&[rat(1, 4), rat(1, 4)]);
        let q = v(&[rat(11, 4), rat(7, 4)]);
        assert_eq!(separation_count(&p, &q, &fam), 3);
    }

    #[test]
    fn catalog_linear_separation() {
        for g in load_catalog().unwrap() {
            let fam = direction_class_count(&g, &g.lattice_vectors()).unwrap();
            let samples = sample_pairs(g.dimension(), 100, 0);
            let report = check_linear_separation(&g, &fam, &samples).unwrap();
            assert!(report.worst_ratio <= int(1), "{}", g.name());
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(sample_pairs(2, 10, 7), sample_pairs(2, 10, 7));
        assert_ne!(sample_pairs(2, 10, 7), sample_pairs(2, 10, 8));
    }

    #[test]
    fn induced_action_examples() {
        let p4 = entry("p4");
        let fam = direction_class_count(&p4, &p4.lattice_vectors()).unwrap();
        let action = induced_action_on_rn(&p4, &fam).unwrap();
        assert!(action[0].is_identity());
        let rot = &action[p4.point_group().generator_indices()[0]];
        assert_eq!(rot.perm(), &[1, 0]);
        assert_eq!(rot.signs().iter().filter(|&&s| s == -1).count(), 1);

        let zsw = entry("ZsW");
        let w = is_hyperoctahedral(&zsw).unwrap().witness().cloned().unwrap();
        let fam = direction_class_count(&zsw, &w.basis).unwrap();
        assert_eq!(fam.class_count(), 3);
        let action = induced_action_on_rn(&zsw, &fam).unwrap();
        let c = classify_element(&action[zsw.point_group().generator_indices()[0]]);
        assert_eq!((c.order, c.determinant), (6, -1));

        let w_group = entry("W");
        let fam = direction_class_count(&w_group, &w_group.lattice_vectors()).unwrap();
        let action = induced_action_on_rn(&w_group, &fam).unwrap();
        let c = classify_element(&action[w_group.point_group().generator_indices()[0]]);
        assert_eq!((c.order, c.determinant), (6, -1));
    }

    #[test]
    fn extension_class_counts() {
        let zsw = entry("ZsW");
        assert_eq!(direction_class_count(&zsw, &zsw.lattice_vectors()).unwrap().class_count(), 4);
        let zxw = entry("ZxW");
        assert_eq!(direction_class_count(&zxw, &zxw.lattice_vectors()).unwrap().class_count(), 4);
    }

    #[test]
    fn catalog_class_count_bounds_and_homomorphism() {
        for g in load_catalog().unwrap() {
            let fam = direction_class_count(&g, &g.lattice_vectors()).unwrap();
            let n = g.dimension();
            let big_n = fam.class_count();
            assert!(n <= big_n && big_n <= n * g.point_group().order(), "{}", g.name());
            let action = induced_action_on_rn(&g, &fam).unwrap();
            let pg = g.point_group();
            for a in 0..pg.order() {
                for b in 0..pg.order() {
                    assert_eq!(action[pg.mul(a, b)], action[a].compose(&action[b]), "{}", g.name());
                }
            }
        }
    }

    #[test]
    fn accepted_groups_have_n_classes_in_the_witness_basis() {
        for g in load_catalog().unwrap() {
            if let Some(w) = is_hyperoctahedral(&g).unwrap().witness() {
                let fam = direction_class_count(&g, &w.basis).unwrap();
                assert_eq!(fam.class_count(), g.dimension(), "{}", g.name());
            }
        }
    }

    #[test]
    fn stabilize_examples() {
        let p4m = stabilize(&entry("p4m")).unwrap();
        assert_eq!(p4m.dimension(), 2);
        let w = is_hyperoctahedral(&p4m).unwrap().witness().cloned().unwrap();
        assert!(w.conjugator.is_identity());

        for name in ["p6", "W"] {
            let s = stabilize(&entry(name)).unwrap();
            assert_eq!(s.dimension(), 3, "{name}");
            let w = is_hyperoctahedral(&s).unwrap().witness().cloned().unwrap();
            assert_eq!(w.route, WitnessRoute::LatticeNative);
            assert!(w.conjugator.is_identity());
            assert!(verify_witness(&s, &w).unwrap().iter().all(RatMatrix::is_zero));
            let c = classify_element(&w.generator_images[0]);
            assert_eq!((c.order, c.determinant), (6, -1), "{name}");
        }
    }

    #[test]
    fn stabilize_keeps_glide_translations_outside_the_lattice() {
        let pg = entry("pg");
        let s = stabilize(&pg).unwrap();
        assert_eq!(s.translation_parts()[0], v(&[int(0), rat(1, 2)]));
    }

    #[test]
    fn stabilize_is_idempotent_in_dimension() {
        for g in load_catalog().unwrap() {
            let s = stabilize(&g).unwrap();
            let fam = direction_class_count(&s, &s.lattice_vectors()).unwrap();
            assert_eq!(fam.class_count(), s.dimension(), "{}", g.name());
            assert_eq!(stabilize(&s).unwrap().dimension(), s.dimension());
        }
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-40i64..40, 1i64..6).prop_map(|(p, q)| rat(p, q))
    }

    fn point() -> impl Strategy<Value = RatVector> {
        proptest::collection::vec(small_rational(), 2).prop_map(RatVector)
    }

    proptest! {
        #[test]
        fn separation_is_symmetric_and_vanishes_on_the_diagonal(p in point(), q in point()) {
            let g = entry("p6");
            let fam = direction_class_count(&g, &g.lattice_vectors()).unwrap();
            prop_assert_eq!(separation_count(&p, &q, &fam), separation_count(&q, &p, &fam));
            prop_assert_eq!(separation_count(&p, &p, &fam), 0);
        }

        #[test]
        fn separation_triangle_inequality_on_collinear_triples(
            p in point(), q in point(), t in 0i64..=12
        ) {
            let g = entry("cmm");
            let fam = direction_class_count(&g, &g.lattice_vectors()).unwrap();
            let s = rat(t, 12);
            let mid = &p + &(&q - &p).scale(&s);
            let direct = separation_count(&p, &q, &fam);
            let split = separation_count(&p, &mid, &fam) + separation_count(&mid, &q, &fam);
            // a wall through the middle point separates p from q but neither half
            let on_mid = walls_through(&mid, &fam);
            prop_assert!(direct <= split + on_mid);
            if on_mid == 0 {
                prop_assert!(direct <= split);
            }
        }

        #[test]
        fn linear_separation_holds_for_random_pairs(p in point(), q in point()) {
            for name in ["pgg", "p31m", "W"] {
                let g = entry(name);
                let fam = direction_class_count(&g, &g.lattice_vectors()).unwrap();
                prop_assert!(check_linear_separation(&g, &fam, &[(p.clone(), q.clone())]).is_ok());
            }
        }
    }
}
