//! Crystallographic groups: data model, validation, catalog and extensions.
//!
//! A group is described by its lattice basis `L` (columns are the
//! translation generators in ambient coordinates), integer point generators
//! `M_p` acting on lattice coordinates, and one translation part per
//! generator, also in lattice coordinates. The real point-group action is
//! derived as `L * M_p * L^-1`.

use std::collections::HashMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::exactlin::{det, element_order, inverse, LinError, RatMatrix, RatVector, Rational};

/// On-disk format tag for group files.
pub const GROUP_FORMAT: &str = "cubecrys-group/1";
/// Upper bound on the size of any point group we will enumerate.
pub const POINT_GROUP_CAP: usize = 200;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum CrysError {
    #[error("point generator {index} has infinite order (no power up to {cap} is the identity)")]
    InfiniteOrder { index: usize, cap: usize },
    #[error("point group closure exceeds {cap} elements")]
    ClosureTooLarge { cap: usize },
    #[error("point generator {index} has a non-integer entry, so it does not preserve the lattice")]
    LatticeInvariance { index: usize },
    #[error("lattice basis is singular")]
    SingularBasis,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("extension action does not respect the point group relations ({extended} elements instead of {original})")]
    Extension { original: usize, extended: usize },
    #[error("declared point group order {declared} but closure has {actual} elements")]
    DeclaredOrder { declared: usize, actual: usize },
    #[error("unsupported group file format {0:?}")]
    Format(String),
    #[error("catalog entry {name}: {source}")]
    Catalog { name: String, source: Box<CrysError> },
    #[error("malformed group file: {0}")]
    Parse(String),
    #[error(transparent)]
    Lin(#[from] LinError),
}

/// Unvalidated group data, as read from a file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFile {
    pub format: String,
    pub name: String,
    pub dimension: usize,
    pub lattice_basis: RatMatrix,
    pub point_generators: Vec<RatMatrix>,
    pub translation_parts: Vec<RatVector>,
    /// Optional metadata: expected order of the point group.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point_group_order: Option<usize>,
}

impl GroupFile {
    pub fn parse(text: &str) -> Result<GroupFile, CrysError> {
        let file: GroupFile = serde_json::from_str(text).map_err(|e| CrysError::Parse(e.to_string()))?;
        if file.format != GROUP_FORMAT {
            return Err(CrysError::Format(file.format));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("group file serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub name: String,
    pub dimension: usize,
    pub point_group_order: usize,
    pub generator_orders: Vec<usize>,
    /// Orders of all point elements, in enumeration order.
    pub element_orders: Vec<usize>,
    /// Whether every translation part lies in the lattice. Informational only.
    pub translations_in_lattice: bool,
}

/// A finite group of integer matrices, enumerated breadth-first from the
/// identity by right multiplication with the generators.
#[derive(Clone, Debug)]
pub struct PointGroup {
    elements: Vec<RatMatrix>,
    index: HashMap<RatMatrix, usize>,
    /// `parent[k] = (j, g)` means `elements[k] = elements[j] * generators[g]`.
    parent: Vec<Option<(usize, usize)>>,
    generator_index: Vec<usize>,
    table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
    orders: Vec<usize>,
}

impl PointGroup {
    fn close(dim: usize, generators: &[RatMatrix]) -> Result<PointGroup, CrysError> {
        let id = RatMatrix::identity(dim);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut parent = vec![None];
        let mut head = 0;
        while head < elements.len() {
            for (g, gen) in generators.iter().enumerate() {
                let prod = &elements[head] * gen;
                if !index.contains_key(&prod) {
                    if elements.len() == POINT_GROUP_CAP {
                        return Err(CrysError::ClosureTooLarge { cap: POINT_GROUP_CAP });
                    }
                    index.insert(prod.clone(), elements.len());
                    elements.push(prod);
                    parent.push(Some((head, g)));
                }
            }
            head += 1;
        }
        let generator_index = generators.iter().map(|g| index[g]).collect();
        let table: Vec<Vec<usize>> =
            elements.iter().map(|a| elements.iter().map(|b| index[&(a * b)]).collect()).collect();
        let inverses = (0..elements.len())
            .map(|a| table[a].iter().position(|&c| c == 0).expect("finite group has inverses"))
            .collect();
        let orders = (0..elements.len())
            .map(|a| {
                let (mut k, mut cur) = (1, a);
                while cur != 0 {
                    cur = table[cur][a];
                    k += 1;
                }
                k
            })
            .collect();
        Ok(PointGroup { elements, index, parent, generator_index, table, inverses, orders })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[RatMatrix] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &RatMatrix {
        &self.elements[k]
    }

    pub fn index_of(&self, m: &RatMatrix) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Index of the product `elements[a] * elements[b]`.
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn element_order(&self, a: usize) -> usize {
        self.orders[a]
    }

    pub fn parent(&self, k: usize) -> Option<(usize, usize)> {
        self.parent[k]
    }

    /// Element index of each generator.
    pub fn generator_indices(&self) -> &[usize] {
        &self.generator_index
    }
}

/// A validated crystallographic group.
#[derive(Clone, Debug)]
pub struct CrystGroup {
    name: String,
    dimension: usize,
    lattice_basis: RatMatrix,
    lattice_inverse: RatMatrix,
    point_generators: Vec<RatMatrix>,
    translation_parts: Vec<RatVector>,
    point_group: PointGroup,
}

impl CrystGroup {
    pub fn new(
        name: impl Into<String>,
        lattice_basis: RatMatrix,
        point_generators: Vec<RatMatrix>,
        translation_parts: Vec<RatVector>,
    ) -> Result<Self, CrysError> {
        let n = lattice_basis.rows();
        if !lattice_basis.is_square() {
            return Err(CrysError::Dimension(format!(
                "lattice basis is {}x{}",
                lattice_basis.rows(),
                lattice_basis.cols()
            )));
        }
        if det(&lattice_basis)?.is_zero() {
            return Err(CrysError::SingularBasis);
        }
        if translation_parts.len() != point_generators.len() {
            return Err(CrysError::Dimension(format!(
                "{} point generators but {} translation parts",
                point_generators.len(),
                translation_parts.len()
            )));
        }
        for (i, m) in point_generators.iter().enumerate() {
            if m.rows() != n || m.cols() != n {
                return Err(CrysError::Dimension(format!(
                    "point generator {i} is {}x{}, expected {n}x{n}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.is_integral() {
                return Err(CrysError::LatticeInvariance { index: i });
            }
            if element_order(m, POINT_GROUP_CAP)?.is_none() {
                return Err(CrysError::InfiniteOrder { index: i, cap: POINT_GROUP_CAP });
            }
        }
        if let Some((i, t)) = translation_parts.iter().enumerate().find(|(_, t)| t.len() != n) {
            return Err(CrysError::Dimension(format!("translation part {i} has length {}", t.len())));
        }
        let point_group = PointGroup::close(n, &point_generators)?;
        let lattice_inverse = inverse(&lattice_basis)?;
        Ok(CrystGroup {
            name: name.into(),
            dimension: n,
            lattice_basis,
            lattice_inverse,
            point_generators,
            translation_parts,
            point_group,
        })
    }

    pub fn from_file(file: &GroupFile) -> Result<Self, CrysError> {
        if file.dimension != file.lattice_basis.rows() {
            return Err(CrysError::Dimension(format!(
                "declared dimension {} but lattice basis has {} rows",
                file.dimension,
                file.lattice_basis.rows()
            )));
        }
        let g = CrystGroup::new(
            file.name.clone(),
            file.lattice_basis.clone(),
            file.point_generators.clone(),
            file.translation_parts.clone(),
        )?;
        if let Some(declared) = file.point_group_order {
            if declared != g.point_group.order() {
                return Err(CrysError::DeclaredOrder { declared, actual: g.point_group.order() });
            }
        }
        Ok(g)
    }

    pub fn to_file(&self) -> GroupFile {
        GroupFile {
            format: GROUP_FORMAT.to_string(),
            name: self.name.clone(),
            dimension: self.dimension,
            lattice_basis: self.lattice_basis.clone(),
            point_generators: self.point_generators.clone(),
            translation_parts: self.translation_parts.clone(),
            point_group_order: Some(self.point_group.order()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn lattice_basis(&self) -> &RatMatrix {
        &self.lattice_basis
    }

    pub fn point_generators(&self) -> &[RatMatrix] {
        &self.point_generators
    }

    pub fn translation_parts(&self) -> &[RatVector] {
        &self.translation_parts
    }

    pub fn point_group(&self) -> &PointGroup {
        &self.point_group
    }

    /// Point elements in lattice coordinates.
    pub fn point_elements(&self) -> &[RatMatrix] {
        self.point_group.elements()
    }

    /// `L * M * L^-1` for a lattice-coordinate matrix `M`.
    pub fn real_form(&self, m: &RatMatrix) -> RatMatrix {
        &(&self.lattice_basis * m) * &self.lattice_inverse
    }

    /// Lattice basis vectors in ambient coordinates.
    pub fn lattice_vectors(&self) -> Vec<RatVector> {
        self.lattice_basis.columns()
    }
}

pub fn validate(file: &GroupFile) -> Result<ValidationReport, CrysError> {
    let g = CrystGroup::from_file(file)?;
    Ok(report_for(&g))
}

pub fn report_for(g: &CrystGroup) -> ValidationReport {
    let pg = g.point_group();
    ValidationReport {
        name: g.name.clone(),
        dimension: g.dimension,
        point_group_order: pg.order(),
        generator_orders: pg.generator_indices().iter().map(|&k| pg.element_order(k)).collect(),
        element_orders: (0..pg.order()).map(|k| pg.element_order(k)).collect(),
        translations_in_lattice: g.translation_parts.iter().all(RatVector::is_integral),
    }
}

/// The real point-group action `θ̄(p) = L * M_p * L^-1`, paired with
/// [`CrystGroup::point_elements`].
pub fn point_group_real(g: &CrystGroup) -> Vec<RatMatrix> {
    g.point_elements().iter().map(|m| g.real_form(m)).collect()
}

/// `Z^m ⋊ g`, where each point generator acts on `Z^m` by the matching
/// integer matrix in `action`.
pub fn semidirect_extend(g: &CrystGroup, m: usize, action: &[RatMatrix]) -> Result<CrystGroup, CrysError> {
    if m == 0 {
        return Ok(g.clone());
    }
    if action.len() != g.point_generators.len() {
        return Err(CrysError::Dimension(format!(
            "{} action matrices for {} point generators",
            action.len(),
            g.point_generators.len()
        )));
    }
    if let Some(bad) = action.iter().find(|a| a.rows() != m || a.cols() != m) {
        return Err(CrysError::Dimension(format!("action matrix is {}x{}, expected {m}x{m}", bad.rows(), bad.cols())));
    }
    let gens = g.point_generators.iter().zip(action).map(|(p, a)| RatMatrix::block_diag(p, a)).collect();
    let lattice = RatMatrix::block_diag(&g.lattice_basis, &RatMatrix::identity(m));
    let translations = g
        .translation_parts
        .iter()
        .map(|t| RatVector(t.iter().cloned().chain(std::iter::repeat_n(Rational::zero(), m)).collect()))
        .collect();
    let name = format!("Z^{m} x| {}", g.name);
    let ext = match CrystGroup::new(name, lattice, gens, translations) {
        Err(CrysError::ClosureTooLarge { .. }) => {
            return Err(CrysError::Extension { original: g.point_group.order(), extended: POINT_GROUP_CAP })
        }
        other => other?,
    };
    if ext.point_group.order() != g.point_group.order() {
        return Err(CrysError::Extension { original: g.point_group.order(), extended: ext.point_group.order() });
    }
    Ok(ext)
}

const CATALOG: &[(&str, &str)] = &[
    ("p1", include_str!("../data/p1.json")),
    ("p2", include_str!("../data/p2.json")),
    ("pm", include_str!("../data/pm.json")),
    ("pg", include_str!("../data/pg.json")),
    ("cm", include_str!("../data/cm.json")),
    ("pmm", include_str!("../data/pmm.json")),
    ("pmg", include_str!("../data/pmg.json")),
    ("pgg", include_str!("../data/pgg.json")),
    ("cmm", include_str!("../data/cmm.json")),
    ("p4", include_str!("../data/p4.json")),
    ("p4m", include_str!("../data/p4m.json")),
    ("p4g", include_str!("../data/p4g.json")),
    ("p3", include_str!("../data/p3.json")),
    ("p3m1", include_str!("../data/p3m1.json")),
    ("p31m", include_str!("../data/p31m.json")),
    ("p6", include_str!("../data/p6.json")),
    ("p6m", include_str!("../data/p6m.json")),
    ("W", include_str!("../data/W.json")),
    ("ZxW", include_str!("../data/ZxW.json")),
    ("ZsW", include_str!("../data/ZsW.json")),
];

/// Names of the seventeen wallpaper groups, in catalog order.
pub const WALLPAPER_GROUPS: [&str; 17] =
    ["p1", "p2", "pm", "pg", "cm", "pmm", "pmg", "pgg", "cmm", "p4", "p4m", "p4g", "p3", "p3m1", "p31m", "p6", "p6m"];

/// The embedded catalog: 17 wallpaper groups followed by the hexagonal
/// rotation group `W = Z^2 ⋊ Z_6` and its extensions `Z × W` and `Z ⋊ W`
/// (the rotation acting on the new factor by `-1`).
pub fn load_catalog() -> Result<Vec<CrystGroup>, CrysError> {
    CATALOG
        .iter()
        .map(|(name, text)| {
            let wrap = |e| CrysError::Catalog { name: name.to_string(), source: Box::new(e) };
            let file = GroupFile::parse(text).map_err(wrap)?;
            let g = CrystGroup::from_file(&file).map_err(wrap)?;
            if g.name() != *name || file.point_group_order.is_none() {
                return Err(wrap(CrysError::Parse("catalog metadata mismatch".into())));
            }
            Ok(g)
        })
        .collect()
}

pub fn catalog_entry(name: &str) -> Option<CrystGroup> {
    load_catalog().ok()?.into_iter().find(|g| g.name() == name)
}

/// Raw embedded text for a catalog entry.
pub fn catalog_source(name: &str) -> Option<&'static str> {
    CATALOG.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
