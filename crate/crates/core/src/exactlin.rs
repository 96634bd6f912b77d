//! Exact rational scalars, vectors and matrices.
//!
//! Every quantity in the crate is an arbitrary-precision rational; nothing
//! here ever rounds. Scalars are [`num_rational::BigRational`], which keeps
//! itself in lowest terms with a positive denominator after every operation.
//!
//! In all file formats a rational is written as the string `"p/q"` (or `"p"`
//! when `q = 1`), and matrices are row-major nested arrays.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

pub type Rational = num_rational::BigRational;

/// Default cap for [`element_order`].
pub const DEFAULT_ORDER_CAP: usize = 48;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum LinError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular (determinant {det})")]
    Singular { det: Rational },
    #[error("invalid input: {0}")]
    Input(String),
}

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational, LinError> {
    let s = s.trim();
    let parsed = match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| LinError::Input(format!("bad rational {s:?}")))?;
            let q: BigInt = q.trim().parse().map_err(|_| LinError::Input(format!("bad rational {s:?}")))?;
            if q.is_zero() {
                return Err(LinError::Input(format!("zero denominator in {s:?}")));
            }
            Rational::new(p, q)
        }
        None => Rational::from_integer(s.parse().map_err(|_| LinError::Input(format!("bad rational {s:?}")))?),
    };
    Ok(parsed)
}

/// Sign of a rational as -1, 0 or 1.
pub fn signum(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Serde adapter for a single [`Rational`] field.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        RationalRepr::deserialize(d)?.into_rational().map_err(de::Error::custom)
    }
}

/// Accepts `"p/q"` strings as well as bare JSON integers.
#[derive(Deserialize)]
#[serde(untagged)]
enum RationalRepr {
    Str(String),
    Int(i64),
}

impl RationalRepr {
    fn into_rational(self) -> Result<Rational, LinError> {
        match self {
            RationalRepr::Str(s) => parse_rational(&s),
            RationalRepr::Int(n) => Ok(int(n)),
        }
    }
}

struct RationalSeq<'a>(&'a [Rational]);

impl Serialize for RationalSeq<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for r in self.0 {
            seq.serialize_element(&format_rational(r))?;
        }
        seq.end()
    }
}

fn parse_row<E: de::Error>(row: Vec<RationalRepr>) -> Result<Vec<Rational>, E> {
    row.into_iter().map(|r| r.into_rational().map_err(E::custom)).collect()
}

/// A vector of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RatVector(pub Vec<Rational>);

impl RatVector {
    pub fn zeros(n: usize) -> Self {
        RatVector(vec![Rational::zero(); n])
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        RatVector(entries.iter().map(|&x| int(x)).collect())
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = Rational::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn dot(&self, other: &RatVector) -> Rational {
        assert_eq!(self.len(), other.len(), "dot product of mismatched vectors");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> Rational {
        self.dot(self)
    }

    pub fn scale(&self, k: &Rational) -> RatVector {
        RatVector(self.0.iter().map(|x| x * k).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// True iff every entry is an integer.
    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }

    /// Clears denominators and divides out the content, so the result is a
    /// primitive integer vector with positive first nonzero entry. Returns the
    /// scalar `k` with `self * k = result` (negative exactly when the first
    /// nonzero entry of `self` is), or `None` for zero input.
    pub fn primitive(&self) -> Option<(RatVector, Rational)> {
        let lead = self.0.iter().find(|x| !x.is_zero())?;
        let lcm = self.0.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = self.0.iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let mut k = Rational::new(lcm, gcd);
        if lead.is_negative() {
            k = -k;
        }
        Some((self.scale(&k), k))
    }
}

impl Index<usize> for RatVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl Add for &RatVector {
    type Output = RatVector;
    fn add(self, rhs: &RatVector) -> RatVector {
        assert_eq!(self.len(), rhs.len(), "adding mismatched vectors");
        RatVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &RatVector {
    type Output = RatVector;
    fn sub(self, rhs: &RatVector) -> RatVector {
        assert_eq!(self.len(), rhs.len(), "subtracting mismatched vectors");
        RatVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &RatVector {
    type Output = RatVector;
    fn neg(self) -> RatVector {
        RatVector(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for RatVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RationalSeq(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let row = Vec::<RationalRepr>::deserialize(d)?;
        Ok(RatVector(parse_row(row)?))
    }
}

/// A dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self, LinError> {
        if entries.len() != rows * cols {
            return Err(LinError::Dimension(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        Ok(RatMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn diag(d: &[Rational]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinError::Dimension("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Builds a matrix from integer rows. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|row| row.iter().map(|&x| int(x)).collect()).collect())
            .expect("ragged integer matrix literal")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[RatVector]) -> Result<Self, LinError> {
        let c = cols.len();
        let r = cols.first().map_or(0, RatVector::len);
        if cols.iter().any(|v| v.len() != r) {
            return Err(LinError::Dimension("columns of different lengths".into()));
        }
        let mut m = Self::zeros(r, c);
        for (j, v) in cols.iter().enumerate() {
            for i in 0..r {
                m[(i, j)] = v[i].clone();
            }
        }
        Ok(m)
    }

    /// Block-diagonal matrix `diag(a, b)`.
    pub fn block_diag(a: &RatMatrix, b: &RatMatrix) -> Self {
        let mut m = Self::zeros(a.rows + b.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                m[(i, j)] = a[(i, j)].clone();
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                m[(a.rows + i, a.cols + j)] = b[(i, j)].clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> RatVector {
        RatVector(self.entries[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn column(&self, j: usize) -> RatVector {
        RatVector((0..self.rows).map(|i| self[(i, j)].clone()).collect())
    }

    pub fn columns(&self) -> Vec<RatVector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).0).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, k: &Rational) -> Self {
        RatMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|x| x * k).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = &self[(i, j)];
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    /// True iff every entry is an integer.
    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|x| x.is_integer())
    }

    pub fn trace(&self) -> Result<Rational, LinError> {
        self.require_square()?;
        Ok((0..self.rows).map(|i| self[(i, i)].clone()).sum())
    }

    pub fn checked_mul(&self, rhs: &RatMatrix) -> Result<RatMatrix, LinError> {
        if self.cols != rhs.rows {
            return Err(LinError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &RatVector) -> RatVector {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        RatVector((0..self.rows).map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum()).collect())
    }

    /// Row vector times matrix: `v^T * self`.
    pub fn vec_mul(&self, v: &RatVector) -> RatVector {
        assert_eq!(self.rows, v.len(), "vector-matrix dimension mismatch");
        RatVector((0..self.cols).map(|j| (0..self.rows).map(|i| &v[i] * &self[(i, j)]).sum()).collect())
    }

    pub fn pow(&self, k: usize) -> Result<RatMatrix, LinError> {
        self.require_square()?;
        let mut acc = Self::identity(self.rows);
        for _ in 0..k {
            acc = &acc * self;
        }
        Ok(acc)
    }

    fn require_square(&self) -> Result<(), LinError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(LinError::NotSquare { rows: self.rows, cols: self.cols })
        }
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.entries[i * self.cols + j]
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        self.checked_mul(rhs).expect("matrix product dimension mismatch")
    }
}

impl Add for &RatMatrix {
    type Output = RatMatrix;
    fn add(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "adding mismatched matrices");
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &RatMatrix {
    type Output = RatMatrix;
    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "subtracting mismatched matrices");
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &RatMatrix {
    type Output = RatMatrix;
    fn neg(self) -> RatMatrix {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.row(i).to_string().replace('(', "[").replace(')', "]"))?;
        }
        write!(f, "]")
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            seq.serialize_element(&RationalSeq(&self.entries[i * self.cols..(i + 1) * self.cols]))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<RationalRepr>>::deserialize(d)?;
        let rows = rows.into_iter().map(parse_row).collect::<Result<Vec<_>, D::Error>>()?;
        RatMatrix::from_rows(rows).map_err(de::Error::custom)
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
///
/// Denominators are cleared first so the elimination runs over the integers;
/// every Bareiss division is exact.
pub fn det(m: &RatMatrix) -> Result<Rational, LinError> {
    m.require_square()?;
    let n = m.rows;
    if n == 0 {
        return Ok(Rational::one());
    }
    let mut scale = Rational::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let row = m.row(i);
        let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        scale /= Rational::from_integer(lcm.clone());
        a.push(row.iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect());
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(Rational::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    Ok(Rational::from_integer(sign * &a[n - 1][n - 1]) * scale)
}

/// Exact inverse by Gauss-Jordan elimination.
pub fn inverse(m: &RatMatrix) -> Result<RatMatrix, LinError> {
    m.require_square()?;
    let n = m.rows;
    let mut a = m.clone();
    let mut inv = RatMatrix::identity(n);
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[(r, col)].is_zero()) else {
            return Err(LinError::Singular { det: det(m)? });
        };
        if pivot != col {
            for j in 0..n {
                a.entries.swap(pivot * n + j, col * n + j);
                inv.entries.swap(pivot * n + j, col * n + j);
            }
        }
        let p = a[(col, col)].clone();
        for j in 0..n {
            a[(col, j)] /= &p;
            inv[(col, j)] /= &p;
        }
        for r in 0..n {
            if r == col || a[(r, col)].is_zero() {
                continue;
            }
            let f = a[(r, col)].clone();
            for j in 0..n {
                let t = &f * &a[(col, j)];
                a[(r, j)] -= t;
                let t = &f * &inv[(col, j)];
                inv[(r, j)] -= t;
            }
        }
    }
    Ok(inv)
}

/// Least `k >= 1` with `m^k = I`, or `None` when no such `k <= cap` exists.
pub fn element_order(m: &RatMatrix, cap: usize) -> Result<Option<usize>, LinError> {
    m.require_square()?;
    let mut acc = m.clone();
    for k in 1..=cap {
        if acc.is_identity() {
            return Ok(Some(k));
        }
        acc = &acc * m;
    }
    Ok(None)
}

/// Group-averaged intertwiner `A = sum_p theta(p) * seed * iota(p)^-1`.
///
/// The two lists must enumerate the same finite group in matching order. The
/// result satisfies `A * iota(q) = theta(q) * A` for every `q`, whether or not
/// it is invertible.
pub fn average_intertwiner(
    theta_images: &[RatMatrix],
    iota_images: &[RatMatrix],
    seed: &RatMatrix,
) -> Result<RatMatrix, LinError> {
    if theta_images.len() != iota_images.len() {
        return Err(LinError::Input(format!(
            "{} theta images but {} iota images",
            theta_images.len(),
            iota_images.len()
        )));
    }
    seed.require_square()?;
    let n = seed.rows;
    let mut acc = RatMatrix::zeros(n, n);
    for (t, i) in theta_images.iter().zip(iota_images) {
        if (t.rows, t.cols, i.rows, i.cols) != (n, n, n, n) {
            return Err(LinError::Dimension(format!(
                "group images must be {n}x{n}, got {}x{} and {}x{}",
                t.rows, t.cols, i.rows, i.cols
            )));
        }
        let term = &(t * seed) * &inverse(i)?;
        acc = &acc + &term;
    }
    Ok(acc)
}
