//! Arithmetic over a prime field `F_q`, plus vectors and row-major matrices of
//! field elements.
//!
//! Elements are stored as canonical residues in `[0, q)`. Every container carries
//! its [`PrimeField`], and combining containers over different moduli is an
//! error rather than a silent coercion.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The prime field `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeField {
    q: u32,
}

fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let q = q as u64;
    let mut d = 2u64;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub fn new(q: u32) -> Result<Self> {
        if is_prime(q) {
            Ok(Self { q })
        } else {
            Err(Error::NotPrime(q))
        }
    }

    #[inline]
    pub fn order(self) -> u32 {
        self.q
    }

    #[inline]
    pub fn reduce(self, v: u64) -> u32 {
        (v % self.q as u64) as u32
    }

    #[inline]
    pub fn reduce_signed(self, v: i64) -> u32 {
        v.rem_euclid(self.q as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        if s >= self.q as u64 {
            (s - self.q as u64) as u32
        } else {
            s as u32
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.q as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn pow(self, base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.q;
        let mut b = base % self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self, a: u32) -> Option<u32> {
        let a = a % self.q;
        if a == 0 {
            return None;
        }
        let (mut r0, mut r1) = (self.q as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(self.reduce_signed(t0))
    }

    pub fn element(self, v: u64) -> FieldElement {
        FieldElement {
            value: self.reduce(v),
            field: self,
        }
    }

    fn check(self, v: u64) -> Result<u32> {
        if v < self.q as u64 {
            Ok(v as u32)
        } else {
            Err(Error::ValueOutOfRange {
                value: v,
                q: self.q,
            })
        }
    }

    fn ensure_same(self, other: PrimeField) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ModulusMismatch {
                left: self.q,
                right: other.q,
            })
        }
    }
}

impl TryFrom<u32> for PrimeField {
    type Error = Error;
    fn try_from(q: u32) -> Result<Self> {
        Self::new(q)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        f.q
    }
}

/// A single element of `F_q` tagged with its field.
///
/// The arithmetic operators panic when the operands live in different fields;
/// use the `checked_*` methods to get an error instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    field: PrimeField,
}

impl FieldElement {
    pub fn new(field: PrimeField, value: u64) -> Result<Self> {
        Ok(Self {
            value: field.check(value)?,
            field,
        })
    }

    pub fn zero(field: PrimeField) -> Self {
        Self { value: 0, field }
    }

    pub fn one(field: PrimeField) -> Self {
        field.element(1)
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn field(self) -> PrimeField {
        self.field
    }

    pub fn inv(self) -> Option<Self> {
        self.field.inv(self.value).map(|value| Self {
            value,
            field: self.field,
        })
    }

    pub fn pow(self, exp: u64) -> Self {
        Self {
            value: self.field.pow(self.value, exp),
            field: self.field,
        }
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self> {
        self.field.ensure_same(rhs.field)?;
        Ok(self + rhs)
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self> {
        self.field.ensure_same(rhs.field)?;
        Ok(self * rhs)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.field.q)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                assert_eq!(self.field, rhs.field, "mixing field moduli");
                FieldElement {
                    value: self.field.$method(self.value, rhs.value),
                    field: self.field,
                }
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            value: self.field.neg(self.value),
            field: self.field,
        }
    }
}

/// A vector in `F_q^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "VectorRepr", into = "VectorRepr")]
pub struct FieldVector {
    field: PrimeField,
    elems: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    q: u32,
    elems: Vec<u64>,
}

impl TryFrom<VectorRepr> for FieldVector {
    type Error = Error;
    fn try_from(r: VectorRepr) -> Result<Self> {
        FieldVector::new(PrimeField::new(r.q)?, r.elems)
    }
}

impl From<FieldVector> for VectorRepr {
    fn from(v: FieldVector) -> Self {
        VectorRepr {
            q: v.field.q,
            elems: v.elems.into_iter().map(u64::from).collect(),
        }
    }
}

impl FieldVector {
    /// Builds a vector from canonical residues; values `>= q` are rejected.
    pub fn new(field: PrimeField, elems: Vec<u64>) -> Result<Self> {
        let elems = elems
            .into_iter()
            .map(|v| field.check(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { field, elems })
    }

    pub(crate) fn from_raw(field: PrimeField, elems: Vec<u32>) -> Self {
        debug_assert!(elems.iter().all(|&v| v < field.q));
        Self { field, elems }
    }

    pub fn zeros(field: PrimeField, len: usize) -> Self {
        Self {
            field,
            elems: vec![0; len],
        }
    }

    /// The point of `F_q^len` at position `index` of the canonical
    /// lexicographic enumeration.
    pub fn from_index(field: PrimeField, len: usize, index: usize) -> Self {
        Self {
            field,
            elems: point_from_index(field.q, len, index),
        }
    }

    pub fn to_index(&self) -> usize {
        index_of_point(self.field.q, &self.elems)
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.elems.iter().all(|&v| v == 0)
    }

    pub fn get(&self, i: usize) -> FieldElement {
        FieldElement {
            value: self.elems[i],
            field: self.field,
        }
    }

    #[inline]
    pub fn as_slice(&self) -> &[u32] {
        &self.elems
    }

    fn zip_with(&self, other: &Self, op: impl Fn(u32, u32) -> u32) -> Result<Self> {
        self.field.ensure_same(other.field)?;
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let elems = self
            .elems
            .iter()
            .zip(&other.elems)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(Self {
            field: self.field,
            elems,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let f = self.field;
        self.zip_with(other, |a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let f = self.field;
        self.zip_with(other, |a, b| f.sub(a, b))
    }

    pub fn scale(&self, c: u32) -> Self {
        let f = self.field;
        Self {
            field: f,
            elems: self.elems.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    /// Restriction to the given coordinates, in the order given.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            field: self.field,
            elems: indices.iter().map(|&i| self.elems[i]).collect(),
        }
    }
}

/// Row-major `rows x cols` matrix over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct FieldMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    q: u32,
    rows: Vec<Vec<u64>>,
}

impl TryFrom<MatrixRepr> for FieldMatrix {
    type Error = Error;
    fn try_from(r: MatrixRepr) -> Result<Self> {
        FieldMatrix::from_rows(PrimeField::new(r.q)?, r.rows)
    }
}

impl From<FieldMatrix> for MatrixRepr {
    fn from(m: FieldMatrix) -> Self {
        MatrixRepr {
            q: m.field.q,
            rows: (0..m.rows)
                .map(|i| m.row(i).iter().map(|&v| v as u64).collect())
                .collect(),
        }
    }
}

/// Result of Gauss-Jordan elimination.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rank: usize,
    /// Pivot column of each nonzero row, increasing.
    pub pivots: Vec<usize>,
    /// The reduced row echelon form.
    pub reduced: FieldMatrix,
}

impl FieldMatrix {
    pub fn new(field: PrimeField, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        let data = data
            .into_iter()
            .map(|v| field.check(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            field,
            rows,
            cols,
            data,
        })
    }

    pub(crate) fn from_raw(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Builds a matrix from row arrays. An empty row list gives a `0 x 0` matrix.
    pub fn from_rows(field: PrimeField, rows: Vec<Vec<u64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend(r);
        }
        Self::new(field, nrows, cols, data)
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self::from_raw(field, rows, cols, vec![0; rows * cols])
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(cols.iter().map(|&j| row[j]));
        }
        Self::from_raw(self.field, self.rows, cols.len(), data)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            data.extend_from_slice(self.row(i));
        }
        Self::from_raw(self.field, rows.len(), self.cols, data)
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            data.extend((0..self.rows).map(|i| self.get(i, j)));
        }
        Self::from_raw(self.field, self.cols, self.rows, data)
    }

    /// Row vector times matrix: `k * self`, where `k` has one entry per row.
    pub fn left_mul(&self, k: &FieldVector) -> Result<FieldVector> {
        self.field.ensure_same(k.field)?;
        if k.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: k.len(),
            });
        }
        Ok(FieldVector::from_raw(
            self.field,
            self.left_mul_raw(k.as_slice()),
        ))
    }

    pub(crate) fn left_mul_raw(&self, k: &[u32]) -> Vec<u32> {
        let f = self.field;
        let mut out = vec![0u32; self.cols];
        for (i, &ki) in k.iter().enumerate() {
            if ki == 0 {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(self.row(i)) {
                *o = f.add(*o, f.mul(ki, g));
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, x: &FieldVector) -> Result<FieldVector> {
        self.field.ensure_same(x.field)?;
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        let f = self.field;
        let out = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x.as_slice())
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect();
        Ok(FieldVector::from_raw(f, out))
    }

    /// Gauss-Jordan elimination scanning columns left to right.
    pub fn row_reduce(&self) -> Echelon {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.data[i * m.cols + c] != 0) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = f.inv(m.data[r * m.cols + c]).expect("nonzero pivot");
            m.scale_row(r, inv);
            for i in 0..m.rows {
                if i != r {
                    let factor = m.data[i * m.cols + c];
                    if factor != 0 {
                        m.sub_row_multiple(i, r, factor);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon {
            rank: r,
            pivots,
            reduced: m,
        }
    }

    pub fn rank(&self) -> usize {
        self.row_reduce().rank
    }

    /// Solves `self * x = b` for square nonsingular `self`.
    pub fn solve(&self, b: &FieldVector) -> Result<FieldVector> {
        self.field.ensure_same(b.field)?;
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: b.len(),
            });
        }
        let n = self.rows;
        let mut aug = Vec::with_capacity(n * (n + 1));
        for i in 0..n {
            aug.extend_from_slice(self.row(i));
            aug.push(b.as_slice()[i]);
        }
        let ech = Self::from_raw(self.field, n, n + 1, aug).row_reduce();
        if ech.pivots.len() < n || ech.pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let x = (0..n).map(|i| ech.reduced.get(i, n)).collect();
        Ok(FieldVector::from_raw(self.field, x))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn scale_row(&mut self, r: usize, c: u32) {
        let f = self.field;
        for v in &mut self.data[r * self.cols..(r + 1) * self.cols] {
            *v = f.mul(*v, c);
        }
    }

    // row[i] -= factor * row[r]
    fn sub_row_multiple(&mut self, i: usize, r: usize, factor: u32) {
        let f = self.field;
        for j in 0..self.cols {
            let t = f.mul(factor, self.data[r * self.cols + j]);
            self.data[i * self.cols + j] = f.sub(self.data[i * self.cols + j], t);
        }
    }
}

/// Digits of `index` in base `q`, most significant first, padded to `len`.
pub fn point_from_index(q: u32, len: usize, mut index: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    for slot in out.iter_mut().rev() {
        *slot = (index % q as usize) as u32;
        index /= q as usize;
    }
    out
}

/// Inverse of [`point_from_index`].
pub fn index_of_point(q: u32, point: &[u32]) -> usize {
    point
        .iter()
        .fold(0usize, |acc, &d| acc * q as usize + d as usize)
}

/// `q^len` as `u128`, so callers can compare against caps without overflow.
pub fn space_size(q: u32, len: usize) -> u128 {
    (q as u128).saturating_pow(len as u32)
}
