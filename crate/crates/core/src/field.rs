//! Exact arithmetic over prime fields `F_q`.
//!
//! Scalars are [`FieldElement`]s that carry their [`PrimeField`], matrices are
//! immutable row-major [`FieldMatrix`] values. Every operation returns a fresh
//! value, so codebooks built from these types can be shared freely.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use itertools::Itertools;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is below 2")]
    InvalidModulus(u64),
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("operands live in different fields (q={0} vs q={1})")]
    FieldMismatch(u32, u32),
    #[error("matrix is singular")]
    Singular,
    #[error("evaluation point {0} appears twice")]
    DuplicatePoint(u32),
    #[error("cauchy point sets collide at value {0}")]
    CollidingPoints(u32),
    #[error("square submatrix enumeration capped at size {cap}, matrix needs {size}")]
    SizeCapExceeded { size: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, FieldError>;

/// The prime field `F_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u32,
}

impl PrimeField {
    /// Builds `F_q`, rejecting composite moduli (trial division).
    pub fn new(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(FieldError::InvalidModulus(q));
        }
        if q > u32::MAX as u64 || !is_prime(q) {
            return Err(FieldError::NotPrime(q));
        }
        Ok(Self { q: q as u32 })
    }

    pub fn modulus(self) -> u32 {
        self.q
    }

    pub fn zero(self) -> FieldElement {
        FieldElement { value: 0, field: self }
    }

    pub fn one(self) -> FieldElement {
        FieldElement { value: 1, field: self }
    }

    /// Reduces an arbitrary signed integer into the field.
    pub fn elem(self, value: i64) -> FieldElement {
        FieldElement {
            value: value.rem_euclid(self.q as i64) as u32,
            field: self,
        }
    }

    pub(crate) fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.q as u64) as u32
    }

    pub(crate) fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.q as u64 - b as u64) % self.q as u64) as u32
    }

    pub(crate) fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub(crate) fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    pub(crate) fn inv(self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        // Extended Euclid on (a, q).
        let (mut r0, mut r1) = (self.q as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        Ok(t0.rem_euclid(self.q as i64) as u32)
    }

    pub(crate) fn pow(self, base: u32, mut exp: u64) -> u32 {
        let mut acc = 1u32 % self.q;
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
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of a prime field; `value` is always reduced into `[0, q)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    field: PrimeField,
}

impl FieldElement {
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn field(self) -> PrimeField {
        self.field
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Result<Self> {
        Ok(Self {
            value: self.field.inv(self.value)?,
            field: self.field,
        })
    }

    pub fn pow(self, exp: u64) -> Self {
        Self {
            value: self.field.pow(self.value, exp),
            field: self.field,
        }
    }

    pub fn div(self, rhs: Self) -> Result<Self> {
        Ok(self * rhs.inv()?)
    }

    fn same_field(self, rhs: Self) {
        assert_eq!(
            self.field, rhs.field,
            "field element arithmetic across different fields"
        );
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.same_field(rhs);
        Self {
            value: self.field.add(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.same_field(rhs);
        Self {
            value: self.field.sub(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.same_field(rhs);
        Self {
            value: self.field.mul(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: self.field.neg(self.value),
            field: self.field,
        }
    }
}

/// Immutable dense matrix over a prime field, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FieldMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        Self::from_fn(field, n, n, |r, c| u32::from(r == c))
    }

    /// Builds a matrix from raw values; each value is reduced mod q.
    pub fn from_fn(
        field: PrimeField,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> u32,
    ) -> Self {
        let q = field.modulus();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c) % q);
            }
        }
        Self {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Builds a matrix from signed integer literals, reduced mod q.
    pub fn from_literal<R: AsRef<[i64]>>(field: PrimeField, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(FieldError::DimensionMismatch {
                    op: "from_literal",
                    left: (i, row.len()),
                    right: (0, cols),
                });
            }
            data.extend(row.iter().map(|&v| field.elem(v).value()));
        }
        Ok(Self {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_elements(
        field: PrimeField,
        rows: usize,
        cols: usize,
        elems: &[FieldElement],
    ) -> Result<Self> {
        if elems.len() != rows * cols {
            return Err(FieldError::DimensionMismatch {
                op: "from_elements",
                left: (rows, cols),
                right: (elems.len(), 1),
            });
        }
        if let Some(bad) = elems.iter().find(|e| e.field() != field) {
            return Err(FieldError::FieldMismatch(
                field.modulus(),
                bad.field().modulus(),
            ));
        }
        Ok(Self {
            field,
            rows,
            cols,
            data: elems.iter().map(|e| e.value()).collect(),
        })
    }

    /// A single column vector.
    pub fn column_vector(field: PrimeField, elems: &[FieldElement]) -> Result<Self> {
        Self::from_elements(field, elems.len(), 1, elems)
    }

    /// A single row vector.
    pub fn row_vector(field: PrimeField, elems: &[FieldElement]) -> Result<Self> {
        Self::from_elements(field, 1, elems.len(), elems)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn value(&self, r: usize, c: usize) -> u32 {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        self.data[r * self.cols + c]
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        FieldElement {
            value: self.value(r, c),
            field: self.field,
        }
    }

    pub fn row(&self, r: usize) -> Vec<FieldElement> {
        (0..self.cols).map(|c| self.get(r, c)).collect()
    }

    pub fn column(&self, c: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn values(&self) -> &[u32] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// Entries as nested rows of raw values, convenient for serialization.
    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.field, self.cols, self.rows, |r, c| self.value(c, r))
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.field, self.rows, cols.len(), |r, c| self.value(r, cols[c]))
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(self.field, rows.len(), self.cols, |r, c| self.value(rows[r], c))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(self.field, rows.len(), cols.len(), |r, c| {
            self.value(rows[r], cols[c])
        })
    }

    /// Contiguous block `[r0, r0+h) x [c0, c0+w)`.
    pub fn block(&self, r0: usize, c0: usize, h: usize, w: usize) -> Self {
        Self::from_fn(self.field, h, w, |r, c| self.value(r0 + r, c0 + c))
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch(
                self.field.modulus(),
                other.field.modulus(),
            ));
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        self.check_field(other)?;
        if self.shape() != other.shape() {
            return Err(FieldError::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        let f = self.field;
        Ok(Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "sub")?;
        let f = self.field;
        Ok(Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.sub(a, b))
                .collect(),
            ..self.clone()
        })
    }

    pub fn scale(&self, s: FieldElement) -> Self {
        assert_eq!(s.field(), self.field, "scalar from a different field");
        let f = self.field;
        Self {
            data: self.data.iter().map(|&a| f.mul(a, s.value())).collect(),
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(FieldError::DimensionMismatch {
                op: "mul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let q = self.field.modulus() as u64;
        let mut data = vec![0u32; self.rows * other.cols];
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = 0u64;
                for i in 0..self.cols {
                    acc = (acc + self.data[r * self.cols + i] as u64 * other.data[i * other.cols + c] as u64)
                        % q;
                }
                data[r * other.cols + c] = acc as u32;
            }
        }
        Ok(Self {
            field: self.field,
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// Matrix times column vector, returned as a plain vector.
    pub fn mul_vec(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let col = Self::column_vector(self.field, v)?;
        Ok(self.mul(&col)?.column(0))
    }

    /// Row vector times matrix, returned as a plain vector.
    pub fn vec_mul(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let row = Self::row_vector(self.field, v)?;
        Ok(row.mul(self)?.row(0))
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(FieldError::DimensionMismatch {
                op: "hstack",
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self::from_fn(self.field, self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self.value(r, c)
            } else {
                other.value(r, c - self.cols)
            }
        }))
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(FieldError::DimensionMismatch {
                op: "vstack",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Row rank by Gaussian elimination, first nonzero pivot in column order.
    pub fn rank(&self) -> usize {
        let mut work = self.data.clone();
        row_reduce(self.field, &mut work, self.rows, self.cols, self.cols)
    }

    pub fn is_nonsingular(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(FieldError::DimensionMismatch {
                op: "inverse",
                left: self.shape(),
                right: (self.cols, self.rows),
            });
        }
        let n = self.rows;
        let aug = self.hstack(&Self::identity(self.field, n))?;
        let mut work = aug.data;
        let rank = row_reduce(self.field, &mut work, n, 2 * n, n);
        if rank < n {
            return Err(FieldError::Singular);
        }
        Ok(Self::from_fn(self.field, n, n, |r, c| work[r * 2 * n + n + c]))
    }

    /// Solves `self * x = rhs` for square nonsingular `self`.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        self.inverse()?.mul(rhs)
    }
}

/// In-place reduced row echelon form over the first `pivot_cols` columns of a
/// `rows x cols` buffer. Returns the number of pivots found.
fn row_reduce(
    field: PrimeField,
    data: &mut [u32],
    rows: usize,
    cols: usize,
    pivot_cols: usize,
) -> usize {
    let mut pivot_row = 0;
    for col in 0..pivot_cols {
        if pivot_row == rows {
            break;
        }
        let Some(found) = (pivot_row..rows).find(|&r| data[r * cols + col] != 0) else {
            continue;
        };
        if found != pivot_row {
            for c in 0..cols {
                data.swap(found * cols + c, pivot_row * cols + c);
            }
        }
        let inv = field
            .inv(data[pivot_row * cols + col])
            .expect("pivot is nonzero");
        for c in 0..cols {
            data[pivot_row * cols + c] = field.mul(data[pivot_row * cols + c], inv);
        }
        for r in 0..rows {
            if r == pivot_row {
                continue;
            }
            let factor = data[r * cols + col];
            if factor == 0 {
                continue;
            }
            for c in 0..cols {
                let sub = field.mul(factor, data[pivot_row * cols + c]);
                data[r * cols + c] = field.sub(data[r * cols + c], sub);
            }
        }
        pivot_row += 1;
    }
    pivot_row
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FieldMatrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row = (0..self.cols).map(|c| self.value(r, c)).join(" ");
            writeln!(f, "  [{row}]")?;
        }
        Ok(())
    }
}

/// Vandermonde matrix with entry `(r, i) = points[i]^r`.
pub fn vandermonde(
    field: PrimeField,
    rows: usize,
    points: &[FieldElement],
) -> Result<FieldMatrix> {
    if let Some(p) = points.iter().find(|p| p.field() != field) {
        return Err(FieldError::FieldMismatch(field.modulus(), p.field().modulus()));
    }
    if let Some(dup) = points.iter().duplicates_by(|p| p.value()).next() {
        return Err(FieldError::DuplicatePoint(dup.value()));
    }
    Ok(FieldMatrix::from_fn(field, rows, points.len(), |r, i| {
        field.pow(points[i].value(), r as u64)
    }))
}

/// Cauchy matrix with entry `(i, j) = 1 / (a_i - b_j)`.
pub fn cauchy(
    field: PrimeField,
    a_pts: &[FieldElement],
    b_pts: &[FieldElement],
) -> Result<FieldMatrix> {
    if let Some(p) = a_pts.iter().chain(b_pts).find(|p| p.field() != field) {
        return Err(FieldError::FieldMismatch(field.modulus(), p.field().modulus()));
    }
    if let Some(dup) = a_pts
        .iter()
        .duplicates_by(|p| p.value())
        .chain(b_pts.iter().duplicates_by(|p| p.value()))
        .next()
    {
        return Err(FieldError::CollidingPoints(dup.value()));
    }
    if let Some(clash) = a_pts.iter().find(|a| b_pts.contains(a)) {
        return Err(FieldError::CollidingPoints(clash.value()));
    }
    let mut data = Vec::with_capacity(a_pts.len() * b_pts.len());
    for a in a_pts {
        for b in b_pts {
            data.push((*a - *b).inv()?);
        }
    }
    FieldMatrix::from_elements(field, a_pts.len(), b_pts.len(), &data)
}

pub const DEFAULT_SUPERREGULAR_CAP: usize = 8;

/// True iff every square submatrix is nonsingular; exhaustive enumeration with
/// the default size cap.
pub fn is_superregular(m: &FieldMatrix) -> Result<bool> {
    is_superregular_with_cap(m, DEFAULT_SUPERREGULAR_CAP)
}

pub fn is_superregular_with_cap(m: &FieldMatrix, cap: usize) -> Result<bool> {
    let size = m.rows().min(m.cols());
    if size > cap {
        return Err(FieldError::SizeCapExceeded { size, cap });
    }
    for s in 1..=size {
        for rows in (0..m.rows()).combinations(s) {
            for cols in (0..m.cols()).combinations(s) {
                if !m.submatrix(&rows, &cols).is_nonsingular() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `C(n, r)`, saturating at `u64::MAX`.
pub fn binomial(n: usize, r: usize) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Controls whether subset checks enumerate or sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationConfig {
    /// Enumerate exhaustively when the number of subsets is at most this.
    pub exhaustive_cap: u64,
    /// Number of uniformly drawn subsets otherwise.
    pub samples: usize,
    pub seed: u64,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        Self {
            exhaustive_cap: 100_000,
            samples: 1_000,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive { subsets: u64 },
    Sampled { trials: usize },
}

/// Visits `r`-subsets of `0..n`, exhaustively or by seeded sampling according to
/// `cfg`, stopping early when `visit` returns false. Returns the mode used and
/// whether every visit succeeded.
pub fn for_each_subset(
    n: usize,
    r: usize,
    cfg: &EnumerationConfig,
    mut visit: impl FnMut(&[usize]) -> bool,
) -> (CheckMode, bool) {
    let total = binomial(n, r);
    if total <= cfg.exhaustive_cap {
        for subset in (0..n).combinations(r) {
            if !visit(&subset) {
                return (CheckMode::Exhaustive { subsets: total }, false);
            }
        }
        (CheckMode::Exhaustive { subsets: total }, true)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.samples {
            let mut subset = sample(&mut rng, n, r).into_vec();
            subset.sort_unstable();
            if !visit(&subset) {
                return (CheckMode::Sampled { trials: cfg.samples }, false);
            }
        }
        (CheckMode::Sampled { trials: cfg.samples }, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionCheck {
    pub holds: bool,
    pub mode: CheckMode,
}

/// Outcome of the four column-selection regularity conditions on `(U, V)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionReport {
    /// Every d x d column selection of U is nonsingular.
    pub u_full: ConditionCheck,
    /// Every (d+t) x (d+t) column selection of V is nonsingular.
    pub v_full: ConditionCheck,
    /// Every k x k column selection of the top k rows of U is nonsingular.
    pub u_top: ConditionCheck,
    /// Every k x k column selection of the top k rows of V is nonsingular.
    pub v_top: ConditionCheck,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.as_array().iter().all(|c| c.holds)
    }

    pub fn as_array(&self) -> [ConditionCheck; 4] {
        [self.u_full, self.v_full, self.u_top, self.v_top]
    }
}

pub fn check_mbcr_conditions(
    u: &FieldMatrix,
    v: &FieldMatrix,
    k: usize,
) -> Result<ConditionReport> {
    check_mbcr_conditions_with(u, v, k, &EnumerationConfig::default())
}

pub fn check_mbcr_conditions_with(
    u: &FieldMatrix,
    v: &FieldMatrix,
    k: usize,
    cfg: &EnumerationConfig,
) -> Result<ConditionReport> {
    u.check_field(v)?;
    let (d, n) = u.shape();
    if v.cols() != n || v.rows() < d || k > d || k == 0 {
        return Err(FieldError::DimensionMismatch {
            op: "check_mbcr_conditions",
            left: u.shape(),
            right: v.shape(),
        });
    }
    let all_cols_nonsingular = |m: &FieldMatrix, size: usize| {
        let (mode, holds) = for_each_subset(n, size, cfg, |cols| {
            m.select_columns(cols).is_nonsingular()
        });
        ConditionCheck { holds, mode }
    };
    let top_rows: Vec<usize> = (0..k).collect();
    Ok(ConditionReport {
        u_full: all_cols_nonsingular(u, d),
        v_full: all_cols_nonsingular(v, v.rows()),
        u_top: all_cols_nonsingular(&u.select_rows(&top_rows), k),
        v_top: all_cols_nonsingular(&v.select_rows(&top_rows), k),
    })
}
