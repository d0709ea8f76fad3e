//! Exact integer linear algebra: Hermite and Smith normal forms, kernel
//! lattices, sublattice equality and the order of unimodular matrices.
//!
//! Everything here works over arbitrary-precision integers. There is no
//! floating point anywhere in this module.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntLatError {
    #[error("matrix is not unimodular (det = {0})")]
    NonUnimodular(BigInt),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
}

/// Dense integer matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        IntegerMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from small-integer rows. All rows must have equal length.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        IntegerMatrix { rows: rows.len(), cols, data }
    }

    /// `cols` is needed when `rows` is empty.
    pub fn from_big_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        IntegerMatrix { rows: n, cols, data }
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = BigInt::from(e);
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

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = &self[(i, j)];
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
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

    pub fn neg(&self) -> Self {
        IntegerMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        IntegerMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        IntegerMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntegerMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                out[(i, k)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.row_vecs();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
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
        sign * a[n - 1][n - 1].clone()
    }

    pub fn rank(&self) -> usize {
        let h = hermite_normal_form(self).h;
        (0..h.rows).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count()
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.determinant().abs().is_one()
    }

    /// Entries as `i64`, if they all fit.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.data.iter().map(ToPrimitive::to_i64).collect()
    }

    /// Inverse of a unimodular matrix (via the HNF transform).
    pub fn unimodular_inverse(&self) -> Result<Self, IntLatError> {
        if !self.is_square() {
            return Err(IntLatError::NotSquare(self.rows, self.cols));
        }
        let det = self.determinant();
        if !det.abs().is_one() {
            return Err(IntLatError::NonUnimodular(det));
        }
        // U·M = H with H the HNF of a unimodular matrix, which is the identity.
        let HermiteForm { h, u } = hermite_normal_form(self);
        debug_assert!(h.is_identity());
        Ok(u)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_a, row_b <- (s·row_a + t·row_b, p·row_a + q·row_b)
    fn combine_rows(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, p: &BigInt, q: &BigInt) {
        for j in 0..self.cols {
            let x = self[(a, j)].clone();
            let y = self[(b, j)].clone();
            self[(a, j)] = s * &x + t * &y;
            self[(b, j)] = p * &x + q * &y;
        }
    }

    fn combine_cols(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, p: &BigInt, q: &BigInt) {
        for i in 0..self.rows {
            let x = self[(i, a)].clone();
            let y = self[(i, b)].clone();
            self[(i, a)] = s * &x + t * &y;
            self[(i, b)] = p * &x + q * &y;
        }
    }

    /// row_target -= factor·row_src
    fn sub_row_multiple(&mut self, target: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self[(src, j)] * factor;
            self[(target, j)] -= v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

}

impl Index<(usize, usize)> for IntegerMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntegerMatrix {
    type Output = IntegerMatrix;
    fn mul(self, rhs: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = IntegerMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * &rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Serialize for IntegerMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            (0..self.rows).map(|i| self.row(i).iter().map(ToString::to_string).collect()).collect();
        rows.serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermiteForm {
    pub h: IntegerMatrix,
    pub u: IntegerMatrix,
}

/// Row-style Hermite normal form: `h = u·m` with `u` unimodular, `h` in row
/// echelon form with positive pivots and entries above each pivot reduced
/// into `[0, pivot)`.
pub fn hermite_normal_form(m: &IntegerMatrix) -> HermiteForm {
    let mut h = m.clone();
    let mut u = IntegerMatrix::identity(m.rows);
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        for i in r + 1..m.rows {
            if h[(i, c)].is_zero() {
                continue;
            }
            if h[(r, c)].is_zero() {
                h.swap_rows(r, i);
                u.swap_rows(r, i);
                continue;
            }
            let a = h[(r, c)].clone();
            let b = h[(i, c)].clone();
            let eg = a.extended_gcd(&b);
            let g = eg.gcd;
            let (s, t) = (eg.x, eg.y);
            let p = -(&b / &g);
            let q = &a / &g;
            h.combine_rows(r, i, &s, &t, &p, &q);
            u.combine_rows(r, i, &s, &t, &p, &q);
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        let pivot = h[(r, c)].clone();
        for k in 0..r {
            let q = h[(k, c)].div_floor(&pivot);
            h.sub_row_multiple(k, r, &q);
            u.sub_row_multiple(k, r, &q);
        }
        r += 1;
    }
    HermiteForm { h, u }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithForm {
    /// Diagonal entries `d_1 | d_2 | ...` (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d[(i, i)].clone()).collect()
    }
}

/// Unimodular `[[x, y], [p, q]]` sending `(a, b)` to `(gcd, 0)`. When `a | b`
/// the pivot is kept so the reduction cannot cycle.
fn elimination(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt, BigInt) {
    if !a.is_zero() && b.is_multiple_of(a) {
        return (BigInt::one(), BigInt::zero(), -(b / a), BigInt::one());
    }
    let eg = a.extended_gcd(b);
    let p = -(b / &eg.gcd);
    let q = a / &eg.gcd;
    (eg.x, eg.y, p, q)
}

/// Smith normal form `d = u·m·v` with `d_1 | d_2 | ...`, all `d_i ≥ 0`.
pub fn smith_normal_form(m: &IntegerMatrix) -> SmithForm {
    let (rows, cols) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntegerMatrix::identity(rows);
    let mut v = IntegerMatrix::identity(cols);
    for t in 0..rows.min(cols) {
        // pivot: smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if d[(i, j)].is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            for i in t + 1..rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let (x, y, p, q) = elimination(&d[(t, t)], &d[(i, t)]);
                d.combine_rows(t, i, &x, &y, &p, &q);
                u.combine_rows(t, i, &x, &y, &p, &q);
            }
            for j in t + 1..cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let (x, y, p, q) = elimination(&d[(t, t)], &d[(t, j)]);
                d.combine_cols(t, j, &x, &y, &p, &q);
                v.combine_cols(t, j, &x, &y, &p, &q);
            }
            let column_clear = (t + 1..rows).all(|i| d[(i, t)].is_zero());
            if !column_clear {
                continue;
            }
            // divisibility: fold any offending row into the pivot row
            let pivot = d[(t, t)].clone();
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    let zero = BigInt::zero();
                    d.combine_rows(t, i, &one, &one, &zero, &one);
                    u.combine_rows(t, i, &one, &one, &zero, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    // a zero pivot can only appear after all nonzero ones; columns beyond min(rows, cols) are zero
    debug_assert!((0..rows).all(|i| (0..cols).all(|j| i == j || d[(i, j)].is_zero())));
    SmithForm { u, d, v }
}

/// A sublattice of `Z^N` stored by its canonical row-style HNF basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct LatticeBasis {
    ambient: usize,
    basis: IntegerMatrix,
}

impl LatticeBasis {
    /// Lattice spanned by the given vectors (which need not be independent).
    pub fn from_generators(ambient: usize, generators: &[Vec<BigInt>]) -> Self {
        let m = IntegerMatrix::from_big_rows(generators.to_vec(), ambient);
        Self::from_matrix_rows(&m)
    }

    pub fn from_matrix_rows(m: &IntegerMatrix) -> Self {
        let h = hermite_normal_form(m).h;
        let rows: Vec<Vec<BigInt>> = (0..h.rows())
            .map(|i| h.row(i).to_vec())
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .collect();
        LatticeBasis { ambient: m.cols(), basis: IntegerMatrix::from_big_rows(rows, m.cols()) }
    }

    pub fn zero(ambient: usize) -> Self {
        LatticeBasis { ambient, basis: IntegerMatrix::zeros(0, ambient) }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    /// Canonical HNF basis, one vector per row.
    pub fn basis(&self) -> &IntegerMatrix {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<Vec<BigInt>> {
        self.basis.row_vecs()
    }

    /// Membership by back-substitution against the echelon basis.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let mut rest = v.to_vec();
        for i in 0..self.basis.rows() {
            let row = self.basis.row(i);
            let p = row.iter().position(|x| !x.is_zero()).expect("HNF rows are nonzero");
            if rest[..p].iter().any(|x| !x.is_zero()) {
                return false;
            }
            if !rest[p].is_multiple_of(&row[p]) {
                return false;
            }
            let q = &rest[p] / &row[p];
            for (r, b) in rest.iter_mut().zip(row) {
                *r -= &q * b;
            }
        }
        rest.iter().all(Zero::is_zero)
    }

    /// Image under the coordinate permutation sending coordinate `j` to `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.ambient);
        let mut m = IntegerMatrix::zeros(self.basis.rows(), self.ambient);
        for i in 0..self.basis.rows() {
            for (j, &pj) in perm.iter().enumerate() {
                m[(i, pj)] = self.basis[(i, j)].clone();
            }
        }
        Self::from_matrix_rows(&m)
    }
}

/// Saturated lattice of integer relations `{a ∈ Z^N : aᵀ·m = 0}` among the rows of `m`.
pub fn kernel_lattice(m: &IntegerMatrix) -> LatticeBasis {
    let HermiteForm { h, u } = hermite_normal_form(m);
    let kernel_rows: Vec<Vec<BigInt>> = (0..h.rows())
        .filter(|&i| h.row(i).iter().all(Zero::is_zero))
        .map(|i| u.row(i).to_vec())
        .collect();
    LatticeBasis::from_generators(m.rows(), &kernel_rows)
}

/// Same ambient rank and same canonical form.
pub fn lattice_equal(a: &LatticeBasis, b: &LatticeBasis) -> bool {
    a.ambient == b.ambient && a.basis == b.basis
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MatrixOrder {
    Finite(u64),
    Infinite,
}

impl MatrixOrder {
    pub fn finite(self) -> Option<u64> {
        match self {
            MatrixOrder::Finite(k) => Some(k),
            MatrixOrder::Infinite => None,
        }
    }
}

impl fmt::Display for MatrixOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixOrder::Finite(k) => write!(f, "{k}"),
            MatrixOrder::Infinite => write!(f, "INFINITE"),
        }
    }
}

/// Default power cap used by [`matrix_order`] callers: `12·dim`.
pub fn default_order_cap(dim: usize) -> u64 {
    12 * dim.max(1) as u64
}

/// Least `k ≤ cap` with `g^k = I`, or `Infinite` if none.
pub fn matrix_order(g: &IntegerMatrix, cap: u64) -> Result<MatrixOrder, IntLatError> {
    if !g.is_square() {
        return Err(IntLatError::NotSquare(g.rows(), g.cols()));
    }
    let det = g.determinant();
    if !det.abs().is_one() {
        return Err(IntLatError::NonUnimodular(det));
    }
    let mut power = g.clone();
    for k in 1..=cap {
        if power.is_identity() {
            return Ok(MatrixOrder::Finite(k));
        }
        power = &power * g;
    }
    Ok(MatrixOrder::Infinite)
}
