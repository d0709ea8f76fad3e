//! Integer Laurent polynomials in `n` variables and their exact evaluation
//! at torsion points of the torus of local systems.
//!
//! A superpotential is stored as a map from exponent vectors in `Z^n` to
//! nonzero integer coefficients (the disc counts). Values at torsion points
//! live in cyclotomic fields and are computed exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::{self, CyclotomicNumber};
use crate::intlat::IntegerMatrix;
use crate::qlinalg::{self, Q};
use crate::torussym::TorsionPoint;

pub use crate::cyclotomic::CyclotomicNumber as Cyclotomic;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("torsion grid of {points} points exceeds the cap of {cap}")]
    GridTooLarge { points: u128, cap: u128 },
    #[error("order bound must be at least 1")]
    BadOrderBound,
    #[error("dimension mismatch: polynomial has {poly} variables, point has {point}")]
    DimensionMismatch { poly: usize, point: usize },
}

/// Default cap on the number of grid points visited by [`torsion_critical_points`].
pub const DEFAULT_GRID_CAP: u128 = 250_000;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPolynomial {
    dim: usize,
    terms: BTreeMap<Vec<i64>, BigInt>,
}

impl LaurentPolynomial {
    pub fn zero(dim: usize) -> Self {
        LaurentPolynomial { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: i64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], BigInt::from(c));
        p
    }

    pub fn monomial(exponent: Vec<i64>, coeff: i64) -> Self {
        let mut p = Self::zero(exponent.len());
        p.add_term(exponent, BigInt::from(coeff));
        p
    }

    /// Sums `(coefficient, exponent)` pairs; repeated exponents accumulate.
    pub fn from_terms<I: IntoIterator<Item = (i64, Vec<i64>)>>(dim: usize, terms: I) -> Self {
        let mut p = Self::zero(dim);
        for (c, e) in terms {
            p.add_term(e, BigInt::from(c));
        }
        p
    }

    pub fn add_term(&mut self, exponent: Vec<i64>, coeff: BigInt) {
        assert_eq!(exponent.len(), self.dim, "exponent length must equal dim");
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponent).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, BigInt> {
        &self.terms
    }

    pub fn coefficient(&self, exponent: &[i64]) -> BigInt {
        self.terms.get(exponent).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn support(&self) -> BTreeSet<Vec<i64>> {
        self.terms.keys().cloned().collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// Affine partial derivative `∂/∂x_i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[i] -= 1;
            out.add_term(f, c * BigInt::from(e[i]));
        }
        out
    }

    /// Logarithmic partial derivative `x_i ∂/∂x_i`.
    pub fn log_partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * BigInt::from(e[i]));
        }
        out
    }

    /// Relabels every exponent `α ↦ g·α`.
    pub fn transform(&self, g: &IntegerMatrix) -> Self {
        assert_eq!((g.rows(), g.cols()), (self.dim, self.dim));
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            let big: Vec<BigInt> = e.iter().map(|&x| BigInt::from(x)).collect();
            let img: Vec<i64> =
                g.mul_vec(&big).iter().map(|x| x.to_i64().expect("exponent overflow")).collect();
            out.add_term(img, c.clone());
        }
        out
    }

    /// Exact value at a torsion point.
    pub fn evaluate(&self, p: &TorsionPoint) -> CyclotomicNumber {
        assert_eq!(p.dim(), self.dim, "dimension mismatch");
        let d = p.common_denominator();
        CyclotomicNumber::from_power_sum(d, self.power_sum(p, d))
    }

    /// Coefficients of the value as a sum of `d`-th roots of unity (`d` a
    /// common denominator of the point).
    fn power_sum(&self, p: &TorsionPoint, d: u32) -> Vec<Q> {
        let scaled: Vec<i64> = p
            .coords()
            .iter()
            .map(|c| (c * qlinalg::q(d as i64)).to_integer().to_i64().expect("coordinate overflow"))
            .collect();
        let mut acc = vec![BigInt::zero(); d as usize];
        for (e, c) in &self.terms {
            let k: i64 = e.iter().zip(&scaled).map(|(a, b)| a * b).sum();
            acc[k.rem_euclid(d as i64) as usize] += c;
        }
        acc.into_iter().map(Q::from_integer).collect()
    }

    fn vanishes_at(&self, p: &TorsionPoint) -> bool {
        if self.is_zero() {
            return true;
        }
        self.evaluate(p).is_zero()
    }
}

fn var_name(dim: usize, i: usize) -> String {
    match dim {
        1 => "x".to_string(),
        2 | 3 => ["x", "y", "z"][i].to_string(),
        _ => format!("z{}", i + 1),
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k != 0)
                .map(|(i, &k)| {
                    let v = var_name(self.dim, i);
                    if k == 1 {
                        v
                    } else {
                        format!("{v}^{k}")
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                write!(f, "{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for LaurentPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub fn evaluate(w: &LaurentPolynomial, p: &TorsionPoint) -> CyclotomicNumber {
    w.evaluate(p)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradientHessian {
    pub grad: Vec<CyclotomicNumber>,
    pub hess: Vec<Vec<CyclotomicNumber>>,
}

/// First and second affine partials at `p`.
pub fn gradient_hessian(w: &LaurentPolynomial, p: &TorsionPoint) -> GradientHessian {
    let n = w.dim();
    let partials: Vec<LaurentPolynomial> = (0..n).map(|i| w.partial(i)).collect();
    let grad = partials.iter().map(|d| d.evaluate(p)).collect();
    let mut hess = vec![vec![CyclotomicNumber::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = partials[i].partial(j).evaluate(p);
            hess[j][i] = v.clone();
            hess[i][j] = v;
        }
    }
    GradientHessian { grad, hess }
}

/// Logarithmic gradient and Hessian (`x_i ∂_i` applied termwise).
pub fn log_gradient_hessian(w: &LaurentPolynomial, p: &TorsionPoint) -> GradientHessian {
    let n = w.dim();
    let partials: Vec<LaurentPolynomial> = (0..n).map(|i| w.log_partial(i)).collect();
    let grad = partials.iter().map(|d| d.evaluate(p)).collect();
    let mut hess = vec![vec![CyclotomicNumber::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = partials[i].log_partial(j).evaluate(p);
            hess[j][i] = v.clone();
            hess[i][j] = v;
        }
    }
    GradientHessian { grad, hess }
}

/// All affine first partials vanish at `p`. The logarithmic partials are
/// checked too; both agree at points of the unit torus.
pub fn is_critical(w: &LaurentPolynomial, p: &TorsionPoint) -> bool {
    let affine = (0..w.dim()).all(|i| w.partial(i).vanishes_at(p));
    let log = (0..w.dim()).all(|i| w.log_partial(i).vanishes_at(p));
    assert_eq!(affine, log, "affine and logarithmic criticality disagree at {p}");
    affine
}

/// Every torsion point whose coordinate denominators divide `order_bound`
/// at which `w` is critical, in lexicographic order.
pub fn torsion_critical_points(
    w: &LaurentPolynomial,
    order_bound: u32,
    grid_cap: u128,
) -> Result<Vec<TorsionPoint>, LaurentError> {
    if order_bound == 0 {
        return Err(LaurentError::BadOrderBound);
    }
    let n = w.dim();
    let points = (order_bound as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if points > grid_cap {
        return Err(LaurentError::GridTooLarge { points, cap: grid_cap });
    }
    let partials: Vec<LaurentPolynomial> = (0..n).map(|i| w.partial(i)).collect();
    let m = order_bound as i64;
    let mut out = Vec::new();
    let mut idx = vec![0i64; n];
    loop {
        let p = TorsionPoint::new(idx.iter().map(|&k| cyclotomic::rational_from_ratio(k, m)).collect());
        if partials.iter().all(|d| d.vanishes_at(&p)) {
            out.push(p);
        }
        // odometer
        let mut pos = n;
        loop {
            if pos == 0 {
                out.sort();
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
        }
        if n == 0 {
            return Ok(out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct B1Rank {
    pub b1: BTreeSet<Vec<i64>>,
    pub rank: usize,
}

/// Nonzero exponents of `w` (the zero exponent is excluded) and the rank of
/// their rational span.
pub fn b1_support_rank(w: &LaurentPolynomial) -> B1Rank {
    let b1: BTreeSet<Vec<i64>> = w.terms.keys().filter(|e| e.iter().any(|&x| x != 0)).cloned().collect();
    let rows: Vec<Vec<Q>> = b1.iter().map(|e| e.iter().map(|&x| qlinalg::q(x)).collect()).collect();
    let rank = qlinalg::rank(&rows);
    B1Rank { b1, rank }
}

/// `w` is unchanged when each exponent `α` is replaced by `g·α`.
pub fn invariance_check(w: &LaurentPolynomial, g: &IntegerMatrix) -> bool {
    w.transform(g) == *w
}

/// `g` permutes `B₁` and preserves the coefficient of every element of `B₁`.
pub fn candidate_filter(w: &LaurentPolynomial, g: &IntegerMatrix) -> bool {
    let B1Rank { b1, .. } = b1_support_rank(w);
    let mut image = BTreeSet::new();
    for e in &b1 {
        let big: Vec<BigInt> = e.iter().map(|&x| BigInt::from(x)).collect();
        let Some(img) = g.mul_vec(&big).iter().map(ToPrimitive::to_i64).collect::<Option<Vec<i64>>>() else {
            return false;
        };
        if !b1.contains(&img) || w.coefficient(&img) != w.coefficient(e) {
            return false;
        }
        image.insert(img);
    }
    image.len() == b1.len()
}

/// Lowest exponent along `axis` and the dense coefficients from there up.
pub(crate) fn univariate_coeffs(w: &LaurentPolynomial, axis: usize) -> (i64, Vec<BigInt>) {
    let lo = w.terms.keys().map(|e| e[axis]).min().unwrap_or(0);
    let hi = w.terms.keys().map(|e| e[axis]).max().unwrap_or(0);
    let mut coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
    for (e, c) in &w.terms {
        coeffs[(e[axis] - lo) as usize] += c;
    }
    (lo, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torussym::TorsionPoint;

    fn cp2() -> LaurentPolynomial {
        LaurentPolynomial::from_terms(2, [(1, vec![1, 0]), (1, vec![0, 1]), (1, vec![-1, -1])])
    }

    fn pt(c: &[(i64, i64)]) -> TorsionPoint {
        TorsionPoint::from_fractions(c)
    }

    fn cint(n: i64) -> CyclotomicNumber {
        CyclotomicNumber::from_integer(n)
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(cp2().evaluate(&pt(&[(0, 1), (0, 1)])), cint(3));
        let three_zeta = CyclotomicNumber::root_of_unity(3, 1).scale(&qlinalg::q(3));
        assert_eq!(cp2().evaluate(&pt(&[(1, 3), (1, 3)])), three_zeta);
        let sym = LaurentPolynomial::from_terms(2, [(1, vec![1, 0]), (1, vec![-1, 0])]);
        assert_eq!(sym.evaluate(&pt(&[(1, 2), (1, 5)])), cint(-2));
    }

    #[test]
    fn gradient_hessian_examples() {
        let gh = gradient_hessian(&cp2(), &pt(&[(0, 1), (0, 1)]));
        assert_eq!(gh.grad, vec![cint(0), cint(0)]);
        assert_eq!(gh.hess, vec![vec![cint(2), cint(1)], vec![cint(1), cint(2)]]);

        let sym = LaurentPolynomial::from_terms(1, [(1, vec![1]), (1, vec![-1])]);
        let gh = gradient_hessian(&sym, &pt(&[(1, 2)]));
        assert_eq!(gh.grad, vec![cint(0)]);
        assert_eq!(gh.hess, vec![vec![cint(-2)]]);

        let c = LaurentPolynomial::constant(2, 7);
        let gh = gradient_hessian(&c, &pt(&[(1, 3), (2, 5)]));
        assert!(gh.grad.iter().all(CyclotomicNumber::is_zero));
        assert!(gh.hess.iter().flatten().all(CyclotomicNumber::is_zero));
    }

    #[test]
    fn criticality_examples() {
        assert!(is_critical(&cp2(), &pt(&[(1, 3), (1, 3)])));
        // ∂W/∂y = 1 - x^-1 y^-2 = 1 - (-1) = 2 at (-1, 1)
        assert!(!is_critical(&cp2(), &pt(&[(1, 2), (0, 1)])));
        assert!(is_critical(&LaurentPolynomial::constant(2, 4), &pt(&[(1, 7), (3, 8)])));
    }

    #[test]
    fn torsion_search_examples() {
        let crit = torsion_critical_points(&cp2(), 6, DEFAULT_GRID_CAP).unwrap();
        assert_eq!(crit, vec![pt(&[(0, 1), (0, 1)]), pt(&[(1, 3), (1, 3)]), pt(&[(2, 3), (2, 3)])]);

        let lin = LaurentPolynomial::from_terms(2, [(1, vec![1, 0]), (1, vec![0, 1])]);
        assert!(torsion_critical_points(&lin, 12, DEFAULT_GRID_CAP).unwrap().is_empty());

        let cube = LaurentPolynomial::from_terms(
            3,
            [(1, vec![1, 0, 0]), (1, vec![-1, 0, 0]), (1, vec![0, 1, 0]), (1, vec![0, -1, 0]), (1, vec![0, 0, 1]), (1, vec![0, 0, -1])],
        );
        let crit = torsion_critical_points(&cube, 2, DEFAULT_GRID_CAP).unwrap();
        assert_eq!(crit.len(), 8);

        assert!(matches!(torsion_critical_points(&cube, 100, 1000), Err(LaurentError::GridTooLarge { .. })));
    }

    #[test]
    fn b1_examples() {
        let r = b1_support_rank(&cp2());
        assert_eq!(r.rank, 2);
        assert_eq!(r.b1.len(), 3);
        let c = b1_support_rank(&LaurentPolynomial::constant(2, 5));
        assert_eq!((c.b1.len(), c.rank), (0, 0));
        let mono = LaurentPolynomial::from_terms(2, [(5, vec![0, 0]), (2, vec![3, 0])]);
        assert_eq!(b1_support_rank(&mono).rank, 1);
    }

    #[test]
    fn invariance_examples() {
        let r3 = IntegerMatrix::from_rows(&[[0, -1], [1, -1]]);
        assert!(invariance_check(&cp2(), &r3));
        let swap = IntegerMatrix::from_rows(&[[0, 1], [1, 0]]);
        let xy = LaurentPolynomial::from_terms(2, [(1, vec![1, 0]), (1, vec![0, 1])]);
        assert!(invariance_check(&xy, &swap));
        let x2y = LaurentPolynomial::from_terms(2, [(1, vec![1, 0]), (2, vec![0, 1])]);
        assert!(!invariance_check(&x2y, &swap));
    }

    #[test]
    fn candidate_filter_examples() {
        assert!(candidate_filter(&cp2(), &IntegerMatrix::from_rows(&[[0, 1], [1, 0]])));
        assert!(candidate_filter(&cp2(), &IntegerMatrix::from_rows(&[[0, -1], [1, -1]])));
        // (0,1) ↦ (1,1) which is not a normal of CP²
        assert!(!candidate_filter(&cp2(), &IntegerMatrix::from_rows(&[[1, 1], [0, 1]])));
        let x2y = LaurentPolynomial::from_terms(2, [(1, vec![1, 0]), (2, vec![0, 1])]);
        assert!(candidate_filter(&x2y, &IntegerMatrix::identity(2)));
        // permutes B1 but not the coefficients
        assert!(!candidate_filter(&x2y, &IntegerMatrix::from_rows(&[[0, 1], [1, 0]])));
    }

    #[test]
    fn display() {
        assert_eq!(cp2().to_string(), "x^-1*y^-1 + y + x");
    }
}
