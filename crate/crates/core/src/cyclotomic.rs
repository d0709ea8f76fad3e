//! Exact arithmetic in cyclotomic fields `Q(ζ_d)`, with elements stored in
//! the power basis `1, ζ_d, …, ζ_d^{φ(d)-1}` modulo the cyclotomic polynomial
//! `Φ_d`. Every value is kept at its least conductor, so structural equality
//! is value equality.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::qlinalg::{self, Q};

pub fn euler_phi(n: u32) -> u32 {
    assert!(n >= 1);
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

pub fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

fn poly_cache() -> &'static Mutex<HashMap<u32, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of `Φ_d`, lowest degree first.
pub fn cyclotomic_polynomial(d: u32) -> Arc<Vec<BigInt>> {
    if let Some(p) = poly_cache().lock().unwrap().get(&d) {
        return p.clone();
    }
    // x^d - 1 divided by Φ_e for every proper divisor e
    let mut num = vec![BigInt::zero(); d as usize + 1];
    num[0] = -BigInt::one();
    num[d as usize] = BigInt::one();
    for e in divisors(d).into_iter().filter(|&e| e < d) {
        let den = cyclotomic_polynomial(e);
        num = exact_poly_div(&num, &den);
    }
    let p = Arc::new(num);
    poly_cache().lock().unwrap().insert(d, p.clone());
    p
}

/// Exact division by a monic polynomial; panics on a nonzero remainder.
fn exact_poly_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    assert!(den[dn].is_one());
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![BigInt::zero(); qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[k + j] -= &c * dj;
        }
        quot[k] = c;
    }
    assert!(rem.iter().all(Zero::is_zero), "inexact polynomial division");
    quot
}

/// Reduces `Σ c_k x^k` modulo `Φ_d`, returning `φ(d)` coefficients.
fn reduce_mod_phi(mut coeffs: Vec<Q>, d: u32) -> Vec<Q> {
    let phi = cyclotomic_polynomial(d);
    let deg = phi.len() - 1;
    if coeffs.len() < deg {
        coeffs.resize(deg, Q::zero());
        return coeffs;
    }
    for k in (deg..coeffs.len()).rev() {
        let c = std::mem::replace(&mut coeffs[k], Q::zero());
        if c.is_zero() {
            continue;
        }
        for (j, pj) in phi.iter().enumerate().take(deg) {
            let v = &c * Q::from_integer(pj.clone());
            coeffs[k - deg + j] -= v;
        }
    }
    coeffs.truncate(deg);
    coeffs
}

/// Cached data to test membership of a `Q(ζ_d)` element in `Q(ζ_e)`, `e | d`.
struct Embedding {
    /// `φ(d) × φ(e)` matrix whose columns are the images of `ζ_e^k`.
    image: Vec<Vec<Q>>,
    rows: Vec<usize>,
    inverse: Vec<Vec<Q>>,
}

fn embedding(d: u32, e: u32) -> Arc<Embedding> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<Embedding>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(x) = cache.lock().unwrap().get(&(d, e)) {
        return x.clone();
    }
    let pd = euler_phi(d) as usize;
    let pe = euler_phi(e) as usize;
    let step = (d / e) as usize;
    let mut image = vec![vec![Q::zero(); pe]; pd];
    for k in 0..pe {
        let mut v = vec![Q::zero(); d as usize];
        v[(k * step) % d as usize] = Q::one();
        let red = reduce_mod_phi(v, d);
        for (i, x) in red.into_iter().enumerate() {
            image[i][k] = x;
        }
    }
    // choose φ(e) independent rows
    let mut rows = Vec::new();
    let mut acc: Vec<Vec<Q>> = Vec::new();
    for (i, r) in image.iter().enumerate() {
        acc.push(r.clone());
        if qlinalg::rank(&acc) > rows.len() {
            rows.push(i);
        } else {
            acc.pop();
        }
        if rows.len() == pe {
            break;
        }
    }
    let square: Vec<Vec<Q>> = rows.iter().map(|&i| image[i].clone()).collect();
    let inverse = qlinalg::inverse(&square).expect("embedding has full column rank");
    let emb = Arc::new(Embedding { image, rows, inverse });
    cache.lock().unwrap().insert((d, e), emb.clone());
    emb
}

/// An element of `Q(ζ_d)` at its least conductor `d`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicNumber {
    conductor: u32,
    coeffs: Vec<Q>,
}

impl CyclotomicNumber {
    pub fn zero() -> Self {
        Self::from_rational(Q::zero())
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(qlinalg::q(n))
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Self::from_rational(qlinalg::qz(n))
    }

    pub fn from_rational(r: Q) -> Self {
        CyclotomicNumber { conductor: 1, coeffs: vec![r] }
    }

    /// `ζ_d^k`.
    pub fn root_of_unity(d: u32, k: i64) -> Self {
        let mut v = vec![Q::zero(); d as usize];
        v[k.rem_euclid(d as i64) as usize] = Q::one();
        Self::from_power_sum(d, v)
    }

    /// `Σ_k c_k ζ_d^k` for an arbitrary-length coefficient list.
    pub fn from_power_sum(d: u32, coeffs: Vec<Q>) -> Self {
        assert!(d >= 1);
        let mut folded = vec![Q::zero(); d as usize];
        for (k, c) in coeffs.into_iter().enumerate() {
            folded[k % d as usize] += c;
        }
        Self::from_coords(d, reduce_mod_phi(folded, d))
    }

    /// Element with power-basis coordinates `coords` (length `φ(d)`) in `Q(ζ_d)`.
    pub fn from_coords(d: u32, coords: Vec<Q>) -> Self {
        assert_eq!(coords.len(), euler_phi(d) as usize);
        let mut x = CyclotomicNumber { conductor: d, coeffs: coords };
        x.minimize_conductor();
        x
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// Power-basis coordinates at the stored (least) conductor.
    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    /// Power-basis coordinates in `Q(ζ_d)`; `d` must be a multiple of the conductor.
    pub fn coords_at(&self, d: u32) -> Vec<Q> {
        assert!(d.is_multiple_of(self.conductor), "conductor {} does not divide {d}", self.conductor);
        if d == self.conductor {
            return self.coeffs.clone();
        }
        let step = (d / self.conductor) as usize;
        let mut v = vec![Q::zero(); d as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            v[(k * step) % d as usize] += c;
        }
        reduce_mod_phi(v, d)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.conductor == 1 && self.coeffs[0].is_one()
    }

    /// All power-basis coordinates are integers, i.e. the value lies in `Z[ζ]`.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn as_rational(&self) -> Option<&Q> {
        (self.conductor == 1).then(|| &self.coeffs[0])
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|r| r.is_integer()).map(|r| r.to_integer())
    }

    pub fn scale(&self, r: &Q) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * r).collect();
        Self::from_coords(self.conductor, coeffs)
    }

    fn common(&self, other: &Self) -> (u32, Vec<Q>, Vec<Q>) {
        let d = self.conductor.lcm(&other.conductor);
        (d, self.coords_at(d), other.coords_at(d))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (d, a, b) = self.common(other);
        Self::from_coords(d, a.into_iter().zip(b).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (d, a, b) = self.common(other);
        Self::from_coords(d, a.into_iter().zip(b).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self) -> Self {
        CyclotomicNumber { conductor: self.conductor, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (d, a, b) = self.common(other);
        let mut prod = vec![Q::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        Self::from_coords(d, reduce_mod_phi(prod, d))
    }

    /// Matrix of multiplication by `self` on the power basis of `Q(ζ_d)`.
    pub fn multiplication_matrix(&self, d: u32) -> Vec<Vec<Q>> {
        let n = euler_phi(d) as usize;
        let mut cols = Vec::with_capacity(n);
        for k in 0..n {
            let mut e = vec![Q::zero(); n];
            e[k] = Q::one();
            let basis = CyclotomicNumber { conductor: d, coeffs: e };
            let prod = self.mul_at(&basis, d);
            cols.push(prod);
        }
        (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect()
    }

    fn mul_at(&self, other: &CyclotomicNumber, d: u32) -> Vec<Q> {
        let a = self.coords_at(d);
        let b = other.coeffs.clone();
        let mut prod = vec![Q::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        reduce_mod_phi(prod, d)
    }

    /// Field norm `N_{Q(ζ_d)/Q}` computed in `Q(ζ_d)`.
    pub fn field_norm(&self, d: u32) -> Q {
        determinant_q(self.multiplication_matrix(d))
    }

    /// Multiplicative inverse, if nonzero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = self.conductor;
        let m = self.multiplication_matrix(d);
        let mut one = vec![Q::zero(); m.len()];
        one[0] = Q::one();
        match qlinalg::solve(&m, &one) {
            qlinalg::Solution::Unique(x) => Some(Self::from_coords(d, x)),
            _ => None,
        }
    }

    /// If this is `±ζ_d^k` for some root of unity, returns `(order, exponent)`
    /// with the value equal to `ζ_order^exponent`.
    pub fn as_root_of_unity(&self) -> Option<(u32, u32)> {
        let d = self.conductor;
        let order = if d.is_multiple_of(2) { d } else { 2 * d };
        (0..order).find(|&k| Self::root_of_unity(order, k as i64) == *self).map(|k| (order, k))
    }

    fn minimize_conductor(&mut self) {
        let d = self.conductor;
        if d == 1 {
            return;
        }
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            let c = self.coeffs[0].clone();
            *self = CyclotomicNumber { conductor: 1, coeffs: vec![c] };
            return;
        }
        for e in divisors(d).into_iter().filter(|&e| e > 1 && e < d) {
            let emb = embedding(d, e);
            let sel: Vec<Q> = emb.rows.iter().map(|&i| self.coeffs[i].clone()).collect();
            let c: Vec<Q> = emb
                .inverse
                .iter()
                .map(|row| row.iter().zip(&sel).map(|(a, b)| a * b).sum())
                .collect();
            let fits = emb
                .image
                .iter()
                .zip(&self.coeffs)
                .all(|(row, x)| row.iter().zip(&c).map(|(a, b)| a * b).sum::<Q>() == *x);
            if fits {
                *self = CyclotomicNumber { conductor: e, coeffs: c };
                return;
            }
        }
    }
}

pub(crate) fn determinant_q(mut a: Vec<Vec<Q>>) -> Q {
    let n = a.len();
    let mut det = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Q::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[c][c];
            for j in c..n {
                let v = &f * &a[c][j];
                a[i][j] -= v;
            }
        }
    }
    det
}

fn fmt_rational(r: &Q) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
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
            let coef = fmt_rational(&mag);
            match k {
                0 => write!(f, "{coef}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{coef}")?;
                    }
                    write!(f, "ζ{}", self.conductor)?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for CyclotomicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Approximate complex value, for float sanity checks only.
pub fn approx_complex(x: &CyclotomicNumber) -> (f64, f64) {
    let d = x.conductor as f64;
    let mut re = 0.0;
    let mut im = 0.0;
    for (k, c) in x.coeffs.iter().enumerate() {
        let cf = c.numer().to_f64().unwrap_or(f64::NAN) / c.denom().to_f64().unwrap_or(f64::NAN);
        let t = 2.0 * std::f64::consts::PI * k as f64 / d;
        re += cf * t.cos();
        im += cf * t.sin();
    }
    (re, im)
}

pub fn rational_from_ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(d: u32, k: i64) -> CyclotomicNumber {
        CyclotomicNumber::root_of_unity(d, k)
    }

    #[test]
    fn cyclotomic_polynomials() {
        let to_i = |d| cyclotomic_polynomial(d).iter().map(|c| c.to_i64().unwrap()).collect::<Vec<_>>();
        assert_eq!(to_i(1), vec![-1, 1]);
        assert_eq!(to_i(2), vec![1, 1]);
        assert_eq!(to_i(3), vec![1, 1, 1]);
        assert_eq!(to_i(4), vec![1, 0, 1]);
        assert_eq!(to_i(6), vec![1, -1, 1]);
        assert_eq!(to_i(12), vec![1, 0, -1, 0, 1]);
        for d in 1..=60 {
            assert_eq!(cyclotomic_polynomial(d).len() - 1, euler_phi(d) as usize);
        }
    }

    #[test]
    fn roots_of_unity_reduce_to_least_conductor() {
        assert_eq!(z(2, 1), CyclotomicNumber::from_integer(-1));
        assert_eq!(z(6, 2), z(3, 1));
        assert_eq!(z(6, 1).conductor(), 3);
        assert_eq!(z(4, 2), CyclotomicNumber::from_integer(-1));
        // ζ3 + ζ3^2 = -1
        assert_eq!(z(3, 1).add(&z(3, 2)), CyclotomicNumber::from_integer(-1));
        assert_eq!(z(12, 4), z(3, 1));
    }

    #[test]
    fn arithmetic() {
        let a = z(3, 1);
        assert_eq!(a.mul(&a).mul(&a), CyclotomicNumber::one());
        let i = z(4, 1);
        let w = z(3, 1);
        let p = i.mul(&w);
        assert_eq!(p.conductor(), 12);
        assert_eq!(p, z(12, 3 + 4));
        assert_eq!(p.inverse().unwrap(), z(12, -7));
        // golden-ratio unit in Z[ζ5]: (1 + ζ5) has norm 1
        let u = CyclotomicNumber::one().add(&z(5, 1));
        assert_eq!(u.field_norm(5), qlinalg::q(1));
        assert_eq!(CyclotomicNumber::from_integer(2).field_norm(5), qlinalg::q(16));
    }

    #[test]
    fn display() {
        let three_zeta = z(3, 1).scale(&qlinalg::q(3));
        assert_eq!(three_zeta.to_string(), "3ζ3");
        assert_eq!(CyclotomicNumber::from_integer(-2).to_string(), "-2");
    }

    #[test]
    fn as_root_of_unity() {
        assert_eq!(z(3, 2).as_root_of_unity(), Some((6, 4)));
        assert_eq!(CyclotomicNumber::from_integer(-1).as_root_of_unity(), Some((2, 1)));
        assert_eq!(CyclotomicNumber::from_integer(2).as_root_of_unity(), None);
    }
}
