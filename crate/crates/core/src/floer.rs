//! Rank-two Clifford algebras over cyclotomic integers and the algebraic
//! constraints they put on monodromy: continuation elements, binary
//! quadratic forms, the rank-one classifier and the Hessian checks.
//!
//! The algebra for constants `(λ, μ, ν)` has basis `1, u, v, uv` with
//! `u² = λ`, `uv + vu = μ`, `v² = ν`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::{cyclotomic_polynomial, euler_phi, CyclotomicNumber};
use crate::intlat::{kernel_lattice, IntegerMatrix};
use crate::laurent::{gradient_hessian, invariance_check, is_critical, univariate_coeffs, LaurentPolynomial};
use crate::qlinalg::Q;
use crate::torussym::TorsionPoint;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FloerError {
    #[error("expected a polynomial in 2 variables, got {0}")]
    NotTwoVariables(usize),
    #[error("point {0} is not a critical point")]
    NotCritical(TorsionPoint),
    #[error("action {0} is not of the form [[±1, m], [0, ±1]]")]
    UnsupportedAction(IntegerMatrix),
    #[error("constants do not lie in Q(ζ_{0})")]
    ConductorMismatch(u32),
    #[error("discriminant {0} is not ±1")]
    BadDiscriminant(i64),
    #[error("polynomial depends on more than one variable")]
    NotUnivariate,
    #[error("polynomial is constant")]
    Constant,
    #[error("polynomial is not invariant under {0}")]
    NotInvariant(IntegerMatrix),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliffordData {
    pub lambda: CyclotomicNumber,
    pub mu: CyclotomicNumber,
    pub nu: CyclotomicNumber,
    /// Some constant is not in `Z[ζ]` (odd second partial).
    pub half_integral: bool,
}

impl CliffordData {
    pub fn new(lambda: CyclotomicNumber, mu: CyclotomicNumber, nu: CyclotomicNumber) -> Self {
        let half_integral = ![&lambda, &mu, &nu].iter().all(|x| x.is_integral());
        CliffordData { lambda, mu, nu, half_integral }
    }

    pub fn integers(lambda: i64, mu: i64, nu: i64) -> Self {
        Self::new(
            CyclotomicNumber::from_integer(lambda),
            CyclotomicNumber::from_integer(mu),
            CyclotomicNumber::from_integer(nu),
        )
    }

    fn conductor(&self) -> u32 {
        let c = self.lambda.conductor().lcm(&self.mu.conductor());
        c.lcm(&self.nu.conductor())
    }

    /// `Q(a, b) = λa² + μab + νb²`, the square of `au + bv`.
    pub fn odd_square(&self, a: &CyclotomicNumber, b: &CyclotomicNumber) -> CyclotomicNumber {
        self.lambda
            .mul(&a.mul(a))
            .add(&self.mu.mul(&a.mul(b)))
            .add(&self.nu.mul(&b.mul(b)))
    }

    /// `p² + μpq + λνq²`, the product of `p + q·uv` with its conjugate.
    pub fn even_norm(&self, p: &CyclotomicNumber, q: &CyclotomicNumber) -> CyclotomicNumber {
        p.mul(p).add(&self.mu.mul(&p.mul(q))).add(&self.lambda.mul(&self.nu).mul(&q.mul(q)))
    }
}

impl fmt::Display for CliffordData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "λ = {}, μ = {}, ν = {}", self.lambda, self.mu, self.nu)?;
        if self.half_integral {
            write!(f, " (HALF_INTEGRAL)")?;
        }
        Ok(())
    }
}

/// `a₀ + a_u·u + a_v·v + a_uv·uv`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliffordElement {
    pub a0: CyclotomicNumber,
    pub au: CyclotomicNumber,
    pub av: CyclotomicNumber,
    pub auv: CyclotomicNumber,
}

impl CliffordElement {
    pub fn new(a0: CyclotomicNumber, au: CyclotomicNumber, av: CyclotomicNumber, auv: CyclotomicNumber) -> Self {
        CliffordElement { a0, au, av, auv }
    }

    pub fn integers(a0: i64, au: i64, av: i64, auv: i64) -> Self {
        let c = CyclotomicNumber::from_integer;
        Self::new(c(a0), c(au), c(av), c(auv))
    }

    pub fn scalar(x: CyclotomicNumber) -> Self {
        let z = CyclotomicNumber::zero;
        Self::new(x, z(), z(), z())
    }

    pub fn even(p: CyclotomicNumber, q: CyclotomicNumber) -> Self {
        let z = CyclotomicNumber::zero;
        Self::new(p, z(), z(), q)
    }

    pub fn odd(a: CyclotomicNumber, b: CyclotomicNumber) -> Self {
        let z = CyclotomicNumber::zero;
        Self::new(z(), a, b, z())
    }

    fn parts(&self) -> [&CyclotomicNumber; 4] {
        [&self.a0, &self.au, &self.av, &self.auv]
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.a0.add(&o.a0), self.au.add(&o.au), self.av.add(&o.av), self.auv.add(&o.auv))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.a0.sub(&o.a0), self.au.sub(&o.au), self.av.sub(&o.av), self.auv.sub(&o.auv))
    }

    pub fn scale(&self, x: &CyclotomicNumber) -> Self {
        Self::new(self.a0.mul(x), self.au.mul(x), self.av.mul(x), self.auv.mul(x))
    }

    pub fn is_zero(&self) -> bool {
        self.parts().iter().all(|x| x.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.parts().iter().all(|x| x.is_integral())
    }
}

impl fmt::Display for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (c, name) in self.parts().iter().zip(["", "u", "v", "uv"]) {
            if c.is_zero() {
                continue;
            }
            parts.push(match (name, c.is_one()) {
                ("", _) => c.to_string(),
                (_, true) => name.to_string(),
                _ => format!("({c})·{name}"),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Product in the Clifford algebra, reduced with `vu = μ − uv`, `u² = λ`,
/// `v² = ν`.
pub fn clifford_mul(a: &CliffordElement, b: &CliffordElement, d: &CliffordData) -> CliffordElement {
    let (l, m, n) = (&d.lambda, &d.mu, &d.nu);
    let [a0, a1, a2, a3] = a.parts();
    let [b0, b1, b2, b3] = b.parts();
    let ln = l.mul(n);
    let one = a0.mul(b0).add(&l.mul(&a1.mul(b1))).add(&m.mul(&a2.mul(b1))).add(&n.mul(&a2.mul(b2))).sub(&ln.mul(&a3.mul(b3)));
    let u = a0.mul(b1).add(&a1.mul(b0)).sub(&n.mul(&a2.mul(b3))).add(&m.mul(&a3.mul(b1))).add(&n.mul(&a3.mul(b2)));
    let v = a0.mul(b2).add(&a2.mul(b0)).add(&l.mul(&a1.mul(b3))).add(&m.mul(&a2.mul(b3))).sub(&l.mul(&a3.mul(b1)));
    let uv = a0.mul(b3).add(&a3.mul(b0)).add(&a1.mul(b2)).sub(&a2.mul(b1)).add(&m.mul(&a3.mul(b3)));
    CliffordElement::new(one, u, v, uv)
}

/// `λ = −½ ∂²W/∂x²`, `μ = −∂²W/∂x∂y`, `ν = −½ ∂²W/∂y²` at a critical point.
pub fn clifford_constants(w: &LaurentPolynomial, p: &TorsionPoint) -> Result<CliffordData, FloerError> {
    if w.dim() != 2 {
        return Err(FloerError::NotTwoVariables(w.dim()));
    }
    if !is_critical(w, p) {
        return Err(FloerError::NotCritical(p.clone()));
    }
    let h = gradient_hessian(w, p).hess;
    let minus_half = Q::new(BigInt::from(-1), BigInt::from(2));
    Ok(CliffordData::new(h[0][0].scale(&minus_half), h[0][1].neg(), h[1][1].scale(&minus_half)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign(self) -> i64 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Solvable(CliffordElement),
    Unsolvable,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    ClosedForm,
    /// The linear conditions force `c = 0`.
    NoSolutions,
    /// Every solution has norm divisible by this prime, so none is a unit.
    ModularCertificate(u32),
    /// A unit solution was found at this height.
    Search(u32),
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Continuation {
    pub verdict: Verdict,
    pub method: Method,
}

impl Continuation {
    pub fn solvable(&self) -> Option<bool> {
        match self.verdict {
            Verdict::Solvable(_) => Some(true),
            Verdict::Unsolvable => Some(false),
            Verdict::Unknown => None,
        }
    }
}

/// Limits for the generic solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_height: u32,
    pub max_evaluations: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_height: 50, max_evaluations: 200_000 }
    }
}

fn check_action(action: &IntegerMatrix) -> Result<(i64, i64, i64), FloerError> {
    let bad = || FloerError::UnsupportedAction(action.clone());
    if action.rows() != 2 || action.cols() != 2 {
        return Err(bad());
    }
    let e = action.to_i64().ok_or_else(bad)?;
    let (e1, m, low, e2) = (e[0], e[1], e[2], e[3]);
    if low != 0 || e1.abs() != 1 || e2.abs() != 1 {
        return Err(bad());
    }
    Ok((e1, m, e2))
}

/// `g·u = ε₁u + m·v`, `g·v = ε₂v`.
fn action_images(e1: i64, m: i64, e2: i64) -> (CliffordElement, CliffordElement) {
    (CliffordElement::integers(0, e1, m, 0), CliffordElement::integers(0, 0, e2, 0))
}

/// `c` has the given parity, satisfies `c·u = ±(g·u)·c` and `c·v = ±(g·v)·c`
/// (sign `−1` for odd `c`), and is invertible over the coefficient ring.
pub fn verify_continuation(d: &CliffordData, action: &IntegerMatrix, parity: Parity, c: &CliffordElement) -> bool {
    let Ok((e1, m, e2)) = check_action(action) else { return false };
    let parity_ok = match parity {
        Parity::Even => c.au.is_zero() && c.av.is_zero(),
        Parity::Odd => c.a0.is_zero() && c.auv.is_zero(),
    };
    if !parity_ok || !c.is_integral() {
        return false;
    }
    if !residuals(d, e1, m, e2, parity, c).iter().all(CliffordElement::is_zero) {
        return false;
    }
    is_unit(&norm_of(d, parity, c))
}

fn residuals(d: &CliffordData, e1: i64, m: i64, e2: i64, parity: Parity, c: &CliffordElement) -> [CliffordElement; 2] {
    let (gu, gv) = action_images(e1, m, e2);
    let s = CyclotomicNumber::from_integer(parity.sign());
    let u = CliffordElement::integers(0, 1, 0, 0);
    let v = CliffordElement::integers(0, 0, 1, 0);
    [
        clifford_mul(c, &u, d).sub(&clifford_mul(&gu, c, d).scale(&s)),
        clifford_mul(c, &v, d).sub(&clifford_mul(&gv, c, d).scale(&s)),
    ]
}

fn norm_of(d: &CliffordData, parity: Parity, c: &CliffordElement) -> CyclotomicNumber {
    match parity {
        Parity::Even => d.even_norm(&c.a0, &c.auv),
        Parity::Odd => d.odd_square(&c.au, &c.av),
    }
}

fn is_unit(x: &CyclotomicNumber) -> bool {
    x.is_integral() && !x.is_zero() && x.field_norm(x.conductor()).abs().is_one()
}

/// Decides whether a continuation element of the given parity exists with
/// coefficients in `Z[ζ_conductor]`.
///
/// With `μ = ν = 0` and integral `λ` the shear `[[1, m], [0, 1]]` and the
/// reflection `[[−1, m], [0, 1]]` have closed forms; everything else goes
/// through [`continuation_search`].
pub fn continuation_solvable(
    d: &CliffordData,
    action: &IntegerMatrix,
    parity: Parity,
    conductor: u32,
) -> Result<Continuation, FloerError> {
    let (e1, m, e2) = check_action(action)?;
    let lambda = d.lambda.as_integer();
    if let (Some(lambda), true, true) = (lambda, d.mu.is_zero(), d.nu.is_zero()) {
        let closed = |verdict| Ok(Continuation { verdict, method: Method::ClosedForm });
        let int = |x: &BigInt| CyclotomicNumber::from_bigint(x);
        let m_big = BigInt::from(m);
        match (e1, e2, parity) {
            (1, 1, Parity::Even) => {
                // m·p = −2λq with p a unit
                if lambda.is_zero() {
                    return closed(if m == 0 { Verdict::Solvable(CliffordElement::integers(1, 0, 0, 0)) } else { Verdict::Unsolvable });
                }
                let two_l = &lambda * 2;
                if m_big.is_multiple_of(&two_l) {
                    let q = -(&m_big / &two_l);
                    return closed(Verdict::Solvable(CliffordElement::even(CyclotomicNumber::one(), int(&q))));
                }
                return closed(Verdict::Unsolvable);
            }
            // 2λa = 0 and m·a = 0 leave no unit λa²
            (1, 1, Parity::Odd) => return closed(Verdict::Unsolvable),
            (-1, 1, Parity::Odd) => {
                // m·a = −2b with λa² a unit
                if lambda.abs().is_one() && m % 2 == 0 {
                    let b = BigInt::from(-m / 2);
                    return closed(Verdict::Solvable(CliffordElement::odd(CyclotomicNumber::one(), int(&b))));
                }
                return closed(Verdict::Unsolvable);
            }
            // 2p = 0
            (-1, 1, Parity::Even) => return closed(Verdict::Unsolvable),
            _ => {}
        }
    }
    continuation_search(d, action, parity, conductor, SearchLimits::default())
}

/// Generic solver: the conditions on `c` are linear, so the integer
/// solutions form a lattice `Λ`. Invertibility asks for a point of `Λ`
/// whose norm is a unit. A prime dividing the norm on all of `Λ` (checked
/// exhaustively mod p) proves there is none; otherwise small points are
/// searched by increasing height.
pub fn continuation_search(
    d: &CliffordData,
    action: &IntegerMatrix,
    parity: Parity,
    conductor: u32,
    limits: SearchLimits,
) -> Result<Continuation, FloerError> {
    let (e1, m, e2) = check_action(action)?;
    let dd = conductor.max(1);
    if !dd.is_multiple_of(d.conductor()) {
        return Err(FloerError::ConductorMismatch(dd));
    }
    let phi = euler_phi(dd) as usize;
    let basis_elem = |k: usize| -> CliffordElement {
        let mut coords = vec![Q::zero(); phi];
        coords[k % phi] = Q::one();
        let x = CyclotomicNumber::from_coords(dd, coords);
        let z = CyclotomicNumber::zero();
        match (parity, k < phi) {
            (Parity::Even, true) => CliffordElement::even(x, z),
            (Parity::Even, false) => CliffordElement::even(z, x),
            (Parity::Odd, true) => CliffordElement::odd(x, z),
            (Parity::Odd, false) => CliffordElement::odd(z, x),
        }
    };
    let element = |x: &[BigInt]| -> CliffordElement {
        let coords = |r: &[BigInt]| CyclotomicNumber::from_coords(dd, r.iter().map(|v| Q::from_integer(v.clone())).collect());
        let (first, second) = (coords(&x[..phi]), coords(&x[phi..]));
        match parity {
            Parity::Even => CliffordElement::even(first, second),
            Parity::Odd => CliffordElement::odd(first, second),
        }
    };

    // rows: unknowns; columns: coordinates of both residuals
    let mut rows: Vec<Vec<Q>> = Vec::with_capacity(2 * phi);
    for k in 0..2 * phi {
        let c = basis_elem(k);
        let mut row = Vec::with_capacity(8 * phi);
        for r in residuals(d, e1, m, e2, parity, &c) {
            for part in r.parts() {
                row.extend(part.coords_at(dd));
            }
        }
        rows.push(row);
    }
    let denom = rows.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|x| (x * Q::from_integer(denom.clone())).to_integer()).collect())
        .collect();
    let cols = ints.first().map_or(0, Vec::len);
    let lattice = kernel_lattice(&IntegerMatrix::from_big_rows(ints, cols));
    let basis = lattice.vectors();
    let rank = basis.len();
    if rank == 0 {
        return Ok(Continuation { verdict: Verdict::Unsolvable, method: Method::NoSolutions });
    }
    let combine = |t: &[i64]| -> Vec<BigInt> {
        let mut x = vec![BigInt::zero(); 2 * phi];
        for (ti, b) in t.iter().zip(&basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += bi * ti;
            }
        }
        x
    };
    let mut evaluations: u64 = 0;
    let try_height = |h: u32, evaluations: &mut u64| -> Option<Option<CliffordElement>> {
        let mut found = None;
        let ok = for_each_shell(rank, h as i64, &mut |t| {
            *evaluations += 1;
            if *evaluations > limits.max_evaluations {
                return Some(false);
            }
            let c = element(&combine(t));
            if is_unit(&norm_of(d, parity, &c)) {
                found = Some(c);
                return Some(true);
            }
            None
        });
        match ok {
            Some(true) => Some(found),
            Some(false) => None,
            None => Some(None),
        }
    };
    // cheap heights first, then the certificate, then the rest
    for h in 1..=limits.max_height.min(1) {
        match try_height(h, &mut evaluations) {
            Some(Some(c)) => return Ok(Continuation { verdict: Verdict::Solvable(c), method: Method::Search(h) }),
            Some(None) => {}
            None => return Ok(Continuation { verdict: Verdict::Unknown, method: Method::BudgetExhausted }),
        }
    }
    let data_integral = !d.half_integral;
    if data_integral {
        for p in [2u32, 3, 5, 7, 11, 13] {
            let Some(count) = (p as u64).checked_pow(rank as u32) else { break };
            if count > 4096 {
                break;
            }
            let all_divisible = all_residues(rank, p as i64, &mut |t| {
                let c = element(&combine(t));
                let n = norm_of(d, parity, &c).field_norm(dd);
                n.to_integer().is_multiple_of(&BigInt::from(p))
            });
            if all_divisible {
                return Ok(Continuation { verdict: Verdict::Unsolvable, method: Method::ModularCertificate(p) });
            }
        }
    }
    for h in 2..=limits.max_height {
        match try_height(h, &mut evaluations) {
            Some(Some(c)) => return Ok(Continuation { verdict: Verdict::Solvable(c), method: Method::Search(h) }),
            Some(None) => {}
            None => break,
        }
    }
    Ok(Continuation { verdict: Verdict::Unknown, method: Method::BudgetExhausted })
}

/// Calls `f` on every `t ∈ Z^rank` with `max |t_i| = h` until it returns `Some`.
fn for_each_shell(rank: usize, h: i64, f: &mut dyn FnMut(&[i64]) -> Option<bool>) -> Option<bool> {
    let mut t = vec![-h; rank];
    loop {
        if t.iter().any(|x| x.abs() == h) {
            if let Some(r) = f(&t) {
                return Some(r);
            }
        }
        let mut i = 0;
        loop {
            if i == rank {
                return None;
            }
            t[i] += 1;
            if t[i] <= h {
                break;
            }
            t[i] = -h;
            i += 1;
        }
    }
}

/// `f` holds for every `t ∈ {0..p-1}^rank`.
fn all_residues(rank: usize, p: i64, f: &mut dyn FnMut(&[i64]) -> bool) -> bool {
    let mut t = vec![0i64; rank];
    loop {
        if !f(&t) {
            return false;
        }
        let mut i = 0;
        loop {
            if i == rank {
                return true;
            }
            t[i] += 1;
            if t[i] < p {
                break;
            }
            t[i] = 0;
            i += 1;
        }
    }
}

/// Whether the integer `m` lies in `k·Z[ζ_d]`, read off the power-basis
/// coordinates of `m/k`.
pub fn cyclo_multiple_member(m: i64, k: i64, d: u32) -> bool {
    assert!(k > 0 && d >= 1);
    let x = CyclotomicNumber::from_rational(Q::new(BigInt::from(m), BigInt::from(k)));
    x.coords_at(d).iter().all(|c| c.is_integer())
}

/// The symmetric matrix `[[λ, μ′], [μ′, ν]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BinaryForm {
    pub lambda: i64,
    pub mu_half: i64,
    pub nu: i64,
}

impl BinaryForm {
    pub fn new(lambda: i64, mu_half: i64, nu: i64) -> Self {
        BinaryForm { lambda, mu_half, nu }
    }

    /// `μ′² − λν`.
    pub fn discriminant(&self) -> i64 {
        self.mu_half * self.mu_half - self.lambda * self.nu
    }

    pub fn matrix(&self) -> IntegerMatrix {
        IntegerMatrix::from_rows(&[[self.lambda, self.mu_half], [self.mu_half, self.nu]])
    }

    /// `uᵀ·q·u`.
    pub fn transform(&self, u: &IntegerMatrix) -> Self {
        let m = &(&u.transpose() * &self.matrix()) * u;
        let e = m.to_i64().expect("form entries fit in i64");
        BinaryForm::new(e[0], e[1], e[3])
    }

    pub fn is_canonical(&self) -> bool {
        matches!((self.lambda, self.mu_half, self.nu), (0, 1, 0) | (1, 0, 1) | (-1, 0, -1) | (1, 0, -1))
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.lambda, self.mu_half, self.nu) {
            (0, 1, 0) => write!(f, "hyperbolic [[0,1],[1,0]]"),
            (l, 0, n) => write!(f, "diag({l},{n})"),
            (l, m, n) => write!(f, "[[{l},{m}],[{m},{n}]]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedForm {
    pub canonical: BinaryForm,
    pub transform: IntegerMatrix,
}

fn mat(a: i64, b: i64, c: i64, d: i64) -> IntegerMatrix {
    IntegerMatrix::from_rows(&[[a, b], [c, d]])
}

/// Reduces a form of discriminant ±1 to one of hyperbolic, `diag(1,1)`,
/// `diag(−1,−1)` or `diag(1,−1)`, with `uᵀ·q·u = canonical`.
pub fn reduce_binary_form(q: BinaryForm) -> Result<ReducedForm, FloerError> {
    let disc = q.discriminant();
    let mut u = IntegerMatrix::identity(2);
    let mut f = q;
    let mut apply = |step: IntegerMatrix, f: &mut BinaryForm| {
        *f = f.transform(&step);
        u = &u * &step;
    };
    match disc {
        -1 => {
            // Gauss reduction of a definite form with determinant 1
            loop {
                if f.lambda.abs() > f.nu.abs() {
                    apply(mat(0, -1, 1, 0), &mut f);
                    continue;
                }
                if 2 * f.mu_half.abs() > f.lambda.abs() {
                    let k = (f.mu_half as f64 / f.lambda as f64).round() as i64;
                    apply(mat(1, -k, 0, 1), &mut f);
                    continue;
                }
                break;
            }
        }
        1 => {
            // isotropic vector from the rational roots of λx² + 2μ′xy + νy²
            let v = if f.lambda == 0 {
                (1, 0)
            } else {
                let (x, y) = (1 - f.mu_half, f.lambda);
                let g = x.gcd(&y);
                (x / g, y / g)
            };
            let e = v.0.extended_gcd(&v.1);
            // v.0·x + v.1·y = 1, so [[v.0, −y], [v.1, x]] has determinant 1
            apply(mat(v.0, -e.y * e.gcd.signum(), v.1, e.x * e.gcd.signum()), &mut f);
            debug_assert_eq!(f.lambda, 0);
            if f.mu_half < 0 {
                apply(mat(1, 0, 0, -1), &mut f);
            }
            let k = -Integer::div_floor(&f.nu, &2);
            apply(mat(1, k, 0, 1), &mut f);
            if f.nu == 1 {
                apply(mat(0, 1, 1, -1), &mut f);
            }
        }
        other => return Err(FloerError::BadDiscriminant(other)),
    }
    assert!(f.is_canonical(), "reduction ended at {f}");
    assert_eq!(q.transform(&u), f);
    Ok(ReducedForm { canonical: f, transform: u })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Rk1Case {
    /// `W = a + b·x^k`, `k > 0` after possibly inverting `x`.
    Monomial {
        #[serde(serialize_with = "crate::ser::display")]
        a: BigInt,
        #[serde(serialize_with = "crate::ser::display")]
        b: BigInt,
        k: i64,
    },
    /// `W = a ± (x + 1/x)`.
    SymmetricPm {
        #[serde(serialize_with = "crate::ser::display")]
        a: BigInt,
        sign: i64,
    },
    Residual,
}

impl fmt::Display for Rk1Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rk1Case::Monomial { a, b, k } => write!(f, "monomial a = {a}, b = {b}, k = {k}"),
            Rk1Case::SymmetricPm { a, sign } => write!(f, "symmetric a = {a}, sign {}", if *sign > 0 { "+" } else { "-" }),
            Rk1Case::Residual => write!(f, "residual"),
        }
    }
}

/// Shear parameters `m` compatible with the derivative's factorization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ShearSet {
    All,
    Multiples(u64),
    ZeroOnly,
}

impl fmt::Display for ShearSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShearSet::All => write!(f, "Z"),
            ShearSet::Multiples(1) => write!(f, "Z"),
            ShearSet::Multiples(k) => write!(f, "{k}Z"),
            ShearSet::ZeroOnly => write!(f, "{{0}}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rk1Report {
    pub case: Rk1Case,
    pub group_bound: &'static str,
    pub admissible_shears: ShearSet,
    /// `(c, k, [d_j])` with `dW/dx = c·x^k·∏Φ_{d_j}` when such a factorization exists.
    pub factorization: Option<(i64, i64, Vec<u32>)>,
}

pub const BOUND_MONOMIAL: &str = "{[[1, Z], [0, ±1]]}";
pub const BOUND_SYMMETRIC: &str = "{[[±1, 2Z], [0, 1]]}";
pub const BOUND_RESIDUAL: &str = "{[[1, 2Z], [0, 1]]}";

/// Divides `f` (ascending coefficients) by the monic `g`, if exact.
fn exact_div(f: &[BigInt], g: &[BigInt]) -> Option<Vec<BigInt>> {
    if f.len() < g.len() {
        return None;
    }
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    let mut quot = vec![BigInt::zero(); f.len() - dg];
    for i in (0..quot.len()).rev() {
        let c = r[i + dg].clone();
        for (j, gj) in g.iter().enumerate() {
            r[i + j] -= &c * gj;
        }
        quot[i] = c;
    }
    r.iter().all(Zero::is_zero).then_some(quot)
}

/// `c·x^k·∏Φ_{d_j}` with distinct `d_j`, or `None`.
fn cyclotomic_factorization(lo: i64, coeffs: &[BigInt]) -> Option<(i64, i64, Vec<u32>)> {
    let start = coeffs.iter().position(|c| !c.is_zero())?;
    let end = coeffs.iter().rposition(|c| !c.is_zero())?;
    let k = lo + start as i64;
    let mut f: Vec<BigInt> = coeffs[start..=end].to_vec();
    let lead = f.last().cloned()?;
    if !f.iter().all(|x| x.is_multiple_of(&lead)) {
        return None;
    }
    f = f.iter().map(|x| x / &lead).collect();
    let c = lead.to_i64()?;
    let mut ds = Vec::new();
    let deg = f.len() - 1;
    let bound = (2 * deg * deg + 2) as u32;
    for d in 1..=bound {
        if f.len() == 1 {
            break;
        }
        if euler_phi(d) as usize > f.len() - 1 {
            continue;
        }
        let phi_d = cyclotomic_polynomial(d);
        if let Some(qt) = exact_div(&f, &phi_d) {
            if exact_div(&qt, &phi_d).is_some() {
                return None; // repeated root
            }
            f = qt;
            ds.push(d);
        }
    }
    (f.len() == 1 && f[0].is_one()).then_some((c, k, ds))
}

/// Classifies a one-variable superpotential (or a two-variable one whose
/// support lies on one axis).
pub fn rk1_classify(w: &LaurentPolynomial) -> Result<Rk1Report, FloerError> {
    let axes: Vec<usize> = (0..w.dim()).filter(|&i| w.terms().keys().any(|e| e[i] != 0)).collect();
    let axis = match axes.as_slice() {
        [] => return Err(FloerError::Constant),
        [a] => *a,
        _ => return Err(FloerError::NotUnivariate),
    };
    let a = w.coefficient(&vec![0; w.dim()]);
    let nonconst: Vec<(i64, BigInt)> = w.terms().iter().filter(|(e, _)| e[axis] != 0).map(|(e, c)| (e[axis], c.clone())).collect();

    let deriv = w.partial(axis);
    let (lo, coeffs) = univariate_coeffs(&deriv, axis);
    let factorization = cyclotomic_factorization(lo, &coeffs);

    let case = match nonconst.as_slice() {
        [(k, b)] => Rk1Case::Monomial { a: a.clone(), b: b.clone(), k: k.abs() },
        [(-1, b1), (1, b2)] if b1 == b2 && b1.abs().is_one() => Rk1Case::SymmetricPm { a: a.clone(), sign: b1.to_i64().unwrap() },
        _ => Rk1Case::Residual,
    };
    let (group_bound, admissible_shears) = match &case {
        Rk1Case::Monomial { .. } => (BOUND_MONOMIAL, ShearSet::All),
        Rk1Case::SymmetricPm { .. } | Rk1Case::Residual => {
            let bound = if matches!(case, Rk1Case::Residual) { BOUND_RESIDUAL } else { BOUND_SYMMETRIC };
            let shears = match &factorization {
                Some((c, _, ds)) => {
                    let m = ds.iter().fold(2 * c.unsigned_abs(), |acc, &d| acc.lcm(&(d as u64)));
                    ShearSet::Multiples(m)
                }
                None => ShearSet::ZeroOnly,
            };
            (bound, shears)
        }
    };
    Ok(Rk1Report { case, group_bound, admissible_shears, factorization })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GroupKind {
    Order3,
    Order2,
    Order2F,
}

impl GroupKind {
    /// Generators the polynomial must be invariant under.
    pub fn generators(self) -> Vec<IntegerMatrix> {
        match self {
            GroupKind::Order3 => vec![mat(0, -1, 1, -1)],
            GroupKind::Order2 => vec![mat(-1, 0, 0, -1)],
            GroupKind::Order2F => vec![mat(-1, 0, 0, -1), mat(1, 0, 0, -1)],
        }
    }

    pub fn points(self) -> Vec<TorsionPoint> {
        let f = TorsionPoint::from_fractions;
        match self {
            GroupKind::Order3 => vec![f(&[(0, 1), (0, 1)]), f(&[(1, 3), (1, 3)]), f(&[(2, 3), (2, 3)])],
            _ => vec![f(&[(0, 1), (0, 1)]), f(&[(0, 1), (1, 2)]), f(&[(1, 2), (0, 1)]), f(&[(1, 2), (1, 2)])],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointConstants {
    pub point: TorsionPoint,
    pub constants: CliffordData,
    /// Constants divided by a square root of unity so that they are rational.
    #[serde(serialize_with = "crate::ser::display_vec")]
    pub normalized: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Conclusion {
    /// Normalized constants are `(−ε, −ε, −ε)` at every point.
    Cp2Type { epsilon: i64 },
    /// Matches `ε₁(x + 1/x) + ε₂(y + 1/y)` after the change of basis.
    Diagonal { eps1: i64, eps2: i64, basis: IntegerMatrix },
    /// Matches `x + 1/x + y + 1/y − xy − 1/(xy)` after the change of basis.
    Hyperbolic { basis: IntegerMatrix },
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conclusion::Cp2Type { epsilon } => write!(f, "CP^2 type, epsilon {epsilon}"),
            Conclusion::Diagonal { eps1, eps2, basis } => write!(f, "diagonal, epsilon ({eps1}, {eps2}) in basis {basis}"),
            Conclusion::Hyperbolic { basis } => write!(f, "hyperbolic in basis {basis}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub kind: GroupKind,
    pub points: Vec<PointConstants>,
    pub conclusion: Option<Conclusion>,
    pub violation: Option<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Divides `(λ, μ, ν)` by the first `ω = ζ^{2j}` making all three rational.
fn normalize(c: &CliffordData) -> Option<Vec<Q>> {
    let order = c.conductor().lcm(&2);
    for j in 0..order {
        let inv = CyclotomicNumber::root_of_unity(order, -2 * j as i64);
        let vals: Vec<CyclotomicNumber> = [&c.lambda, &c.mu, &c.nu].iter().map(|x| x.mul(&inv)).collect();
        if let Some(r) = vals.iter().map(|x| x.as_rational().cloned()).collect::<Option<Vec<Q>>>() {
            return Some(r);
        }
    }
    None
}

/// `Σ c·z^{U^{-T}β}` for a reference written in the basis given by `u`.
fn in_original_basis(reference: &[(i64, [i64; 2])], u: &IntegerMatrix) -> LaurentPolynomial {
    let inv_t = u.unimodular_inverse().expect("unimodular").transpose();
    LaurentPolynomial::from_terms(
        2,
        reference.iter().map(|(c, beta)| {
            let b: Vec<BigInt> = beta.iter().map(|&x| BigInt::from(x)).collect();
            let alpha = inv_t.mul_vec(&b).iter().map(|x| x.to_i64().unwrap()).collect();
            (*c, alpha)
        }),
    )
}

/// Checks the Hessian constraints at the forced critical points of an
/// invariant superpotential.
pub fn hessian_theorem_check(w: &LaurentPolynomial, kind: GroupKind) -> Result<CheckReport, FloerError> {
    if w.dim() != 2 {
        return Err(FloerError::NotTwoVariables(w.dim()));
    }
    for g in kind.generators() {
        if !invariance_check(w, &g) {
            return Err(FloerError::NotInvariant(g));
        }
    }
    let mut points = Vec::new();
    for p in kind.points() {
        let constants = clifford_constants(w, &p)?;
        let normalized = normalize(&constants).unwrap_or_default();
        points.push(PointConstants { point: p, constants, normalized });
    }
    let mut report = CheckReport { kind, points, conclusion: None, violation: None };
    match kind {
        GroupKind::Order3 => {
            let eps = report.points[0].normalized.first().map(|l| -l.clone());
            let ok = eps.as_ref().is_some_and(|e| e.abs().is_one())
                && report.points.iter().all(|pc| pc.normalized.iter().all(|x| Some(-x.clone()) == eps));
            if ok {
                let epsilon = eps.unwrap().to_integer().to_i64().unwrap();
                report.conclusion = Some(Conclusion::Cp2Type { epsilon });
            } else {
                report.violation = Some("normalized constants are not (−ε, −ε, −ε) with a common ε = ±1".into());
            }
        }
        GroupKind::Order2 | GroupKind::Order2F => {
            let c0 = &report.points[0].constants;
            let (l, m, n) = match (c0.lambda.as_integer(), c0.mu.as_integer(), c0.nu.as_integer()) {
                (Some(l), Some(m), Some(n)) => (l, m, n),
                _ => {
                    report.violation = Some("constants at the trivial point are not integers".into());
                    return Ok(report);
                }
            };
            if m.is_odd() {
                report.violation = Some(format!("μ = {m} is odd"));
                return Ok(report);
            }
            let form = BinaryForm::new(l.to_i64().unwrap(), (&m / BigInt::from(2)).to_i64().unwrap(), n.to_i64().unwrap());
            let reduced = match reduce_binary_form(form) {
                Ok(r) => r,
                Err(e) => {
                    report.violation = Some(e.to_string());
                    return Ok(report);
                }
            };
            let (conclusion, reference) = if reduced.canonical == BinaryForm::new(0, 1, 0) {
                let r = vec![(1, [1, 0]), (1, [-1, 0]), (1, [0, 1]), (1, [0, -1]), (-1, [1, 1]), (-1, [-1, -1])];
                (Conclusion::Hyperbolic { basis: reduced.transform.clone() }, r)
            } else {
                let (e1, e2) = (-reduced.canonical.lambda, -reduced.canonical.nu);
                let r = vec![(e1, [1, 0]), (e1, [-1, 0]), (e2, [0, 1]), (e2, [0, -1])];
                (Conclusion::Diagonal { eps1: e1, eps2: e2, basis: reduced.transform.clone() }, r)
            };
            let r = in_original_basis(&reference, &reduced.transform);
            for pc in &report.points {
                if gradient_hessian(w, &pc.point).hess != gradient_hessian(&r, &pc.point).hess {
                    report.violation = Some(format!("Hessian differs from the reference at {}", pc.point));
                    return Ok(report);
                }
            }
            if kind == GroupKind::Order2F && matches!(conclusion, Conclusion::Hyperbolic { .. }) {
                report.violation = Some("hyperbolic case with an orientation-reversing symmetry".into());
                return Ok(report);
            }
            report.conclusion = Some(conclusion);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::q;

    fn cint(n: i64) -> CyclotomicNumber {
        CyclotomicNumber::from_integer(n)
    }

    fn cp2() -> LaurentPolynomial {
        LaurentPolynomial::from_terms(2, [(1, vec![1, 0]), (1, vec![0, 1]), (1, vec![-1, -1])])
    }

    fn p1p1() -> LaurentPolynomial {
        LaurentPolynomial::from_terms(2, [(1, vec![1, 0]), (1, vec![-1, 0]), (1, vec![0, 1]), (1, vec![0, -1])])
    }

    #[test]
    fn constants_examples() {
        let c = clifford_constants(&cp2(), &TorsionPoint::zero(2)).unwrap();
        assert_eq!((c.lambda, c.mu, c.nu), (cint(-1), cint(-1), cint(-1)));
        let sym = LaurentPolynomial::from_terms(2, [(1, vec![1, 0]), (1, vec![-1, 0])]);
        let c = clifford_constants(&sym, &TorsionPoint::from_fractions(&[(1, 2), (0, 1)])).unwrap();
        assert_eq!((c.lambda, c.mu, c.nu), (cint(1), cint(0), cint(0)));
        let c = clifford_constants(&LaurentPolynomial::constant(2, 3), &TorsionPoint::from_fractions(&[(1, 5), (0, 1)])).unwrap();
        assert!(c.lambda.is_zero() && c.mu.is_zero() && c.nu.is_zero());
        assert!(matches!(
            clifford_constants(&cp2(), &TorsionPoint::from_fractions(&[(1, 2), (0, 1)])),
            Err(FloerError::NotCritical(_))
        ));
        // a(a − 1) is even, so affine constants are always integral
        let c = clifford_constants(&p1p1(), &TorsionPoint::from_fractions(&[(1, 2), (1, 2)])).unwrap();
        assert!(!c.half_integral);
        assert_eq!((c.lambda, c.nu), (cint(1), cint(1)));
    }

    #[test]
    fn mul_examples() {
        let d = CliffordData::integers(3, 5, 7);
        let u = CliffordElement::integers(0, 1, 0, 0);
        assert_eq!(clifford_mul(&u, &u, &d), CliffordElement::integers(3, 0, 0, 0));
        let (a, b) = (2, -3);
        let x = CliffordElement::integers(0, a, b, 0);
        assert_eq!(clifford_mul(&x, &x, &d), CliffordElement::integers(a * a * 3 + a * b * 5 + b * b * 7, 0, 0, 0));
        let (p, q) = (4, -1);
        let c = CliffordElement::integers(p, 0, 0, q);
        let cbar = CliffordElement::integers(p + q * 5, 0, 0, -q);
        assert_eq!(clifford_mul(&c, &cbar, &d), CliffordElement::integers(p * p + 5 * p * q + 21 * q * q, 0, 0, 0));
    }

    #[test]
    fn continuation_examples() {
        let d = CliffordData::integers(1, 0, 0);
        let shear = |m| mat(1, m, 0, 1);
        let r = continuation_solvable(&d, &shear(1), Parity::Even, 1).unwrap();
        assert_eq!(r.solvable(), Some(false));
        let r = continuation_solvable(&d, &shear(2), Parity::Even, 1).unwrap();
        match r.verdict {
            Verdict::Solvable(c) => assert!(verify_continuation(&d, &shear(2), Parity::Even, &c)),
            other => panic!("{other:?}"),
        }
        let d2 = CliffordData::integers(2, 0, 0);
        let r = continuation_solvable(&d2, &mat(-1, 0, 0, 1), Parity::Odd, 1).unwrap();
        assert_eq!(r.solvable(), Some(false));
        assert!(matches!(
            continuation_solvable(&d, &mat(0, 1, 1, 0), Parity::Even, 1),
            Err(FloerError::UnsupportedAction(_))
        ));
    }

    #[test]
    fn search_matches_closed_form_spot_checks() {
        for (l, m, parity, e1) in [(1, 2, Parity::Even, 1), (1, 1, Parity::Even, 1), (2, 4, Parity::Even, 1), (-1, 2, Parity::Odd, -1), (2, 2, Parity::Odd, -1)] {
            let d = CliffordData::integers(l, 0, 0);
            let a = mat(e1, m, 0, 1);
            let closed = continuation_solvable(&d, &a, parity, 1).unwrap().solvable();
            let search = continuation_search(&d, &a, parity, 3, SearchLimits::default()).unwrap();
            assert_eq!(search.solvable(), closed, "λ={l} m={m} {parity:?}: {search:?}");
        }
    }

    #[test]
    fn order3_conjugation_forces_unit_lambda() {
        // the order-3 generator sends u ↦ −v, v ↦ u − v; not triangular
        let d = CliffordData::integers(-1, -1, -1);
        assert!(continuation_solvable(&d, &mat(0, -1, 1, -1), Parity::Even, 1).is_err());
    }

    #[test]
    fn cyclo_member_examples() {
        assert!(!cyclo_multiple_member(3, 2, 5));
        assert!(cyclo_multiple_member(4, 2, 5));
        assert!(cyclo_multiple_member(0, 7, 9));
    }

    #[test]
    fn qform_examples() {
        let r = reduce_binary_form(BinaryForm::new(0, 1, 0)).unwrap();
        assert_eq!(r.canonical, BinaryForm::new(0, 1, 0));
        assert!(r.transform.is_identity());
        assert_eq!(reduce_binary_form(BinaryForm::new(1, 1, 0)).unwrap().canonical, BinaryForm::new(1, 0, -1));
        assert_eq!(reduce_binary_form(BinaryForm::new(2, 1, 1)).unwrap().canonical, BinaryForm::new(1, 0, 1));
        assert_eq!(reduce_binary_form(BinaryForm::new(-2, 1, -1)).unwrap().canonical, BinaryForm::new(-1, 0, -1));
        assert_eq!(reduce_binary_form(BinaryForm::new(2, 0, 1)), Err(FloerError::BadDiscriminant(-2)));
        assert_eq!(BinaryForm::new(1, 0, -1).to_string(), "diag(1,-1)");
    }

    #[test]
    fn rk1_examples() {
        let w = LaurentPolynomial::from_terms(1, [(5, vec![0]), (2, vec![3])]);
        let r = rk1_classify(&w).unwrap();
        assert_eq!(r.case, Rk1Case::Monomial { a: 5.into(), b: 2.into(), k: 3 });
        assert_eq!(r.group_bound, BOUND_MONOMIAL);

        let w = LaurentPolynomial::from_terms(1, [(7, vec![0]), (1, vec![1]), (1, vec![-1])]);
        let r = rk1_classify(&w).unwrap();
        assert_eq!(r.case, Rk1Case::SymmetricPm { a: 7.into(), sign: 1 });
        assert_eq!(r.admissible_shears, ShearSet::Multiples(2));

        let w = LaurentPolynomial::from_terms(2, [(1, vec![2, 0]), (4, vec![1, 0])]);
        let r = rk1_classify(&w).unwrap();
        assert_eq!(r.case, Rk1Case::Residual);
        assert_eq!(r.admissible_shears, ShearSet::ZeroOnly);

        // W' = 3(x² + 1) = 3Φ₄
        let w = LaurentPolynomial::from_terms(1, [(1, vec![3]), (3, vec![1])]);
        let r = rk1_classify(&w).unwrap();
        assert_eq!(r.factorization, Some((3, 0, vec![4])));
        assert_eq!(r.admissible_shears, ShearSet::Multiples(12));

        assert_eq!(rk1_classify(&LaurentPolynomial::constant(1, 3)), Err(FloerError::Constant));
        let xy = LaurentPolynomial::from_terms(2, [(1, vec![1, 0]), (1, vec![0, 1])]);
        assert_eq!(rk1_classify(&xy), Err(FloerError::NotUnivariate));
    }

    #[test]
    fn hessian_examples() {
        let r = hessian_theorem_check(&cp2(), GroupKind::Order3).unwrap();
        assert!(r.passed(), "{r:#?}");
        assert_eq!(r.conclusion, Some(Conclusion::Cp2Type { epsilon: 1 }));
        for pc in &r.points {
            assert_eq!(pc.normalized, vec![q(-1); 3]);
        }
        let alt = LaurentPolynomial::from_terms(2, [(1, vec![-1, 0]), (1, vec![0, -1]), (1, vec![1, 1])]);
        let r = hessian_theorem_check(&alt, GroupKind::Order3).unwrap();
        assert_eq!(r.conclusion, Some(Conclusion::Cp2Type { epsilon: 1 }));

        let r = hessian_theorem_check(&p1p1(), GroupKind::Order2F).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(matches!(r.conclusion, Some(Conclusion::Diagonal { eps1: 1, eps2: 1, .. })));

        let hyp = LaurentPolynomial::from_terms(
            2,
            [(1, vec![1, 0]), (1, vec![-1, 0]), (1, vec![0, 1]), (1, vec![0, -1]), (-1, vec![1, 1]), (-1, vec![-1, -1])],
        );
        let r = hessian_theorem_check(&hyp, GroupKind::Order2).unwrap();
        assert!(matches!(r.conclusion, Some(Conclusion::Hyperbolic { .. })), "{r:?}");

        assert!(matches!(hessian_theorem_check(&cp2(), GroupKind::Order2), Err(FloerError::NotInvariant(_))));
    }
}
