//! Monomial automorphisms of the torus of local systems and their torsion
//! fixed points.
//!
//! A local system with root-of-unity holonomies is stored additively as a
//! point of `(Q/Z)^n`: the coordinate `v` stands for `e^{2πiv}`. A matrix `g`
//! acts by `v ↦ gᵀ·v`, so `[[0,-1],[1,-1]]` sends `(x, y)` to `(y, x⁻¹y⁻¹)`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::cyclotomic::rational_from_ratio;
use crate::group::MatrixGroup;
use crate::intlat::{smith_normal_form, IntegerMatrix, SmithForm};
use crate::qlinalg::{qz, Q};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionPoint {
    coords: Vec<Q>,
}

fn frac(x: &Q) -> Q {
    x - x.floor()
}

impl TorsionPoint {
    /// Reduces every coordinate into `[0, 1)`.
    pub fn new(coords: Vec<Q>) -> Self {
        TorsionPoint { coords: coords.iter().map(frac).collect() }
    }

    pub fn zero(n: usize) -> Self {
        TorsionPoint { coords: vec![Q::zero(); n] }
    }

    /// `(numerator, denominator)` pairs.
    pub fn from_fractions(c: &[(i64, i64)]) -> Self {
        Self::new(c.iter().map(|&(p, q)| rational_from_ratio(p, q)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    /// Least `d` with `d·v ∈ Z^n`; the order of the point in the torus.
    pub fn common_denominator(&self) -> u32 {
        self.coords
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
            .to_u32()
            .expect("torsion order overflows u32")
    }

    /// Image `gᵀ·v mod 1`.
    pub fn transform(&self, g: &IntegerMatrix) -> Self {
        let n = self.dim();
        assert_eq!((g.rows(), g.cols()), (n, n));
        let coords = (0..n)
            .map(|i| (0..n).map(|j| qz(&g[(j, i)]) * &self.coords[j]).sum())
            .collect();
        Self::new(coords)
    }
}

impl fmt::Display for TorsionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl fmt::Debug for TorsionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for TorsionPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FixedPointSet {
    Finite(Vec<TorsionPoint>),
    /// Positive-dimensional solution set: a subtorus spanned by the integer
    /// `directions`, translated by each coset representative.
    Infinite { directions: Vec<Vec<i64>>, cosets: Vec<TorsionPoint> },
}

impl FixedPointSet {
    pub fn points(&self) -> Option<&[TorsionPoint]> {
        match self {
            FixedPointSet::Finite(p) => Some(p),
            FixedPointSet::Infinite { .. } => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, FixedPointSet::Finite(_))
    }
}

impl fmt::Display for FixedPointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixedPointSet::Finite(pts) => {
                let s: Vec<String> = pts.iter().map(ToString::to_string).collect();
                write!(f, "{{{}}}", s.join(", "))
            }
            FixedPointSet::Infinite { directions, cosets } => {
                write!(f, "INFINITE (dimension {}, {} components)", directions.len(), cosets.len())
            }
        }
    }
}

/// Common fixed points of `v ↦ g_jᵀ·v` on `(Q/Z)^n` for all `g_j` in `gs`.
pub fn monomial_fixed_points(dim: usize, gs: &[IntegerMatrix]) -> FixedPointSet {
    if gs.is_empty() {
        let directions = (0..dim).map(|i| (0..dim).map(|j| i64::from(i == j)).collect()).collect();
        return FixedPointSet::Infinite { directions, cosets: vec![TorsionPoint::zero(dim)] };
    }
    let id = IntegerMatrix::identity(dim);
    let mut stack = gs[0].transpose().sub(&id);
    for g in &gs[1..] {
        stack = stack.vstack(&g.transpose().sub(&id));
    }
    // d = u·A·v, and A·x ∈ Z^m iff d·(v⁻¹x) ∈ Z^m.
    let SmithForm { d, v, .. } = smith_normal_form(&stack);
    let diag: Vec<BigInt> = (0..dim).map(|i| if i < d.rows() { d[(i, i)].clone() } else { BigInt::zero() }).collect();
    let finite_axes: Vec<usize> = (0..dim).filter(|&i| !diag[i].is_zero()).collect();

    let mut points = BTreeSet::new();
    let mut k = vec![BigInt::zero(); dim];
    loop {
        let w: Vec<Q> = (0..dim)
            .map(|i| if diag[i].is_zero() { Q::zero() } else { Q::new(k[i].clone(), diag[i].clone()) })
            .collect();
        let x: Vec<Q> = (0..dim).map(|r| (0..dim).map(|c| qz(&v[(r, c)]) * &w[c]).sum()).collect();
        points.insert(TorsionPoint::new(x));
        let mut advanced = false;
        for &i in &finite_axes {
            k[i] += 1;
            if k[i] < diag[i] {
                advanced = true;
                break;
            }
            k[i] = BigInt::zero();
        }
        if !advanced {
            break;
        }
    }
    let points: Vec<TorsionPoint> = points.into_iter().collect();
    if finite_axes.len() == dim {
        FixedPointSet::Finite(points)
    } else {
        let directions = (0..dim).filter(|&i| diag[i].is_zero()).map(|i| v.column(i).iter().map(|x| x.to_i64().expect("direction overflow")).collect())
            .collect();
        FixedPointSet::Infinite { directions, cosets: points }
    }
}

/// One representative per cyclic subgroup, identity excluded.
fn cyclic_representatives(g: &MatrixGroup) -> Vec<IntegerMatrix> {
    let mut covered: BTreeSet<IntegerMatrix> = BTreeSet::new();
    let mut reps = Vec::new();
    for h in g.elements() {
        if h.is_identity() || covered.contains(h) {
            continue;
        }
        // mark all generators of ⟨h⟩
        let mut powers = vec![IntegerMatrix::identity(g.dim())];
        let mut p = h.clone();
        while !p.is_identity() {
            powers.push(p.clone());
            p = &p * h;
        }
        let ord = powers.len();
        for (e, pw) in powers.into_iter().enumerate() {
            if e.gcd(&ord) == 1 {
                covered.insert(pw);
            }
        }
        reps.push(h.clone());
    }
    reps
}

/// Union of the common fixed points of every subset `S ⊆ G` whose elements
/// have no common nonzero 1-eigenvector. The result is always finite.
pub fn forced_critical_points(g: &MatrixGroup) -> Vec<TorsionPoint> {
    let n = g.dim();
    let reps = cyclic_representatives(g);
    let id = IntegerMatrix::identity(n);
    let diffs: Vec<IntegerMatrix> = reps.iter().map(|h| h.sub(&id)).collect();
    let mut out = BTreeSet::new();

    // Grow subsets in index order, keeping only elements that cut the
    // common fixed space down. Supersets only shrink Fix(S), so minimal
    // chains cover the whole union.
    fn dfs(
        start: usize,
        chosen: &mut Vec<usize>,
        stack: Option<IntegerMatrix>,
        rank: usize,
        n: usize,
        reps: &[IntegerMatrix],
        diffs: &[IntegerMatrix],
        out: &mut BTreeSet<TorsionPoint>,
    ) {
        if rank == n {
            let gs: Vec<IntegerMatrix> = chosen.iter().map(|&i| reps[i].clone()).collect();
            if let FixedPointSet::Finite(pts) = monomial_fixed_points(n, &gs) {
                out.extend(pts);
            }
            return;
        }
        for i in start..reps.len() {
            let next = match &stack {
                None => diffs[i].clone(),
                Some(s) => s.vstack(&diffs[i]),
            };
            let r = next.rank();
            if r > rank {
                chosen.push(i);
                dfs(i + 1, chosen, Some(next), r, n, reps, diffs, out);
                chosen.pop();
            }
        }
    }
    if n == 0 {
        return Vec::new();
    }
    dfs(0, &mut Vec::new(), None, 0, n, &reps, &diffs, &mut out);
    out.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub element: IntegerMatrix,
    pub point: TorsionPoint,
    pub image: TorsionPoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub witness: Option<Witness>,
    pub forced: Vec<TorsionPoint>,
}

/// Every element must fix every forced critical point. Generators are
/// tried first so witnesses name a generator when possible.
pub fn admissible_group(g: &MatrixGroup) -> Admissibility {
    let forced = forced_critical_points(g);
    let candidates = g.generators().into_iter().chain(g.elements().iter().cloned());
    for h in candidates {
        for p in &forced {
            let image = p.transform(&h);
            if &image != p {
                let witness = Witness { element: h, point: p.clone(), image };
                return Admissibility { admissible: false, witness: Some(witness), forced };
            }
        }
    }
    Admissibility { admissible: true, witness: None, forced }
}
