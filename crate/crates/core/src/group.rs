//! Finite permutation groups and finite matrix groups stored as explicit,
//! sorted element lists.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::intlat::{default_order_cap, matrix_order, IntegerMatrix, MatrixOrder};

/// Closure size cap applied when generating groups from files.
pub const DEFAULT_CLOSURE_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("generator {index} is not unimodular")]
    NotUnimodular { index: usize },
    #[error("generator {index} has infinite order")]
    NotFinite { index: usize },
    #[error("group closure exceeds {cap} elements")]
    TooLarge { cap: usize },
    #[error("generator {index} has the wrong shape (expected {dim}x{dim})")]
    WrongShape { index: usize, dim: usize },
}

/// A permutation of `{0..N-1}` in one-line notation: `i ↦ self[i]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Panics unless `images` is a bijection of `0..len`.
    pub fn new(images: Vec<usize>) -> Self {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            assert!(i < images.len() && !seen[i], "not a permutation: {images:?}");
            seen[i] = true;
        }
        Permutation(images)
    }

    /// Builds from 1-based cycles, e.g. `&[&[1, 3]]` for the transposition (1 3).
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Self {
        let mut p: Vec<usize> = (0..n).collect();
        for c in cycles {
            for k in 0..c.len() {
                p[c[k] - 1] = c[(k + 1) % c.len()] - 1;
            }
        }
        Self::new(p)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Self) -> Self {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    pub fn order(&self) -> u64 {
        let mut acc: u64 = 1;
        for c in self.cycles() {
            acc = num_integer::lcm(acc, c.len() as u64);
        }
        acc
    }

    /// Nontrivial cycles, 0-based, each starting at its least element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for s in 0..self.0.len() {
            if seen[s] || self.0[s] == s {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut j = self.0[s];
            while j != s {
                seen[j] = true;
                c.push(j);
                j = self.0[j];
            }
            out.push(c);
        }
        out
    }
}

impl fmt::Display for Permutation {
    /// 1-based cycle notation; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let s: Vec<String> = c.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "({})", s.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Finite subgroup of `S_N`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct PermutationGroup {
    degree: usize,
    elements: Vec<Permutation>,
}

impl PermutationGroup {
    pub fn trivial(degree: usize) -> Self {
        PermutationGroup { degree, elements: vec![Permutation::identity(degree)] }
    }

    pub fn from_generators(degree: usize, gens: &[Permutation]) -> Self {
        let mut set: BTreeSet<Permutation> = BTreeSet::new();
        let id = Permutation::identity(degree);
        set.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = g.compose(&x);
                if set.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        PermutationGroup { degree, elements: set.into_iter().collect() }
    }

    /// Caller guarantees closure; elements are sorted and deduplicated here.
    pub fn from_elements(degree: usize, mut elements: Vec<Permutation>) -> Self {
        elements.sort();
        elements.dedup();
        debug_assert!(elements.iter().any(Permutation::is_identity));
        PermutationGroup { degree, elements }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Self) -> bool {
        self.elements.iter().all(|p| other.contains(p))
    }

    /// A small generating set, chosen greedily in element order.
    pub fn generators(&self) -> Vec<Permutation> {
        let mut gens: Vec<Permutation> = Vec::new();
        let mut span = Self::trivial(self.degree);
        for p in &self.elements {
            if !span.contains(p) {
                gens.push(p.clone());
                span = Self::from_generators(self.degree, &gens);
                if span.order() == self.order() {
                    break;
                }
            }
        }
        gens
    }
}

/// Finite subgroup of `GL(n, Z)`. The generators used to build it are kept
/// (in input order) because reports quote them first.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixGroup {
    dim: usize,
    generators: Vec<IntegerMatrix>,
    elements: Vec<IntegerMatrix>,
}

impl PartialEq for MatrixGroup {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.elements == other.elements
    }
}

impl Eq for MatrixGroup {}

impl MatrixGroup {
    pub fn trivial(dim: usize) -> Self {
        MatrixGroup { dim, generators: Vec::new(), elements: vec![IntegerMatrix::identity(dim)] }
    }

    /// Closes the generators under multiplication, refusing non-unimodular or
    /// infinite-order generators and groups larger than `cap`.
    pub fn generate(dim: usize, gens: &[IntegerMatrix], cap: usize) -> Result<Self, GroupError> {
        for (index, g) in gens.iter().enumerate() {
            if g.rows() != dim || g.cols() != dim {
                return Err(GroupError::WrongShape { index, dim });
            }
            match matrix_order(g, default_order_cap(dim)) {
                Err(_) => return Err(GroupError::NotUnimodular { index }),
                Ok(MatrixOrder::Infinite) => return Err(GroupError::NotFinite { index }),
                Ok(MatrixOrder::Finite(_)) => {}
            }
        }
        let id = IntegerMatrix::identity(dim);
        let mut set: HashSet<IntegerMatrix> = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = g * &x;
                if !set.contains(&y) {
                    if set.len() >= cap {
                        return Err(GroupError::TooLarge { cap });
                    }
                    set.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        let mut elements: Vec<IntegerMatrix> = set.into_iter().collect();
        elements.sort();
        Ok(MatrixGroup { dim, generators: gens.to_vec(), elements })
    }

    /// For generators known to be of finite order with a small closure.
    pub fn from_generators(dim: usize, gens: &[IntegerMatrix]) -> Self {
        Self::generate(dim, gens, DEFAULT_CLOSURE_CAP).expect("finite generators")
    }

    /// Caller guarantees closure.
    pub fn from_elements(dim: usize, mut elements: Vec<IntegerMatrix>) -> Self {
        elements.sort();
        elements.dedup();
        MatrixGroup { dim, generators: Vec::new(), elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[IntegerMatrix] {
        &self.elements
    }

    /// Generators as supplied, or a greedy generating set when built from elements.
    pub fn generators(&self) -> Vec<IntegerMatrix> {
        if !self.generators.is_empty() || self.elements.len() == 1 {
            return self.generators.clone();
        }
        let mut gens = Vec::new();
        let mut span = Self::trivial(self.dim);
        for g in &self.elements {
            if !span.contains(g) {
                gens.push(g.clone());
                span = Self::from_generators(self.dim, &gens);
                if span.order() == self.order() {
                    break;
                }
            }
        }
        gens
    }

    pub fn contains(&self, g: &IntegerMatrix) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    /// `u·G·u⁻¹`.
    pub fn conjugate(&self, u: &IntegerMatrix) -> Self {
        let inv = u.unimodular_inverse().expect("conjugator must be unimodular");
        let conj = |g: &IntegerMatrix| &(u * g) * &inv;
        let mut out = Self::from_elements(self.dim, self.elements.iter().map(conj).collect());
        out.generators = self.generators.iter().map(conj).collect();
        out
    }

    /// Elements with determinant +1.
    pub fn orientation_preserving(&self) -> Self {
        let one = num_bigint::BigInt::from(1);
        Self::from_elements(self.dim, self.elements.iter().filter(|g| g.determinant() == one).cloned().collect())
    }

    pub fn is_cyclic(&self) -> bool {
        let n = self.order() as u64;
        self.elements
            .iter()
            .any(|g| matrix_order(g, n).ok().and_then(MatrixOrder::finite) == Some(n))
    }
}

impl fmt::Display for MatrixGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators().iter().map(ToString::to_string).collect();
        write!(f, "<{}> (order {})", gens.join(", "), self.order())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_basics() {
        let t = Permutation::from_cycles(4, &[&[1, 3]]);
        assert_eq!(t.to_string(), "(1 3)");
        assert_eq!(t.order(), 2);
        let c = Permutation::from_cycles(3, &[&[1, 2, 3]]);
        assert_eq!(c.compose(&c).to_string(), "(1 3 2)");
        assert!(c.compose(&c.inverse()).is_identity());
        assert_eq!(PermutationGroup::from_generators(3, &[c, Permutation::from_cycles(3, &[&[1, 2]])]).order(), 6);
    }

    #[test]
    fn matrix_closure() {
        let r6 = IntegerMatrix::from_rows(&[[1, -1], [1, 0]]);
        let gt = IntegerMatrix::from_rows(&[[0, 1], [1, 0]]);
        let g = MatrixGroup::from_generators(2, &[r6, gt]);
        assert_eq!(g.order(), 12);
        assert!(!g.is_cyclic());
        assert_eq!(g.orientation_preserving().order(), 6);
        assert!(g.orientation_preserving().is_cyclic());
        let bad = IntegerMatrix::from_rows(&[[2, 0], [0, 1]]);
        assert_eq!(MatrixGroup::generate(2, &[bad], 100), Err(GroupError::NotUnimodular { index: 0 }));
        let shear = IntegerMatrix::from_rows(&[[1, 1], [0, 1]]);
        assert_eq!(MatrixGroup::generate(2, &[shear], 100), Err(GroupError::NotFinite { index: 0 }));
    }

    #[test]
    fn greedy_generators_regenerate() {
        let g = MatrixGroup::from_generators(2, &[IntegerMatrix::from_rows(&[[0, -1], [1, 0]]), IntegerMatrix::diagonal(&[1, -1])]);
        let h = MatrixGroup::from_elements(2, g.elements().to_vec());
        assert_eq!(MatrixGroup::from_generators(2, &h.generators()), g);
    }
}
