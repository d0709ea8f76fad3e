//! Delzant polytopes `{x : ⟨x, ν_j⟩ ≥ −λ_j}`: validation, monotone
//! centring and the data of the toric fibre over the centre.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::intlat::{kernel_lattice, IntegerMatrix, LatticeBasis};
use crate::laurent::LaurentPolynomial;
use crate::qlinalg::{self, q, Solution, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CompactnessMode {
    Compact,
    VertexRequired,
}

impl fmt::Display for CompactnessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompactnessMode::Compact => "compact",
            CompactnessMode::VertexRequired => "vertex",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToricError {
    #[error("normal {index} has length {got}, expected {dim}")]
    WrongLength { index: usize, got: usize, dim: usize },
    #[error("normal {index} is not primitive")]
    NotPrimitive { index: usize },
    #[error("normals {0} and {1} coincide")]
    DuplicateNormal(usize, usize),
    #[error("{facets} facets cannot bound a polytope of dimension {dim}")]
    TooFewFacets { facets: usize, dim: usize },
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("polytope fails validation: {0}")]
    Invalid(Failure),
    #[error("no point has equal offsets to every facet")]
    NotMonotone,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DelzantPolytope {
    dim: usize,
    normals: Vec<Vec<i64>>,
    #[serde(serialize_with = "crate::ser::display_vec")]
    offsets: Vec<Q>,
    mode: CompactnessMode,
}

impl DelzantPolytope {
    pub fn new(dim: usize, facets: Vec<(Vec<i64>, Q)>, mode: CompactnessMode) -> Result<Self, ToricError> {
        if dim == 0 {
            return Err(ToricError::ZeroDimension);
        }
        if facets.len() < dim {
            return Err(ToricError::TooFewFacets { facets: facets.len(), dim });
        }
        for (index, (nu, _)) in facets.iter().enumerate() {
            if nu.len() != dim {
                return Err(ToricError::WrongLength { index, got: nu.len(), dim });
            }
            if nu.iter().fold(0i64, |g, &x| g.gcd(&x)) != 1 {
                return Err(ToricError::NotPrimitive { index });
            }
        }
        for (i, j) in (0..facets.len()).tuple_combinations() {
            if facets[i].0 == facets[j].0 {
                return Err(ToricError::DuplicateNormal(i, j));
            }
        }
        let (normals, offsets) = facets.into_iter().unzip();
        Ok(DelzantPolytope { dim, normals, offsets, mode })
    }

    /// Every facet at the same offset `λ`.
    pub fn with_common_offset(dim: usize, normals: &[&[i64]], lambda: i64, mode: CompactnessMode) -> Result<Self, ToricError> {
        Self::new(dim, normals.iter().map(|v| (v.to_vec(), q(lambda))).collect(), mode)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facet_count(&self) -> usize {
        self.normals.len()
    }

    pub fn normals(&self) -> &[Vec<i64>] {
        &self.normals
    }

    pub fn offsets(&self) -> &[Q] {
        &self.offsets
    }

    pub fn mode(&self) -> CompactnessMode {
        self.mode
    }

    /// `N×n` matrix with the normals as rows.
    pub fn normal_matrix(&self) -> IntegerMatrix {
        IntegerMatrix::from_rows(&self.normals)
    }

    fn pairing(&self, x: &[Q], j: usize) -> Q {
        x.iter().zip(&self.normals[j]).map(|(a, &b)| a * q(b)).sum()
    }

    /// Facets whose hyperplane contains `x`.
    fn active(&self, x: &[Q]) -> Vec<usize> {
        (0..self.facet_count()).filter(|&j| self.pairing(x, j) == -self.offsets[j].clone()).collect()
    }

    fn feasible(&self, x: &[Q]) -> bool {
        (0..self.facet_count()).all(|j| self.pairing(x, j) >= -self.offsets[j].clone())
    }

    /// All vertices, in lexicographic order.
    pub fn vertices(&self) -> Vec<Vec<Q>> {
        let mut out = BTreeSet::new();
        for subset in (0..self.facet_count()).combinations(self.dim) {
            let a: Vec<Vec<Q>> = subset.iter().map(|&j| self.normals[j].iter().map(|&x| q(x)).collect()).collect();
            let b: Vec<Q> = subset.iter().map(|&j| -self.offsets[j].clone()).collect();
            if let Solution::Unique(x) = qlinalg::solve(&a, &b) {
                if self.feasible(&x) {
                    out.insert(x);
                }
            }
        }
        out.into_iter().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Failure {
    NoVertex,
    NotSimple {
        #[serde(serialize_with = "crate::ser::display_vec")]
        vertex: Vec<Q>,
        active: Vec<usize>,
    },
    NotSmooth {
        #[serde(serialize_with = "crate::ser::display_vec")]
        vertex: Vec<Q>,
        active: Vec<usize>,
        #[serde(serialize_with = "crate::ser::display")]
        det: BigInt,
    },
    Redundant { facet: usize },
    /// An edge from `vertex` in direction `direction` never leaves the polytope.
    Unbounded {
        #[serde(serialize_with = "crate::ser::display_vec")]
        vertex: Vec<Q>,
        #[serde(serialize_with = "crate::ser::display_vec")]
        direction: Vec<Q>,
    },
}

fn fmt_point(x: &[Q]) -> String {
    format!("({})", x.iter().map(ToString::to_string).join(", "))
}

fn fmt_facets(a: &[usize]) -> String {
    format!("{{{}}}", a.iter().map(|j| j + 1).join(", "))
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::NoVertex => write!(f, "no vertex"),
            Failure::NotSimple { vertex, active } => {
                write!(f, "vertex {} lies on {} facets {}", fmt_point(vertex), active.len(), fmt_facets(active))
            }
            Failure::NotSmooth { vertex, active, det } => {
                write!(f, "vertex {} is not smooth: normals {} have determinant {det}", fmt_point(vertex), fmt_facets(active))
            }
            Failure::Redundant { facet } => write!(f, "facet {} is redundant", facet + 1),
            Failure::Unbounded { vertex, direction } => {
                write!(f, "unbounded edge from {} along {}", fmt_point(vertex), fmt_point(direction))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Warning {
    /// Non-compact input: the topology of the total space is not checked.
    UncheckedTopology,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    #[serde(serialize_with = "crate::ser::display_vec2")]
    pub vertices: Vec<Vec<Q>>,
    pub failure: Option<Failure>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks simplicity and smoothness at every vertex, irredundancy of every
/// inequality and, in compact mode, boundedness. Reports the first failure.
pub fn validate_delzant(p: &DelzantPolytope) -> ValidationReport {
    let vertices = p.vertices();
    let warnings = match p.mode {
        CompactnessMode::VertexRequired => vec![Warning::UncheckedTopology],
        CompactnessMode::Compact => Vec::new(),
    };
    let report = |failure| ValidationReport { vertices: vertices.clone(), failure, warnings: warnings.clone() };
    if vertices.is_empty() {
        return report(Some(Failure::NoVertex));
    }
    let mut actives = Vec::with_capacity(vertices.len());
    for x in &vertices {
        let active = p.active(x);
        if active.len() != p.dim {
            return report(Some(Failure::NotSimple { vertex: x.clone(), active }));
        }
        let det = IntegerMatrix::from_rows(&active.iter().map(|&j| p.normals[j].clone()).collect::<Vec<_>>()).determinant();
        if !det.abs().is_one() {
            return report(Some(Failure::NotSmooth { vertex: x.clone(), active, det }));
        }
        actives.push(active);
    }
    let touched: BTreeSet<usize> = actives.iter().flatten().copied().collect();
    if let Some(facet) = (0..p.facet_count()).find(|j| !touched.contains(j)) {
        return report(Some(Failure::Redundant { facet }));
    }
    if p.mode == CompactnessMode::Compact {
        for (x, active) in vertices.iter().zip(&actives) {
            let rows: Vec<Vec<Q>> = active.iter().map(|&j| p.normals[j].iter().map(|&v| q(v)).collect()).collect();
            let inv = qlinalg::inverse(&rows).expect("smooth vertex has invertible normals");
            // Edge directions are the columns of the inverse: ⟨r_k, ν_{a_l}⟩ = δ_kl.
            for k in 0..p.dim {
                let r: Vec<Q> = (0..p.dim).map(|i| inv[i][k].clone()).collect();
                let blocked = (0..p.facet_count()).any(|j| p.pairing(&r, j).is_negative());
                if !blocked {
                    return report(Some(Failure::Unbounded { vertex: x.clone(), direction: r }));
                }
            }
        }
    }
    report(None)
}

/// Translates the polytope so that every offset equals a common `c > 0`.
///
/// When the normals do not determine the centre uniquely (fewer than
/// `n + 1` independent conditions, as for an orthant) the common offset is
/// fixed to 1.
pub fn monotone_normalize(p: &DelzantPolytope) -> Result<DelzantPolytope, ToricError> {
    let n = p.dim;
    // unknowns (q_1..q_n, c): ⟨q, ν_j⟩ − c = −λ_j
    let a: Vec<Vec<Q>> = p
        .normals
        .iter()
        .map(|nu| nu.iter().map(|&x| q(x)).chain([q(-1)]).collect())
        .collect();
    let b: Vec<Q> = p.offsets.iter().map(|l| -l.clone()).collect();
    let c = match qlinalg::solve(&a, &b) {
        Solution::Inconsistent => return Err(ToricError::NotMonotone),
        Solution::Unique(x) => x[n].clone(),
        Solution::Underdetermined(_) => {
            let mut a1 = a.clone();
            let mut b1 = b.clone();
            a1.push((0..=n).map(|i| if i == n { Q::one() } else { Q::zero() }).collect());
            b1.push(Q::one());
            match qlinalg::solve(&a1, &b1) {
                Solution::Inconsistent => return Err(ToricError::NotMonotone),
                Solution::Unique(x) | Solution::Underdetermined(x) => x[n].clone(),
            }
        }
    };
    if !c.is_positive() {
        return Err(ToricError::NotMonotone);
    }
    Ok(DelzantPolytope { offsets: vec![c; p.facet_count()], ..p.clone() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToricFiberData {
    pub polytope: DelzantPolytope,
    pub relations: LatticeBasis,
    pub superpotential: LaurentPolynomial,
}

/// Validates, centres and returns the relation lattice and `W = Σ z^{ν_j}`.
pub fn toric_fiber_data(p: &DelzantPolytope) -> Result<ToricFiberData, ToricError> {
    let report = validate_delzant(p);
    if let Some(f) = report.failure {
        return Err(ToricError::Invalid(f));
    }
    let polytope = monotone_normalize(p)?;
    let relations = kernel_lattice(&polytope.normal_matrix());
    let superpotential = LaurentPolynomial::from_terms(p.dim, p.normals.iter().map(|nu| (1, nu.clone())));
    Ok(ToricFiberData { polytope, relations, superpotential })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::rational_from_ratio;

    fn poly(normals: &[&[i64]], offsets: &[i64]) -> DelzantPolytope {
        DelzantPolytope::new(
            normals[0].len(),
            normals.iter().zip(offsets).map(|(n, &l)| (n.to_vec(), q(l))).collect(),
            CompactnessMode::Compact,
        )
        .unwrap()
    }

    #[test]
    fn validation_examples() {
        let cp2 = poly(&[&[1, 0], &[0, 1], &[-1, -1]], &[1, 1, 1]);
        let r = validate_delzant(&cp2);
        assert!(r.passed());
        assert_eq!(r.vertices.len(), 3);
        let square = poly(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]], &[1, 1, 1, 1]);
        assert!(validate_delzant(&square).passed());
        let bad = poly(&[&[1, 0], &[0, 1], &[-1, -2]], &[1, 1, 1]);
        match validate_delzant(&bad).failure {
            Some(Failure::NotSmooth { det, .. }) => assert_eq!(det.abs(), BigInt::from(2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validation_failures() {
        // half-plane pair in compact mode: the quadrant is unbounded
        let quad = poly(&[&[1, 0], &[0, 1]], &[1, 1]);
        assert!(matches!(validate_delzant(&quad).failure, Some(Failure::Unbounded { .. })));
        // x ≥ -1, y ≥ -1, x + y ≤ 1, x ≤ 5 (redundant)
        let red = poly(&[&[1, 0], &[0, 1], &[-1, -1], &[-1, 0]], &[1, 1, 1, 5]);
        assert_eq!(validate_delzant(&red).failure, Some(Failure::Redundant { facet: 3 }));
        // square with a cut through a vertex: three facets meet there
        let cut = poly(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1], &[1, 1]], &[1, 1, 1, 1, 2]);
        assert!(matches!(validate_delzant(&cut).failure, Some(Failure::NotSimple { .. })));
        let empty = poly(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]], &[-1, -1, 1, 1]);
        assert_eq!(validate_delzant(&empty).failure, Some(Failure::NoVertex));
    }

    #[test]
    fn constructor_invariants() {
        let e = DelzantPolytope::new(2, vec![(vec![2, 0], q(1)), (vec![0, 1], q(1))], CompactnessMode::Compact);
        assert_eq!(e, Err(ToricError::NotPrimitive { index: 0 }));
        let e = DelzantPolytope::new(2, vec![(vec![1, 0], q(1)), (vec![1, 0], q(2))], CompactnessMode::Compact);
        assert_eq!(e, Err(ToricError::DuplicateNormal(0, 1)));
        let e = DelzantPolytope::new(2, vec![(vec![1, 0], q(1))], CompactnessMode::Compact);
        assert!(matches!(e, Err(ToricError::TooFewFacets { .. })));
    }

    #[test]
    fn normalize_examples() {
        let cp2 = poly(&[&[1, 0], &[0, 1], &[-1, -1]], &[1, 1, 1]);
        assert_eq!(monotone_normalize(&cp2).unwrap(), cp2);
        let shifted = poly(&[&[1, 0], &[0, 1], &[-1, -1]], &[2, 2, 0]);
        let m = monotone_normalize(&shifted).unwrap();
        assert_eq!(m.offsets(), &vec![rational_from_ratio(4, 3); 3][..]);
        let rect = poly(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]], &[1, 1, 2, 2]);
        assert_eq!(monotone_normalize(&rect), Err(ToricError::NotMonotone));
    }

    #[test]
    fn fiber_data_examples() {
        let cp2 = poly(&[&[1, 0], &[0, 1], &[-1, -1]], &[1, 1, 1]);
        let d = toric_fiber_data(&cp2).unwrap();
        assert_eq!(d.superpotential.to_string(), "x^-1*y^-1 + y + x");
        assert_eq!(d.relations.vectors(), vec![vec![BigInt::from(1); 3]]);

        let bl1 = poly(&[&[0, 1], &[-1, -1], &[1, 0], &[1, 1]], &[1, 1, 1, 1]);
        let d = toric_fiber_data(&bl1).unwrap();
        let expected = LatticeBasis::from_generators(
            4,
            &[[1, 1, 1, 0], [0, 1, 0, 1]].iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect::<Vec<_>>(),
        );
        assert_eq!(d.relations, expected);
        assert_eq!(d.superpotential.terms().len(), 4);
    }
}
