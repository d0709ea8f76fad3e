//! Monodromy groups of toric fibres. Permutations of the facet normals
//! that fix the relation lattice `K` pointwise give the Hamiltonian group,
//! those fixing it setwise give the symplectic group.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;
use thiserror::Error;

use crate::group::{MatrixGroup, Permutation, PermutationGroup};
use crate::intlat::{lattice_equal, IntegerMatrix, LatticeBasis};
use crate::qlinalg::{self, q, Q};
use crate::toric::ToricFiberData;

/// Default largest number of facets accepted by [`symplectic_monodromy`].
pub const DEFAULT_SEARCH_BOUND: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonodromyError {
    #[error("{facets} facets exceed the search bound {bound}")]
    SearchTooLarge { facets: usize, bound: usize },
    #[error("permutation {0} is not induced by a lattice automorphism")]
    InconsistentPermutation(Permutation),
}

/// Blocks of facet indices (0-based), each sorted, ordered by least element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalPartition {
    pub blocks: Vec<Vec<usize>>,
}

impl NormalPartition {
    pub fn singletons(n: usize) -> Self {
        NormalPartition { blocks: (0..n).map(|i| vec![i]).collect() }
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.blocks.iter().position(|b| b.contains(&i)).expect("index covered by partition")
    }
}

impl fmt::Display for NormalPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.blocks.iter().map(|b| format!("{{{}}}", b.iter().map(|i| i + 1).join(","))).join(" ");
        f.write_str(&s)
    }
}

/// `i ∼ j` iff columns `i` and `j` of the canonical basis of `K` agree.
pub fn coefficient_partition(k: &LatticeBasis) -> NormalPartition {
    let b = k.basis();
    let cols: Vec<Vec<BigInt>> = (0..k.ambient_rank()).map(|j| b.column(j)).collect();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for j in 0..cols.len() {
        match blocks.iter_mut().find(|blk| cols[blk[0]] == cols[j]) {
            Some(blk) => blk.push(j),
            None => blocks.push(vec![j]),
        }
    }
    NormalPartition { blocks }
}

/// Product of the symmetric groups on the blocks of the coefficient partition.
pub fn hamiltonian_monodromy(d: &ToricFiberData) -> PermutationGroup {
    let n = d.polytope.facet_count();
    let part = coefficient_partition(&d.relations);
    let mut gens = Vec::new();
    for b in &part.blocks {
        for w in b.windows(2) {
            gens.push(Permutation::from_cycles(n, &[&[w[0] + 1, w[1] + 1]]));
        }
    }
    PermutationGroup::from_generators(n, &gens)
}

/// `n` facets whose normals form a basis of `Z^n`; falls back to any
/// rational basis.
fn normal_basis(normals: &[Vec<i64>], n: usize) -> Vec<usize> {
    let mut fallback = None;
    for subset in (0..normals.len()).combinations(n) {
        let m = IntegerMatrix::from_rows(&subset.iter().map(|&j| normals[j].clone()).collect::<Vec<_>>());
        let det = m.determinant();
        if det.abs() == BigInt::from(1) {
            return subset;
        }
        if fallback.is_none() && det != BigInt::from(0) {
            fallback = Some(subset);
        }
    }
    fallback.expect("normals span Q^n")
}

/// Linear map sending `ν_{basis[i]}` to `ν_{images[i]}`, if integral.
/// Returned as the rows of `M` acting on column vectors.
fn linear_extension(normals: &[Vec<i64>], basis: &[usize], images: &[usize]) -> Option<Vec<Vec<Q>>> {
    let n = basis.len();
    // M·B = T with B, T having the vectors as columns; solve Bᵀ·Mᵀ = Tᵀ.
    let bt: Vec<Vec<Q>> = basis.iter().map(|&j| normals[j].iter().map(|&x| q(x)).collect()).collect();
    let inv = qlinalg::inverse(&bt)?;
    let tt: Vec<Vec<Q>> = images.iter().map(|&j| normals[j].iter().map(|&x| q(x)).collect()).collect();
    // Mᵀ = inv · Tᵀ
    let mt: Vec<Vec<Q>> = (0..n).map(|r| (0..n).map(|c| (0..n).map(|k| &inv[r][k] * &tt[k][c]).sum()).collect()).collect();
    let m: Vec<Vec<Q>> = (0..n).map(|r| (0..n).map(|c| mt[c][r].clone()).collect()).collect();
    if m.iter().flatten().all(|x| x.is_integer()) {
        Some(m)
    } else {
        None
    }
}

fn apply(m: &[Vec<Q>], v: &[i64]) -> Vec<i64> {
    m.iter()
        .map(|row| {
            let s: Q = row.iter().zip(v).map(|(a, &b)| a * q(b)).sum();
            i64::try_from(s.to_integer()).expect("small image")
        })
        .collect()
}

/// Permutation of the normals induced by `m`, if `m` permutes them.
fn induced_permutation(normals: &[Vec<i64>], m: &[Vec<Q>]) -> Option<Permutation> {
    let images: Option<Vec<usize>> = normals.iter().map(|v| normals.iter().position(|w| *w == apply(m, v))).collect();
    let images = images?;
    let distinct: BTreeSet<usize> = images.iter().copied().collect();
    (distinct.len() == images.len()).then(|| Permutation::new(images))
}

/// Permutations `σ` with `σ(K) = K`.
///
/// Such a `σ` is induced by a lattice automorphism `M` with `M·ν_j = ν_σ(j)`,
/// so the search runs over images of a basis of normals only, pruned by
/// block sizes of the coefficient partition, and confirms each hit by
/// comparing `σ(K)` with `K`.
pub fn symplectic_monodromy(d: &ToricFiberData, bound: usize) -> Result<PermutationGroup, MonodromyError> {
    let normals = d.polytope.normals();
    let big_n = normals.len();
    if big_n > bound {
        return Err(MonodromyError::SearchTooLarge { facets: big_n, bound });
    }
    let n = d.polytope.dim();
    let part = coefficient_partition(&d.relations);
    let size_of = |i: usize| part.blocks[part.block_of(i)].len();
    let basis = normal_basis(normals, n);

    let mut found = BTreeSet::new();
    let mut images = Vec::with_capacity(n);
    let mut used = vec![false; big_n];
    search(normals, &basis, &size_of, &d.relations, &mut images, &mut used, &mut found);
    Ok(PermutationGroup::from_elements(big_n, found.into_iter().collect()))
}

fn search(
    normals: &[Vec<i64>],
    basis: &[usize],
    size_of: &dyn Fn(usize) -> usize,
    k: &LatticeBasis,
    images: &mut Vec<usize>,
    used: &mut [bool],
    found: &mut BTreeSet<Permutation>,
) {
    let depth = images.len();
    if depth == basis.len() {
        let Some(m) = linear_extension(normals, basis, images) else { return };
        let Some(sigma) = induced_permutation(normals, &m) else { return };
        if lattice_equal(&k.permuted(sigma.images()), k) {
            found.insert(sigma);
        }
        return;
    }
    let want = size_of(basis[depth]);
    for j in 0..normals.len() {
        if used[j] || size_of(j) != want {
            continue;
        }
        used[j] = true;
        images.push(j);
        search(normals, basis, size_of, k, images, used, found);
        images.pop();
        used[j] = false;
    }
}

/// For each `σ ∈ g` the matrix `M ∈ GL(n, Z)` with `M·ν_j = ν_σ(j)`.
pub fn induced_matrix_group(d: &ToricFiberData, g: &PermutationGroup) -> Result<MatrixGroup, MonodromyError> {
    let normals = d.polytope.normals();
    let n = d.polytope.dim();
    let basis = normal_basis(normals, n);
    let to_matrix = |sigma: &Permutation| -> Result<IntegerMatrix, MonodromyError> {
        let images: Vec<usize> = basis.iter().map(|&b| sigma.apply(b)).collect();
        let err = || MonodromyError::InconsistentPermutation(sigma.clone());
        let m = linear_extension(normals, &basis, &images).ok_or_else(err)?;
        if induced_permutation(normals, &m).as_ref() != Some(sigma) {
            return Err(err());
        }
        let rows: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect();
        Ok(IntegerMatrix::from_big_rows(rows, n))
    };
    let elements = g.elements().iter().map(to_matrix).collect::<Result<Vec<_>, _>>()?;
    let gens = g.generators().iter().map(to_matrix).collect::<Result<Vec<_>, _>>()?;
    let group = MatrixGroup::from_elements(n, elements);
    Ok(if gens.is_empty() { group } else { MatrixGroup::from_generators(n, &gens) })
}

/// `Σ (|block| − 1) ≤ n`.
pub fn partition_bound_check(p: &NormalPartition, n: usize) -> bool {
    p.blocks.iter().map(|b| b.len() - 1).sum::<usize>() <= n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::{toric_fiber_data, CompactnessMode, DelzantPolytope};

    fn data(normals: &[&[i64]], mode: CompactnessMode) -> ToricFiberData {
        toric_fiber_data(&DelzantPolytope::with_common_offset(normals[0].len(), normals, 1, mode).unwrap()).unwrap()
    }

    fn bl1() -> ToricFiberData {
        data(&[&[0, 1], &[-1, -1], &[1, 0], &[1, 1]], CompactnessMode::Compact)
    }

    #[test]
    fn partition_examples() {
        assert_eq!(coefficient_partition(&bl1().relations).blocks, vec![vec![0, 2], vec![1], vec![3]]);
        let cp2 = data(&[&[1, 0], &[0, 1], &[-1, -1]], CompactnessMode::Compact);
        assert_eq!(coefficient_partition(&cp2.relations).blocks, vec![vec![0, 1, 2]]);
        let c3 = data(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], CompactnessMode::VertexRequired);
        assert_eq!(coefficient_partition(&c3.relations).blocks, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn blowup_groups() {
        let d = bl1();
        let h = hamiltonian_monodromy(&d);
        assert_eq!(h.order(), 2);
        assert!(h.contains(&Permutation::from_cycles(4, &[&[1, 3]])));
        let s = symplectic_monodromy(&d, DEFAULT_SEARCH_BOUND).unwrap();
        assert_eq!(s, h);
        let m = induced_matrix_group(&d, &h).unwrap();
        assert!(m.contains(&IntegerMatrix::from_rows(&[[0, 1], [1, 0]])));
    }

    #[test]
    fn sphere_products() {
        let sq = data(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]], CompactnessMode::Compact);
        assert_eq!(hamiltonian_monodromy(&sq).order(), 4);
        assert_eq!(symplectic_monodromy(&sq, DEFAULT_SEARCH_BOUND).unwrap().order(), 8);
    }

    #[test]
    fn cp2_three_cycle() {
        let cp2 = data(&[&[1, 0], &[0, 1], &[-1, -1]], CompactnessMode::Compact);
        let h = hamiltonian_monodromy(&cp2);
        assert_eq!(h.order(), 6);
        assert_eq!(symplectic_monodromy(&cp2, DEFAULT_SEARCH_BOUND).unwrap().order(), 6);
        let c = Permutation::from_cycles(3, &[&[1, 2, 3]]);
        let g = PermutationGroup::from_generators(3, &[c]);
        let m = induced_matrix_group(&cp2, &g).unwrap();
        let r = m.elements().iter().find(|x| !x.is_identity()).unwrap();
        // x² + x + 1: trace -1, det 1
        assert_eq!(&r[(0, 0)] + &r[(1, 1)], BigInt::from(-1));
        assert_eq!(r.determinant(), BigInt::from(1));
    }

    #[test]
    fn search_bound() {
        let sq = data(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]], CompactnessMode::Compact);
        assert_eq!(symplectic_monodromy(&sq, 3), Err(MonodromyError::SearchTooLarge { facets: 4, bound: 3 }));
    }

    #[test]
    fn bound_check() {
        let p = NormalPartition { blocks: vec![vec![0, 2], vec![1], vec![3]] };
        assert!(partition_bound_check(&p, 2));
        assert!(!partition_bound_check(&NormalPartition { blocks: vec![(0..4).collect()] }, 2));
        assert!(partition_bound_check(&NormalPartition::singletons(5), 0));
    }
}
