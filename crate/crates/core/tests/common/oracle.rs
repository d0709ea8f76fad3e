//! Brute-force and independently coded oracles for the library routines.

use itertools::Itertools;
use num_traits::ToPrimitive;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use lagmon::classify::{
    catalog_n2, embed_symmetric_product, gl_order_feasible, identify_class_n2, ingest_catalog, symmetric_partitions,
    Embedding,
};
use lagmon::floer::{
    continuation_search, continuation_solvable, reduce_binary_form, BinaryForm, CliffordData, Parity, SearchLimits,
};
use lagmon::group::{MatrixGroup, Permutation};
use lagmon::intlat::IntegerMatrix;
use lagmon::laurent::{is_critical, LaurentPolynomial};
use lagmon::monodromy::{hamiltonian_monodromy, symplectic_monodromy};
use lagmon::toric::toric_fiber_data;
use lagmon::torussym::{monomial_fixed_points, FixedPointSet, TorsionPoint};

use super::{fixture, load_polytope};

fn to_i64(m: &IntegerMatrix) -> Vec<Vec<i64>> {
    m.row_vecs().iter().map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect()).collect()
}

pub fn monodromy_matches_factorial_scan() {
    let names = [
        "cp2", "cp1xcp1", "bl1_cp2", "bl2_cp2", "bl3_cp2", "c_x_cp1", "c2", "cp3", "cp2xcp1", "cube2", "cube3", "orthant2",
        "orthant3", "orthant4",
    ];
    for name in names {
        let p = load_polytope(name);
        let n = p.facet_count();
        assert!(n <= 7);
        let normals = p.normals().to_vec();
        let d = toric_fiber_data(&p).unwrap();
        let basis: Vec<Vec<i64>> = d.relations.vectors().iter().map(|v| v.iter().map(|x| x.to_i64().unwrap()).collect()).collect();
        let in_kernel = |b: &[i64]| (0..p.dim()).all(|k| (0..n).map(|j| b[j] * normals[j][k]).sum::<i64>() == 0);
        let mut setwise = Vec::new();
        let mut pointwise = Vec::new();
        for images in (0..n).permutations(n) {
            let moved: Vec<Vec<i64>> = basis
                .iter()
                .map(|b| {
                    let mut out = vec![0; n];
                    for j in 0..n {
                        out[images[j]] = b[j];
                    }
                    out
                })
                .collect();
            if moved.iter().all(|b| in_kernel(b)) {
                setwise.push(Permutation::new(images.clone()));
            }
            if moved == basis {
                pointwise.push(Permutation::new(images));
            }
        }
        setwise.sort();
        pointwise.sort();
        let s = symplectic_monodromy(&d, 12).unwrap();
        let h = hamiltonian_monodromy(&d);
        assert_eq!(s.elements(), setwise.as_slice(), "{name}: setwise");
        assert_eq!(h.elements(), pointwise.as_slice(), "{name}: pointwise");
    }
}

fn det_i64(a: &[Vec<i64>]) -> i64 {
    match a.len() {
        1 => a[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = a[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect()).collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * a[0][j] * det_i64(&minor)
            })
            .sum(),
    }
}

fn all_catalog_elements() -> Vec<IntegerMatrix> {
    let mut out: Vec<IntegerMatrix> = catalog_n2().entries.iter().flat_map(|(_, g)| g.elements().to_vec()).collect();
    let n3 = ingest_catalog(&fixture("n3_minus_id.cat")).unwrap();
    out.extend(n3.entries.iter().flat_map(|(_, g)| g.elements().to_vec()));
    out.sort();
    out.dedup();
    out
}

pub fn fixed_point_count_is_determinant() {
    for g in all_catalog_elements() {
        let n = g.rows();
        let gt = to_i64(&g.transpose());
        let a: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| gt[i][j] - i64::from(i == j)).collect()).collect();
        let det = det_i64(&a).abs();
        let fix = monomial_fixed_points(n, std::slice::from_ref(&g));
        if det == 0 {
            assert!(!fix.is_finite(), "{g}");
            continue;
        }
        // fixed points have denominators dividing det
        let mut count = 0;
        for k in (0..n).map(|_| 0..det).multi_cartesian_product() {
            if (0..n).all(|i| (0..n).map(|j| a[i][j] * k[j]).sum::<i64>().rem_euclid(det) == 0) {
                count += 1;
                let p = TorsionPoint::new(k.iter().map(|&x| num_rational::BigRational::new(x.into(), det.into())).collect());
                assert!(fix.points().unwrap().contains(&p), "{g}: {p}");
            }
        }
        assert_eq!(count, det, "{g}");
        match fix {
            FixedPointSet::Finite(pts) => assert_eq!(pts.len() as i64, det, "{g}"),
            other => panic!("{g}: {other}"),
        }
    }
}

/// Cyclotomic polynomials by repeated exact division, ascending coefficients.
fn phi(n: usize) -> Vec<i128> {
    let mut f = vec![0i128; n + 1];
    f[0] = -1;
    f[n] = 1;
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        f = divide(&f, &phi(d)).expect("Φ_d divides x^n − 1");
    }
    f
}

fn divide(f: &[i128], g: &[i128]) -> Option<Vec<i128>> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    let mut q = vec![0; f.len() - dg];
    for i in (0..q.len()).rev() {
        let c = r[i + dg] / g[dg];
        q[i] = c;
        for (j, gj) in g.iter().enumerate() {
            r[i + j] -= c * gj;
        }
    }
    r.iter().all(|x| *x == 0).then_some(q)
}

fn remainder(f: &[i128], g: &[i128]) -> Vec<i128> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    if r.len() <= dg {
        return r;
    }
    for i in (0..r.len() - dg).rev() {
        let c = r[i + dg];
        for (j, gj) in g.iter().enumerate() {
            r[i + j] -= c * gj;
        }
    }
    r.truncate(dg);
    r
}

fn companion_block_orders(k: usize) -> Vec<u64> {
    // every multiset of Φ_d (d ≤ 30, φ(d) ≤ k) whose degrees sum to ≤ k, padded with Φ_1
    let cands: Vec<usize> = (1..=30).filter(|&d| phi(d).len() - 1 <= k).collect();
    let mut orders = Vec::new();
    let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, vec![])];
    while let Some((start, ds)) = stack.pop() {
        let deg: usize = ds.iter().map(|&d| phi(d).len() - 1).sum();
        let mut blocks = ds.clone();
        blocks.extend(std::iter::repeat_n(1, k - deg));
        orders.push(matrix_order(&block_companion(&blocks, k)));
        for (i, &d) in cands.iter().enumerate().skip(start) {
            if deg + phi(d).len() - 1 <= k {
                let mut next = ds.clone();
                next.push(d);
                stack.push((i, next));
            }
        }
    }
    orders.sort();
    orders.dedup();
    orders
}

fn block_companion(ds: &[usize], k: usize) -> Vec<Vec<i128>> {
    let mut m = vec![vec![0i128; k]; k];
    let mut off = 0;
    for &d in ds {
        let f = phi(d);
        let deg = f.len() - 1;
        for i in 0..deg {
            if i + 1 < deg {
                m[off + i + 1][off + i] = 1;
            }
            m[off + i][off + deg - 1] = -f[i];
        }
        off += deg;
    }
    m
}

fn matrix_order(m: &[Vec<i128>]) -> u64 {
    let k = m.len();
    let id: Vec<Vec<i128>> = (0..k).map(|i| (0..k).map(|j| i128::from(i == j)).collect()).collect();
    let mut x = m.to_vec();
    let mut e = 1;
    while x != id {
        x = (0..k).map(|i| (0..k).map(|j| (0..k).map(|t| x[i][t] * m[t][j]).sum()).collect()).collect();
        e += 1;
        assert!(e < 1000);
    }
    e
}

pub fn gl_order_matches_companion_matrices() {
    for k in 1..=4u32 {
        let orders = companion_block_orders(k as usize);
        for m in 1..=30u32 {
            assert_eq!(gl_order_feasible(m, k), orders.contains(&(m as u64)), "m={m} k={k}");
        }
    }
}

fn random_laurent(rng: &mut StdRng, dim: usize) -> LaurentPolynomial {
    let terms = rng.gen_range(1..=6);
    LaurentPolynomial::from_terms(
        dim,
        (0..terms).map(|_| (rng.gen_range(-3..=3), (0..dim).map(|_| rng.gen_range(-3..=3)).collect::<Vec<i64>>())),
    )
}

/// Whether every partial derivative vanishes at `k/order`, by reduction
/// modulo Φ_order, plus the value of the largest partial in floating point.
fn critical_oracle(w: &LaurentPolynomial, k: &[i64], order: usize) -> (bool, f64) {
    let f = phi(order);
    let mut crit = true;
    let mut worst: f64 = 0.0;
    for i in 0..w.dim() {
        let mut v = vec![0i128; order];
        for (alpha, c) in w.terms() {
            let a_i = alpha[i];
            if a_i == 0 {
                continue;
            }
            let e: i64 = (0..w.dim()).map(|j| (alpha[j] - i64::from(i == j)) * k[j]).sum();
            v[e.rem_euclid(order as i64) as usize] += c.to_i128().unwrap() * a_i as i128;
        }
        let (mut re, mut im) = (0.0, 0.0);
        for (e, c) in v.iter().enumerate() {
            let t = 2.0 * std::f64::consts::PI * e as f64 / order as f64;
            re += *c as f64 * t.cos();
            im += *c as f64 * t.sin();
        }
        worst = worst.max(re.hypot(im));
        if remainder(&v, &f).iter().any(|x| *x != 0) {
            crit = false;
        }
    }
    (crit, worst)
}

pub fn is_critical_matches_reduction_oracle() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut hits = 0;
    for trial in 0..200 {
        let dim = rng.gen_range(1..=3);
        // every fourth case is a known critical configuration: a symmetric potential at a 2-torsion point
        let w = if trial % 4 == 0 {
            let mut s = LaurentPolynomial::zero(dim);
            for i in 0..dim {
                let mut e = vec![0; dim];
                e[i] = 1;
                s.add_term(e.clone(), 1.into());
                e[i] = -1;
                s.add_term(e, 1.into());
            }
            s
        } else {
            random_laurent(&mut rng, dim)
        };
        let order = if trial % 4 == 0 { 2 } else { rng.gen_range(1..=8) };
        let k: Vec<i64> = (0..dim).map(|_| rng.gen_range(0..order as i64)).collect();
        let p = TorsionPoint::new(k.iter().map(|&x| num_rational::BigRational::new(x.into(), (order as i64).into())).collect());
        let (expect, size) = critical_oracle(&w, &k, order);
        assert_eq!(is_critical(&w, &p), expect, "W = {w} at {p}");
        assert_eq!(size < 1e-9, expect, "float check for W = {w} at {p}: {size}");
        hits += usize::from(expect);
    }
    assert!(hits >= 40, "too few critical cases exercised: {hits}");
}

pub fn binary_forms_reduce_exhaustively() {
    let mut seen = 0;
    for (l, m, n) in (-5..=5i64).cartesian_product(-5..=5i64).cartesian_product(-5..=5i64).map(|((a, b), c)| (a, b, c)) {
        let q = BinaryForm::new(l, m, n);
        let disc = m * m - l * n;
        let Ok(red) = reduce_binary_form(q) else {
            assert!(disc.abs() != 1);
            continue;
        };
        seen += 1;
        let c = red.canonical;
        assert!(matches!((c.lambda, c.mu_half, c.nu), (0, 1, 0) | (1, 0, 1) | (-1, 0, -1) | (1, 0, -1)));
        let u = to_i64(&red.transform);
        assert_eq!((u[0][0] * u[1][1] - u[0][1] * u[1][0]).abs(), 1);
        // uᵀ q u by hand
        let qm = [[l, m], [m, n]];
        let t = |i: usize, j: usize| (0..2).map(|a| (0..2).map(|b| u[a][i] * qm[a][b] * u[b][j]).sum::<i64>()).sum::<i64>();
        assert_eq!((t(0, 0), t(0, 1), t(1, 1)), (c.lambda, c.mu_half, c.nu), "{q:?}");
    }
    assert!(seen > 50);
}

fn random_unimodular(rng: &mut StdRng) -> IntegerMatrix {
    loop {
        let mut m = [[1i64, 0], [0, 1]];
        for _ in 0..rng.gen_range(1..6) {
            let k = rng.gen_range(-2..=2);
            let (i, j) = if rng.gen_bool(0.5) { (0, 1) } else { (1, 0) };
            for row in &mut m {
                row[j] += k * row[i];
            }
            if rng.gen_bool(0.3) {
                for row in &mut m {
                    row.swap(0, 1);
                }
            }
        }
        if m.iter().flatten().all(|x| x.abs() <= 5) {
            return IntegerMatrix::from_rows(&m);
        }
    }
}

pub fn class_label_is_conjugation_invariant() {
    let mut rng = StdRng::seed_from_u64(11);
    for (name, g) in catalog_n2().entries {
        for _ in 0..100 {
            let u = random_unimodular(&mut rng);
            let c = g.conjugate(&u);
            assert_eq!(identify_class_n2(&c).unwrap().name, name, "conjugated by {u}");
        }
    }
}

/// Independent check: homomorphism on the full table, injective, block-preserving.
fn check_embedding(g: &MatrixGroup, e: &Embedding) {
    let image = |m: &IntegerMatrix| e.images.iter().find(|(x, _)| x == m).map(|(_, p)| p.clone()).expect("every element has an image");
    let mut blocks = Vec::new();
    let mut start = 0;
    for &n in &e.parts {
        blocks.push(start..start + n);
        start += n;
    }
    let mut seen = std::collections::BTreeSet::new();
    for a in g.elements() {
        let pa = image(a);
        assert!(blocks.iter().all(|b| b.clone().all(|i| b.contains(&pa.apply(i)))));
        assert!(seen.insert(pa.clone()), "not injective");
        for b in g.elements() {
            let pb = image(b);
            let ab = a * b;
            let composed: Vec<usize> = (0..start).map(|i| pa.apply(pb.apply(i))).collect();
            assert_eq!(image(&ab).images(), composed.as_slice());
        }
    }
}

pub fn embeddings_verify_on_full_tables() {
    let mut groups: Vec<(String, MatrixGroup)> = catalog_n2().entries;
    groups.extend(ingest_catalog(&fixture("n3_minus_id.cat")).unwrap().entries);
    groups.extend(ingest_catalog(&fixture("n3_reps.cat")).unwrap().entries);
    let mut found = 0;
    for (name, g) in &groups {
        for parts in symmetric_partitions(g.dim()) {
            match embed_symmetric_product(g, &parts, 2000).unwrap() {
                Some(e) => {
                    check_embedding(g, &e);
                    found += 1;
                }
                None => assert_ne!(name, "1", "trivial group must embed"),
            }
        }
    }
    assert!(found > 10);
}

pub fn continuation_closed_forms_match_search() {
    let mut n = 0;
    for d in [1u32, 3, 4, 5] {
        for l in -3i64..=3 {
            for m in -8i64..=8 {
                for e1 in [1i64, -1] {
                    for parity in [Parity::Even, Parity::Odd] {
                        let data = CliffordData::integers(l, 0, 0);
                        let a = IntegerMatrix::from_rows(&[[e1, m], [0, 1]]);
                        let closed = continuation_solvable(&data, &a, parity, 1).unwrap().solvable();
                        let searched = continuation_search(&data, &a, parity, d, SearchLimits::default()).unwrap();
                        assert!(searched.solvable().is_some(), "undecided: d={d} λ={l} m={m} ε={e1} {parity:?}");
                        assert_eq!(searched.solvable(), closed, "d={d} λ={l} m={m} ε={e1} {parity:?}: {searched:?}");
                        n += 1;
                    }
                }
            }
        }
    }
    assert_eq!(n, 1904);
}
