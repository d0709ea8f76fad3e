//! Finite subgroups of GL(2, Z) and the admissibility filter in higher
//! dimension.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::{divisors, euler_phi};
use crate::formats::{parse_catalog, parse_polytope, ParseError};
use crate::group::{GroupError, MatrixGroup, Permutation, DEFAULT_CLOSURE_CAP};
use crate::intlat::{IntegerMatrix, kernel_lattice};
use crate::monodromy::{hamiltonian_monodromy, induced_matrix_group};
use crate::toric::{toric_fiber_data, DelzantPolytope};
use crate::torussym::{admissible_group, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("group has infinite order")]
    NotFinite,
    #[error("group of dimension {0} is not a subgroup of GL(2, Z)")]
    WrongDimension(usize),
    #[error("no class matches this group")]
    Unrecognized,
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("group `{name}` has infinite order")]
    EntryNotFinite { name: String },
    #[error("group `{name}` is not unimodular")]
    EntryNotUnimodular { name: String },
    #[error("group `{name}`: {source}")]
    Entry { name: String, source: GroupError },
    #[error("group has {order} elements, more than the limit {cap}")]
    TooLarge { order: usize, cap: usize },
}

pub const CLASS_NAMES: [&str; 13] = ["1", "1f", "1t", "2", "2f", "2t", "3", "3f", "3t", "4", "4ft", "6", "6ft"];

fn m2(a: i64, b: i64, c: i64, d: i64) -> IntegerMatrix {
    IntegerMatrix::from_rows(&[[a, b], [c, d]])
}

pub fn rotation(order: u32) -> IntegerMatrix {
    match order {
        1 => IntegerMatrix::identity(2),
        2 => m2(-1, 0, 0, -1),
        3 => m2(0, -1, 1, -1),
        4 => m2(0, -1, 1, 0),
        6 => m2(1, -1, 1, 0),
        _ => panic!("no rotation of order {order} in GL(2, Z)"),
    }
}

pub fn g_f() -> IntegerMatrix {
    m2(1, 0, 0, -1)
}

pub fn g_t() -> IntegerMatrix {
    m2(0, 1, 1, 0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassLabel2D {
    pub name: &'static str,
    pub representative: MatrixGroup,
}

fn representative(name: &str) -> MatrixGroup {
    let gens = match name {
        "1" => vec![],
        "1f" => vec![g_f()],
        "1t" => vec![g_t()],
        "2" => vec![rotation(2)],
        "2f" => vec![rotation(2), g_f()],
        "2t" => vec![rotation(2), g_t()],
        "3" => vec![rotation(3)],
        "3f" => vec![rotation(3), g_t()],
        "3t" => vec![rotation(3), m2(-1, 1, 0, 1)],
        "4" => vec![rotation(4)],
        "4ft" => vec![rotation(4), g_f()],
        "6" => vec![rotation(6)],
        "6ft" => vec![rotation(6), g_t()],
        _ => unreachable!(),
    };
    MatrixGroup::from_generators(2, &gens)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupCatalog {
    pub dim: usize,
    pub entries: Vec<(String, MatrixGroup)>,
    /// Representatives are only known up to GL(n, Q)-conjugacy.
    pub rational_classes: bool,
}

pub fn catalog_n2() -> GroupCatalog {
    GroupCatalog {
        dim: 2,
        entries: CLASS_NAMES.iter().map(|n| (n.to_string(), representative(n))).collect(),
        rational_classes: false,
    }
}

pub fn class_label(name: &str) -> Option<ClassLabel2D> {
    let name = CLASS_NAMES.iter().find(|n| **n == name)?;
    Some(ClassLabel2D { name, representative: representative(name) })
}

fn is_reflection(g: &IntegerMatrix) -> bool {
    g.determinant().is_negative()
}

/// Primitive generator of `ker(g − s·I)` for a 2×2 reflection.
fn eigenvector(g: &IntegerMatrix, s: i64) -> Vec<i64> {
    let shifted = g.sub(&IntegerMatrix::diagonal(&[s, s]));
    let k = kernel_lattice(&shifted.transpose());
    let v = &k.vectors()[0];
    v.iter().map(|x| x.to_i64().unwrap()).collect()
}

fn det2(a: &[i64], b: &[i64]) -> i64 {
    (a[0] * b[1] - a[1] * b[0]).abs()
}

/// 'f' or 't' for one reflection, relative to the rotation subgroup.
fn reflection_type(r: &IntegerMatrix, rot_order: usize, rot: &IntegerMatrix) -> Option<char> {
    let plus = eigenvector(r, 1);
    match rot_order {
        1 | 2 => match det2(&plus, &eigenvector(r, -1)) {
            1 => Some('f'),
            2 => Some('t'),
            _ => None,
        },
        3 => {
            let big: Vec<num_bigint::BigInt> = plus.iter().map(|&x| x.into()).collect();
            let image: Vec<i64> = rot.mul_vec(&big).iter().map(|x| x.to_i64().unwrap()).collect();
            match det2(&plus, &image) {
                1 => Some('f'),
                3 => Some('t'),
                _ => None,
            }
        }
        _ => Some('x'),
    }
}

/// The conjugacy class of a finite subgroup of GL(2, Z).
pub fn identify_class_n2(g: &MatrixGroup) -> Result<ClassLabel2D, ClassifyError> {
    if g.dim() != 2 {
        return Err(ClassifyError::WrongDimension(g.dim()));
    }
    let rot = g.orientation_preserving();
    let m = rot.order();
    let rot_gen = rot.elements().iter().find(|e| element_order(e) == m as u64).cloned();
    let reflections: Vec<&IntegerMatrix> = g.elements().iter().filter(|e| is_reflection(e)).collect();
    let name: &str = if reflections.is_empty() {
        match m {
            1 => "1",
            2 => "2",
            3 => "3",
            4 => "4",
            6 => "6",
            _ => return Err(ClassifyError::Unrecognized),
        }
    } else {
        let rot_gen = rot_gen.ok_or(ClassifyError::Unrecognized)?;
        let types: Vec<Option<char>> = reflections.iter().map(|r| reflection_type(r, m, &rot_gen)).collect();
        let t = types[0].ok_or(ClassifyError::Unrecognized)?;
        if types.iter().any(|x| *x != Some(t)) {
            return Err(ClassifyError::Unrecognized);
        }
        match (m, t) {
            (1, 'f') => "1f",
            (1, 't') => "1t",
            (2, 'f') => "2f",
            (2, 't') => "2t",
            (3, 'f') => "3f",
            (3, 't') => "3t",
            (4, _) => "4ft",
            (6, _) => "6ft",
            _ => return Err(ClassifyError::Unrecognized),
        }
    };
    let label = class_label(name).expect("known name");
    if label.representative.order() != g.order() {
        return Err(ClassifyError::Unrecognized);
    }
    Ok(label)
}

fn element_order(g: &IntegerMatrix) -> u64 {
    let id = IntegerMatrix::identity(g.rows());
    let mut x = g.clone();
    let mut k = 1;
    while x != id {
        x = &x * g;
        k += 1;
    }
    k
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ToricTag {
    /// Realized as the Hamiltonian monodromy of a monotone toric fibre.
    Realized,
    /// Admissible, but toric fibres cannot produce it.
    ToricImpossible,
    /// Ruled out for every monotone Lagrangian torus.
    Impossible,
}

impl fmt::Display for ToricTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ToricTag::Realized => "TORIC",
            ToricTag::ToricImpossible => "TORIC_IMPOSSIBLE",
            ToricTag::Impossible => "IMPOSSIBLE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassRow {
    pub name: &'static str,
    pub order: usize,
    pub admissible: bool,
    pub witness: Option<Witness>,
    pub tag: Option<ToricTag>,
    /// Fixtures whose Hamiltonian monodromy lands in this class.
    pub realized_by: Vec<&'static str>,
}

/// The polygons whose monodromy groups realize the toric classes.
pub const TABLE_FIXTURES: [(&str, &str); 7] = [
    ("CP^2", include_str!("../fixtures/cp2.poly")),
    ("CP^1 x CP^1", include_str!("../fixtures/cp1xcp1.poly")),
    ("Bl_1 CP^2", include_str!("../fixtures/bl1_cp2.poly")),
    ("Bl_2 CP^2", include_str!("../fixtures/bl2_cp2.poly")),
    ("Bl_3 CP^2", include_str!("../fixtures/bl3_cp2.poly")),
    ("C x CP^1", include_str!("../fixtures/c_x_cp1.poly")),
    ("C^2", include_str!("../fixtures/c2.poly")),
];

/// Class of the induced Hamiltonian monodromy of a two-dimensional toric fibre.
pub fn toric_class(p: &DelzantPolytope) -> Result<&'static str, Box<dyn std::error::Error>> {
    let d = toric_fiber_data(p)?;
    let h = hamiltonian_monodromy(&d);
    let g = induced_matrix_group(&d, &h)?;
    Ok(identify_class_n2(&g)?.name)
}

/// Runs the admissibility test on all 13 classes and tags each with its
/// toric status.
pub fn classify_n2() -> Vec<ClassRow> {
    let mut realized: BTreeMap<&str, Vec<&'static str>> = BTreeMap::new();
    for (label, text) in TABLE_FIXTURES {
        let spec = parse_polytope(text).expect("built-in fixture parses");
        let p = DelzantPolytope::new(spec.dim, spec.facets, spec.mode).expect("built-in fixture is valid");
        let class = toric_class(&p).expect("built-in fixture has finite monodromy");
        realized.entry(class).or_default().push(label);
    }
    catalog_n2()
        .entries
        .into_iter()
        .map(|(name, g)| {
            let name = CLASS_NAMES.iter().find(|n| **n == name).unwrap();
            let adm = admissible_group(&g);
            let realized_by = realized.get(name).cloned().unwrap_or_default();
            let tag = if !adm.admissible {
                Some(ToricTag::Impossible)
            } else if !realized_by.is_empty() {
                Some(ToricTag::Realized)
            } else if matches!(*name, "2" | "3") {
                // not realizable by toric fibres in dimension 2
                Some(ToricTag::ToricImpossible)
            } else {
                None
            };
            ClassRow { name, order: g.order(), admissible: adm.admissible, witness: adm.witness, tag, realized_by }
        })
        .collect()
}

/// Parses, closes and validates a catalog file.
pub fn ingest_catalog(text: &str) -> Result<GroupCatalog, ClassifyError> {
    let spec = parse_catalog(text)?;
    let dim = spec.entries.first().map_or(0, |e| e.1.dim);
    let mut entries = Vec::new();
    for (name, g, line) in spec.entries {
        if g.dim != dim {
            return Err(ParseError { line, field: name, message: format!("dimension {} differs from {dim}", g.dim) }.into());
        }
        let group = MatrixGroup::generate(g.dim, &g.generators, DEFAULT_CLOSURE_CAP).map_err(|e| match e {
            GroupError::NotFinite { .. } => ClassifyError::EntryNotFinite { name: name.clone() },
            GroupError::NotUnimodular { .. } => ClassifyError::EntryNotUnimodular { name: name.clone() },
            source => ClassifyError::Entry { name: name.clone(), source },
        })?;
        entries.push((name, group));
    }
    Ok(GroupCatalog { dim, entries, rational_classes: spec.rational_classes })
}

/// An injective homomorphism into `S_{n₁} × ⋯ × S_{n_k}`, acting on
/// `n₁ + ⋯ + n_k` points block by block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Embedding {
    pub parts: Vec<usize>,
    pub images: Vec<(IntegerMatrix, Permutation)>,
}

impl Embedding {
    pub fn image_of(&self, g: &IntegerMatrix) -> Option<&Permutation> {
        self.images.iter().find(|(m, _)| m == g).map(|(_, p)| p)
    }
}

pub const DEFAULT_EMBED_LIMIT: usize = 2000;

/// All permutations of `{0..n-1}`.
fn symmetric_group(n: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    (0..n).permutations(n).collect()
}

fn product_elements(parts: &[usize]) -> Vec<Permutation> {
    let mut out = vec![Vec::new()];
    let mut offset = 0;
    for &n in parts {
        let sn = symmetric_group(n);
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                sn.iter().map(move |p| {
                    let mut v = prefix.clone();
                    v.extend(p.iter().map(|x| x + offset));
                    v
                })
            })
            .collect();
        offset += n;
    }
    out.into_iter().map(Permutation::new).collect()
}

/// Extends generator images to a map on the whole group, or `None` if the
/// assignment is not a homomorphism on the generated subgroup.
fn extend(gens: &[IntegerMatrix], images: &[Permutation], degree: usize, dim: usize) -> Option<HashMap<IntegerMatrix, Permutation>> {
    let mut map = HashMap::new();
    let id = IntegerMatrix::identity(dim);
    map.insert(id.clone(), Permutation::identity(degree));
    let mut queue = vec![id];
    while let Some(x) = queue.pop() {
        let px = map[&x].clone();
        for (s, ps) in gens.iter().zip(images) {
            let y = &x * s;
            let py = px.compose(ps);
            match map.get(&y) {
                Some(existing) if *existing != py => return None,
                Some(_) => {}
                None => {
                    map.insert(y.clone(), py);
                    queue.push(y);
                }
            }
        }
    }
    Some(map)
}

/// Backtracking search for an injective homomorphism `g → S_{n₁} × ⋯ × S_{n_k}`.
pub fn embed_symmetric_product(g: &MatrixGroup, parts: &[usize], limit: usize) -> Result<Option<Embedding>, ClassifyError> {
    if g.order() > limit {
        return Err(ClassifyError::TooLarge { order: g.order(), cap: limit });
    }
    let degree: usize = parts.iter().sum();
    let target = product_elements(parts);
    if target.len() < g.order() {
        return Ok(None);
    }
    let gens = g.generators();
    let by_order: Vec<Vec<&Permutation>> = gens
        .iter()
        .map(|s| {
            let o = element_order(s);
            target.iter().filter(|p| p.order() == o).collect()
        })
        .collect();
    let mut chosen: Vec<Permutation> = Vec::new();
    fn go(
        i: usize,
        g: &MatrixGroup,
        gens: &[IntegerMatrix],
        cands: &[Vec<&Permutation>],
        chosen: &mut Vec<Permutation>,
        degree: usize,
    ) -> Option<HashMap<IntegerMatrix, Permutation>> {
        let map = extend(&gens[..i], chosen, degree, g.dim())?;
        if i == gens.len() {
            let mut imgs: Vec<&Permutation> = map.values().collect();
            imgs.sort();
            imgs.dedup();
            return (imgs.len() == g.order()).then_some(map);
        }
        for p in &cands[i] {
            chosen.push((*p).clone());
            if let Some(m) = go(i + 1, g, gens, cands, chosen, degree) {
                return Some(m);
            }
            chosen.pop();
        }
        None
    }
    let found = go(0, g, &gens, &by_order, &mut chosen, degree);
    Ok(found.map(|map| {
        let mut images: Vec<(IntegerMatrix, Permutation)> = map.into_iter().collect();
        images.sort();
        Embedding { parts: parts.to_vec(), images }
    }))
}

/// Whether `e` is an injective homomorphism of `g`, checked on the whole
/// multiplication table.
pub fn verify_embedding(g: &MatrixGroup, e: &Embedding) -> bool {
    let degree: usize = e.parts.iter().sum();
    let mut starts = Vec::new();
    let mut acc = 0;
    for &n in &e.parts {
        starts.push((acc, acc + n));
        acc += n;
    }
    let block_preserving = |p: &Permutation| {
        p.degree() == degree && starts.iter().all(|&(a, b)| (a..b).all(|i| (a..b).contains(&p.apply(i))))
    };
    if e.images.len() != g.order() || !e.images.iter().all(|(m, p)| g.contains(m) && block_preserving(p)) {
        return false;
    }
    let mut distinct: Vec<&Permutation> = e.images.iter().map(|(_, p)| p).collect();
    distinct.sort();
    distinct.dedup();
    if distinct.len() != g.order() {
        return false;
    }
    for (a, pa) in &e.images {
        for (b, pb) in &e.images {
            if e.image_of(&(a * b)) != Some(&pa.compose(pb)) {
                return false;
            }
        }
    }
    true
}

/// Whether some element of GL(k, Z) has order exactly `m`: the least
/// `Σ φ(d_i)` over divisor sets with `lcm = m` is at most `k`.
pub fn gl_order_feasible(m: u32, k: u32) -> bool {
    assert!(m >= 1 && k >= 1);
    let divs = divisors(m);
    let idx: HashMap<u32, usize> = divs.iter().enumerate().map(|(i, d)| (*d, i)).collect();
    let mut best = vec![u32::MAX; divs.len()];
    best[0] = 0;
    for &d in divs.iter().skip(1) {
        let cost = euler_phi(d);
        for i in 0..divs.len() {
            if best[i] == u32::MAX {
                continue;
            }
            let j = idx[&divs[i].lcm(&d)];
            best[j] = best[j].min(best[i] + cost);
        }
    }
    best[idx[&m]] <= k
}

/// Compositions `n₁ ≥ ⋯ ≥ n_k ≥ 2` with `Σ(n_j − 1) = n`, largest parts first.
pub fn symmetric_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (2..=max.min(rest + 1)).rev() {
            cur.push(part);
            go(rest - (part - 1), part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n + 1, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    RuledOut,
    Case1Necessary,
    Case2,
    Both,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::RuledOut => "RULED_OUT",
            Status::Case1Necessary => "CASE1_NECESSARY",
            Status::Case2 => "CASE2",
            Status::Both => "BOTH",
            Status::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjectureVerdict {
    pub name: String,
    pub order: usize,
    pub status: Status,
    pub witness: Option<Witness>,
    /// Element orders occurring in the group, all realizable in GL(n − 1, Z).
    pub element_orders: Vec<u64>,
    pub embedding: Option<Embedding>,
    /// Set when the group was too large for the embedding search.
    pub embedding_skipped: bool,
}

/// Applies the forced-fixed-point test, then looks for a product of
/// symmetric groups containing the group, and checks element orders
/// against GL(n − 1, Z).
pub fn conjecture_filter(c: &GroupCatalog) -> Vec<ConjectureVerdict> {
    c.entries
        .iter()
        .map(|(name, g)| {
            let adm = admissible_group(g);
            let mut orders: Vec<u64> = g.elements().iter().map(element_order).collect();
            orders.sort();
            orders.dedup();
            let mut v = ConjectureVerdict {
                name: name.clone(),
                order: g.order(),
                status: Status::RuledOut,
                witness: adm.witness,
                element_orders: orders.clone(),
                embedding: None,
                embedding_skipped: false,
            };
            if !adm.admissible {
                return v;
            }
            let n = g.dim();
            let case1 = n >= 2 && orders.iter().all(|&o| gl_order_feasible(o as u32, (n - 1) as u32));
            for parts in symmetric_partitions(n) {
                match embed_symmetric_product(g, &parts, DEFAULT_EMBED_LIMIT) {
                    Ok(Some(e)) => {
                        v.embedding = Some(e);
                        break;
                    }
                    Ok(None) => {}
                    Err(_) => {
                        v.embedding_skipped = true;
                        break;
                    }
                }
            }
            v.status = match (case1, v.embedding.is_some()) {
                (true, true) => Status::Both,
                (true, false) => Status::Case1Necessary,
                (false, true) => Status::Case2,
                (false, false) => Status::Unknown,
            };
            v
        })
        .collect()
}
