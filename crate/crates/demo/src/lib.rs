//! wasm-bindgen entry points for the browser demo. Each takes plain text or
//! numbers and returns a JSON string; failures come back as `{"error": ...}`
//! so the same functions can be exercised natively.

use lagmon::classify::toric_class;
use lagmon::floer::{reduce_binary_form, BinaryForm};
use lagmon::formats::{parse_laurent, parse_polytope};
use lagmon::group::PermutationGroup;
use lagmon::laurent::torsion_critical_points;
use lagmon::monodromy::{hamiltonian_monodromy, symplectic_monodromy};
use lagmon::toric::{toric_fiber_data, DelzantPolytope};
use num_traits::ToPrimitive;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Search bound for the symplectic monodromy in the browser.
const MAX_FACETS: usize = 10;
/// Largest grid the critical-point scan will walk.
const GRID_CAP: u128 = 10_000;

#[derive(Serialize)]
struct Failure {
    error: String,
}

fn json<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v),
        Err(error) => serde_json::to_string(&Failure { error }),
    }
    .expect("report serializes")
}

#[derive(Serialize)]
struct GroupSummary {
    order: usize,
    generators: Vec<String>,
}

impl From<&PermutationGroup> for GroupSummary {
    fn from(g: &PermutationGroup) -> Self {
        GroupSummary { order: g.order(), generators: g.generators().iter().map(ToString::to_string).collect() }
    }
}

#[derive(Serialize)]
struct ToricReport {
    dim: usize,
    normals: Vec<Vec<i64>>,
    offsets: Vec<f64>,
    vertices: Vec<Vec<f64>>,
    relations: Vec<String>,
    superpotential: String,
    hamiltonian: GroupSummary,
    symplectic: Option<GroupSummary>,
    class: Option<String>,
}

fn toric(text: &str) -> Result<ToricReport, String> {
    let spec = parse_polytope(text).map_err(|e| e.to_string())?;
    let p = DelzantPolytope::new(spec.dim, spec.facets, spec.mode).map_err(|e| e.to_string())?;
    let d = toric_fiber_data(&p).map_err(|e| e.to_string())?;
    let h = hamiltonian_monodromy(&d);
    let s = symplectic_monodromy(&d, MAX_FACETS).ok();
    let q = &d.polytope;
    let f = |x: &num_rational::BigRational| x.to_f64().unwrap_or(f64::NAN);
    Ok(ToricReport {
        dim: q.dim(),
        normals: q.normals().to_vec(),
        offsets: q.offsets().iter().map(f).collect(),
        vertices: q.vertices().iter().map(|v| v.iter().map(f).collect()).collect(),
        relations: d
            .relations
            .vectors()
            .iter()
            .map(|v| format!("({})", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
            .collect(),
        superpotential: d.superpotential.to_string(),
        hamiltonian: (&h).into(),
        symplectic: s.as_ref().map(Into::into),
        class: (q.dim() == 2).then(|| toric_class(q).ok().map(str::to_string)).flatten(),
    })
}

/// Monotone fibre data and monodromy groups of a polytope in the text format
/// (`dim`, optional `mode`, `facet` lines).
#[wasm_bindgen]
pub fn toric_report(text: &str) -> String {
    json(toric(text))
}

#[derive(Serialize)]
struct Grid {
    dim: usize,
    order: u32,
    potential: String,
    points: Vec<Vec<String>>,
}

fn grid(text: &str, order: u32) -> Result<Grid, String> {
    let w = parse_laurent(text).map_err(|e| e.to_string())?;
    let pts = torsion_critical_points(&w, order, GRID_CAP).map_err(|e| e.to_string())?;
    Ok(Grid {
        dim: w.dim(),
        order,
        potential: w.to_string(),
        points: pts.iter().map(|p| p.coords().iter().map(ToString::to_string).collect()).collect(),
    })
}

/// Torsion critical points of a Laurent polynomial (`dim`, `term` lines)
/// whose coordinates have denominators dividing `order`.
#[wasm_bindgen]
pub fn critical_grid(text: &str, order: u32) -> String {
    json(grid(text, order))
}

#[derive(Serialize)]
struct Reduction {
    canonical: String,
    transform: [[i64; 2]; 2],
}

fn reduce(lambda: i64, mu_half: i64, nu: i64) -> Result<Reduction, String> {
    let r = reduce_binary_form(BinaryForm::new(lambda, mu_half, nu)).map_err(|e| e.to_string())?;
    let u = r.transform.to_i64().ok_or("transform overflows")?;
    Ok(Reduction { canonical: r.canonical.to_string(), transform: [[u[0], u[1]], [u[2], u[3]]] })
}

/// Reduces `[[λ, μ′], [μ′, ν]]` of discriminant ±1 to its normal form.
#[wasm_bindgen]
pub fn qform_reduce(lambda: i32, mu_half: i32, nu: i32) -> String {
    json(reduce(lambda.into(), mu_half.into(), nu.into()))
}
