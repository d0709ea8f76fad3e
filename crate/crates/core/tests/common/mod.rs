#![allow(dead_code)]

pub mod oracle;

use lagmon::formats::{parse_laurent, parse_polytope};
use lagmon::laurent::LaurentPolynomial;
use lagmon::toric::DelzantPolytope;

pub fn fixture_path(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn load_polytope(name: &str) -> DelzantPolytope {
    let spec = parse_polytope(&fixture(&format!("{name}.poly"))).unwrap();
    DelzantPolytope::new(spec.dim, spec.facets, spec.mode).unwrap()
}

pub fn load_potential(name: &str) -> LaurentPolynomial {
    parse_laurent(&fixture(&format!("{name}.lp"))).unwrap()
}
