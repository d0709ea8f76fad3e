//! Line-oriented text formats for polytopes, matrix groups, group catalogs
//! and Laurent polynomials. `#` starts a comment; blank lines are ignored.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::intlat::IntegerMatrix;
use crate::laurent::LaurentPolynomial;
use crate::qlinalg::Q;
use crate::toric::CompactnessMode;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {field}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub field: String,
    pub message: String,
}

fn err(line: usize, field: &str, message: impl Into<String>) -> ParseError {
    ParseError { line, field: field.to_string(), message: message.into() }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = l.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn int(tok: &str, line: usize, field: &str) -> Result<i64, ParseError> {
    tok.parse().map_err(|_| err(line, field, format!("expected an integer, got `{tok}`")))
}

fn big(tok: &str, line: usize, field: &str) -> Result<BigInt, ParseError> {
    tok.parse().map_err(|_| err(line, field, format!("expected an integer, got `{tok}`")))
}

pub fn parse_rational(tok: &str, line: usize, field: &str) -> Result<Q, ParseError> {
    let bad = || err(line, field, format!("expected p/q, got `{tok}`"));
    match tok.split_once('/') {
        Some((p, q)) => {
            let (p, q): (BigInt, BigInt) = (p.parse().map_err(|_| bad())?, q.parse().map_err(|_| bad())?);
            if q.is_zero() {
                return Err(err(line, field, "zero denominator"));
            }
            Ok(Q::new(p, q))
        }
        None => Ok(Q::from_integer(tok.parse().map_err(|_| bad())?)),
    }
}

fn dim_line(toks: &[&str], line: usize) -> Result<usize, ParseError> {
    match toks {
        ["dim", n] => {
            let n = int(n, line, "dim")?;
            if n < 1 {
                return Err(err(line, "dim", "must be positive"));
            }
            Ok(n as usize)
        }
        _ => Err(err(line, "dim", "expected `dim <n>`")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolytopeSpec {
    pub dim: usize,
    pub mode: CompactnessMode,
    pub facets: Vec<(Vec<i64>, Q)>,
}

/// `dim <n>`, optional `mode compact|vertex`, then `facet <ν₁> … <ν_n> <λ>`.
pub fn parse_polytope(text: &str) -> Result<PolytopeSpec, ParseError> {
    let mut it = lines(text);
    let (l0, first) = it.next().ok_or_else(|| err(1, "dim", "empty file"))?;
    let dim = dim_line(&first, l0)?;
    let mut mode = CompactnessMode::Compact;
    let mut facets = Vec::new();
    for (line, toks) in it {
        match toks[0] {
            "mode" => {
                if !facets.is_empty() {
                    return Err(err(line, "mode", "must come before the facets"));
                }
                mode = match toks.get(1..) {
                    Some(["compact"]) => CompactnessMode::Compact,
                    Some(["vertex"]) => CompactnessMode::VertexRequired,
                    _ => return Err(err(line, "mode", "expected `compact` or `vertex`")),
                };
            }
            "facet" => {
                if toks.len() != dim + 2 {
                    return Err(err(line, "facet", format!("expected {dim} normal entries and an offset, got {} fields", toks.len() - 1)));
                }
                let normal = toks[1..=dim]
                    .iter()
                    .enumerate()
                    .map(|(i, t)| int(t, line, &format!("facet normal entry {}", i + 1)))
                    .collect::<Result<Vec<_>, _>>()?;
                let offset = parse_rational(toks[dim + 1], line, "facet offset")?;
                facets.push((normal, offset));
            }
            other => return Err(err(line, other, "unknown keyword")),
        }
    }
    Ok(PolytopeSpec { dim, mode, facets })
}

fn parse_gen_rows<'a, I>(it: &mut std::iter::Peekable<I>, dim: usize, gen_line: usize, name: &str) -> Result<IntegerMatrix, ParseError>
where
    I: Iterator<Item = (usize, Vec<&'a str>)>,
{
    let mut rows = Vec::with_capacity(dim);
    for r in 0..dim {
        let Some((line, toks)) = it.next() else {
            return Err(err(gen_line, name, format!("generator has {r} rows, expected {dim}")));
        };
        if toks.len() != dim {
            return Err(err(line, &format!("{name} row {}", r + 1), format!("expected {dim} integers, got {}", toks.len())));
        }
        let row = toks.iter().map(|t| big(t, line, &format!("{name} row {}", r + 1))).collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(IntegerMatrix::from_big_rows(rows, dim))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    pub dim: usize,
    pub generators: Vec<IntegerMatrix>,
}

/// `dim <n>`, then blocks of `gen` followed by `n` rows of `n` integers.
pub fn parse_group(text: &str) -> Result<GroupSpec, ParseError> {
    let mut it = lines(text).peekable();
    let (l0, first) = it.next().ok_or_else(|| err(1, "dim", "empty file"))?;
    let dim = dim_line(&first, l0)?;
    let mut generators = Vec::new();
    while let Some((line, toks)) = it.next() {
        if toks != ["gen"] {
            return Err(err(line, toks[0], "expected `gen`"));
        }
        generators.push(parse_gen_rows(&mut it, dim, line, &format!("gen {}", generators.len() + 1))?);
    }
    Ok(GroupSpec { dim, generators })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogSpec {
    /// Declared `classes Q`: representatives are only up to rational conjugacy.
    pub rational_classes: bool,
    pub entries: Vec<(String, GroupSpec, usize)>,
}

/// Optional `classes Z|Q`, then blocks `group <name>`, `dim <n>`, `gen` rows.
pub fn parse_catalog(text: &str) -> Result<CatalogSpec, ParseError> {
    let mut it = lines(text).peekable();
    let mut rational_classes = false;
    let mut entries: Vec<(String, GroupSpec, usize)> = Vec::new();
    if let Some((line, toks)) = it.peek() {
        if toks[0] == "classes" {
            rational_classes = match toks.get(1..) {
                Some(["Z"]) => false,
                Some(["Q"]) => true,
                _ => return Err(err(*line, "classes", "expected `Z` or `Q`")),
            };
            it.next();
        }
    }
    while let Some((line, toks)) = it.next() {
        let name = match toks.as_slice() {
            ["group", name] => name.to_string(),
            _ => return Err(err(line, toks[0], "expected `group <name>`")),
        };
        if entries.iter().any(|(n, _, _)| *n == name) {
            return Err(err(line, "group", format!("duplicate name `{name}`")));
        }
        let (dl, dtoks) = it.next().ok_or_else(|| err(line, &name, "missing `dim` line"))?;
        let dim = dim_line(&dtoks, dl)?;
        let mut generators = Vec::new();
        while let Some((gl, gtoks)) = it.peek() {
            if gtoks.as_slice() != ["gen"] {
                break;
            }
            let gl = *gl;
            it.next();
            generators.push(parse_gen_rows(&mut it, dim, gl, &format!("{name} gen {}", generators.len() + 1))?);
        }
        entries.push((name, GroupSpec { dim, generators }, line));
    }
    Ok(CatalogSpec { rational_classes, entries })
}

/// `dim <n>`, then `term <coeff> <e₁> … <e_n>`; repeated exponents add up.
pub fn parse_laurent(text: &str) -> Result<LaurentPolynomial, ParseError> {
    let mut it = lines(text);
    let (l0, first) = it.next().ok_or_else(|| err(1, "dim", "empty file"))?;
    let dim = dim_line(&first, l0)?;
    let mut w = LaurentPolynomial::zero(dim);
    for (line, toks) in it {
        if toks[0] != "term" {
            return Err(err(line, toks[0], "expected `term`"));
        }
        if toks.len() != dim + 2 {
            return Err(err(line, "term", format!("expected a coefficient and {dim} exponents, got {} fields", toks.len() - 1)));
        }
        let c = big(toks[1], line, "term coefficient")?;
        let e = toks[2..]
            .iter()
            .enumerate()
            .map(|(i, t)| int(t, line, &format!("term exponent {}", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        w.add_term(e, c);
    }
    Ok(w)
}

/// A point of `(Q/Z)^n` written as comma-separated `p/q` entries.
pub fn parse_point(s: &str, dim: usize) -> Result<Vec<Q>, ParseError> {
    let parts: Vec<&str> = s.trim_matches(|c| c == '(' || c == ')').split(',').map(str::trim).collect();
    if parts.len() != dim {
        return Err(err(0, "point", format!("expected {dim} coordinates, got {}", parts.len())));
    }
    parts.iter().enumerate().map(|(i, t)| parse_rational(t, 0, &format!("point coordinate {}", i + 1))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::q;

    #[test]
    fn polytope() {
        let p = parse_polytope("# CP2\ndim 2\nmode compact\nfacet 1 0 1\nfacet 0 1 1/1\nfacet -1 -1 1\n").unwrap();
        assert_eq!(p.dim, 2);
        assert_eq!(p.facets.len(), 3);
        assert_eq!(p.facets[2], (vec![-1, -1], q(1)));
        let e = parse_polytope("dim 2\nfacet 1 x 1\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.to_string().contains("facet normal entry 2"), "{e}");
        let e = parse_polytope("dim 2\nfacet 1 0\n").unwrap_err();
        assert_eq!(e.field, "facet");
        assert!(parse_polytope("dim 2\nfacet 1 0 1/0\n").is_err());
    }

    #[test]
    fn group() {
        let g = parse_group("dim 2\ngen\n0 -1\n1 -1\ngen\n0 1\n1 0\n").unwrap();
        assert_eq!(g.generators.len(), 2);
        assert_eq!(g.generators[0], IntegerMatrix::from_rows(&[[0, -1], [1, -1]]));
        let e = parse_group("dim 2\ngen\n0 -1\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_group("dim 2\ngen\n0 -1 3\n1 0\n").unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (3, "gen 1 row 1"));
    }

    #[test]
    fn catalog() {
        let c = parse_catalog("classes Q\ngroup a\ndim 1\ngen\n-1\ngroup b\ndim 1\n").unwrap();
        assert!(c.rational_classes);
        assert_eq!(c.entries.len(), 2);
        assert!(c.entries[1].1.generators.is_empty());
        assert!(parse_catalog("").unwrap().entries.is_empty());
        let e = parse_catalog("group a\ndim 1\ngroup a\ndim 1\n").unwrap_err();
        assert!(e.message.contains("duplicate"));
    }

    #[test]
    fn laurent() {
        let w = parse_laurent("dim 2\nterm 1 1 0\nterm 1 0 1\nterm 1 -1 -1\nterm 2 0 1\nterm -2 0 1\n").unwrap();
        assert_eq!(w.terms().len(), 3);
        assert!(parse_laurent("dim 2\nterm 1 1\n").is_err());
        assert_eq!(parse_point("1/3, 2/3", 2).unwrap(), vec![Q::new(1.into(), 3.into()), Q::new(2.into(), 3.into())]);
    }
}
