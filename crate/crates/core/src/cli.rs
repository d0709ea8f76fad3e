//! Command-line front end. [`run`] takes the argument vector and returns the
//! exit code and output streams so it can be driven from tests.

use std::fmt::Display;
use std::fs;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::classify::{classify_n2, conjecture_filter, identify_class_n2, ingest_catalog, ClassifyError};
use crate::floer::{clifford_constants, hessian_theorem_check, reduce_binary_form, rk1_classify, BinaryForm, GroupKind};
use crate::formats::{parse_catalog, parse_group, parse_laurent, parse_point, parse_polytope, ParseError};
use crate::group::{MatrixGroup, PermutationGroup, DEFAULT_CLOSURE_CAP};
use crate::intlat::IntegerMatrix;
use crate::laurent::{torsion_critical_points, LaurentPolynomial, DEFAULT_GRID_CAP};
use crate::monodromy::{
    coefficient_partition, hamiltonian_monodromy, induced_matrix_group, partition_bound_check, symplectic_monodromy,
    DEFAULT_SEARCH_BOUND,
};
use crate::toric::{toric_fiber_data, validate_delzant, CompactnessMode, DelzantPolytope};
use crate::torussym::{admissible_group, TorsionPoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "lagmon", version, about = "Monodromy of monotone Lagrangian tori")]
struct Cli {
    /// Emit one JSON object per record instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Compact,
    Vertex,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Order3,
    Order2,
    Order2f,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a polytope and compute its monodromy groups.
    Toric {
        file: String,
        /// Override the compactness mode given in the file.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Facet-count limit for the symplectic search.
        #[arg(long, default_value_t = DEFAULT_SEARCH_BOUND as u64, value_parser = clap::value_parser!(u64).range(1..))]
        bound: u64,
    },
    /// Admissibility of the 13 finite subgroups of GL(2, Z).
    Classify2d,
    /// Forced critical points and admissibility of a matrix group.
    Filter {
        file: String,
        /// Closure size cap.
        #[arg(long, default_value_t = DEFAULT_CLOSURE_CAP as u64, value_parser = clap::value_parser!(u64).range(1..))]
        cap: u64,
    },
    /// Run the conjecture filter over a group catalog.
    Conjecture { file: String },
    /// Superpotential tools.
    Potential(PotentialArgs),
    /// Clifford constants of a two-variable potential at a critical point.
    Clifford {
        file: String,
        /// Point as comma-separated fractions, e.g. `1/3,1/3`.
        #[arg(long)]
        at: String,
    },
    /// Reduce the binary form [[λ, μ'], [μ', ν]] of discriminant ±1.
    Qform {
        #[arg(allow_negative_numbers = true)]
        lambda: i64,
        #[arg(allow_negative_numbers = true)]
        mu_half: i64,
        #[arg(allow_negative_numbers = true)]
        nu: i64,
    },
}

#[derive(Args, Debug)]
struct PotentialArgs {
    #[command(subcommand)]
    command: PotentialCommand,
}

#[derive(Subcommand, Debug)]
enum PotentialCommand {
    /// Critical points of order dividing the bound.
    Crit {
        file: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        bound: u32,
        /// Grid size cap.
        #[arg(long, default_value_t = DEFAULT_GRID_CAP as u64, value_parser = clap::value_parser!(u64).range(1..))]
        cap: u64,
    },
    /// Classify a one-variable potential.
    Rk1 { file: String },
    /// Hessian constraints for an invariant two-variable potential.
    Hessian {
        file: String,
        #[arg(long, value_enum)]
        kind: KindArg,
    },
}

/// Exit code and the two output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Parse(String),
    Invalid(String),
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Parse(e.to_string())
    }
}

fn invalid(e: impl Display) -> Failure {
    Failure::Invalid(e.to_string())
}

/// One output record: ordered fields, each with a text and a JSON rendering.
struct Record {
    fields: Vec<(&'static str, String, Value)>,
    one_line: bool,
}

impl Record {
    fn block() -> Self {
        Record { fields: Vec::new(), one_line: false }
    }

    fn line() -> Self {
        Record { fields: Vec::new(), one_line: true }
    }

    fn field(mut self, key: &'static str, text: impl Display, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.fields.push((key, text.to_string(), v));
        self
    }

    fn text(mut self, key: &'static str, text: impl Display) -> Self {
        let t = text.to_string();
        self.fields.push((key, t.clone(), Value::String(t)));
        self
    }

    fn render(&self, json_mode: bool) -> String {
        if json_mode {
            let map: Map<String, Value> = self.fields.iter().map(|(k, _, v)| (k.to_string(), v.clone())).collect();
            return format!("{}\n", Value::Object(map));
        }
        if self.one_line {
            let parts: Vec<String> = self.fields.iter().map(|(_, t, _)| t.clone()).filter(|t| !t.is_empty()).collect();
            return format!("{}\n", parts.join("  "));
        }
        self.fields.iter().map(|(k, t, _)| format!("{k} {t}\n")).collect()
    }
}

fn read(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{path}: {e}")))
}

fn perm_gens(g: &PermutationGroup) -> String {
    let gens: Vec<String> = g.generators().iter().map(ToString::to_string).collect();
    if gens.is_empty() {
        format!("order {}", g.order())
    } else {
        format!("order {} generated by {}", g.order(), gens.join(", "))
    }
}

fn perm_json(g: &PermutationGroup) -> Value {
    json!({ "order": g.order(), "generators": g.generators().iter().map(ToString::to_string).collect::<Vec<_>>() })
}

fn matrices_text(gens: &[IntegerMatrix]) -> String {
    if gens.is_empty() {
        "none".into()
    } else {
        gens.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
    }
}

fn toric(file: &str, mode: Option<ModeArg>, bound: usize) -> Result<(Vec<Record>, i32), Failure> {
    let spec = parse_polytope(&read(file)?)?;
    let mode = match mode {
        Some(ModeArg::Compact) => CompactnessMode::Compact,
        Some(ModeArg::Vertex) => CompactnessMode::VertexRequired,
        None => spec.mode,
    };
    let p = DelzantPolytope::new(spec.dim, spec.facets, mode).map_err(invalid)?;
    let report = validate_delzant(&p);
    let mut r = Record::block()
        .field("dimension", p.dim(), p.dim())
        .field("facets", p.facet_count(), p.facet_count())
        .field("mode", p.mode(), p.mode().to_string())
        .field("vertices", report.vertices.len(), report.vertices.len());
    for w in &report.warnings {
        r = r.text("warning", format!("{w:?}"));
    }
    if let Some(f) = &report.failure {
        r = r.text("invalid", f);
        return Ok((vec![r], EXIT_INVALID));
    }
    r = r.text("valid", "Delzant");
    let d = toric_fiber_data(&p).map_err(invalid)?;
    let offsets: Vec<String> = d.polytope.offsets().iter().map(ToString::to_string).collect();
    r = r.field("normalized offsets", offsets.join(" "), &offsets);
    let rel: Vec<String> = d.relations.vectors().iter().map(|v| format!("({})", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))).collect();
    r = r.field("relations", if rel.is_empty() { "none".into() } else { rel.join(" ") }, &rel);
    r = r.text("superpotential", &d.superpotential);
    let part = coefficient_partition(&d.relations);
    r = r.text("partition", &part);
    let bound_ok = partition_bound_check(&part, p.dim());
    r = r.field("partition bound", if bound_ok { "holds" } else { "VIOLATED" }, bound_ok);

    let h = hamiltonian_monodromy(&d);
    r = r.field("H_L", perm_gens(&h), perm_json(&h));
    let hm = induced_matrix_group(&d, &h).map_err(invalid)?;
    r = r.field("H_L matrices", matrices_text(&hm.generators()), hm.generators());
    match symplectic_monodromy(&d, bound) {
        Ok(s) => {
            r = r.field("H_L^S", perm_gens(&s), perm_json(&s));
            let sm = induced_matrix_group(&d, &s).map_err(invalid)?;
            r = r.field("H_L^S matrices", matrices_text(&sm.generators()), sm.generators());
            r = r.field("H_L^S = H_L", s == h, s == h);
            if p.dim() == 2 {
                r = class_field(r, "H_L^S class", &sm);
            }
        }
        Err(e) => r = r.text("H_L^S", format!("not computed: {e}")),
    }
    if p.dim() == 2 {
        r = class_field(r, "H_L class", &hm);
    }
    Ok((vec![r], EXIT_OK))
}

fn class_field(r: Record, key: &'static str, g: &MatrixGroup) -> Record {
    match identify_class_n2(g) {
        Ok(l) => r.text(key, l.name),
        Err(e) => r.text(key, format!("unidentified: {e}")),
    }
}

fn classify2d() -> Vec<Record> {
    classify_n2()
        .into_iter()
        .map(|row| {
            let tag = row.tag.map(|t| t.to_string()).unwrap_or_else(|| "OPEN".into());
            let mut r = Record::line()
                .text("class", format!("{:<4}", row.name))
                .field("order", format!("order {:<2}", row.order), row.order)
                .field("tag", format!("{tag:<16}"), &tag)
                .field("admissible", if row.admissible { "admissible" } else { "inadmissible" }, row.admissible);
            let w = row.witness.as_ref().map(|w| format!("witness {} moves {} to {}", w.element, w.point, w.image)).unwrap_or_default();
            r = r.field("witness", w, &row.witness);
            let realized = row.realized_by.join(", ");
            r.field("realized by", if realized.is_empty() { String::new() } else { format!("realized by {realized}") }, &row.realized_by)
        })
        .collect()
}

fn filter(file: &str, cap: usize) -> Result<(Vec<Record>, i32), Failure> {
    let spec = parse_group(&read(file)?)?;
    let g = MatrixGroup::generate(spec.dim, &spec.generators, cap).map_err(invalid)?;
    let adm = admissible_group(&g);
    let forced: Vec<String> = adm.forced.iter().map(ToString::to_string).collect();
    let mut r = Record::block()
        .field("order", g.order(), g.order())
        .field("forced critical points", format!("{} {}", forced.len(), forced.join(" ")), &forced)
        .field("admissible", adm.admissible, adm.admissible);
    if let Some(w) = &adm.witness {
        r = r.field("witness", format!("{} moves {} to {}", w.element, w.point, w.image), w);
    }
    if g.dim() == 2 {
        r = class_field(r, "class", &g);
    }
    Ok((vec![r], EXIT_OK))
}

fn conjecture(file: &str) -> Result<Vec<Record>, Failure> {
    let text = read(file)?;
    parse_catalog(&text)?;
    let cat = ingest_catalog(&text).map_err(|e| match e {
        ClassifyError::Parse(p) => Failure::from(p),
        other => invalid(other),
    })?;
    let mut out = Vec::new();
    if cat.rational_classes {
        out.push(Record::line().text(
            "warning",
            "warning: catalog lists GL(n,Q)-classes; fixed-point counts depend on the integral class, so verdicts hold only for the listed representatives",
        ));
    }
    for v in conjecture_filter(&cat) {
        let mut r = Record::line()
            .text("name", &v.name)
            .field("order", format!("order {}", v.order), v.order)
            .field("status", v.status, v.status.to_string());
        let detail = match (&v.witness, &v.embedding) {
            (Some(w), _) => format!("witness {} moves {} to {}", w.element, w.point, w.image),
            (None, Some(e)) => format!("embeds in S_{}", e.parts.iter().map(ToString::to_string).collect::<Vec<_>>().join(" x S_")),
            _ => String::new(),
        };
        r = r.field("witness", detail, &v.witness);
        r = r.field("parts", "", v.embedding.as_ref().map(|e| e.parts.clone()));
        let orders: Vec<String> = v.element_orders.iter().map(ToString::to_string).collect();
        r = r.field("element orders", format!("element orders {}", orders.join(",")), &v.element_orders);
        if v.embedding_skipped {
            r = r.text("note", "embedding search skipped (group too large)");
        }
        out.push(r);
    }
    Ok(out)
}

fn load_potential(file: &str) -> Result<LaurentPolynomial, Failure> {
    Ok(parse_laurent(&read(file)?)?)
}

fn potential(cmd: PotentialCommand) -> Result<(Vec<Record>, i32), Failure> {
    match cmd {
        PotentialCommand::Crit { file, bound, cap } => {
            let w = load_potential(&file)?;
            let pts = torsion_critical_points(&w, bound, cap as u128).map_err(invalid)?;
            let texts: Vec<String> = pts.iter().map(ToString::to_string).collect();
            let r = Record::block()
                .text("potential", &w)
                .field("order bound", bound, bound)
                .field("critical points", format!("{} {}", pts.len(), texts.join(" ")), &texts);
            Ok((vec![r], EXIT_OK))
        }
        PotentialCommand::Rk1 { file } => {
            let w = load_potential(&file)?;
            let rep = rk1_classify(&w).map_err(invalid)?;
            let r = Record::block()
                .text("potential", &w)
                .field("case", rep.case.to_string(), &rep.case)
                .text("group bound", rep.group_bound)
                .field("admissible shears", &rep.admissible_shears, rep.admissible_shears.to_string());
            Ok((vec![r], EXIT_OK))
        }
        PotentialCommand::Hessian { file, kind } => {
            let w = load_potential(&file)?;
            let kind = match kind {
                KindArg::Order3 => GroupKind::Order3,
                KindArg::Order2 => GroupKind::Order2,
                KindArg::Order2f => GroupKind::Order2F,
            };
            let rep = hessian_theorem_check(&w, kind).map_err(invalid)?;
            let mut r = Record::block().text("potential", &w);
            for pc in &rep.points {
                r = r.field("constants at", format!("{}: {}", pc.point, pc.constants), pc);
            }
            r = match &rep.conclusion {
                Some(c) => r.field("conclusion", c.to_string(), c),
                None => r.text("violation", rep.violation.clone().unwrap_or_default()),
            };
            Ok((vec![r], if rep.passed() { EXIT_OK } else { EXIT_INVALID }))
        }
    }
}

fn clifford(file: &str, at: &str) -> Result<Vec<Record>, Failure> {
    let w = load_potential(file)?;
    let coords = parse_point(at, w.dim()).map_err(|e| Failure::Parse(format!("--at: {}", e.message)))?;
    let p = TorsionPoint::new(coords);
    let c = clifford_constants(&w, &p).map_err(invalid)?;
    Ok(vec![Record::block()
        .text("point", &p)
        .field("lambda", &c.lambda, &c.lambda)
        .field("mu", &c.mu, &c.mu)
        .field("nu", &c.nu, &c.nu)
        .field("half integral", c.half_integral, c.half_integral)])
}

fn qform(l: i64, m: i64, n: i64) -> Result<Vec<Record>, Failure> {
    let red = reduce_binary_form(BinaryForm::new(l, m, n)).map_err(invalid)?;
    Ok(vec![Record::block()
        .field("canonical", red.canonical, red.canonical)
        .field("transform", &red.transform, &red.transform)])
}

fn dispatch(cli: Cli) -> Result<(Vec<Record>, i32), Failure> {
    let ok = |r: Vec<Record>| (r, EXIT_OK);
    match cli.command {
        Command::Toric { file, mode, bound } => toric(&file, mode, bound as usize),
        Command::Classify2d => Ok(ok(classify2d())),
        Command::Filter { file, cap } => filter(&file, cap as usize),
        Command::Conjecture { file } => conjecture(&file).map(ok),
        Command::Potential(p) => potential(p.command),
        Command::Clifford { file, at } => clifford(&file, &at).map(ok),
        Command::Qform { lambda, mu_half, nu } => qform(lambda, mu_half, nu).map(ok),
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_PARSE,
            };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let json = cli.json;
    match dispatch(cli) {
        Ok((records, code)) => Outcome { code, stdout: records.iter().map(|r| r.render(json)).collect(), stderr: String::new() },
        Err(Failure::Parse(m)) => Outcome { code: EXIT_PARSE, stdout: String::new(), stderr: format!("parse error: {m}\n") },
        Err(Failure::Invalid(m)) => Outcome { code: EXIT_INVALID, stdout: String::new(), stderr: format!("error: {m}\n") },
    }
}
