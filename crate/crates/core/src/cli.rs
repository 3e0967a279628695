//! Command-line front end. [`dispatch`] never touches the process; the binary only prints.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::catalog::{catalog_get, catalog_list, Payload};
use crate::games::{
    check_perfect, outcome_probability, schmidt_reduce, strategy_from_cert, verify_special_form, winning_probability,
    Question, Strategy,
};
use crate::io::{
    cert_to_json, hom_map_to_json, load, load_cert, load_hom_map, load_pvms, load_structure, write_text, CertFile,
    Document, IoError, StructureRef,
};
use crate::linalg::{Backend, Matrix, DEFAULT_TOL};
use crate::monad::{kleisli_compose, verify_qhom, QHomCert};
use crate::structures::{find_homomorphism, Structure};
use crate::translations::{
    bcs_quantum_solution_verify, check_state_independent_witness, check_state_witness, csp_to_pair, empirical_to_csp,
    graph_pair_to_bcs, is_strongly_contextual, pair_to_csp, verify_operator_solution, Bcs, CspInstance, EmpiricalModel,
    Graph, OperatorSolution, Pvms,
};
use crate::{Condition, Report};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "qmonad", version, about = "Classical and quantum homomorphisms between finite structures")]
struct Cli {
    /// Output style.
    #[arg(long, value_enum, global = true, default_value = "human")]
    format: Format,
    /// Convert inputs to this backend before checking.
    #[arg(long, value_enum, global = true)]
    backend: Option<BackendArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Format {
    Human,
    Machine,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BackendArg {
    Exact,
    Float,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classical homomorphisms.
    #[command(subcommand)]
    Hom(HomCmd),
    /// Quantum homomorphism certificates.
    #[command(subcommand)]
    Qhom(QhomCmd),
    /// The two-prover homomorphism game.
    #[command(subcommand)]
    Game(GameCmd),
    /// Conversions between problem encodings.
    #[command(subcommand)]
    Translate(TranslateCmd),
    /// Binary constraint systems.
    #[command(subcommand)]
    Bcs(BcsCmd),
    /// Strong contextuality and quantum witnesses.
    #[command(subcommand)]
    Contextuality(ContextualityCmd),
    /// Built-in instances, addressable elsewhere as `catalog:<id>`.
    #[command(subcommand)]
    Catalog(CatalogCmd),
}

#[derive(Args, Debug)]
struct Out {
    /// Write the produced document here instead of printing it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum HomCmd {
    /// Search for a homomorphism A -> B.
    Find { a: String, b: String },
    /// Check that MAP is a homomorphism A -> B.
    Check { a: String, b: String, map: String },
}

#[derive(Subcommand, Debug)]
enum QhomCmd {
    /// Check QH1-QH3 for a certificate.
    Verify { cert: String },
    /// Kleisli composite of C1: A -> B and C2: B -> C.
    Compose {
        c1: String,
        c2: String,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Subcommand, Debug)]
enum GameCmd {
    /// Winning probability and perfection of a strategy for the (A, B) game.
    Simulate {
        strategy: String,
        a: String,
        b: String,
        /// One question as RELATION:x1,...,xk:element; prints its outcome distribution.
        #[arg(long)]
        question: Option<String>,
    },
    /// Build the strategy of a certificate and check its special form.
    FromCert {
        cert: String,
        #[command(flatten)]
        out: Out,
    },
    /// Schmidt-reduce a strategy to the support of its state.
    Reduce {
        strategy: String,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Subcommand, Debug)]
enum TranslateCmd {
    /// CSP instance to its structure pair.
    Csp2struct {
        csp: String,
        /// Directory receiving A.json and B.json.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Structure pair to a CSP instance.
    Struct2csp {
        a: String,
        b: String,
        #[command(flatten)]
        out: Out,
    },
    /// Empirical model to the CSP of its supports.
    Emp2csp {
        model: String,
        #[command(flatten)]
        out: Out,
    },
    /// Graph pair to the binary constraint system of the homomorphism problem.
    Graph2bcs {
        g: String,
        h: String,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Subcommand, Debug)]
enum BcsCmd {
    /// Check an operator solution, both directly and through its spectral projectors.
    VerifyOp { bcs: String, solution: String },
}

#[derive(Subcommand, Debug)]
enum ContextualityCmd {
    /// Decide strong contextuality; with --witness, check a quantum realisation of the support.
    Check {
        model: String,
        /// Measurements, effects listed in the model's outcome order.
        #[arg(long)]
        witness: Option<String>,
        /// State vector; without it the witness is checked state-independently.
        #[arg(long, requires = "witness")]
        state: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogCmd {
    List,
    Show { id: String },
}

/// Result of one command: exit code, human text and machine record.
struct Outcome {
    code: i32,
    human: String,
    machine: Value,
}

impl Outcome {
    fn report(report: Report, header: String) -> Self {
        let code = if report.pass { EXIT_PASS } else { EXIT_FAIL };
        let machine = serde_json::to_value(&report).expect("report serializes");
        Outcome { code, human: format!("{header}\n{report}"), machine }
    }

    fn document(text: String, kind: &str, out: &Out) -> Result<Self, IoError> {
        let doc: Value = serde_json::from_str(&text).expect("canonical json");
        let human = match &out.out {
            Some(path) => {
                write_text(path, &text)?;
                format!("wrote {kind} to {}\n", path.display())
            }
            None => text,
        };
        Ok(Outcome { code: EXIT_PASS, human, machine: json!({ "kind": kind, "document": doc }) })
    }
}

struct Ctx {
    tol: f64,
    backend: Option<Backend>,
    base: PathBuf,
}

impl Ctx {
    fn matrix(&self, m: Matrix) -> Result<Matrix, IoError> {
        match self.backend {
            None => Ok(m),
            Some(b) => Ok(m.to_backend(b)?),
        }
    }

    fn cert(&self, c: QHomCert) -> Result<QHomCert, IoError> {
        match self.backend {
            None => Ok(c),
            Some(b) if b == c.backend() => Ok(c),
            Some(b) => Ok(c.map_cells(c.dim(), |m| Ok(m.to_backend(b)?))?),
        }
    }

    fn strategy(&self, s: Strategy) -> Result<Strategy, IoError> {
        match self.backend {
            Some(Backend::Float) => Ok(s.to_float()),
            Some(Backend::Exact) if s.backend() == Backend::Float => {
                Err(IoError::Invalid("a float strategy cannot be checked with the exact backend".into()))
            }
            _ => Ok(s),
        }
    }

    fn pvms(&self, p: Pvms) -> Result<Pvms, IoError> {
        if self.backend.is_none() {
            return Ok(p);
        }
        let mut ms = BTreeMap::new();
        for (x, povm) in p.measurements() {
            let mut out = BTreeMap::new();
            for (o, m) in povm {
                out.insert(o.clone(), self.matrix(m.clone())?);
            }
            ms.insert(x.clone(), out);
        }
        Ok(Pvms::new(p.dim(), ms)?)
    }

    fn opsol(&self, s: OperatorSolution) -> Result<OperatorSolution, IoError> {
        let ops = s.operators.into_iter().map(|(k, m)| Ok((k, self.matrix(m)?))).collect::<Result<_, IoError>>()?;
        Ok(OperatorSolution::new(s.dim, ops)?)
    }

    fn structure(&self, r: &str) -> Result<Structure, IoError> {
        load_structure(r, &self.base)
    }

    fn graph(&self, r: &str) -> Result<Graph, IoError> {
        load(r, &self.base)
    }
}

/// Tolerance for float comparisons: `QMONAD_TOL` if set, else the library default.
pub fn tolerance() -> Result<f64, String> {
    match std::env::var("QMONAD_TOL") {
        Err(_) => Ok(DEFAULT_TOL),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t >= 0.0 && t.is_finite() => Ok(t),
            _ => Err(format!("QMONAD_TOL must be a non-negative number, got {s:?}")),
        },
    }
}

/// Runs one command line (including the program name) and returns the exit code and output text.
pub fn dispatch<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            return (code, e.render().to_string());
        }
    };
    let tol = match tolerance() {
        Ok(t) => t,
        Err(msg) => return (EXIT_INPUT, format!("error: {msg}\n")),
    };
    let ctx = Ctx {
        tol,
        backend: cli.backend.map(|b| match b {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Float => Backend::Float,
        }),
        base: Path::new(".").to_path_buf(),
    };
    match run(&ctx, cli.command) {
        Ok(o) => {
            let text = match cli.format {
                Format::Human => o.human,
                Format::Machine => format!("{}\n", serde_json::to_string_pretty(&o.machine).expect("json")),
            };
            (o.code, text)
        }
        Err(e) => {
            let text = match cli.format {
                Format::Human => format!("error: {e}\n"),
                Format::Machine => format!("{}\n", json!({ "error": e.to_string() })),
            };
            (EXIT_INPUT, text)
        }
    }
}

fn run(ctx: &Ctx, command: Command) -> Result<Outcome, IoError> {
    match command {
        Command::Hom(c) => hom(ctx, c),
        Command::Qhom(c) => qhom(ctx, c),
        Command::Game(c) => game(ctx, c),
        Command::Translate(c) => translate(ctx, c),
        Command::Bcs(BcsCmd::VerifyOp { bcs, solution }) => {
            let bcs: Bcs = load(&bcs, &ctx.base)?;
            let sol = ctx.opsol(load(&solution, &ctx.base)?)?;
            let mut report = verify_operator_solution(&bcs, &sol, ctx.tol)?;
            if report.pass {
                let pvms = crate::translations::operator_to_projectors(&sol, ctx.tol)?;
                report.extend(bcs_quantum_solution_verify(&bcs, &pvms, ctx.tol)?);
            }
            Ok(Outcome::report(report, format!("operator solution, dimension {}", sol.dim)))
        }
        Command::Contextuality(ContextualityCmd::Check { model, witness, state }) => contextuality(ctx, &model, witness, state),
        Command::Catalog(c) => catalog(c),
    }
}

fn hom(ctx: &Ctx, c: HomCmd) -> Result<Outcome, IoError> {
    match c {
        HomCmd::Find { a, b } => {
            let (sa, sb) = (ctx.structure(&a)?, ctx.structure(&b)?);
            Ok(match find_homomorphism(&sa, &sb)? {
                Some(f) => {
                    let map: Value = serde_json::from_str(&hom_map_to_json(&f, &sa, &sb)).expect("json");
                    let mut human = String::from("Found\n");
                    for x in 0..sa.size() {
                        human.push_str(&format!("  {} -> {}\n", sa.name(x), sb.name(f.apply(x))));
                    }
                    Outcome { code: EXIT_PASS, human, machine: json!({ "found": true, "map": map["map"] }) }
                }
                None => Outcome { code: EXIT_FAIL, human: "Absent\n".into(), machine: json!({ "found": false }) },
            })
        }
        HomCmd::Check { a, b, map } => {
            let (sa, sb) = (ctx.structure(&a)?, ctx.structure(&b)?);
            let f = load_hom_map(&map, &ctx.base, &sa, &sb)?;
            let mut report = Report::new();
            for (rel, t) in sa.tuples() {
                let image = f.apply_tuple(t);
                if !sb.contains(rel, &image) {
                    let name = &sa.signature().relations()[rel].name;
                    report.push(
                        Condition::Homomorphism,
                        format!("{name}{}", sa.format_tuple(t)),
                        format!("image {name}{} is not in the target", sb.format_tuple(&image)),
                    );
                }
            }
            Ok(Outcome::report(report, "homomorphism check".into()))
        }
    }
}

/// Path references only make sense next to the file that names them.
fn portable(r: StructureRef) -> StructureRef {
    match r {
        StructureRef::Named(n) if n.starts_with("catalog:") => StructureRef::Named(n),
        _ => StructureRef::Inline,
    }
}

fn qhom(ctx: &Ctx, c: QhomCmd) -> Result<Outcome, IoError> {
    match c {
        QhomCmd::Verify { cert } => {
            let file = load_cert(&cert, &ctx.base)?;
            let c = ctx.cert(file.cert)?;
            let header = format!(
                "certificate of dimension {} ({} backend), {} -> {} elements",
                c.dim(),
                c.backend(),
                c.source().size(),
                c.target().size()
            );
            Ok(Outcome::report(verify_qhom(&c, ctx.tol), header))
        }
        QhomCmd::Compose { c1, c2, out } => {
            let f1 = load_cert(&c1, &ctx.base)?;
            let f2 = load_cert(&c2, &ctx.base)?;
            let h = ctx.cert(f1.cert)?;
            let k = ctx.cert(f2.cert)?;
            for (name, c) in [("first", &h), ("second", &k)] {
                let r = verify_qhom(c, ctx.tol);
                if !r.pass {
                    return Ok(Outcome::report(r, format!("{name} certificate does not verify")));
                }
            }
            let composite = kleisli_compose(&h, &k, ctx.tol)?;
            let report = verify_qhom(&composite, ctx.tol);
            if !report.pass {
                return Ok(Outcome::report(report, "composite does not verify".into()));
            }
            let file = CertFile { cert: composite, source: portable(f1.source), target: portable(f2.target) };
            Outcome::document(cert_to_json(&file), "certificate", &out)
        }
    }
}

fn parse_question(spec: &str) -> Result<Question, IoError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [relation, tuple, element] = parts.as_slice() else {
        return Err(IoError::Invalid(format!("question {spec:?} is not RELATION:x1,...,xk:element")));
    };
    Ok(Question {
        relation: relation.to_string(),
        tuple: tuple.split(',').map(str::to_string).collect(),
        element: element.to_string(),
    })
}

fn game(ctx: &Ctx, c: GameCmd) -> Result<Outcome, IoError> {
    match c {
        GameCmd::Simulate { strategy, a, b, question } => {
            let s = ctx.strategy(load(&strategy, &ctx.base)?)?;
            let (sa, sb) = (ctx.structure(&a)?, ctx.structure(&b)?);
            if let Some(q) = question {
                return simulate_question(ctx, &s, &sa, &sb, &parse_question(&q)?);
            }
            let report = check_perfect(&s, &sa, &sb, ctx.tol)?;
            let (min, mean) = winning_probability(&s, &sa, &sb, ctx.tol)?;
            let header = format!("strategy {}x{}: minimum winning probability {min}, uniform average {mean}", s.dim_a(), s.dim_b());
            let mut o = Outcome::report(report, header);
            o.machine = json!({ "min": min.to_string(), "mean": mean.to_string(), "report": o.machine });
            Ok(o)
        }
        GameCmd::FromCert { cert, out } => {
            let file = load_cert(&cert, &ctx.base)?;
            let c = ctx.cert(file.cert)?;
            let qh = verify_qhom(&c, ctx.tol);
            if !qh.pass {
                return Ok(Outcome::report(qh, "certificate does not verify".into()));
            }
            let s = strategy_from_cert(&c, ctx.tol)?;
            let special = verify_special_form(&s, c.target(), ctx.tol);
            let mut report = special.report;
            report.extend(check_perfect(&s, c.source(), c.target(), ctx.tol)?);
            if !report.pass {
                return Ok(Outcome::report(report, "derived strategy fails its checks".into()));
            }
            Outcome::document(s.to_json(), "strategy", &out)
        }
        GameCmd::Reduce { strategy, out } => {
            let s = ctx.strategy(load(&strategy, &ctx.base)?)?;
            let r = schmidt_reduce(&s, ctx.tol)?;
            let mut o = Outcome::document(r.to_json(), "strategy", &out)?;
            o.human = format!("reduced {}x{} to {}x{}\n{}", s.dim_a(), s.dim_b(), r.dim_a(), r.dim_b(), o.human);
            Ok(o)
        }
    }
}

fn simulate_question(ctx: &Ctx, s: &Strategy, a: &Structure, b: &Structure, q: &Question) -> Result<Outcome, IoError> {
    let (rel, _) = a.relation_by_name(&q.relation)?;
    let ids = q.tuple.iter().map(|x| a.element(x)).collect::<Result<Vec<_>, _>>()?;
    if !a.contains(rel, &ids) {
        return Err(IoError::Invalid(format!("{}({}) is not a tuple of the source", q.relation, q.tuple.join(","))));
    }
    a.element(&q.element)?;
    let (brel, _) = b.relation_by_name(&q.relation)?;
    let mut report = Report::new();
    let mut human = format!("question {}({}) / {}\n", q.relation, q.tuple.join(","), q.element);
    let mut rows = Vec::new();
    for ys in crate::translations::tuples(b.size(), ids.len()) {
        for y in 0..b.size() {
            let ys_names: Vec<String> = ys.iter().map(|&i| b.name(i).to_string()).collect();
            let p = outcome_probability(s, q, &ys_names, b.name(y))?;
            if p.is_zero(ctx.tol) {
                continue;
            }
            let consistent = q.tuple.iter().zip(&ys).all(|(x, &yi)| x != &q.element || yi == y);
            let wins = b.contains(brel, &ys) && consistent;
            if !wins {
                report.push(Condition::Qs1, format!("({}) / {}", ys_names.join(","), b.name(y)), format!("losing answer has probability {p}"));
            }
            human.push_str(&format!("  ({}) / {}: {p}{}\n", ys_names.join(","), b.name(y), if wins { "" } else { "  LOSS" }));
            rows.push(json!({ "alice": ys_names, "bob": b.name(y), "p": p.to_string(), "wins": wins }));
        }
    }
    let code = if report.pass { EXIT_PASS } else { EXIT_FAIL };
    Ok(Outcome { code, human, machine: json!({ "distribution": rows, "report": report }) })
}

fn translate(ctx: &Ctx, c: TranslateCmd) -> Result<Outcome, IoError> {
    match c {
        TranslateCmd::Csp2struct { csp, out_dir } => {
            let k: CspInstance = load(&csp, &ctx.base)?;
            let (a, b) = csp_to_pair(&k)?;
            let (ta, tb) = (a.to_json(), b.to_json());
            let machine = json!({
                "A": serde_json::from_str::<Value>(&ta).expect("json"),
                "B": serde_json::from_str::<Value>(&tb).expect("json"),
            });
            let human = match out_dir {
                Some(dir) => {
                    write_text(&dir.join("A.json"), &ta)?;
                    write_text(&dir.join("B.json"), &tb)?;
                    format!("wrote A.json and B.json to {}\n", dir.display())
                }
                None => format!("A:\n{ta}B:\n{tb}"),
            };
            Ok(Outcome { code: EXIT_PASS, human, machine })
        }
        TranslateCmd::Struct2csp { a, b, out } => {
            let k = pair_to_csp(&ctx.structure(&a)?, &ctx.structure(&b)?)?;
            Outcome::document(k.to_json(), "csp", &out)
        }
        TranslateCmd::Emp2csp { model, out } => {
            let e: EmpiricalModel = load(&model, &ctx.base)?;
            Outcome::document(empirical_to_csp(&e)?.to_json(), "csp", &out)
        }
        TranslateCmd::Graph2bcs { g, h, out } => {
            let bcs = graph_pair_to_bcs(&ctx.graph(&g)?, &ctx.graph(&h)?);
            Outcome::document(bcs.to_json(), "bcs", &out)
        }
    }
}

fn contextuality(ctx: &Ctx, model: &str, witness: Option<String>, state: Option<String>) -> Result<Outcome, IoError> {
    let e: EmpiricalModel = load(model, &ctx.base)?;
    let strong = is_strongly_contextual(&e)?;
    let verdict = if strong { "strongly contextual" } else { "not strongly contextual" };
    let Some(w) = witness else {
        let code = if strong { EXIT_PASS } else { EXIT_FAIL };
        return Ok(Outcome { code, human: format!("{verdict}\n"), machine: json!({ "stronglyContextual": strong }) });
    };
    let pvms = ctx.pvms(load_pvms(&w, &ctx.base, &e.outcomes)?)?;
    let report = match state {
        Some(p) => {
            let psi = ctx.matrix(load(&p, &ctx.base)?)?;
            check_state_witness(&e, &psi, &pvms, ctx.tol)?
        }
        None => check_state_independent_witness(&e, &pvms, ctx.tol)?,
    };
    let mut o = Outcome::report(report, format!("{verdict}; witness of dimension {}:", pvms.dim()));
    o.machine = json!({ "stronglyContextual": strong, "report": o.machine });
    Ok(o)
}

fn support_table(e: &EmpiricalModel) -> String {
    let mut out = String::new();
    for c in &e.contexts {
        out.push_str(&format!("context {{{}}}\n", c.members.join(", ")));
        for os in crate::translations::tuples(e.outcomes.len(), c.members.len()) {
            let labels: Vec<&str> = os.iter().map(|&i| e.outcomes[i].as_str()).collect();
            let mark = u8::from(c.support.contains(&labels.iter().map(|s| s.to_string()).collect::<Vec<_>>()));
            out.push_str(&format!("  {}  {mark}\n", labels.join(" ")));
        }
    }
    out
}

fn catalog(c: CatalogCmd) -> Result<Outcome, IoError> {
    match c {
        CatalogCmd::List => {
            let entries = catalog_list();
            let width = entries.iter().map(|(id, _, _)| id.len()).max().unwrap_or(0);
            let human = entries.iter().map(|(id, kind, note)| format!("{id:width$}  {:<17} {note}\n", kind.to_string())).collect();
            let machine = entries.iter().map(|(id, kind, note)| json!({ "id": id, "kind": kind.to_string(), "note": note })).collect();
            Ok(Outcome { code: EXIT_PASS, human, machine: Value::Array(machine) })
        }
        CatalogCmd::Show { id } => {
            let entry = catalog_get(&id)?;
            let text = crate::io::payload_to_json(&entry.payload);
            let body = match &entry.payload {
                Payload::Empirical(e) => support_table(e),
                _ => text.clone(),
            };
            let human = format!("{} ({}): {}\n{body}", entry.id, entry.kind, entry.note);
            let doc: Value = serde_json::from_str(&text).expect("json");
            Ok(Outcome { code: EXIT_PASS, human, machine: json!({ "id": entry.id, "kind": entry.kind.to_string(), "document": doc }) })
        }
    }
}
