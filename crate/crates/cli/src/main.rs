//! `cyl`: cylindrical products, exponential graphs, homomorphism queries and duality checks.
//!
//! Decision commands exit 0 for yes and 2 for no; every error exits 1 with a JSON object
//! `{"error": kind, "message": text}` on stderr.

mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cylgraph::battery::{battery, symmetric_battery};
use cylgraph::catalog;
use cylgraph::construct::{cyl_product, cyl_product_symmetric, exponential_with, ExpoOptions};
use cylgraph::cylinder::NepsKind;
use cylgraph::duality::{check_duality, check_duality_symmetric, is_lower_closed, is_upper_closed, Duality, ROUND_TRIP_LIMIT};
use cylgraph::hom::{HomQuery, Mode, Semantics};
use cylgraph::iso::isomorphism;
use cylgraph::{Error, Perm, PermGroup, Result};
use serde_json::{json, Value};

use crate::io::{emit, emit_json, hom_json, load_cylinders, load_graph, load_json};

#[derive(Parser)]
#[command(name = "cyl", version, about = "Cylindrical graph constructions and homomorphism duality")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// G ⊠ C
    Product {
        #[command(flatten)]
        io: GraphCyl,
        /// Include blow-ups and provenance.
        #[arg(long)]
        trace: bool,
    },
    /// [C, H]
    Expo {
        #[arg(long)]
        cylinders: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        symmetric: bool,
        /// Keep isolated orbit representatives.
        #[arg(long)]
        keep_isolated: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Homomorphism queries.
    Hom {
        #[command(subcommand)]
        action: HomAction,
    },
    /// Duality reports.
    Duality {
        #[command(subcommand)]
        action: DualityAction,
    },
    /// Closedness and tightness predicates.
    Closed {
        #[command(subcommand)]
        action: ClosedAction,
    },
    /// Named constructions.
    Catalog {
        #[command(subcommand)]
        item: CatalogItem,
    },
    /// Emit G ⊠ C, the H-Hom instance equivalent to the [C,H]-Hom instance G.
    Reduce {
        #[command(flatten)]
        io: GraphCyl,
        /// Target H (validated and recorded; the emitted instance asks for G ⊠ C -> H).
        #[arg(long)]
        target: String,
    },
    /// Graph isomorphism.
    Iso {
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
    },
    /// Graphviz DOT export.
    ExportDot {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value = "G")]
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GraphCyl {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    cylinders: String,
    #[arg(long)]
    symmetric: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct HomArgs {
    #[arg(long)]
    source: String,
    #[arg(long)]
    target: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Plain)]
    mode: ModeArg,
    /// Count undirected edges once (default: when both graphs are symmetric).
    #[arg(long, value_enum)]
    semantics: Option<SemanticsArg>,
    /// Search-node budget (overrides CYL_NODE_BUDGET).
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Subcommand)]
enum HomAction {
    Exists(HomArgs),
    Count(HomArgs),
    List {
        #[command(flatten)]
        args: HomArgs,
        #[arg(long, default_value_t = 100)]
        limit: usize,
    },
}

#[derive(Subcommand)]
enum DualityAction {
    /// One triple from files, or a seeded battery when no files are given.
    Check {
        #[arg(long, requires_all = ["cylinders", "target"])]
        graph: Option<String>,
        #[arg(long)]
        cylinders: Option<String>,
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        symmetric: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
}

#[derive(Subcommand)]
enum ClosedAction {
    /// [C, H ⊠ C] -> H
    Lower {
        #[arg(long)]
        cylinders: String,
        #[arg(long)]
        graph: String,
    },
    /// G -> [C, G] ⊠ C
    Upper {
        #[arg(long)]
        cylinders: String,
        #[arg(long)]
        graph: String,
    },
    /// Equal hom counts on both sides of the duality for one (G, H).
    Tight {
        #[arg(long)]
        cylinders: String,
        #[arg(long)]
        graph: String,
        #[arg(long)]
        target: String,
    },
}

#[derive(Subcommand)]
enum CatalogItem {
    /// The Petersen graph as K5 ⊠ C.
    Petersen(Out),
    /// The n-th power: vertices joined by a walk of length exactly n.
    Power(GraphN),
    /// Every edge replaced by a path of length n.
    Subdivision(GraphN),
    /// The m-th power of the n-th subdivision, G^{m/n}.
    Fracpower {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// H ⊠ C_kind(G), the NEPS product of H and G.
    Neps {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        other: String,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Derived graph of a voltage graph; the Z5 Petersen example without arguments.
    Voltage {
        #[arg(long, requires = "voltages")]
        graph: Option<String>,
        /// JSON `{"group": {"degree", "generators"}, "voltages": [[images], ...]}`, one per arc.
        #[arg(long)]
        voltages: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Zig-zag product of a vertex-transitive G with H.
    Zigzag(TwoGraphs),
    /// Replacement product of G with H.
    Replacement(TwoGraphs),
    /// Line graph with a loop at every vertex.
    Linegraph(GraphOnly),
    /// G ∇ H: every vertex of G adjacent to every vertex of H.
    Join(TwoGraphs),
    /// G with one added vertex adjacent to all others.
    Universal(GraphOnly),
    /// Edges labeled d are deleted, c contracted.
    Minor(GraphOnly),
}

#[derive(Args)]
struct Out {
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GraphN {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    n: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GraphOnly {
    #[arg(long)]
    graph: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TwoGraphs {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    other: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Plain,
    Labeled,
    Gamma,
}

#[derive(Clone, Copy, ValueEnum)]
enum SemanticsArg {
    Arcs,
    Pairs,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Cartesian,
    Categorical,
    Strong,
    Lexicographic,
}

/// What a successful command reports back.
enum Verdict {
    Done,
    Yes,
    No,
}

fn decide(b: bool) -> Verdict {
    if b {
        Verdict::Yes
    } else {
        Verdict::No
    }
}

fn query<'a>(a: &HomArgs, s: &'a cylgraph::Graph, t: &'a cylgraph::Graph) -> HomQuery<'a> {
    let mode = match a.mode {
        ModeArg::Plain => Mode::Plain,
        ModeArg::Labeled => Mode::Labeled,
        ModeArg::Gamma => Mode::Gamma,
    };
    let mut q = HomQuery::new(s, t, mode);
    if let Some(sem) = a.semantics {
        q = q.semantics(match sem {
            SemanticsArg::Arcs => Semantics::Arcs,
            SemanticsArg::Pairs => Semantics::Pairs,
        });
    }
    if let Some(b) = a.budget {
        q = q.budget(b);
    }
    q
}

fn run(cli: Cli) -> Result<Verdict> {
    match cli.command {
        Command::Product { io, trace } => {
            let (g, set) = (load_graph(&io.graph)?, load_cylinders(&io.cylinders)?);
            let tr = if io.symmetric { cyl_product_symmetric(&g, &set)? } else { cyl_product(&g, &set)? };
            let v = if trace { tr.to_json(&g) } else { tr.product.to_json() };
            emit_json(&v, io.output.as_deref())?;
        }
        Command::Expo { cylinders, target, symmetric, keep_isolated, output } => {
            let (set, h) = (load_cylinders(&cylinders)?, load_graph(&target)?);
            let e = exponential_with(&set, &h, ExpoOptions { symmetric, keep_isolated })?;
            emit_json(&e.graph.to_json(), output.as_deref())?;
        }
        Command::Hom { action } => return hom(action),
        Command::Duality { action: DualityAction::Check { graph, cylinders, target, symmetric, seed, count } } => {
            if let (Some(g), Some(c), Some(h)) = (graph, cylinders, target) {
                let (g, set, h) = (load_graph(&g)?, load_cylinders(&c)?, load_graph(&h)?);
                let r = if symmetric { check_duality_symmetric(&g, &set, &h)? } else { check_duality(&g, &set, &h)? };
                emit_json(&serde_json::to_value(&r).expect("reports serialize"), None)?;
                let ok = if symmetric {
                    r.exists_equiv && r.count_product_side >= r.count_exponential_side
                } else {
                    r.theorem_holds()
                };
                return Ok(decide(ok));
            }
            return sweep(seed, count, symmetric);
        }
        Command::Closed { action } => {
            let (b, key) = match action {
                ClosedAction::Lower { cylinders, graph } => {
                    (is_lower_closed(&load_cylinders(&cylinders)?, &load_graph(&graph)?)?, "lower_closed")
                }
                ClosedAction::Upper { cylinders, graph } => {
                    (is_upper_closed(&load_cylinders(&cylinders)?, &load_graph(&graph)?)?, "upper_closed")
                }
                ClosedAction::Tight { cylinders, graph, target } => {
                    let d = Duality::new(&load_graph(&graph)?, &load_cylinders(&cylinders)?, &load_graph(&target)?)?;
                    (d.report(ROUND_TRIP_LIMIT)?.tight_on_g, "tight")
                }
            };
            emit_json(&json!({ key: b }), None)?;
            return Ok(decide(b));
        }
        Command::Catalog { item } => catalog_item(item)?,
        Command::Reduce { io, target } => {
            let (g, set, h) = (load_graph(&io.graph)?, load_cylinders(&io.cylinders)?, load_graph(&target)?);
            if io.symmetric && !h.is_symmetric() {
                return Err(Error::Symmetry("target graph is not symmetric".into()));
            }
            let tr = if io.symmetric { cyl_product_symmetric(&g, &set)? } else { cyl_product(&g, &set)? };
            emit_json(&tr.product.to_json(), io.output.as_deref())?;
        }
        Command::Iso { first, second } => {
            let (a, b) = (load_graph(&first)?, load_graph(&second)?);
            let found = isomorphism(&a, &b);
            let mapping: Option<serde_json::Map<String, Value>> = found
                .as_ref()
                .map(|m| m.vmap.iter().enumerate().map(|(v, &x)| (a.name(v).to_string(), json!(b.name(x)))).collect());
            emit_json(&json!({ "isomorphic": found.is_some(), "mapping": mapping }), None)?;
            return Ok(decide(found.is_some()));
        }
        Command::ExportDot { graph, name, output } => emit(&load_graph(&graph)?.to_dot(&name), output.as_deref())?,
    }
    Ok(Verdict::Done)
}

fn hom(action: HomAction) -> Result<Verdict> {
    match action {
        HomAction::Exists(a) => {
            let (s, t) = (load_graph(&a.source)?, load_graph(&a.target)?);
            let b = query(&a, &s, &t).exists()?;
            emit_json(&json!({ "exists": b }), None)?;
            Ok(decide(b))
        }
        HomAction::Count(a) => {
            let (s, t) = (load_graph(&a.source)?, load_graph(&a.target)?);
            // u128 does not fit JSON numbers in general
            let c = query(&a, &s, &t).count()?;
            emit_json(&json!({ "count": c.to_string() }), None)?;
            Ok(Verdict::Done)
        }
        HomAction::List { args, limit } => {
            let (s, t) = (load_graph(&args.source)?, load_graph(&args.target)?);
            let mut out = Vec::new();
            query(&args, &s, &t).for_each(|h| {
                out.push(hom_json(h, &s, &t));
                out.len() < limit
            })?;
            emit_json(&Value::Array(out), None)?;
            Ok(Verdict::Done)
        }
    }
}

fn sweep(seed: u64, count: usize, symmetric: bool) -> Result<Verdict> {
    let triples = if symmetric { symmetric_battery(seed, count)? } else { battery(seed, count)? };
    let mut failures = Vec::new();
    let mut round_trips = 0;
    for (i, t) in triples.iter().enumerate() {
        let r = if symmetric { check_duality_symmetric(&t.g, &t.set, &t.h)? } else { check_duality(&t.g, &t.set, &t.h)? };
        round_trips += r.round_trips_checked;
        let ok = r.exists_equiv && r.count_product_side >= r.count_exponential_side && r.retraction_section_identity;
        if !ok {
            failures.push(json!({ "index": i, "cylinders": t.cylinders, "report": r }));
        }
    }
    emit_json(
        &json!({
            "seed": seed,
            "triples": triples.len(),
            "symmetric": symmetric,
            "round_trips_checked": round_trips,
            "failures": failures,
        }),
        None,
    )?;
    Ok(decide(failures.is_empty()))
}

fn voltage_input(path: &str) -> Result<(Vec<Perm>, PermGroup)> {
    let v = load_json(path)?;
    let group: PermGroup = serde_json::from_value(v.get("group").cloned().unwrap_or(Value::Null))
        .map_err(|e| Error::Schema(format!("voltage group: {e}")))?;
    let volts: Vec<Perm> = serde_json::from_value(v.get("voltages").cloned().unwrap_or(Value::Null))
        .map_err(|e| Error::Schema(format!("voltages: {e}")))?;
    Ok((volts, group))
}

fn catalog_item(item: CatalogItem) -> Result<()> {
    let (g, out) = match item {
        CatalogItem::Petersen(o) => (catalog::petersen()?, o.output),
        CatalogItem::Power(a) => (catalog::graph_power(&load_graph(&a.graph)?, a.n)?, a.output),
        CatalogItem::Subdivision(a) => (catalog::subdivision(&load_graph(&a.graph)?, a.n)?, a.output),
        CatalogItem::Fracpower { graph, m, n, output } => (catalog::fractional_power(&load_graph(&graph)?, m, n)?, output),
        CatalogItem::Neps { graph, other, kind, output } => {
            let kind = match kind {
                KindArg::Cartesian => NepsKind::Cartesian,
                KindArg::Categorical => NepsKind::Categorical,
                KindArg::Strong => NepsKind::Strong,
                KindArg::Lexicographic => NepsKind::Lexicographic,
            };
            (catalog::neps_product(&load_graph(&graph)?, &load_graph(&other)?, kind)?, output)
        }
        CatalogItem::Voltage { graph, voltages, output } => {
            let (g, volts, group) = match (graph, voltages) {
                (Some(g), Some(v)) => {
                    let (volts, group) = voltage_input(&v)?;
                    (load_graph(&g)?, volts, group)
                }
                _ => catalog::petersen_voltage_graph()?,
            };
            (catalog::voltage_derived(&g, &volts, &group)?, output)
        }
        CatalogItem::Zigzag(a) => {
            let rg = catalog::RotationGraph::new(&load_graph(&a.graph)?)?;
            (catalog::zigzag(&rg, &load_graph(&a.other)?)?, a.output)
        }
        CatalogItem::Replacement(a) => {
            let rg = catalog::RotationGraph::new(&load_graph(&a.graph)?)?;
            (catalog::replacement(&rg, &load_graph(&a.other)?)?, a.output)
        }
        CatalogItem::Linegraph(a) => (catalog::looped_line_graph(&load_graph(&a.graph)?)?, a.output),
        CatalogItem::Join(a) => (catalog::join(&load_graph(&a.graph)?, &load_graph(&a.other)?)?, a.output),
        CatalogItem::Universal(a) => (catalog::add_universal(&load_graph(&a.graph)?)?, a.output),
        CatalogItem::Minor(a) => (catalog::minor(&load_graph(&a.graph)?)?, a.output),
    };
    emit_json(&g.to_json(), out.as_deref())
}

fn fail(kind: &str, message: &str) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "message": message }));
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("UsageError", e.to_string().trim()),
    };
    match run(cli) {
        Ok(Verdict::Done | Verdict::Yes) => ExitCode::SUCCESS,
        Ok(Verdict::No) => ExitCode::from(2),
        Err(e) => fail(e.kind(), &e.to_string()),
    }
}
