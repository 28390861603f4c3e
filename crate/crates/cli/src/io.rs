//! Loading inputs and writing canonical outputs.

use std::io::Write;
use std::path::Path;

use cylgraph::cylinder::CylinderSet;
use cylgraph::hom::Hom;
use cylgraph::{Error, Graph, Result};
use serde_json::{json, Value};

/// A graph argument: a JSON file, or a shorthand `cycle:N`, `complete:N`, `path:N`
/// (symmetric) or `loop`.
pub fn load_graph(arg: &str) -> Result<Graph> {
    if !Path::new(arg).exists() {
        if let Some(g) = shorthand(arg)? {
            return Ok(g);
        }
    }
    Graph::from_json_str(&read(arg)?)
}

fn shorthand(arg: &str) -> Result<Option<Graph>> {
    if arg == "loop" {
        return Ok(Some(Graph::from_pairs(1, &[(0, 0)], false)));
    }
    let Some((kind, n)) = arg.split_once(':') else { return Ok(None) };
    let n: usize = n.parse().map_err(|_| Error::Usage(format!("bad size in {arg:?}")))?;
    Ok(match kind {
        "cycle" => Some(Graph::cycle(n)),
        "complete" => Some(Graph::complete(n)),
        "path" => Some(Graph::path(n)),
        _ => None,
    })
}

/// A cylinder-set argument: a JSON file, or `builtin:NAME[:N]` for parameter-free builtins
/// and paths.
pub fn load_cylinders(arg: &str) -> Result<CylinderSet> {
    if let Some(rest) = arg.strip_prefix("builtin:").filter(|_| !Path::new(arg).exists()) {
        let mut parts = rest.splitn(2, ':');
        let name = parts.next().unwrap_or_default();
        let mut v = json!({ "builtin": name });
        if let Some(n) = parts.next() {
            let n: u64 = n.parse().map_err(|_| Error::Usage(format!("bad size in {arg:?}")))?;
            v["n"] = json!(n);
        }
        return CylinderSet::from_json_value(&v);
    }
    let v: Value = serde_json::from_str(&read(arg)?).map_err(|e| Error::Schema(format!("{arg}: {e}")))?;
    CylinderSet::from_json_value(&v)
}

pub fn load_json(arg: &str) -> Result<Value> {
    serde_json::from_str(&read(arg)?).map_err(|e| Error::Schema(format!("{arg}: {e}")))
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read {path}: {e}")))
}

/// Writes `text` to `out`, or stdout when absent.
pub fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| Error::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                // a closed pipe (`cyl ... | head`) is not an error
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Usage(format!("cannot write stdout: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

/// Pretty JSON; `serde_json::Value` objects keep keys sorted.
pub fn emit_json(v: &Value, out: Option<&Path>) -> Result<()> {
    emit(&serde_json::to_string_pretty(v).expect("values serialize"), out)
}

/// A homomorphism by vertex and edge ids.
pub fn hom_json(h: &Hom, g: &Graph, t: &Graph) -> Value {
    let vertices: serde_json::Map<String, Value> =
        h.vmap.iter().enumerate().map(|(v, &x)| (g.name(v).to_string(), json!(t.name(x)))).collect();
    let edges: serde_json::Map<String, Value> =
        h.emap.iter().enumerate().map(|(e, &f)| (g.edge(e).id.clone(), json!(t.edge(f).id))).collect();
    let mut v = json!({ "vertices": vertices, "edges": edges });
    if let Some(alphas) = &h.alphas {
        let a: serde_json::Map<String, Value> = alphas
            .iter()
            .enumerate()
            .filter_map(|(u, a)| a.as_ref().map(|p| (g.name(u).to_string(), serde_json::to_value(p).expect("perms serialize"))))
            .collect();
        v["alphas"] = Value::Object(a);
    }
    v
}
