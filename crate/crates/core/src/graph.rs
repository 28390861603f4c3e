//! Labeled directed multigraphs, marked graphs, amalgams, symmetric pairings and JSON/DOT I/O.
//!
//! Vertices and edges are addressed by dense indices internally and by opaque string ids
//! externally. A symmetric graph is a directed graph plus an involutive pairing of its arcs:
//! an arc `u -> v` labeled `L` pairs with an arc `v -> u` labeled `rev(L)`, and an undirected
//! loop is two directed loops paired with each other.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{Perm, PermGroup};

/// A (Γ,m)-label `(pre, cyl, post)`; `cyl` is 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GammaLabel {
    pub pre: Perm,
    pub cyl: usize,
    pub post: Perm,
}

/// Edge label: either a plain name (ordinary graphs use `"1"`) or a (Γ,m)-label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Name(String),
    Gamma(GammaLabel),
}

impl Label {
    /// The label of ordinary graphs.
    pub fn plain() -> Label {
        Label::Name("1".into())
    }

    pub fn name(s: impl Into<String>) -> Label {
        Label::Name(s.into())
    }

    pub fn gamma(pre: Perm, cyl: usize, post: Perm) -> Label {
        Label::Gamma(GammaLabel { pre, cyl, post })
    }

    /// `(id, j, id)` of degree k.
    pub fn untwisted(k: usize, cyl: usize) -> Label {
        Label::gamma(Perm::identity(k), cyl, Perm::identity(k))
    }

    pub fn as_gamma(&self) -> Option<&GammaLabel> {
        match self {
            Label::Gamma(g) => Some(g),
            Label::Name(_) => None,
        }
    }

    /// Label carried by the twin of an arc: Γ-labels swap their ends, names are unchanged.
    pub fn reversed(&self) -> Label {
        match self {
            Label::Gamma(g) => Label::gamma(g.post.clone(), g.cyl, g.pre.clone()),
            Label::Name(_) => self.clone(),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Name(s) => write!(f, "{s}"),
            Label::Gamma(g) => write!(f, "({},{},{})", g.pre, g.cyl, g.post),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub label: Label,
}

/// A finite labeled directed multigraph.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    edge_ids: HashMap<String, usize>,
    twin: Option<Vec<usize>>,
    stabilizers: Option<Vec<Vec<Perm>>>,
}

impl PartialEq for Graph {
    /// Structural equality on ids: same vertex ids, same edges by id, same symmetric flag.
    fn eq(&self, other: &Graph) -> bool {
        if self.names.len() != other.names.len() || self.edges.len() != other.edges.len() {
            return false;
        }
        if self.is_symmetric_flagged() != other.is_symmetric_flagged() {
            return false;
        }
        if self.names.iter().any(|n| !other.index.contains_key(n)) {
            return false;
        }
        self.edges.iter().all(|e| match other.edge_by_id(&e.id) {
            Some(f) => {
                let f = &other.edges[f];
                self.names[e.tail] == other.names[f.tail] && self.names[e.head] == other.names[f.head] && e.label == f.label
            }
            None => false,
        })
    }
}

impl Graph {
    pub fn new() -> Graph {
        Graph::default()
    }

    /// `n` vertices named "0".."n-1" and plain arcs; with `symmetric` every pair becomes two paired arcs.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)], symmetric: bool) -> Graph {
        let mut g = Graph::new();
        for i in 0..n {
            g.add_vertex(i.to_string()).unwrap();
        }
        for &(u, v) in pairs {
            if symmetric {
                g.add_undirected(u, v, Label::plain());
            } else {
                g.add_edge(u, v, Label::plain());
            }
        }
        if symmetric {
            g.make_symmetric().unwrap();
        }
        g
    }

    pub fn cycle(n: usize) -> Graph {
        let pairs: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_pairs(n, &pairs, true)
    }

    pub fn complete(n: usize) -> Graph {
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                pairs.push((i, j));
            }
        }
        Graph::from_pairs(n, &pairs, true)
    }

    /// Path with `n` edges on `n + 1` vertices.
    pub fn path(n: usize) -> Graph {
        let pairs: Vec<(usize, usize)> = (0..n).map(|i| (i, i + 1)).collect();
        Graph::from_pairs(n + 1, &pairs, true)
    }

    pub fn add_vertex(&mut self, name: impl Into<String>) -> Result<usize> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(Error::Schema(format!("duplicate vertex id {name:?}")));
        }
        let v = self.names.len();
        self.index.insert(name.clone(), v);
        self.names.push(name);
        if let Some(st) = &mut self.stabilizers {
            st.push(Vec::new());
        }
        Ok(v)
    }

    /// Adds an arc with a fresh id `e<n>`; clears any pairing.
    pub fn add_edge(&mut self, tail: usize, head: usize, label: Label) -> usize {
        let mut n = self.edges.len();
        let id = loop {
            let id = format!("e{n}");
            if !self.edge_ids.contains_key(&id) {
                break id;
            }
            n += 1;
        };
        self.add_edge_with_id(id, tail, head, label).unwrap()
    }

    pub fn add_edge_with_id(&mut self, id: impl Into<String>, tail: usize, head: usize, label: Label) -> Result<usize> {
        let id = id.into();
        if tail >= self.names.len() || head >= self.names.len() {
            return Err(Error::Schema(format!("edge {id:?} has a dangling endpoint")));
        }
        if self.edge_ids.contains_key(&id) {
            return Err(Error::Schema(format!("duplicate edge id {id:?}")));
        }
        let e = self.edges.len();
        self.edge_ids.insert(id.clone(), e);
        self.edges.push(Edge { id, tail, head, label });
        self.twin = None;
        Ok(e)
    }

    /// Adds `u -> v` with `label` and `v -> u` with the reversed label.
    pub fn add_undirected(&mut self, u: usize, v: usize, label: Label) -> (usize, usize) {
        let rev = label.reversed();
        let a = self.add_edge(u, v, label);
        let b = self.add_edge(v, u, rev);
        (a, b)
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edge_by_id(&self, id: &str) -> Option<usize> {
        self.edge_ids.get(id).copied()
    }

    pub fn is_symmetric_flagged(&self) -> bool {
        self.twin.is_some()
    }

    /// Twin of an arc under the symmetric pairing.
    pub fn twin(&self, e: usize) -> Option<usize> {
        self.twin.as_ref().map(|t| t[e])
    }

    /// The whole pairing, if the graph is flagged symmetric.
    pub fn twin_vec(&self) -> Option<&[usize]> {
        self.twin.as_deref()
    }

    /// Per-vertex stabilizer subgroups; present on exponential graphs with nontrivial Γ.
    pub fn stabilizers(&self) -> Option<&[Vec<Perm>]> {
        self.stabilizers.as_deref()
    }

    pub fn set_stabilizers(&mut self, st: Option<Vec<Vec<Perm>>>) {
        if let Some(s) = &st {
            assert_eq!(s.len(), self.n(), "one stabilizer per vertex");
        }
        self.stabilizers = st;
    }

    /// Number of arc ends at `v` (a loop counts twice).
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().map(|e| (e.tail == v) as usize + (e.head == v) as usize).sum()
    }

    pub fn is_isolated(&self, v: usize) -> bool {
        self.degree(v) == 0
    }

    pub fn label_alphabet(&self) -> BTreeSet<Label> {
        self.edges.iter().map(|e| e.label.clone()).collect()
    }

    /// Out-neighbour lists (one entry per arc).
    pub fn out_lists(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n()];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.tail].push(i);
        }
        out
    }

    /// Arc counts between ordered pairs, ignoring labels.
    pub fn arc_count(&self, u: usize, v: usize) -> usize {
        self.edges.iter().filter(|e| e.tail == u && e.head == v).count()
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.edges.iter().any(|e| e.tail == u && e.head == v)
    }

    /// Computes the reverse pairing; fails if the arc multiset is not symmetric.
    pub fn make_symmetric(&mut self) -> Result<()> {
        let twin = self.pairing(false)?;
        self.twin = Some(twin);
        Ok(())
    }

    /// Drops the pairing, leaving a plain directed graph with the same arcs.
    pub fn forget_symmetry(&mut self) {
        self.twin = None;
    }

    /// True iff a label-respecting reverse pairing of all arcs exists.
    pub fn is_symmetric(&self) -> bool {
        self.pairing(false).is_ok()
    }

    /// Maximal pairing; unpaired arcs are `usize::MAX` when `partial`.
    fn pairing(&self, partial: bool) -> Result<Vec<usize>> {
        let mut groups: BTreeMap<(usize, usize, &Label), Vec<usize>> = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            groups.entry((e.tail, e.head, &e.label)).or_default().push(i);
        }
        let mut twin = vec![usize::MAX; self.edges.len()];
        let revs: BTreeMap<(usize, usize, &Label), Label> =
            groups.keys().map(|k| (*k, k.2.reversed())).collect();
        for (&(t, h, lab), list) in &groups {
            let rev = &revs[&(t, h, lab)];
            if t == h && rev == lab {
                for pair in list.chunks(2) {
                    if pair.len() == 2 {
                        twin[pair[0]] = pair[1];
                        twin[pair[1]] = pair[0];
                    } else if !partial {
                        return Err(Error::Symmetry(format!(
                            "odd number of loops labeled {lab} at {}",
                            self.names[t]
                        )));
                    }
                }
                continue;
            }
            let other = groups.get(&(h, t, rev)).map(|v| v.as_slice()).unwrap_or(&[]);
            if other.len() != list.len() && !partial {
                return Err(Error::Symmetry(format!(
                    "{} arcs {} -> {} labeled {lab} but {} reverse arcs",
                    list.len(),
                    self.names[t],
                    self.names[h],
                    other.len()
                )));
            }
            for (a, b) in list.iter().zip(other) {
                twin[*a] = *b;
                twin[*b] = *a;
            }
        }
        Ok(twin)
    }

    /// Adds a reversed twin for every arc without one and flags the result symmetric.
    pub fn symmetrize(&self) -> Graph {
        let mut g = self.clone();
        let twin = self.pairing(true).expect("partial pairing never fails");
        for (i, t) in twin.iter().enumerate() {
            if *t == usize::MAX {
                let e = &self.edges[i];
                g.add_edge(e.head, e.tail, e.label.reversed());
            }
        }
        g.make_symmetric().expect("symmetrized arcs pair up");
        g
    }

    /// Representative arcs of a symmetric graph: the smaller index of each pair.
    pub fn pair_representatives(&self) -> Vec<usize> {
        match &self.twin {
            Some(t) => (0..self.m()).filter(|&e| e <= t[e]).collect(),
            None => (0..self.m()).collect(),
        }
    }

    /// Induced subgraph on vertex indices (order of `keep` is the new vertex order).
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut g = Graph::new();
        let mut map = vec![usize::MAX; self.n()];
        for &v in keep {
            map[v] = g.add_vertex(self.names[v].clone()).expect("distinct vertices");
        }
        for e in &self.edges {
            if map[e.tail] != usize::MAX && map[e.head] != usize::MAX {
                g.add_edge_with_id(e.id.clone(), map[e.tail], map[e.head], e.label.clone()).unwrap();
            }
        }
        if let Some(st) = &self.stabilizers {
            g.stabilizers = Some(keep.iter().map(|&v| st[v].clone()).collect());
        }
        if self.is_symmetric_flagged() {
            g.make_symmetric().expect("induced subgraph of a symmetric graph is symmetric");
        }
        g
    }

    /// Induced subgraph on vertex ids.
    pub fn induced_subgraph(&self, ids: &[&str]) -> Result<Graph> {
        let keep = ids
            .iter()
            .map(|id| self.vertex(id).ok_or_else(|| Error::Domain(format!("{id:?} is not a vertex"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.induced(&keep))
    }

    /// The graph without its isolated vertices.
    pub fn reduced(&self) -> Graph {
        let keep: Vec<usize> = (0..self.n()).filter(|&v| !self.is_isolated(v)).collect();
        self.induced(&keep)
    }

    /// Same structure with every label replaced by the plain label.
    pub fn erase_labels(&self) -> Graph {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.label = Label::plain();
        }
        g.stabilizers = None;
        if g.is_symmetric_flagged() {
            g.make_symmetric().expect("erasing labels keeps symmetry");
        }
        g
    }

    /// Identifies parallel arcs with equal labels (keeps the first id of each class).
    pub fn merge_parallel(&self) -> Graph {
        let mut g = Graph::new();
        for name in &self.names {
            g.add_vertex(name.clone()).unwrap();
        }
        g.stabilizers = self.stabilizers.clone();
        let mut seen: BTreeSet<(usize, usize, &Label)> = BTreeSet::new();
        for e in &self.edges {
            if seen.insert((e.tail, e.head, &e.label)) {
                g.add_edge_with_id(e.id.clone(), e.tail, e.head, e.label.clone()).unwrap();
            }
        }
        if self.is_symmetric_flagged() {
            g = g.symmetrize();
        }
        g
    }

    /// Vertex quotient: `class[v]` is the new index of `v`, `names` the new vertex ids.
    pub fn quotient(&self, class: &[usize], names: Vec<String>) -> Result<Graph> {
        let mut g = Graph::new();
        for n in names {
            g.add_vertex(n)?;
        }
        for e in &self.edges {
            g.add_edge_with_id(e.id.clone(), class[e.tail], class[e.head], e.label.clone())?;
        }
        if self.is_symmetric_flagged() {
            g.make_symmetric()?;
        }
        Ok(g)
    }

    /// Disjoint union; vertex and edge ids of `other` get `prefix` prepended.
    pub fn disjoint_union(&self, other: &Graph, prefix: &str) -> Graph {
        let mut g = self.clone();
        let off = g.n();
        for name in &other.names {
            g.add_vertex(format!("{prefix}{name}")).expect("prefix keeps ids fresh");
        }
        for e in &other.edges {
            g.add_edge_with_id(format!("{prefix}{}", e.id), e.tail + off, e.head + off, e.label.clone())
                .expect("prefix keeps ids fresh");
        }
        if self.is_symmetric_flagged() && other.is_symmetric_flagged() {
            g.make_symmetric().unwrap();
        }
        g
    }

    /// Same structure with every label rewritten by `f`; the symmetric flag is re-derived.
    pub fn map_labels(&self, f: impl Fn(&Label) -> Result<Label>) -> Result<Graph> {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.label = f(&e.label)?;
        }
        if g.is_symmetric_flagged() {
            g.make_symmetric()?;
        }
        Ok(g)
    }

    /// `G_α`: each label `(p, j, q)` on `u -> v` becomes `(p α_u, j, q α_v)` in composition order
    /// `compose(p, α_u)`.
    pub fn alpha_shift(&self, alpha: &[Perm], gamma: &PermGroup) -> Result<Graph> {
        if alpha.len() != self.n() {
            return Err(Error::Domain("alpha must be total on the vertices".into()));
        }
        if let Some(a) = alpha.iter().find(|a| !gamma.contains(a)) {
            return Err(Error::Domain(format!("{a} is not in the twist group")));
        }
        let mut g = self.clone();
        for e in &mut g.edges {
            let Label::Gamma(l) = &e.label else {
                return Err(Error::Label(format!("edge {} carries a plain label", e.id)));
            };
            e.label = Label::gamma(l.pre.compose(&alpha[e.tail])?, l.cyl, l.post.compose(&alpha[e.head])?);
        }
        if g.is_symmetric_flagged() {
            g.make_symmetric()?;
        }
        Ok(g)
    }

    /// Canonical JSON value (sorted keys, vertices and edges sorted by id).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_json_struct()).expect("graph JSON serializes")
    }

    pub fn to_json_struct(&self) -> GraphJson {
        let mut vertices: Vec<Id> = self.names.iter().cloned().map(Id).collect();
        vertices.sort();
        let mut edges: Vec<EdgeJson> = self
            .edges
            .iter()
            .map(|e| EdgeJson {
                id: Some(e.id.clone()),
                tail: Id(self.names[e.tail].clone()),
                head: Id(self.names[e.head].clone()),
                label: LabelJson::from(&e.label),
            })
            .collect();
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        let stabilizers = self.stabilizers.as_ref().map(|st| {
            st.iter()
                .enumerate()
                .filter(|(_, s)| s.len() > 1)
                .map(|(v, s)| (self.names[v].clone(), s.clone()))
                .collect::<BTreeMap<_, _>>()
        });
        GraphJson { vertices, edges, symmetric: self.is_symmetric_flagged(), stabilizers }
    }

    pub fn from_json_struct(j: &GraphJson) -> Result<Graph> {
        let mut g = Graph::new();
        for v in &j.vertices {
            g.add_vertex(v.0.clone())?;
        }
        for (i, e) in j.edges.iter().enumerate() {
            let t = g.vertex(&e.tail.0).ok_or_else(|| Error::Schema(format!("unknown tail {:?}", e.tail.0)))?;
            let h = g.vertex(&e.head.0).ok_or_else(|| Error::Schema(format!("unknown head {:?}", e.head.0)))?;
            let id = e.id.clone().unwrap_or_else(|| format!("e{i}"));
            g.add_edge_with_id(id, t, h, e.label.to_label()?)?;
        }
        if let Some(st) = &j.stabilizers {
            let mut all = vec![Vec::new(); g.n()];
            for (name, s) in st {
                let v = g.vertex(name).ok_or_else(|| Error::Schema(format!("stabilizer for unknown vertex {name:?}")))?;
                all[v] = s.clone();
            }
            g.stabilizers = Some(all);
        }
        if j.symmetric {
            g.make_symmetric()?;
        }
        Ok(g)
    }

    pub fn from_json_str(s: &str) -> Result<Graph> {
        let j: GraphJson = serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))?;
        Graph::from_json_struct(&j)
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Graph> {
        let j: GraphJson = serde_json::from_value(v.clone()).map_err(|e| Error::Schema(e.to_string()))?;
        Graph::from_json_struct(&j)
    }

    /// Graphviz rendering; symmetric graphs draw one undirected line per pair.
    pub fn to_dot(&self, name: &str) -> String {
        let sym = self.is_symmetric_flagged();
        let (kw, arrow) = if sym { ("graph", "--") } else { ("digraph", "->") };
        let mut out = format!("{kw} \"{}\" {{\n", escape(name));
        for v in &self.names {
            out.push_str(&format!("  \"{}\";\n", escape(v)));
        }
        for e in self.pair_representatives() {
            let e = &self.edges[e];
            out.push_str(&format!(
                "  \"{}\" {arrow} \"{}\" [id=\"{}\", label=\"{}\"];\n",
                escape(&self.names[e.tail]),
                escape(&self.names[e.head]),
                escape(&e.id),
                escape(&e.label.to_string())
            ));
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// A vertex or edge id in JSON: strings, or numbers read as their decimal text.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Id(pub String);

impl Serialize for Id {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Id {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Id, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) => Ok(Id(s)),
            serde_json::Value::Number(n) => Ok(Id(n.to_string())),
            other => Err(serde::de::Error::custom(format!("id must be a string or number, got {other}"))),
        }
    }
}

impl From<String> for Id {
    fn from(s: String) -> Id {
        Id(s)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<Id>,
    pub edges: Vec<EdgeJson>,
    #[serde(default)]
    pub symmetric: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stabilizers: Option<BTreeMap<String, Vec<Perm>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub tail: Id,
    pub head: Id,
    #[serde(default = "LabelJson::plain")]
    pub label: LabelJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelJson {
    Gamma { pre: Perm, cyl: usize, post: Perm },
    Text(String),
    Number(i64),
}

impl LabelJson {
    fn plain() -> LabelJson {
        LabelJson::Text("1".into())
    }

    pub fn to_label(&self) -> Result<Label> {
        match self {
            LabelJson::Gamma { pre, cyl, post } => {
                if pre.degree() != post.degree() {
                    return Err(Error::Label("pre and post twists differ in degree".into()));
                }
                if *cyl == 0 {
                    return Err(Error::Label("cylinder index is 1-based".into()));
                }
                Ok(Label::gamma(pre.clone(), *cyl, post.clone()))
            }
            LabelJson::Text(s) => Ok(Label::Name(s.clone())),
            LabelJson::Number(n) => Ok(Label::Name(n.to_string())),
        }
    }
}

impl From<&Label> for LabelJson {
    fn from(l: &Label) -> LabelJson {
        match l {
            Label::Name(s) => LabelJson::Text(s.clone()),
            Label::Gamma(g) => LabelJson::Gamma { pre: g.pre.clone(), cyl: g.cyl, post: g.post.clone() },
        }
    }
}

/// A graph with an injective naming of some of its vertices.
#[derive(Clone, Debug)]
pub struct MarkedGraph {
    pub graph: Graph,
    marks: BTreeMap<String, usize>,
}

impl MarkedGraph {
    pub fn new(graph: Graph, marks: BTreeMap<String, usize>) -> Result<MarkedGraph> {
        let mut hit = BTreeSet::new();
        for (x, &v) in &marks {
            if v >= graph.n() {
                return Err(Error::Domain(format!("mark {x:?} points outside the graph")));
            }
            if !hit.insert(v) {
                return Err(Error::Domain(format!("marking is not injective at {x:?}")));
            }
        }
        Ok(MarkedGraph { graph, marks })
    }

    /// Marks each listed vertex id with itself.
    pub fn marked_by_ids(graph: Graph, ids: &[&str]) -> Result<MarkedGraph> {
        let mut marks = BTreeMap::new();
        for id in ids {
            let v = graph.vertex(id).ok_or_else(|| Error::Domain(format!("{id:?} is not a vertex")))?;
            marks.insert(id.to_string(), v);
        }
        MarkedGraph::new(graph, marks)
    }

    pub fn marks(&self) -> &BTreeMap<String, usize> {
        &self.marks
    }

    pub fn mark(&self, x: &str) -> Option<usize> {
        self.marks.get(x).copied()
    }
}

/// Pushout of `a` and `b` over the overlap graph `s`, whose vertex ids are common mark names.
///
/// Every arc of `s` must be matched by an arc with the same ends and label in both `a` and
/// `b`; those arcs are identified. An arc present with the wrong label is a label conflict.
pub fn amalgam(a: &MarkedGraph, b: &MarkedGraph, s: &Graph) -> Result<MarkedGraph> {
    for x in s.names() {
        if a.mark(x).is_none() || b.mark(x).is_none() {
            return Err(Error::Domain(format!("overlap vertex {x:?} is not a common mark")));
        }
    }
    let mut g = a.graph.clone();
    g.forget_symmetry();
    let mut bmap = vec![usize::MAX; b.graph.n()];
    for (x, &vb) in &b.marks {
        if let Some(va) = a.mark(x) {
            bmap[vb] = va;
        }
    }
    for v in 0..b.graph.n() {
        if bmap[v] == usize::MAX {
            bmap[v] = g.add_vertex(fresh(&g.index, b.graph.name(v)))?;
        }
    }
    let mut used_a = vec![false; a.graph.m()];
    let mut used_b = vec![false; b.graph.m()];
    for se in s.edges() {
        let (xs, xh) = (s.name(se.tail), s.name(se.head));
        let ea = match_arc(&a.graph, a.mark(xs).unwrap(), a.mark(xh).unwrap(), &se.label, &used_a)?;
        let eb = match_arc(&b.graph, b.mark(xs).unwrap(), b.mark(xh).unwrap(), &se.label, &used_b)?;
        used_a[ea] = true;
        used_b[eb] = true;
    }
    for (i, e) in b.graph.edges().iter().enumerate() {
        if !used_b[i] {
            let id = fresh(&g.edge_ids, &e.id);
            g.add_edge_with_id(id, bmap[e.tail], bmap[e.head], e.label.clone())?;
        }
    }
    if a.graph.is_symmetric_flagged() && b.graph.is_symmetric_flagged() {
        g.make_symmetric()?;
    }
    let mut marks = a.marks.clone();
    for (x, &vb) in &b.marks {
        marks.entry(x.clone()).or_insert(bmap[vb]);
    }
    MarkedGraph::new(g, marks)
}

fn match_arc(g: &Graph, t: usize, h: usize, label: &Label, used: &[bool]) -> Result<usize> {
    let mut wrong_label = None;
    for (i, e) in g.edges().iter().enumerate() {
        if used[i] || e.tail != t || e.head != h {
            continue;
        }
        if &e.label == label {
            return Ok(i);
        }
        wrong_label = Some(e.label.clone());
    }
    match wrong_label {
        Some(l) => Err(Error::LabelConflict(format!(
            "overlap arc {} -> {} labeled {label} meets label {l}",
            g.name(t),
            g.name(h)
        ))),
        None => Err(Error::Domain(format!("overlap arc {} -> {} is not embedded", g.name(t), g.name(h)))),
    }
}

fn fresh(taken: &HashMap<String, usize>, base: &str) -> String {
    let mut id = base.to_string();
    while taken.contains_key(&id) {
        id.push('\'');
    }
    id
}

/// Merges vertices whose marks share an image under `rename`; the result is marked by the images.
pub fn identify_vertices(g: &MarkedGraph, rename: &BTreeMap<String, String>) -> Result<MarkedGraph> {
    let n = g.graph.n();
    let mut class: Vec<usize> = (0..n).collect();
    let mut first_of: BTreeMap<&str, usize> = BTreeMap::new();
    for (x, &v) in &g.marks {
        let y = rename.get(x).ok_or_else(|| Error::Domain(format!("mark {x:?} has no image")))?;
        match first_of.get(y.as_str()) {
            Some(&w) => class[v] = w,
            None => {
                first_of.insert(y, v);
            }
        }
    }
    let mut new_index = vec![usize::MAX; n];
    let mut names = Vec::new();
    for v in 0..n {
        if class[v] == v {
            new_index[v] = names.len();
            names.push(g.graph.name(v).to_string());
        }
    }
    let cls: Vec<usize> = (0..n).map(|v| new_index[class[v]]).collect();
    let graph = g.graph.quotient(&cls, names)?;
    let marks = first_of.into_iter().map(|(y, v)| (y.to_string(), cls[v])).collect();
    MarkedGraph::new(graph, marks)
}
