//! Cylinders, twists, coherent sets, cylinder algebra and the built-in cylinder catalog.
//!
//! A cylinder is a labeled graph with two ordered base lists `y` (initial) and `z` (terminal)
//! of equal length `k`, and a partial injection `ε` recording which `y_i` coincide with which
//! `z_j`. Indices in `ε` are 0-based internally and 1-based in JSON.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphJson, Label};
use crate::iso;
use crate::perm::{Perm, PermGroup};

/// Largest base size for which base automorphisms are enumerated.
pub const BASE_AUT_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct Cylinder {
    graph: Graph,
    y: Vec<usize>,
    z: Vec<usize>,
    eps: BTreeSet<(usize, usize)>,
}

/// Sorted labels of arcs `a -> b` for all ordered pairs, keyed by vertex index.
fn arc_table(g: &Graph) -> HashMap<(usize, usize), Vec<&Label>> {
    let mut t: HashMap<(usize, usize), Vec<&Label>> = HashMap::new();
    for e in g.edges() {
        t.entry((e.tail, e.head)).or_default().push(&e.label);
    }
    for v in t.values_mut() {
        v.sort();
    }
    t
}

/// True iff `list_a[i] -> list_b[i]` preserves every labeled arc multiset between listed vertices.
fn lists_isomorphic(ga: &Graph, list_a: &[usize], gb: &Graph, list_b: &[usize]) -> bool {
    let ta = arc_table(ga);
    let tb = arc_table(gb);
    let empty = Vec::new();
    let k = list_a.len();
    list_b.len() == k
        && (0..k).all(|i| {
            (0..k).all(|j| {
                ta.get(&(list_a[i], list_a[j])).unwrap_or(&empty) == tb.get(&(list_b[i], list_b[j])).unwrap_or(&empty)
            })
        })
}

/// True iff `i -> p(i)` is a labeled automorphism of the graph induced on `list`.
pub fn is_list_automorphism(g: &Graph, list: &[usize], p: &Perm) -> bool {
    p.degree() == list.len() && lists_isomorphic(g, list, g, &p.act_unchecked(list))
}

impl Cylinder {
    /// Validates and builds a cylinder; `eps` is 0-based.
    pub fn new(graph: Graph, y: Vec<usize>, z: Vec<usize>, eps: BTreeSet<(usize, usize)>) -> Result<Cylinder> {
        let k = y.len();
        if k == 0 || z.len() != k {
            return Err(Error::NotACylinder(format!("bases of sizes {} and {}", y.len(), z.len())));
        }
        if y.iter().chain(&z).any(|&v| v >= graph.n()) {
            return Err(Error::NotACylinder("base vertex outside the graph".into()));
        }
        for list in [&y, &z] {
            let distinct: BTreeSet<usize> = list.iter().copied().collect();
            if distinct.len() != k {
                return Err(Error::Epsilon("a base list repeats a vertex".into()));
            }
        }
        for &(i, j) in &eps {
            if i >= k || j >= k {
                return Err(Error::Epsilon(format!("pair ({}, {}) outside 1..{k}", i + 1, j + 1)));
            }
        }
        let derived: BTreeSet<(usize, usize)> =
            (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).filter(|&(i, j)| y[i] == z[j]).collect();
        if derived != eps {
            return Err(Error::Epsilon(format!(
                "epsilon {:?} disagrees with the shared base vertices {:?}",
                one_based(&eps),
                one_based(&derived)
            )));
        }
        if !lists_isomorphic(&graph, &y, &graph, &z) {
            return Err(Error::NotACylinder("y_i -> z_i is not an isomorphism of the bases".into()));
        }
        Ok(Cylinder { graph, y, z, eps })
    }

    /// Builds from vertex ids with a 1-based `eps`.
    pub fn from_ids(graph: Graph, y: &[&str], z: &[&str], eps: &[(usize, usize)]) -> Result<Cylinder> {
        let look = |id: &&str| graph.vertex(id).ok_or_else(|| Error::Schema(format!("unknown base vertex {id:?}")));
        let yv = y.iter().map(look).collect::<Result<Vec<_>>>()?;
        let zv = z.iter().map(look).collect::<Result<Vec<_>>>()?;
        let e = eps
            .iter()
            .map(|&(i, j)| {
                if i == 0 || j == 0 {
                    Err(Error::Epsilon("epsilon indices are 1-based".into()))
                } else {
                    Ok((i - 1, j - 1))
                }
            })
            .collect::<Result<_>>()?;
        Cylinder::new(graph, yv, zv, e)
    }

    /// Builds with `ε` derived from the vertex equalities `y_i = z_j`.
    pub fn with_derived_eps(graph: Graph, y: Vec<usize>, z: Vec<usize>) -> Result<Cylinder> {
        let eps = (0..y.len()).flat_map(|i| (0..z.len()).map(move |j| (i, j))).filter(|&(i, j)| y[i] == z[j]).collect();
        Cylinder::new(graph, y, z, eps)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn y(&self) -> &[usize] {
        &self.y
    }

    pub fn z(&self) -> &[usize] {
        &self.z
    }

    /// 0-based pairs.
    pub fn eps(&self) -> &BTreeSet<(usize, usize)> {
        &self.eps
    }

    pub fn k(&self) -> usize {
        self.y.len()
    }

    pub fn t(&self) -> usize {
        self.eps.len()
    }

    pub fn thickness(&self) -> (usize, usize) {
        (self.t(), self.k())
    }

    pub fn neg_base(&self) -> Graph {
        self.graph.induced(&self.y)
    }

    pub fn pos_base(&self) -> Graph {
        self.graph.induced(&self.z)
    }

    pub fn is_base_vertex(&self, v: usize) -> bool {
        self.y.contains(&v) || self.z.contains(&v)
    }

    pub fn inner_vertices(&self) -> Vec<usize> {
        (0..self.graph.n()).filter(|&v| !self.is_base_vertex(v)).collect()
    }

    /// `C(yγ, zλ)`: same graph, reindexed bases; `ε` becomes `{(γ⁻¹(i), λ⁻¹(j))}`.
    pub fn twist(&self, gamma: &Perm, lambda: &Perm) -> Result<Cylinder> {
        for p in [gamma, lambda] {
            if !is_list_automorphism(&self.graph, &self.y, p) {
                return Err(Error::NotATwist(format!("{p} is not an automorphism of the base")));
            }
        }
        let y = gamma.act_unchecked(&self.y);
        let z = lambda.act_unchecked(&self.z);
        let gi = gamma.inverse();
        let li = lambda.inverse();
        let eps = self.eps.iter().map(|&(i, j)| (gi.apply(i), li.apply(j))).collect();
        Cylinder::new(self.graph.clone(), y, z, eps)
    }

    /// Index permutations that are automorphisms of the initial base, in lexicographic order.
    pub fn base_automorphisms(&self) -> Result<Vec<Perm>> {
        if self.k() > BASE_AUT_CAP {
            return Err(Error::ResourceLimit(format!("base of size {} exceeds {BASE_AUT_CAP}", self.k())));
        }
        Ok(Perm::all(self.k()).into_iter().filter(|p| is_list_automorphism(&self.graph, &self.y, p)).collect())
    }

    /// Symmetric arcs, `ε` inside the diagonal, and an automorphism swapping `y_i` with `z_i`.
    pub fn is_symmetric_cylinder(&self) -> bool {
        if !self.graph.is_symmetric() || self.eps.iter().any(|&(i, j)| i != j) {
            return false;
        }
        let mut pins: Vec<(usize, usize)> = Vec::new();
        for i in 0..self.k() {
            pins.push((self.y[i], self.z[i]));
            pins.push((self.z[i], self.y[i]));
        }
        pins.sort_unstable();
        pins.dedup();
        iso::isomorphism_pinned(&self.graph, &self.graph, &pins).is_some()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_json_struct()).expect("cylinder JSON serializes")
    }

    pub fn to_json_struct(&self) -> CylinderJson {
        CylinderJson {
            graph: self.graph.to_json_struct(),
            neg_base: self.y.iter().map(|&v| self.graph.name(v).to_string()).collect(),
            pos_base: self.z.iter().map(|&v| self.graph.name(v).to_string()).collect(),
            epsilon: one_based(&self.eps),
        }
    }

    pub fn from_json_struct(j: &CylinderJson) -> Result<Cylinder> {
        let g = Graph::from_json_struct(&j.graph)?;
        let y: Vec<&str> = j.neg_base.iter().map(|s| s.as_str()).collect();
        let z: Vec<&str> = j.pos_base.iter().map(|s| s.as_str()).collect();
        Cylinder::from_ids(g, &y, &z, &j.epsilon)
    }
}

fn one_based(eps: &BTreeSet<(usize, usize)>) -> Vec<(usize, usize)> {
    eps.iter().map(|&(i, j)| (i + 1, j + 1)).collect()
}

/// Cylinder JSON: graph fields plus base lists and 1-based epsilon pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CylinderJson {
    #[serde(flatten)]
    pub graph: GraphJson,
    pub neg_base: Vec<String>,
    pub pos_base: Vec<String>,
    #[serde(default)]
    pub epsilon: Vec<(usize, usize)>,
}

/// A Γ-coherent family of cylinders indexed `1..=m`.
#[derive(Clone, Debug)]
pub struct CylinderSet {
    gamma: PermGroup,
    members: Vec<Cylinder>,
    mixed: bool,
}

impl CylinderSet {
    /// Same thickness, index-wise isomorphic initial bases, and Γ acting by base automorphisms.
    pub fn check_coherent(members: Vec<Cylinder>, gamma: PermGroup) -> Result<CylinderSet> {
        CylinderSet::validate(members, gamma, false)
    }

    /// Like [`CylinderSet::check_coherent`] but members may differ in `t` (deletion/contraction mixes).
    pub fn mixed(members: Vec<Cylinder>, gamma: PermGroup) -> Result<CylinderSet> {
        CylinderSet::validate(members, gamma, true)
    }

    /// One cylinder with the trivial group.
    pub fn single(c: Cylinder) -> CylinderSet {
        let k = c.k();
        CylinderSet { gamma: PermGroup::trivial(k), members: vec![c], mixed: false }
    }

    fn validate(members: Vec<Cylinder>, gamma: PermGroup, mixed: bool) -> Result<CylinderSet> {
        let Some(first) = members.first() else {
            return Err(Error::NotCoherent("empty cylinder set".into()));
        };
        let k = first.k();
        if gamma.degree() != k {
            return Err(Error::NotCoherent(format!("group degree {} for bases of size {k}", gamma.degree())));
        }
        for (j, c) in members.iter().enumerate() {
            if c.k() != k || (!mixed && c.t() != first.t()) {
                return Err(Error::NotCoherent(format!(
                    "member {} has thickness {:?}, expected {:?}",
                    j + 1,
                    c.thickness(),
                    first.thickness()
                )));
            }
            if !lists_isomorphic(&first.graph, &first.y, &c.graph, &c.y) {
                return Err(Error::NotCoherent(format!("base of member {} differs from the first", j + 1)));
            }
        }
        for g in gamma.generators() {
            if !is_list_automorphism(&first.graph, &first.y, g) {
                return Err(Error::NotCoherent(format!("{g} is not an automorphism of the first base")));
            }
        }
        Ok(CylinderSet { gamma, members, mixed })
    }

    pub fn gamma(&self) -> &PermGroup {
        &self.gamma
    }

    pub fn members(&self) -> &[Cylinder] {
        &self.members
    }

    /// Member `j`, 1-based.
    pub fn member(&self, j: usize) -> Result<&Cylinder> {
        j.checked_sub(1)
            .and_then(|i| self.members.get(i))
            .ok_or_else(|| Error::Label(format!("cylinder index {j} outside 1..={}", self.members.len())))
    }

    pub fn m(&self) -> usize {
        self.members.len()
    }

    pub fn k(&self) -> usize {
        self.members[0].k()
    }

    pub fn is_mixed(&self) -> bool {
        self.mixed
    }

    pub fn is_symmetric(&self) -> bool {
        self.members.iter().all(|c| c.is_symmetric_cylinder())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "gamma": serde_json::to_value(&self.gamma).expect("group serializes"),
            "cylinders": self.members.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }

    /// Accepts `{"gamma", "cylinders"}`, a bare cylinder, or `{"builtin": name, ...params}`.
    pub fn from_json_value(v: &serde_json::Value) -> Result<CylinderSet> {
        if let Some(name) = v.get("builtin").and_then(|n| n.as_str()) {
            let params = builtin_params(v)?;
            return Ok(CylinderSet::single(builtin(name, &params)?));
        }
        if let Some(list) = v.get("cylinders") {
            let list = list.as_array().ok_or_else(|| Error::Schema("\"cylinders\" must be an array".into()))?;
            let members = list.iter().map(cylinder_from_value).collect::<Result<Vec<_>>>()?;
            let k = members.first().map(|c| c.k()).unwrap_or(1);
            let gamma = match v.get("gamma") {
                Some(g) => serde_json::from_value::<PermGroup>(g.clone()).map_err(|e| Error::Schema(e.to_string()))?,
                None => PermGroup::trivial(k),
            };
            let mixed = v.get("mixed").and_then(|m| m.as_bool()).unwrap_or(false);
            return CylinderSet::validate(members, gamma, mixed);
        }
        Ok(CylinderSet::single(cylinder_from_value(v)?))
    }
}

fn cylinder_from_value(v: &serde_json::Value) -> Result<Cylinder> {
    if let Some(name) = v.get("builtin").and_then(|n| n.as_str()) {
        return builtin(name, &builtin_params(v)?);
    }
    let j: CylinderJson = serde_json::from_value(v.clone()).map_err(|e| Error::Schema(e.to_string()))?;
    Cylinder::from_json_struct(&j)
}

fn builtin_params(v: &serde_json::Value) -> Result<BuiltinParams> {
    let mut p = BuiltinParams { n: v.get("n").and_then(|n| n.as_u64()).map(|n| n as usize), graph: None };
    if let Some(g) = v.get("graph") {
        p.graph = Some(Graph::from_json_value(g)?);
    }
    Ok(p)
}

/// Identifies both bases of `d` with those of `c`, merges equal-labeled parallel arcs and
/// recomputes `ε` from the resulting vertex equalities.
pub fn cyl_sum(c: &Cylinder, d: &Cylinder) -> Result<Cylinder> {
    if c.thickness() != d.thickness() {
        return Err(Error::Domain(format!("thickness {:?} vs {:?}", c.thickness(), d.thickness())));
    }
    let g = c.graph.disjoint_union(&d.graph, "r.");
    let off = c.graph.n();
    let mut uf = UnionFind::new(g.n());
    for i in 0..c.k() {
        uf.union(c.y[i], off + d.y[i]);
        uf.union(c.z[i], off + d.z[i]);
    }
    let (class, names) = uf.classes(|v| g.name(v).to_string());
    let q = g.quotient(&class, names)?.merge_parallel();
    let y = c.y.iter().map(|&v| class[v]).collect();
    let z = c.z.iter().map(|&v| class[v]).collect();
    Cylinder::with_derived_eps(q, y, z)
}

/// `C ⋓ D`: disjoint union with concatenated bases; the `ε` of `d` is offset by `k(c)`.
pub fn cyl_disjoint(c: &Cylinder, d: &Cylinder) -> Result<Cylinder> {
    let g = c.graph.disjoint_union(&d.graph, "r.");
    let off = c.graph.n();
    let y = c.y.iter().copied().chain(d.y.iter().map(|v| v + off)).collect();
    let z = c.z.iter().copied().chain(d.z.iter().map(|v| v + off)).collect();
    let k = c.k();
    let eps = c.eps.iter().copied().chain(d.eps.iter().map(|&(i, j)| (i + k, j + k))).collect();
    Cylinder::new(g, y, z, eps)
}

/// Plain union-find over dense indices.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Keeps the smaller index as root so names come from the earliest member.
    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Dense class index per element plus the name of each class's smallest member.
    pub(crate) fn classes(&mut self, name: impl Fn(usize) -> String) -> (Vec<usize>, Vec<String>) {
        let n = self.parent.len();
        let mut idx = vec![usize::MAX; n];
        let mut names = Vec::new();
        let mut class = vec![0; n];
        for v in 0..n {
            let r = self.find(v);
            if idx[r] == usize::MAX {
                idx[r] = names.len();
                names.push(name(r));
            }
            class[v] = idx[r];
        }
        (class, names)
    }
}

/// Parameters for [`builtin`].
#[derive(Clone, Debug, Default)]
pub struct BuiltinParams {
    pub n: Option<usize>,
    pub graph: Option<Graph>,
}

/// Built-in cylinder by name: `identity`, `directed_identity`, `cap`, `path`, `directed_path`,
/// `wedge`, `deletion`, `contraction`, `join`, `join_open`, `triangle`, `square`,
/// `neps_cart`, `neps_cat`, `neps_strong`, `neps_lex`, `zigzag_r`, `zigzag_z`.
pub fn builtin(name: &str, p: &BuiltinParams) -> Result<Cylinder> {
    let n = || p.n.ok_or_else(|| Error::Domain(format!("builtin {name:?} needs n")));
    let g = || p.graph.as_ref().ok_or_else(|| Error::Domain(format!("builtin {name:?} needs a graph")));
    let positive = |k: usize| if k == 0 { Err(Error::Domain("k must be at least 1".into())) } else { Ok(k) };
    match name {
        "identity" => identity(positive(p.n.unwrap_or(1))?),
        "directed_identity" => directed_identity(positive(p.n.unwrap_or(1))?),
        "cap" => cap(),
        "path" => path(n()?),
        "directed_path" => directed_path(n()?),
        "wedge" => wedge(),
        "deletion" => deletion(positive(p.n.unwrap_or(1))?),
        "contraction" => contraction(positive(p.n.unwrap_or(1))?),
        "join" => join_cylinder(g()?, true),
        "join_open" => join_cylinder(g()?, false),
        "triangle" => triangle(),
        "square" => square(),
        "neps_cart" => neps(g()?, NepsKind::Cartesian),
        "neps_cat" => neps(g()?, NepsKind::Categorical),
        "neps_strong" => neps(g()?, NepsKind::Strong),
        "neps_lex" => neps(g()?, NepsKind::Lexicographic),
        "zigzag_r" => zigzag_replacement(g()?),
        "zigzag_z" => zigzag_quotient(g()?),
        _ => Err(Error::Usage(format!("unknown builtin cylinder {name:?}"))),
    }
}

fn base_names(k: usize) -> (Vec<String>, Vec<String>) {
    if k == 1 {
        (vec!["y".into()], vec!["z".into()])
    } else {
        ((1..=k).map(|i| format!("y{i}")).collect(), (1..=k).map(|i| format!("z{i}")).collect())
    }
}

/// Graph with vertices `y1..yk, z1..zk` (or `y, z` when k = 1).
fn two_bases(k: usize) -> (Graph, Vec<usize>, Vec<usize>) {
    let (yn, zn) = base_names(k);
    let mut g = Graph::new();
    let y = yn.into_iter().map(|s| g.add_vertex(s).unwrap()).collect();
    let z = zn.into_iter().map(|s| g.add_vertex(s).unwrap()).collect();
    (g, y, z)
}

fn finish(mut g: Graph, y: Vec<usize>, z: Vec<usize>, symmetric: bool) -> Result<Cylinder> {
    if symmetric {
        g.make_symmetric()?;
    }
    Cylinder::with_derived_eps(g, y, z)
}

/// `I_k`: k disjoint undirected edges `y_i z_i`.
pub fn identity(k: usize) -> Result<Cylinder> {
    let (mut g, y, z) = two_bases(k);
    for i in 0..k {
        g.add_undirected(y[i], z[i], Label::plain());
    }
    finish(g, y, z, true)
}

/// `Ī_k`: k disjoint arcs `y_i -> z_i`.
pub fn directed_identity(k: usize) -> Result<Cylinder> {
    let (mut g, y, z) = two_bases(k);
    for i in 0..k {
        g.add_edge(y[i], z[i], Label::plain());
    }
    finish(g, y, z, false)
}

/// `⊓`: base edges `y1y2`, `z1z2` and the bar `y1z1`.
pub fn cap() -> Result<Cylinder> {
    let (mut g, y, z) = two_bases(2);
    g.add_undirected(y[0], y[1], Label::plain());
    g.add_undirected(z[0], z[1], Label::plain());
    g.add_undirected(y[0], z[0], Label::plain());
    finish(g, y, z, true)
}

fn path_graph(n: usize, directed: bool) -> Result<Cylinder> {
    let mut g = Graph::new();
    if n == 0 {
        let v = g.add_vertex("y")?;
        return finish(g, vec![v], vec![v], !directed);
    }
    let mut vs = vec![g.add_vertex("y")?];
    for i in 1..n {
        vs.push(g.add_vertex(format!("p{i}"))?);
    }
    vs.push(g.add_vertex("z")?);
    for w in vs.windows(2) {
        if directed {
            g.add_edge(w[0], w[1], Label::plain());
        } else {
            g.add_undirected(w[0], w[1], Label::plain());
        }
    }
    finish(g, vec![vs[0]], vec![vs[n]], !directed)
}

/// `P_n`: an undirected path of length n from `y` to `z`; `P_0` is one vertex `y = z`.
pub fn path(n: usize) -> Result<Cylinder> {
    path_graph(n, false)
}

/// `P⃗_n`: a directed path of length n from `y` to `z`.
pub fn directed_path(n: usize) -> Result<Cylinder> {
    path_graph(n, true)
}

/// `∧`: centre `c = y1 = z1` joined to `y2` and `z2`.
pub fn wedge() -> Result<Cylinder> {
    let mut g = Graph::new();
    let c = g.add_vertex("c")?;
    let a = g.add_vertex("y2")?;
    let b = g.add_vertex("z2")?;
    g.add_undirected(c, a, Label::plain());
    g.add_undirected(c, b, Label::plain());
    finish(g, vec![c, a], vec![c, b], true)
}

/// `d_k`: two edgeless bases, nothing else.
pub fn deletion(k: usize) -> Result<Cylinder> {
    let (g, y, z) = two_bases(k);
    finish(g, y, z, true)
}

/// The empty `(k,k)`-cylinder: `y_i = z_i`, no edges.
pub fn contraction(k: usize) -> Result<Cylinder> {
    let mut g = Graph::new();
    let names: Vec<String> = if k == 1 { vec!["y".into()] } else { (1..=k).map(|i| format!("y{i}")).collect() };
    let y: Vec<usize> = names.into_iter().map(|s| g.add_vertex(s).unwrap()).collect();
    finish(g, y.clone(), y, true)
}

/// `H_∇` (with the edge `yz`) or its open variant: bases `(y, h...)` and `(z, h...)` sharing
/// the copy of `H`, with spokes from `y` and `z` to every `h`.
pub fn join_cylinder(h: &Graph, with_yz: bool) -> Result<Cylinder> {
    let mut g = Graph::new();
    let y = g.add_vertex("y")?;
    let z = g.add_vertex("z")?;
    let hs: Vec<usize> = h.names().iter().map(|s| g.add_vertex(format!("h.{s}")).unwrap()).collect();
    for e in h.pair_representatives() {
        let e = h.edge(e);
        if h.is_symmetric_flagged() {
            g.add_undirected(hs[e.tail], hs[e.head], Label::plain());
        } else {
            g.add_edge(hs[e.tail], hs[e.head], Label::plain());
        }
    }
    for &x in &hs {
        g.add_undirected(y, x, Label::plain());
        g.add_undirected(z, x, Label::plain());
    }
    if with_yz {
        g.add_undirected(y, z, Label::plain());
    }
    let yl = std::iter::once(y).chain(hs.iter().copied()).collect();
    let zl = std::iter::once(z).chain(hs.iter().copied()).collect();
    finish(g.clone(), yl, zl, g.is_symmetric())
}

/// `△ = K_1∇`: a triangle `y z h` with bases `(y, h)` and `(z, h)`.
pub fn triangle() -> Result<Cylinder> {
    join_cylinder(&Graph::complete(1), true)
}

/// `□`: the 4-cycle `y - z - b - a - y` as a 1-cylinder.
pub fn square() -> Result<Cylinder> {
    let mut g = Graph::new();
    let y = g.add_vertex("y")?;
    let z = g.add_vertex("z")?;
    let a = g.add_vertex("a")?;
    let b = g.add_vertex("b")?;
    for (u, v) in [(y, z), (z, b), (b, a), (a, y)] {
        g.add_undirected(u, v, Label::plain());
    }
    finish(g, vec![y], vec![z], true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NepsKind {
    Cartesian,
    Categorical,
    Strong,
    Lexicographic,
}

impl std::str::FromStr for NepsKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<NepsKind> {
        match s {
            "cartesian" | "cart" => Ok(NepsKind::Cartesian),
            "categorical" | "cat" | "tensor" => Ok(NepsKind::Categorical),
            "strong" => Ok(NepsKind::Strong),
            "lexicographic" | "lex" => Ok(NepsKind::Lexicographic),
            _ => Err(Error::Usage(format!("unknown product kind {s:?}"))),
        }
    }
}

/// NEPS cylinder of a simple graph `G` on k vertices: bases are copies of `G` (empty for the
/// categorical kind) and `y_i z_j` is an edge according to the kind.
pub fn neps(gr: &Graph, kind: NepsKind) -> Result<Cylinder> {
    let k = gr.n();
    if k == 0 {
        return Err(Error::Domain("NEPS cylinder of the empty graph".into()));
    }
    let (mut g, y, z) = two_bases(k);
    let adj = |i: usize, j: usize| gr.has_arc(i, j) || gr.has_arc(j, i);
    if kind != NepsKind::Categorical {
        for i in 0..k {
            for j in i + 1..k {
                if adj(i, j) {
                    g.add_undirected(y[i], y[j], Label::plain());
                    g.add_undirected(z[i], z[j], Label::plain());
                }
            }
        }
    }
    for i in 0..k {
        for j in 0..k {
            let cross = match kind {
                NepsKind::Cartesian => i == j,
                NepsKind::Categorical => i != j && adj(i, j),
                NepsKind::Strong => i == j || adj(i, j),
                NepsKind::Lexicographic => true,
            };
            if cross {
                g.add_edge(y[i], z[j], Label::plain());
                g.add_edge(z[j], y[i], Label::plain());
            }
        }
    }
    finish(g, y, z, true)
}

/// Port automorphisms of a vertex-transitive `H`: `σ_i` maps vertex 1 to vertex i, first
/// found by the isomorphism search, with `σ_1 = id`. Returned as index permutations.
pub fn transitive_automorphisms(h: &Graph) -> Result<Vec<Perm>> {
    let d = h.n();
    if d == 0 {
        return Err(Error::Domain("empty graph".into()));
    }
    let mut out = vec![Perm::identity(d)];
    for i in 1..d {
        let iso = iso::isomorphism_pinned(h, h, &[(0, i)])
            .ok_or_else(|| Error::Domain(format!("graph is not vertex-transitive (no automorphism 1 -> {})", i + 1)))?;
        out.push(Perm::from_zero_based(iso.vmap)?);
    }
    Ok(out)
}

/// `C_H^R`: two copies of `H` labeled `0` on the bases plus the edge `y1 z1` labeled `1`.
pub fn zigzag_replacement(h: &Graph) -> Result<Cylinder> {
    zigzag_cylinder(h, false)
}

/// `C_H^Z`: `C_H^R` plus edges `y_i z_j` labeled `2` whenever `y_i ~ y_1` and `z_1 ~ z_j` in `H`.
pub fn zigzag_quotient(h: &Graph) -> Result<Cylinder> {
    zigzag_cylinder(h, true)
}

fn zigzag_cylinder(h: &Graph, quotient: bool) -> Result<Cylinder> {
    let d = h.n();
    let (mut g, y, z) = two_bases(d);
    let adj = |i: usize, j: usize| h.has_arc(i, j) || h.has_arc(j, i);
    for i in 0..d {
        for j in i + 1..d {
            if adj(i, j) {
                g.add_undirected(y[i], y[j], Label::name("0"));
                g.add_undirected(z[i], z[j], Label::name("0"));
            }
        }
    }
    g.add_undirected(y[0], z[0], Label::name("1"));
    if quotient {
        for i in 0..d {
            for j in 0..d {
                if adj(i, 0) && adj(0, j) {
                    g.add_edge(y[i], z[j], Label::name("2"));
                    g.add_edge(z[j], y[i], Label::name("2"));
                }
            }
        }
    }
    finish(g, y, z, true)
}
