//! Named constructions built from products and exponentials: the Petersen graph, powers,
//! subdivisions, NEPS, `H^G`, voltage lifts, replacement and zig-zag products, looped line
//! graphs, joins and minors.

use std::collections::BTreeMap;

use crate::construct::{
    cyl_product, cyl_product_symmetric, exponential, exponential_symmetric, exponential_with, ExpoOptions,
};
use crate::cylinder::{self, Cylinder, CylinderSet, NepsKind, UnionFind};
use crate::error::{Error, Result};
use crate::graph::{Graph, Label};
use crate::iso::are_isomorphic;
use crate::perm::{Perm, PermGroup};

fn single(c: Cylinder) -> CylinderSet {
    CylinderSet::single(c)
}

fn symmetric_copy(g: &Graph) -> Result<Graph> {
    let mut g = g.clone();
    if !g.is_symmetric_flagged() {
        g.make_symmetric()?;
    }
    Ok(g)
}

/// Plain symmetric simple graph: labels erased, parallel arcs merged.
fn simplify(g: &Graph) -> Graph {
    g.erase_labels().merge_parallel()
}

/// `K̂_5 ⊠_{S_2} ⊓`: untwisted labels on the 5-cycle `i ~ i±1`, `(π_2, 1, π_2)` on the chords.
pub fn petersen() -> Result<Graph> {
    let sw = Perm::from_images(&[2, 1])?;
    let id = Perm::identity(2);
    let mut k5 = Graph::new();
    for i in 0..5 {
        k5.add_vertex(i.to_string())?;
    }
    for i in 0..5 {
        for j in i + 1..5 {
            let twist = if (j - i) % 5 == 1 || (j - i) % 5 == 4 { id.clone() } else { sw.clone() };
            k5.add_undirected(i, j, Label::gamma(twist.clone(), 1, twist));
        }
    }
    k5.make_symmetric()?;
    let set = CylinderSet::check_coherent(vec![cylinder::cap()?], PermGroup::symmetric(2)?)?;
    Ok(cyl_product_symmetric(&k5, &set)?.product)
}

fn power_cylinder(g: &Graph, n: usize) -> Result<(CylinderSet, bool)> {
    let sym = g.is_symmetric_flagged();
    let c = if sym { cylinder::path(n)? } else { cylinder::directed_path(n)? };
    Ok((single(c), sym))
}

/// `G^n = [P_n, G]` (walks of length exactly n), or `[P⃗_n, G]` for unflagged graphs.
pub fn graph_power(g: &Graph, n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Domain("power needs n ≥ 1".into()));
    }
    let (set, sym) = power_cylinder(g, n)?;
    let e = if sym { exponential_symmetric(&set, g)? } else { exponential(&set, g)? };
    Ok(simplify(&e.graph))
}

/// `G ⊠ P_n`: every edge subdivided by `n - 1` vertices.
pub fn subdivision(g: &Graph, n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Domain("subdivision needs n ≥ 1".into()));
    }
    let (set, sym) = power_cylinder(g, n)?;
    let tr = if sym { cyl_product_symmetric(g, &set)? } else { cyl_product(g, &set)? };
    Ok(tr.product)
}

/// `G^{m/n} = [P_m, G ⊠ P_n]`.
pub fn fractional_power(g: &Graph, m: usize, n: usize) -> Result<Graph> {
    graph_power(&subdivision(g, n)?, m)
}

/// `H ⊠ C_kind(G)`; vertex `h#i` stands for the pair `(h, g_i)`.
pub fn neps_product(g: &Graph, h: &Graph, kind: NepsKind) -> Result<Graph> {
    let set = single(cylinder::neps(g, kind)?);
    Ok(cyl_product_symmetric(&symmetric_copy(h)?, &set)?.product)
}

/// `H^G = [C_×(G), H]`; vertex `(h_1, ..., h_k)` is the map `g_i ↦ h_i`. With `keep_isolated`
/// every one of the `|V(H)|^|V(G)|` maps is a vertex.
pub fn power_graph_expo(g: &Graph, h: &Graph, keep_isolated: bool) -> Result<Graph> {
    let set = single(cylinder::neps(g, NepsKind::Categorical)?);
    let e = exponential_with(&set, &symmetric_copy(h)?, ExpoOptions { symmetric: true, keep_isolated })?;
    Ok(simplify(&e.graph))
}

/// Derived graph of a voltage graph: arc `u -> v` with voltage `ρ` lifts to edges
/// `(u, i) - (v, ρ⁻¹(i))`, built as `Ĝ ⊠_Ω I_k` with labels `(id, 1, ρ)`.
pub fn voltage_derived(g: &Graph, voltages: &[Perm], omega: &PermGroup) -> Result<Graph> {
    if voltages.len() != g.m() {
        return Err(Error::Domain("one voltage per arc is required".into()));
    }
    let k = omega.degree();
    let mut hat = Graph::new();
    for n in g.names() {
        hat.add_vertex(n.clone())?;
    }
    for (e, rho) in g.edges().iter().zip(voltages) {
        hat.add_edge_with_id(e.id.clone(), e.tail, e.head, Label::gamma(Perm::identity(k), 1, rho.clone()))?;
    }
    let set = CylinderSet::check_coherent(vec![cylinder::identity(k)?], omega.clone())?;
    Ok(cyl_product(&hat, &set)?.product.symmetrize())
}

/// The `Z_5` voltage graph whose derived graph is the Petersen graph: loops of voltage 1 and 2
/// at `u` and `v`, and the arc `u -> v` of voltage 0.
pub fn petersen_voltage_graph() -> Result<(Graph, Vec<Perm>, PermGroup)> {
    let mut g = Graph::new();
    let u = g.add_vertex("u")?;
    let v = g.add_vertex("v")?;
    g.add_edge(u, u, Label::plain());
    g.add_edge(v, v, Label::plain());
    g.add_edge(u, v, Label::plain());
    let r = Perm::cycle(5, &[1, 2, 3, 4, 5])?;
    let r2 = r.compose(&r)?;
    let z5 = PermGroup::generate(5, std::slice::from_ref(&r))?;
    Ok((g, vec![r, r2, Perm::identity(5)], z5))
}

/// A d-regular simple symmetric graph with ports: `rot(u, i) = (v, j)` when `v` is the
/// `i`-th neighbour of `u` (by index) and `u` the `j`-th neighbour of `v`.
#[derive(Clone, Debug)]
pub struct RotationGraph {
    pub graph: Graph,
    pub degree: usize,
    nbrs: Vec<Vec<usize>>,
}

impl RotationGraph {
    pub fn new(g: &Graph) -> Result<RotationGraph> {
        let graph = symmetric_copy(g)?;
        let mut nbrs = vec![Vec::new(); graph.n()];
        for e in graph.edges() {
            if e.tail == e.head {
                return Err(Error::Domain("rotation graphs have no loops".into()));
            }
            nbrs[e.tail].push(e.head);
        }
        for n in &mut nbrs {
            n.sort_unstable();
            if n.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Domain("rotation graphs are simple".into()));
            }
        }
        let degree = nbrs.first().map_or(0, |n| n.len());
        if nbrs.iter().any(|n| n.len() != degree) || degree == 0 {
            return Err(Error::Degree("rotation graphs are regular of positive degree".into()));
        }
        Ok(RotationGraph { graph, degree, nbrs })
    }

    /// `rot(u, i)`, ports 0-based.
    pub fn rot(&self, u: usize, i: usize) -> (usize, usize) {
        let v = self.nbrs[u][i];
        (v, self.nbrs[v].binary_search(&u).expect("symmetric adjacency"))
    }
}

/// The two presentations of the zig-zag product plus the replacement product.
#[derive(Clone, Debug)]
pub struct ZigZag {
    /// `Ĝ ⊠_Γ C_H^R`.
    pub replacement: Graph,
    /// `[Z, Ĝ ⊠_Γ C_H^R]_Γ` with labels erased.
    pub mixed: Graph,
    /// Label-2 edges of `Ĝ ⊠_Γ C_H^Z`, labels erased.
    pub pure: Graph,
}

/// `Ĝ`: arc `u -> v` with `rot(u, i) = (v, j)` labeled `(σ_i⁻¹, 1, σ_j⁻¹)`, where `σ_i` is the
/// automorphism of `H` taking port 0 to port `i`, plus Γ generated by the `σ_i`.
fn rotation_labels(g: &RotationGraph, h: &Graph) -> Result<(Graph, PermGroup)> {
    if h.n() != g.degree {
        return Err(Error::Domain(format!("H has {} vertices but G is {}-regular", h.n(), g.degree)));
    }
    let sigma = cylinder::transitive_automorphisms(h)?;
    let gamma = PermGroup::generate(h.n(), &sigma)?;
    let tau: Vec<Perm> = sigma.iter().map(|s| s.inverse()).collect();
    let mut hat = Graph::new();
    for n in g.graph.names() {
        hat.add_vertex(n.clone())?;
    }
    for u in 0..g.graph.n() {
        for i in 0..g.degree {
            let (v, j) = g.rot(u, i);
            if u < v {
                hat.add_undirected(u, v, Label::gamma(tau[i].clone(), 1, tau[j].clone()));
            }
        }
    }
    hat.make_symmetric()?;
    Ok((hat, gamma))
}

/// `Z`: the path `y - a - b - z` labeled `0, 1, 0`.
fn zigzag_path() -> Result<Cylinder> {
    let mut g = Graph::new();
    let y = g.add_vertex("y")?;
    let a = g.add_vertex("a")?;
    let b = g.add_vertex("b")?;
    let z = g.add_vertex("z")?;
    g.add_undirected(y, a, Label::name("0"));
    g.add_undirected(a, b, Label::name("1"));
    g.add_undirected(b, z, Label::name("0"));
    g.make_symmetric()?;
    Cylinder::with_derived_eps(g, vec![y], vec![z])
}

/// Replacement product `Ĝ ⊠_Γ C_H^R` and both zig-zag presentations.
pub fn zigzag_presentations(g: &RotationGraph, h: &Graph) -> Result<ZigZag> {
    let (hat, gamma) = rotation_labels(g, h)?;
    let rset = CylinderSet::check_coherent(vec![cylinder::zigzag_replacement(h)?], gamma.clone())?;
    let replacement = cyl_product_symmetric(&hat, &rset)?.product;
    let mixed = simplify(&exponential_symmetric(&single(zigzag_path()?), &replacement)?.graph);
    let zset = CylinderSet::check_coherent(vec![cylinder::zigzag_quotient(h)?], gamma)?;
    let full = cyl_product_symmetric(&hat, &zset)?.product;
    let mut pure = Graph::new();
    for n in full.names() {
        pure.add_vertex(n.clone())?;
    }
    for e in full.edges() {
        if e.label == Label::name("2") {
            pure.add_edge_with_id(e.id.clone(), e.tail, e.head, Label::plain())?;
        }
    }
    pure.make_symmetric()?;
    Ok(ZigZag { replacement, mixed, pure: pure.merge_parallel() })
}

/// The zig-zag product; both presentations are computed and must agree.
pub fn zigzag(g: &RotationGraph, h: &Graph) -> Result<Graph> {
    let z = zigzag_presentations(g, h)?;
    if !are_isomorphic(&z.mixed, &z.pure) {
        return Err(Error::Domain("the two zig-zag presentations disagree".into()));
    }
    Ok(z.pure)
}

/// `Ĝ ⊠_Γ C_H^R`.
pub fn replacement(g: &RotationGraph, h: &Graph) -> Result<Graph> {
    Ok(zigzag_presentations(g, h)?.replacement)
}

/// `[∧, H]_{S_2}`: the line graph of `H` with a loop on every vertex (labels erased).
pub fn looped_line_graph(h: &Graph) -> Result<Graph> {
    let set = CylinderSet::check_coherent(vec![cylinder::wedge()?], PermGroup::symmetric(2)?)?;
    Ok(simplify(&exponential_symmetric(&set, &symmetric_copy(h)?)?.graph))
}

/// `G ∇ H`: `G` with an `H_∇` copy on every edge (label 1) and an open `H_∇` copy on a loop at
/// every vertex (label 2), after which all copies of `H` are identified.
pub fn join(g: &Graph, h: &Graph) -> Result<Graph> {
    let h = symmetric_copy(h)?;
    let set = CylinderSet::check_coherent(
        vec![cylinder::join_cylinder(&h, true)?, cylinder::join_cylinder(&h, false)?],
        PermGroup::trivial(h.n() + 1),
    )?;
    let mut hat = Graph::new();
    for n in g.names() {
        hat.add_vertex(n.clone())?;
    }
    for e in g.pair_representatives() {
        let e = g.edge(e);
        hat.add_edge(e.tail, e.head, Label::name("1"));
    }
    for v in 0..g.n() {
        hat.add_edge(v, v, Label::name("2"));
    }
    let tr = cyl_product(&hat, &set)?;
    let p = &tr.product;
    let mut uf = UnionFind::new(p.n());
    let mut names: BTreeMap<usize, String> = BTreeMap::new();
    for v in 0..g.n() {
        names.insert(tr.blowups[v][0], format!("g.{}", g.name(v)));
        for l in 1..=h.n() {
            uf.union(tr.blowups[0][l], tr.blowups[v][l]);
        }
    }
    for l in 1..=h.n() {
        names.insert(tr.blowups[0][l], format!("h.{}", h.name(l - 1)));
    }
    let (class, reps) = uf.classes(|v| v.to_string());
    let mut rep_name = vec![String::new(); reps.len()];
    for (v, n) in &names {
        rep_name[class[*v]] = n.clone();
    }
    let joined = p.quotient(&class, rep_name)?;
    let mut out = simplify(&joined);
    if !out.is_symmetric_flagged() {
        out = out.symmetrize();
    }
    Ok(out)
}

/// `G ∇ K_1`.
pub fn add_universal(g: &Graph) -> Result<Graph> {
    join(g, &Graph::complete(1))
}

/// Minor of `G`: arcs labeled `d` are deleted, `c` contracted, anything else kept. Built as the
/// symmetric product with the mixed set `{d_1, P_0, I_1}`.
pub fn minor(g: &Graph) -> Result<Graph> {
    let set = CylinderSet::mixed(
        vec![cylinder::deletion(1)?, cylinder::path(0)?, cylinder::identity(1)?],
        PermGroup::trivial(1),
    )?;
    let relabeled = symmetric_copy(g)?.map_labels(|l| {
        Ok(Label::name(match l {
            Label::Name(s) if s == "d" => "1",
            Label::Name(s) if s == "c" => "2",
            _ => "3",
        }))
    })?;
    Ok(simplify(&cyl_product_symmetric(&relabeled, &set)?.product))
}
