//! The cylindrical product `G ⊠_Γ C` and the exponential graph `[C, H]_Γ`.
//!
//! Product: every vertex `v` of `G` is blown up to `v#1..v#k`; an arc `u -> v` labeled
//! `(p, j, q)` receives a copy of cylinder `j` whose base vertex `y_{p(l)}` is glued to `u#l`
//! and `z_{q(l)}` to `v#l` (so the copy's bases read `y p` and `z q` under the right action).
//! Parallel arcs with equal labels are identified last.
//!
//! Exponential: vertices are lexicographically least tuples of Γ-orbits on `V(H)^k`. A
//! homomorphism of cylinder `j` sending `y` to `x` and `z` to `x'` yields the arc
//! `⟨x⟩ -> ⟨x'⟩` labeled `(c, j, d)` where `c` is the least twist with `x c = ⟨x⟩` and `d` the
//! least with `x' d = ⟨x'⟩`. Vertices with nontrivial stabilizers record them, since a twist
//! at such a vertex is only defined up to the stabilizer.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::cylinder::{is_list_automorphism, Cylinder, CylinderSet, UnionFind};
use crate::error::{Error, Result};
use crate::graph::{GammaLabel, Graph, Label};
use crate::hom::{HomQuery, Mode, Semantics};
use crate::perm::{Perm, PermGroup};

/// Cap on the number of orbit representatives an exponential may materialize.
pub const MAX_REPRESENTATIVES: usize = 10_000;

/// Where one copy of a cylinder landed in the product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopyMap {
    /// 1-based cylinder index.
    pub cyl: usize,
    /// Cylinder vertex -> product vertex.
    pub vmap: Vec<usize>,
    /// Cylinder arc -> product arc.
    pub emap: Vec<usize>,
}

/// The product together with the bookkeeping needed by the duality maps.
#[derive(Clone, Debug)]
pub struct ProductTrace {
    pub product: Graph,
    /// `blowups[v][l]` is the product vertex `v#(l+1)`.
    pub blowups: Vec<Vec<usize>>,
    /// One entry per arc of `G`; `None` for twins skipped in symmetric mode.
    pub copies: Vec<Option<CopyMap>>,
    /// Per product arc: the first (source arc, cylinder arc) that produced it.
    pub provenance: Vec<(usize, usize)>,
    pub k: usize,
}

impl ProductTrace {
    pub fn to_json(&self, g: &Graph) -> serde_json::Value {
        let mut v = self.product.to_json();
        let blowups: BTreeMap<&str, Vec<&str>> = (0..g.n())
            .map(|u| (g.name(u), self.blowups[u].iter().map(|&x| self.product.name(x)).collect()))
            .collect();
        let mut prov: Vec<serde_json::Value> = self
            .provenance
            .iter()
            .enumerate()
            .map(|(p, &(e, ce))| {
                let cyl = self.copies[e].as_ref().map(|c| c.cyl).unwrap_or(0);
                serde_json::json!({"edge": self.product.edge(p).id, "source": g.edge(e).id, "cylinder": cyl, "cylinder_edge": ce})
            })
            .collect();
        prov.sort_by(|a, b| a["edge"].as_str().cmp(&b["edge"].as_str()));
        v["blowups"] = serde_json::to_value(blowups).unwrap();
        v["provenance"] = serde_json::Value::Array(prov);
        v
    }
}

/// Reads an arc label of `G` as a (Γ,m)-label of degree `k`; a name that parses as an integer
/// `j` stands for `(id, j, id)`.
pub fn gamma_label(label: &Label, k: usize) -> Result<GammaLabel> {
    match label {
        Label::Gamma(g) => {
            if g.pre.degree() != k || g.post.degree() != k {
                return Err(Error::Label(format!("label {label} has twists of the wrong degree (expected {k})")));
            }
            Ok(g.clone())
        }
        Label::Name(s) => match s.parse::<usize>() {
            Ok(j) => Ok(GammaLabel { pre: Perm::identity(k), cyl: j, post: Perm::identity(k) }),
            Err(_) => Err(Error::Label(format!("label {s:?} is not a (Γ,m)-label"))),
        },
    }
}

fn pairing_of(g: &Graph) -> Result<Vec<usize>> {
    match g.twin_vec() {
        Some(t) => Ok(t.to_vec()),
        None => {
            let mut c = g.clone();
            c.make_symmetric()?;
            Ok(c.twin_vec().unwrap().to_vec())
        }
    }
}

/// `G ⊠_Γ C` with every arc of `G` replaced independently.
pub fn cyl_product(g: &Graph, c: &CylinderSet) -> Result<ProductTrace> {
    product_impl(g, c, false)
}

/// Symmetric product: one copy per twin pair of `G`; requires symmetric `G` and cylinders.
pub fn cyl_product_symmetric(g: &Graph, c: &CylinderSet) -> Result<ProductTrace> {
    product_impl(g, c, true)
}

struct RawArc {
    tail: usize,
    head: usize,
    label: Label,
    src: usize,
    cyl_arc: usize,
}

fn product_impl(g: &Graph, set: &CylinderSet, symmetric: bool) -> Result<ProductTrace> {
    let k = set.k();
    let g_twin = if symmetric {
        if !g.is_symmetric() {
            return Err(Error::Symmetry("the base graph is not symmetric".into()));
        }
        if !set.is_symmetric() {
            return Err(Error::Symmetry("a cylinder is not symmetric".into()));
        }
        Some(pairing_of(g)?)
    } else {
        None
    };
    let cyl_twins: Vec<Option<Vec<usize>>> = set
        .members()
        .iter()
        .map(|c| if symmetric { pairing_of(c.graph()).map(Some) } else { Ok(None) })
        .collect::<Result<_>>()?;

    let mut names: Vec<String> = Vec::new();
    let mut blow = vec![Vec::with_capacity(k); g.n()];
    for v in 0..g.n() {
        for l in 1..=k {
            blow[v].push(names.len());
            names.push(format!("{}#{l}", g.name(v)));
        }
    }
    let mut raw: Vec<RawArc> = Vec::new();
    let mut copies: Vec<Option<(usize, Vec<usize>)>> = vec![None; g.m()];
    let mut glue: Vec<(usize, usize)> = Vec::new();
    for (ei, e) in g.edges().iter().enumerate() {
        if let Some(t) = &g_twin {
            if t[ei] < ei {
                continue;
            }
        }
        let lab = gamma_label(&e.label, k)?;
        let cyl = set.member(lab.cyl)?;
        for p in [&lab.pre, &lab.post] {
            if !set.gamma().contains(p) {
                return Err(Error::Label(format!("twist {p} on arc {} is not in Γ", e.id)));
            }
            if !is_list_automorphism(cyl.graph(), cyl.y(), p) {
                return Err(Error::NotATwist(format!("{p} on arc {} is not a base automorphism", e.id)));
            }
        }
        let cg = cyl.graph();
        let base = names.len();
        for v in 0..cg.n() {
            names.push(format!("{}:{}", e.id, cg.name(v)));
        }
        for l in 0..k {
            glue.push((base + cyl.y()[lab.pre.apply(l)], blow[e.tail][l]));
            glue.push((base + cyl.z()[lab.post.apply(l)], blow[e.head][l]));
        }
        for (ai, a) in cg.edges().iter().enumerate() {
            raw.push(RawArc { tail: base + a.tail, head: base + a.head, label: a.label.clone(), src: ei, cyl_arc: ai });
        }
        copies[ei] = Some((lab.cyl, (base..base + cg.n()).collect()));
    }
    let mut uf = UnionFind::new(names.len());
    for (a, b) in glue {
        uf.union(a, b);
    }
    let (class, cnames) = uf.classes(|v| names[v].clone());
    let mut product = Graph::new();
    for n in cnames {
        product.add_vertex(n)?;
    }
    // identify parallel arcs with equal labels (per twin pair in symmetric mode)
    let mut raw_to_arc = vec![usize::MAX; raw.len()];
    let mut provenance = Vec::new();
    let arc_id = |raw: &RawArc| format!("{}:{}", g.edge(raw.src).id, set.member(copies[raw.src].as_ref().unwrap().0).unwrap().graph().edge(raw.cyl_arc).id);
    if symmetric {
        let mut keyed: HashMap<(usize, usize, Label), usize> = HashMap::new();
        // raw arcs of one copy are contiguous; index by (copy start, cylinder arc)
        let mut start_of: HashMap<usize, usize> = HashMap::new();
        for (i, r) in raw.iter().enumerate() {
            start_of.entry(r.src).or_insert(i);
        }
        for i in 0..raw.len() {
            let r = &raw[i];
            let ctw = cyl_twins[copies[r.src].as_ref().unwrap().0 - 1].as_ref().unwrap();
            let j = start_of[&r.src] + ctw[r.cyl_arc];
            if j < i {
                continue;
            }
            let a = (class[r.tail], class[r.head], r.label.clone());
            let b = (class[raw[j].tail], class[raw[j].head], raw[j].label.clone());
            let (key, a_is_key) = if a <= b { (a.clone(), true) } else { (b.clone(), false) };
            let p = match keyed.get(&key) {
                Some(&p) => p,
                None => {
                    let rev = (key.1, key.0, key.2.reversed());
                    let id = arc_id(if a_is_key { r } else { &raw[j] });
                    let p = product.add_edge_with_id(id.clone(), key.0, key.1, key.2.clone())?;
                    product.add_edge_with_id(format!("{id}'"), rev.0, rev.1, rev.2)?;
                    let first = if a_is_key { (r.src, r.cyl_arc) } else { (raw[j].src, raw[j].cyl_arc) };
                    let second = if a_is_key { (raw[j].src, raw[j].cyl_arc) } else { (r.src, r.cyl_arc) };
                    provenance.push(first);
                    provenance.push(second);
                    keyed.insert(key, p);
                    p
                }
            };
            let (ra, rb) = if a_is_key { (p, p + 1) } else { (p + 1, p) };
            raw_to_arc[i] = ra;
            raw_to_arc[j] = rb;
        }
        product.make_symmetric()?;
    } else {
        let mut keyed: HashMap<(usize, usize, Label), usize> = HashMap::new();
        for (i, r) in raw.iter().enumerate() {
            let key = (class[r.tail], class[r.head], r.label.clone());
            let p = match keyed.get(&key) {
                Some(&p) => p,
                None => {
                    let p = product.add_edge_with_id(arc_id(r), key.0, key.1, key.2.clone())?;
                    provenance.push((r.src, r.cyl_arc));
                    keyed.insert(key, p);
                    p
                }
            };
            raw_to_arc[i] = p;
        }
    }
    let blowups = blow.iter().map(|b| b.iter().map(|&v| class[v]).collect()).collect();
    let mut copy_maps: Vec<Option<CopyMap>> = vec![None; g.m()];
    let mut cursor = 0;
    for (ei, c) in copies.iter().enumerate() {
        if let Some((j, verts)) = c {
            let cg = set.member(*j)?.graph();
            let emap = (0..cg.m()).map(|a| raw_to_arc[cursor + a]).collect();
            cursor += cg.m();
            copy_maps[ei] = Some(CopyMap { cyl: *j, vmap: verts.iter().map(|&v| class[v]).collect(), emap });
        }
    }
    Ok(ProductTrace { product, blowups, copies: copy_maps, provenance, k })
}

/// Least tuple in the Γ-orbit of `x` and the least `β` with `x β` equal to it.
pub fn orbit_rep(gamma: &PermGroup, x: &[usize]) -> (Vec<usize>, Perm) {
    let mut best: Option<(Vec<usize>, Perm)> = None;
    for g in gamma.elements() {
        let y = g.act_unchecked(x);
        // elements are sorted, so the first hit of a tuple carries its least twist
        if best.as_ref().is_none_or(|(b, _)| y < *b) {
            best = Some((y, g.clone()));
        }
    }
    best.expect("groups contain the identity")
}

/// An exponential graph plus the orbit bookkeeping used by the duality maps.
#[derive(Clone, Debug)]
pub struct Exponential {
    pub graph: Graph,
    /// Representative tuple of each vertex.
    pub tuples: Vec<Vec<usize>>,
    pub gamma: PermGroup,
    index: HashMap<Vec<usize>, usize>,
    arcs: HashMap<(usize, usize, GammaLabel), usize>,
}

impl Exponential {
    pub fn vertex_of(&self, rep: &[usize]) -> Option<usize> {
        self.index.get(rep).copied()
    }

    /// Arc `w -> w'` with the given label, if present.
    pub fn arc(&self, w: usize, w2: usize, label: &GammaLabel) -> Option<usize> {
        self.arcs.get(&(w, w2, label.clone())).copied()
    }

    pub fn stabilizer(&self, w: usize) -> Vec<Perm> {
        self.gamma.stabilizer(&self.tuples[w])
    }

    /// Least element of the coset `c S_w` for a twist `c` read at vertex `w`.
    pub fn canonical_twist(&self, w: usize, c: &Perm) -> Perm {
        crate::hom::canonical_right(&self.stabilizer(w), c)
    }
}

/// Options for [`exponential_with`].
#[derive(Clone, Copy, Debug, Default)]
pub struct ExpoOptions {
    pub symmetric: bool,
    /// Keep every orbit representative, including isolated ones.
    pub keep_isolated: bool,
}

/// `[C, H]_Γ` in directed mode.
pub fn exponential(c: &CylinderSet, h: &Graph) -> Result<Exponential> {
    exponential_with(c, h, ExpoOptions::default())
}

/// Symmetric exponential: requires symmetric cylinders and a symmetric `H`.
pub fn exponential_symmetric(c: &CylinderSet, h: &Graph) -> Result<Exponential> {
    exponential_with(c, h, ExpoOptions { symmetric: true, keep_isolated: false })
}

pub fn exponential_with(set: &CylinderSet, h: &Graph, opts: ExpoOptions) -> Result<Exponential> {
    if opts.symmetric {
        if !h.is_symmetric() {
            return Err(Error::Symmetry("target graph is not symmetric".into()));
        }
        if !set.is_symmetric() {
            return Err(Error::Symmetry("a cylinder is not symmetric".into()));
        }
    }
    let k = set.k();
    let gamma = set.gamma();
    let mut reps: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut rep_cache: HashMap<Vec<usize>, (Vec<usize>, Perm)> = HashMap::new();
    let mut edges: BTreeSet<(Vec<usize>, Vec<usize>, usize, Perm, Perm)> = BTreeSet::new();
    let mut failure: Option<Error> = None;
    for (ji, cyl) in set.members().iter().enumerate() {
        let proj: Vec<usize> = cyl.y().iter().chain(cyl.z()).copied().collect();
        let q = HomQuery::new(cyl.graph(), h, Mode::Labeled).semantics(Semantics::Arcs);
        q.projections(&proj, |img| {
            if failure.is_some() {
                return;
            }
            let mut canon = |x: &[usize]| {
                rep_cache.entry(x.to_vec()).or_insert_with(|| orbit_rep(gamma, x)).clone()
            };
            let (w, c) = canon(&img[..k]);
            let (w2, d) = canon(&img[k..]);
            reps.insert(w.clone());
            reps.insert(w2.clone());
            if reps.len() > MAX_REPRESENTATIVES {
                failure = Some(Error::ResourceLimit(format!("more than {MAX_REPRESENTATIVES} representatives")));
            }
            edges.insert((w, w2, ji + 1, c, d));
        })?;
        if let Some(e) = failure.take() {
            return Err(e);
        }
    }
    if opts.keep_isolated {
        let total = (h.n() as f64).powi(k as i32);
        if total > (MAX_REPRESENTATIVES as f64) * (gamma.order() as f64) {
            return Err(Error::ResourceLimit(format!("{total} tuples exceed the representative cap")));
        }
        let mut t = vec![0usize; k];
        if h.n() > 0 {
            loop {
                reps.insert(orbit_rep(gamma, &t).0);
                let mut i = k;
                let mut done = true;
                while i > 0 {
                    i -= 1;
                    t[i] += 1;
                    if t[i] < h.n() {
                        done = false;
                        break;
                    }
                    t[i] = 0;
                }
                if done {
                    break;
                }
            }
        }
    }
    let tuples: Vec<Vec<usize>> = reps.into_iter().collect();
    let mut graph = Graph::new();
    let mut index = HashMap::new();
    for (i, t) in tuples.iter().enumerate() {
        let name = if k == 1 {
            h.name(t[0]).to_string()
        } else {
            format!("({})", t.iter().map(|&v| h.name(v)).collect::<Vec<_>>().join(","))
        };
        graph.add_vertex(name)?;
        index.insert(t.clone(), i);
    }
    let mut arcs = HashMap::new();
    for (n, (w, w2, j, c, d)) in edges.into_iter().enumerate() {
        let (a, b) = (index[&w], index[&w2]);
        let label = GammaLabel { pre: c, cyl: j, post: d };
        let e = graph.add_edge_with_id(format!("e{n}"), a, b, Label::Gamma(label.clone()))?;
        arcs.insert((a, b, label), e);
    }
    if !gamma.is_trivial() {
        let st = tuples.iter().map(|t| gamma.stabilizer(t)).collect();
        graph.set_stabilizers(Some(st));
    }
    if opts.symmetric {
        // the arc set is already symmetric; this pairs it and doubles lone symmetric loops
        graph = graph.symmetrize();
    }
    Ok(Exponential { graph, tuples, gamma: gamma.clone(), index, arcs })
}

/// `Gl(C)`: the product of a single loop labeled `(λ, 1, γ)` with `C`; a `(k,k)`-cylinder.
pub fn generalized_loop(c: &Cylinder, lambda: &Perm, gamma: &Perm) -> Result<Cylinder> {
    let auts = c.base_automorphisms()?;
    let group = PermGroup::generate(c.k(), &auts)?;
    let set = CylinderSet::check_coherent(vec![c.clone()], group)?;
    let mut g = Graph::new();
    g.add_vertex("v")?;
    g.add_edge_with_id("loop", 0, 0, Label::gamma(lambda.clone(), 1, gamma.clone()))?;
    let tr = cyl_product(&g, &set)?;
    let b = tr.blowups[0].clone();
    Cylinder::with_derived_eps(tr.product, b.clone(), b)
}

/// Plain-cylinder decomposition of a vertex-surjective homomorphism `σ: G -> H` between
/// simple symmetric graphs: returns `H_ℓ` (one arc per edge of `H`, labeled `(id, j, id)`)
/// and the cylinders, so that `red(H_ℓ ⊠ C) ≅ G`.
pub fn cylinders_from_surjection(g: &Graph, h: &Graph, vmap: &[usize]) -> Result<(Graph, CylinderSet)> {
    if vmap.len() != g.n() || vmap.iter().any(|&x| x >= h.n()) {
        return Err(Error::Domain("vertex map does not fit the graphs".into()));
    }
    let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); h.n()];
    for (v, &x) in vmap.iter().enumerate() {
        fibers[x].push(v);
    }
    if let Some(x) = fibers.iter().position(|f| f.is_empty()) {
        return Err(Error::Domain(format!("vertex {} of the target has an empty fiber", h.name(x))));
    }
    let k = fibers.iter().map(|f| f.len()).max().unwrap_or(1).max(1);
    let adj = |a: usize, b: usize| g.has_arc(a, b) || g.has_arc(b, a);
    let mut h_l = Graph::new();
    for n in h.names() {
        h_l.add_vertex(n.clone())?;
    }
    let mut members = Vec::new();
    let mut seen = BTreeSet::new();
    for e in h.edges() {
        let (x, y) = (e.tail.min(e.head), e.tail.max(e.head));
        if x == y || !seen.insert((x, y)) {
            continue;
        }
        let mut c = Graph::new();
        let yv: Vec<usize> = (1..=k).map(|i| c.add_vertex(format!("y{i}")).unwrap()).collect();
        let zv: Vec<usize> = (1..=k).map(|i| c.add_vertex(format!("z{i}")).unwrap()).collect();
        for (a, &ga) in fibers[x].iter().enumerate() {
            for (b, &gb) in fibers[y].iter().enumerate() {
                if adj(ga, gb) {
                    c.add_undirected(yv[a], zv[b], Label::plain());
                }
            }
        }
        c.make_symmetric()?;
        members.push(Cylinder::with_derived_eps(c, yv, zv)?);
        h_l.add_edge(x, y, Label::untwisted(k, members.len()));
    }
    if members.is_empty() {
        return Err(Error::Domain("target has no edges".into()));
    }
    let set = CylinderSet::check_coherent(members, PermGroup::trivial(k))?;
    Ok((h_l, set))
}

/// `G` with every label read as a (Γ,m)-label of degree `k` (see [`gamma_label`]).
pub fn as_gamma_graph(g: &Graph, k: usize) -> Result<Graph> {
    g.map_labels(|l| gamma_label(l, k).map(Label::Gamma))
}
