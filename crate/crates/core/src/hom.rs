//! Homomorphism search in three modes: plain digraphs, label-preserving, and (Γ,m)-graphs.
//!
//! A homomorphism is a pair `(vmap, emap)`. Search is backtracking over source vertices in a
//! connectivity-greedy order; arcs are resolved once both ends are placed. In the plain and
//! labeled modes arcs between fixed endpoints are independent, so counting multiplies the
//! number of candidate arcs instead of enumerating them.
//!
//! In gamma mode each source vertex `u` carries a twist `α_u` with
//! `ℓ(e) = compose(ℓ_H(σe), α_u)` at every end of every arc at `u`. When the target carries
//! per-vertex stabilizers (exponential graphs), `α_u` is only defined up to the left action of
//! the stabilizer of `σ(u)` and is stored as the least element of that class.
//!
//! Two arc semantics exist. `Arcs` maps every source arc independently. `Pairs` (used when both
//! graphs carry a symmetric pairing) maps one representative of each twin pair and sends the
//! twin to the twin, so an undirected edge is counted once.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::graph::{Graph, Label};
use crate::perm::Perm;

/// Default search-node budget; `CYL_NODE_BUDGET` overrides it.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

fn env_budget() -> u64 {
    static B: OnceLock<u64> = OnceLock::new();
    *B.get_or_init(|| {
        std::env::var("CYL_NODE_BUDGET").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_NODE_BUDGET)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Labels ignored.
    Plain,
    /// Labels must be equal.
    Labeled,
    /// (Γ,m)-homomorphisms: equal cylinder index plus a consistent twist per vertex.
    Gamma,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "plain" => Ok(Mode::Plain),
            "labeled" => Ok(Mode::Labeled),
            "gamma" => Ok(Mode::Gamma),
            _ => Err(Error::Usage(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Semantics {
    Arcs,
    Pairs,
}

/// A homomorphism; `alphas` is present in gamma mode (`None` entries for isolated vertices).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hom {
    pub vmap: Vec<usize>,
    pub emap: Vec<usize>,
    pub alphas: Option<Vec<Option<Perm>>>,
}

impl Hom {
    /// `other ∘ self` on vertices and arcs. Alphas are dropped; recompute with [`extract_alphas`].
    pub fn then(&self, other: &Hom) -> Hom {
        Hom {
            vmap: self.vmap.iter().map(|&v| other.vmap[v]).collect(),
            emap: self.emap.iter().map(|&e| other.emap[e]).collect(),
            alphas: None,
        }
    }

    pub fn identity(g: &Graph) -> Hom {
        Hom { vmap: (0..g.n()).collect(), emap: (0..g.m()).collect(), alphas: None }
    }

    /// Equality as maps, ignoring cached alphas.
    pub fn same_maps(&self, other: &Hom) -> bool {
        self.vmap == other.vmap && self.emap == other.emap
    }

    pub fn is_vertex_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.vmap.iter().all(|v| seen.insert(*v))
    }
}

/// A homomorphism query.
#[derive(Clone, Debug)]
pub struct HomQuery<'a> {
    pub source: &'a Graph,
    pub target: &'a Graph,
    pub mode: Mode,
    pub semantics: Option<Semantics>,
    pub pins: Vec<(usize, usize)>,
    pub budget: Option<u64>,
}

impl<'a> HomQuery<'a> {
    pub fn new(source: &'a Graph, target: &'a Graph, mode: Mode) -> Self {
        HomQuery { source, target, mode, semantics: None, pins: Vec::new(), budget: None }
    }

    pub fn pins(mut self, pins: Vec<(usize, usize)>) -> Self {
        self.pins = pins;
        self
    }

    pub fn semantics(mut self, s: Semantics) -> Self {
        self.semantics = Some(s);
        self
    }

    pub fn budget(mut self, b: u64) -> Self {
        self.budget = Some(b);
        self
    }

    fn effective_semantics(&self) -> Semantics {
        self.semantics.unwrap_or(if self.source.is_symmetric_flagged() && self.target.is_symmetric_flagged() {
            Semantics::Pairs
        } else {
            Semantics::Arcs
        })
    }

    pub fn exists(&self) -> Result<bool> {
        let mut eng = Engine::new(self)?;
        for comp in eng.components() {
            if !eng.exists_on(&comp)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn count(&self) -> Result<u128> {
        let mut eng = Engine::new(self)?;
        let mut total: u128 = 1;
        for comp in eng.components() {
            let c = eng.count_on(&comp)?;
            if c == 0 {
                return Ok(0);
            }
            total = total.checked_mul(c).ok_or_else(|| Error::ResourceLimit("count overflows u128".into()))?;
        }
        Ok(total)
    }

    /// Calls `f` on every homomorphism until it returns `false`.
    pub fn for_each(&self, mut f: impl FnMut(&Hom) -> bool) -> Result<()> {
        let mut eng = Engine::new(self)?;
        let all: Vec<usize> = (0..self.source.n()).collect();
        eng.enumerate_on(&all, &mut f)
    }

    pub fn enumerate(&self) -> Result<Vec<Hom>> {
        let mut out = Vec::new();
        self.for_each(|h| {
            out.push(h.clone());
            true
        })?;
        Ok(out)
    }

    pub fn first(&self) -> Result<Option<Hom>> {
        let mut out = None;
        self.for_each(|h| {
            out = Some(h.clone());
            false
        })?;
        Ok(out)
    }

    /// Distinct images of the vertices `proj` over all homomorphisms, in search order.
    pub fn projections(&self, proj: &[usize], mut f: impl FnMut(&[usize])) -> Result<()> {
        let mut eng = Engine::new(self)?;
        eng.project(proj, &mut f)
    }
}

/// Minimal representative of the class `{compose(s, a) : s ∈ stab}`.
pub fn canonical_left(stab: &[Perm], a: &Perm) -> Perm {
    stab.iter().map(|s| s.then(a)).min().unwrap_or_else(|| a.clone())
}

/// Minimal representative of the class `{compose(a, s) : s ∈ stab}`.
pub fn canonical_right(stab: &[Perm], a: &Perm) -> Perm {
    stab.iter().map(|s| a.then(s)).min().unwrap_or_else(|| a.clone())
}

/// Which end of an arc a label component belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    /// The initial end, `ℓ⁻`.
    Tail,
    /// The terminal end, `ℓ⁺`.
    Head,
}

fn gamma_of(g: &Graph, e: usize) -> Result<&crate::graph::GammaLabel> {
    g.edge(e).label.as_gamma().ok_or_else(|| Error::Label(format!("arc {} has no (Γ,m)-label", g.edge(e).id)))
}

fn end_perm(g: &Graph, e: usize, end: End) -> Result<&Perm> {
    let l = gamma_of(g, e)?;
    Ok(match end {
        End::Tail => &l.pre,
        End::Head => &l.post,
    })
}

fn end_vertex(g: &Graph, e: usize, end: End) -> usize {
    match end {
        End::Tail => g.edge(e).tail,
        End::Head => g.edge(e).head,
    }
}

/// `Δ^{ab}(e1, e2) = ℓ^a(e1)⁻¹ ℓ^b(e2)` with juxtaposition read left to right,
/// i.e. `compose(ℓ^b(e2), ℓ^a(e1)⁻¹)`.
pub fn label_difference(g: &Graph, e1: usize, e2: usize, a: End, b: End) -> Result<Perm> {
    if end_vertex(g, e1, a) != end_vertex(g, e2, b) {
        return Err(Error::Domain(format!("arcs {} and {} do not meet at the named ends", g.edge(e1).id, g.edge(e2).id)));
    }
    end_perm(g, e2, b)?.compose(&end_perm(g, e1, a)?.inverse())
}

fn stabilizer_of(h: &Graph, x: usize) -> &[Perm] {
    h.stabilizers().map(|s| s[x].as_slice()).unwrap_or(&[])
}

/// The twist forced at `end` of source arc `e` when it maps to target arc `f`.
fn forced_alpha(g: &Graph, h: &Graph, e: usize, f: usize, end: End) -> Result<Perm> {
    let raw = end_perm(h, f, end)?.inverse().compose(end_perm(g, e, end)?)?;
    Ok(canonical_left(stabilizer_of(h, end_vertex(h, f, end)), &raw))
}

/// The per-vertex twists of a gamma-mode homomorphism; `None` for isolated source vertices.
pub fn extract_alphas_partial(hom: &Hom, g: &Graph, h: &Graph) -> Result<Vec<Option<Perm>>> {
    let mut alpha: Vec<Option<Perm>> = vec![None; g.n()];
    for e in 0..g.m() {
        for end in [End::Tail, End::Head] {
            let a = forced_alpha(g, h, e, hom.emap[e], end)?;
            let u = end_vertex(g, e, end);
            match &alpha[u] {
                None => alpha[u] = Some(a),
                Some(b) if *b == a => {}
                Some(_) => {
                    return Err(Error::Domain(format!("no consistent twist at vertex {}", g.name(u))));
                }
            }
        }
    }
    Ok(alpha)
}

/// Like [`extract_alphas_partial`] but every vertex must be determined.
pub fn extract_alphas(hom: &Hom, g: &Graph, h: &Graph) -> Result<Vec<Perm>> {
    extract_alphas_partial(hom, g, h)?
        .into_iter()
        .enumerate()
        .map(|(u, a)| a.ok_or_else(|| Error::Underdetermined(format!("vertex {} meets no arc", g.name(u)))))
        .collect()
}

/// Checks that `hom` is a homomorphism `g -> h` in the given mode.
pub fn validate(hom: &Hom, g: &Graph, h: &Graph, mode: Mode) -> Result<()> {
    if hom.vmap.len() != g.n() || hom.emap.len() != g.m() {
        return Err(Error::Domain("map sizes do not match the source".into()));
    }
    if hom.vmap.iter().any(|&x| x >= h.n()) || hom.emap.iter().any(|&f| f >= h.m()) {
        return Err(Error::Domain("map leaves the target".into()));
    }
    for (i, e) in g.edges().iter().enumerate() {
        let f = h.edge(hom.emap[i]);
        if f.tail != hom.vmap[e.tail] || f.head != hom.vmap[e.head] {
            return Err(Error::Domain(format!("arc {} is not mapped along its endpoints", e.id)));
        }
        let ok = match mode {
            Mode::Plain => true,
            Mode::Labeled => f.label == e.label,
            Mode::Gamma => gamma_of(g, i)?.cyl == gamma_of(h, hom.emap[i])?.cyl,
        };
        if !ok {
            return Err(Error::Domain(format!("arc {} changes label", e.id)));
        }
    }
    if mode == Mode::Gamma {
        extract_alphas_partial(hom, g, h)?;
    }
    Ok(())
}

/// Existence of homomorphisms both ways.
pub fn hom_equivalent(g: &Graph, h: &Graph, mode: Mode) -> Result<bool> {
    Ok(HomQuery::new(g, h, mode).exists()? && HomQuery::new(h, g, mode).exists()?)
}

struct Engine<'a> {
    g: &'a Graph,
    h: &'a Graph,
    mode: Mode,
    pairs: bool,
    /// Source arcs that are searched (all arcs, or one per twin pair).
    active: Vec<bool>,
    /// Target arcs by (tail, head), in index order.
    tgt: HashMap<(usize, usize), Vec<usize>>,
    ekey_g: Vec<u32>,
    ekey_h: Vec<u32>,
    domain: Vec<Vec<usize>>,
    adj: Vec<Vec<usize>>,
    nodes: u64,
    budget: u64,
}

struct Plan {
    order: Vec<usize>,
    /// Arcs resolved when `order[d]` is placed.
    new_arcs: Vec<Vec<usize>>,
    /// First depth of an independent tail of the order (count shortcut).
    indep_from: usize,
}

impl<'a> Engine<'a> {
    fn new(q: &HomQuery<'a>) -> Result<Engine<'a>> {
        let (g, h) = (q.source, q.target);
        let pairs = q.effective_semantics() == Semantics::Pairs;
        if pairs && !(g.is_symmetric_flagged() && h.is_symmetric_flagged()) {
            return Err(Error::Symmetry("pair semantics needs symmetric source and target".into()));
        }
        let mut keys: HashMap<Label, u32> = HashMap::new();
        let mut key = |l: &Label| -> Result<u32> {
            Ok(match q.mode {
                Mode::Plain => 0,
                Mode::Labeled => {
                    let n = keys.len() as u32;
                    *keys.entry(l.clone()).or_insert(n)
                }
                Mode::Gamma => match l {
                    Label::Gamma(gl) => gl.cyl as u32,
                    Label::Name(s) => return Err(Error::Label(format!("label {s:?} is not a (Γ,m)-label"))),
                },
            })
        };
        let ekey_g = g.edges().iter().map(|e| key(&e.label)).collect::<Result<Vec<_>>>()?;
        let ekey_h = h.edges().iter().map(|e| key(&e.label)).collect::<Result<Vec<_>>>()?;
        if q.mode == Mode::Gamma {
            let deg = |gr: &Graph| gr.edges().first().and_then(|e| e.label.as_gamma()).map(|l| l.pre.degree());
            if let (Some(a), Some(b)) = (deg(g), deg(h)) {
                if a != b {
                    return Err(Error::Degree(format!("twists of degree {a} and {b}")));
                }
            }
        }
        let active: Vec<bool> = match g.twin_vec() {
            Some(t) if pairs => (0..g.m()).map(|e| e <= t[e]).collect(),
            _ => vec![true; g.m()],
        };
        let mut tgt: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, e) in h.edges().iter().enumerate() {
            tgt.entry((e.tail, e.head)).or_default().push(i);
        }
        let mut adj = vec![Vec::new(); g.n()];
        for (i, e) in g.edges().iter().enumerate() {
            if active[i] {
                adj[e.tail].push(i);
                if e.head != e.tail {
                    adj[e.head].push(i);
                }
            }
        }
        // necessary condition: every (direction, key) at u must occur at the image
        // a target loop also serves as an out-arc and an in-arc
        let sig = |gr: &Graph, keys: &[u32], v: usize, target: bool| -> [Vec<u32>; 3] {
            let mut s: [Vec<u32>; 3] = Default::default();
            for (i, e) in gr.edges().iter().enumerate() {
                if e.tail == v && e.head == v {
                    s[2].push(keys[i]);
                    if target {
                        s[0].push(keys[i]);
                        s[1].push(keys[i]);
                    }
                } else if e.tail == v {
                    s[0].push(keys[i]);
                } else if e.head == v {
                    s[1].push(keys[i]);
                }
            }
            for x in &mut s {
                x.sort_unstable();
                x.dedup();
            }
            s
        };
        let sh: Vec<[Vec<u32>; 3]> = (0..h.n()).map(|x| sig(h, &ekey_h, x, true)).collect();
        let subset = |a: &[u32], b: &[u32]| a.iter().all(|k| b.binary_search(k).is_ok());
        let mut pinned: Vec<Option<usize>> = vec![None; g.n()];
        for &(u, x) in &q.pins {
            if u >= g.n() || x >= h.n() {
                return Err(Error::Domain("pin outside the graphs".into()));
            }
            if pinned[u].is_some_and(|y| y != x) {
                pinned[u] = Some(usize::MAX);
            } else {
                pinned[u] = Some(x);
            }
        }
        let domain = (0..g.n())
            .map(|u| {
                let su = sig(g, &ekey_g, u, false);
                let fits = |x: usize| (0..3).all(|i| subset(&su[i], &sh[x][i]));
                match pinned[u] {
                    Some(x) if x < h.n() && fits(x) => vec![x],
                    Some(_) => Vec::new(),
                    None => (0..h.n()).filter(|&x| fits(x)).collect(),
                }
            })
            .collect();
        Ok(Engine {
            g,
            h,
            mode: q.mode,
            pairs,
            active,
            tgt,
            ekey_g,
            ekey_h,
            domain,
            adj,
            nodes: 0,
            budget: q.budget.unwrap_or_else(env_budget),
        })
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::ResourceLimit(format!("search exceeded {} nodes", self.budget)));
        }
        Ok(())
    }

    fn other_end(&self, e: usize, u: usize) -> usize {
        let ed = self.g.edge(e);
        if ed.tail == u {
            ed.head
        } else {
            ed.tail
        }
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let n = self.g.n();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            let mut members = Vec::new();
            comp[s] = id;
            while let Some(u) = stack.pop() {
                members.push(u);
                for &e in &self.adj[u] {
                    let w = self.other_end(e, u);
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Greedy order over `verts`: `first` in the given order, then the vertex with most placed
    /// neighbours (ties: smaller domain, larger degree, smaller index).
    fn plan(&self, verts: &[usize], first: &[usize], indep_tail: bool) -> Plan {
        let n = self.g.n();
        let mut placed = vec![false; n];
        // for counting, hold back an independent set of low-degree vertices to the end
        let mut held = vec![false; n];
        if indep_tail {
            let mut cand: Vec<usize> = verts.iter().copied().filter(|v| !first.contains(v)).collect();
            cand.sort_by_key(|&v| (self.adj[v].len(), v));
            for v in cand {
                let blocked = self.adj[v].iter().any(|&e| {
                    let w = self.other_end(e, v);
                    w != v && held[w]
                });
                if !blocked && !self.adj[v].is_empty() {
                    held[v] = true;
                }
            }
        }
        let mut order: Vec<usize> = first.to_vec();
        for &v in first {
            placed[v] = true;
        }
        let front = verts.iter().filter(|&&v| !held[v]).count();
        while order.len() < front {
            let next = verts
                .iter()
                .copied()
                .filter(|&v| !placed[v] && !held[v])
                .max_by_key(|&v| {
                    let linked = self.adj[v].iter().filter(|&&e| placed[self.other_end(e, v)]).count();
                    (linked, usize::MAX - self.domain[v].len(), self.adj[v].len(), usize::MAX - v)
                })
                .unwrap();
            placed[next] = true;
            order.push(next);
        }
        let indep_from = order.len();
        order.extend(verts.iter().copied().filter(|&v| held[v]));
        let pos: HashMap<usize, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let new_arcs = order
            .iter()
            .enumerate()
            .map(|(d, &u)| {
                let mut arcs: Vec<usize> = self.adj[u]
                    .iter()
                    .copied()
                    .filter(|&e| {
                        let w = self.other_end(e, u);
                        pos.get(&w).is_some_and(|&p| p <= d)
                    })
                    .collect();
                arcs.sort_unstable();
                arcs.dedup();
                arcs
            })
            .collect();
        Plan { order, new_arcs, indep_from }
    }

    /// Target arcs compatible with source arc `e` under the current vertex map (labels only).
    fn candidates(&self, e: usize, vmap: &[usize]) -> impl Iterator<Item = usize> + '_ {
        let ed = self.g.edge(e);
        let key = self.ekey_g[e];
        let list = self.tgt.get(&(vmap[ed.tail], vmap[ed.head])).map(|v| v.as_slice()).unwrap_or(&[]);
        list.iter().copied().filter(move |&f| {
            if self.ekey_h[f] != key {
                return false;
            }
            if self.mode == Mode::Labeled && self.g.edge(e).label != self.h.edge(f).label {
                return false;
            }
            if self.pairs && self.h.edge(f).tail == self.h.edge(f).head {
                // twin loops with the same label are one undirected loop
                let t = self.h.twin(f).unwrap();
                if t < f && (self.mode == Mode::Plain || self.h.edge(t).label == self.h.edge(f).label) {
                    return false;
                }
            }
            true
        })
    }

    fn arc_count(&self, e: usize, vmap: &[usize]) -> u128 {
        self.candidates(e, vmap).count() as u128
    }

    fn exists_on(&mut self, verts: &[usize]) -> Result<bool> {
        let plan = self.plan(verts, &[], false);
        let mut st = State::new(self.g.n(), self.g.m());
        let mut found = false;
        self.search(&plan, 0, &mut st, &mut |_, _| {
            found = true;
            false
        })?;
        Ok(found)
    }

    fn count_on(&mut self, verts: &[usize]) -> Result<u128> {
        let gamma = self.mode == Mode::Gamma;
        let plan = self.plan(verts, &[], !gamma);
        let mut st = State::new(self.g.n(), self.g.m());
        let mut total: u128 = 0;
        let mut overflow = false;
        if gamma {
            self.search(&plan, 0, &mut st, &mut |_, _| {
                total += 1;
                true
            })?;
        } else {
            self.count_rec(&plan, 0, &mut st, 1, &mut total, &mut overflow)?;
        }
        if overflow {
            return Err(Error::ResourceLimit("count overflows u128".into()));
        }
        Ok(total)
    }

    fn count_rec(&mut self, plan: &Plan, d: usize, st: &mut State, acc: u128, total: &mut u128, of: &mut bool) -> Result<()> {
        if d == plan.indep_from {
            let mut prod = acc;
            for dd in d..plan.order.len() {
                let u = plan.order[dd];
                let mut s: u128 = 0;
                for i in 0..self.domain[u].len() {
                    let x = self.domain[u][i];
                    self.tick()?;
                    st.vmap[u] = x;
                    let mut c: u128 = 1;
                    for &e in &plan.new_arcs[dd] {
                        c *= self.arc_count(e, &st.vmap);
                        if c == 0 {
                            break;
                        }
                    }
                    s += c;
                }
                st.vmap[u] = usize::MAX;
                match prod.checked_mul(s) {
                    Some(p) => prod = p,
                    None => {
                        *of = true;
                        return Ok(());
                    }
                }
                if prod == 0 {
                    return Ok(());
                }
            }
            match total.checked_add(prod) {
                Some(t) => *total = t,
                None => *of = true,
            }
            return Ok(());
        }
        let u = plan.order[d];
        for i in 0..self.domain[u].len() {
            let x = self.domain[u][i];
            self.tick()?;
            st.vmap[u] = x;
            let mut c: u128 = 1;
            for &e in &plan.new_arcs[d] {
                c *= self.arc_count(e, &st.vmap);
                if c == 0 {
                    break;
                }
            }
            if c > 0 {
                match acc.checked_mul(c) {
                    Some(a) => self.count_rec(plan, d + 1, st, a, total, of)?,
                    None => *of = true,
                }
            }
        }
        st.vmap[u] = usize::MAX;
        Ok(())
    }

    fn enumerate_on(&mut self, verts: &[usize], f: &mut dyn FnMut(&Hom) -> bool) -> Result<()> {
        let plan = self.plan(verts, &[], false);
        let mut st = State::new(self.g.n(), self.g.m());
        let gamma = self.mode == Mode::Gamma;
        let g = self.g;
        let twins = self.pairs.then(|| (g.twin_vec().unwrap().to_vec(), self.h.twin_vec().unwrap().to_vec()));
        self.search(&plan, 0, &mut st, &mut |eng, st| {
            // expand independent arc choices (non-gamma) into full arc maps
            let arcs: Vec<usize> = (0..g.m()).filter(|&e| eng.active[e]).collect();
            let choices: Vec<Vec<usize>> = if gamma {
                arcs.iter().map(|&e| vec![st.emap[e]]).collect()
            } else {
                arcs.iter().map(|&e| eng.candidates(e, &st.vmap).collect()).collect()
            };
            let mut idx = vec![0usize; arcs.len()];
            loop {
                let mut emap = vec![usize::MAX; g.m()];
                for (i, &e) in arcs.iter().enumerate() {
                    emap[e] = choices[i][idx[i]];
                }
                if let Some((tg, th)) = &twins {
                    for e in 0..g.m() {
                        if emap[e] == usize::MAX {
                            emap[e] = th[emap[tg[e]]];
                        }
                    }
                }
                let alphas = gamma.then(|| st.alpha.clone());
                if !f(&Hom { vmap: st.vmap.clone(), emap, alphas }) {
                    return false;
                }
                // odometer
                let mut i = arcs.len();
                loop {
                    if i == 0 {
                        return true;
                    }
                    i -= 1;
                    idx[i] += 1;
                    if idx[i] < choices[i].len() {
                        break;
                    }
                    idx[i] = 0;
                }
            }
        })?;
        Ok(())
    }

    fn project(&mut self, proj: &[usize], f: &mut dyn FnMut(&[usize])) -> Result<()> {
        let comps = self.components();
        // components without projected vertices only need to exist
        for c in &comps {
            if !c.iter().any(|v| proj.contains(v)) && !self.exists_on(c)? {
                return Ok(());
            }
        }
        let mut first: Vec<usize> = Vec::new();
        for &p in proj {
            if !first.contains(&p) {
                first.push(p);
            }
        }
        let verts: Vec<usize> = comps.iter().filter(|c| c.iter().any(|v| proj.contains(v))).flatten().copied().collect();
        // order projected vertices greedily among themselves so pruning applies early
        let plan0 = self.plan(&first, &[], false);
        let plan = self.plan(&verts, &plan0.order, false);
        let cut = first.len();
        let mut st = State::new(self.g.n(), self.g.m());
        self.project_rec(&plan, 0, cut, &mut st, proj, f)
    }

    fn project_rec(&mut self, plan: &Plan, d: usize, cut: usize, st: &mut State, proj: &[usize], f: &mut dyn FnMut(&[usize])) -> Result<()> {
        if d == cut {
            let mut found = false;
            self.search(plan, d, st, &mut |_, _| {
                found = true;
                false
            })?;
            if found {
                let img: Vec<usize> = proj.iter().map(|&p| st.vmap[p]).collect();
                f(&img);
            }
            return Ok(());
        }
        let u = plan.order[d];
        for i in 0..self.domain[u].len() {
            let x = self.domain[u][i];
            self.tick()?;
            st.vmap[u] = x;
            if plan.new_arcs[d].iter().all(|&e| self.candidates(e, &st.vmap).next().is_some()) {
                if self.mode == Mode::Gamma {
                    return Err(Error::Usage("projection is not supported in gamma mode".into()));
                }
                self.project_rec(plan, d + 1, cut, st, proj, f)?;
            }
        }
        st.vmap[u] = usize::MAX;
        Ok(())
    }

    /// Backtracking from depth `d`; `leaf` returns false to stop. Returns false once stopped.
    fn search(&mut self, plan: &Plan, d: usize, st: &mut State, leaf: &mut dyn FnMut(&Engine<'a>, &State) -> bool) -> Result<bool> {
        if d == plan.order.len() {
            return Ok(leaf(self, st));
        }
        let u = plan.order[d];
        for i in 0..self.domain[u].len() {
            let x = self.domain[u][i];
            self.tick()?;
            st.vmap[u] = x;
            let cont = if self.mode == Mode::Gamma {
                self.assign_arcs(plan, d, 0, st, leaf)?
            } else if plan.new_arcs[d].iter().all(|&e| self.candidates(e, &st.vmap).next().is_some()) {
                self.search(plan, d + 1, st, leaf)?
            } else {
                true
            };
            if !cont {
                st.vmap[u] = usize::MAX;
                return Ok(false);
            }
        }
        st.vmap[u] = usize::MAX;
        Ok(true)
    }

    /// Gamma mode: choose images for the arcs resolved at depth `d`, keeping twists consistent.
    fn assign_arcs(&mut self, plan: &Plan, d: usize, i: usize, st: &mut State, leaf: &mut dyn FnMut(&Engine<'a>, &State) -> bool) -> Result<bool> {
        if i == plan.new_arcs[d].len() {
            return self.search(plan, d + 1, st, leaf);
        }
        let e = plan.new_arcs[d][i];
        let cands: Vec<usize> = self.candidates(e, &st.vmap).collect();
        let (t, hd) = (self.g.edge(e).tail, self.g.edge(e).head);
        for f in cands {
            self.tick()?;
            let at = forced_alpha(self.g, self.h, e, f, End::Tail)?;
            let ah = forced_alpha(self.g, self.h, e, f, End::Head)?;
            if st.alpha[t].as_ref().is_some_and(|a| *a != at) {
                continue;
            }
            let saved_t = st.alpha[t].clone();
            st.alpha[t] = Some(at);
            if st.alpha[hd].as_ref().is_some_and(|a| *a != ah) {
                st.alpha[t] = saved_t;
                continue;
            }
            let saved_h = st.alpha[hd].clone();
            st.alpha[hd] = Some(ah);
            st.emap[e] = f;
            let cont = self.assign_arcs(plan, d, i + 1, st, leaf)?;
            st.emap[e] = usize::MAX;
            st.alpha[hd] = saved_h;
            st.alpha[t] = saved_t;
            if !cont {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

struct State {
    vmap: Vec<usize>,
    emap: Vec<usize>,
    alpha: Vec<Option<Perm>>,
}

impl State {
    fn new(n: usize, m: usize) -> State {
        State { vmap: vec![usize::MAX; n], emap: vec![usize::MAX; m], alpha: vec![None; n] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_count(g: &Graph, h: &Graph) -> u128 {
        // every vertex map, times the product of parallel-arc choices
        let n = g.n();
        let mut total = 0u128;
        let mut vm = vec![0usize; n];
        loop {
            let mut c = 1u128;
            for e in g.edges() {
                c *= h.edges().iter().filter(|f| f.tail == vm[e.tail] && f.head == vm[e.head] && f.label == e.label).count() as u128;
            }
            total += c;
            let mut i = 0;
            loop {
                if i == n {
                    return total;
                }
                vm[i] += 1;
                if vm[i] < h.n() {
                    break;
                }
                vm[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn small_counts() {
        let k2 = Graph::complete(2);
        let k3 = Graph::complete(3);
        assert_eq!(HomQuery::new(&k2, &k3, Mode::Plain).count().unwrap(), 6);
        assert_eq!(HomQuery::new(&Graph::cycle(5), &k3, Mode::Plain).count().unwrap(), 30);
        assert!(!HomQuery::new(&k3, &Graph::cycle(5), Mode::Plain).exists().unwrap());
        assert!(!hom_equivalent(&Graph::cycle(5), &k3, Mode::Plain).unwrap());
        assert!(hom_equivalent(&Graph::cycle(6), &k2, Mode::Plain).unwrap());
    }

    #[test]
    fn appendix_maps_c7_to_c3() {
        // α_V(i) = i mod 3 style wrap and β_V folding back: both are homomorphisms C7 -> C3
        let c7 = Graph::cycle(7);
        let c3 = Graph::cycle(3);
        let homs = HomQuery::new(&c7, &c3, Mode::Plain).enumerate().unwrap();
        let alpha = vec![0, 1, 2, 0, 1, 2, 1];
        let beta = vec![0, 1, 0, 1, 0, 1, 2];
        assert!(homs.iter().any(|h| h.vmap == alpha));
        assert!(homs.iter().any(|h| h.vmap == beta));
        for h in &homs {
            validate(h, &c7, &c3, Mode::Plain).unwrap();
        }
    }

    #[test]
    fn pins_restrict() {
        let k3 = Graph::complete(3);
        let q = HomQuery::new(&k3, &k3, Mode::Plain).pins(vec![(0, 2)]);
        assert_eq!(q.count().unwrap(), 2);
        assert!(q.enumerate().unwrap().iter().all(|h| h.vmap[0] == 2));
    }

    #[test]
    fn isolated_vertices_multiply() {
        let mut g = Graph::complete(2);
        g.add_vertex("w").unwrap();
        assert_eq!(HomQuery::new(&g, &Graph::complete(3), Mode::Plain).count().unwrap(), 18);
    }

    #[test]
    fn pair_semantics_counts_loops_once() {
        let mut l = Graph::new();
        l.add_vertex("a").unwrap();
        l.add_undirected(0, 0, Label::plain());
        l.make_symmetric().unwrap();
        let lp = l.clone();
        assert_eq!(HomQuery::new(&l, &lp, Mode::Plain).count().unwrap(), 1);
        assert_eq!(HomQuery::new(&l, &lp, Mode::Plain).semantics(Semantics::Arcs).count().unwrap(), 4);
        let h = HomQuery::new(&l, &lp, Mode::Plain).first().unwrap().unwrap();
        assert_eq!(h.emap.len(), 2);
    }

    #[test]
    fn label_difference_cases() {
        let pi = Perm::from_images(&[2, 1]).unwrap();
        let id = Perm::identity(2);
        let mut g = Graph::new();
        for v in ["a", "b", "c"] {
            g.add_vertex(v).unwrap();
        }
        g.add_edge(0, 1, Label::gamma(id.clone(), 1, pi.clone()));
        g.add_edge(1, 2, Label::gamma(id.clone(), 1, id.clone()));
        assert!(label_difference(&g, 0, 0, End::Head, End::Head).unwrap().is_identity());
        assert_eq!(label_difference(&g, 0, 1, End::Head, End::Tail).unwrap(), pi);
        assert!(label_difference(&g, 0, 1, End::Tail, End::Tail).is_err());
    }

    #[test]
    fn alphas_of_shift() {
        let pi = Perm::from_images(&[2, 1]).unwrap();
        let mut g = Graph::new();
        for v in ["a", "b", "c"] {
            g.add_vertex(v).unwrap();
        }
        g.add_edge(0, 1, Label::gamma(pi.clone(), 1, pi.clone()));
        g.add_edge(1, 2, Label::gamma(pi.clone(), 1, pi.clone()));
        let grp = crate::perm::PermGroup::symmetric(2).unwrap();
        let h = g.alpha_shift(&vec![pi.clone(); 3], &grp).unwrap();
        let hom = Hom::identity(&g);
        validate(&hom, &g, &h, Mode::Gamma).unwrap();
        assert_eq!(extract_alphas(&hom, &g, &h).unwrap(), vec![pi.clone(); 3]);
        assert!(extract_alphas(&Hom::identity(&g), &g, &g).unwrap().iter().all(|a| a.is_identity()));
        let mut iso = g.clone();
        iso.add_vertex("z").unwrap();
        let hom = Hom { vmap: vec![0, 1, 2, 0], emap: vec![0, 1], alphas: None };
        assert!(matches!(extract_alphas(&hom, &iso, &g), Err(Error::Underdetermined(_))));
    }

    #[test]
    fn budget_is_enforced() {
        let (c9, k5) = (Graph::cycle(9), Graph::complete(5));
        let q = HomQuery::new(&c9, &k5, Mode::Plain).budget(10);
        assert!(matches!(q.count(), Err(Error::ResourceLimit(_))));
    }

    fn arb_graph(n: usize, labels: usize) -> impl Strategy<Value = Graph> {
        proptest::collection::vec((0..n, 0..n, 0..labels), 0..7).prop_map(move |arcs| {
            let mut g = Graph::new();
            for i in 0..n {
                g.add_vertex(format!("v{i}")).unwrap();
            }
            for (a, b, l) in arcs {
                g.add_edge(a, b, Label::name(l.to_string()));
            }
            g
        })
    }

    fn arb_gamma_graph(n: usize) -> impl Strategy<Value = Graph> {
        proptest::collection::vec((0..n, 0..n, 0..2usize, any::<bool>(), any::<bool>()), 1..6).prop_map(move |arcs| {
            let ps = [Perm::identity(2), Perm::from_images(&[2, 1]).unwrap()];
            let mut g = Graph::new();
            for i in 0..n {
                g.add_vertex(format!("v{i}")).unwrap();
            }
            for (a, b, j, p, q) in arcs {
                g.add_edge(a, b, Label::gamma(ps[p as usize].clone(), j + 1, ps[q as usize].clone()));
            }
            g
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn count_matches_brute_force_and_enumeration(g in arb_graph(4, 2), h in arb_graph(3, 2)) {
            let q = HomQuery::new(&g, &h, Mode::Labeled);
            let c = q.count().unwrap();
            prop_assert_eq!(c, brute_count(&g, &h));
            let all = q.enumerate().unwrap();
            prop_assert_eq!(all.len() as u128, c);
            for hom in &all {
                prop_assert!(validate(hom, &g, &h, Mode::Labeled).is_ok());
            }
            prop_assert_eq!(q.exists().unwrap(), c > 0);
        }

        #[test]
        fn gamma_homs_satisfy_both_characterizations(g in arb_gamma_graph(3), h in arb_gamma_graph(3)) {
            let q = HomQuery::new(&g, &h, Mode::Gamma);
            let all = q.enumerate().unwrap();
            prop_assert_eq!(all.len() as u128, q.count().unwrap());
            for hom in &all {
                validate(hom, &g, &h, Mode::Gamma).unwrap();
                // Δ preserved for every pair of arc ends meeting at a vertex
                for e1 in 0..g.m() {
                    for e2 in 0..g.m() {
                        for a in [End::Tail, End::Head] {
                            for b in [End::Tail, End::Head] {
                                if let Ok(dg) = label_difference(&g, e1, e2, a, b) {
                                    let dh = label_difference(&h, hom.emap[e1], hom.emap[e2], a, b).unwrap();
                                    prop_assert_eq!(dg, dh);
                                }
                            }
                        }
                    }
                }
                // parallel arcs with one image carry equal labels
                for e1 in 0..g.m() {
                    for e2 in 0..g.m() {
                        let parallel = g.edge(e1).tail == g.edge(e2).tail && g.edge(e1).head == g.edge(e2).head;
                        if parallel && hom.emap[e1] == hom.emap[e2] {
                            prop_assert_eq!(&g.edge(e1).label, &g.edge(e2).label);
                        }
                    }
                }
                // the α-shifted target receives the same map as a labeled hom
                let alpha: Vec<Perm> = hom.alphas.as_ref().unwrap().iter().map(|a| a.clone().unwrap_or_else(|| Perm::identity(2))).collect();
                let grp = crate::perm::PermGroup::symmetric(2).unwrap();
                let inv: Vec<Perm> = alpha.iter().map(|a| a.inverse()).collect();
                let shifted_src = g.alpha_shift(&inv, &grp).unwrap();
                let plain = Hom { vmap: hom.vmap.clone(), emap: hom.emap.clone(), alphas: None };
                let ok = validate(&plain, &shifted_src, &h, Mode::Labeled).is_ok();
                prop_assert!(ok);
            }
        }
    }
}
