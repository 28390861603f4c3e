//! The duality `Hom_ℓ(G ⊠ C, H) ⇄ Hom_{Γ,m}(G, [C, H])`: retraction `r`, section `s`, unit and
//! counit, the functor actions `f ⊠ C` and `[C, f]`, and the closedness predicates.
//!
//! `r(σ)` sends `v` to the orbit representative of the tuple `σ(v#1), ..., σ(v#k)` and each arc
//! to the exponential arc recorded by the restriction of `σ` to its cylinder copy. `s(σ')` puts
//! `x_v = ⟨σ'(v)⟩ α_v` on the blow-up of `v`, then completes every copy by a pinned cylinder
//! homomorphism. Both are deterministic, and `r(s(σ')) = σ'`.

use std::collections::HashMap;

use serde::Serialize;

use crate::construct::{
    as_gamma_graph, cyl_product, cyl_product_symmetric, exponential, exponential_symmetric, gamma_label, orbit_rep,
    Exponential, ProductTrace,
};
use crate::cylinder::CylinderSet;
use crate::error::{Error, Result};
use crate::graph::{GammaLabel, Graph, Label};
use crate::hom::{extract_alphas_partial, validate, Hom, HomQuery, Mode, Semantics};
use crate::perm::Perm;

/// Outcome of a duality check on one triple `(G, C, H)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub count_product_side: u128,
    pub count_exponential_side: u128,
    pub exists_product_side: bool,
    pub exists_exponential_side: bool,
    pub exists_equiv: bool,
    /// `r(s(σ')) = σ'` for every enumerated `σ'`; vacuous in symmetric mode.
    pub retraction_section_identity: bool,
    pub round_trips_checked: usize,
    pub tight_on_g: bool,
    pub symmetric: bool,
}

impl DualityReport {
    /// Every field the duality theorem mandates holds.
    pub fn theorem_holds(&self) -> bool {
        self.exists_equiv && self.retraction_section_identity && self.count_product_side >= self.count_exponential_side
    }
}

/// A triple `(G, C, H)` with its product and exponential built once.
#[derive(Clone, Debug)]
pub struct Duality {
    pub g: Graph,
    /// `G` with integer labels read as `(id, j, id)`.
    pub g_gamma: Graph,
    pub set: CylinderSet,
    pub h: Graph,
    pub trace: ProductTrace,
    pub expo: Exponential,
    symmetric: bool,
}

impl Duality {
    pub fn new(g: &Graph, set: &CylinderSet, h: &Graph) -> Result<Duality> {
        Ok(Duality {
            g: g.clone(),
            g_gamma: as_gamma_graph(g, set.k())?,
            set: set.clone(),
            h: h.clone(),
            trace: cyl_product(g, set)?,
            expo: exponential(set, h)?,
            symmetric: false,
        })
    }

    /// Symmetric variant: symmetric product and exponential, pair-counted homomorphisms.
    pub fn symmetric(g: &Graph, set: &CylinderSet, h: &Graph) -> Result<Duality> {
        let mut g_gamma = as_gamma_graph(g, set.k())?;
        g_gamma.make_symmetric()?;
        let mut h = h.clone();
        h.make_symmetric()?;
        Ok(Duality {
            g: g.clone(),
            g_gamma,
            set: set.clone(),
            trace: cyl_product_symmetric(g, set)?,
            expo: exponential_symmetric(set, &h)?,
            h,
            symmetric: true,
        })
    }

    fn semantics(&self) -> Semantics {
        if self.symmetric {
            Semantics::Pairs
        } else {
            Semantics::Arcs
        }
    }

    pub fn product_query(&self) -> HomQuery<'_> {
        HomQuery::new(&self.trace.product, &self.h, Mode::Labeled).semantics(self.semantics())
    }

    pub fn exponential_query(&self) -> HomQuery<'_> {
        HomQuery::new(&self.g_gamma, &self.expo.graph, Mode::Gamma).semantics(self.semantics())
    }

    fn directed_only(&self, what: &str) -> Result<()> {
        if self.symmetric {
            return Err(Error::Domain(format!("{what} is implemented for the directed construction only")));
        }
        Ok(())
    }

    /// `r(σ)` for `σ ∈ Hom_ℓ(G ⊠ C, H)`.
    pub fn retraction(&self, sigma: &Hom) -> Result<Hom> {
        self.directed_only("the retraction")?;
        validate(sigma, &self.trace.product, &self.h, Mode::Labeled)?;
        let k = self.set.k();
        let gamma = self.set.gamma();
        let mut vmap = Vec::with_capacity(self.g.n());
        for u in 0..self.g.n() {
            let x: Vec<usize> = self.trace.blowups[u].iter().map(|&p| sigma.vmap[p]).collect();
            let (w, _) = orbit_rep(gamma, &x);
            let v = self.expo.vertex_of(&w).ok_or_else(|| {
                Error::Domain(format!("vertex {} lands on an isolated orbit of the exponential", self.g.name(u)))
            })?;
            vmap.push(v);
        }
        let mut emap = Vec::with_capacity(self.g.m());
        for (ei, e) in self.g.edges().iter().enumerate() {
            let lab = gamma_label(&e.label, k)?;
            let copy = self.trace.copies[ei].as_ref().expect("directed products copy every arc");
            let cyl = self.set.member(copy.cyl)?;
            let ys: Vec<usize> = cyl.y().iter().map(|&v| sigma.vmap[copy.vmap[v]]).collect();
            let zs: Vec<usize> = cyl.z().iter().map(|&v| sigma.vmap[copy.vmap[v]]).collect();
            let (w, c) = orbit_rep(gamma, &ys);
            let (w2, d) = orbit_rep(gamma, &zs);
            let (a, b) = (self.expo.vertex_of(&w).unwrap(), self.expo.vertex_of(&w2).unwrap());
            let f = self
                .expo
                .arc(a, b, &GammaLabel { pre: c, cyl: lab.cyl, post: d })
                .expect("a cylinder homomorphism always yields an exponential arc");
            emap.push(f);
        }
        let mut hom = Hom { vmap, emap, alphas: None };
        hom.alphas = Some(extract_alphas_partial(&hom, &self.g_gamma, &self.expo.graph)?);
        Ok(hom)
    }

    /// `s(σ')` for `σ' ∈ Hom_{Γ,m}(G, [C, H])`.
    pub fn section(&self, tau: &Hom) -> Result<Hom> {
        self.directed_only("the section")?;
        validate(tau, &self.g_gamma, &self.expo.graph, Mode::Gamma)?;
        let k = self.set.k();
        let alphas = extract_alphas_partial(tau, &self.g_gamma, &self.expo.graph)?;
        let p = &self.trace.product;
        let mut vmap = vec![usize::MAX; p.n()];
        let mut x = Vec::with_capacity(self.g.n());
        for u in 0..self.g.n() {
            let a = alphas[u].clone().unwrap_or_else(|| Perm::identity(k));
            let xu = a.act(&self.expo.tuples[tau.vmap[u]])?;
            for l in 0..k {
                vmap[self.trace.blowups[u][l]] = xu[l];
            }
            x.push(xu);
        }
        for (ei, e) in self.g.edges().iter().enumerate() {
            let lab = gamma_label(&e.label, k)?;
            let copy = self.trace.copies[ei].as_ref().expect("directed products copy every arc");
            let cyl = self.set.member(copy.cyl)?;
            // y_{pre(l)} sits on tail#l, z_{post(l)} on head#l
            let mut pins = Vec::with_capacity(2 * k);
            for l in 0..k {
                pins.push((cyl.y()[lab.pre.apply(l)], x[e.tail][l]));
                pins.push((cyl.z()[lab.post.apply(l)], x[e.head][l]));
            }
            let phi = HomQuery::new(cyl.graph(), &self.h, Mode::Labeled)
                .semantics(Semantics::Arcs)
                .pins(pins)
                .first()?
                .ok_or_else(|| Error::Domain(format!("no cylinder homomorphism completes arc {}", e.id)))?;
            for (cv, &pv) in copy.vmap.iter().enumerate() {
                if vmap[pv] == usize::MAX {
                    vmap[pv] = phi.vmap[cv];
                }
            }
        }
        let mut lowest: HashMap<(usize, usize, &Label), usize> = HashMap::new();
        for (i, f) in self.h.edges().iter().enumerate().rev() {
            lowest.insert((f.tail, f.head, &f.label), i);
        }
        let emap = p
            .edges()
            .iter()
            .map(|e| {
                lowest.get(&(vmap[e.tail], vmap[e.head], &e.label)).copied().ok_or_else(|| {
                    Error::Domain(format!("product arc {} has no image", e.id))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Hom { vmap, emap, alphas: None })
    }

    /// Enumerates both sides and fills a report; round trips stop after `limit` homomorphisms.
    pub fn report(&self, limit: usize) -> Result<DualityReport> {
        let count_product_side = self.product_query().count()?;
        let count_exponential_side = self.exponential_query().count()?;
        let exists_product_side = count_product_side > 0;
        let exists_exponential_side = count_exponential_side > 0;
        let mut ok = true;
        let mut checked = 0;
        if !self.symmetric {
            let mut failure = None;
            self.exponential_query().for_each(|tau| {
                let round = self.section(tau).and_then(|s| {
                    validate(&s, &self.trace.product, &self.h, Mode::Labeled)?;
                    self.retraction(&s)
                });
                match round {
                    Ok(r) => ok &= r.same_maps(tau),
                    Err(e) => failure = Some(e),
                }
                checked += 1;
                failure.is_none() && checked < limit
            })?;
            if let Some(e) = failure {
                return Err(e);
            }
        }
        Ok(DualityReport {
            count_product_side,
            count_exponential_side,
            exists_product_side,
            exists_exponential_side,
            exists_equiv: exists_product_side == exists_exponential_side,
            retraction_section_identity: ok,
            round_trips_checked: checked,
            tight_on_g: count_product_side == count_exponential_side,
            symmetric: self.symmetric,
        })
    }

    /// If `σ` is vertex-injective then so is `r(σ)`.
    pub fn vertex_injective_check(&self, sigma: &Hom) -> Result<bool> {
        Ok(!sigma.is_vertex_injective() || self.retraction(sigma)?.is_vertex_injective())
    }
}

/// Default cap on round trips per report.
pub const ROUND_TRIP_LIMIT: usize = 100_000;

/// Directed duality report for `(G, C, H)`.
pub fn check_duality(g: &Graph, set: &CylinderSet, h: &Graph) -> Result<DualityReport> {
    Duality::new(g, set, h)?.report(ROUND_TRIP_LIMIT)
}

/// Symmetric duality report (existence and counts under pair semantics).
pub fn check_duality_symmetric(g: &Graph, set: &CylinderSet, h: &Graph) -> Result<DualityReport> {
    Duality::symmetric(g, set, h)?.report(ROUND_TRIP_LIMIT)
}

/// `η_G = r(1_{G⊠C}) : G -> [C, G⊠C]`, with the triple it lives in.
pub fn unit(g: &Graph, set: &CylinderSet) -> Result<(Duality, Hom)> {
    let product = cyl_product(g, set)?.product;
    let d = Duality::new(g, set, &product)?;
    let eta = d.retraction(&Hom::identity(&d.trace.product))?;
    Ok((d, eta))
}

/// `ε_H = s(1_{[C,H]}) : [C,H] ⊠ C -> H`, with the triple it lives in.
pub fn counit(set: &CylinderSet, h: &Graph) -> Result<(Duality, Hom)> {
    let expo = exponential(set, h)?;
    let d = Duality::new(&expo.graph, set, h)?;
    let eps = d.section(&Hom::identity(&expo.graph))?;
    Ok((d, eps))
}

/// `f ⊠ C` for a gamma-mode homomorphism `f: G -> G'` between graphs without stabilizers.
/// Copy `e` maps identically onto copy `f(e)`; `u#l` goes to `f(u)#α_u(l)` with
/// `α_u = compose(pre(f(e))⁻¹, pre(e))` read at any arc meeting `u` (identity if isolated).
pub fn functor_product(f: &Hom, g: &Graph, g2: &Graph, tr: &ProductTrace, tr2: &ProductTrace) -> Result<Hom> {
    let k = tr.k;
    let (gg, gg2) = (as_gamma_graph(g, k)?, as_gamma_graph(g2, k)?);
    validate(f, &gg, &gg2, Mode::Gamma)?;
    let alpha = extract_alphas_partial(f, &gg, &gg2)?;
    let mut vmap = vec![usize::MAX; tr.product.n()];
    let mut emap = vec![usize::MAX; tr.product.m()];
    for ei in 0..g.m() {
        let (Some(c1), Some(c2)) = (&tr.copies[ei], &tr2.copies[f.emap[ei]]) else {
            return Err(Error::Domain("the product functor needs directed products".into()));
        };
        for (cv, &pv) in c1.vmap.iter().enumerate() {
            vmap[pv] = c2.vmap[cv];
        }
        for (ca, &pa) in c1.emap.iter().enumerate() {
            emap[pa] = c2.emap[ca];
        }
    }
    for u in 0..g.n() {
        let a = alpha[u].clone().unwrap_or_else(|| Perm::identity(k));
        for l in 0..k {
            let pv = tr.blowups[u][l];
            if vmap[pv] == usize::MAX {
                vmap[pv] = tr2.blowups[f.vmap[u]][a.apply(l)];
            }
        }
    }
    Ok(Hom { vmap, emap, alphas: None })
}

/// `[C, f]` for a labeled homomorphism `f: H -> H'`: `⟨x⟩ ↦ ⟨f(x)⟩` on vertices, and the arc
/// witnessed by `y ↦ x c⁻¹` goes to the arc witnessed by `y ↦ f(x c⁻¹)`.
pub fn functor_expo(f: &Hom, h: &Graph, h2: &Graph, e: &Exponential, e2: &Exponential) -> Result<Hom> {
    validate(f, h, h2, Mode::Labeled)?;
    let image = |t: &[usize]| -> Vec<usize> { t.iter().map(|&v| f.vmap[v]).collect() };
    let vertex = |rep: &[usize]| {
        e2.vertex_of(rep).ok_or_else(|| Error::Domain("image orbit is not a vertex of the target exponential".into()))
    };
    let vmap = e.tuples.iter().map(|t| vertex(&orbit_rep(&e2.gamma, &image(t)).0)).collect::<Result<Vec<_>>>()?;
    let mut emap = Vec::with_capacity(e.graph.m());
    for arc in e.graph.edges() {
        let lab = arc.label.as_gamma().expect("exponential arcs carry (Γ,m)-labels");
        let x = lab.pre.inverse().act(&e.tuples[arc.tail])?;
        let x2 = lab.post.inverse().act(&e.tuples[arc.head])?;
        let (w, c) = orbit_rep(&e2.gamma, &image(&x));
        let (w2, d) = orbit_rep(&e2.gamma, &image(&x2));
        let target = GammaLabel { pre: c, cyl: lab.cyl, post: d };
        let img = e2
            .arc(vertex(&w)?, vertex(&w2)?, &target)
            .ok_or_else(|| Error::Domain(format!("no image for exponential arc {}", arc.id)))?;
        emap.push(img);
    }
    let mut hom = Hom { vmap, emap, alphas: None };
    hom.alphas = Some(extract_alphas_partial(&hom, &e.graph, &e2.graph)?);
    Ok(hom)
}

fn use_symmetric(g: &Graph, set: &CylinderSet) -> bool {
    g.is_symmetric_flagged() && set.is_symmetric()
}

/// Lower-closed: `[C, H ⊠ C] -> H` in gamma mode. Symmetric constructions are used when `H`
/// is flagged symmetric and every cylinder is symmetric.
pub fn is_lower_closed(set: &CylinderSet, h: &Graph) -> Result<bool> {
    let k = set.k();
    let expo = if use_symmetric(h, set) {
        exponential_symmetric(set, &cyl_product_symmetric(h, set)?.product)?
    } else {
        exponential(set, &cyl_product(h, set)?.product)?
    };
    let hg = as_gamma_graph(h, k)?;
    HomQuery::new(&expo.graph, &hg, Mode::Gamma).exists()
}

/// Upper-closed: `G -> [C, G] ⊠ C` in labeled mode.
pub fn is_upper_closed(set: &CylinderSet, g: &Graph) -> Result<bool> {
    let sym = use_symmetric(g, set);
    let back = if sym {
        cyl_product_symmetric(&exponential_symmetric(set, g)?.graph, set)?.product
    } else {
        cyl_product(&exponential(set, g)?.graph, set)?.product
    };
    HomQuery::new(g, &back, Mode::Labeled).exists()
}
