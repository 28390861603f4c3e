//! Seeded random instances for duality sweeps: small `(Γ,m)`-graphs, cylinder sets drawn from
//! the builtin catalog (k ≤ 3) and small targets.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cylinder::{self, CylinderSet, NepsKind};
use crate::error::Result;
use crate::graph::{Graph, Label};
use crate::perm::{Perm, PermGroup};

/// One duality instance.
#[derive(Clone, Debug)]
pub struct Triple {
    pub g: Graph,
    pub set: CylinderSet,
    pub h: Graph,
    /// Short description of the cylinder set.
    pub cylinders: String,
}

fn perm(images: &[usize]) -> Perm {
    Perm::from_images(images).expect("literal permutation")
}

/// A random cylinder set from the builtin catalog, with its name.
pub fn random_set(rng: &mut impl Rng, symmetric_only: bool) -> Result<(CylinderSet, String)> {
    let trivial = PermGroup::trivial;
    let s2 = || PermGroup::symmetric(2);
    let k2 = Graph::complete(2);
    let p2 = Graph::path(2);
    let choices: &[&str] = if symmetric_only {
        &["I1", "P1", "P2", "P3", "square", "cap", "cap/S2", "wedge/S2", "I2/S2", "cart(K2)/S2", "cat(K2)/S2", "I3/S3", "cat(P2)/Z2", "P1+P2", "cap+cart(K2)/S2"]
    } else {
        &["I1", "dI1", "P1", "P2", "P3", "dP2", "square", "cap", "cap/S2", "wedge/S2", "I2/S2", "dI2/S2", "cart(K2)/S2", "cat(K2)/S2", "contraction2/S2", "triangle", "I3/S3", "dI3/Z3", "cat(P2)/Z2", "P1+P2", "cap+cart(K2)/S2"]
    };
    let name = *choices.choose(rng).expect("non-empty choice list");
    let set = match name {
        "I1" => CylinderSet::single(cylinder::identity(1)?),
        "dI1" => CylinderSet::single(cylinder::directed_identity(1)?),
        "P1" => CylinderSet::single(cylinder::path(1)?),
        "P2" => CylinderSet::single(cylinder::path(2)?),
        "P3" => CylinderSet::single(cylinder::path(3)?),
        "dP2" => CylinderSet::single(cylinder::directed_path(2)?),
        "square" => CylinderSet::single(cylinder::square()?),
        "cap" => CylinderSet::check_coherent(vec![cylinder::cap()?], trivial(2))?,
        "cap/S2" => CylinderSet::check_coherent(vec![cylinder::cap()?], s2()?)?,
        "wedge/S2" => CylinderSet::check_coherent(vec![cylinder::wedge()?], s2()?)?,
        "I2/S2" => CylinderSet::check_coherent(vec![cylinder::identity(2)?], s2()?)?,
        "dI2/S2" => CylinderSet::check_coherent(vec![cylinder::directed_identity(2)?], s2()?)?,
        "cart(K2)/S2" => CylinderSet::check_coherent(vec![cylinder::neps(&k2, NepsKind::Cartesian)?], s2()?)?,
        "cat(K2)/S2" => CylinderSet::check_coherent(vec![cylinder::neps(&k2, NepsKind::Categorical)?], s2()?)?,
        "contraction2/S2" => CylinderSet::check_coherent(vec![cylinder::contraction(2)?], s2()?)?,
        "triangle" => CylinderSet::check_coherent(vec![cylinder::triangle()?], trivial(2))?,
        "I3/S3" => CylinderSet::check_coherent(vec![cylinder::identity(3)?], PermGroup::symmetric(3)?)?,
        "dI3/Z3" => CylinderSet::check_coherent(
            vec![cylinder::directed_identity(3)?],
            PermGroup::generate(3, &[perm(&[2, 3, 1])])?,
        )?,
        "cat(P2)/Z2" => CylinderSet::check_coherent(
            vec![cylinder::neps(&p2, NepsKind::Categorical)?],
            PermGroup::generate(3, &[perm(&[3, 2, 1])])?,
        )?,
        "P1+P2" => CylinderSet::check_coherent(vec![cylinder::path(1)?, cylinder::path(2)?], trivial(1))?,
        "cap+cart(K2)/S2" => CylinderSet::check_coherent(vec![cylinder::cap()?, cylinder::neps(&k2, NepsKind::Cartesian)?], s2()?)?,
        _ => unreachable!("every choice is handled"),
    };
    Ok((set, name.to_string()))
}

/// Random graph on `n` vertices with every pair (or ordered pair) present with probability `p`;
/// loops with probability `loops`.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64, loops: f64, symmetric: bool) -> Graph {
    let mut pairs = Vec::new();
    for u in 0..n {
        if rng.gen_bool(loops) {
            pairs.push((u, u));
        }
        for v in 0..n {
            if u != v && (!symmetric || u < v) && rng.gen_bool(p) {
                pairs.push((u, v));
            }
        }
    }
    if symmetric {
        let mut g = Graph::from_pairs(n, &[], false);
        for (u, v) in pairs {
            g.add_undirected(u, v, Label::plain());
        }
        g.make_symmetric().expect("undirected pairs are symmetric");
        g
    } else {
        Graph::from_pairs(n, &pairs, false)
    }
}

fn random_label(rng: &mut impl Rng, set: &CylinderSet) -> Label {
    let els = set.gamma().elements();
    let p = els.choose(rng).unwrap().clone();
    let q = els.choose(rng).unwrap().clone();
    Label::gamma(p, rng.gen_range(1..=set.m()), q)
}

/// Random reduced `(Γ,m)`-graph with at most `max_n` vertices and at least one arc.
pub fn random_gamma_graph(rng: &mut impl Rng, max_n: usize, max_m: usize, set: &CylinderSet, symmetric: bool) -> Graph {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_m);
    let mut g = Graph::from_pairs(n, &[], false);
    for _ in 0..m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        let l = random_label(rng, set);
        if symmetric {
            g.add_undirected(u, v, l);
        } else {
            g.add_edge(u, v, l);
        }
    }
    let mut g = g.reduced();
    if symmetric {
        g.make_symmetric().expect("undirected arcs pair up");
    }
    g
}

/// A directed-mode instance: `G` and `H` with at most 5 vertices.
pub fn random_triple(rng: &mut impl Rng) -> Result<Triple> {
    let (set, cylinders) = random_set(rng, false)?;
    let max_m = if set.k() == 3 { 3 } else { 5 };
    let g = random_gamma_graph(rng, 5, max_m, &set, false);
    let hn = rng.gen_range(2..=5);
    let sym = rng.gen_bool(0.6);
    let mut h = random_graph(rng, hn, 0.5, 0.1, sym);
    h.forget_symmetry();
    Ok(Triple { g, set, h, cylinders })
}

/// A symmetric-mode instance: symmetric `G`, cylinders and `H`.
pub fn random_symmetric_triple(rng: &mut impl Rng) -> Result<Triple> {
    let (set, cylinders) = random_set(rng, true)?;
    let max_m = if set.k() == 3 { 2 } else { 4 };
    let g = random_gamma_graph(rng, 4, max_m, &set, true);
    let hn = rng.gen_range(2..=4);
    let h = random_graph(rng, hn, 0.6, 0.1, true);
    Ok(Triple { g, set, h, cylinders })
}

/// `count` directed instances from `seed`.
pub fn battery(seed: u64, count: usize) -> Result<Vec<Triple>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_triple(&mut rng)).collect()
}

/// `count` symmetric instances from `seed`.
pub fn symmetric_battery(seed: u64, count: usize) -> Result<Vec<Triple>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_symmetric_triple(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batteries_are_deterministic_and_valid() {
        let a = battery(7, 20).unwrap();
        let b = battery(7, 20).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.g, y.g);
            assert_eq!(x.cylinders, y.cylinders);
            assert!(x.g.n() >= 1 && x.g.n() <= 5);
            assert!((0..x.g.n()).all(|v| !x.g.is_isolated(v)));
            assert!(x.set.k() <= 3);
        }
        for t in symmetric_battery(7, 10).unwrap() {
            assert!(t.g.is_symmetric_flagged() && t.set.is_symmetric() && t.h.is_symmetric());
        }
    }
}
