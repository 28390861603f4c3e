//! Label-preserving isomorphism search for small multigraphs.
//!
//! Colour refinement on both graphs with a shared palette prunes candidates, then a
//! backtracking search extends a partial bijection one vertex at a time, checking the
//! labeled arc multiset between every mapped pair.

use std::collections::{BTreeMap, HashMap};

use crate::graph::{Graph, Label};

/// A vertex bijection plus the matching arc bijection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub vmap: Vec<usize>,
    pub emap: Vec<usize>,
}

struct Prepared {
    arcs: HashMap<(usize, usize), Vec<u32>>,
    nbrs: Vec<Vec<usize>>,
    colour: Vec<u32>,
}

fn label_ids<'a>(gs: &[&'a Graph]) -> BTreeMap<&'a Label, u32> {
    let mut ids = BTreeMap::new();
    for g in gs {
        for e in g.edges() {
            let next = ids.len() as u32;
            ids.entry(&e.label).or_insert(next);
        }
    }
    ids
}

fn prepare(g: &Graph, ids: &BTreeMap<&Label, u32>) -> Prepared {
    let mut arcs: HashMap<(usize, usize), Vec<u32>> = HashMap::new();
    let mut nbrs = vec![Vec::new(); g.n()];
    for e in g.edges() {
        arcs.entry((e.tail, e.head)).or_default().push(ids[&e.label]);
        nbrs[e.tail].push(e.head);
        nbrs[e.head].push(e.tail);
    }
    for v in arcs.values_mut() {
        v.sort_unstable();
    }
    for n in &mut nbrs {
        n.sort_unstable();
        n.dedup();
    }
    Prepared { arcs, nbrs, colour: vec![0; g.n()] }
}

/// Refines both colourings with one shared signature table so colours are comparable.
fn refine(a: &mut Prepared, b: &mut Prepared) {
    let empty = Vec::new();
    let mut rounds = a.colour.len() + 1;
    let mut classes = 0;
    while rounds > 0 {
        rounds -= 1;
        let mut table: BTreeMap<(u32, Vec<(u32, u8, Vec<u32>)>), u32> = BTreeMap::new();
        let sigs = |p: &Prepared| -> Vec<(u32, Vec<(u32, u8, Vec<u32>)>)> {
            (0..p.colour.len())
                .map(|v| {
                    let mut s = Vec::new();
                    for &w in &p.nbrs[v] {
                        let out = p.arcs.get(&(v, w)).unwrap_or(&empty).clone();
                        let inn = if v == w { Vec::new() } else { p.arcs.get(&(w, v)).unwrap_or(&empty).clone() };
                        s.push((p.colour[w], (v == w) as u8, [out, vec![u32::MAX], inn].concat()));
                    }
                    s.sort();
                    (p.colour[v], s)
                })
                .collect()
        };
        let sa = sigs(a);
        let sb = sigs(b);
        for s in sa.iter().chain(sb.iter()) {
            let next = table.len() as u32;
            table.entry(s.clone()).or_insert(next);
        }
        a.colour = sa.iter().map(|s| table[s]).collect();
        b.colour = sb.iter().map(|s| table[s]).collect();
        if table.len() == classes {
            break;
        }
        classes = table.len();
    }
}

/// Some label-preserving isomorphism `g -> h`, if one exists.
pub fn isomorphism(g: &Graph, h: &Graph) -> Option<Isomorphism> {
    isomorphism_pinned(g, h, &[])
}

pub fn are_isomorphic(g: &Graph, h: &Graph) -> bool {
    isomorphism(g, h).is_some()
}

/// Isomorphism search with some vertex images fixed in advance.
pub fn isomorphism_pinned(g: &Graph, h: &Graph, pins: &[(usize, usize)]) -> Option<Isomorphism> {
    if g.n() != h.n() || g.m() != h.m() {
        return None;
    }
    let ids = label_ids(&[g, h]);
    let mut a = prepare(g, &ids);
    let mut b = prepare(h, &ids);
    refine(&mut a, &mut b);
    let mut ca = a.colour.clone();
    let mut cb = b.colour.clone();
    ca.sort_unstable();
    cb.sort_unstable();
    if ca != cb {
        return None;
    }
    let n = g.n();
    let mut pinned = vec![None; n];
    for &(u, x) in pins {
        if a.colour[u] != b.colour[x] {
            return None;
        }
        pinned[u] = Some(x);
    }
    let class_size = |c: u32| a.colour.iter().filter(|&&x| x == c).count();
    // order: pinned first, then greedily the vertex with most already-ordered neighbours
    let mut order: Vec<usize> = pins.iter().map(|p| p.0).collect();
    let mut placed = vec![false; n];
    for &u in &order {
        placed[u] = true;
    }
    while order.len() < n {
        let next = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let linked = a.nbrs[v].iter().filter(|&&w| placed[w]).count();
                (linked, usize::MAX - class_size(a.colour[v]), a.nbrs[v].len(), usize::MAX - v)
            })
            .unwrap();
        placed[next] = true;
        order.push(next);
    }
    let mut st = IsoSearch { a: &a, b: &b, order: &order, pinned: &pinned, map: vec![usize::MAX; n], used: vec![false; n] };
    if !st.run(0) {
        return None;
    }
    let vmap = st.map;
    Some(Isomorphism { emap: match_arcs(g, h, &vmap, &ids), vmap })
}

struct IsoSearch<'a> {
    a: &'a Prepared,
    b: &'a Prepared,
    order: &'a [usize],
    pinned: &'a [Option<usize>],
    map: Vec<usize>,
    used: Vec<bool>,
}

impl IsoSearch<'_> {
    fn consistent(&self, u: usize, x: usize) -> bool {
        let empty = Vec::new();
        let same = |p: (usize, usize), q: (usize, usize)| {
            self.a.arcs.get(&p).unwrap_or(&empty) == self.b.arcs.get(&q).unwrap_or(&empty)
        };
        if !same((u, u), (x, x)) {
            return false;
        }
        for &w in &self.order[..] {
            let y = self.map[w];
            if y == usize::MAX || w == u {
                continue;
            }
            if !same((u, w), (x, y)) || !same((w, u), (y, x)) {
                return false;
            }
        }
        true
    }

    fn run(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let u = self.order[depth];
        let cands: Vec<usize> = match self.pinned[u] {
            Some(x) => vec![x],
            None => (0..self.b.colour.len()).filter(|&x| self.b.colour[x] == self.a.colour[u]).collect(),
        };
        for x in cands {
            if self.used[x] || !self.consistent(u, x) {
                continue;
            }
            self.map[u] = x;
            self.used[x] = true;
            if self.run(depth + 1) {
                return true;
            }
            self.map[u] = usize::MAX;
            self.used[x] = false;
        }
        false
    }
}

fn match_arcs(g: &Graph, h: &Graph, vmap: &[usize], ids: &BTreeMap<&Label, u32>) -> Vec<usize> {
    let mut pool: HashMap<(usize, usize, u32), Vec<usize>> = HashMap::new();
    for (i, e) in h.edges().iter().enumerate().rev() {
        pool.entry((e.tail, e.head, ids[&e.label])).or_default().push(i);
    }
    g.edges()
        .iter()
        .map(|e| {
            pool.get_mut(&(vmap[e.tail], vmap[e.head], ids[&e.label]))
                .and_then(|v| v.pop())
                .expect("vertex isomorphism preserves arc multisets")
        })
        .collect()
}

/// All automorphisms fixing nothing in advance, in search order; capped at `limit`.
pub fn automorphisms(g: &Graph, limit: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let n = g.n();
    // enumerate by pinning each vertex image in turn would repeat work; a plain
    // permutation search is fine for the small graphs this is used on
    let ids = label_ids(&[g]);
    let mut a = prepare(g, &ids);
    let mut b = prepare(g, &ids);
    refine(&mut a, &mut b);
    let order: Vec<usize> = (0..n).collect();
    let pinned = vec![None; n];
    let mut st = IsoSearch { a: &a, b: &b, order: &order, pinned: &pinned, map: vec![usize::MAX; n], used: vec![false; n] };
    collect_all(&mut st, 0, &mut out, limit);
    out
}

fn collect_all(st: &mut IsoSearch<'_>, depth: usize, out: &mut Vec<Vec<usize>>, limit: usize) {
    if out.len() >= limit {
        return;
    }
    if depth == st.order.len() {
        out.push(st.map.clone());
        return;
    }
    let u = st.order[depth];
    for x in 0..st.b.colour.len() {
        if st.b.colour[x] != st.a.colour[u] || st.used[x] || !st.consistent(u, x) {
            continue;
        }
        st.map[u] = x;
        st.used[x] = true;
        collect_all(st, depth + 1, out, limit);
        st.map[u] = usize::MAX;
        st.used[x] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_orders() {
        let c5 = Graph::cycle(5);
        let iso = isomorphism(&c5, &c5).unwrap();
        assert_eq!(iso.vmap.len(), 5);
        assert!(isomorphism(&c5, &Graph::cycle(6)).is_none());
    }

    #[test]
    fn relabelled_cycle() {
        let a = Graph::cycle(6);
        let b = Graph::from_pairs(6, &[(0, 2), (2, 4), (4, 1), (1, 3), (3, 5), (5, 0)], true);
        let iso = isomorphism(&a, &b).unwrap();
        for e in a.edges() {
            assert!(b.has_arc(iso.vmap[e.tail], iso.vmap[e.head]));
        }
        for (i, &f) in iso.emap.iter().enumerate() {
            assert_eq!(b.edge(f).tail, iso.vmap[a.edge(i).tail]);
        }
    }

    #[test]
    fn labels_and_direction_matter() {
        let a = Graph::from_pairs(2, &[(0, 1)], false);
        let mut b = Graph::from_pairs(2, &[], false);
        b.add_edge(0, 1, Label::name("x"));
        assert!(isomorphism(&a, &b).is_none());
        let c = Graph::from_pairs(3, &[(0, 1), (1, 2)], false);
        let d = Graph::from_pairs(3, &[(0, 1), (2, 1)], false);
        assert!(isomorphism(&c, &d).is_none());
    }

    #[test]
    fn regular_non_isomorphic() {
        // two 3-regular graphs on 6 vertices: prism and K_{3,3}
        let prism = Graph::from_pairs(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)], true);
        let k33 = Graph::from_pairs(6, &[(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)], true);
        assert!(isomorphism(&prism, &k33).is_none());
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(automorphisms(&Graph::cycle(5), 100).len(), 10);
        assert_eq!(automorphisms(&Graph::complete(4), 100).len(), 24);
    }
}
