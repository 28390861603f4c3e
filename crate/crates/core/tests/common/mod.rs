//! Independent oracles: textbook definitions over boolean adjacency matrices, with no use of
//! the cylinder machinery.
#![allow(dead_code)]

use cylgraph::{Graph, Label};
use rand::Rng;

pub type Adj = Vec<Vec<bool>>;

/// Arc relation of a graph (labels and multiplicities ignored).
pub fn adjacency(g: &Graph) -> Adj {
    let mut a = vec![vec![false; g.n()]; g.n()];
    for e in g.edges() {
        a[e.tail][e.head] = true;
    }
    a
}

/// Plain symmetric graph from a symmetric relation; a loop becomes one undirected loop.
pub fn from_adj(a: &Adj) -> Graph {
    let n = a.len();
    let mut g = Graph::from_pairs(n, &[], false);
    for u in 0..n {
        for v in u..n {
            if a[u][v] {
                g.add_undirected(u, v, Label::plain());
            }
        }
    }
    g.make_symmetric().unwrap();
    g
}

/// Directed plain graph from an arbitrary relation.
pub fn from_adj_directed(a: &Adj) -> Graph {
    let n = a.len();
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if a[u][v] {
                pairs.push((u, v));
            }
        }
    }
    Graph::from_pairs(n, &pairs, false)
}

pub fn random_simple(rng: &mut impl Rng, n: usize, p: f64) -> Adj {
    let mut a = vec![vec![false; n]; n];
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                a[u][v] = true;
                a[v][u] = true;
            }
        }
    }
    a
}

/// A random connected simple graph: a random spanning tree plus extra edges.
pub fn random_connected(rng: &mut impl Rng, n: usize, p: f64) -> Adj {
    let mut a = random_simple(rng, n, p);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

pub fn cycle(n: usize) -> Adj {
    let mut a = vec![vec![false; n]; n];
    for i in 0..n {
        a[i][(i + 1) % n] = true;
        a[(i + 1) % n][i] = true;
    }
    a
}

pub fn complete(n: usize) -> Adj {
    (0..n).map(|i| (0..n).map(|j| i != j).collect()).collect()
}

pub fn undirected_edge_count(a: &Adj) -> (usize, usize) {
    let n = a.len();
    let mut edges = 0;
    let mut loops = 0;
    for u in 0..n {
        if a[u][u] {
            loops += 1;
        }
        for v in u + 1..n {
            if a[u][v] {
                edges += 1;
            }
        }
    }
    (edges, loops)
}

/// Kneser graph K(n, k): k-subsets adjacent when disjoint.
pub fn kneser(n: usize, k: usize) -> Adj {
    let subsets: Vec<u32> = (0u32..1 << n).filter(|s| s.count_ones() as usize == k).collect();
    subsets.iter().map(|&s| subsets.iter().map(|&t| s & t == 0).collect()).collect()
}

/// Length of a shortest cycle of a simple loop-free graph, by BFS from every vertex.
pub fn girth(a: &Adj) -> Option<usize> {
    let n = a.len();
    let mut best: Option<usize> = None;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if !a[u][v] {
                    continue;
                }
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    parent[v] = u;
                    queue.push_back(v);
                } else if parent[u] != v {
                    let len = dist[u] + dist[v] + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
    }
    best
}

/// `u ~ v` iff a walk of length exactly `n` joins them (boolean matrix power).
pub fn walk_power(a: &Adj, n: usize) -> Adj {
    let k = a.len();
    let mut r: Adj = (0..k).map(|i| (0..k).map(|j| i == j).collect()).collect();
    for _ in 0..n {
        r = (0..k).map(|i| (0..k).map(|j| (0..k).any(|m| r[i][m] && a[m][j])).collect()).collect();
    }
    r
}

/// The house: a 4-cycle 0-1-2-3 with a roof vertex 4 on the edge 0-1.
pub fn house() -> Adj {
    let mut a = vec![vec![false; 5]; 5];
    for (u, v) in [(0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 1)] {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

/// `H^G`: vertices are all maps `V(G) -> V(H)` as tuples (`f` indexed by `G`'s vertices in
/// order, enumerated lexicographically); `f ~ g` iff `f(v) g(w) ∈ E(H)` for every arc `vw`.
pub fn direct_exponential(g: &Adj, h: &Adj) -> (Vec<Vec<usize>>, Adj) {
    let k = g.len();
    let n = h.len();
    let mut maps: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..k {
        maps = maps
            .into_iter()
            .flat_map(|m| (0..n).map(move |x| [m.clone(), vec![x]].concat()))
            .collect();
    }
    let adj = maps
        .iter()
        .map(|f| {
            maps.iter()
                .map(|gm| (0..k).all(|v| (0..k).all(|w| !g[v][w] || h[f[v]][gm[w]])))
                .collect()
        })
        .collect();
    (maps, adj)
}

/// Induced subgraph without isolated vertices (a loop counts as an edge).
pub fn reduce(a: &Adj) -> Adj {
    let keep: Vec<usize> = (0..a.len()).filter(|&v| a[v].iter().any(|&x| x)).collect();
    keep.iter().map(|&u| keep.iter().map(|&v| a[u][v]).collect()).collect()
}

#[derive(Clone, Copy, Debug)]
pub enum Kind {
    Cartesian,
    Categorical,
    Strong,
    Lexicographic,
}

/// Textbook product `H ∘ G` on pairs `(h, g)`, indexed `h * |G| + g`.
pub fn direct_product(h: &Adj, g: &Adj, kind: Kind) -> Adj {
    let (nh, ng) = (h.len(), g.len());
    let mut a = vec![vec![false; nh * ng]; nh * ng];
    for h1 in 0..nh {
        for g1 in 0..ng {
            for h2 in 0..nh {
                for g2 in 0..ng {
                    let (eh, eg) = (h[h1][h2], g[g1][g2]);
                    let (sh, sg) = (h1 == h2, g1 == g2);
                    a[h1 * ng + g1][h2 * ng + g2] = match kind {
                        Kind::Cartesian => (eh && sg) || (sh && eg),
                        Kind::Categorical => eh && eg,
                        Kind::Strong => (eh && (sg || eg)) || (sh && eg),
                        Kind::Lexicographic => eh || (sh && eg),
                    };
                }
            }
        }
    }
    a
}

/// Line graph of a simple graph.
pub fn line_graph(a: &Adj) -> Adj {
    let n = a.len();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if a[u][v] {
                edges.push((u, v));
            }
        }
    }
    edges
        .iter()
        .enumerate()
        .map(|(i, &(a1, b1))| {
            edges
                .iter()
                .enumerate()
                .map(|(j, &(a2, b2))| i != j && (a1 == a2 || a1 == b2 || b1 == a2 || b1 == b2))
                .collect()
        })
        .collect()
}

/// Zig-zag product from its definition: ports are index-sorted neighbour positions, and
/// `(u,i) ~ (v,j)` iff some `i' ~_H i`, `j' ~_H j` have `rot(u,i') = (v,j')`.
pub fn zigzag_oracle(g: &Adj, h: &Adj) -> Adj {
    let n = g.len();
    let d = h.len();
    let nbrs: Vec<Vec<usize>> = (0..n).map(|u| (0..n).filter(|&v| g[u][v]).collect()).collect();
    let rot = |u: usize, i: usize| {
        let v = nbrs[u][i];
        (v, nbrs[v].iter().position(|&x| x == u).unwrap())
    };
    let mut a = vec![vec![false; n * d]; n * d];
    for u in 0..n {
        for i in 0..d {
            for i2 in 0..d {
                if !h[i][i2] {
                    continue;
                }
                let (v, j2) = rot(u, i2);
                for j in 0..d {
                    if h[j2][j] {
                        a[u * d + i][v * d + j] = true;
                    }
                }
            }
        }
    }
    a
}

/// Number of arc-preserving vertex maps `g -> h` (the hom count when `h` has no parallel arcs).
pub fn brute_hom_count(g: &Adj, h: &Adj) -> u128 {
    fn rec(g: &Adj, h: &Adj, f: &mut Vec<usize>) -> u128 {
        let v = f.len();
        if v == g.len() {
            return 1;
        }
        let mut total = 0;
        for x in 0..h.len() {
            let ok = (0..v).all(|w| (!g[v][w] || h[x][f[w]]) && (!g[w][v] || h[f[w]][x])) && (!g[v][v] || h[x][x]);
            if ok {
                f.push(x);
                total += rec(g, h, f);
                f.pop();
            }
        }
        total
    }
    rec(g, h, &mut Vec::new())
}

/// Disjoint union of `k` copies.
pub fn copies(a: &Adj, k: usize) -> Adj {
    let n = a.len();
    let mut r = vec![vec![false; n * k]; n * k];
    for c in 0..k {
        for u in 0..n {
            for v in 0..n {
                r[c * n + u][c * n + v] = a[u][v];
            }
        }
    }
    r
}
