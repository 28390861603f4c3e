//! Permutations of {1..k}, their right action on tuples, and finite permutation groups.
//!
//! Images are stored 0-based; all I/O (serde, `from_images`) is 1-based.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default ceiling on the degree of a materialized group.
pub const DEFAULT_DEGREE_CAP: usize = 12;

/// A permutation of {1..k}, stored as 0-based images.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    img: Vec<usize>,
}

impl Perm {
    pub fn identity(k: usize) -> Perm {
        Perm { img: (0..k).collect() }
    }

    /// Builds from 1-based images, e.g. `[2, 1]` is the transposition of degree 2.
    pub fn from_images(images: &[usize]) -> Result<Perm> {
        if images.is_empty() {
            return Err(Error::Degree("permutation of degree 0".into()));
        }
        let k = images.len();
        let mut seen = vec![false; k];
        let mut img = Vec::with_capacity(k);
        for &v in images {
            if v == 0 || v > k || seen[v - 1] {
                return Err(Error::Schema(format!("{images:?} is not a bijection of 1..{k}")));
            }
            seen[v - 1] = true;
            img.push(v - 1);
        }
        Ok(Perm { img })
    }

    /// Builds from 0-based images without the 1-based shift.
    pub fn from_zero_based(img: Vec<usize>) -> Result<Perm> {
        let shifted: Vec<usize> = img.iter().map(|v| v + 1).collect();
        Perm::from_images(&shifted)
    }

    /// Cycle notation `(a1 a2 ... at)` with 1-based points: a1 -> a2 -> ... -> at -> a1.
    pub fn cycle(k: usize, points: &[usize]) -> Result<Perm> {
        let mut img: Vec<usize> = (0..k).collect();
        let distinct: BTreeSet<usize> = points.iter().copied().collect();
        if distinct.len() != points.len() || points.iter().any(|&p| p == 0 || p > k) {
            return Err(Error::Schema(format!("bad cycle {points:?} for degree {k}")));
        }
        for (i, &p) in points.iter().enumerate() {
            img[p - 1] = points[(i + 1) % points.len()] - 1;
        }
        Ok(Perm { img })
    }

    pub fn degree(&self) -> usize {
        self.img.len()
    }

    /// 1-based images.
    pub fn images(&self) -> Vec<usize> {
        self.img.iter().map(|v| v + 1).collect()
    }

    /// Image of a 0-based point.
    pub fn apply(&self, i: usize) -> usize {
        self.img[i]
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.img.len()];
        for (i, &v) in self.img.iter().enumerate() {
            inv[v] = i;
        }
        Perm { img: inv }
    }

    /// `compose(g, l)(i) = g(l(i))`, so that `x.g.l = x.compose(g, l)` under the right action.
    pub fn compose(&self, other: &Perm) -> Result<Perm> {
        if self.degree() != other.degree() {
            return Err(Error::Degree(format!("compose degrees {} and {}", self.degree(), other.degree())));
        }
        Ok(self.then(other))
    }

    /// Unchecked `compose`; callers guarantee equal degrees.
    pub(crate) fn then(&self, other: &Perm) -> Perm {
        Perm { img: other.img.iter().map(|&j| self.img[j]).collect() }
    }

    /// Right action on tuples: `(x g)_i = x_{g(i)}`.
    pub fn act<T: Clone>(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.degree() {
            return Err(Error::Degree(format!("tuple of length {} acted on by degree {}", x.len(), self.degree())));
        }
        Ok(self.act_unchecked(x))
    }

    pub(crate) fn act_unchecked<T: Clone>(&self, x: &[T]) -> Vec<T> {
        self.img.iter().map(|&j| x[j].clone()).collect()
    }

    /// All permutations of degree k in lexicographic order of their images.
    pub fn all(k: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..k).collect();
        loop {
            out.push(Perm { img: cur.clone() });
            // next lexicographic permutation
            let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..k).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }
}

/// Free function form of the right action.
pub fn act_right<T: Clone>(x: &[T], g: &Perm) -> Result<Vec<T>> {
    g.act(x)
}

/// Free function form of composition.
pub fn compose(g: &Perm, l: &Perm) -> Result<Perm> {
    g.compose(l)
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images())
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images().iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.images().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Perm, D::Error> {
        let images = Vec::<usize>::deserialize(d)?;
        Perm::from_images(&images).map_err(serde::de::Error::custom)
    }
}

/// A finite permutation group with its elements materialized in sorted order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
}

impl PermGroup {
    /// Closure of `gens` under composition, with the default degree cap.
    pub fn generate(degree: usize, gens: &[Perm]) -> Result<PermGroup> {
        PermGroup::generate_capped(degree, gens, DEFAULT_DEGREE_CAP)
    }

    /// Closure of `gens` by breadth-first search over right multiplication by generators.
    pub fn generate_capped(degree: usize, gens: &[Perm], cap: usize) -> Result<PermGroup> {
        if degree == 0 {
            return Err(Error::Degree("group of degree 0".into()));
        }
        if degree > cap {
            return Err(Error::ResourceLimit(format!("group degree {degree} exceeds cap {cap}")));
        }
        if let Some(g) = gens.iter().find(|g| g.degree() != degree) {
            return Err(Error::Degree(format!("generator {g} has degree {}, expected {degree}", g.degree())));
        }
        let mut seen: BTreeSet<Perm> = BTreeSet::new();
        let id = Perm::identity(degree);
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            for g in gens {
                let q = p.then(g);
                if seen.insert(q.clone()) {
                    queue.push_back(q);
                }
            }
        }
        // finite group: closure under products already contains inverses
        Ok(PermGroup { degree, generators: gens.to_vec(), elements: seen.into_iter().collect() })
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup { degree, generators: Vec::new(), elements: vec![Perm::identity(degree)] }
    }

    /// The full symmetric group, generated by a transposition and a long cycle.
    pub fn symmetric(degree: usize) -> Result<PermGroup> {
        let mut gens = Vec::new();
        if degree >= 2 {
            gens.push(Perm::cycle(degree, &[1, 2])?);
            let long: Vec<usize> = (1..=degree).collect();
            gens.push(Perm::cycle(degree, &long)?);
        }
        PermGroup::generate(degree, &gens)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// Elements in ascending lexicographic order; the identity is first.
    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    /// Elements fixing the tuple `x` under the right action.
    pub fn stabilizer<T: Clone + PartialEq>(&self, x: &[T]) -> Vec<Perm> {
        self.elements.iter().filter(|g| g.act_unchecked(x) == x).cloned().collect()
    }
}

#[derive(Serialize, Deserialize)]
struct GroupJson {
    degree: usize,
    generators: Vec<Perm>,
}

impl Serialize for PermGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GroupJson { degree: self.degree, generators: self.generators.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PermGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<PermGroup, D::Error> {
        let j = GroupJson::deserialize(d)?;
        PermGroup::generate(j.degree, &j.generators).map_err(serde::de::Error::custom)
    }
}
