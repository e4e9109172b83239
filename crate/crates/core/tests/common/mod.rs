//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use dlpp::lpp::{Geometry, LatticePath};
use rand::Rng;

pub type Vertex = (usize, usize);

/// Grid points of a path, rebuilt from its departures alone.
pub fn walk(p: &LatticePath) -> Vec<Vertex> {
    let mut out = vec![p.src];
    let (mut h, mut level) = p.src;
    for (i, &d) in p.departures.iter().enumerate() {
        while h < d {
            h += 1;
            out.push((h, level));
        }
        if i + 1 < p.departures.len() {
            level += 1;
            out.push((h, level));
        }
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(k: usize) -> Self {
        UnionFind {
            parent: (0..k).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = x;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub start: Vertex,
    pub end: Vertex,
    pub vertices: BTreeSet<Vertex>,
    /// Only the two extreme vertices lie on both paths.
    pub simple: bool,
}

fn diagonal(v: Vertex) -> usize {
    v.0 + v.1
}

/// Connected components of the symmetric difference of the two edge sets.
pub fn label_components(p1: &LatticePath, p2: &LatticePath) -> Vec<Component> {
    let (w1, w2) = (walk(p1), walk(p2));
    let edges = |w: &[Vertex]| -> BTreeSet<(Vertex, Vertex)> {
        w.windows(2).map(|e| (e[0], e[1])).collect()
    };
    let (e1, e2) = (edges(&w1), edges(&w2));
    let diff: Vec<(Vertex, Vertex)> = e1.symmetric_difference(&e2).copied().collect();
    let mut index: BTreeMap<Vertex, usize> = BTreeMap::new();
    for &(a, b) in &diff {
        for v in [a, b] {
            let k = index.len();
            index.entry(v).or_insert(k);
        }
    }
    let mut uf = UnionFind::new(index.len());
    for &(a, b) in &diff {
        uf.union(index[&a], index[&b]);
    }
    let mut groups: BTreeMap<usize, BTreeSet<Vertex>> = BTreeMap::new();
    for (&v, &k) in &index {
        groups.entry(uf.find(k)).or_default().insert(v);
    }
    let on1: BTreeSet<Vertex> = w1.into_iter().collect();
    let on2: BTreeSet<Vertex> = w2.into_iter().collect();
    let mut out: Vec<Component> = groups
        .into_values()
        .map(|vertices| {
            let start = *vertices.iter().min_by_key(|v| diagonal(**v)).unwrap();
            let end = *vertices.iter().max_by_key(|v| diagonal(**v)).unwrap();
            let shared = vertices
                .iter()
                .filter(|v| on1.contains(v) && on2.contains(v))
                .count();
            Component {
                start,
                end,
                vertices,
                simple: shared == 2,
            }
        })
        .collect();
    out.sort_by_key(|c| diagonal(c.start));
    out
}

/// Non-decreasing departures from `(0, 0)` to `(width, n)`.
pub fn random_departures<R: Rng>(rng: &mut R, n: usize, width: usize) -> Vec<usize> {
    let mut d: Vec<usize> = (0..=n).map(|_| rng.gen_range(0..=width)).collect();
    d.sort_unstable();
    d[n] = width;
    d
}

/// A random path and a perturbation of it that keeps each departure with
/// probability `keep`.
pub fn random_pair<R: Rng>(
    rng: &mut R,
    geometry: Geometry,
    n: usize,
    keep: f64,
) -> (LatticePath, LatticePath) {
    let width = n * geometry.density();
    let d1 = random_departures(rng, n, width);
    let mut d2: Vec<usize> = d1
        .iter()
        .map(|&d| {
            if rng.gen_bool(keep) {
                d
            } else {
                rng.gen_range(0..=width)
            }
        })
        .collect();
    for i in 1..d2.len() {
        d2[i] = d2[i].max(d2[i - 1]);
    }
    d2[n] = width;
    let make = |d| LatticePath::new(geometry, n, (0, 0), d, 0.0).unwrap();
    (make(d1), make(d2))
}

/// Number of records that disagree with the labeling oracle.
pub fn decomposition_mismatches(p1: &LatticePath, p2: &LatticePath) -> usize {
    let records = dlpp::excursion::excursion_decompose(p1, p2).unwrap();
    let comps = label_components(p1, p2);
    if records.len() != comps.len() {
        return records.len().max(comps.len());
    }
    records
        .iter()
        .zip(&comps)
        .filter(|(r, c)| {
            let vs: BTreeSet<Vertex> = walk(&r.leg0).into_iter().chain(walk(&r.leg1)).collect();
            r.start != c.start
                || r.end != c.end
                || r.flags.is_excursion != c.simple
                || vs != c.vertices
        })
        .count()
}
