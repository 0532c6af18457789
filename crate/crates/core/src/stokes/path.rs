//! Combinatorial paths: region stays joined by directed ray crossings.

use super::graph::{StokesGraph, Vertex};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Anything whose cells are regions joined across directed rays.
pub trait RegionGraph {
    fn region_count(&self) -> usize;
    fn ray_count(&self) -> usize;
    /// (from, to) of the forward crossing of `ray`.
    fn ray_ends(&self, ray: usize) -> (usize, usize);
}

impl RegionGraph for StokesGraph {
    fn region_count(&self) -> usize {
        self.regions.len()
    }
    fn ray_count(&self) -> usize {
        self.rays.len()
    }
    fn ray_ends(&self, ray: usize) -> (usize, usize) {
        (self.sides[ray].cw, self.sides[ray].ccw)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Carrier {
    Base,
    Cover,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Crossing {
    pub ray: usize,
    pub forward: bool,
}

impl Crossing {
    pub fn fwd(ray: usize) -> Self {
        Crossing { ray, forward: true }
    }
    pub fn bwd(ray: usize) -> Self {
        Crossing { ray, forward: false }
    }
    pub fn inverse(self) -> Self {
        Crossing { ray: self.ray, forward: !self.forward }
    }
}

/// `regions[k]` is the region before crossing k; `regions.len() == crossings.len() + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CombinatorialPath {
    pub carrier: Carrier,
    pub crossings: Vec<Crossing>,
    pub regions: Vec<usize>,
}

impl CombinatorialPath {
    pub fn empty(carrier: Carrier, region: usize) -> Self {
        CombinatorialPath { carrier, crossings: Vec::new(), regions: vec![region] }
    }

    pub fn from_crossings<G: RegionGraph>(g: &G, carrier: Carrier, start: usize, crossings: &[Crossing]) -> Result<Self> {
        let mut p = Self::empty(carrier, start);
        for &c in crossings {
            p.push(g, c)?;
        }
        Ok(p)
    }

    pub fn start(&self) -> usize {
        self.regions[0]
    }

    pub fn end(&self) -> usize {
        *self.regions.last().expect("nonempty region list")
    }

    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.start() == self.end()
    }

    pub fn push<G: RegionGraph>(&mut self, g: &G, c: Crossing) -> Result<()> {
        if c.ray >= g.ray_count() {
            return Err(Error::InvalidPath(format!("no ray {}", c.ray)));
        }
        let (from, to) = g.ray_ends(c.ray);
        let (a, b) = if c.forward { (from, to) } else { (to, from) };
        if a != self.end() {
            return Err(Error::InvalidPath(format!("ray {} does not leave region {}", c.ray, self.end())));
        }
        self.crossings.push(c);
        self.regions.push(b);
        Ok(())
    }

    pub fn validate<G: RegionGraph>(&self, g: &G) -> Result<()> {
        if self.regions.len() != self.crossings.len() + 1 {
            return Err(Error::InvalidPath("region list length".into()));
        }
        if self.start() >= g.region_count() {
            return Err(Error::InvalidPath(format!("no region {}", self.start())));
        }
        let rebuilt = Self::from_crossings(g, self.carrier, self.start(), &self.crossings)?;
        if rebuilt.regions != self.regions {
            return Err(Error::InvalidPath("region sequence inconsistent with crossings".into()));
        }
        Ok(())
    }

    pub fn inverse(&self) -> Self {
        CombinatorialPath {
            carrier: self.carrier,
            crossings: self.crossings.iter().rev().map(|c| c.inverse()).collect(),
            regions: self.regions.iter().rev().copied().collect(),
        }
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.end() != other.start() || self.carrier != other.carrier {
            return Err(Error::InvalidPath("paths are not composable".into()));
        }
        let mut p = self.clone();
        p.crossings.extend_from_slice(&other.crossings);
        p.regions.extend_from_slice(&other.regions[1..]);
        Ok(p)
    }

    /// Free reduction: cancels every crossing immediately followed by its inverse.
    pub fn reduce(&self) -> Self {
        let mut cs: Vec<Crossing> = Vec::with_capacity(self.crossings.len());
        let mut rs: Vec<usize> = vec![self.start()];
        for (i, &c) in self.crossings.iter().enumerate() {
            if cs.last() == Some(&c.inverse()) {
                cs.pop();
                rs.pop();
            } else {
                cs.push(c);
                rs.push(self.regions[i + 1]);
            }
        }
        CombinatorialPath { carrier: self.carrier, crossings: cs, regions: rs }
    }
}

/// Breadth-first spanning tree of the region adjacency graph rooted at region 0.
#[derive(Clone, Debug)]
pub struct SpanningTree {
    /// Crossing that first reaches each region (None at the root).
    pub parent: Vec<Option<Crossing>>,
    pub in_tree: Vec<bool>,
    pub order: Vec<usize>,
}

impl SpanningTree {
    pub fn new<G: RegionGraph>(g: &G) -> Result<Self> {
        let n = g.region_count();
        let mut adj: Vec<Vec<Crossing>> = vec![Vec::new(); n];
        for r in 0..g.ray_count() {
            let (a, b) = g.ray_ends(r);
            adj[a].push(Crossing::fwd(r));
            adj[b].push(Crossing::bwd(r));
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut in_tree = vec![false; g.ray_count()];
        let mut order = vec![0];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &c in &adj[x] {
                let (a, b) = g.ray_ends(c.ray);
                let y = if c.forward { b } else { a };
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(c);
                    in_tree[c.ray] = true;
                    order.push(y);
                    queue.push_back(y);
                }
            }
        }
        if order.len() != n {
            return Err(Error::DisconnectedCover);
        }
        Ok(SpanningTree { parent, in_tree, order })
    }

    /// Tree path from region 0 to `target`.
    pub fn path_to<G: RegionGraph>(&self, g: &G, carrier: Carrier, target: usize) -> CombinatorialPath {
        let mut rev = Vec::new();
        let mut x = target;
        while let Some(c) = self.parent[x] {
            rev.push(c);
            let (a, b) = g.ray_ends(c.ray);
            x = if c.forward { a } else { b };
        }
        rev.reverse();
        CombinatorialPath::from_crossings(g, carrier, 0, &rev).expect("tree path is valid")
    }

    /// Conjugates a loop based at some region to a loop based at region 0.
    pub fn rebase<G: RegionGraph>(&self, g: &G, l: &CombinatorialPath) -> CombinatorialPath {
        let t = self.path_to(g, l.carrier, l.start());
        t.concat(l).and_then(|p| p.concat(&t.inverse())).expect("composable")
    }

    /// Cotree loops: tree path, one cotree crossing, tree path back.
    pub fn cotree_loops<G: RegionGraph>(&self, g: &G, carrier: Carrier) -> Vec<(usize, CombinatorialPath)> {
        (0..g.ray_count())
            .filter(|&r| !self.in_tree[r])
            .map(|r| {
                let (a, b) = g.ray_ends(r);
                let p = self
                    .path_to(g, carrier, a)
                    .concat(&CombinatorialPath::from_crossings(g, carrier, a, &[Crossing::fwd(r)]).expect("ray"))
                    .and_then(|p| p.concat(&self.path_to(g, carrier, b).inverse()))
                    .expect("composable");
                (r, p)
            })
            .collect()
    }
}

/// Anticlockwise loop around a vertex of the base graph starting in sector k.
pub fn vertex_loop(g: &StokesGraph, v: Vertex, k: usize) -> CombinatorialPath {
    let rot = g.rotation(v);
    let fwd = StokesGraph::anticlockwise_is_forward(v);
    let cs: Vec<Crossing> = (1..=rot.len()).map(|i| Crossing { ray: rot[(k + i) % rot.len()], forward: fwd }).collect();
    CombinatorialPath::from_crossings(g, Carrier::Base, g.sector_region(v, k), &cs).expect("vertex loop is valid")
}

/// Winding number of a closed base path around every vertex, relative to puncture 0.
pub fn winding_numbers(g: &StokesGraph, p: &CombinatorialPath) -> Vec<(Vertex, i64)> {
    let mut signed = vec![0i64; g.rays.len()];
    for c in &p.crossings {
        signed[c.ray] += if c.forward { 1 } else { -1 };
    }
    // w(branch) − w(pole) across a ray equals its signed crossing count.
    let verts: Vec<Vertex> = g.vertices().collect();
    let idx = |v: Vertex| match v {
        Vertex::Pole(i) => i,
        Vertex::Branch(b) => g.poles.len() + b,
    };
    let mut w: Vec<Option<i64>> = vec![None; verts.len()];
    w[0] = Some(0);
    let mut queue = VecDeque::from([Vertex::Pole(0)]);
    while let Some(v) = queue.pop_front() {
        let wv = w[idx(v)].expect("visited");
        for &r in g.rotation(v) {
            let u = g.other_end(r, v);
            if w[idx(u)].is_none() {
                let wu = match v {
                    Vertex::Branch(_) => wv - signed[r],
                    Vertex::Pole(_) => wv + signed[r],
                };
                w[idx(u)] = Some(wu);
                queue.push_back(u);
            }
        }
    }
    verts.into_iter().map(|v| (v, w[idx(v)].unwrap_or(0))).collect()
}
