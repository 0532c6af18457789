//! Standard puncture generators from a tour around a spanning tree of Γ.
//!
//! The tour never crosses a tree ray, so with a gauge that is trivial on non-tree rays
//! every prefix transport is the identity. Concatenating the generators in descending
//! first-visit order freely reduces to the empty loop.

use super::graph::{StokesGraph, Vertex};
use super::path::{vertex_loop, Carrier, CombinatorialPath, Crossing};
use crate::error::{Error, Result};
use std::collections::VecDeque;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub vertex: Vertex,
    /// Sector at which the tour first reaches the vertex.
    pub sector: usize,
    pub prefix: CombinatorialPath,
    /// prefix · anticlockwise vertex loop · prefix⁻¹, based at the basepoint region.
    pub path: CombinatorialPath,
}

#[derive(Clone, Debug)]
pub struct Tour {
    pub basepoint: usize,
    pub root: Vertex,
    pub tree_ray: Vec<bool>,
    /// Tree parent of each vertex: (parent, ray).
    pub parent: Vec<Option<(Vertex, usize)>>,
    /// Vertices in breadth-first order from the root.
    pub bfs: Vec<Vertex>,
    /// Every vertex, in first-visit order.
    pub generators: Vec<Generator>,
}

pub fn vertex_index(g: &StokesGraph, v: Vertex) -> usize {
    match v {
        Vertex::Pole(p) => p,
        Vertex::Branch(b) => g.poles.len() + b,
    }
}

impl Tour {
    /// Tour rooted at the first puncture of region 0, starting in that region.
    pub fn new(g: &StokesGraph) -> Result<Self> {
        let basepoint = 0;
        let p0 = g.regions[0].poles[0];
        let k0 = g.pole_sectors[p0]
            .iter()
            .position(|&(r, c)| r == basepoint && c == 0)
            .ok_or_else(|| Error::InconsistentCover("region 0 is missing from its puncture's sectors".into()))?;
        let root = Vertex::Pole(p0);
        let nv = g.poles.len() + g.branches.len();
        let mut parent = vec![None; nv];
        let mut seen = vec![false; nv];
        let mut tree_ray = vec![false; g.rays.len()];
        seen[vertex_index(g, root)] = true;
        let mut bfs = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &r in g.rotation(v) {
                let u = g.other_end(r, v);
                let iu = vertex_index(g, u);
                if !seen[iu] {
                    seen[iu] = true;
                    parent[iu] = Some((v, r));
                    tree_ray[r] = true;
                    bfs.push(u);
                    queue.push_back(u);
                }
            }
        }
        if bfs.len() != nv {
            return Err(Error::CountMismatch("Stokes graph is disconnected".into()));
        }

        let mut generators = Vec::with_capacity(nv);
        let mut visited = vec![false; nv];
        let mut prefix = CombinatorialPath::empty(Carrier::Base, basepoint);
        let (mut v, mut k) = (root, k0);
        // Each step either crosses a non-tree ray or walks along a tree ray; 4|E| bounds both.
        for _ in 0..=4 * g.rays.len() {
            let iv = vertex_index(g, v);
            if !visited[iv] {
                visited[iv] = true;
                let lp = vertex_loop(g, v, k);
                let path = prefix.concat(&lp).and_then(|p| p.concat(&prefix.inverse()))?;
                generators.push(Generator { vertex: v, sector: k, prefix: prefix.clone(), path });
            }
            let rot = g.rotation(v);
            let beta = rot[(k + 1) % rot.len()];
            if tree_ray[beta] {
                let u = g.other_end(beta, v);
                let pos = g.rotation(u).iter().position(|&r| r == beta).expect("ray at both ends");
                v = u;
                k = pos;
            } else {
                prefix.push(g, Crossing { ray: beta, forward: StokesGraph::anticlockwise_is_forward(v) })?;
                k = (k + 1) % rot.len();
            }
            debug_assert_eq!(g.sector_region(v, k), prefix.end());
            if v == root && k == k0 {
                break;
            }
        }
        if generators.len() != nv || !(v == root && k == k0) {
            return Err(Error::InconsistentCover("tour around the spanning tree did not close".into()));
        }
        if !prefix.reduce().is_empty() {
            return Err(Error::InconsistentCover("tour loop is not null-homotopic".into()));
        }
        Ok(Tour { basepoint, root, tree_ray, parent, bfs, generators })
    }

    /// Puncture generators only, in first-visit order.
    pub fn puncture_generators(&self) -> impl Iterator<Item = &Generator> {
        self.generators.iter().filter(|g| matches!(g.vertex, Vertex::Pole(_)))
    }

    /// Generator for a given vertex.
    pub fn generator(&self, v: Vertex) -> &Generator {
        self.generators.iter().find(|g| g.vertex == v).expect("every vertex is visited")
    }
}
