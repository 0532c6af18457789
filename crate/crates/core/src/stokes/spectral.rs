//! The spectral graph: orientation double cover of the Stokes graph.
//!
//! Spectral region `2·I + c` is the lift of region I whose sink lies at corner c.
//! Spectral ray `2·α` is α₋ (joining the lifts with sink at α's puncture) and
//! `2·α + 1` is α₊. σ flips the low bit of both.

use super::graph::{StokesGraph, Vertex};
use super::path::{vertex_loop, Carrier, CombinatorialPath, Crossing, RegionGraph, SpanningTree};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralGraph {
    pub base: StokesGraph,
    ray_ends: Vec<(usize, usize)>,
    /// Six spectral rays around each ramification vertex, anticlockwise, each crossed forward.
    pub ramification: Vec<[usize; 6]>,
    /// Detour path δ_α⁺ for every base ray α.
    pub detours: Vec<CombinatorialPath>,
}

pub fn sigma(x: usize) -> usize {
    x ^ 1
}

pub fn minus(alpha: usize) -> usize {
    2 * alpha
}

pub fn plus(alpha: usize) -> usize {
    2 * alpha + 1
}

impl RegionGraph for SpectralGraph {
    fn region_count(&self) -> usize {
        2 * self.base.regions.len()
    }
    fn ray_count(&self) -> usize {
        2 * self.base.rays.len()
    }
    fn ray_ends(&self, ray: usize) -> (usize, usize) {
        self.ray_ends[ray]
    }
}

/// Builds the double cover and its detour table.
pub fn double_cover(g: &StokesGraph) -> Result<SpectralGraph> {
    let mut ray_ends = Vec::with_capacity(2 * g.rays.len());
    for s in &g.sides {
        ray_ends.push((2 * s.cw + s.corner_cw, 2 * s.ccw + s.corner_ccw));
        ray_ends.push((2 * s.cw + 1 - s.corner_cw, 2 * s.ccw + 1 - s.corner_ccw));
    }
    let mut sg = SpectralGraph { base: g.clone(), ray_ends, ramification: Vec::new(), detours: Vec::new() };
    for (i, &(a, b)) in sg.ray_ends.iter().enumerate() {
        let (c, d) = sg.ray_ends[sigma(i)];
        if sigma(a) != c || sigma(b) != d || a == c {
            return Err(Error::InconsistentCover(format!("sigma does not act freely at spectral ray {i}")));
        }
    }
    for b in 0..g.branches.len() {
        let base = vertex_loop(g, Vertex::Branch(b), 0);
        let twice = base.concat(&base).expect("closed loop");
        let start = 2 * base.start();
        let lifted = sg.lift(&twice, start)?;
        if lifted.regions[3] != sigma(start) || lifted.end() != start {
            return Err(Error::InconsistentCover(format!("cover is not simply ramified at branch vertex {b}")));
        }
        let rays: Vec<usize> = lifted.crossings.iter().map(|c| c.ray).collect();
        sg.ramification.push([rays[0], rays[1], rays[2], rays[3], rays[4], rays[5]]);
    }
    let detours = (0..g.rays.len()).map(|a| sg.build_detour(a)).collect::<Result<Vec<_>>>()?;
    sg.detours = detours;
    Ok(sg)
}

impl SpectralGraph {
    /// Spectral regions over base region I: (sink at corner 0, sink at corner 1).
    pub fn lifts(&self, region: usize) -> [usize; 2] {
        [2 * region, 2 * region + 1]
    }

    pub fn base_region(&self, s: usize) -> usize {
        s / 2
    }

    /// Puncture that is the sink of spectral region s.
    pub fn sink_of(&self, s: usize) -> usize {
        self.base.regions[s / 2].poles[s % 2]
    }

    /// The spectral crossing over a base crossing, starting from spectral region `s`.
    pub fn lift_crossing(&self, s: usize, c: Crossing) -> Result<Crossing> {
        let sd = &self.base.sides[c.ray];
        let (here, corner) = if c.forward { (sd.cw, sd.corner_cw) } else { (sd.ccw, sd.corner_ccw) };
        if s / 2 != here {
            return Err(Error::InvalidPath(format!("spectral region {s} does not lie over the source of the crossing")));
        }
        let ray = if s % 2 == corner { minus(c.ray) } else { plus(c.ray) };
        Ok(Crossing { ray, forward: c.forward })
    }

    /// Unique lift of a base path starting at spectral region `start`.
    pub fn lift(&self, base: &CombinatorialPath, start: usize) -> Result<CombinatorialPath> {
        if base.carrier != Carrier::Base || start / 2 != base.start() {
            return Err(Error::InvalidPath("start sheet does not lie over the path's start".into()));
        }
        let mut p = CombinatorialPath::empty(Carrier::Cover, start);
        for &c in &base.crossings {
            let lc = self.lift_crossing(p.end(), c)?;
            p.push(self, lc)?;
        }
        Ok(p)
    }

    pub fn project(&self, p: &CombinatorialPath) -> CombinatorialPath {
        CombinatorialPath {
            carrier: Carrier::Base,
            crossings: p.crossings.iter().map(|c| Crossing { ray: c.ray / 2, forward: c.forward }).collect(),
            regions: p.regions.iter().map(|r| r / 2).collect(),
        }
    }

    pub fn sigma_path(&self, p: &CombinatorialPath) -> CombinatorialPath {
        CombinatorialPath {
            carrier: Carrier::Cover,
            crossings: p.crossings.iter().map(|c| Crossing { ray: sigma(c.ray), forward: c.forward }).collect(),
            regions: p.regions.iter().map(|&r| sigma(r)).collect(),
        }
    }

    /// Lift of the clockwise loop around α's branch vertex from the source-side lift of
    /// the clockwise region I, crossing the other two rays and then α; ends on the sink side.
    fn build_detour(&self, alpha: usize) -> Result<CombinatorialPath> {
        let g = &self.base;
        let b = g.rays[alpha].branch;
        let rot = g.branches[b];
        let k = rot.iter().position(|&r| r == alpha).expect("ray at its branch vertex");
        let sd = g.sides[alpha];
        let start = 2 * sd.cw + 1 - sd.corner_cw;
        let cs = [Crossing::bwd(rot[(k + 2) % 3]), Crossing::bwd(rot[(k + 1) % 3]), Crossing::bwd(alpha)];
        let base = CombinatorialPath::from_crossings(g, Carrier::Base, sd.cw, &cs)?;
        let p = self.lift(&base, start)?;
        if p.end() != 2 * sd.cw + sd.corner_cw {
            return Err(Error::InconsistentCover(format!("detour of ray {alpha} does not end on the sink side")));
        }
        Ok(p)
    }

    pub fn detour_path(&self, alpha: usize) -> &CombinatorialPath {
        &self.detours[alpha]
    }

    /// Loop around the sink (`sink = true`) or source lift of a puncture, based where it starts.
    pub fn puncture_lift_loop(&self, p: usize, sink: bool) -> CombinatorialPath {
        let base = vertex_loop(&self.base, Vertex::Pole(p), 0);
        let (region, corner) = self.base.pole_sectors[p][0];
        let start = 2 * region + if sink { corner } else { 1 - corner };
        self.lift(&base, start).expect("lift of a puncture loop")
    }

    /// Six-crossing loop around a ramification vertex.
    pub fn ramification_loop(&self, b: usize) -> CombinatorialPath {
        let base = vertex_loop(&self.base, Vertex::Branch(b), 0);
        let twice = base.concat(&base).expect("closed");
        self.lift(&twice, 2 * base.start()).expect("lift of a branch loop")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LoopId {
    Cotree(usize),
    Sink(usize),
    Source(usize),
    Ramification(usize),
}

impl std::fmt::Display for LoopId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoopId::Cotree(r) => write!(f, "cotree:{r}"),
            LoopId::Sink(p) => write!(f, "sink:{p}"),
            LoopId::Source(p) => write!(f, "source:{p}"),
            LoopId::Ramification(b) => write!(f, "ramification:{b}"),
        }
    }
}

/// Cotree loops of the cover, then puncture-lift loops, then ramification loops, all based at region 0.
pub fn loop_basis(sg: &SpectralGraph) -> Result<Vec<(LoopId, CombinatorialPath)>> {
    let tree = SpanningTree::new(sg)?;
    let mut out: Vec<(LoopId, CombinatorialPath)> =
        tree.cotree_loops(sg, Carrier::Cover).into_iter().map(|(r, p)| (LoopId::Cotree(r), p)).collect();
    for p in 0..sg.base.poles.len() {
        out.push((LoopId::Sink(p), tree.rebase(sg, &sg.puncture_lift_loop(p, true))));
        out.push((LoopId::Source(p), tree.rebase(sg, &sg.puncture_lift_loop(p, false))));
    }
    for b in 0..sg.base.branches.len() {
        out.push((LoopId::Ramification(b), tree.rebase(sg, &sg.ramification_loop(b))));
    }
    Ok(out)
}
