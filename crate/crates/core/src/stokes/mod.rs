//! Combinatorial Stokes graphs, their spectral double covers and path algebra.

pub mod canonical;
pub mod graph;
pub mod io;
pub mod path;
pub mod spectral;
pub mod svg;
pub mod tour;

pub use graph::{Ray, RaySides, Region, StokesGraph, Vertex};
pub use path::{vertex_loop, winding_numbers, Carrier, CombinatorialPath, Crossing, RegionGraph, SpanningTree};
pub use spectral::{double_cover, loop_basis, minus, plus, sigma, LoopId, SpectralGraph};
pub use tour::{Generator, Tour};

use crate::error::{Error, Result};
use crate::foliation::{Endpoint, Trajectory};
use crate::quad_diff::QuadraticDifferential;
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// Builds the Stokes graph from the critical leaves of a saddle-free differential.
///
/// Ray `3·b + k` is leaf k of zero b; leaf k leaves b at angle (2πk − arg c)/3, so
/// k = 0, 1, 2 is anticlockwise. Ray-ends at a puncture are ordered by approach angle.
pub fn assemble<T: Real>(phi: &QuadraticDifferential<T>, leaves: &[Trajectory<T>]) -> Result<StokesGraph> {
    let n_zero = leaves.iter().map(|t| t.source_zero + 1).max().unwrap_or(0);
    let mut slot = vec![[None; 3]; n_zero];
    for (i, t) in leaves.iter().enumerate() {
        if t.ray_index > 2 || slot[t.source_zero][t.ray_index].is_some() {
            return Err(Error::CountMismatch(format!("duplicate or out-of-range leaf {i}")));
        }
        slot[t.source_zero][t.ray_index] = Some(i);
    }
    let mut rays = Vec::new();
    let mut branches = Vec::new();
    let mut ends: Vec<Vec<(T, usize)>> = vec![Vec::new(); phi.marked.len()];
    for (b, s) in slot.iter().enumerate() {
        let mut rot = [0usize; 3];
        for k in 0..3 {
            let i = s[k].ok_or_else(|| Error::CountMismatch(format!("branch vertex {b} has fewer than 3 rays")))?;
            let t = &leaves[i];
            let Endpoint::Pole(p) = t.endpoint else {
                return Err(Error::CountMismatch(format!("leaf {k} of zero {b} does not end at a puncture")));
            };
            let angle = t.approach_angle.ok_or_else(|| Error::CountMismatch(format!("leaf {k} of zero {b} has no approach angle")))?;
            rot[k] = rays.len();
            ends[p].push((angle, rays.len()));
            rays.push(Ray { branch: b, pole: p });
        }
        branches.push(rot);
    }
    let poles = ends
        .into_iter()
        .map(|mut v| {
            v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
            v.into_iter().map(|(_, r)| r).collect::<Vec<_>>()
        })
        .collect::<Vec<_>>();
    if let Some(p) = poles.iter().position(|v| v.is_empty()) {
        return Err(Error::CountMismatch(format!("puncture {p} has no incident ray")));
    }
    StokesGraph::from_rotation(rays, branches, poles)
}

/// Planar positions used for plotting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// Finite puncture positions; `None` for the puncture at ∞.
    pub punctures: Vec<Option<[f64; 2]>>,
    pub zeros: Vec<[f64; 2]>,
    /// Polyline of each ray, from its branch vertex outwards.
    pub rays: Vec<Vec<[f64; 2]>>,
}

impl Geometry {
    pub fn from_leaves<T: Real>(phi: &QuadraticDifferential<T>, zeros: &[num_complex::Complex<T>], leaves: &[Trajectory<T>]) -> Self {
        let pair = |z: num_complex::Complex<T>| {
            let c = crate::scalar::to_c64(z);
            [c.re, c.im]
        };
        let mut rays: Vec<(usize, Vec<[f64; 2]>)> = leaves
            .iter()
            .map(|t| {
                let mut pts = vec![pair(zeros[t.source_zero])];
                pts.extend(t.points.iter().map(|&z| pair(z)));
                (3 * t.source_zero + t.ray_index, pts)
            })
            .collect();
        rays.sort_by_key(|r| r.0);
        Geometry {
            punctures: phi.marked.punctures.iter().map(|p| p.finite().map(pair)).collect(),
            zeros: zeros.iter().map(|&z| pair(z)).collect(),
            rays: rays.into_iter().map(|r| r.1).collect(),
        }
    }
}
