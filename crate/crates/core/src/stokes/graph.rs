//! The Stokes graph as a rotation system.
//!
//! Darts: `2·ray` runs branch → pole, `2·ray + 1` runs pole → branch. The face to
//! the left of a dart is found by turning to the clockwise-next ray at its head.
//! Each region is stored as the 4-cycle b₀ →r₀ p₀ →r₁ b₁ →r₂ p₁ →r₃ b₀, traversed
//! anticlockwise; p₀ is corner 0 and p₁ corner 1, with p₀ ≤ p₁ by puncture index.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ray {
    pub branch: usize,
    pub pole: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    pub branches: [usize; 2],
    pub poles: [usize; 2],
    pub rays: [usize; 4],
}

impl Region {
    /// Corner (0 or 1) of the region at which `ray` ends, if it bounds the region.
    pub fn corner_of(&self, ray: usize) -> Option<usize> {
        self.rays.iter().position(|&r| r == ray).map(|i| i / 2)
    }
}

/// The two regions adjacent to a ray. Crossing from `cw` to `ccw` is anticlockwise
/// around the ray's branch vertex: the forward direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RaySides {
    pub cw: usize,
    pub ccw: usize,
    pub corner_cw: usize,
    pub corner_ccw: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Pole(usize),
    Branch(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StokesGraph {
    pub rays: Vec<Ray>,
    /// Anticlockwise rays at each branch vertex.
    pub branches: Vec<[usize; 3]>,
    /// Anticlockwise ray-ends at each puncture.
    pub poles: Vec<Vec<usize>>,
    pub regions: Vec<Region>,
    pub sides: Vec<RaySides>,
    /// Region between rays k and k+1 at each branch vertex.
    pub branch_sectors: Vec<[usize; 3]>,
    /// (region, corner) between ray-ends k and k+1 at each puncture.
    pub pole_sectors: Vec<Vec<(usize, usize)>>,
    pub genus: usize,
}

impl StokesGraph {
    /// Builds and validates the graph from its rotation system.
    pub fn from_rotation(rays: Vec<Ray>, branches: Vec<[usize; 3]>, poles: Vec<Vec<usize>>) -> Result<Self> {
        check_rotation(&rays, &branches, &poles)?;
        let n_darts = 2 * rays.len();
        let next = |d: usize| -> usize {
            let ray = d / 2;
            if d % 2 == 0 {
                let rot = &poles[rays[ray].pole];
                let k = rot.iter().position(|&r| r == ray).expect("checked");
                2 * rot[(k + rot.len() - 1) % rot.len()] + 1
            } else {
                let rot = &branches[rays[ray].branch];
                let k = rot.iter().position(|&r| r == ray).expect("checked");
                2 * rot[(k + 2) % 3]
            }
        };
        let mut face_of = vec![usize::MAX; n_darts];
        let mut pos_of = vec![0usize; n_darts];
        let mut regions = Vec::new();
        for start in (0..n_darts).step_by(2) {
            if face_of[start] != usize::MAX {
                continue;
            }
            let mut cycle = vec![start];
            let mut d = next(start);
            while d != start {
                if cycle.len() > n_darts {
                    return Err(Error::NonQuadrilateralFace { face: regions.len(), len: cycle.len() });
                }
                cycle.push(d);
                d = next(d);
            }
            if cycle.len() != 4 {
                return Err(Error::NonQuadrilateralFace { face: regions.len(), len: cycle.len() });
            }
            let r: [usize; 4] = [cycle[0] / 2, cycle[1] / 2, cycle[2] / 2, cycle[3] / 2];
            let mut reg = Region {
                branches: [rays[r[0]].branch, rays[r[2]].branch],
                poles: [rays[r[0]].pole, rays[r[2]].pole],
                rays: r,
            };
            let mut darts = [cycle[0], cycle[1], cycle[2], cycle[3]];
            if reg.poles[0] > reg.poles[1] {
                reg = Region {
                    branches: [reg.branches[1], reg.branches[0]],
                    poles: [reg.poles[1], reg.poles[0]],
                    rays: [r[2], r[3], r[0], r[1]],
                };
                darts = [darts[2], darts[3], darts[0], darts[1]];
            }
            let id = regions.len();
            for (i, &dd) in darts.iter().enumerate() {
                face_of[dd] = id;
                pos_of[dd] = i;
            }
            regions.push(reg);
        }
        let mut sides = Vec::with_capacity(rays.len());
        for a in 0..rays.len() {
            // cw == ccw happens when the ray is the only one at its puncture.
            let (cw, ccw) = (face_of[2 * a + 1], face_of[2 * a]);
            sides.push(RaySides { cw, ccw, corner_cw: pos_of[2 * a + 1] / 2, corner_ccw: pos_of[2 * a] / 2 });
        }
        let branch_sectors = branches.iter().map(|rot| rot.map(|r| face_of[2 * r])).collect();
        let pole_sectors = poles
            .iter()
            .map(|rot| rot.iter().map(|&r| (face_of[2 * r + 1], pos_of[2 * r + 1] / 2)).collect())
            .collect();
        // Euler characteristic with punctures and branch points as vertices.
        let v = (poles.len() + branches.len()) as i64;
        let chi = v - rays.len() as i64 + regions.len() as i64;
        if chi > 2 || chi % 2 != 0 {
            return Err(Error::CountMismatch(format!("Euler characteristic {chi}")));
        }
        let genus = ((2 - chi) / 2) as usize;
        let d = poles.len() as i64;
        let g = genus as i64;
        if rays.len() as i64 != 6 * d + 12 * (g - 1) || branches.len() as i64 != 2 * d + 4 * (g - 1) {
            return Err(Error::CountMismatch(format!(
                "{} rays and {} branch vertices for {} punctures in genus {}",
                rays.len(),
                branches.len(),
                d,
                g
            )));
        }
        Ok(StokesGraph { rays, branches, poles, regions, sides, branch_sectors, pole_sectors, genus })
    }

    pub fn num_punctures(&self) -> usize {
        self.poles.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.poles.len()).map(Vertex::Pole).chain((0..self.branches.len()).map(Vertex::Branch))
    }

    /// Anticlockwise rays at a vertex.
    pub fn rotation(&self, v: Vertex) -> &[usize] {
        match v {
            Vertex::Pole(p) => &self.poles[p],
            Vertex::Branch(b) => &self.branches[b],
        }
    }

    /// Region between rays k and k+1 of the rotation at v.
    pub fn sector_region(&self, v: Vertex, k: usize) -> usize {
        match v {
            Vertex::Pole(p) => self.pole_sectors[p][k].0,
            Vertex::Branch(b) => self.branch_sectors[b][k],
        }
    }

    /// Direction in which an anticlockwise turn around `v` crosses its rays.
    pub fn anticlockwise_is_forward(v: Vertex) -> bool {
        matches!(v, Vertex::Branch(_))
    }

    pub fn other_end(&self, ray: usize, v: Vertex) -> Vertex {
        match v {
            Vertex::Pole(_) => Vertex::Branch(self.rays[ray].branch),
            Vertex::Branch(_) => Vertex::Pole(self.rays[ray].pole),
        }
    }
}

fn check_rotation(rays: &[Ray], branches: &[[usize; 3]], poles: &[Vec<usize>]) -> Result<()> {
    for (i, r) in rays.iter().enumerate() {
        if r.branch >= branches.len() {
            return Err(Error::schema(format!("rays[{i}].branch"), "no such branch vertex"));
        }
        if r.pole >= poles.len() {
            return Err(Error::schema(format!("rays[{i}].pole"), "no such puncture"));
        }
    }
    let mut seen_b = vec![0u8; rays.len()];
    for (b, rot) in branches.iter().enumerate() {
        for &r in rot {
            if r >= rays.len() || rays[r].branch != b {
                return Err(Error::schema(format!("branches[{b}]"), format!("ray {r} does not end at this branch vertex")));
            }
            seen_b[r] += 1;
        }
    }
    let mut seen_p = vec![0u8; rays.len()];
    for (p, rot) in poles.iter().enumerate() {
        if rot.is_empty() {
            return Err(Error::schema(format!("poles[{p}]"), "puncture with no incident rays"));
        }
        for &r in rot {
            if r >= rays.len() || rays[r].pole != p {
                return Err(Error::schema(format!("poles[{p}]"), format!("ray {r} does not end at this puncture")));
            }
            seen_p[r] += 1;
        }
    }
    for r in 0..rays.len() {
        if seen_b[r] != 1 || seen_p[r] != 1 {
            return Err(Error::schema(format!("rays[{r}]"), "ray must appear once at its branch vertex and once at its puncture"));
        }
    }
    Ok(())
}
