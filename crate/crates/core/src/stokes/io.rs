//! Versioned JSON for Stokes and spectral graphs.
//!
//! Only the rotation system is authoritative. Derived tables (regions, sides, the
//! cover) are written for inspection and, when present on read, must agree with
//! what the rotation system produces.

use super::graph::{Ray, StokesGraph};
use super::path::{Crossing, RegionGraph};
use super::spectral::{double_cover, SpectralGraph};
use super::Geometry;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const STOKES_SCHEMA: &str = "stokes-graph/1";
pub const SPECTRAL_SCHEMA: &str = "spectral-graph/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayJson {
    pub branch: usize,
    pub pole: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionJson {
    pub poles: [usize; 2],
    pub branches: [usize; 2],
    pub rays: [usize; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StokesGraphJson {
    pub schema: String,
    pub rays: Vec<RayJson>,
    /// Anticlockwise ray ids at each branch vertex.
    pub branch_vertices: Vec<Vec<usize>>,
    /// Anticlockwise ray ids at each puncture.
    pub polar_vertices: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<Vec<RegionJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Geometry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralRegionJson {
    pub base: usize,
    pub sink: usize,
    pub source: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralRayJson {
    pub base: usize,
    /// "+" for α₊, "-" for α₋.
    pub sign: String,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralGraphJson {
    pub schema: String,
    pub stokes: StokesGraphJson,
    /// Levelt exponents per puncture, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral_regions: Option<Vec<SpectralRegionJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral_rays: Option<Vec<SpectralRayJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramification: Option<Vec<[usize; 6]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detours: Option<Vec<Vec<Crossing>>>,
}

fn check_schema(found: &str, want: &str, loc: &str) -> Result<()> {
    if found != want {
        return Err(Error::schema(loc, format!("expected schema {want:?}, found {found:?}")));
    }
    Ok(())
}

/// Parses JSON text, mapping serde errors to schema violations with a line/column location.
pub fn parse<D: for<'de> Deserialize<'de>>(text: &str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::schema(format!("line {} column {}", e.line(), e.column()), e.to_string()))
}

pub fn to_pretty<S: Serialize>(v: &S) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

impl StokesGraphJson {
    pub fn from_graph(g: &StokesGraph, geometry: Option<Geometry>) -> Self {
        StokesGraphJson {
            schema: STOKES_SCHEMA.into(),
            rays: g.rays.iter().map(|r| RayJson { branch: r.branch, pole: r.pole }).collect(),
            branch_vertices: g.branches.iter().map(|b| b.to_vec()).collect(),
            polar_vertices: g.poles.clone(),
            regions: Some(g.regions.iter().map(|r| RegionJson { poles: r.poles, branches: r.branches, rays: r.rays }).collect()),
            geometry,
        }
    }

    pub fn to_graph(&self) -> Result<StokesGraph> {
        check_schema(&self.schema, STOKES_SCHEMA, "schema")?;
        let rays = self.rays.iter().map(|r| Ray { branch: r.branch, pole: r.pole }).collect();
        let mut branches = Vec::with_capacity(self.branch_vertices.len());
        for (i, b) in self.branch_vertices.iter().enumerate() {
            let rot: [usize; 3] = b
                .as_slice()
                .try_into()
                .map_err(|_| Error::schema(format!("branch_vertices[{i}]"), format!("branch vertex has degree {}, expected 3", b.len())))?;
            branches.push(rot);
        }
        let g = StokesGraph::from_rotation(rays, branches, self.polar_vertices.clone())?;
        if let Some(regs) = &self.regions {
            let have: Vec<RegionJson> =
                g.regions.iter().map(|r| RegionJson { poles: r.poles, branches: r.branches, rays: r.rays }).collect();
            if regs != &have {
                return Err(Error::schema("regions", "stored regions disagree with the face walk of the rotation system"));
            }
        }
        if let Some(geo) = &self.geometry {
            if geo.rays.len() != g.rays.len() || geo.zeros.len() != g.branches.len() || geo.punctures.len() != g.poles.len() {
                return Err(Error::schema("geometry", "geometry sizes disagree with the graph"));
            }
        }
        Ok(g)
    }
}

impl SpectralGraphJson {
    pub fn from_cover(sg: &SpectralGraph, geometry: Option<Geometry>, lambda: Option<Vec<[f64; 2]>>) -> Self {
        let regions = (0..sg.region_count())
            .map(|s| SpectralRegionJson { base: s / 2, sink: sg.sink_of(s), source: sg.sink_of(s ^ 1) })
            .collect();
        let rays = (0..sg.ray_count())
            .map(|r| {
                let (from, to) = sg.ray_ends(r);
                SpectralRayJson { base: r / 2, sign: if r % 2 == 1 { "+".into() } else { "-".into() }, from, to }
            })
            .collect();
        SpectralGraphJson {
            schema: SPECTRAL_SCHEMA.into(),
            stokes: StokesGraphJson::from_graph(&sg.base, geometry),
            lambda,
            spectral_regions: Some(regions),
            spectral_rays: Some(rays),
            ramification: Some(sg.ramification.clone()),
            detours: Some(sg.detours.iter().map(|d| d.crossings.clone()).collect()),
        }
    }

    pub fn to_cover(&self) -> Result<SpectralGraph> {
        check_schema(&self.schema, SPECTRAL_SCHEMA, "schema")?;
        let sg = double_cover(&self.stokes.to_graph()?)?;
        let want = Self::from_cover(&sg, None, None);
        if self.spectral_regions.as_ref().is_some_and(|v| Some(v) != want.spectral_regions.as_ref()) {
            return Err(Error::schema("spectral_regions", "disagrees with the cover built from the rotation system"));
        }
        if self.spectral_rays.as_ref().is_some_and(|v| Some(v) != want.spectral_rays.as_ref()) {
            return Err(Error::schema("spectral_rays", "disagrees with the cover built from the rotation system"));
        }
        if self.ramification.as_ref().is_some_and(|v| Some(v) != want.ramification.as_ref()) {
            return Err(Error::schema("ramification", "disagrees with the cover built from the rotation system"));
        }
        if self.detours.as_ref().is_some_and(|v| Some(v) != want.detours.as_ref()) {
            return Err(Error::schema("detours", "disagrees with the cover built from the rotation system"));
        }
        if let Some(l) = &self.lambda {
            if l.len() != sg.base.poles.len() {
                return Err(Error::schema("lambda", "one exponent per puncture required"));
            }
        }
        Ok(sg)
    }
}

pub fn read_stokes(text: &str) -> Result<StokesGraph> {
    parse::<StokesGraphJson>(text)?.to_graph()
}

pub fn write_stokes(g: &StokesGraph) -> String {
    to_pretty(&StokesGraphJson::from_graph(g, None))
}

pub fn read_spectral(text: &str) -> Result<SpectralGraph> {
    parse::<SpectralGraphJson>(text)?.to_cover()
}

pub fn write_spectral(sg: &SpectralGraph) -> String {
    to_pretty(&SpectralGraphJson::from_cover(sg, None, None))
}
