//! RunConfig: JSON defaults for a run, overridden by command-line flags.

use crate::exit::Failure;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use stokes_core::stokes::io::parse;
use stokes_core::{Error, TraceConfig};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// If set, must name the subcommand being run.
    pub command: Option<String>,
    /// Residues at 0, 1, ∞ as [re, im]; excludes `phi`.
    pub residues: Option<Vec<[f64; 2]>>,
    pub phi: Option<PathBuf>,
    pub system: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub plot: Option<bool>,
    pub trace: Option<TraceOverrides>,
}

/// Optional replacements for the geometry-scaled tracing defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceOverrides {
    pub initial_offset: Option<f64>,
    pub max_arclength_w: Option<f64>,
    pub pole_radius: Option<f64>,
    pub far_radius: Option<f64>,
    pub zero_radius: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub horizontal_tol: Option<f64>,
    pub max_steps: Option<usize>,
}

impl TraceOverrides {
    pub fn apply(&self, cfg: &mut TraceConfig) {
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut cfg.initial_offset, self.initial_offset);
        set(&mut cfg.max_arclength_w, self.max_arclength_w);
        set(&mut cfg.pole_radius, self.pole_radius);
        set(&mut cfg.far_radius, self.far_radius);
        set(&mut cfg.zero_radius, self.zero_radius);
        set(&mut cfg.rtol, self.rtol);
        set(&mut cfg.atol, self.atol);
        set(&mut cfg.horizontal_tol, self.horizontal_tol);
        if let Some(n) = self.max_steps {
            cfg.max_steps = n;
        }
    }
}

impl RunConfig {
    /// Relative paths inside the file are taken relative to the file's directory.
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))?;
        let mut c: RunConfig = parse(&text)?;
        if c.residues.is_some() && c.phi.is_some() {
            return Err(Error::schema("residues", "residues and phi are mutually exclusive").into());
        }
        if c.residues.as_ref().is_some_and(|r| r.len() != 3) {
            return Err(Error::schema("residues", "exactly three residues required").into());
        }
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut c.phi, &mut c.system, &mut c.out].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(c)
    }
}
