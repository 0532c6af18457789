//! Stokes graphs of meromorphic quadratic differentials on the punctured sphere,
//! odd abelian local systems on the spectral cover, and the Voros
//! nonabelianisation / abelianisation correspondence between them.
//!
//! Numeric code is generic over [`scalar::Real`] (`f32` or `f64`); the aliases
//! below fix `f64`, which every accuracy target assumes.

pub mod error;
pub mod foliation;
pub mod mat2;
pub mod poly;
pub mod quad_diff;
pub mod scalar;
pub mod stokes;

pub use error::{Error, Result};

pub type QuadraticDifferential = quad_diff::QuadraticDifferential<f64>;
pub type MarkedSphere = quad_diff::MarkedSphere<f64>;
pub type Trajectory = foliation::Trajectory<f64>;
pub type TraceConfig = foliation::TraceConfig<f64>;
pub type Mat2 = mat2::Mat2<f64>;
pub mod abelian;
pub mod abelianise;
pub mod voros;

pub type OddAbelianSystem = abelian::OddAbelianSystem<f64>;
pub type HolonomyVector = abelian::HolonomyVector<f64>;
pub type Sl2Representation = voros::Sl2Representation<f64>;
