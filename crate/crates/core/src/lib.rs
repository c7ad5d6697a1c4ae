//! Radial ground states, linearized spectra, Dirichlet-to-Neumann eigenvalue
//! curves and bifurcation radii for `-Δu + u = u^p` on exterior domains of
//! hyperbolic space.

pub mod bifurcation;
pub mod cli;
pub mod dtn;
pub mod error;
pub mod harmonics;
pub mod linalg;
pub mod model;
pub mod ode;
pub mod qualitative;
pub mod radial;
pub mod spectral;

pub use error::{Error, ErrorKind, Result};
pub use model::{ModelParams, NumericsConfig, RadialGrid, RadialProfile};
