//! Subwavelength resonances of concentrically nested, high-contrast spherical
//! acoustic resonators.
//!
//! Three independent routes to the resonant frequencies are provided:
//!
//! * [`swe`]: roots of the `4N x 4N` spherical-wave transmission determinant,
//! * [`dtn`]: roots of a `2N x 2N` determinant built on the exterior
//!   Dirichlet-to-Neumann map,
//! * [`capacitance`]: leading-order asymptotics from the tridiagonal
//!   capacitance matrix.
//!
//! [`scattering`] solves the plane-wave scattering problem and derives field
//! values, norms, the modal decomposition and the monopole far field.

pub mod capacitance;
pub mod dtn;
pub mod error;
pub mod exec;
pub mod model;
pub mod numerics;
pub mod resonance;
pub mod scattering;
pub mod special;
pub mod swe;

pub use capacitance::CapacitanceSystem;
pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{equidistant_geometry, MaterialParams, NestedGeometry};
pub use resonance::{ModeRoot, SearchOptions};
pub use scattering::{solve_scattering, ScatteringSolution};
pub use swe::{find_resonances_swe, ResonanceSpectrum};
