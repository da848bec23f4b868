//! Exact lattice-point counts in spheres with uniform error envelopes.
//!
//! The crate has three layers. `lattice` and `enumerate` provide exact
//! rational geometry: bases, duals, LLL reduction, successive minima, and
//! Fincke-Pohst counting of lattice points in balls with exact boundary
//! decisions. `landau` turns coefficient series with a functional-equation
//! shape into two-term error envelopes via Riesz means and finite
//! differences. `epstein` and `dedekind` instantiate that machinery for
//! sphere counts of a lattice and for ideal counts of quadratic fields,
//! and `harness` supplies the deterministic scaffolding (seeded RNG,
//! log-log fits, grids) the experiments share.

pub mod dedekind;
pub mod enumerate;
pub mod epstein;
pub mod error;
pub mod harness;
pub mod landau;
pub mod lattice;
mod matq;

pub use enumerate::{count_points, count_points_norm_sq, norm_spectrum, CountMode, NormSpectrum};
pub use error::{Error, Result};
pub use lattice::{Lattice, LatticeProfile};
