//! Lattice computations around the nearest-plane (Babai) algorithm.
//!
//! * [`lattice`]: bases, reduction for n <= 3, obtuse superbases, Voronoi cells, catalog.
//! * [`cvp`]: nearest-plane rounding plus an exact closest/shortest vector oracle.
//! * [`protocol`]: the distributed nearest-plane protocol (encoders, decoder, rates).
//! * [`analysis`]: error probability of the nearest-plane point, exact and estimated.
//! * [`cli`]: subcommand drivers shared by the `dbp` and `perr` binaries.

pub mod analysis;
pub mod cli;
pub mod cvp;
pub mod entropy;
pub mod geometry;
pub mod lattice;
pub mod linalg;
pub mod mc;
pub mod protocol;
pub mod scalar;
