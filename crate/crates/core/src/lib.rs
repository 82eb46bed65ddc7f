//! Three-phase flow with interfacial and bulk surfactant on structured grids.
//!
//! The crate couples a Boyer–Lapuerta three-phase Cahn–Hilliard system to a
//! conserved surfactant balance written in the chemical potential `q`, and to
//! incompressible Navier–Stokes with capillary and Marangoni forcing. It also
//! ships the sharp-interface references (a 1D junction diffusion problem and
//! Young's law) and the diagnostics used to compare the two.

pub mod error;
pub mod grid;
pub mod io;
pub mod cahn_hilliard;
pub mod config;
pub mod diagnostics;
pub mod energetics;
pub mod experiments;
pub mod flow;
pub mod linalg;
pub mod potentials;
pub mod run;
pub mod sharp;
pub mod surfactant;

pub use error::{Result, TricapError};
