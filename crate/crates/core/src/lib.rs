//! Solver kernels for a desk-scale, two-way coupled simulation of pulsatile
//! cerebrospinal-fluid flow through an idealized ventricular system.
//!
//! The crate is organized around the pipeline stages:
//!
//! * [`mesh`] / [`geometry`] — unstructured meshes with tagged boundary
//!   patches, parametric generators and quality reporting;
//! * [`fluid`] — incompressible finite-volume Navier-Stokes with PISO
//!   pressure-velocity coupling on a moving (ALE) mesh;
//! * [`solid`] — small-strain viscoelastic finite elements advanced by
//!   Newmark integration;
//! * [`motion`] — diffusion-based mesh smoothing that follows the wetted
//!   boundary;
//! * [`coupling`] — the partitioned fluid-structure exchange loop;
//! * [`physiology`] — inflow waveform, tumor growth and load models;
//! * [`analysis`] — flow metrics and the analytic benchmark solutions used
//!   to validate the solvers.

pub mod analysis;
pub mod coupling;
pub mod fluid;
pub mod geometry;
pub mod mesh;
pub mod motion;
pub mod physiology;
pub mod solid;
pub mod sparse;

/// 3-component double-precision vector used for coordinates, velocities and
/// displacements throughout the crate.
pub type Vec3 = nalgebra::Vector3<f64>;
