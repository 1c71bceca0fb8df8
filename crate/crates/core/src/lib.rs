//! Exact periodic Delaunay decompositions of `Z^g`.
//!
//! Every computation runs over the rationals. The crate is `no_std` and only
//! needs `alloc`; file formats and the command line live in the `perdel` crate.
//!
//! Module map:
//!
//! - [`exact`]: rational scalars, matrices, fraction-free elimination, LDLᵀ signature
//! - [`polytope`]: convex hulls, face lattices, lattice points, normalized volume
//! - [`delaunay`]: Delaunay decomposition of a positive-definite form, walls, empty spheres
//! - [`sheaf`]: stratum dimension `h0` of a periodic decomposition
//! - [`seccone`]: secondary cone, Delaunay witnesses and Farkas certificates
//! - [`graphs`]: dual graphs, graphic forms, planarity and the Torelli pipeline
//! - [`catalog`]: named lattices, the dicing `Δ_RT` and its refinements
//! - [`moment`]: the finite-support moment map
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod catalog;
pub mod delaunay;
mod enumerate;
mod error;
pub mod exact;
pub mod graphs;
mod intmat;
pub mod lp;
pub mod moment;
pub mod polytope;
pub mod seccone;
pub mod sheaf;

pub use error::{Error, Result};
