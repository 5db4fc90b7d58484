//! Piecewise-linear critical point theory for scalar fields on triangulated
//! surfaces, possibly with boundary.

pub mod classify;
pub mod exact;
pub mod field;
pub mod gallery;
pub mod io;
pub mod gf2;
pub mod mesh;
pub mod network;
pub mod regions;
pub mod verify;
mod util;
