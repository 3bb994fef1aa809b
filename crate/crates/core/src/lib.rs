//! Reduced dynamics of an n-dimensional rubber Chaplygin ball rolling over a fixed sphere:
//! integration on the sphere, time substitutions, the map to natural systems, conserved quantities
//! and sphero-conical coordinates.

// negated comparisons are how NaN inputs are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod coords;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod integrate;
pub mod reparam;
pub mod trajectory;
pub mod types;
pub mod verify;

pub use error::{Error, Result};
pub use types::{project_state, BallConfig, SphereState};
