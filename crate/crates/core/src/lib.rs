//! Orbit intersections of affine maps on K^d and regular self-maps of G_m^d
//! over K = F_{q^k}(t), with the solution-set algebra used to describe them.

// Index loops mirror the matrix and lattice algebra they implement.
#![allow(clippy::needless_range_loop)]

pub mod affine;
pub mod funcfield;
pub mod lrs;
pub mod mulgroup;
pub mod setalg;
pub mod torus;
pub mod wire;
