//! Exact computations for toric Deligne-Mumford stacks: stacky fans and
//! their box, integral Chow rings, and inertial Chow rings for the
//! orbifold, virtual, `V+`, `V-` and asymptotic products.

pub mod charring;
pub mod fan;
pub mod gradedpoly;
pub mod inertial;
pub mod lattice;
pub mod parallel;
