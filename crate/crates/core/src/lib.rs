//! Minimum Scan Cover with angular costs.
//!
//! Every vertex of an embedded graph carries a heading that rotates at unit
//! speed; an edge is scanned when both endpoints face each other. A
//! [`ScanCover`](model::ScanCover) assigns each edge a scan time (in degrees,
//! since time and rotation share units) and is judged by one of three
//! objectives: makespan, total rotation energy, or the largest per-vertex
//! rotation energy.
//!
//! The crate is organised by role:
//!
//! * [`model`]: geometry, angles, Λ-cones, validation and evaluation.
//! * [`instances`]: random and celestial generators plus the text formats.
//! * [`onedim`]: the polynomial solver for instances on a line.
//! * [`exact`]: brute force, branch-and-bound and the Λ-cover decider.
//! * [`approx`]: the bipartite 2-approximation and its coloring-based extension.
//! * [`heuristics`]: greedy, local search, annealing and the genetic algorithm.
//! * [`models`]: MIP/CP formulations written as LP-style files.
//! * [`hardness`]: gadget construction for the MNAE3SAT reduction.
//! * [`bench`]: run records and the CSV benchmark harness used by the CLI.

pub mod approx;
pub mod bench;
pub mod exact;
pub mod hardness;
pub mod heuristics;
pub mod instances;
pub mod model;
pub mod models;
pub mod onedim;

mod error;

pub use error::Error;
pub use model::{
    Dimension, Evaluation, Instance, Objective, Point, Rotation, ScanCover, ANGLE_TOLERANCE,
};
