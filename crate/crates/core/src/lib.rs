//! Spatially adaptive total variation denoising of one-dimensional signals.
//!
//! Two models are solved exactly on uniform grids: weighted total variation
//! with a spatial weight in the regularizer ([`wtv`]) and unweighted total
//! variation with a spatial weight in the data term ([`wfid`]). Solutions carry
//! dual certificates that [`analysis`] verifies, and [`analytic`] provides
//! closed-form references.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod analytic;
pub mod apg;
pub mod error;
pub mod grid;
pub mod io;
pub mod taut_string;
pub mod weight;
pub mod wfid;
pub mod wtv;

pub use error::{Error, Result};
pub use grid::{default_jump_threshold, jump_set, make_grid, sample, total_variation, Grid, Jump, JumpReport, Signal};
pub use weight::{realize_weight, weighted_tv, WeightField, WeightSpec};
pub use wfid::{solve_wfid, FidSolution};
pub use wtv::{solve_wtv, Method, Solution, SolverOptions};
