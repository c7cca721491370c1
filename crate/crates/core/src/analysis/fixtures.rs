//! Configurations exhibiting the possible jump behaviours.
//!
//! Each fixture pairs data and a weight on `(-1, 1)` with a predicate on the
//! one-sided values of `f` and `u` at a marked edge.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{default_jump_threshold, sample, Grid, Signal};
use crate::weight::{realize_weight, WeightField, WeightSpec};
use crate::wtv::{solve_wtv, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    /// The weight has a convex kink but `u` stays continuous.
    ContinuousAtKink,
    /// `f` is continuous, `u` jumps by strictly less than the kink.
    JumpBelowKink,
    /// `f` is continuous, `u` jumps by exactly the kink.
    JumpEqualsKink,
    /// Smooth weight, `f^l < f^r < u^l < u^r`.
    JumpAboveData,
    /// `u^l < f^l < f^r < u^r`.
    EnlargedSameDirection,
    /// `u^l < f^r < f^l < u^r`.
    ReversedDirection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub expectation: Expectation,
    pub f: Signal,
    pub spec: WeightSpec,
    pub alpha: WeightField,
    /// Point whose nearest edge is inspected.
    pub location: f64,
    /// Slope of the data away from the marked point, used to size discretisation tolerances.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureOutcome {
    pub name: String,
    pub expectation: Expectation,
    pub edge: usize,
    pub f_left: f64,
    pub f_right: f64,
    pub u_left: f64,
    pub u_right: f64,
    pub dprime: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Fixture {
    /// Evaluates the predicate on a computed `u`.
    pub fn check(&self, u: &Signal) -> Result<FixtureOutcome> {
        let grid = self.f.grid();
        grid.check_same(u.grid())?;
        let e = grid.nearest_edge(self.location);
        let (fl, fr) = (self.f.values()[e], self.f.values()[e + 1]);
        let (ul, ur) = (u.values()[e], u.values()[e + 1]);
        let dprime = self.alpha.dprime_at(e);
        let du = ur - ul;
        let threshold = default_jump_threshold(u).max(f64::EPSILON);
        let disc = 2.0 * grid.h() * self.slope + 1e-6;
        let (tolerance, pass) = match self.expectation {
            Expectation::ContinuousAtKink => (threshold, dprime > 0.0 && du.abs() <= threshold && u.range() > disc),
            Expectation::JumpBelowKink => (disc, (fr - fl).abs() <= disc && du > disc && du < dprime - disc),
            Expectation::JumpEqualsKink => (disc, (fr - fl).abs() <= disc && dprime > disc && (du - dprime).abs() <= disc),
            Expectation::JumpAboveData => (disc, dprime == 0.0 && fl + disc < fr && fr + disc < ul && ul + disc < ur),
            Expectation::EnlargedSameDirection => (disc, ul + disc < fl && fl + disc < fr && fr + disc < ur),
            Expectation::ReversedDirection => (disc, ul + disc < fr && fr + disc < fl && fl + disc < ur),
        };
        Ok(FixtureOutcome {
            name: self.name.clone(),
            expectation: self.expectation,
            edge: e,
            f_left: fl,
            f_right: fr,
            u_left: ul,
            u_right: ur,
            dprime,
            tolerance,
            pass,
        })
    }
}

fn step(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// The six jump-behaviour fixtures on `n` cells of `(-1, 1)`.
pub fn table1_fixtures(n: usize) -> Result<Vec<Fixture>> {
    let grid = Grid::new(-1.0, 1.0, n)?;
    let build = |name: &str, expectation, f: &dyn Fn(f64) -> f64, spec: WeightSpec, location, slope| -> Result<Fixture> {
        Ok(Fixture {
            name: name.into(),
            expectation,
            f: sample(&grid, f)?,
            alpha: realize_weight(&spec, &grid)?,
            spec,
            location,
            slope,
        })
    };
    Ok(vec![
        build("continuous-at-kink", Expectation::ContinuousAtKink, &|x| x, WeightSpec::abs(0.05, 0.3, 0.9), 0.9, 1.0)?,
        build("jump-below-kink", Expectation::JumpBelowKink, &|x| 2.0 * x, WeightSpec::abs(2.0, 0.3, 0.0), 0.0, 2.0)?,
        build("jump-equals-kink", Expectation::JumpEqualsKink, &|x| 2.0 * x, WeightSpec::abs(0.1, 0.15, 0.0), 0.0, 2.0)?,
        build(
            "jump-above-data",
            Expectation::JumpAboveData,
            &|x| 2.0 * x + 0.2 * step(x),
            WeightSpec::Pwa { knots: vec![[-1.0, 0.04], [1.0, 0.64]] },
            0.0,
            2.0,
        )?,
        build(
            "enlarged-same-direction",
            Expectation::EnlargedSameDirection,
            &|x| 2.0 * x + 0.1 * step(x),
            WeightSpec::abs(0.1, 0.15, 0.0),
            0.0,
            2.0,
        )?,
        build(
            "reversed-direction",
            Expectation::ReversedDirection,
            &|x| 2.0 * x - 0.1 * step(x),
            WeightSpec::abs(0.15, 0.15, 0.0),
            0.0,
            2.0,
        )?,
    ])
}

/// Solves every fixture and evaluates its predicate.
pub fn run_fixtures(n: usize, opts: &SolverOptions) -> Result<Vec<FixtureOutcome>> {
    table1_fixtures(n)?
        .iter()
        .map(|fx| {
            let sol = solve_wtv(&fx.f, &fx.alpha, opts)?;
            fx.check(&sol.u)
        })
        .collect()
}

/// Data, weight and scalar for which smoothing with the scalar first and the
/// weight second differs from one solve with their sum.
pub fn non_commuting_pair(n: usize) -> Result<(Signal, WeightField, f64)> {
    let grid = Grid::new(-1.0, 1.0, n)?;
    let f = sample(&grid, |x| 2.0 * x)?;
    let alpha = realize_weight(&WeightSpec::abs(0.5, 0.05, 0.7), &grid)?;
    Ok((f, alpha, 0.2))
}
