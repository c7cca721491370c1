//! Weighted total variation denoising
//!
//! `min_u (h/2) sum (f_j - u_j)^2 + sum alpha_i |u_{i+1} - u_i|`
//!
//! and its box-constrained dual over node variables `v`, `|v_i| <= alpha_i`,
//! `v_0 = v_n = 0`, linked to the primal by `u = f - Bv / h`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::apg::accelerated_projected_gradient;
use crate::error::{Error, Result};
use crate::grid::{Grid, Signal};
use crate::taut_string::{taut_string, TubeProblem, TubeSolution};
use crate::analytic::pc_exact_weight;
use crate::weight::{realize_weight, weighted_tv, WeightField, WeightSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Exact taut-string funnel.
    #[default]
    TautString,
    /// FISTA on the dual with adaptive restart.
    Apg,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::TautString => "taut-string",
            Method::Apg => "apg",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "taut-string" | "taut" => Ok(Method::TautString),
            "apg" | "fista" => Ok(Method::Apg),
            _ => Err(Error::Parse(format!("unknown method '{s}', expected taut-string or apg"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Bound on `(primal - dual) / (1 + |primal|)`.
    pub gap_tolerance: f64,
    pub method: Method,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { max_iterations: 100_000, gap_tolerance: 1e-10, method: Method::TautString }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.gap_tolerance > 0.0 && self.gap_tolerance.is_finite()) {
            return Err(Error::InvalidParameter(format!("gap tolerance must be > 0, got {}", self.gap_tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub u: Signal,
    /// Node values, length `n + 1`, zero at both ends.
    pub v: Vec<f64>,
    pub gap: f64,
    pub relative_gap: f64,
    pub primal: f64,
    pub dual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub method: Method,
    /// Strong-convexity modulus per cell of the fidelity, used by [`Solution::u_error_bound`].
    pub(crate) min_mass: f64,
}

impl Solution {
    /// Max-norm bound on the distance to the exact minimizer implied by the gap.
    /// A gap below rounding level is replaced by `64 eps (1 + |primal|)`.
    pub fn u_error_bound(&self) -> f64 {
        let gap = self.gap.max(64.0 * f64::EPSILON * (1.0 + self.primal.abs()));
        (2.0 * gap / self.min_mass).sqrt()
    }
}

pub(crate) fn run_tube(p: &TubeProblem<'_>, opts: &SolverOptions) -> (TubeSolution, bool) {
    match opts.method {
        Method::TautString => (taut_string(p), true),
        Method::Apg => {
            let out = accelerated_projected_gradient(p, opts.max_iterations, opts.gap_tolerance);
            (out.solution, out.converged)
        }
    }
}

pub(crate) fn package(grid: Grid, p: &TubeProblem<'_>, sol: TubeSolution, opts: &SolverOptions, converged: bool) -> Result<Solution> {
    let primal = p.primal(&sol.u);
    let dual = p.dual(&sol.v);
    let gap = (primal - dual).max(0.0);
    let relative_gap = gap / (1.0 + primal.abs());
    let converged = converged && relative_gap <= opts.gap_tolerance;
    if !converged {
        log::warn!("solver stopped at relative gap {relative_gap:e} after {} iterations", sol.iterations);
    }
    let min_mass = p.masses.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Solution {
        u: Signal::new(grid, sol.u)?,
        v: sol.v,
        gap,
        relative_gap,
        primal,
        dual,
        iterations: sol.iterations,
        converged,
        method: opts.method,
        min_mass,
    })
}

/// Minimizes the weighted-TV functional.
pub fn solve_wtv(f: &Signal, alpha: &WeightField, opts: &SolverOptions) -> Result<Solution> {
    opts.validate()?;
    let grid = *f.grid();
    grid.check_same(alpha.grid())?;
    let masses = vec![grid.h(); grid.n()];
    let radii = alpha.node_radii();
    let p = TubeProblem { masses: &masses, data: f.values(), radii: &radii };
    let (sol, ok) = run_tube(&p, opts);
    log::debug!("wtv solve on n = {} finished after {} iterations", grid.n(), sol.iterations);
    package(grid, &p, sol, opts, ok)
}

/// `(h/2) sum (f - u)^2 + sum alpha_i |d_i(u)|`.
pub fn objective_wtv(f: &Signal, alpha: &WeightField, u: &Signal) -> Result<f64> {
    f.grid().check_same(u.grid())?;
    let h = f.grid().h();
    let fit: f64 = f.values().iter().zip(u.values()).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(0.5 * h * fit + weighted_tv(u, alpha)?)
}

pub(crate) fn check_dual_point(v: &[f64], radii: &[f64]) -> Result<()> {
    let n = radii.len() - 1;
    if v.len() != n + 1 {
        return Err(Error::LengthMismatch { expected: n + 1, got: v.len() });
    }
    for (node, (x, r)) in v.iter().zip(radii).enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFinite { index: node, value: *x });
        }
        let excess = x.abs() - r;
        if excess > 0.0 {
            return Err(Error::BoxViolation { node, excess });
        }
    }
    Ok(())
}

/// `<f, Bv> - |Bv|^2 / (2h)`, a lower bound on the primal optimum for feasible `v`.
pub fn dual_objective(f: &Signal, alpha: &WeightField, v: &[f64]) -> Result<f64> {
    let grid = f.grid();
    grid.check_same(alpha.grid())?;
    let radii = alpha.node_radii();
    check_dual_point(v, &radii)?;
    let masses = vec![grid.h(); grid.n()];
    Ok(TubeProblem { masses: &masses, data: f.values(), radii: &radii }.dual(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComposeOrder {
    /// `S_{alpha2}(S_{alpha1}(f))`.
    WeightedFirst,
    /// `S_{alpha1}(S_{alpha2}(f))`.
    ScalarFirst,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemigroupResult {
    pub one_shot: Solution,
    pub two_step: Solution,
    pub distance: f64,
    /// Sum of the gap-implied error bounds of the three solves.
    pub tolerance: f64,
}

/// Compares one solve with weight `alpha1 + alpha2` against two successive solves.
pub fn semigroup_compose(
    f: &Signal,
    alpha1: &WeightField,
    alpha2: f64,
    order: ComposeOrder,
    opts: &SolverOptions,
) -> Result<SemigroupResult> {
    let combined = alpha1.plus_scalar(alpha2)?;
    let scalar = WeightField::scalar(*f.grid(), alpha2)?;
    let one_shot = solve_wtv(f, &combined, opts)?;
    let (first, second) = match order {
        ComposeOrder::WeightedFirst => (alpha1, &scalar),
        ComposeOrder::ScalarFirst => (&scalar, alpha1),
    };
    let mid = solve_wtv(f, first, opts)?;
    let two_step = solve_wtv(&mid.u, second, opts)?;
    let distance = one_shot.u.distance(&two_step.u)?;
    let tolerance = one_shot.u_error_bound() + mid.u_error_bound() + two_step.u_error_bound();
    Ok(SemigroupResult { one_shot, two_step, distance, tolerance })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishingStep {
    pub floor: f64,
    pub solution: Solution,
    pub objective: f64,
    pub distance_to_final: f64,
    /// Distance to the previous floor's solution; `None` for the first floor.
    pub distance_to_previous: Option<f64>,
}

/// Solves with `alpha + floor` for each floor of a strictly decreasing positive sequence.
pub fn vanishing_weight_limit(
    f: &Signal,
    alpha: &WeightField,
    floors: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<VanishingStep>> {
    if floors.is_empty() {
        return Err(Error::InvalidParameter("need at least one floor".into()));
    }
    if floors.iter().any(|&x| !(x > 0.0 && x.is_finite())) || floors.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("floors must be positive and strictly decreasing".into()));
    }
    let mut sols = Vec::with_capacity(floors.len());
    for &floor in floors {
        let w = alpha.plus_scalar(floor)?;
        let sol = solve_wtv(f, &w, opts)?;
        sols.push(sol);
    }
    let last = sols.last().expect("nonempty").u.clone();
    let mut out = Vec::with_capacity(sols.len());
    let mut prev: Option<Signal> = None;
    for (floor, solution) in floors.iter().zip(sols) {
        let distance_to_final = solution.u.distance(&last)?;
        let distance_to_previous = prev.as_ref().map(|p| solution.u.distance(p)).transpose()?;
        prev = Some(solution.u.clone());
        out.push(VanishingStep { floor: *floor, objective: solution.primal, distance_to_final, distance_to_previous, solution });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcRecovery {
    pub weight: WeightSpec,
    pub solution: Solution,
    /// `max |u - f0|`.
    pub sup_error: f64,
    pub baseline: Solution,
    pub baseline_sup_error: f64,
    /// `range(f0) - range(u)` for the scalar baseline.
    pub contrast_loss: f64,
}

/// Denoises `f0 + eta` for piecewise-constant `f0` with breaks at `breaks`, using
/// tent weights that vanish at the breaks, and compares with scalar TV of weight
/// `baseline_alpha`. The noise must have zero mean on every piece.
pub fn pc_exact_recovery(
    f0: &Signal,
    eta: &Signal,
    breaks: &[f64],
    slope_margin: f64,
    baseline_alpha: f64,
    opts: &SolverOptions,
) -> Result<PcRecovery> {
    let grid = *f0.grid();
    grid.check_same(eta.grid())?;
    let mut ends = vec![grid.a()];
    for &x in breaks {
        if x <= grid.a() || x >= grid.b() {
            return Err(Error::BreakpointOutsideDomain { x, a: grid.a(), b: grid.b() });
        }
        ends.push(x);
    }
    ends.push(grid.b());
    let intervals: Vec<(f64, f64)> = ends.windows(2).map(|w| (w[0], w[1])).collect();
    let scale = 1.0 + eta.sup_norm();
    for &(lo, hi) in &intervals {
        let sum: f64 = (0..grid.n())
            .filter(|&j| (lo..hi).contains(&grid.center(j)))
            .map(|j| eta.values()[j] * grid.h())
            .sum();
        if sum.abs() > 1e-10 * scale * (hi - lo) {
            return Err(Error::InvalidParameter(format!("noise has mean {sum:e} on ({lo}, {hi}), expected zero")));
        }
    }
    let f = f0.add(eta)?;
    let weight = pc_exact_weight(&intervals, f.sup_norm().max(f64::MIN_POSITIVE), slope_margin)?;
    let alpha = realize_weight(&weight, &grid)?;
    let solution = solve_wtv(&f, &alpha, opts)?;
    let baseline = solve_wtv(&f, &WeightField::scalar(grid, baseline_alpha)?, opts)?;
    Ok(PcRecovery {
        weight,
        sup_error: solution.u.distance(f0)?,
        baseline_sup_error: baseline.u.distance(f0)?,
        contrast_loss: f0.range() - baseline.u.range(),
        solution,
        baseline,
    })
}
