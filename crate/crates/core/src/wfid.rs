//! Total variation denoising with a spatially weighted data term
//!
//! `min_u (h/2) sum w_j (f_j - u_j)^2 + sum |u_{i+1} - u_i|`
//!
//! The dual lives in the unit box and links through `v_{j+1} - v_j = h w_j (f_j - u_j)`.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{total_variation, Grid, Signal};
use crate::taut_string::TubeProblem;
use crate::weight::WeightField;
use crate::wtv::{package, run_tube, Solution, SolverOptions};

/// Relative floor applied to small fidelity weights unless overridden.
pub const DEFAULT_RELATIVE_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidSolution {
    #[serde(flatten)]
    pub solution: Solution,
    /// Lower bound applied to the cell weights inside the solver.
    pub floor_used: f64,
}

impl Deref for FidSolution {
    type Target = Solution;

    fn deref(&self) -> &Solution {
        &self.solution
    }
}

fn resolve_floor(w: &WeightField, floor: Option<f64>) -> Result<f64> {
    let max_w = w.max_cell();
    if !(max_w > 0.0) {
        return Err(Error::InvalidWeight("fidelity weight vanishes everywhere".into()));
    }
    match floor {
        None => Ok(DEFAULT_RELATIVE_FLOOR * max_w),
        Some(x) if x > 0.0 && x.is_finite() => Ok(x),
        Some(x) => Err(Error::InvalidParameter(format!("weight floor must be > 0, got {x}"))),
    }
}

/// Minimizes the weighted-fidelity functional with the default floor.
pub fn solve_wfid(f: &Signal, w: &WeightField, opts: &SolverOptions) -> Result<FidSolution> {
    solve_wfid_with_floor(f, w, None, opts)
}

/// As [`solve_wfid`] with an explicit absolute floor on the cell weights.
pub fn solve_wfid_with_floor(f: &Signal, w: &WeightField, floor: Option<f64>, opts: &SolverOptions) -> Result<FidSolution> {
    opts.validate()?;
    let grid = *f.grid();
    grid.check_same(w.grid())?;
    let floor_used = resolve_floor(w, floor)?;
    let masses: Vec<f64> = w.floored_cells(floor_used).into_iter().map(|x| x * grid.h()).collect();
    let mut radii = vec![1.0; grid.n() + 1];
    radii[0] = 0.0;
    radii[grid.n()] = 0.0;
    let p = TubeProblem { masses: &masses, data: f.values(), radii: &radii };
    let (sol, ok) = run_tube(&p, opts);
    Ok(FidSolution { solution: package(grid, &p, sol, opts, ok)?, floor_used })
}

/// `(h/2) sum w_j (f_j - u_j)^2 + TV(u)` with the unfloored weights.
pub fn objective_wfid(f: &Signal, w: &WeightField, u: &Signal) -> Result<f64> {
    f.grid().check_same(u.grid())?;
    f.grid().check_same(w.grid())?;
    let h = f.grid().h();
    let fit: f64 = f
        .values()
        .iter()
        .zip(u.values())
        .zip(w.cell_values())
        .map(|((a, b), w)| w * (a - b).powi(2))
        .sum();
    Ok(0.5 * h * fit + total_variation(u))
}

/// Outcome of [`clamp_form_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClampForm {
    pub is_clamp: bool,
    pub x1: f64,
    pub x2: f64,
}

/// Tests whether `u` equals `f` clamped between its first and last values.
/// `x1` is the left edge of the first cell where `u` meets `f` and `x2` the right
/// edge of the last one; when `u` is constant both report where `f` crosses it.
pub fn clamp_form_check(u: &Signal, f: &Signal, tol: f64) -> ClampForm {
    let grid = u.grid();
    let (uv, fv) = (u.values(), f.values());
    let n = uv.len();
    let (first, last) = (uv[0], uv[n - 1]);
    let (lo, hi) = (first.min(last), first.max(last));
    let increasing = fv[n - 1] >= fv[0];
    let oriented = if increasing { first <= last + tol } else { first + tol >= last };
    let matches = uv.iter().zip(fv).all(|(u, f)| (u - f.clamp(lo, hi)).abs() <= tol);
    let is_clamp = oriented && matches && uv.len() == fv.len();

    let constant = u.range() <= tol;
    let contact: Vec<usize> = (0..n).filter(|&j| (uv[j] - fv[j]).abs() <= tol).collect();
    let (x1, x2) = if constant || contact.is_empty() {
        let x = crossing(grid, fv, u.mean());
        (x, x)
    } else {
        (grid.node(contact[0]), grid.node(contact[contact.len() - 1] + 1))
    };
    ClampForm { is_clamp, x1, x2 }
}

fn crossing(grid: &Grid, f: &[f64], level: f64) -> f64 {
    for j in 0..f.len() - 1 {
        let (a, b) = (f[j] - level, f[j + 1] - level);
        if a == 0.0 {
            return grid.center(j);
        }
        if a * b < 0.0 {
            return grid.center(j) + grid.h() * a / (a - b);
        }
    }
    if (f[f.len() - 1] - level).abs() <= (f[0] - level).abs() {
        grid.center(f.len() - 1)
    } else {
        grid.center(0)
    }
}

/// `lambda sum_{x_j < x} h w_j (x_j - x)`, the dual value left of `x` for a
/// constant solution equal to `lambda x` and data `lambda x`.
pub fn phi1(w: &[f64], grid: &Grid, lambda: f64, x: f64) -> f64 {
    grid.centers()
        .iter()
        .zip(w)
        .filter(|(c, _)| **c < x)
        .map(|(c, w)| lambda * grid.h() * w * (c - x))
        .sum()
}

/// `-lambda sum_{x_j > x} h w_j (x_j - x)`.
pub fn phi2(w: &[f64], grid: &Grid, lambda: f64, x: f64) -> f64 {
    grid.centers()
        .iter()
        .zip(w)
        .filter(|(c, _)| **c > x)
        .map(|(c, w)| -lambda * grid.h() * w * (c - x))
        .sum()
}

/// Sufficient condition for a constant minimizer with data `lambda x`:
/// `phi1(b) >= -1` or `phi2(a) >= -1`, evaluated on the floored weights.
pub fn constant_solution_predicted(w: &WeightField, lambda: f64, floor: Option<f64>) -> Result<bool> {
    let grid = *w.grid();
    let floor = resolve_floor(w, floor)?;
    let cells = w.floored_cells(floor);
    Ok(phi1(&cells, &grid, lambda, grid.b()) >= -1.0 || phi2(&cells, &grid, lambda, grid.a()) >= -1.0)
}

/// Most negative value of the dual for the constant candidate `u = lambda xi`,
/// where `xi` is the point at which `phi1` and `phi2` meet. The minimizer for
/// data `lambda x` is constant exactly when this level is at least `-1`.
pub fn constant_solution_level(w: &WeightField, lambda: f64, floor: Option<f64>) -> Result<f64> {
    let grid = *w.grid();
    let floor = resolve_floor(w, floor)?;
    let cells = w.floored_cells(floor);
    let h = grid.h();
    let mass: f64 = cells.iter().sum::<f64>() * h;
    let moment: f64 = cells.iter().zip(grid.centers()).map(|(w, x)| w * x).sum::<f64>() * h;
    let xi = moment / mass;
    let mut v = 0.0;
    let mut level: f64 = 0.0;
    for (w, x) in cells.iter().zip(grid.centers()) {
        v += lambda * h * w * (x - xi);
        level = level.min(v);
    }
    Ok(level)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightFamily {
    /// `n^2` on balls of radius `1/n` around each jump.
    Concentrating,
    /// `1` on balls of radius `1/n`, so the total mass vanishes.
    VanishingMass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub level: usize,
    pub sup_error: f64,
    pub total_variation: f64,
    pub weight_mass: f64,
    pub solution: FidSolution,
}

/// Solves the weighted-fidelity problem for `f0 + eta` with weights
/// concentrating at the jumps of `f0`, one solve per level.
pub fn pc_limit_recovery(
    grid: &Grid,
    f0: &dyn Fn(f64) -> f64,
    eta: &dyn Fn(f64) -> f64,
    jumps: &[f64],
    levels: &[usize],
    family: WeightFamily,
    opts: &SolverOptions,
) -> Result<Vec<LevelResult>> {
    if jumps.is_empty() {
        return Err(Error::InvalidParameter("need at least one jump location".into()));
    }
    let eta_scale = grid.centers().iter().fold(0.0f64, |m, &x| m.max(eta(x).abs()));
    for &x in jumps {
        if x <= grid.a() || x >= grid.b() {
            return Err(Error::BreakpointOutsideDomain { x, a: grid.a(), b: grid.b() });
        }
        if eta(x).abs() > 1e-12 * (1.0 + eta_scale) {
            return Err(Error::InvalidParameter(format!("noise must vanish at the jump {x}, got {}", eta(x))));
        }
    }
    let f0s = crate::grid::sample(grid, f0)?;
    let f = crate::grid::sample(grid, |x| f0(x) + eta(x))?;
    let mut out = Vec::with_capacity(levels.len());
    for &level in levels {
        if level == 0 || 1.0 / (level as f64) < 3.0 * grid.h() {
            return Err(Error::InvalidParameter(format!("level {level} too large for a grid with h = {}", grid.h())));
        }
        let radius = 1.0 / level as f64;
        let height = match family {
            WeightFamily::Concentrating => (level * level) as f64,
            WeightFamily::VanishingMass => 1.0,
        };
        let cells: Vec<f64> = grid
            .centers()
            .iter()
            .map(|&x| jumps.iter().filter(|&&xi| (x - xi).abs() < radius).count() as f64 * height)
            .collect();
        let w = WeightField::from_cells(*grid, cells)?;
        let weight_mass = w.cell_values().iter().sum::<f64>() * grid.h();
        let solution = solve_wfid(&f, &w, opts)?;
        let sup_error = solution.u.distance(&f0s)?;
        out.push(LevelResult { level, sup_error, total_variation: total_variation(&solution.u), weight_mass, solution });
    }
    Ok(out)
}

/// Edges where `u` jumps although `f` does not, with positive weight on both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub tolerance: f64,
    pub violations: Vec<usize>,
}

impl ContainmentReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn fid_jump_containment(u: &Signal, f: &Signal, w: &WeightField, tol: f64) -> ContainmentReport {
    let du = u.differences();
    let df = f.differences();
    let wc = w.cell_values();
    let violations = (0..du.len())
        .filter(|&e| du[e].abs() > tol && wc[e] > 0.0 && wc[e + 1] > 0.0 && df[e].abs() <= tol)
        .collect();
    ContainmentReport { tolerance: tol, violations }
}
