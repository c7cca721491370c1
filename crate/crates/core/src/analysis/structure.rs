//! Structural reports on solved signals.

use serde::{Deserialize, Serialize};

use crate::grid::{total_variation, Signal};
use crate::weight::WeightField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvBound {
    pub holds: bool,
    /// `TV(f) - TV(u)`.
    pub margin: f64,
}

pub fn tv_bound_check(f: &Signal, u: &Signal, slack: f64) -> TvBound {
    let margin = total_variation(f) - total_variation(u);
    TvBound { holds: margin >= -slack, margin }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxPrinciple {
    pub holds: bool,
    /// Largest excursion of `u` outside `[min f, max f]`.
    pub excess: f64,
    pub location: Option<usize>,
}

pub fn max_principle(f: &Signal, u: &Signal, tol: f64) -> MaxPrinciple {
    let (lo, hi) = (f.min(), f.max());
    let mut worst = (0.0, None);
    for (j, &x) in u.values().iter().enumerate() {
        let e = (lo - x).max(x - hi).max(0.0);
        if e > worst.0 {
            worst = (e, Some(j));
        }
    }
    MaxPrinciple { holds: worst.0 <= tol, excess: worst.0, location: worst.1 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpRow {
    pub edge: usize,
    pub x: f64,
    pub du: f64,
    pub df: f64,
    /// Signed derivative jump of the weight recorded at this edge.
    pub dprime: f64,
    /// Largest jump of `u` the optimality system allows here.
    pub bound: f64,
    pub bound_ok: bool,
    /// Jump directions of `u` and `f` agree; only judged where the weight has no kink
    /// and both signals jump.
    pub direction_ok: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpEstimates {
    pub tolerance: f64,
    pub rows: Vec<JumpRow>,
    pub bound_violations: usize,
    pub direction_violations: usize,
}

impl JumpEstimates {
    pub fn holds(&self) -> bool {
        self.bound_violations == 0 && self.direction_violations == 0
    }

    /// Rows where something happens: a jump of `u` or `f`, or a weight kink.
    pub fn notable(&self) -> impl Iterator<Item = &JumpRow> {
        let t = self.tolerance;
        self.rows.iter().filter(move |r| r.du.abs() > t || r.df.abs() > t || r.dprime != 0.0)
    }
}

/// Per-edge jump bound `|d(u)| <= max(|d(f)| + Dalpha', 0)` with the signed
/// derivative jump. Interior edges use the recorded kinks; the two end edges,
/// where the dual is pinned to zero, use the second difference of the box radii.
pub fn jump_estimates_report(f: &Signal, u: &Signal, alpha: &WeightField, tol: f64) -> JumpEstimates {
    let grid = f.grid();
    let h = grid.h();
    let du = u.differences();
    let df = f.differences();
    let r = alpha.node_radii();
    let m = du.len();
    let mut rows = Vec::with_capacity(m);
    let (mut bv, mut dv) = (0, 0);
    for e in 0..m {
        let dprime = alpha.dprime_at(e);
        let curvature = if e == 0 || e + 1 == m { (r[e + 2] + r[e] - 2.0 * r[e + 1]) / h } else { dprime };
        let bound = (df[e].abs() + curvature).max(0.0);
        let bound_ok = du[e].abs() <= bound + tol;
        let direction_ok = if dprime == 0.0 && e > 0 && e + 1 < m && du[e].abs() > tol && df[e].abs() > tol {
            Some(du[e].signum() == df[e].signum())
        } else {
            None
        };
        bv += usize::from(!bound_ok);
        dv += usize::from(direction_ok == Some(false));
        rows.push(JumpRow { edge: e, x: grid.edge(e), du: du[e], df: df[e], dprime, bound, bound_ok, direction_ok });
    }
    JumpEstimates { tolerance: tol, rows, bound_violations: bv, direction_violations: dv }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Above,
    Below,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Run {
    pub side: Side,
    pub start: usize,
    /// Exclusive.
    pub end: usize,
    pub direction_changes: usize,
    /// Above runs must fall then rise, below runs rise then fall.
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunProfile {
    pub runs: Vec<Run>,
    pub violations: usize,
}

fn side_of(f: f64, u: f64, tol: f64) -> Option<Side> {
    if u > f + tol {
        Some(Side::Above)
    } else if u < f - tol {
        Some(Side::Below)
    } else {
        None
    }
}

/// Splits the cells into maximal runs where `u` lies strictly above or below `f`
/// and records how the monotonicity of `u` changes inside each run. Differences
/// of size at most `diff_tol` count as flat.
pub fn monotone_run_profile(f: &Signal, u: &Signal, tol: f64, diff_tol: f64) -> RunProfile {
    let (fv, uv) = (f.values(), u.values());
    let n = fv.len();
    let mut runs = Vec::new();
    let mut j = 0;
    while j < n {
        let Some(side) = side_of(fv[j], uv[j], tol) else {
            j += 1;
            continue;
        };
        let start = j;
        while j < n && side_of(fv[j], uv[j], tol) == Some(side) {
            j += 1;
        }
        let signs: Vec<f64> = (start..j - 1)
            .map(|i| uv[i + 1] - uv[i])
            .filter(|d| d.abs() > diff_tol)
            .map(f64::signum)
            .collect();
        let direction_changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
        let expected_first = match side {
            Side::Above => -1.0,
            Side::Below => 1.0,
        };
        let ok = direction_changes == 0 || (direction_changes == 1 && signs[0] == expected_first);
        runs.push(Run { side, start, end: j, direction_changes, ok });
    }
    let violations = runs.iter().filter(|r| !r.ok).count();
    RunProfile { runs, violations }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateauCheck {
    /// Edges where the hypothesis holds.
    pub edges_checked: Vec<usize>,
    /// Those among them where `u` still changes by more than the tolerance.
    pub violations: Vec<usize>,
}

impl PlateauCheck {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn plateau_check(u: &Signal, edges: Vec<usize>, tol: f64) -> PlateauCheck {
    let d = u.differences();
    let violations = edges.iter().copied().filter(|&e| d[e].abs() > tol).collect();
    PlateauCheck { edges_checked: edges, violations }
}

/// `u` cannot jump at an edge next to which the weight rises faster than the
/// data range per unit length (from the left) or falls faster (to the right).
pub fn large_gradient_plateau(f: &Signal, u: &Signal, alpha: &WeightField, tol: f64) -> PlateauCheck {
    let a = alpha.edge_values();
    let h = f.grid().h();
    let range = f.range();
    let m = a.len();
    let edges = (0..m)
        .filter(|&e| {
            let rises = e >= 1 && (a[e] - a[e - 1]) / h > range;
            let falls = e + 1 < m && (a[e + 1] - a[e]) / h < -range;
            rises || falls
        })
        .collect();
    plateau_check(u, edges, tol)
}

/// `u` cannot jump at the first or last edge when the weight there exceeds
/// `h` times the data range.
pub fn boundary_plateau(f: &Signal, u: &Signal, alpha: &WeightField, tol: f64) -> PlateauCheck {
    let a = alpha.edge_values();
    let cap = f.grid().h() * f.range();
    let last = a.len() - 1;
    let mut edges: Vec<usize> = [0, last].into_iter().filter(|&e| a[e] > cap).collect();
    edges.dedup();
    plateau_check(u, edges, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidStructure {
    /// Edges inside a run where `u` lies strictly on one side of `f` but `u` still jumps.
    pub flat_violations: Vec<usize>,
    /// Jump edges of `u` where `u` leaves the interval spanned by `f` on the two cells.
    pub clamp_violations: Vec<usize>,
}

impl FidStructure {
    pub fn holds(&self) -> bool {
        self.flat_violations.is_empty() && self.clamp_violations.is_empty()
    }
}

/// Weighted-fidelity structure: `u` is flat where it stays away from `f`, and at
/// each jump of `u`, `f_i <= u_i < u_{i+1} <= f_{i+1}` (or the mirrored order).
pub fn fid_structure(f: &Signal, u: &Signal, gap_tol: f64, tol: f64) -> FidStructure {
    let (fv, uv) = (f.values(), u.values());
    let d = u.differences();
    let mut flat_violations = Vec::new();
    let mut clamp_violations = Vec::new();
    for e in 0..d.len() {
        let (l, r) = (side_of(fv[e], uv[e], gap_tol), side_of(fv[e + 1], uv[e + 1], gap_tol));
        if l.is_some() && l == r && d[e].abs() > tol {
            flat_violations.push(e);
        }
        if d[e].abs() > tol {
            let ok = if d[e] > 0.0 {
                fv[e] <= uv[e] + tol && uv[e + 1] <= fv[e + 1] + tol
            } else {
                fv[e] + tol >= uv[e] && uv[e + 1] + tol >= fv[e + 1]
            };
            if !ok {
                clamp_violations.push(e);
            }
        }
    }
    FidStructure { flat_violations, clamp_violations }
}
