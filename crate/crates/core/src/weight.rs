//! Symbolic weight descriptions and their sampled form on a grid.
//!
//! Regularization weights are sampled at interior edges, fidelity weights at
//! cell centres. Kinks of piecewise-affine weights are recorded as signed
//! derivative jumps on the edges that bracket them.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, Signal};

/// Symbolic weight. JSON form: `{"kind": "...", ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightSpec {
    /// Constant weight.
    Scalar { value: f64 },
    /// `mu |x - x0| + c`.
    Abs {
        mu: f64,
        c: f64,
        #[serde(default)]
        x0: f64,
    },
    /// Linear interpolation between `[x, value]` knots, constant beyond the end knots.
    Pwa { knots: Vec<[f64; 2]> },
    /// One tent per interval, `mu_i (r_i - |x - c_i|)`, zero at every interval end.
    Tent { intervals: Vec<[f64; 2]>, slopes: Vec<f64> },
    /// Explicit samples on edges (length n - 1) and/or cells (length n).
    Sampled {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edges: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cells: Option<Vec<f64>>,
    },
}

impl WeightSpec {
    pub fn scalar(value: f64) -> Self {
        WeightSpec::Scalar { value }
    }

    pub fn abs(mu: f64, c: f64, x0: f64) -> Self {
        WeightSpec::Abs { mu, c, x0 }
    }

    /// Pointwise value, `None` for sampled specs.
    pub fn eval(&self, x: f64) -> Option<f64> {
        match self {
            WeightSpec::Scalar { value } => Some(*value),
            WeightSpec::Abs { mu, c, x0 } => Some(mu * (x - x0).abs() + c),
            WeightSpec::Pwa { knots } => Some(eval_pwa(knots, x)),
            WeightSpec::Tent { intervals, slopes } => Some(eval_tent(intervals, slopes, x)),
            WeightSpec::Sampled { .. } => None,
        }
    }

    /// Kinks as `(location, slope jump)` pairs.
    pub fn kinks(&self) -> Vec<(f64, f64)> {
        match self {
            WeightSpec::Scalar { .. } | WeightSpec::Sampled { .. } => Vec::new(),
            WeightSpec::Abs { mu, x0, .. } => vec![(*x0, 2.0 * mu)],
            WeightSpec::Pwa { knots } => {
                let slope = |i: usize| {
                    let (p, q) = (knots[i], knots[i + 1]);
                    (q[1] - p[1]) / (q[0] - p[0])
                };
                (0..knots.len())
                    .map(|i| {
                        let left = if i == 0 { 0.0 } else { slope(i - 1) };
                        let right = if i + 1 == knots.len() { 0.0 } else { slope(i) };
                        (knots[i][0], right - left)
                    })
                    .collect()
            }
            WeightSpec::Tent { intervals, slopes } => {
                let mut out = Vec::new();
                for (i, (iv, mu)) in intervals.iter().zip(slopes).enumerate() {
                    if i > 0 {
                        out.push((iv[0], slopes[i - 1] + mu));
                    }
                    out.push((0.5 * (iv[0] + iv[1]), -2.0 * mu));
                }
                out
            }
        }
    }

    fn validate(&self, grid: &Grid) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidWeight(msg));
        let finite = |x: f64| x.is_finite();
        let inside = |x: f64| -> Result<()> {
            if x < grid.a() || x > grid.b() {
                Err(Error::BreakpointOutsideDomain { x, a: grid.a(), b: grid.b() })
            } else {
                Ok(())
            }
        };
        match self {
            WeightSpec::Scalar { value } => {
                if !(finite(*value) && *value >= 0.0) {
                    return bad(format!("scalar weight must be finite and >= 0, got {value}"));
                }
            }
            WeightSpec::Abs { mu, c, x0 } => {
                if !(finite(*mu) && finite(*c) && finite(*x0)) || *mu < 0.0 || *c < 0.0 {
                    return bad(format!("abs weight needs mu >= 0, c >= 0, got mu = {mu}, c = {c}"));
                }
                inside(*x0)?;
            }
            WeightSpec::Pwa { knots } => {
                if knots.is_empty() {
                    return bad("piecewise-affine weight needs at least one knot".into());
                }
                for k in knots {
                    if !(finite(k[0]) && finite(k[1])) || k[1] < 0.0 {
                        return bad(format!("knot ({}, {}) must be finite with value >= 0", k[0], k[1]));
                    }
                    inside(k[0])?;
                }
                if knots.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return bad("knot locations must be strictly increasing".into());
                }
            }
            WeightSpec::Tent { intervals, slopes } => {
                if intervals.is_empty() || intervals.len() != slopes.len() {
                    return bad("tent weight needs one slope per interval".into());
                }
                let tol = 1e-9 * grid.length();
                if (intervals[0][0] - grid.a()).abs() > tol
                    || (intervals[intervals.len() - 1][1] - grid.b()).abs() > tol
                {
                    return bad("tent intervals must cover the domain".into());
                }
                for (i, (iv, mu)) in intervals.iter().zip(slopes).enumerate() {
                    if !(iv[1] > iv[0]) || !finite(iv[0]) || !finite(iv[1]) {
                        return bad(format!("degenerate interval ({}, {})", iv[0], iv[1]));
                    }
                    if !(finite(*mu) && *mu >= 0.0) {
                        return bad(format!("tent slope must be >= 0, got {mu}"));
                    }
                    if i > 0 && (iv[0] - intervals[i - 1][1]).abs() > tol {
                        return bad("tent intervals must be contiguous".into());
                    }
                }
            }
            WeightSpec::Sampled { edges, cells } => {
                if edges.is_none() && cells.is_none() {
                    return bad("sampled weight needs edges or cells".into());
                }
                if let Some(e) = edges {
                    check_samples(e, grid.n_edges())?;
                }
                if let Some(c) = cells {
                    check_samples(c, grid.n())?;
                }
            }
        }
        Ok(())
    }
}

fn check_samples(values: &[f64], expected: usize) -> Result<()> {
    if values.len() != expected {
        return Err(Error::LengthMismatch { expected, got: values.len() });
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidWeight(format!("sampled weight values must be finite and >= 0, got {v}")));
    }
    Ok(())
}

fn eval_pwa(knots: &[[f64; 2]], x: f64) -> f64 {
    let last = knots.len() - 1;
    if x <= knots[0][0] {
        return knots[0][1];
    }
    if x >= knots[last][0] {
        return knots[last][1];
    }
    let i = knots.partition_point(|k| k[0] <= x) - 1;
    let (p, q) = (knots[i], knots[i + 1]);
    let t = (x - p[0]) / (q[0] - p[0]);
    p[1] + t * (q[1] - p[1])
}

fn eval_tent(intervals: &[[f64; 2]], slopes: &[f64], x: f64) -> f64 {
    let i = intervals.partition_point(|iv| iv[1] < x).min(intervals.len() - 1);
    let iv = intervals[i];
    let half = 0.5 * (iv[1] - iv[0]);
    let center = 0.5 * (iv[0] + iv[1]);
    (slopes[i] * (half - (x - center).abs())).max(0.0)
}

impl FromStr for WeightSpec {
    type Err = Error;

    /// Accepts JSON or the shorthands `scalar:V` and `abs:MU:C[:X0]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return Ok(serde_json::from_str(s)?);
        }
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{t}' in weight '{s}'")));
        match parts.as_slice() {
            ["scalar", v] => Ok(WeightSpec::scalar(num(v)?)),
            ["abs", mu, c] => Ok(WeightSpec::abs(num(mu)?, num(c)?, 0.0)),
            ["abs", mu, c, x0] => Ok(WeightSpec::abs(num(mu)?, num(c)?, num(x0)?)),
            _ => Err(Error::Parse(format!("unrecognized weight '{s}'"))),
        }
    }
}

/// Weight sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightField {
    grid: Grid,
    edge_values: Vec<f64>,
    cell_values: Vec<f64>,
    dprime_jumps: BTreeMap<usize, f64>,
}

impl WeightField {
    /// Field from explicit edge samples; cell values average neighbouring edges.
    pub fn from_edges(grid: Grid, edges: Vec<f64>) -> Result<Self> {
        check_samples(&edges, grid.n_edges())?;
        let cells = (0..grid.n())
            .map(|j| {
                let l = edges[j.saturating_sub(1).min(edges.len() - 1)];
                let r = edges[j.min(edges.len() - 1)];
                0.5 * (l + r)
            })
            .collect();
        let dprime_jumps = second_differences(&grid, &edges);
        Ok(Self { grid, edge_values: edges, cell_values: cells, dprime_jumps })
    }

    /// Field from explicit cell samples; edge values average neighbouring cells.
    pub fn from_cells(grid: Grid, cells: Vec<f64>) -> Result<Self> {
        check_samples(&cells, grid.n())?;
        let edges: Vec<f64> = cells.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let dprime_jumps = second_differences(&grid, &edges);
        Ok(Self { grid, edge_values: edges, cell_values: cells, dprime_jumps })
    }

    pub fn scalar(grid: Grid, value: f64) -> Result<Self> {
        realize_weight(&WeightSpec::scalar(value), &grid)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn edge_values(&self) -> &[f64] {
        &self.edge_values
    }

    pub fn cell_values(&self) -> &[f64] {
        &self.cell_values
    }

    /// Signed derivative jumps keyed by edge index.
    pub fn dprime_jumps(&self) -> &BTreeMap<usize, f64> {
        &self.dprime_jumps
    }

    pub fn dprime_at(&self, edge: usize) -> f64 {
        self.dprime_jumps.get(&edge).copied().unwrap_or(0.0)
    }

    pub fn max_edge(&self) -> f64 {
        self.edge_values.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_edge(&self) -> f64 {
        self.edge_values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_cell(&self) -> f64 {
        self.cell_values.iter().copied().fold(0.0, f64::max)
    }

    /// Box radii at nodes `0..=n`, zero at both ends.
    pub fn node_radii(&self) -> Vec<f64> {
        let mut r = Vec::with_capacity(self.grid.n() + 1);
        r.push(0.0);
        r.extend_from_slice(&self.edge_values);
        r.push(0.0);
        r
    }

    /// Adds a constant to every sample; kinks are unchanged.
    pub fn plus_scalar(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::InvalidWeight(format!("added constant must be >= 0, got {c}")));
        }
        Ok(Self {
            grid: self.grid,
            edge_values: self.edge_values.iter().map(|v| v + c).collect(),
            cell_values: self.cell_values.iter().map(|v| v + c).collect(),
            dprime_jumps: self.dprime_jumps.clone(),
        })
    }

    /// Cell values raised to at least `floor`.
    pub fn floored_cells(&self, floor: f64) -> Vec<f64> {
        self.cell_values.iter().map(|&w| w.max(floor)).collect()
    }

    /// The cell values as a signal.
    pub fn cell_signal(&self) -> Signal {
        Signal::new(self.grid, self.cell_values.clone()).expect("cell values are finite")
    }
}

fn second_differences(grid: &Grid, edges: &[f64]) -> BTreeMap<usize, f64> {
    let scale = edges.iter().copied().fold(0.0, f64::max);
    let noise = 64.0 * f64::EPSILON * (1.0 + scale) / grid.h();
    let mut out = BTreeMap::new();
    for e in 1..edges.len().saturating_sub(1) {
        let d = (edges[e + 1] - 2.0 * edges[e] + edges[e - 1]) / grid.h();
        if d.abs() > noise {
            out.insert(e, d);
        }
    }
    out
}

/// Splits a slope jump `jump` at `p` over the edges bracketing it, in proportion
/// to distance, so the recorded values equal the discrete second differences of
/// the edge samples. A kink on an edge goes entirely to that edge.
fn deposit_kink(grid: &Grid, map: &mut BTreeMap<usize, f64>, p: f64, jump: f64) {
    if jump == 0.0 {
        return;
    }
    let k = (p - grid.a()) / grid.h();
    let nearest = k.round();
    let mut add = |node: i64, value: f64| {
        if (1..grid.n() as i64).contains(&node) && value != 0.0 {
            *map.entry(node as usize - 1).or_insert(0.0) += value;
        }
    };
    if (k - nearest).abs() <= 1e-9 {
        add(nearest as i64, jump);
    } else {
        let left = k.floor();
        let frac = k - left;
        add(left as i64, jump * (1.0 - frac));
        add(left as i64 + 1, jump * frac);
    }
}

/// Samples `spec` on `grid`.
pub fn realize_weight(spec: &WeightSpec, grid: &Grid) -> Result<WeightField> {
    spec.validate(grid)?;
    if let WeightSpec::Sampled { edges, cells } = spec {
        return match (edges, cells) {
            (Some(e), Some(c)) => {
                let mut field = WeightField::from_edges(*grid, e.clone())?;
                field.cell_values = c.clone();
                Ok(field)
            }
            (Some(e), None) => WeightField::from_edges(*grid, e.clone()),
            (None, Some(c)) => WeightField::from_cells(*grid, c.clone()),
            (None, None) => unreachable!("validated"),
        };
    }
    let eval = |x: f64| spec.eval(x).expect("symbolic spec").max(0.0);
    let edge_values = grid.edges().into_iter().map(eval).collect();
    let cell_values = grid.centers().into_iter().map(eval).collect();
    let mut dprime_jumps = BTreeMap::new();
    for (p, jump) in spec.kinks() {
        deposit_kink(grid, &mut dprime_jumps, p, jump);
    }
    dprime_jumps.retain(|_, v| *v != 0.0);
    Ok(WeightField { grid: *grid, edge_values, cell_values, dprime_jumps })
}

/// Discrete weighted total variation `sum alpha_i |u_{i+1} - u_i|`.
pub fn weighted_tv(u: &Signal, alpha: &WeightField) -> Result<f64> {
    u.grid().check_same(alpha.grid())?;
    Ok(u
        .differences()
        .iter()
        .zip(alpha.edge_values())
        .map(|(d, a)| a * d.abs())
        .sum())
}
