use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::Serialize;
use wtv1d::analytic::{classify, classify_profile, AffineAbsCase, Regime};
use wtv1d::{realize_weight, sample, solve_wtv, Signal, WeightField, WeightSpec};

use crate::args::SweepArgs;
use crate::context::{Ctx, Status};
use crate::parse;
use crate::svg;

#[derive(Debug, Clone, Serialize)]
struct Row {
    mu: f64,
    c: f64,
    regime: Regime,
    regime_numeric: Regime,
    /// Within tolerance of a regime boundary, where both labels describe the profile.
    on_boundary: bool,
    jump: f64,
    jump_exact: f64,
    plateau: f64,
    plateau_exact: f64,
    /// Distance to scalar-TV smoothing of the smallest-c solution at the same mu.
    semigroup_distance: f64,
}

#[derive(Debug, Serialize)]
struct SweepSummary {
    lambda: f64,
    l: f64,
    n: usize,
    rows: usize,
    regime_mismatches: usize,
    max_semigroup_distance: f64,
    all_converged: bool,
}

pub fn sweep(ctx: &Ctx, args: &SweepArgs) -> Result<Status> {
    let (lambda, l) = (args.lambda, args.l);
    if !(lambda > 0.0 && l > 0.0) {
        bail!("lambda and L must be positive");
    }
    let mut mus = parse::values(&args.mu)?;
    let mut cs = parse::values(&args.c)?;
    if mus.iter().chain(&cs).any(|&x| !(x > 0.0)) {
        bail!("mu and c values must be positive");
    }
    mus.sort_by(f64::total_cmp);
    cs.sort_by(f64::total_cmp);
    let grid = ctx.grid_or(-l, l, 1024)?;
    if (grid.a() + l).abs() > 1e-12 * l || (grid.b() - l).abs() > 1e-12 * l {
        bail!("sweep needs the grid (-L, L) with L = {l}");
    }
    let f = sample(&grid, |x| lambda * x)?;
    let pairs: Vec<(f64, f64)> = mus.iter().flat_map(|&m| cs.iter().map(move |&c| (m, c))).collect();
    let solved = pairs
        .par_iter()
        .map(|&(mu, c)| {
            let alpha = realize_weight(&WeightSpec::abs(mu, c, 0.0), &grid)?;
            solve_wtv(&f, &alpha, &ctx.opts)
        })
        .collect::<wtv1d::Result<Vec<_>>>()?;
    let all_converged = solved.iter().all(|s| s.converged);
    let mid = grid.n() / 2;
    let tol = 1e-6 * (1.0 + lambda * l);
    let half = 0.5 * lambda * l * l;
    let rows = pairs
        .par_iter()
        .enumerate()
        .map(|(k, &(mu, c))| -> Result<Row> {
            let u: &Signal = &solved[k].u;
            let base = k - k % cs.len();
            let semigroup_distance = if base == k {
                0.0
            } else {
                let shrink = WeightField::scalar(grid, c - cs[0])?;
                solve_wtv(&solved[base].u, &shrink, &ctx.opts)?.u.distance(u)?
            };
            let case = AffineAbsCase::new(l, lambda, mu, c)?;
            let jump = if grid.n() % 2 == 0 { u.values()[mid] - u.values()[mid - 1] } else { 0.0 };
            Ok(Row {
                mu,
                c,
                regime: classify(l, lambda, mu, c),
                regime_numeric: classify_profile(u, tol),
                on_boundary: (mu * l + c - half).abs() <= tol || (c - half).abs() <= tol,
                jump,
                jump_exact: case.jump(),
                plateau: u.values()[grid.n() - 1],
                plateau_exact: case.u(l),
                semigroup_distance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = SweepSummary {
        lambda,
        l,
        n: grid.n(),
        rows: rows.len(),
        regime_mismatches: rows.iter().filter(|r| !r.on_boundary && r.regime != r.regime_numeric).count(),
        max_semigroup_distance: rows.iter().map(|r| r.semigroup_distance).fold(0.0, f64::max),
        all_converged,
    };
    ctx.table("sweep.csv", &rows)?;
    ctx.json("sweep.json", &summary)?;
    let regimes: Vec<Regime> = rows.iter().map(|r| r.regime).collect();
    ctx.svg("regime_map.svg", || svg::regime_map(&mus, &cs, &regimes, lambda, l))?;
    println!(
        "sweep: {} solves, {} numeric regime mismatches, max semigroup distance {:.3e}",
        summary.rows, summary.regime_mismatches, summary.max_semigroup_distance
    );
    Ok(Status::converged(all_converged))
}
