use anyhow::{bail, Result};
use serde::Serialize;
use wtv1d::analytic::{affine_abs_dual, affine_abs_solution, Regime};
use wtv1d::wfid::{pc_limit_recovery, WeightFamily};
use wtv1d::wtv::pc_exact_recovery;
use wtv1d::{realize_weight, sample, solve_wtv, WeightSpec};

use crate::args::{AnalyticArgs, FamilyArg, ModelArg, RecoverArgs};
use crate::context::{Ctx, Status};
use crate::parse::{self, Noise};
use crate::svg;

#[derive(Debug, Serialize)]
struct ExactReport {
    weight: WeightSpec,
    converged: bool,
    sup_error: f64,
    baseline_alpha: f64,
    baseline_sup_error: f64,
    contrast_loss: f64,
}

#[derive(Debug, Serialize)]
struct LevelRow {
    level: usize,
    sup_error: f64,
    total_variation: f64,
    weight_mass: f64,
}

#[derive(Debug, Serialize)]
struct LimitReport {
    family: &'static str,
    levels: Vec<LevelRow>,
    non_increasing: bool,
    converged: bool,
}

pub fn recover_pc(ctx: &Ctx, args: &RecoverArgs) -> Result<Status> {
    let levels = parse::list(&args.f0)?;
    let breaks = parse::list(&args.breaks)?;
    let f0 = parse::piecewise(&levels, &breaks)?;
    let noise = Noise::parse(&args.noise)?;
    let grid = ctx.grid_or(-1.0, 1.0, 2048)?;
    let f0s = sample(&grid, &f0)?;
    let eta = sample(&grid, |x| noise.eval(x))?;
    let f = f0s.add(&eta)?;
    ctx.signal("f.csv", &f, "f")?;
    match args.model {
        ModelArg::Wtv => {
            let r = pc_exact_recovery(&f0s, &eta, &breaks, args.margin, args.baseline_alpha, &ctx.opts)?;
            let converged = r.solution.converged && r.baseline.converged;
            ctx.signal("u.csv", &r.solution.u, "u")?;
            ctx.signal("baseline.csv", &r.baseline.u, "u")?;
            let alpha = realize_weight(&r.weight, &grid)?;
            ctx.svg("plot.svg", || svg::solution_plot(&f, &r.solution.u, &r.solution.v, &alpha.node_radii()))?;
            println!(
                "exact recovery: sup error {:.3e}; scalar TV ({}) sup error {:.3e}, contrast loss {:.4}",
                r.sup_error, args.baseline_alpha, r.baseline_sup_error, r.contrast_loss
            );
            ctx.json(
                "recovery.json",
                &ExactReport {
                    weight: r.weight,
                    converged,
                    sup_error: r.sup_error,
                    baseline_alpha: args.baseline_alpha,
                    baseline_sup_error: r.baseline_sup_error,
                    contrast_loss: r.contrast_loss,
                },
            )?;
            Ok(Status::converged(converged))
        }
        ModelArg::Wfid => {
            if args.levels.is_empty() {
                bail!("need at least one level");
            }
            let (family, name) = match args.family {
                FamilyArg::Concentrating => (WeightFamily::Concentrating, "concentrating"),
                FamilyArg::VanishingMass => (WeightFamily::VanishingMass, "vanishing-mass"),
            };
            let eta_fn = |x: f64| noise.eval(x);
            let results = pc_limit_recovery(&grid, &f0, &eta_fn, &breaks, &args.levels, family, &ctx.opts)?;
            let converged = results.iter().all(|r| r.solution.converged);
            let rows: Vec<LevelRow> = results
                .iter()
                .map(|r| LevelRow {
                    level: r.level,
                    sup_error: r.sup_error,
                    total_variation: r.total_variation,
                    weight_mass: r.weight_mass,
                })
                .collect();
            let non_increasing = rows.windows(2).all(|w| w[1].sup_error <= w[0].sup_error);
            for r in &rows {
                println!("level {:>4}: sup error {:.4e}, TV(u) {:.4}, weight mass {:.4}", r.level, r.sup_error, r.total_variation, r.weight_mass);
            }
            let last = results.last().expect("levels checked nonempty");
            ctx.signal("u.csv", &last.solution.u, "u")?;
            ctx.table("levels.csv", &rows)?;
            let radii: Vec<f64> = (0..=grid.n()).map(|k| if k == 0 || k == grid.n() { 0.0 } else { 1.0 }).collect();
            ctx.svg("plot.svg", || svg::solution_plot(&f, &last.solution.u, &last.solution.v, &radii))?;
            ctx.json("recovery.json", &LimitReport { family: name, levels: rows, non_increasing, converged })?;
            Ok(Status::converged(converged))
        }
    }
}

#[derive(Debug, Serialize)]
struct AnalyticReport {
    l: f64,
    lambda: f64,
    mu: f64,
    c: f64,
    regime: Regime,
    x_mu_c: f64,
    plateau: f64,
    jump: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    numeric_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    numeric_jump: Option<f64>,
}

pub fn analytic(ctx: &Ctx, args: &AnalyticArgs) -> Result<Status> {
    let grid = ctx.grid_or(-args.l, args.l, 1024)?;
    let (u, case) = affine_abs_solution(args.l, args.lambda, args.mu, args.c, &grid)?;
    let v = affine_abs_dual(&case, &grid);
    let f = sample(&grid, |x| args.lambda * x)?;
    let alpha = realize_weight(&WeightSpec::abs(args.mu, args.c, 0.0), &grid)?;
    let mut report = AnalyticReport {
        l: args.l,
        lambda: args.lambda,
        mu: args.mu,
        c: args.c,
        regime: case.regime,
        x_mu_c: case.x_mu_c(),
        plateau: case.plateau(),
        jump: case.jump(),
        numeric_distance: None,
        numeric_jump: None,
    };
    let mut status = Status::Ok;
    if args.compare {
        let sol = solve_wtv(&f, &alpha, &ctx.opts)?;
        let mid = grid.n() / 2;
        let skip: Vec<usize> = if grid.n() % 2 == 0 { vec![mid - 1, mid] } else { vec![mid] };
        report.numeric_distance = Some(sol.u.distance_excluding(&u, &skip)?);
        if grid.n() % 2 == 0 {
            report.numeric_jump = Some(sol.u.values()[mid] - sol.u.values()[mid - 1]);
        }
        status = Status::converged(sol.converged);
    }
    println!(
        "regime {:?}: plateau {:.6}, jump {:.6}, x_mu_c {:.6}{}",
        case.regime,
        report.plateau,
        report.jump,
        report.x_mu_c,
        report.numeric_distance.map(|d| format!(", numeric distance {d:.3e}")).unwrap_or_default()
    );
    ctx.signal("u.csv", &u, "u")?;
    ctx.nodes("v.csv", &grid, &v, "v")?;
    ctx.json("analytic.json", &report)?;
    ctx.svg("plot.svg", || svg::solution_plot(&f, &u, &v, &alpha.node_radii()))?;
    Ok(status)
}
