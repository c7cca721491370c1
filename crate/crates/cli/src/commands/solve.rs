use anyhow::{Context, Result};
use serde::Serialize;
use wtv1d::analysis::{verify_kkt, verify_kkt_with_dual, CertificateReport, CertificateTolerances, Model};
use wtv1d::io::load_nodes_csv;
use wtv1d::wfid::{objective_wfid, solve_wfid_with_floor, DEFAULT_RELATIVE_FLOOR};
use wtv1d::{solve_wtv, total_variation, Method, WeightField, WeightSpec};

use crate::args::{ModelArg, SolveArgs, VerifyArgs, WeightArgs};
use crate::context::{load_weight, Ctx, Status};
use crate::svg;

#[derive(Debug, Serialize)]
struct SolveReport {
    model: &'static str,
    method: Method,
    a: f64,
    b: f64,
    n: usize,
    weight: Option<WeightSpec>,
    converged: bool,
    iterations: usize,
    objective: f64,
    primal: f64,
    dual: f64,
    gap: f64,
    relative_gap: f64,
    u_error_bound: f64,
    floor: Option<f64>,
    tv_f: f64,
    tv_u: f64,
}

fn weight_arg(w: &WeightArgs, model: ModelArg) -> Result<&str> {
    match model {
        ModelArg::Wtv => w.alpha.as_deref().context("the wtv model needs --alpha"),
        ModelArg::Wfid => w.w.as_deref().context("the wfid model needs --w"),
    }
}

fn unit_box(n: usize) -> Vec<f64> {
    (0..=n).map(|k| if k == 0 || k == n { 0.0 } else { 1.0 }).collect()
}

pub fn solve(ctx: &Ctx, args: &SolveArgs) -> Result<Status> {
    let f = ctx.load_signal(&args.f)?;
    let grid = *f.grid();
    let (weight, spec) = load_weight(weight_arg(&args.weight, args.model)?, &grid)?;
    let (sol, objective, floor, radii, model) = match args.model {
        ModelArg::Wtv => {
            let sol = solve_wtv(&f, &weight, &ctx.opts)?;
            let obj = sol.primal;
            (sol, obj, None, weight.node_radii(), "wtv")
        }
        ModelArg::Wfid => {
            let fid = solve_wfid_with_floor(&f, &weight, args.weight.floor, &ctx.opts)?;
            let obj = objective_wfid(&f, &weight, &fid.u)?;
            (fid.solution, obj, Some(fid.floor_used), unit_box(grid.n()), "wfid")
        }
    };
    log::info!("{model} solve: {} iterations, relative gap {:e}", sol.iterations, sol.relative_gap);
    let report = SolveReport {
        model,
        method: sol.method,
        a: grid.a(),
        b: grid.b(),
        n: grid.n(),
        weight: spec,
        converged: sol.converged,
        iterations: sol.iterations,
        objective,
        primal: sol.primal,
        dual: sol.dual,
        gap: sol.gap,
        relative_gap: sol.relative_gap,
        u_error_bound: sol.u_error_bound(),
        floor,
        tv_f: total_variation(&f),
        tv_u: total_variation(&sol.u),
    };
    ctx.signal("u.csv", &sol.u, "u")?;
    ctx.nodes("v.csv", &grid, &sol.v, "v")?;
    ctx.json("report.json", &report)?;
    ctx.svg("plot.svg", || svg::solution_plot(&f, &sol.u, &sol.v, &radii))?;
    println!(
        "{model}: n = {}, objective {:.12e}, relative gap {:.3e}, {} iterations{}",
        grid.n(),
        objective,
        sol.relative_gap,
        sol.iterations,
        if sol.converged { "" } else { ", NOT CONVERGED" }
    );
    if !sol.converged {
        eprintln!("warning: solver stopped before reaching the gap tolerance; outputs are flagged");
    }
    Ok(Status::converged(sol.converged))
}

fn print_certificate(r: &CertificateReport) {
    println!("{:<10} {:>14} {:>14} {:>9}  status", "condition", "residual", "tolerance", "location");
    for (name, res) in [("boundary", r.boundary), ("linkage", r.linkage), ("box", r.box_violation), ("sign", r.sign_violation)] {
        let loc = res.location.map(|l| l.to_string()).unwrap_or_else(|| "-".into());
        println!(
            "{:<10} {:>14.6e} {:>14.6e} {:>9}  {}",
            name,
            res.value,
            res.tolerance,
            loc,
            if res.pass { "ok" } else { "FAIL" }
        );
    }
}

pub fn verify(ctx: &Ctx, args: &VerifyArgs) -> Result<Status> {
    let f = ctx.load_signal(&args.f)?;
    let grid = *f.grid();
    let u = wtv1d::io::load_signal_csv(&args.u, Some(grid)).with_context(|| format!("reading {}", args.u.display()))?;
    let (weight, _) = load_weight(weight_arg(&args.weight, args.model)?, &grid)?;
    let (weight, model) = match args.model {
        ModelArg::Wtv => (weight, Model::Wtv),
        ModelArg::Wfid => {
            let floor = args.weight.floor.unwrap_or(DEFAULT_RELATIVE_FLOOR * weight.max_cell());
            (WeightField::from_cells(grid, weight.floored_cells(floor))?, Model::Wfid)
        }
    };
    let tol = CertificateTolerances::scaled(args.rel, &f, &u, &weight, model);
    let report = match &args.v {
        Some(path) => {
            let v = load_nodes_csv(path, &grid).with_context(|| format!("reading {}", path.display()))?;
            verify_kkt_with_dual(&f, &u, &v, &weight, model, &tol)?
        }
        None => verify_kkt(&f, &u, &weight, model, &tol)?,
    };
    print_certificate(&report);
    ctx.json("certificate.json", &report)?;
    if report.pass {
        println!("certificate: PASS ({} jump edges)", report.jump_edges);
        Ok(Status::Ok)
    } else {
        if let Some((name, r)) = report.worst() {
            let at = r.location.map(|l| format!(" at index {l}")).unwrap_or_default();
            println!("certificate: FAIL, worst violation {name} = {:.6e}{at} (tolerance {:.3e})", r.value, r.tolerance);
        }
        Ok(Status::Failed)
    }
}
