use std::f64::consts::PI;

use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::Serialize;
use wtv1d::analysis::corpus::random_corpus;
use wtv1d::analysis::{check_case, non_commuting_pair, run_fixtures, FixtureOutcome, PropertyTally};
use wtv1d::wtv::{semigroup_compose, vanishing_weight_limit, ComposeOrder};
use wtv1d::{realize_weight, sample, solve_wtv, WeightSpec};

use crate::args::PropertiesArgs;
use crate::context::{load_weight, Ctx, Status};

#[derive(Debug, Serialize)]
struct FixtureSection {
    n: usize,
    pass: bool,
    outcomes: Vec<FixtureOutcome>,
}

#[derive(Debug, Serialize)]
struct RandomSection {
    seed: u64,
    pass: bool,
    tally: PropertyTally,
}

#[derive(Debug, Serialize)]
struct SemigroupSection {
    pass: bool,
    alpha2: f64,
    /// Scalar weight applied after the spatial one.
    distance: f64,
    tolerance: f64,
    /// Scalar weight applied first, for comparison.
    reversed_distance: f64,
    /// Built-in configuration where the reversed order must differ.
    reference_reversed_distance: f64,
    reference_tolerance: f64,
}

#[derive(Debug, Serialize)]
struct VanishingSection {
    pass: bool,
    floors: Vec<f64>,
    successive_distances: Vec<f64>,
}

#[derive(Debug, Default, Serialize)]
struct PropertiesReport {
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixtures: Option<FixtureSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    random: Option<RandomSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    semigroup: Option<SemigroupSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vanishing: Option<VanishingSection>,
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn fixtures(ctx: &Ctx, n: usize) -> Result<FixtureSection> {
    let outcomes = run_fixtures(n, &ctx.opts)?;
    for o in &outcomes {
        println!(
            "fixture {:<24} f: {:+.4} -> {:+.4}  u: {:+.4} -> {:+.4}  kink {:.4}  {}",
            o.name,
            o.f_left,
            o.f_right,
            o.u_left,
            o.u_right,
            o.dprime,
            verdict(o.pass)
        );
    }
    Ok(FixtureSection { n, pass: outcomes.iter().all(|o| o.pass), outcomes })
}

fn random(ctx: &Ctx, count: usize) -> Result<RandomSection> {
    let corpus = random_corpus(ctx.seed, count, 16, 256)?;
    let checks = corpus
        .par_iter()
        .map(|case| {
            let sol = solve_wtv(&case.f, &case.alpha, &ctx.opts)?;
            check_case(&case.f, &case.alpha, &sol.u)
        })
        .collect::<wtv1d::Result<Vec<_>>>()?;
    let mut tally = PropertyTally::default();
    for (case, c) in corpus.iter().zip(&checks) {
        tally.record(case.index, c);
    }
    println!(
        "random corpus: {} cases, violations: certificate {}, tv bound {}, max principle {}, jump bound {}, direction {}, run profile {}, plateaus {}/{}  {}",
        tally.cases,
        tally.certificate,
        tally.tv_bound,
        tally.max_principle,
        tally.jump_bound,
        tally.direction,
        tally.run_profile,
        tally.large_gradient_plateau,
        tally.boundary_plateau,
        verdict(tally.pass())
    );
    Ok(RandomSection { seed: ctx.seed, pass: tally.pass(), tally })
}

fn semigroup(ctx: &Ctx, args: &PropertiesArgs) -> Result<SemigroupSection> {
    let f = match &args.f {
        Some(p) => ctx.load_signal(p)?,
        None => sample(&ctx.grid_or(-1.0, 1.0, args.n)?, |x| 2.0 * x)?,
    };
    let (alpha1, _) = load_weight(args.alpha1.as_deref().unwrap_or("abs:0.2:0.3"), f.grid())?;
    let alpha2 = args.alpha2.unwrap_or(0.2);
    let fwd = semigroup_compose(&f, &alpha1, alpha2, ComposeOrder::WeightedFirst, &ctx.opts)?;
    let rev = semigroup_compose(&f, &alpha1, alpha2, ComposeOrder::ScalarFirst, &ctx.opts)?;
    let (rf, ralpha, rscalar) = non_commuting_pair(args.n)?;
    let reference = semigroup_compose(&rf, &ralpha, rscalar, ComposeOrder::ScalarFirst, &ctx.opts)?;
    let pass = fwd.distance <= 10.0 * fwd.tolerance && reference.distance >= 100.0 * reference.tolerance;
    println!(
        "semigroup: distance {:.3e} <= tolerance {:.3e} (reversed order {:.3e}; reference reversed pair {:.3e} vs {:.3e})  {}",
        fwd.distance,
        fwd.tolerance,
        rev.distance,
        reference.distance,
        reference.tolerance,
        verdict(pass)
    );
    Ok(SemigroupSection {
        pass,
        alpha2,
        distance: fwd.distance,
        tolerance: fwd.tolerance,
        reversed_distance: rev.distance,
        reference_reversed_distance: reference.distance,
        reference_tolerance: reference.tolerance,
    })
}

fn vanishing(ctx: &Ctx, n: usize) -> Result<VanishingSection> {
    let grid = ctx.grid_or(-1.0, 1.0, n)?;
    let f = sample(&grid, |x| x.signum() + 0.3 * (2.0 * PI * x).sin() + 0.5 * x)?;
    let mid = 0.5 * (grid.a() + grid.b());
    let spec = WeightSpec::Tent { intervals: vec![[grid.a(), mid], [mid, grid.b()]], slopes: vec![0.4, 0.4] };
    let alpha = realize_weight(&spec, &grid)?;
    let floors = vec![1e-1, 1e-2, 1e-3, 1e-4];
    let steps = vanishing_weight_limit(&f, &alpha, &floors, &ctx.opts)?;
    let d: Vec<f64> = steps.iter().filter_map(|s| s.distance_to_previous).collect();
    let pass = d.windows(2).all(|w| w[1] < w[0]);
    println!(
        "vanishing weight: successive distances {}  {}",
        d.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" "),
        verdict(pass)
    );
    Ok(VanishingSection { pass, floors, successive_distances: d })
}

pub fn properties(ctx: &Ctx, args: &PropertiesArgs) -> Result<Status> {
    if let Some(name) = &args.fixtures {
        if name != "table1" {
            bail!("unknown fixture set '{name}', expected table1");
        }
    }
    let any = args.fixtures.is_some() || args.random.is_some() || args.semigroup || args.vanishing;
    let mut report = PropertiesReport::default();
    if args.fixtures.is_some() || !any {
        report.fixtures = Some(fixtures(ctx, args.n)?);
    }
    if args.random.is_some() || !any {
        report.random = Some(random(ctx, args.random.unwrap_or(200))?);
    }
    if args.semigroup || !any {
        report.semigroup = Some(semigroup(ctx, args)?);
    }
    if args.vanishing || !any {
        report.vanishing = Some(vanishing(ctx, args.n)?);
    }
    report.pass = report.fixtures.as_ref().is_none_or(|s| s.pass)
        && report.random.as_ref().is_none_or(|s| s.pass)
        && report.semigroup.as_ref().is_none_or(|s| s.pass)
        && report.vanishing.as_ref().is_none_or(|s| s.pass);
    ctx.json("properties.json", &report)?;
    println!("properties: {}", verdict(report.pass));
    Ok(if report.pass { Status::Ok } else { Status::Failed })
}
