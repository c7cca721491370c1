//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wtv1d::analysis::corpus::random_corpus;
use wtv1d::analysis::{non_commuting_pair, run_fixtures, tv_bound_check, verify_kkt, CertificateTolerances, Model};
use wtv1d::analytic::{affine_abs_solution, classify, Regime};
use wtv1d::grid::{sample, total_variation};
use wtv1d::weight::realize_weight;
use wtv1d::wfid::{clamp_form_check, constant_solution_level, constant_solution_predicted, phi1, phi2, pc_limit_recovery, solve_wfid, WeightFamily};
use wtv1d::wtv::{pc_exact_recovery, semigroup_compose, vanishing_weight_limit, ComposeOrder};
use wtv1d::{solve_wtv, Grid, Signal, SolverOptions, WeightField, WeightSpec};

type Outcome = Result<String, String>;

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn analytic_oracle() -> Outcome {
    let n = 4096;
    let grid = Grid::new(-1.0, 1.0, n).unwrap();
    let h = grid.h();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut counts = [0usize; 3];
    let mut worst_ratio: f64 = 0.0;
    for i in 0..20 {
        let lambda = rng.gen_range(0.5..4.0);
        let half = lambda / 2.0;
        let (mu, c) = match i % 3 {
            0 => {
                let total = rng.gen_range(0.1..0.9) * half;
                let c = rng.gen_range(0.1..0.9) * total;
                (total - c, c)
            }
            1 => {
                let c = rng.gen_range(0.1..0.9) * half;
                (rng.gen_range(1.1..3.0) * half - c, c)
            }
            _ => (rng.gen_range(0.1..2.0), rng.gen_range(1.1..2.0) * half),
        };
        let regime = classify(1.0, lambda, mu, c);
        counts[match regime {
            Regime::TwoPlateausWithJump => 0,
            Regime::PureStep => 1,
            Regime::Zero => 2,
        }] += 1;
        let f = sample(&grid, |x| lambda * x).unwrap();
        let alpha = realize_weight(&WeightSpec::abs(mu, c, 0.0), &grid).unwrap();
        let sol = solve_wtv(&f, &alpha, &opts()).unwrap();
        let (exact, case) = affine_abs_solution(1.0, lambda, mu, c, &grid).unwrap();
        let mid = n / 2;
        let dist = sol.u.distance_excluding(&exact, &[mid - 1, mid]).unwrap();
        let dist_tol = 5.0 * h * (lambda + mu);
        if dist > dist_tol {
            return Err(format!("case {i} ({regime:?}): distance {dist:e} > {dist_tol:e}"));
        }
        worst_ratio = worst_ratio.max(dist / dist_tol);
        let jump = sol.u.values()[mid] - sol.u.values()[mid - 1];
        let jump_tol = 2.0 * h * lambda + 1e-6;
        if regime != Regime::Zero && (jump - case.jump()).abs() > jump_tol {
            return Err(format!("case {i} ({regime:?}): jump {jump} vs {} beyond {jump_tol:e}", case.jump()));
        }
    }
    if counts.contains(&0) {
        return Err(format!("regimes not all covered: {counts:?}"));
    }
    Ok(format!("20 cases {counts:?} per regime, worst distance {worst_ratio:.3e} of tolerance"))
}

fn certificate_soundness() -> Outcome {
    let corpus = random_corpus(11, 100, 32, 512).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for case in &corpus {
        let sol = solve_wtv(&case.f, &case.alpha, &opts()).unwrap();
        if !sol.converged {
            return Err(format!("case {} did not converge", case.index));
        }
        let tol = CertificateTolerances::standard(&case.f, &sol.u, &case.alpha, Model::Wtv);
        let report = verify_kkt(&case.f, &sol.u, &case.alpha, Model::Wtv, &tol).unwrap();
        if !report.pass {
            return Err(format!("case {} rejected: {:?}", case.index, report.worst()));
        }
        let scale = 1.0 + case.f.sup_norm();
        let j = rng.gen_range(0..case.f.len());
        let mut bad = sol.u.values().to_vec();
        bad[j] += if rng.gen_bool(0.5) { 1e-4 } else { -1e-4 } * scale;
        let bad = Signal::new(*case.f.grid(), bad).unwrap();
        let report = verify_kkt(&case.f, &bad, &case.alpha, Model::Wtv, &tol).unwrap();
        if report.pass {
            return Err(format!("case {} accepted a perturbation at cell {j}", case.index));
        }
    }
    Ok("100/100 solves certified, 100/100 perturbations rejected".into())
}

fn tv_bound() -> Outcome {
    let corpus = random_corpus(7, 1000, 16, 256).unwrap();
    let mut tightest = f64::INFINITY;
    for case in &corpus {
        let sol = solve_wtv(&case.f, &case.alpha, &opts()).unwrap();
        let scale = 1.0 + total_variation(&case.f);
        let check = tv_bound_check(&case.f, &sol.u, 1e-8 * scale);
        if !check.holds {
            return Err(format!("case {}: TV(f) - TV(u) = {:e}", case.index, check.margin));
        }
        tightest = tightest.min(check.margin / scale);
    }
    Ok(format!("1000/1000 pairs, smallest relative margin {tightest:e}"))
}

fn semigroup() -> Outcome {
    let corpus = random_corpus(21, 50, 32, 512).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut worst: f64 = 0.0;
    for case in &corpus {
        let alpha2 = rng.gen_range(0.01..1.0) * case.f.range().max(0.1);
        let r = semigroup_compose(&case.f, &case.alpha, alpha2, ComposeOrder::WeightedFirst, &opts()).unwrap();
        if r.distance > 10.0 * r.tolerance {
            return Err(format!("case {}: distance {:e} > 10 x {:e}", case.index, r.distance, r.tolerance));
        }
        worst = worst.max(r.distance / r.tolerance);
    }
    let (f, alpha, scalar) = non_commuting_pair(2048).unwrap();
    let r = semigroup_compose(&f, &alpha, scalar, ComposeOrder::ScalarFirst, &opts()).unwrap();
    if r.distance < 100.0 * r.tolerance {
        return Err(format!("reversed order distance {:e} < 100 x {:e}", r.distance, r.tolerance));
    }
    Ok(format!(
        "50/50 within tolerance (worst {worst:.2e} of it), reversed order off by {:.2e} x tolerance",
        r.distance / r.tolerance
    ))
}

fn fixtures() -> Outcome {
    let outcomes = run_fixtures(2048, &opts()).unwrap();
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.pass).map(|o| o.name.as_str()).collect();
    if failed.is_empty() {
        Ok(format!("{}/6 predicates hold at n = 2048", outcomes.len()))
    } else {
        Err(format!("failed: {}", failed.join(", ")))
    }
}

fn exact_recovery() -> Outcome {
    let grid = Grid::new(-1.0, 1.0, 2048).unwrap();
    let f0 = sample(&grid, sign).unwrap();
    let eta = sample(&grid, |x| 0.3 * (2.0 * PI * x).sin()).unwrap();
    let r = pc_exact_recovery(&f0, &eta, &[0.0], 2.0, 0.2, &opts()).unwrap();
    let scale = f0.sup_norm();
    if r.sup_error > 1e-6 * scale {
        return Err(format!("sup error {:e}", r.sup_error));
    }
    if r.contrast_loss < grid.h() {
        return Err(format!("scalar baseline contrast loss {:e} < h", r.contrast_loss));
    }
    Ok(format!("sup error {:e}, scalar-TV contrast loss {:.4}", r.sup_error, r.contrast_loss))
}

fn random_fidelity_weight(rng: &mut ChaCha8Rng) -> WeightSpec {
    let k = rng.gen_range(2..=6);
    let knots = (0..k)
        .map(|i| {
            let x = -1.0 + 2.0 * i as f64 / (k - 1) as f64;
            [x, rng.gen_range(0.05..3.0)]
        })
        .collect();
    WeightSpec::Pwa { knots }
}

fn weighted_fidelity() -> Outcome {
    let grid = Grid::new(-1.0, 1.0, 1024).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut non_constant = 0;
    for i in 0..20 {
        let lambda = rng.gen_range(0.5..8.0);
        let f = sample(&grid, |x| lambda * x).unwrap();
        let w = realize_weight(&random_fidelity_weight(&mut rng), &grid).unwrap();
        let sol = solve_wfid(&f, &w, &opts()).unwrap();
        let tol = 1e-8 * (1.0 + f.sup_norm());
        if !clamp_form_check(&sol.u, &f, tol).is_clamp {
            return Err(format!("case {i}: solution is not a clamp of the data"));
        }
        if sol.u.range() > tol {
            non_constant += 1;
        }
    }
    for i in 0..20 {
        let lambda = rng.gen_range(0.5..4.0);
        let f = sample(&grid, |x| lambda * x).unwrap();
        let base = realize_weight(&random_fidelity_weight(&mut rng), &grid).unwrap();
        // even cases sit inside the sufficient region, odd ones beyond the exact threshold
        let (reach, target) = if i % 2 == 0 {
            let c = base.cell_values();
            (phi1(c, &grid, lambda, grid.b()).abs().max(phi2(c, &grid, lambda, grid.a()).abs()), rng.gen_range(0.2..0.9))
        } else {
            (constant_solution_level(&base, lambda, None).unwrap().abs(), rng.gen_range(1.2..5.0))
        };
        let cells: Vec<f64> = base.cell_values().iter().map(|w| w * target / reach).collect();
        let w = WeightField::from_cells(grid, cells).unwrap();
        let sufficient = constant_solution_predicted(&w, lambda, None).unwrap();
        let exact = constant_solution_level(&w, lambda, None).unwrap() >= -1.0;
        let sol = solve_wfid(&f, &w, &opts()).unwrap();
        let constant = sol.u.range() <= 1e-8 * (1.0 + f.sup_norm());
        if sufficient != (i % 2 == 0) || exact != constant || (sufficient && !constant) {
            return Err(format!("constructed case {i}: sufficient {sufficient}, exact {exact}, solved constant {constant}"));
        }
    }
    let grid = Grid::new(-1.0, 1.0, 2048).unwrap();
    let levels = [4, 8, 16, 32];
    let curve = pc_limit_recovery(&grid, &sign, &|x: f64| 0.2 * (PI * x).sin(), &[0.0], &levels, WeightFamily::Concentrating, &opts())
        .unwrap();
    let errors: Vec<f64> = curve.iter().map(|l| l.sup_error).collect();
    if errors.windows(2).any(|w| w[1] > w[0]) {
        return Err(format!("level errors not non-increasing: {errors:?}"));
    }
    if errors[3] > 0.5 * errors[0] {
        return Err(format!("final error {:e} above half the initial {:e}", errors[3], errors[0]));
    }
    Ok(format!(
        "20/20 clamp forms ({non_constant} non-constant), 20/20 constancy predictions, level errors {}",
        errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(" > ")
    ))
}

fn no_asymmetric_clamp() -> Outcome {
    let corpus = random_corpus(41, 300, 32, 512).unwrap();
    let mut clamps = 0;
    for case in &corpus {
        let grid = case.f.grid();
        let lambda = 1.0 + case.index as f64 % 3.0;
        let f = sample(grid, |x| lambda * x).unwrap();
        let alpha = realize_weight(&case.spec, grid).unwrap();
        let sol = solve_wtv(&f, &alpha, &opts()).unwrap();
        let form = clamp_form_check(&sol.u, &f, 1e-8 * (1.0 + f.sup_norm()));
        if form.is_clamp {
            clamps += 1;
            if (form.x1 + form.x2).abs() > 10.0 * grid.h() {
                return Err(format!("case {}: clamp on ({}, {})", case.index, form.x1, form.x2));
            }
        }
    }
    Ok(format!("300 weights, {clamps} clamp-form solutions, all symmetric"))
}

fn vanishing_weight() -> Outcome {
    let grid = Grid::new(-1.0, 1.0, 2048).unwrap();
    let f = sample(&grid, |x| sign(x) + 0.3 * (2.0 * PI * x).sin() + 0.5 * x).unwrap();
    let alpha = realize_weight(&WeightSpec::Tent { intervals: vec![[-1.0, 0.0], [0.0, 1.0]], slopes: vec![0.4, 0.4] }, &grid).unwrap();
    let floors = [1e-1, 1e-2, 1e-3, 1e-4];
    let steps = vanishing_weight_limit(&f, &alpha, &floors, &opts()).unwrap();
    let d: Vec<f64> = steps.iter().filter_map(|s| s.distance_to_previous).collect();
    if d.windows(2).any(|w| w[1] >= w[0]) {
        return Err(format!("successive distances not decreasing: {d:?}"));
    }
    Ok(format!("successive distances {}", d.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(" > ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 analytic oracle equivalence", analytic_oracle),
        ("2 certificate soundness", certificate_soundness),
        ("3 total variation bound", tv_bound),
        ("4 partial semigroup", semigroup),
        ("5 jump behaviour fixtures", fixtures),
        ("6 exact piecewise-constant recovery", exact_recovery),
        ("7 weighted-fidelity structure", weighted_fidelity),
        ("8 no asymmetric clamp under weighted TV", no_asymmetric_clamp),
        ("9 vanishing-weight convergence", vanishing_weight),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {name}: {detail} ({secs:.1}s)");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
