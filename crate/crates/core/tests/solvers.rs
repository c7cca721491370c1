use proptest::prelude::*;
use wtv1d::analysis::{verify_kkt_with_dual, CertificateTolerances, Model};
use wtv1d::io::{load_signal_csv, save_signal_csv};
use wtv1d::{make_grid, sample, solve_wfid, solve_wtv, Method, Signal, SolverOptions, WeightField};

fn apg() -> SolverOptions {
    SolverOptions { method: Method::Apg, max_iterations: 200_000, gap_tolerance: 1e-12 }
}

fn case(values: Vec<f64>, weights: Vec<f64>) -> (Signal, WeightField) {
    let g = make_grid(0.0, 1.0, values.len()).unwrap();
    let f = Signal::new(g, values).unwrap();
    let alpha = WeightField::from_cells(g, weights).unwrap();
    (f, alpha)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn taut_string_and_apg_agree(
        (values, weights) in (4usize..40).prop_flat_map(|n| (
            prop::collection::vec(-2.0f64..2.0, n),
            prop::collection::vec(0.0f64..0.3, n),
        ))
    ) {
        let (f, alpha) = case(values, weights);
        let a = solve_wtv(&f, &alpha, &SolverOptions::default()).unwrap();
        let b = solve_wtv(&f, &alpha, &apg()).unwrap();
        prop_assert!(a.converged && b.converged);
        let bound = a.u_error_bound() + b.u_error_bound();
        prop_assert!(a.u.distance(&b.u).unwrap() <= bound, "{} > {}", a.u.distance(&b.u).unwrap(), bound);
        prop_assert!((a.primal - b.primal).abs() <= 1e-8 * (1.0 + a.primal.abs()));
    }

    #[test]
    fn weighted_fidelity_solvers_agree(
        (values, weights) in (4usize..40).prop_flat_map(|n| (
            prop::collection::vec(-2.0f64..2.0, n),
            prop::collection::vec(0.5f64..20.0, n),
        ))
    ) {
        let (f, w) = case(values, weights);
        let a = solve_wfid(&f, &w, &SolverOptions::default()).unwrap();
        let b = solve_wfid(&f, &w, &apg()).unwrap();
        prop_assert!(a.solution.u.distance(&b.solution.u).unwrap() <= a.solution.u_error_bound() + b.solution.u_error_bound());
    }
}

#[test]
fn file_round_trip_keeps_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let g = make_grid(-1.0, 1.0, 300).unwrap();
    let f = sample(&g, |x| x.signum() + 0.4 * (6.0 * x).sin()).unwrap();
    let alpha = WeightField::from_cells(g, (0..300).map(|j| 0.05 + 0.001 * j as f64).collect()).unwrap();
    let sol = solve_wtv(&f, &alpha, &SolverOptions::default()).unwrap();
    let (fp, up) = (dir.path().join("f.csv"), dir.path().join("u.csv"));
    save_signal_csv(&fp, &f, "f").unwrap();
    save_signal_csv(&up, &sol.u, "u").unwrap();
    let f2 = load_signal_csv(&fp, None).unwrap();
    let u2 = load_signal_csv(&up, Some(g)).unwrap();
    assert_eq!(f2.values(), f.values());
    assert_eq!(u2.values(), sol.u.values());
    let tol = CertificateTolerances::standard(&f2, &u2, &alpha, Model::Wtv);
    let report = verify_kkt_with_dual(&f2, &u2, &sol.v, &alpha, Model::Wtv, &tol).unwrap();
    assert!(report.pass, "{report:?}");
}
