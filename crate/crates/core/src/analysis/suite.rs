//! Structural property checks on solved cases, with per-property tallies.

use serde::{Deserialize, Serialize};

use crate::analysis::certificate::{verify_kkt, CertificateTolerances, Model};
use crate::analysis::structure::{
    boundary_plateau, jump_estimates_report, large_gradient_plateau, max_principle, monotone_run_profile, tv_bound_check,
};
use crate::error::Result;
use crate::grid::{default_jump_threshold, total_variation, Signal};
use crate::weight::WeightField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CaseChecks {
    pub certificate: bool,
    pub tv_bound: bool,
    pub max_principle: bool,
    pub jump_bound: bool,
    pub direction: bool,
    pub run_profile: bool,
    pub large_gradient_plateau: bool,
    pub boundary_plateau: bool,
}

impl CaseChecks {
    pub fn all(&self) -> bool {
        self.certificate
            && self.tv_bound
            && self.max_principle
            && self.jump_bound
            && self.direction
            && self.run_profile
            && self.large_gradient_plateau
            && self.boundary_plateau
    }
}

/// Runs every weighted-TV property on a solved pair. Differences below
/// the default jump threshold count as flat; the strict sides of the run
/// profile use ten times that threshold.
pub fn check_case(f: &Signal, alpha: &WeightField, u: &Signal) -> Result<CaseChecks> {
    let scale = 1.0 + f.sup_norm();
    let jt = default_jump_threshold(u).max(1e-12 * scale);
    let tol = CertificateTolerances::standard(f, u, alpha, Model::Wtv);
    let jumps = jump_estimates_report(f, u, alpha, jt);
    Ok(CaseChecks {
        certificate: verify_kkt(f, u, alpha, Model::Wtv, &tol)?.pass,
        tv_bound: tv_bound_check(f, u, 1e-8 * (1.0 + total_variation(f))).holds,
        max_principle: max_principle(f, u, 1e-9 * scale).holds,
        jump_bound: jumps.bound_violations == 0,
        direction: jumps.direction_violations == 0,
        run_profile: monotone_run_profile(f, u, 10.0 * jt, jt).violations == 0,
        large_gradient_plateau: large_gradient_plateau(f, u, alpha, jt).holds(),
        boundary_plateau: boundary_plateau(f, u, alpha, jt).holds(),
    })
}

/// Number of cases failing each property.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PropertyTally {
    pub cases: usize,
    pub certificate: usize,
    pub tv_bound: usize,
    pub max_principle: usize,
    pub jump_bound: usize,
    pub direction: usize,
    pub run_profile: usize,
    pub large_gradient_plateau: usize,
    pub boundary_plateau: usize,
    /// Indices of cases failing at least one property.
    pub failing_cases: Vec<usize>,
}

impl PropertyTally {
    pub fn record(&mut self, index: usize, c: &CaseChecks) {
        self.cases += 1;
        let bump = |ok: bool, slot: &mut usize| {
            if !ok {
                *slot += 1;
            }
        };
        bump(c.certificate, &mut self.certificate);
        bump(c.tv_bound, &mut self.tv_bound);
        bump(c.max_principle, &mut self.max_principle);
        bump(c.jump_bound, &mut self.jump_bound);
        bump(c.direction, &mut self.direction);
        bump(c.run_profile, &mut self.run_profile);
        bump(c.large_gradient_plateau, &mut self.large_gradient_plateau);
        bump(c.boundary_plateau, &mut self.boundary_plateau);
        if !c.all() {
            self.failing_cases.push(index);
        }
    }

    pub fn pass(&self) -> bool {
        self.failing_cases.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::corpus::random_corpus;
    use crate::wtv::{solve_wtv, SolverOptions};

    #[test]
    fn corpus_has_no_violations() {
        let mut tally = PropertyTally::default();
        for case in random_corpus(3, 300, 16, 200).unwrap() {
            let sol = solve_wtv(&case.f, &case.alpha, &SolverOptions::default()).unwrap();
            tally.record(case.index, &check_case(&case.f, &case.alpha, &sol.u).unwrap());
        }
        assert!(tally.pass(), "{tally:?}");
        assert_eq!(tally.cases, 300);
    }

    #[test]
    fn data_as_solution_fails_certificate() {
        let case = &random_corpus(5, 20, 32, 64).unwrap()[0];
        let alpha = case.alpha.plus_scalar(0.5).unwrap();
        let checks = check_case(&case.f, &alpha, &case.f).unwrap();
        assert!(!checks.certificate || case.f.range() == 0.0);
    }
}
