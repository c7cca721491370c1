//! Dual certificates for both models.
//!
//! A candidate `u` is optimal exactly when the node array `v` obtained by
//! integrating `h (f - u)` (or `h w (f - u)`) from the left end vanishes at the
//! right end, stays inside its box, and equals `-alpha sign(d)` wherever `u` jumps.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{default_jump_threshold, Signal};
use crate::weight::WeightField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// Weight in the regularizer, box radius `alpha` at each edge.
    Wtv,
    /// Weight in the data term, unit box.
    Wfid,
}

/// Integrates the linkage condition from `v_0 = 0`; length `n + 1`.
pub fn build_certificate(f: &Signal, u: &Signal, weight: &WeightField, model: Model) -> Result<Vec<f64>> {
    f.grid().check_same(u.grid())?;
    f.grid().check_same(weight.grid())?;
    let h = f.grid().h();
    let mut v = Vec::with_capacity(f.len() + 1);
    let mut acc = 0.0;
    v.push(0.0);
    for j in 0..f.len() {
        let w = match model {
            Model::Wtv => 1.0,
            Model::Wfid => weight.cell_values()[j],
        };
        acc += h * w * (f.values()[j] - u.values()[j]);
        v.push(acc);
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateTolerances {
    pub linkage: f64,
    pub boundary: f64,
    pub box_: f64,
    pub sign: f64,
    /// Differences above this count as jumps for the sign condition.
    pub jump_threshold: f64,
}

impl CertificateTolerances {
    /// `1e-6 h (1 + |f|_inf)` for the integrated conditions, `1e-6 (1 + max radius)`
    /// for the box and sign conditions, and the default jump threshold of `u`.
    pub fn standard(f: &Signal, u: &Signal, weight: &WeightField, model: Model) -> Self {
        Self::scaled(1e-6, f, u, weight, model)
    }

    pub fn scaled(rel: f64, f: &Signal, u: &Signal, weight: &WeightField, model: Model) -> Self {
        let h = f.grid().h();
        let radius = match model {
            Model::Wtv => weight.max_edge(),
            Model::Wfid => 1.0,
        };
        let integrated = rel * h * (1.0 + f.sup_norm());
        Self {
            linkage: integrated,
            boundary: integrated,
            box_: rel * (1.0 + radius),
            sign: rel * (1.0 + radius),
            jump_threshold: default_jump_threshold(u),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub value: f64,
    /// Cell index for linkage, node index otherwise.
    pub location: Option<usize>,
    pub tolerance: f64,
    pub pass: bool,
}

impl Residual {
    fn new(value: f64, location: Option<usize>, tolerance: f64) -> Self {
        Self { value, location, tolerance, pass: value <= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub model: Model,
    pub boundary: Residual,
    pub linkage: Residual,
    pub box_violation: Residual,
    pub sign_violation: Residual,
    pub jump_edges: usize,
    pub pass: bool,
}

impl CertificateReport {
    /// Name and residual of the worst failing condition, relative to its tolerance.
    pub fn worst(&self) -> Option<(&'static str, Residual)> {
        [("boundary", self.boundary), ("linkage", self.linkage), ("box", self.box_violation), ("sign", self.sign_violation)]
            .into_iter()
            .filter(|(_, r)| !r.pass)
            .max_by(|a, b| (a.1.value / a.1.tolerance).total_cmp(&(b.1.value / b.1.tolerance)))
    }
}

fn radii(weight: &WeightField, model: Model) -> Vec<f64> {
    match model {
        Model::Wtv => weight.node_radii(),
        Model::Wfid => {
            let n = weight.grid().n();
            (0..=n).map(|k| if k == 0 || k == n { 0.0 } else { 1.0 }).collect()
        }
    }
}

/// Checks the optimality system with the certificate integrated from `u`.
pub fn verify_kkt(f: &Signal, u: &Signal, weight: &WeightField, model: Model, tol: &CertificateTolerances) -> Result<CertificateReport> {
    let v = build_certificate(f, u, weight, model)?;
    verify_kkt_with_dual(f, u, &v, weight, model, tol)
}

/// Checks the optimality system for a supplied dual candidate.
pub fn verify_kkt_with_dual(
    f: &Signal,
    u: &Signal,
    v: &[f64],
    weight: &WeightField,
    model: Model,
    tol: &CertificateTolerances,
) -> Result<CertificateReport> {
    let grid = f.grid();
    grid.check_same(u.grid())?;
    grid.check_same(weight.grid())?;
    let n = grid.n();
    if v.len() != n + 1 {
        return Err(crate::Error::LengthMismatch { expected: n + 1, got: v.len() });
    }
    let h = grid.h();
    let r = radii(weight, model);

    let boundary = if v[0].abs() >= v[n].abs() { (v[0].abs(), 0) } else { (v[n].abs(), n) };

    let mut linkage = (0.0, None);
    for j in 0..n {
        let w = match model {
            Model::Wtv => 1.0,
            Model::Wfid => weight.cell_values()[j],
        };
        let res = (v[j + 1] - v[j] - h * w * (f.values()[j] - u.values()[j])).abs();
        if res > linkage.0 {
            linkage = (res, Some(j));
        }
    }

    let mut box_v = (0.0, None);
    for k in 1..n {
        let e = (v[k].abs() - r[k]).max(0.0);
        if e > box_v.0 {
            box_v = (e, Some(k));
        }
    }

    let mut sign = (0.0, None);
    let mut jump_edges = 0;
    for (e, d) in u.differences().iter().enumerate() {
        if d.abs() > tol.jump_threshold {
            jump_edges += 1;
            let k = e + 1;
            let res = (v[k] + r[k] * d.signum()).abs();
            if res > sign.0 {
                sign = (res, Some(k));
            }
        }
    }

    let boundary = Residual::new(boundary.0, Some(boundary.1), tol.boundary);
    let linkage = Residual::new(linkage.0, linkage.1, tol.linkage);
    let box_violation = Residual::new(box_v.0, box_v.1, tol.box_);
    let sign_violation = Residual::new(sign.0, sign.1, tol.sign);
    let pass = boundary.pass && linkage.pass && box_violation.pass && sign_violation.pass;
    Ok(CertificateReport { model, boundary, linkage, box_violation, sign_violation, jump_edges, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{affine_abs_dual, affine_abs_solution, scalar_tv_step_dual, scalar_tv_step_solution};
    use crate::grid::{make_grid, sample};
    use crate::weight::{realize_weight, WeightSpec};
    use crate::wfid::solve_wfid;
    use crate::wtv::{solve_wtv, SolverOptions};

    #[test]
    fn certificate_of_identity_is_zero() {
        let g = make_grid(0.0, 1.0, 16).unwrap();
        let f = sample(&g, |x| (9.0 * x).cos()).unwrap();
        let w = WeightField::scalar(g, 1.0).unwrap();
        assert!(build_certificate(&f, &f, &w, Model::Wtv).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn certificate_of_mean_closes() {
        let g = make_grid(-1.0, 1.0, 10).unwrap();
        let f = Signal::new(g, vec![1.0, -2.0, 0.5, 4.0, 3.0, 1.0, 0.0, -1.0, 2.0, 1.5]).unwrap();
        let m = Signal::constant(g, f.mean()).unwrap();
        let v = build_certificate(&f, &m, &WeightField::scalar(g, 1.0).unwrap(), Model::Wtv).unwrap();
        assert!(v[10].abs() < 1e-15);
    }

    #[test]
    fn solver_outputs_pass() {
        let g = make_grid(-1.0, 1.0, 1000).unwrap();
        let f = sample(&g, |x| (3.0 * x).sin() + if x > 0.1 { 0.8 } else { 0.0 }).unwrap();
        let w = realize_weight(&WeightSpec::abs(0.3, 0.05, -0.2), &g).unwrap();
        let sol = solve_wtv(&f, &w, &SolverOptions::default()).unwrap();
        let tol = CertificateTolerances::standard(&f, &sol.u, &w, Model::Wtv);
        let report = verify_kkt(&f, &sol.u, &w, Model::Wtv, &tol).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.jump_edges > 0);
        // the solver's own dual passes too
        let report = verify_kkt_with_dual(&f, &sol.u, &sol.v, &w, Model::Wtv, &tol).unwrap();
        assert!(report.pass, "{report:?}");

        let wf = WeightField::from_cells(g, g.centers().iter().map(|x| 1.0 + x * x).collect()).unwrap();
        let sol = solve_wfid(&f, &wf, &SolverOptions::default()).unwrap();
        let tol = CertificateTolerances::standard(&f, &sol.u, &wf, Model::Wfid);
        assert!(verify_kkt(&f, &sol.u, &wf, Model::Wfid, &tol).unwrap().pass);
    }

    #[test]
    fn perturbation_fails() {
        let g = make_grid(-1.0, 1.0, 200).unwrap();
        let f = sample(&g, |x| x * x).unwrap();
        let w = WeightField::scalar(g, 0.05).unwrap();
        let sol = solve_wtv(&f, &w, &SolverOptions::default()).unwrap();
        let mut vals = sol.u.values().to_vec();
        vals[77] += 0.1;
        let bad = Signal::new(g, vals).unwrap();
        let tol = CertificateTolerances::standard(&f, &bad, &w, Model::Wtv);
        let report = verify_kkt(&f, &bad, &w, Model::Wtv, &tol).unwrap();
        assert!(!report.pass);
        assert!(report.worst().is_some());
    }

    #[test]
    fn identity_fails_sign_condition_at_data_jumps() {
        let g = make_grid(-1.0, 1.0, 20).unwrap();
        let f = sample(&g, |x| if x > 0.0 { 1.0 } else { 0.0 }).unwrap();
        let w = WeightField::scalar(g, 0.5).unwrap();
        let tol = CertificateTolerances::standard(&f, &f, &w, Model::Wtv);
        let report = verify_kkt(&f, &f, &w, Model::Wtv, &tol).unwrap();
        assert!(!report.sign_violation.pass);
        assert_eq!(report.sign_violation.location, Some(10));
    }

    #[test]
    fn grid_aligned_oracles_pass_tightly() {
        // x_mu_c = 1 - sqrt(mu + c) = 0.5 lies on a node for n divisible by 4
        let g = make_grid(-1.0, 1.0, 1024).unwrap();
        let f = sample(&g, |x| 2.0 * x).unwrap();
        for &(mu, c) in &[(0.1, 0.15), (1.0, 0.5), (0.2, 1.5)] {
            let (u, case) = affine_abs_solution(1.0, 2.0, mu, c, &g).unwrap();
            let w = realize_weight(&WeightSpec::abs(mu, c, 0.0), &g).unwrap();
            let tol = CertificateTolerances::scaled(1e-8, &f, &u, &w, Model::Wtv);
            let report = verify_kkt_with_dual(&f, &u, &affine_abs_dual(&case, &g), &w, Model::Wtv, &tol).unwrap();
            assert!(report.pass, "{mu} {c}: {report:?}");
            assert!(verify_kkt(&f, &u, &w, Model::Wtv, &tol).unwrap().pass);
        }
        let f = sample(&g, |x| if x > 0.0 { 1.0 } else { -1.0 }).unwrap();
        for alpha in [0.5, 1.5] {
            let u = scalar_tv_step_solution(1.0, 1.0, alpha, &g).unwrap();
            let w = WeightField::scalar(g, alpha).unwrap();
            let tol = CertificateTolerances::scaled(1e-8, &f, &u, &w, Model::Wtv);
            let report = verify_kkt_with_dual(&f, &u, &scalar_tv_step_dual(1.0, 1.0, alpha, &g), &w, Model::Wtv, &tol).unwrap();
            assert!(report.pass, "{alpha}: {report:?}");
        }
    }
}
