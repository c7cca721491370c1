//! Accelerated projected gradient on the box-constrained dual of the tube problem.

use crate::taut_string::{TubeProblem, TubeSolution};

#[derive(Debug, Clone)]
pub struct ApgOutcome {
    pub solution: TubeSolution,
    pub converged: bool,
}

/// FISTA with adaptive restart. The dual gradient at node `k` is the primal
/// difference `u_k - u_{k-1}` of the induced primal point. Stops once the
/// relative duality gap drops below `tol`.
pub fn accelerated_projected_gradient(p: &TubeProblem<'_>, max_iterations: usize, tol: f64) -> ApgOutcome {
    let n = p.n();
    let lip = (1..n)
        .map(|k| 2.0 * (1.0 / p.masses[k - 1] + 1.0 / p.masses[k]))
        .fold(0.0, f64::max);
    let step = 1.0 / lip;
    let radii: Vec<f64> = (0..=n).map(|k| p.radius(k)).collect();

    let mut v = vec![0.0; n + 1];
    let mut y = v.clone();
    let mut v_prev = v.clone();
    let mut theta = 1.0f64;
    let mut prev_obj = f64::INFINITY;
    let mut best = (f64::INFINITY, v.clone());
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iterations {
        iterations += 1;
        let uy = p.primal_from_dual(&y);
        v_prev.copy_from_slice(&v);
        for k in 1..n {
            v[k] = (y[k] - step * (uy[k] - uy[k - 1])).clamp(-radii[k], radii[k]);
        }
        // minimizing the negated dual, so restart when it goes up
        let obj = -p.dual(&v);
        let theta_next = 0.5 * (1.0 + (1.0 + 4.0 * theta * theta).sqrt());
        if obj > prev_obj {
            theta = 1.0;
            y.copy_from_slice(&v);
        } else {
            let beta = (theta - 1.0) / theta_next;
            for k in 1..n {
                y[k] = v[k] + beta * (v[k] - v_prev[k]);
            }
            theta = theta_next;
        }
        prev_obj = obj;

        if iterations % 10 == 0 || iterations == max_iterations {
            let u = p.primal_from_dual(&v);
            let primal = p.primal(&u);
            let gap = (primal + obj).max(0.0) / (1.0 + primal.abs());
            if gap < best.0 {
                best = (gap, v.clone());
            }
            if gap <= tol {
                converged = true;
                break;
            }
        }
    }
    let v = best.1;
    let u = p.primal_from_dual(&v);
    ApgOutcome { solution: TubeSolution { u, v, iterations }, converged }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taut_string::taut_string;

    #[test]
    fn matches_taut_string_on_small_problem() {
        let f = [0.3, -1.2, 2.0, 1.9, 0.1, -0.4, 0.7];
        let s = [0.5; 7];
        let r = [0.0, 0.3, 0.2, 0.6, 0.1, 0.4, 0.3, 0.0];
        let p = TubeProblem { masses: &s, data: &f, radii: &r };
        let exact = taut_string(&p);
        let out = accelerated_projected_gradient(&p, 100_000, 1e-13);
        assert!(out.converged);
        for (a, b) in exact.u.iter().zip(&out.solution.u) {
            assert!((a - b).abs() < 1e-5);
        }
    }

    #[test]
    fn reports_non_convergence() {
        let f: Vec<f64> = (0..200).map(|j| ((j * 7919) % 13) as f64).collect();
        let s = vec![1e-3; 200];
        let r = vec![0.05; 201];
        let p = TubeProblem { masses: &s, data: &f, radii: &r };
        let out = accelerated_projected_gradient(&p, 5, 1e-14);
        assert!(!out.converged);
        assert_eq!(out.solution.iterations, 5);
    }
}
