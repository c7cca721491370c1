//! Closed-form minimizers used as references for the solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, Signal};
use crate::weight::WeightSpec;

/// Solution type for affine data `lambda x` and weight `mu |x| + c` on `(-L, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Affine pieces next to the origin, a jump of `2 mu` there, plateaus near the ends.
    TwoPlateausWithJump,
    /// Two constant halves.
    PureStep,
    /// Identically zero.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineAbsCase {
    pub l: f64,
    pub lambda: f64,
    pub mu: f64,
    pub c: f64,
    pub regime: Regime,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be > 0, got {x}")))
    }
}

impl AffineAbsCase {
    pub fn new(l: f64, lambda: f64, mu: f64, c: f64) -> Result<Self> {
        positive("L", l)?;
        positive("lambda", lambda)?;
        positive("mu", mu)?;
        positive("c", c)?;
        Ok(Self { l, lambda, mu, c, regime: classify(l, lambda, mu, c) })
    }

    /// End of the affine part, `L - sqrt(2 lambda mu L + 2 lambda c) / lambda`.
    pub fn x_mu_c(&self) -> f64 {
        self.l - (2.0 * self.lambda * self.mu * self.l + 2.0 * self.lambda * self.c).sqrt() / self.lambda
    }

    /// Value of `u` just right of the origin's plateau, i.e. on `[x_mu_c, L)`.
    pub fn plateau(&self) -> f64 {
        match self.regime {
            Regime::TwoPlateausWithJump => self.lambda * self.x_mu_c() + self.mu,
            Regime::PureStep => self.lambda * self.l / 2.0 - self.c / self.l,
            Regime::Zero => 0.0,
        }
    }

    /// Height of the jump at the origin.
    pub fn jump(&self) -> f64 {
        match self.regime {
            Regime::TwoPlateausWithJump => 2.0 * self.mu,
            Regime::PureStep => 2.0 * self.plateau(),
            Regime::Zero => 0.0,
        }
    }

    pub fn u(&self, x: f64) -> f64 {
        let s = if x >= 0.0 { 1.0 } else { -1.0 };
        let y = x.abs();
        match self.regime {
            Regime::TwoPlateausWithJump => {
                let x0 = self.x_mu_c();
                s * (self.lambda * y.min(x0) + self.mu)
            }
            Regime::PureStep => s * self.plateau(),
            Regime::Zero => 0.0,
        }
    }

    /// Dual variable; even in `x`, equal to `-alpha` on the contact set.
    pub fn v(&self, x: f64) -> f64 {
        let y = x.abs();
        let (l, lam) = (self.l, self.lambda);
        match self.regime {
            Regime::TwoPlateausWithJump => {
                let x0 = self.x_mu_c();
                if y <= x0 {
                    -(self.mu * y + self.c)
                } else {
                    let m = lam * x0 + self.mu;
                    0.5 * lam * y * y - m * y + m * l - 0.5 * lam * l * l
                }
            }
            Regime::PureStep => {
                let m = self.plateau();
                0.5 * lam * y * y - m * y + m * l - 0.5 * lam * l * l
            }
            Regime::Zero => 0.5 * lam * (y * y - l * l),
        }
    }
}

/// Regime from the parameter inequalities.
pub fn classify(l: f64, lambda: f64, mu: f64, c: f64) -> Regime {
    let threshold = lambda * l * l / 2.0;
    if mu * l + c < threshold {
        Regime::TwoPlateausWithJump
    } else if c < threshold {
        Regime::PureStep
    } else {
        Regime::Zero
    }
}

fn check_symmetric(grid: &Grid, l: f64) -> Result<()> {
    let tol = 1e-12 * l;
    if (grid.a() + l).abs() > tol || (grid.b() - l).abs() > tol {
        return Err(Error::InvalidGrid(format!("expected the interval (-{l}, {l}), got ({}, {})", grid.a(), grid.b())));
    }
    Ok(())
}

/// Samples the closed-form minimizer at cell centres.
pub fn affine_abs_solution(l: f64, lambda: f64, mu: f64, c: f64, grid: &Grid) -> Result<(Signal, AffineAbsCase)> {
    let case = AffineAbsCase::new(l, lambda, mu, c)?;
    check_symmetric(grid, l)?;
    Ok((crate::grid::sample(grid, |x| case.u(x))?, case))
}

/// The closed-form dual variable at the nodes.
pub fn affine_abs_dual(case: &AffineAbsCase, grid: &Grid) -> Vec<f64> {
    let mut v: Vec<f64> = (0..=grid.n()).map(|k| case.v(grid.node(k))).collect();
    v[0] = 0.0;
    v[grid.n()] = 0.0;
    v
}

/// Minimizer for data `s sign(x)` and scalar weight `alpha` on `(-L, L)`:
/// `sign(x) max(s - alpha / L, 0)`.
pub fn scalar_tv_step_solution(l: f64, s: f64, alpha: f64, grid: &Grid) -> Result<Signal> {
    positive("L", l)?;
    positive("s", s)?;
    positive("alpha", alpha)?;
    check_symmetric(grid, l)?;
    let m = (s - alpha / l).max(0.0);
    crate::grid::sample(grid, |x| if x >= 0.0 { m } else { -m })
}

/// Matching dual: `-alpha (1 - |x| / L)` when the step survives, `s (|x| - L)` otherwise.
pub fn scalar_tv_step_dual(l: f64, s: f64, alpha: f64, grid: &Grid) -> Vec<f64> {
    (0..=grid.n())
        .map(|k| {
            if k == 0 || k == grid.n() {
                return 0.0;
            }
            let y = grid.node(k).abs();
            if alpha < s * l {
                -alpha * (1.0 - y / l)
            } else {
                s * (y - l)
            }
        })
        .collect()
}

/// Weight vanishing at the interior ends of `intervals` whose tents rise with
/// slope `slope_margin * 2 * f_bound`, so that piecewise-constant data with
/// jumps at those ends is recovered exactly.
pub fn pc_exact_weight(intervals: &[(f64, f64)], f_bound: f64, slope_margin: f64) -> Result<WeightSpec> {
    positive("f_bound", f_bound)?;
    if !(slope_margin > 1.0 && slope_margin.is_finite()) {
        return Err(Error::InvalidParameter(format!("slope margin must exceed 1, got {slope_margin}")));
    }
    if intervals.is_empty() {
        return Err(Error::InvalidParameter("need at least one interval".into()));
    }
    for (i, &(lo, hi)) in intervals.iter().enumerate() {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!("degenerate interval ({lo}, {hi})")));
        }
        if i > 0 && lo != intervals[i - 1].1 {
            return Err(Error::InvalidParameter("intervals must be contiguous".into()));
        }
    }
    let slope = slope_margin * 2.0 * f_bound;
    Ok(WeightSpec::Tent {
        intervals: intervals.iter().map(|&(lo, hi)| [lo, hi]).collect(),
        slopes: vec![slope; intervals.len()],
    })
}

/// Classifies a numerical solution for odd affine data by its shape.
pub fn classify_profile(u: &Signal, tol: f64) -> Regime {
    if u.range() <= tol {
        return Regime::Zero;
    }
    let d = u.differences();
    let n = u.len();
    let mid = n / 2 - 1;
    let flat_elsewhere = d.iter().enumerate().all(|(e, x)| e == mid || x.abs() <= tol);
    if flat_elsewhere {
        Regime::PureStep
    } else {
        Regime::TwoPlateausWithJump
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn regime_one_worked_example() {
        let g = make_grid(-1.0, 1.0, 8).unwrap();
        let (u, case) = affine_abs_solution(1.0, 2.0, 0.2, 0.3, &g).unwrap();
        assert_eq!(case.regime, Regime::TwoPlateausWithJump);
        assert!((case.x_mu_c() - (1.0 - 2f64.sqrt() / 2.0)).abs() < 1e-15);
        assert!((case.x_mu_c() - 0.292893).abs() < 1e-6);
        assert!((case.plateau() - 0.785786).abs() < 1e-6);
        assert!((case.u(1e-9) - 0.2).abs() < 1e-8);
        assert!((case.u(-1e-9) + 0.2).abs() < 1e-8);
        assert!((case.jump() - 0.4).abs() < 1e-15);
        assert!((u.values()[7] - case.plateau()).abs() < 1e-15);
    }

    #[test]
    fn regime_two_and_three() {
        let case = AffineAbsCase::new(1.0, 2.0, 1.0, 0.5).unwrap();
        assert_eq!(case.regime, Regime::PureStep);
        assert_eq!(case.u(0.3), 0.5);
        assert_eq!(case.u(-0.7), -0.5);
        let case = AffineAbsCase::new(1.0, 2.0, 0.1, 1.2).unwrap();
        assert_eq!(case.regime, Regime::Zero);
        assert_eq!(case.u(0.4), 0.0);
        assert!(AffineAbsCase::new(1.0, 2.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn dual_profile_is_consistent() {
        // v' = f - u on the free set, v = -alpha on the contact set, v(L) = 0
        for &(mu, c) in &[(0.2, 0.3), (1.0, 0.5), (0.1, 1.2)] {
            let case = AffineAbsCase::new(1.0, 2.0, mu, c).unwrap();
            assert!(case.v(1.0).abs() < 1e-14);
            assert!((case.v(0.0) + c).abs() < 1e-12 || case.regime == Regime::Zero);
            for i in 1..200 {
                let x = -1.0 + i as f64 / 100.0;
                assert!(case.v(x) <= 1e-14 && case.v(x) >= -(mu * x.abs() + c) - 1e-12, "box at {x}");
                let eps = 1e-6;
                let fd = (case.v(x + eps) - case.v(x - eps)) / (2.0 * eps);
                if x.abs() > 1e-3 {
                    let x0 = case.x_mu_c();
                    let contact = case.regime == Regime::TwoPlateausWithJump && x.abs() < x0 - 1e-3;
                    if !contact && (x.abs() - x0).abs() > 1e-3 {
                        assert!((fd - (2.0 * x - case.u(x))).abs() < 1e-6, "linkage at {x}: {fd}");
                    }
                }
            }
        }
    }

    #[test]
    fn regime_boundary_continuity() {
        let g = make_grid(-1.0, 1.0, 64).unwrap();
        let c = 0.3;
        let mu_star = 1.0 - c; // mu L + c = lambda L^2 / 2
        let (step, _) = affine_abs_solution(1.0, 2.0, mu_star, c, &g).unwrap();
        let mut last = f64::INFINITY;
        for delta in [1e-1, 1e-2, 1e-3, 1e-4] {
            let (near, case) = affine_abs_solution(1.0, 2.0, mu_star - delta, c, &g).unwrap();
            assert_eq!(case.regime, Regime::TwoPlateausWithJump);
            let dist = near.distance(&step).unwrap();
            assert!(dist <= 3.0 * delta.sqrt() && dist < last);
            last = dist;
        }
    }

    #[test]
    fn step_oracle() {
        let g = make_grid(-1.0, 1.0, 4).unwrap();
        assert_eq!(scalar_tv_step_solution(1.0, 1.0, 0.5, &g).unwrap().values(), &[-0.5, -0.5, 0.5, 0.5]);
        assert!(scalar_tv_step_solution(1.0, 1.0, 1.5, &g).unwrap().values().iter().all(|&x| x == 0.0));
        let u = scalar_tv_step_solution(1.0, 1.0, 1e-9, &g).unwrap();
        assert!((u.values()[0] + 1.0).abs() < 1e-8);
        assert!(scalar_tv_step_solution(1.0, 1.0, 0.5, &make_grid(0.0, 1.0, 4).unwrap()).is_err());
    }

    #[test]
    fn tent_weight_construction() {
        let spec = pc_exact_weight(&[(-1.0, 0.0), (0.0, 1.0)], 1.3, 1.2).unwrap();
        match &spec {
            WeightSpec::Tent { slopes, .. } => assert!(slopes.iter().all(|s| (s - 3.12).abs() < 1e-12)),
            _ => panic!("expected tents"),
        }
        for x in [-1.0, 0.0, 1.0] {
            assert!(spec.eval(x).unwrap().abs() < 1e-12);
        }
        assert!((spec.eval(0.5).unwrap() - 1.56).abs() < 1e-12);
        assert!((spec.eval(-0.5).unwrap() - 1.56).abs() < 1e-12);
        assert!(pc_exact_weight(&[(0.0, 0.0)], 1.0, 1.2).is_err());
        assert!(pc_exact_weight(&[(-1.0, 1.0)], 1.0, 0.9).is_err());
    }

    #[test]
    fn profile_classification() {
        let g = make_grid(-1.0, 1.0, 16).unwrap();
        for &(mu, c) in &[(0.2, 0.3), (1.0, 0.5), (0.1, 1.2)] {
            let (u, case) = affine_abs_solution(1.0, 2.0, mu, c, &g).unwrap();
            assert_eq!(classify_profile(&u, 1e-12), case.regime);
        }
    }
}
