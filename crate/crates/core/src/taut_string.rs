//! Exact solver for the generic tube problem
//!
//! ```text
//! min_u  sum_j s_j (f_j - u_j)^2 / 2  +  sum_k r_k |u_k - u_{k-1}|
//! ```
//!
//! with cell masses `s_j > 0` and node radii `r_k >= 0` (`r_0 = r_n = 0`). Its dual
//! variable `v` lives on nodes, satisfies `|v_k| <= r_k`, and links to the primal
//! through `s_j (f_j - u_j) = v_{j+1} - v_j`. Writing `U_k = sum_{j<k} s_j u_j` and
//! `F_k = sum_{j<k} s_j f_j`, the optimal `U` is the shortest path through the tube
//! `|U_k - F_k| <= r_k` in the plane with abscissa `sum_{j<k} s_j`, and `v = F - U`.

/// Borrowed problem data.
#[derive(Debug, Clone, Copy)]
pub struct TubeProblem<'a> {
    pub masses: &'a [f64],
    pub data: &'a [f64],
    /// Length `n + 1`; entries `0` and `n` are ignored and treated as zero.
    pub radii: &'a [f64],
}

#[derive(Debug, Clone)]
pub struct TubeSolution {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub iterations: usize,
}

impl TubeProblem<'_> {
    pub fn n(&self) -> usize {
        self.data.len()
    }

    pub fn radius(&self, k: usize) -> f64 {
        if k == 0 || k == self.n() {
            0.0
        } else {
            self.radii[k]
        }
    }

    pub fn primal(&self, u: &[f64]) -> f64 {
        let fit: f64 = self.masses.iter().zip(self.data).zip(u).map(|((s, f), u)| 0.5 * s * (f - u).powi(2)).sum();
        let reg: f64 = (1..self.n()).map(|k| self.radius(k) * (u[k] - u[k - 1]).abs()).sum();
        fit + reg
    }

    /// Dual objective `<f, Bv> - sum (Bv)_j^2 / (2 s_j)`, `(Bv)_j = v_{j+1} - v_j`.
    pub fn dual(&self, v: &[f64]) -> f64 {
        (0..self.n())
            .map(|j| {
                let bv = v[j + 1] - v[j];
                self.data[j] * bv - bv * bv / (2.0 * self.masses[j])
            })
            .sum()
    }

    /// Largest box excess `max (|v_k| - r_k)^+` over interior nodes, with the ends pinned.
    pub fn box_excess(&self, v: &[f64]) -> (usize, f64) {
        let mut worst = (0, v[0].abs());
        let n = self.n();
        if v[n].abs() > worst.1 {
            worst = (n, v[n].abs());
        }
        for k in 1..n {
            let e = (v[k].abs() - self.radius(k)).max(0.0);
            if e > worst.1 {
                worst = (k, e);
            }
        }
        worst
    }

    /// Primal point induced by a dual point.
    pub fn primal_from_dual(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n()).map(|j| self.data[j] - (v[j + 1] - v[j]) / self.masses[j]).collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct Pt {
    t: f64,
    z: f64,
    node: usize,
}

fn slope(p: &Pt, q: &Pt) -> f64 {
    (q.z - p.z) / (q.t - p.t)
}

/// Solves the tube problem exactly by the taut-string funnel.
///
/// Coordinates are accumulated relative to the current origin so that short
/// segments keep full precision. Plateaus of `u` are exactly constant and
/// `v` sits exactly on the box at every contact node.
pub fn taut_string(p: &TubeProblem<'_>) -> TubeSolution {
    let n = p.n();
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n + 1];
    let mut origin = 0usize;
    // relative height of the string above F at the origin, equal to -v[origin]
    let mut z0 = 0.0;
    let mut iterations = 0;

    // scratch for the relative cumulative sums along the current scan
    let mut ts = vec![0.0; n + 1];
    let mut fs = vec![0.0; n + 1];

    while origin < n {
        iterations += 1;
        let o = Pt { t: 0.0, z: z0, node: origin };
        let mut upper: Vec<Pt> = vec![o];
        let mut lower: Vec<Pt> = vec![o];
        let (mut t, mut fsum) = (0.0, 0.0);
        ts[origin] = 0.0;
        fs[origin] = 0.0;
        let mut commit: Option<(Pt, f64)> = None;

        for k in origin + 1..=n {
            t += p.masses[k - 1];
            fsum += p.masses[k - 1] * p.data[k - 1];
            ts[k] = t;
            fs[k] = fsum;
            let r = p.radius(k);
            let pu = Pt { t, z: fsum + r, node: k };
            let pl = Pt { t, z: fsum - r, node: k };

            if lower.len() >= 2 && slope(&o, &pu) < slope(&o, &lower[1]) {
                // string wraps the lower wall: v = +r there
                commit = Some((lower[1], p.radius(lower[1].node)));
                break;
            }
            if upper.len() >= 2 && slope(&o, &pl) > slope(&o, &upper[1]) {
                commit = Some((upper[1], -p.radius(upper[1].node)));
                break;
            }
            while upper.len() >= 2 && slope(&upper[upper.len() - 2], &upper[upper.len() - 1]) >= slope(&upper[upper.len() - 2], &pu) {
                upper.pop();
            }
            upper.push(pu);
            while lower.len() >= 2 && slope(&lower[lower.len() - 2], &lower[lower.len() - 1]) <= slope(&lower[lower.len() - 2], &pl) {
                lower.pop();
            }
            lower.push(pl);
        }

        let (end, v_end) = match commit {
            Some(c) => c,
            None => (Pt { t: ts[n], z: fs[n], node: n }, 0.0),
        };
        let m = end.node;
        let sigma = (end.z - z0) / end.t;
        for uj in &mut u[origin..m] {
            *uj = sigma;
        }
        for k in origin + 1..m {
            let r = p.radius(k);
            v[k] = (fs[k] - z0 - sigma * ts[k]).clamp(-r, r);
        }
        v[m] = v_end;
        z0 = -v_end;
        origin = m;
    }
    TubeSolution { u, v, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn solve(s: &[f64], f: &[f64], r: &[f64]) -> TubeSolution {
        taut_string(&TubeProblem { masses: s, data: f, radii: r })
    }

    #[test]
    fn zero_radius_returns_data() {
        let f = [1.0, -2.0, 3.5, 0.25];
        let sol = solve(&[1.0; 4], &f, &[0.0; 5]);
        assert_eq!(sol.u, f);
        assert!(sol.v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn large_radius_returns_weighted_mean() {
        let f = [1.0, -2.0, 3.5, 0.25];
        let s = [1.0, 2.0, 0.5, 1.5];
        let sol = solve(&s, &f, &[0.0, 100.0, 100.0, 100.0, 0.0]);
        let mean = f.iter().zip(&s).map(|(f, s)| f * s).sum::<f64>() / s.iter().sum::<f64>();
        for u in sol.u {
            assert!((u - mean).abs() < 1e-14);
        }
    }

    #[test]
    fn two_cell_shrinkage() {
        // closed form: each side moves by r / s towards the other
        let sol = solve(&[1.0, 1.0], &[-1.0, 1.0], &[0.0, 0.25, 0.0]);
        assert_eq!(sol.u, vec![-0.75, 0.75]);
        assert_eq!(sol.v, vec![0.0, -0.25, 0.0]);
    }

    #[test]
    fn step_with_plateau_shrinkage() {
        // f = sign on 8 cells of mass 1/4, r = 0.5: u = +-(1 - 0.5 / 1)
        let s = [0.25; 8];
        let f = [-1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 1.0];
        let sol = solve(&s, &f, &[0.0, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.0]);
        for (j, u) in sol.u.iter().enumerate() {
            let want = if j < 4 { -0.5 } else { 0.5 };
            assert!((u - want).abs() < 1e-14, "{j}: {u}");
        }
        assert_eq!(sol.v[4], -0.5);
    }

    fn brute_force(s: &[f64], f: &[f64], r: &[f64]) -> Vec<f64> {
        // projected gradient on the dual, many iterations, tiny problems only
        let n = f.len();
        let p = TubeProblem { masses: s, data: f, radii: r };
        let lip = (1..n).map(|k| 2.0 * (1.0 / s[k - 1] + 1.0 / s[k])).fold(0.0, f64::max);
        let mut v = vec![0.0; n + 1];
        for _ in 0..200_000 {
            let u = p.primal_from_dual(&v);
            for k in 1..n {
                let rk = p.radius(k);
                v[k] = (v[k] - (u[k] - u[k - 1]) / lip).clamp(-rk, rk);
            }
        }
        p.primal_from_dual(&v)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn agrees_with_dual_projected_gradient(
            f in prop::collection::vec(-3.0..3.0f64, 2..9),
            seed_s in prop::collection::vec(0.2..2.0f64, 9),
            seed_r in prop::collection::vec(0.0..1.5f64, 10),
        ) {
            let n = f.len();
            let s = &seed_s[..n];
            let mut r = seed_r[..=n].to_vec();
            r[0] = 0.0;
            r[n] = 0.0;
            let exact = solve(s, &f, &r);
            let reference = brute_force(s, &f, &r);
            for (a, b) in exact.u.iter().zip(&reference) {
                prop_assert!((a - b).abs() < 1e-6, "{:?} vs {:?}", exact.u, reference);
            }
            let p = TubeProblem { masses: s, data: &f, radii: &r };
            let gap = p.primal(&exact.u) - p.dual(&exact.v);
            prop_assert!(gap.abs() <= 1e-12 * (1.0 + p.primal(&exact.u).abs()), "gap {gap}");
            prop_assert!(p.box_excess(&exact.v).1 == 0.0);
        }
    }
}
