//! Seeded random test corpus of piecewise data and weights.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{Grid, Signal};
use crate::weight::{realize_weight, WeightField, WeightSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusCase {
    pub index: usize,
    pub f: Signal,
    pub spec: WeightSpec,
    pub alpha: WeightField,
}

/// Piecewise constant or affine data with up to 8 pieces whose breaks sit on edges.
pub fn random_piecewise<R: Rng>(rng: &mut R, grid: &Grid) -> Result<Signal> {
    let pieces = rng.gen_range(1..=8usize).min(grid.n());
    let mut breaks: Vec<usize> = sample_indices(rng, grid.n() - 1, pieces - 1).into_iter().map(|e| e + 1).collect();
    breaks.sort_unstable();
    breaks.push(grid.n());
    let mut values = Vec::with_capacity(grid.n());
    let mut start = 0;
    for end in breaks {
        let level = rng.gen_range(-2.0..2.0);
        let slope = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(-3.0..3.0) };
        for j in start..end {
            values.push(level + slope * (grid.center(j) - grid.center(start)));
        }
        start = end;
    }
    Signal::new(*grid, values)
}

/// Scalar, absolute-value or piecewise-affine weight with values in `[0, 2 range(f)]`,
/// including weights that vanish on parts of the domain.
pub fn random_weight_spec<R: Rng>(rng: &mut R, grid: &Grid, range: f64) -> WeightSpec {
    let top = 2.0 * range.max(1e-3);
    let (a, b) = (grid.a(), grid.b());
    match rng.gen_range(0..4) {
        0 => WeightSpec::scalar(if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.0..top) }),
        1 => {
            let x0 = rng.gen_range(a..b);
            let c = if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.0..top) };
            let reach = (x0 - a).max(b - x0);
            let mu = rng.gen_range(0.0..=(top - c) / reach);
            WeightSpec::abs(mu, c, x0)
        }
        _ => {
            let k = rng.gen_range(2..=6);
            let mut xs: Vec<f64> = (0..k).map(|_| rng.gen_range(a..=b)).collect();
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            let knots = xs
                .into_iter()
                .map(|x| [x, if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..top) }])
                .collect();
            WeightSpec::Pwa { knots }
        }
    }
}

/// `count` cases on grids of size between `n_min` and `n_max`, reproducible from `seed`.
pub fn random_corpus(seed: u64, count: usize, n_min: usize, n_max: usize) -> Result<Vec<CorpusCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|index| {
            let n = rng.gen_range(n_min..=n_max);
            let grid = Grid::new(-1.0, 1.0, n)?;
            let f = random_piecewise(&mut rng, &grid)?;
            let spec = random_weight_spec(&mut rng, &grid, f.range());
            let alpha = realize_weight(&spec, &grid)?;
            Ok(CorpusCase { index, f, spec, alpha })
        })
        .collect()
}
