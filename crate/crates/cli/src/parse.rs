//! Small argument grammars: value lists, ranges and noise models.

use std::f64::consts::PI;

use anyhow::{bail, Context, Result};

pub fn list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("'{t}' is not a number")))
        .collect()
}

/// `START:STOP:COUNT` (inclusive, evenly spaced) or a comma list.
pub fn values(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, count] => {
            let (a, b): (f64, f64) = (start.trim().parse()?, stop.trim().parse()?);
            let k: usize = count.trim().parse().with_context(|| format!("'{count}' is not a count"))?;
            match k {
                0 => bail!("range '{s}' is empty"),
                1 => Ok(vec![a]),
                _ => Ok((0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()),
            }
        }
        [_] => list(s),
        _ => bail!("expected START:STOP:COUNT or a comma list, got '{s}'"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Noise {
    Zero,
    /// `A sin(K pi x)`.
    Sin { amplitude: f64, k: f64 },
    /// `A exp(-|x|) sin(K pi x)`.
    DampedSin { amplitude: f64, k: f64 },
}

impl Noise {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().with_context(|| format!("'{t}' is not a number in noise '{s}'"));
        match parts.as_slice() {
            ["zero"] => Ok(Noise::Zero),
            ["sin", a, k] => Ok(Noise::Sin { amplitude: num(a)?, k: num(k)? }),
            ["damped-sin", a, k] => Ok(Noise::DampedSin { amplitude: num(a)?, k: num(k)? }),
            _ => bail!("unknown noise '{s}', expected zero, sin:A:K or damped-sin:A:K"),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Noise::Zero => 0.0,
            Noise::Sin { amplitude, k } => amplitude * (k * PI * x).sin(),
            Noise::DampedSin { amplitude, k } => amplitude * (-x.abs()).exp() * (k * PI * x).sin(),
        }
    }
}

/// Piecewise-constant function taking `levels[i]` between consecutive breaks.
pub fn piecewise(levels: &[f64], breaks: &[f64]) -> Result<impl Fn(f64) -> f64> {
    if levels.len() != breaks.len() + 1 {
        bail!("{} levels need {} breaks, got {}", levels.len(), levels.len() - 1, breaks.len());
    }
    if breaks.windows(2).any(|w| w[1] <= w[0]) {
        bail!("breaks must be strictly increasing");
    }
    let (levels, breaks) = (levels.to_vec(), breaks.to_vec());
    Ok(move |x: f64| levels[breaks.iter().filter(|&&b| b < x).count()])
}
