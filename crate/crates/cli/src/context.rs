use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use wtv1d::io::{load_signal_csv, load_weight_spec, save_json, save_signal_csv, write_nodes_csv};
use wtv1d::{realize_weight, Grid, Signal, SolverOptions, WeightField, WeightSpec};

use crate::args::{Format, GlobalArgs};

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    NotConverged,
    Failed,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::NotConverged => 3,
            Status::Failed => 4,
        }
    }

    pub fn converged(ok: bool) -> Self {
        if ok {
            Status::Ok
        } else {
            Status::NotConverged
        }
    }
}

pub struct Ctx {
    pub grid: Option<Grid>,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    pub opts: SolverOptions,
    pub seed: u64,
}

impl Ctx {
    pub fn new(g: &GlobalArgs) -> Result<Self> {
        let grid = match g.grid.as_deref() {
            None => None,
            Some(&[a, b, n]) => {
                if !(n >= 1.0 && n.fract() == 0.0) {
                    bail!("grid size must be a positive integer, got {n}");
                }
                Some(Grid::new(a, b, n as usize)?)
            }
            Some(other) => bail!("--grid takes three values, got {}", other.len()),
        };
        let opts = SolverOptions { max_iterations: g.max_iters, gap_tolerance: g.tol, method: g.method };
        opts.validate()?;
        Ok(Self { grid, out: g.out.clone(), formats: g.format.clone(), opts, seed: g.seed })
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    /// The `--grid` override, or the given default.
    pub fn grid_or(&self, a: f64, b: f64, n: usize) -> Result<Grid> {
        match self.grid {
            Some(g) => Ok(g),
            None => Ok(Grid::new(a, b, n)?),
        }
    }

    fn path(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        Ok(self.out.join(name))
    }

    pub fn signal(&self, name: &str, s: &Signal, column: &str) -> Result<()> {
        if self.wants(Format::Csv) {
            save_signal_csv(&self.path(name)?, s, column)?;
        }
        Ok(())
    }

    pub fn nodes(&self, name: &str, grid: &Grid, v: &[f64], column: &str) -> Result<()> {
        if self.wants(Format::Csv) {
            write_nodes_csv(fs::File::create(self.path(name)?)?, grid, v, column)?;
        }
        Ok(())
    }

    pub fn table<R: Serialize>(&self, name: &str, rows: &[R]) -> Result<()> {
        if self.wants(Format::Csv) {
            let mut w = csv::Writer::from_path(self.path(name)?)?;
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Ok(())
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        if self.wants(Format::Json) {
            save_json(&self.path(name)?, value)?;
        }
        Ok(())
    }

    pub fn svg(&self, name: &str, render: impl FnOnce() -> String) -> Result<()> {
        if self.wants(Format::Svg) {
            fs::write(self.path(name)?, render())?;
        }
        Ok(())
    }

    pub fn load_signal(&self, path: &Path) -> Result<Signal> {
        load_signal_csv(path, self.grid).with_context(|| format!("reading {}", path.display()))
    }
}

/// Weight from a spec argument, or from a CSV of cell values when the argument ends in `.csv`.
pub fn load_weight(arg: &str, grid: &Grid) -> Result<(WeightField, Option<WeightSpec>)> {
    if arg.ends_with(".csv") {
        let s = load_signal_csv(Path::new(arg), Some(*grid)).with_context(|| format!("reading {arg}"))?;
        return Ok((WeightField::from_cells(*grid, s.into_values())?, None));
    }
    let spec = load_weight_spec(arg).with_context(|| format!("weight '{arg}'"))?;
    Ok((realize_weight(&spec, grid)?, Some(spec)))
}
