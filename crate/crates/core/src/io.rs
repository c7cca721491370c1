//! CSV and JSON input/output.
//!
//! Signals are stored as `x,value` rows at cell centres, header optional.
//! Numbers are written in shortest round-trip form, so a write followed by a
//! read reproduces every value bit for bit.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, Signal};
use crate::weight::WeightSpec;

pub fn format_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Writes `x,value` rows for each cell.
pub fn write_signal_csv<W: Write>(out: W, signal: &Signal, column: &str) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", column])?;
    for (x, v) in signal.grid().centers().iter().zip(signal.values()) {
        w.write_record([format_f64(*x), format_f64(*v)])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `x,value` rows for node-based arrays such as dual variables.
pub fn write_nodes_csv<W: Write>(out: W, grid: &Grid, values: &[f64], column: &str) -> Result<()> {
    if values.len() != grid.n() + 1 {
        return Err(Error::LengthMismatch { expected: grid.n() + 1, got: values.len() });
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", column])?;
    for (k, v) in values.iter().enumerate() {
        w.write_record([format_f64(grid.node(k)), format_f64(*v)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_signal_csv(path: &Path, signal: &Signal, column: &str) -> Result<()> {
    write_signal_csv(File::create(path)?, signal, column)
}

fn parse_rows<R: Read>(input: R) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(input);
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(Error::Parse(format!("row {} has {} columns, expected 2", i + 1, rec.len())));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(x), Ok(v)) => rows.push((x, v)),
            _ if i == 0 => continue,
            _ => return Err(Error::Parse(format!("row {} is not numeric: {:?}", i + 1, rec))),
        }
    }
    Ok(rows)
}

fn round_sig(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Recovers the grid from uniformly spaced cell centres. Endpoints are rounded
/// to 12 significant digits so that grids written by this crate round-trip.
pub fn infer_grid(xs: &[f64]) -> Result<Grid> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::Parse(format!("need at least 2 rows to infer a grid, got {n}")));
    }
    let h = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    if !(h > 0.0) {
        return Err(Error::Parse("x column must be increasing".into()));
    }
    for (j, x) in xs.iter().enumerate() {
        let expected = xs[0] + j as f64 * h;
        if (x - expected).abs() > 1e-6 * h {
            return Err(Error::Parse(format!("x column is not uniformly spaced at row {}", j + 1)));
        }
    }
    Grid::new(round_sig(xs[0] - 0.5 * h), round_sig(xs[n - 1] + 0.5 * h), n)
}

/// Reads a signal, using `grid` when given and checking that the rows match it.
pub fn read_signal_csv<R: Read>(input: R, grid: Option<Grid>) -> Result<Signal> {
    let rows = parse_rows(input)?;
    let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let grid = match grid {
        Some(g) => {
            if rows.len() != g.n() {
                return Err(Error::LengthMismatch { expected: g.n(), got: rows.len() });
            }
            for (j, x) in xs.iter().enumerate() {
                if (x - g.center(j)).abs() > 1e-6 * g.h() {
                    return Err(Error::Parse(format!("row {} has x = {x}, grid centre is {}", j + 1, g.center(j))));
                }
            }
            g
        }
        None => infer_grid(&xs)?,
    };
    Signal::new(grid, rows.into_iter().map(|r| r.1).collect())
}

/// Reads node-based values written by [`write_nodes_csv`], checking them against `grid`.
pub fn read_nodes_csv<R: Read>(input: R, grid: &Grid) -> Result<Vec<f64>> {
    let rows = parse_rows(input)?;
    if rows.len() != grid.n() + 1 {
        return Err(Error::LengthMismatch { expected: grid.n() + 1, got: rows.len() });
    }
    for (k, (x, v)) in rows.iter().enumerate() {
        if (x - grid.node(k)).abs() > 1e-6 * grid.h() {
            return Err(Error::Parse(format!("row {} has x = {x}, grid node is {}", k + 1, grid.node(k))));
        }
        if !v.is_finite() {
            return Err(Error::NonFinite { index: k, value: *v });
        }
    }
    Ok(rows.into_iter().map(|r| r.1).collect())
}

pub fn load_nodes_csv(path: &Path, grid: &Grid) -> Result<Vec<f64>> {
    read_nodes_csv(File::open(path)?, grid)
}

pub fn load_signal_csv(path: &Path, grid: Option<Grid>) -> Result<Signal> {
    read_signal_csv(File::open(path)?, grid)
}

/// Reads a weight spec from inline JSON or shorthand, or from a file path.
pub fn load_weight_spec(arg: &str) -> Result<WeightSpec> {
    let trimmed = arg.trim();
    if trimmed.starts_with('{') || trimmed.starts_with("scalar:") || trimmed.starts_with("abs:") {
        return trimmed.parse();
    }
    if let Ok(v) = trimmed.parse::<f64>() {
        return Ok(WeightSpec::scalar(v));
    }
    let mut text = String::new();
    File::open(trimmed)?.read_to_string(&mut text)?;
    text.parse()
}

pub fn write_json<T: Serialize, W: Write>(out: W, value: &T) -> Result<()> {
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_json(File::create(path)?, value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, sample};
    use proptest::prelude::*;

    #[test]
    fn round_trip_is_bitwise() {
        let g = make_grid(-1.0, 1.0, 37).unwrap();
        let s = sample(&g, |x| (13.0 * x).sin() / 3.0 + 1e-300 * x).unwrap();
        let mut buf = Vec::new();
        write_signal_csv(&mut buf, &s, "value").unwrap();
        let back = read_signal_csv(buf.as_slice(), None).unwrap();
        assert!(back.grid().same_as(&g));
        for (a, b) in back.values().iter().zip(s.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn header_is_optional() {
        let s = read_signal_csv("0.25,1\n0.75,2\n".as_bytes(), None).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0]);
        assert!(s.grid().same_as(&make_grid(0.0, 1.0, 2).unwrap()));
        let s = read_signal_csv("x,value\n0.25,1\n0.75,2\n".as_bytes(), None).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0]);
    }

    #[test]
    fn nodes_round_trip() {
        let g = make_grid(0.0, 1.0, 5).unwrap();
        let v = vec![0.0, 0.1, -0.25, 1e-17, 0.5, 0.0];
        let mut buf = Vec::new();
        write_nodes_csv(&mut buf, &g, &v, "v").unwrap();
        assert_eq!(read_nodes_csv(buf.as_slice(), &g).unwrap(), v);
        let other = make_grid(0.0, 1.0, 4).unwrap();
        assert!(matches!(read_nodes_csv(buf.as_slice(), &other), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(read_signal_csv("0,1\nfoo,2\n".as_bytes(), None), Err(Error::Parse(_))));
        assert!(read_signal_csv("0,1\n1,2\n5,3\n".as_bytes(), None).is_err());
        assert!(read_signal_csv("0,1,2\n".as_bytes(), None).is_err());
        let g = make_grid(0.0, 1.0, 3).unwrap();
        assert!(matches!(read_signal_csv("0.25,1\n0.75,2\n".as_bytes(), Some(g)), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn weight_spec_arguments() {
        assert_eq!(load_weight_spec("scalar:2").unwrap(), WeightSpec::scalar(2.0));
        assert_eq!(load_weight_spec("0.25").unwrap(), WeightSpec::scalar(0.25));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.json");
        save_json(&p, &WeightSpec::abs(1.0, 2.0, 0.0)).unwrap();
        assert_eq!(load_weight_spec(p.to_str().unwrap()).unwrap(), WeightSpec::abs(1.0, 2.0, 0.0));
        assert!(matches!(load_weight_spec("/no/such/file.json"), Err(Error::Io(_))));
    }

    proptest! {
        #[test]
        fn any_finite_values_round_trip(vals in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 2..20)) {
            let g = make_grid(0.0, 3.0, vals.len()).unwrap();
            let s = Signal::new(g, vals).unwrap();
            let mut buf = Vec::new();
            write_signal_csv(&mut buf, &s, "value").unwrap();
            let back = read_signal_csv(buf.as_slice(), Some(g)).unwrap();
            for (a, b) in back.values().iter().zip(s.values()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
