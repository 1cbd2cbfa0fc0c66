//! Output formats: CSV tables with units in the header, and the binary grid
//! format (one ASCII header line `rows cols x0 dx y0 dy`, then little-endian
//! f64 values row-major, row r at y = y0 + r·dy, column c at x = x0 + c·dx).

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::kernel::{Axis, Grid2D};
use crate::{Error, Result};

/// A real field on a uniform grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridData {
    pub rows: usize,
    pub cols: usize,
    pub x0: f64,
    pub dx: f64,
    pub y0: f64,
    pub dy: f64,
    pub values: Vec<f64>,
    /// Units of x, y and the values, written after the six numbers.
    pub units: [String; 3],
}

impl GridData {
    /// Field stored x-major (`index = i_x·n_y + i_y`, the layout of
    /// [`Grid2D`]), transposed so rows run along y.
    pub fn from_x_major(x: &Axis, y: &Axis, values: &[f64], units: [&str; 3]) -> Result<Self> {
        if values.len() != x.len * y.len {
            return Err(Error::Contract("grid data size mismatch".into()));
        }
        let mut out = vec![0.0; values.len()];
        for ix in 0..x.len {
            for iy in 0..y.len {
                out[iy * x.len + ix] = values[ix * y.len + iy];
            }
        }
        Ok(Self {
            rows: y.len,
            cols: x.len,
            x0: x.start,
            dx: x.step,
            y0: y.start,
            dy: y.step,
            values: out,
            units: units.map(String::from),
        })
    }

    /// Spectral mode on the signal grid (x = q_x, y = Ω).
    pub fn spectral(grid: &Grid2D, values: &[f64], value_unit: &str) -> Result<Self> {
        Self::from_x_major(&grid.qx, &grid.omega, values, ["1/um", "rad/fs", value_unit])
    }

    pub fn header(&self) -> String {
        format!(
            "{} {} {:e} {:e} {:e} {:e} # x[{}] y[{}] value[{}]",
            self.rows, self.cols, self.x0, self.dx, self.y0, self.dy, self.units[0], self.units[1], self.units[2]
        )
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.header().into_bytes();
        out.push(b'\n');
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    /// Long-format CSV: one `x,y,value` line per point.
    pub fn to_csv(&self) -> String {
        let mut s = format!("x [{}],y [{}],value [{}]\n", self.units[0], self.units[1], self.units[2]);
        for r in 0..self.rows {
            for c in 0..self.cols {
                s.push_str(&format!(
                    "{},{},{}\n",
                    fmt(self.x0 + c as f64 * self.dx),
                    fmt(self.y0 + r as f64 * self.dy),
                    fmt(self.values[r * self.cols + c])
                ));
            }
        }
        s
    }

    pub fn write_bin(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read_bin(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(fs::File::open(path)?);
        let mut line = String::new();
        r.read_line(&mut line)?;
        let (nums, units) = match line.split_once('#') {
            Some((a, b)) => (a, b),
            None => (line.as_str(), ""),
        };
        let t: Vec<&str> = nums.split_whitespace().collect();
        if t.len() != 6 {
            return Err(Error::Config(format!("bad grid header: {}", line.trim_end())));
        }
        let bad = |_| Error::Config(format!("bad grid header: {}", line.trim_end()));
        let rows: usize = t[0].parse().map_err(|_| bad(()))?;
        let cols: usize = t[1].parse().map_err(|_| bad(()))?;
        let f = |s: &str| s.parse::<f64>().map_err(|_| bad(()));
        let (x0, dx, y0, dy) = (f(t[2])?, f(t[3])?, f(t[4])?, f(t[5])?);
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        if buf.len() != rows * cols * 8 {
            return Err(Error::Config(format!(
                "grid payload has {} bytes, expected {}",
                buf.len(),
                rows * cols * 8
            )));
        }
        let values = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        // Units may contain spaces: take everything up to the closing bracket.
        let unit = |key: &str| {
            let open = format!("{key}[");
            units
                .split_once(&open)
                .and_then(|(before, rest)| {
                    (before.is_empty() || before.ends_with(' ')).then(|| rest.split_once(']').map(|(u, _)| u))
                })
                .flatten()
                .unwrap_or("")
                .to_string()
        };
        Ok(Self {
            rows,
            cols,
            x0,
            dx,
            y0,
            dy,
            values,
            units: [unit("x"), unit("y"), unit("value")],
        })
    }
}

/// Fixed-format float for tables.
pub fn fmt(v: f64) -> String {
    format!("{v:.10e}")
}

/// A CSV table; every column name carries its unit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path)?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_format() {
        let g = GridData {
            rows: 2,
            cols: 3,
            x0: 0.5,
            dx: 0.25,
            y0: -1.0,
            dy: 1.0,
            values: vec![0.0; 6],
            units: ["um".into(), "fs".into(), "1".into()],
        };
        assert_eq!(g.header(), "2 3 5e-1 2.5e-1 -1e0 1e0 # x[um] y[fs] value[1]");
        assert_eq!(g.to_bytes().len(), g.header().len() + 1 + 48);
        assert!(g.to_csv().starts_with("x [um],y [fs],value [1]\n"));
    }

    #[test]
    fn transposes_x_major_data() {
        let x = Axis { start: 0.0, step: 1.0, len: 2 };
        let y = Axis { start: 0.0, step: 1.0, len: 3 };
        let g = GridData::from_x_major(&x, &y, &[0.0, 1.0, 2.0, 10.0, 11.0, 12.0], ["a", "b", "c"]).unwrap();
        assert_eq!(g.values, vec![0.0, 10.0, 1.0, 11.0, 2.0, 12.0]);
    }

    #[test]
    fn rejects_truncated_payload() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.bin");
        fs::write(&p, b"2 2 0 1 0 1\n\x00\x00").unwrap();
        assert!(GridData::read_bin(&p).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn binary_round_trip(values in proptest::collection::vec(-1e6f64..1e6, 12), x0 in -10.0f64..10.0, dy in 0.001f64..5.0) {
            let g = GridData { rows: 3, cols: 4, x0, dx: 0.1, y0: -2.0, dy, values, units: ["um".into(), "fs".into(), "um^1/2 fs^1/2".into()] };
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("g.bin");
            g.write_bin(&p).unwrap();
            let back = GridData::read_bin(&p).unwrap();
            prop_assert_eq!(back, g);
        }
    }
}
