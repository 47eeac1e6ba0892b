//! Field snapshot CSV.
//!
//! ```text
//! # grid: dim,n,dx,origin,bc
//! index_0[,index_1],re,im
//! ```
//!
//! Multi-axis header entries are joined with `;`, e.g.
//! `# grid: 2,64;64,0.1;0.1,-3.2;-3.2,periodic;periodic`.
//! Values are written in shortest round-trip exponent form, so a write/read
//! cycle is lossless.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Axis, Boundary, ComplexField, Grid, C64};

pub fn grid_header(grid: &Grid) -> String {
    let join = |f: &dyn Fn(&Axis) -> String| {
        grid.axes().iter().map(f).collect::<Vec<_>>().join(";")
    };
    format!(
        "# grid: {},{},{},{},{}",
        grid.dim(),
        join(&|a| a.n.to_string()),
        join(&|a| a.dx.to_string()),
        join(&|a| a.origin.to_string()),
        join(&|a| a.bc.to_string()),
    )
}

pub fn field_to_csv(f: &ComplexField) -> String {
    let grid = f.grid();
    let mut s = grid_header(grid);
    s.push('\n');
    for (p, v) in f.values().iter().enumerate() {
        let idx = grid.unflatten(p);
        match grid.dim() {
            1 => writeln!(s, "{},{:e},{:e}", idx[0], v.re, v.im),
            _ => writeln!(s, "{},{},{:e},{:e}", idx[0], idx[1], v.re, v.im),
        }
        .expect("writing to a String cannot fail");
    }
    s
}

pub fn write_field_csv(path: &Path, f: &ComplexField) -> Result<()> {
    fs::write(path, field_to_csv(f)).map_err(|e| Error::io(path, e))
}

pub fn read_field_csv(path: &Path) -> Result<ComplexField> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_field_csv(&text).map_err(|message| Error::Parse {
        path: path.to_path_buf(),
        message,
    })
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> std::result::Result<Vec<T>, String> {
    s.split(';')
        .map(|x| x.trim().parse::<T>().map_err(|_| format!("bad {what} entry `{x}`")))
        .collect()
}

pub fn parse_field_csv(text: &str) -> std::result::Result<ComplexField, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    let spec = header
        .strip_prefix("# grid:")
        .ok_or("first line must be `# grid: dim,n,dx,origin,bc`")?;
    let parts: Vec<&str> = spec.trim().split(',').collect();
    if parts.len() != 5 {
        return Err(format!("grid header needs 5 fields, got {}", parts.len()));
    }
    let dim: usize = parts[0].trim().parse().map_err(|_| "bad dim")?;
    let n: Vec<usize> = parse_list(parts[1], "n")?;
    let dx: Vec<f64> = parse_list(parts[2], "dx")?;
    let origin: Vec<f64> = parse_list(parts[3], "origin")?;
    let bc: Vec<Boundary> = parts[4]
        .split(';')
        .map(|b| match b.trim() {
            "dirichlet" => Ok(Boundary::Dirichlet),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(format!("unknown boundary `{other}`")),
        })
        .collect::<std::result::Result<_, _>>()?;
    if [n.len(), dx.len(), origin.len(), bc.len()].iter().any(|&l| l != dim) {
        return Err("grid header lists do not match dim".into());
    }
    let axes = (0..dim)
        .map(|a| Axis::new(n[a], dx[a], origin[a], bc[a]))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    let grid = Arc::new(Grid::new(axes).map_err(|e| e.to_string())?);

    let mut values = vec![None; grid.len()];
    for (lineno, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != dim + 2 {
            return Err(format!("row {}: expected {} columns", lineno + 2, dim + 2));
        }
        let mut idx = [0usize; 2];
        for a in 0..dim {
            idx[a] = cols[a]
                .trim()
                .parse()
                .map_err(|_| format!("row {}: bad index", lineno + 2))?;
            if idx[a] >= n[a] {
                return Err(format!("row {}: index out of range", lineno + 2));
            }
        }
        let re: f64 = cols[dim].trim().parse().map_err(|_| format!("row {}: bad re", lineno + 2))?;
        let im: f64 = cols[dim + 1]
            .trim()
            .parse()
            .map_err(|_| format!("row {}: bad im", lineno + 2))?;
        values[grid.flatten(idx)] = Some(C64::new(re, im));
    }
    let values: Vec<C64> = values
        .into_iter()
        .enumerate()
        .map(|(p, v)| v.ok_or_else(|| format!("missing value for point {p}")))
        .collect::<std::result::Result<_, _>>()?;
    ComplexField::new(grid, values).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_format() {
        let g = Grid::line(Axis::new(5, 0.25, -0.5, Boundary::Dirichlet).unwrap());
        assert_eq!(grid_header(&g), "# grid: 1,5,0.25,-0.5,dirichlet");
        let a = Axis::new(4, 0.5, -1.0, Boundary::Periodic).unwrap();
        let g2 = Grid::plane(a, a);
        assert_eq!(grid_header(&g2), "# grid: 2,4;4,0.5;0.5,-1;-1,periodic;periodic");
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_field_csv("").is_err());
        assert!(parse_field_csv("0,1,2\n").is_err());
        let missing = "# grid: 1,4,1,0,periodic\n0,1,0\n1,1,0\n2,1,0\n";
        assert!(parse_field_csv(missing).unwrap_err().contains("missing"));
        let oob = "# grid: 1,4,1,0,periodic\n9,1,0\n";
        assert!(parse_field_csv(oob).is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_lossless(
            vals in proptest::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 12),
            dx in 1e-3f64..10.0,
            origin in -100f64..100.0,
            two_d in any::<bool>(),
        ) {
            let grid = if two_d {
                let a = Axis::new(4, dx, origin, Boundary::Periodic).unwrap();
                let b = Axis::new(3 + 1, dx * 2.0, -origin, Boundary::Dirichlet).unwrap();
                Grid::plane(a, b)
            } else {
                Grid::line(Axis::new(16, dx, origin, Boundary::Dirichlet).unwrap())
            };
            let grid = Arc::new(grid);
            let v: Vec<C64> = (0..grid.len()).map(|p| {
                let (re, im) = vals[p % vals.len()];
                C64::new(re, im)
            }).collect();
            let f = ComplexField::new(grid, v).unwrap();
            let back = parse_field_csv(&field_to_csv(&f)).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
