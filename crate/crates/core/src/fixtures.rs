//! Golden-value fixtures stored as CSV next to the crate.
//!
//! The directory defaults to `fixtures/` under the crate root and can be
//! overridden with `DELTAPROP_FIXTURES`.

use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ENV_VAR: &str = "DELTAPROP_FIXTURES";

pub fn dir() -> PathBuf {
    match std::env::var_os(ENV_VAR) {
        Some(p) => PathBuf::from(p),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"),
    }
}

fn read_rows(name: &str, columns: &[&str]) -> Result<Vec<Vec<f64>>> {
    let path = dir().join(name);
    let mut rdr = csv::Reader::from_path(&path)
        .map_err(|e| Error::Io(format!("missing fixture {}: {e}", path.display())))?;
    let header = rdr.headers()?.clone();
    if header.iter().ne(columns.iter().copied()) {
        return Err(Error::Io(format!(
            "fixture {} has columns {:?}, expected {:?}",
            path.display(),
            header.iter().collect::<Vec<_>>(),
            columns
        )));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Io(format!("{}: bad number {s:?}: {e}", path.display())))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// `(z, w(z))` pairs on the 41×41 grid over `[-6, 6]²`.
pub fn faddeyeva_grid() -> Result<Vec<(Complex64, Complex64)>> {
    Ok(read_rows("faddeyeva_grid.csv", &["re_z", "im_z", "re_w", "im_w"])?
        .into_iter()
        .map(|r| (Complex64::new(r[0], r[1]), Complex64::new(r[2], r[3])))
        .collect())
}

/// One golden Moshinsky value.
#[derive(Debug, Clone, Copy)]
pub struct MoshinskyRow {
    pub x: f64,
    pub k: Complex64,
    pub tau: f64,
    pub m: Complex64,
}

pub fn moshinsky_values() -> Result<Vec<MoshinskyRow>> {
    Ok(read_rows("moshinsky.csv", &["x", "re_k", "im_k", "tau", "re_m", "im_m"])?
        .into_iter()
        .map(|r| MoshinskyRow {
            x: r[0],
            k: Complex64::new(r[1], r[2]),
            tau: r[3],
            m: Complex64::new(r[4], r[5]),
        })
        .collect())
}

/// Named scalar from `units.csv`.
pub fn unit_value(name: &str) -> Result<f64> {
    let path = dir().join("units.csv");
    let mut rdr = csv::Reader::from_path(&path)
        .map_err(|e| Error::Io(format!("missing fixture {}: {e}", path.display())))?;
    for rec in rdr.records() {
        let rec = rec?;
        if rec.get(0) == Some(name) {
            let v = rec.get(1).unwrap_or("");
            return v
                .trim()
                .parse()
                .map_err(|e| Error::Io(format!("{}: bad number {v:?}: {e}", path.display())));
        }
    }
    Err(Error::Io(format!("{} has no entry `{name}`", path.display())))
}
