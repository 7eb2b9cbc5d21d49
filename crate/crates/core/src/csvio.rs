//! CSV output. Numbers use 17 significant digits in scientific notation so
//! identical runs give identical bytes.

use std::io::Write;

use crate::error::Result;
use crate::kernels::KernelMatrix;

pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// One row of the density schema.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityRow {
    pub x: f64,
    pub t: f64,
    pub rho_1: f64,
    pub rho_2: f64,
    pub rho_total: f64,
    pub rho_free: f64,
}

pub const DENSITY_HEADER: [&str; 6] = ["x", "t", "rho_1", "rho_2", "rho_total", "rho_free"];

pub fn write_densities<W: Write>(out: W, rows: &[DensityRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DENSITY_HEADER)?;
    for r in rows {
        w.write_record([r.x, r.t, r.rho_1, r.rho_2, r.rho_total, r.rho_free].map(fmt))?;
    }
    w.flush()?;
    Ok(())
}

/// Column names `x, xp, t, re_K_11, im_K_11, re_K_12, …` for `n` levels.
pub fn kernel_header(n: usize) -> Vec<String> {
    let mut h = vec!["x".to_string(), "xp".into(), "t".into()];
    for i in 1..=n {
        for k in 1..=n {
            h.push(format!("re_K_{i}{k}"));
            h.push(format!("im_K_{i}{k}"));
        }
    }
    h
}

/// Kernel matrices, one row each; `scale` multiplies the entries (unit
/// conversion of `1/length`) and `to_out` converts `(x, xp, t)`.
pub fn write_kernels<W: Write>(
    out: W,
    n: usize,
    rows: &[KernelMatrix],
    mut coords: impl FnMut(&KernelMatrix) -> Result<[f64; 3]>,
    scale: f64,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(kernel_header(n))?;
    for k in rows {
        let mut rec: Vec<String> = coords(k)?.iter().map(|v| fmt(*v)).collect();
        for i in 0..n {
            for j in 0..n {
                let e = k.get(i, j) * scale;
                rec.push(fmt(e.re));
                rec.push(fmt(e.im));
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// `(sigma, dt, l2_error)` rows of a convergence study.
pub fn write_convergence<W: Write>(out: W, rows: &[(f64, f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sigma", "dt", "l2_error"])?;
    for &(s, dt, e) in rows {
        w.write_record([s, dt, e].map(fmt))?;
    }
    w.flush()?;
    Ok(())
}

/// Generic table with a header, every cell a number.
pub fn write_table<W: Write>(out: W, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|v| fmt(*v)))?;
    }
    w.flush()?;
    Ok(())
}
