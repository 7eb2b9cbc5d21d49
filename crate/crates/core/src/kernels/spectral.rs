//! Kernels rebuilt from the eigenbasis of the coupling matrix.
//!
//! If `V = U·diag(g)·Uᵀ` then `K = U·diag(K_{g_i})·Uᵀ` with `K_g` the
//! one-channel δ propagator. Stars (which include every two- and
//! three-level scheme) have closed-form eigenvectors; anything else goes
//! through a numerical symmetric eigensolver.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{single_delta_kernel, KernelMatrix, LaserSystem};
use crate::error::{Error, Result};

/// Orthonormal eigenpairs: `vectors.column(i)` has eigenvalue `values[i]`.
#[derive(Debug, Clone)]
pub struct Eigenbasis {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Eigenbasis {
    /// `U·diag(values)·Uᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.values.clone()));
        &self.vectors * d * self.vectors.transpose()
    }
}

/// Closed-form eigenbasis of a star at `hub`.
///
/// With `s = (V_i)/V_m` the unit spoke vector, the bright pair is
/// `(e_hub ± s)/√2` with eigenvalues `±V_m`; a Householder reflection that
/// maps one spoke axis onto `s` supplies the remaining `N−2` dark vectors.
pub fn star_eigenbasis(sys: &LaserSystem, hub: usize) -> Result<Eigenbasis> {
    sys.require_star(hub)?;
    let n = sys.n_levels();
    let v = sys.spokes(hub);
    let vm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if vm == 0.0 {
        return Ok(Eigenbasis { values: vec![0.0; n], vectors: DMatrix::identity(n, n) });
    }
    let s: Vec<f64> = v.iter().map(|a| a / vm).collect();
    let pivot = (0..n).find(|&i| i != hub).expect("n >= 2");
    let sign = if s[pivot] >= 0.0 { 1.0 } else { -1.0 };
    // w = s + sign·e_pivot; H = 1 − 2wwᵀ/|w|² sends e_pivot to −sign·s.
    let mut w = s.clone();
    w[pivot] += sign;
    let w2: f64 = w.iter().map(|a| a * a).sum();

    let mut vectors = DMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for (col, alpha) in [1.0, -1.0].into_iter().enumerate() {
        for i in 0..n {
            vectors[(i, col)] = if i == hub { r } else { alpha * r * s[i] };
        }
        values.push(alpha * vm);
    }
    let mut col = 2;
    for q in (0..n).filter(|&q| q != hub && q != pivot) {
        for i in 0..n {
            let e = if i == q { 1.0 } else { 0.0 };
            vectors[(i, col)] = e - 2.0 * w[i] * w[q] / w2;
        }
        values.push(0.0);
        col += 1;
    }
    Ok(Eigenbasis { values, vectors })
}

/// Numerical eigenbasis for an arbitrary symmetric coupling.
pub fn numeric_eigenbasis(sys: &LaserSystem) -> Eigenbasis {
    let e = SymmetricEigen::new(sys.coupling().clone());
    Eigenbasis { values: e.eigenvalues.iter().copied().collect(), vectors: e.eigenvectors }
}

/// `U·diag(K_{g_i}(x,t|x′,t′))·Uᵀ`.
pub fn spectral_kernel(
    sys: &LaserSystem,
    basis: &Eigenbasis,
    x: f64,
    t: f64,
    xp: f64,
    tp: f64,
) -> Result<KernelMatrix> {
    let n = sys.n_levels();
    if basis.vectors.nrows() != n || basis.values.len() != n {
        return Err(Error::InvalidParameter("eigenbasis size does not match the system".into()));
    }
    let channel: Vec<Complex64> = basis
        .values
        .iter()
        .map(|&g| single_delta_kernel(g, x, t, xp, tp, sys.xi(), sys.mass(), sys.hbar()))
        .collect::<Result<_>>()?;
    let u = &basis.vectors;
    let entries = DMatrix::from_fn(n, n, |a, b| {
        (0..n).map(|i| channel[i] * (u[(a, i)] * u[(b, i)])).sum::<Complex64>()
    });
    Ok(KernelMatrix { entries, x, xprime: xp, t, tprime: tp })
}

/// Propagator for any coupling matrix, via the numerical eigenbasis.
pub fn general_kernel(sys: &LaserSystem, x: f64, t: f64, xp: f64, tp: f64) -> Result<KernelMatrix> {
    spectral_kernel(sys, &numeric_eigenbasis(sys), x, t, xp, tp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_basis(sys: &LaserSystem, b: &Eigenbasis) {
        let n = sys.n_levels();
        let gram = b.vectors.transpose() * &b.vectors;
        assert!((gram - DMatrix::<f64>::identity(n, n)).amax() < 1e-14);
        assert!((b.reconstruct() - sys.coupling()).amax() < 1e-13);
    }

    #[test]
    fn star_basis_is_orthonormal_and_exact() {
        for spokes in [
            vec![0.0, 1.0],
            vec![0.5, 0.0, -2.0],
            vec![0.0, 1.0, -0.3, 2.0, 0.0, 0.7],
            vec![-1.0, 0.0, 0.0, 0.0],
        ] {
            let hub = spokes.iter().position(|&v| v == 0.0).unwrap();
            let sys = LaserSystem::star(hub, &spokes, 0.0).unwrap();
            assert_basis(&sys, &star_eigenbasis(&sys, hub).unwrap());
        }
    }

    #[test]
    fn numeric_basis_is_exact() {
        let v = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.5, 1.0, 0.0, 2.0, 0.5, 2.0, 0.0]);
        let sys = LaserSystem::new(v, 0.0).unwrap();
        assert_basis(&sys, &numeric_eigenbasis(&sys));
    }
}
