use super::grid::{Grid, GridState};
use crate::error::{Error, Result};
use crate::kernels::KernelMatrix;
use crate::quadrature::romberg_simpson;

/// `Ψ(x, t) = ∫ K(x,t|x′,0)·Ψ(x′,0) dx′` by Richardson-corrected Simpson
/// over the support grid of the initial state.
///
/// `kernel(x, x′)` evaluates the propagator at the target time. The initial
/// grid must have `4m + 1` points and cover the whole support. Each target
/// value's Simpson error estimate (fine vs coarse sum) must stay below
/// `tol·max(1, |Ψ|)`.
pub fn quadrature_propagate(
    kernel: impl Fn(f64, f64) -> Result<KernelMatrix>,
    initial: &GridState,
    targets: Grid,
    t: f64,
    tol: f64,
) -> Result<GridState> {
    let xs0 = initial.grid.points();
    let h = initial.grid.spacing();
    let n = initial.n_levels();
    let mut out = Vec::with_capacity(targets.n_points);
    for x in targets.points() {
        let mut samples = vec![Vec::with_capacity(xs0.len()); n];
        for (j, &xp) in xs0.iter().enumerate() {
            let k = kernel(x, xp)?;
            if k.n() != n {
                return Err(Error::InvalidParameter(format!(
                    "kernel has {} levels, state has {n}",
                    k.n()
                )));
            }
            for (c, s) in k.apply(&initial.psi[j]).into_iter().enumerate() {
                samples[c].push(s);
            }
        }
        let mut value = Vec::with_capacity(n);
        for s in &samples {
            let r = romberg_simpson(s, h)?;
            if r.error > tol * r.value.norm().max(1.0) {
                return Err(Error::Quadrature(format!(
                    "at x = {x}: error estimate {:.3e} exceeds {tol:.1e}; refine the initial grid",
                    r.error
                )));
            }
            value.push(r.value);
        }
        out.push(value);
    }
    GridState::new(targets, out, t)
}
