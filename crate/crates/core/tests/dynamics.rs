use std::f64::consts::{FRAC_PI_4, PI};

use deltaprop::dynamics::*;
use deltaprop::kernels::{free_kernel, two_level_kernel, LaserSystem};
use deltaprop::oracle::{quadrature_propagate, Grid, GridState};
use deltaprop::quadrature::{integrate, romberg_simpson};
use deltaprop::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn shutter(k: f64, v0: f64, xi: f64) -> ShutterScenario {
    ShutterScenario::new(k, LaserSystem::two_level(v0, xi).unwrap()).unwrap()
}

fn packet(v0: f64) -> SinePacketScenario {
    SinePacketScenario::new(2.0, 1, 5.0, LaserSystem::two_level(v0, 4.0).unwrap()).unwrap()
}

/// `∫_{-∞}^{0} K₀(x−x′, t)·e^{ikx′} dx′`: real segment `[−a, 0]` plus the
/// tail, with `x − x′` moved onto the ray `x + a + s·e^{iπ/4}` where the
/// free-kernel Gaussian decays.
fn shutter_by_quadrature(x: f64, t: f64, k: f64) -> Complex64 {
    let a = 20.0;
    let seg = integrate(
        |xp| free_kernel(x, t, xp, 0.0, 1.0, 1.0).unwrap() * Complex64::from_polar(1.0, k * xp),
        -a,
        0.0,
        &[x - k * t],
        1e-13,
        1e-15,
    )
    .unwrap()
    .value;
    let dir = Complex64::from_polar(1.0, FRAC_PI_4);
    let pref = Complex64::from_polar((1.0 / (2.0 * PI * t)).sqrt(), -FRAC_PI_4);
    let tail = integrate(
        |s| {
            let w = x + a + s * dir;
            let xp = x - w;
            pref * (Complex64::i() * w * w / (2.0 * t) + Complex64::i() * k * xp).exp() * dir
        },
        0.0,
        (40.0 * t).sqrt() + 2.0 * k * t,
        &[],
        1e-13,
        1e-15,
    )
    .unwrap()
    .value;
    seg + tail
}

#[test]
fn free_shutter_matches_quadrature() {
    let sc = shutter(1.5, 0.0, 1.0);
    for &(x, t) in &[(-1.0, 0.5), (0.0, 1.0), (2.0, 1.0), (3.7, 2.5), (-4.0, 3.0)] {
        let exact = shutter_free(x, t, &sc).unwrap()[0];
        let quad = shutter_by_quadrature(x, t, 1.5);
        assert!((exact - quad).norm() <= 1e-6, "x={x} t={t}: {exact} vs {quad}");
    }
}

#[test]
fn free_shutter_tends_to_the_plane_wave() {
    let sc = shutter(1.0, 0.0, 1.0);
    let t = 1e4;
    for x in [-50.0, 0.0, 100.0, 1000.0] {
        let rho = shutter_free(x, t, &sc).unwrap()[0].norm_sqr();
        assert!((rho - 1.0).abs() <= 1e-2, "x={x}: {rho}");
    }
}

#[test]
fn transmitted_channels_balance_at_the_quarter_point() {
    let k = 1.0;
    let sc = shutter(k, k, 2.0);
    let t = 1e4;
    for x in [50.0, 500.0, 2000.0] {
        let psi = shutter_with_laser(x, t, &sc).unwrap();
        let (r1, r2) = (psi[0].norm_sqr(), psi[1].norm_sqr());
        assert!((r2 / r1 - 1.0).abs() <= 1e-2, "x={x}: {r1} {r2}");
        assert!((r1 - 0.25).abs() <= 1e-2);
    }
}

#[test]
fn free_packet_matches_quadrature() {
    let sc = packet(0.0);
    for &(x, t) in &[(-1.0, 0.3), (0.5, 0.3), (1.0, 1.0), (4.0, 1.0), (9.0, 2.0)] {
        let exact = sine_packet_free(x, t, &sc).unwrap()[0];
        let quad = integrate(
            |xp| free_kernel(x, t, xp, 0.0, 1.0, 1.0).unwrap() * sc.initial(xp),
            0.0,
            sc.length,
            &[],
            1e-13,
            1e-15,
        )
        .unwrap()
        .value;
        assert!((exact - quad).norm() <= 1e-8, "x={x} t={t}: {exact} vs {quad}");
    }
}

#[test]
fn free_packet_short_time_limit() {
    // τ n²π²/L² = 1e-6 and a second, ten times larger time: the error must
    // drop as τ does.
    let sc = packet(0.0);
    let grid = Grid::new(-1.0, 3.0, 4001).unwrap();
    let err = |tau: f64| {
        let s: f64 = grid
            .points()
            .iter()
            .map(|&x| (sine_packet_free(x, tau, &sc).unwrap()[0] - sc.initial(x)).norm_sqr())
            .sum();
        (s * grid.spacing()).sqrt()
    };
    let tau1 = 1e-6 * sc.length.powi(2) / PI.powi(2);
    let (e1, e2) = (err(tau1), err(10.0 * tau1));
    assert!(e1 <= 1e-3, "{e1}");
    assert!(e2 > 2.0 * e1, "{e1} {e2}");
}

fn simpson_norm(f: impl Fn(f64) -> Spinor, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / (4 * n) as f64;
    let s: Vec<Complex64> = (0..=4 * n)
        .map(|j| {
            let p = f(a + j as f64 * h);
            Complex64::new(p[0].norm_sqr() + p[1].norm_sqr(), 0.0)
        })
        .collect();
    romberg_simpson(&s, h).unwrap().value.re
}

#[test]
fn packet_norm_is_conserved() {
    for v0 in [0.0, 5.0, 2.0] {
        let sc = packet(v0);
        let norm = simpson_norm(|x| sine_packet_with_laser(x, 0.2, &sc).unwrap(), -40.0, 40.0, 5000);
        assert!((norm - 1.0).abs() <= 1e-6, "V0={v0}: {norm}");
    }
}

#[test]
fn laser_packet_matches_kernel_quadrature() {
    let sc = packet(5.0);
    let t = 0.6;
    let support = Grid::new(0.0, sc.length, 801).unwrap();
    let init = GridState::sample(support, 0.0, |x| vec![sc.initial(x), ZERO]).unwrap();
    let targets = Grid::new(-2.0, 10.0, 49).unwrap();
    let out = quadrature_propagate(|x, xp| two_level_kernel(&sc.sys, x, t, xp, 0.0), &init, targets, t, 1e-7).unwrap();
    for (j, x) in targets.points().into_iter().enumerate() {
        let exact = sine_packet_with_laser(x, t, &sc).unwrap();
        for c in 0..2 {
            assert!((exact[c] - out.psi[j][c]).norm() <= 1e-6, "x={x} c={c}: {} vs {}", exact[c], out.psi[j][c]);
        }
    }
}

#[test]
fn shutter_with_laser_matches_kernel_quadrature() {
    // A finite beam segment e^{ikx}χ_[−a,0] is the difference of the shutter
    // at 0 and the same shutter shifted to −a (laser at ξ + a in its frame),
    // and its evolution is a compact quadrature of the two-level kernel.
    let (k, v0, xi, a) = (1.2, 0.8, 1.5, 6.0);
    let here = shutter(k, v0, xi);
    let shifted = shutter(k, v0, xi + a);
    let t = 1.0;
    let support = Grid::new(-a, 0.0, 2401).unwrap();
    let init = GridState::sample(support, 0.0, |x| vec![Complex64::from_polar(1.0, k * x), ZERO]).unwrap();
    let targets = Grid::new(-3.0, 5.0, 17).unwrap();
    let out = quadrature_propagate(|x, xp| two_level_kernel(&here.sys, x, t, xp, 0.0), &init, targets, t, 1e-7).unwrap();
    let phase = Complex64::from_polar(1.0, -k * a);
    for (j, x) in targets.points().into_iter().enumerate() {
        let p = shutter_with_laser(x, t, &here).unwrap();
        let q = shutter_with_laser(x + a, t, &shifted).unwrap();
        for c in 0..2 {
            let exact = p[c] - phase * q[c];
            assert!((exact - out.psi[j][c]).norm() <= 1e-6, "x={x} c={c}: {exact} vs {}", out.psi[j][c]);
        }
    }
}

/// Richardson-extrapolated residual of `i∂_τψ + ½∂²ψ` relative to `|ψ|`.
fn tdse_residual(f: impl Fn(f64, f64) -> Spinor, x: f64, t: f64) -> f64 {
    let resid = |h: f64| -> [Complex64; 2] {
        let (a, b, c, d, e) = (f(x, t + h), f(x, t - h), f(x + h, t), f(x, t), f(x - h, t));
        let mut r = [ZERO; 2];
        for ch in 0..2 {
            r[ch] = Complex64::i() * (a[ch] - b[ch]) / (2.0 * h) + 0.5 * (c[ch] - 2.0 * d[ch] + e[ch]) / (h * h);
        }
        r
    };
    let (r1, r2) = (resid(2e-3), resid(1e-3));
    let psi = f(x, t);
    let scale = (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
    (0..2).map(|c| ((4.0 * r2[c] - r1[c]) / 3.0).norm()).fold(0.0, f64::max) / scale
}

#[test]
fn closed_forms_solve_the_schrodinger_equation_off_the_laser() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sc = shutter(1.0, 1.0, 2.0);
    let pk = packet(5.0);
    for _ in 0..20 {
        let mut x = rng.gen_range(-3.0..8.0);
        if (x - 2.0f64).abs() < 0.05 {
            x += 0.1;
        }
        let t = rng.gen_range(0.5..3.0);
        let r = tdse_residual(|x, t| shutter_with_laser(x, t, &sc).unwrap(), x, t);
        assert!(r <= 1e-4, "shutter x={x} t={t}: {r}");
        let mut y = rng.gen_range(-2.0..10.0);
        if (y - 4.0f64).abs() < 0.05 {
            y += 0.1;
        }
        let r = tdse_residual(|x, t| sine_packet_with_laser(x, t, &pk).unwrap(), y, t);
        assert!(r <= 1e-4, "packet x={y} t={t}: {r}");
    }
}

/// Fourth-order one-sided derivative.
fn one_sided(f: &impl Fn(f64) -> Spinor, x: f64, h: f64, c: usize) -> Complex64 {
    let v = |j: f64| f(x + j * h)[c];
    (-25.0 * v(0.0) + 48.0 * v(1.0) - 36.0 * v(2.0) + 16.0 * v(3.0) - 3.0 * v(4.0)) / (12.0 * h)
}

#[test]
fn closed_forms_satisfy_the_jump_condition() {
    let v0 = 0.9;
    let sc = shutter(1.1, v0, 2.0);
    let pk = packet(v0);
    let h = 1e-3;
    for t in [0.7, 1.5, 3.0] {
        for (xi, f) in [
            (2.0, Box::new(|x: f64| shutter_with_laser(x, t, &sc).unwrap()) as Box<dyn Fn(f64) -> Spinor>),
            (4.0, Box::new(|x: f64| sine_packet_with_laser(x, t, &pk).unwrap())),
        ] {
            let psi = f(xi);
            // V·ψ swaps the channels.
            let vpsi = [v0 * psi[1], v0 * psi[0]];
            for c in 0..2 {
                let jump = one_sided(&f, xi, h, c) - one_sided(&f, xi, -h, c);
                let want = 2.0 * vpsi[c];
                assert!((jump - want).norm() <= 1e-4 * want.norm().max(1e-2), "t={t} c={c}: {jump} vs {want}");
            }
        }
    }
}

#[test]
fn unitarity_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let k = 10f64.powf(rng.gen_range(-3.0..3.0));
        let v0 = 10f64.powf(rng.gen_range(-3.0..3.0));
        let s = stationary_scattering(k, v0).unwrap();
        assert!((s.total() - 1.0).abs() <= 1e-12);
    }
    let tiny = stationary_scattering(1e-8, 1.0).unwrap();
    assert!(tiny.t1 + tiny.t2 < 1e-15);
}

#[test]
fn excited_reflection_peaks_at_the_quarter_point() {
    let v0 = 2.0;
    let ks: Vec<f64> = (1..4000).map(|j| j as f64 * 0.001).collect();
    let best = ks
        .iter()
        .copied()
        .max_by(|a, b| {
            let ra = stationary_scattering(*a, v0).unwrap().r2;
            let rb = stationary_scattering(*b, v0).unwrap().r2;
            ra.total_cmp(&rb)
        })
        .unwrap();
    assert!((best - v0).abs() <= 0.001, "{best}");
}

#[test]
fn units_enter_only_through_m_over_hbar_squared() {
    let sys = LaserSystem::two_level(0.3, 1.0).unwrap().with_units(2.0, 0.5).unwrap();
    let s = stationary_scattering_for(4.8, &sys).unwrap();
    let r = stationary_scattering(4.8, 0.3 * 2.0 / 0.25).unwrap();
    assert_eq!(s, r);
}

proptest! {
    #[test]
    fn prop_scattering_unitarity(k in 1e-4f64..1e4, v0 in 0.0f64..1e4) {
        let s = stationary_scattering(k, v0).unwrap();
        prop_assert!((s.total() - 1.0).abs() <= 1e-12);
        for p in [s.r1, s.r2, s.t1, s.t2] {
            prop_assert!((0.0..=1.0 + 1e-15).contains(&p));
        }
    }

    #[test]
    fn prop_uncoupled_excited_channel_is_empty(x in -5.0f64..10.0, t in 0.01f64..10.0) {
        let sc = shutter(1.0, 0.0, 2.0);
        prop_assert_eq!(shutter_with_laser(x, t, &sc).unwrap()[1], ZERO);
        let pk = packet(0.0);
        prop_assert_eq!(sine_packet_with_laser(x, t, &pk).unwrap()[1], ZERO);
    }
}
