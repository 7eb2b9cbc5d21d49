//! Acceptance criteria. One line per criterion; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use deltaprop::commands::{oracle_preset, OraclePreset};
use deltaprop::figures::{
    diffraction_length, fig3_front, fig4_deviation, fig5_early_excitation, fig6_fringes,
    fig6_mirror_deviation, figure_rows, write_figure, Figure, VELOCITY,
};
use deltaprop::oracle::certify;
use deltaprop::verify::{self, SpectralCase, QUARTER_COUPLINGS};
use deltaprop::Result;

const QUARTER_TOL: f64 = 1e-12;
const QUARTER_TIME: Duration = Duration::from_secs(1);
const SPECTRAL_TOL: f64 = 1e-12;
const SPECTRAL_POINTS: usize = 100;
const SPECTRAL_TIME: Duration = Duration::from_secs(10);
const ORACLE_TIME: Duration = Duration::from_secs(600);
const STRONG_TOL: f64 = 1e-4;
const STRONG_POINTS: usize = 50;
const STRONG_TIME: Duration = Duration::from_secs(5);
const FADDEYEVA_TOL: f64 = 1e-12;
const PRIMITIVE_TOL: f64 = 1e-10;
const PRIMITIVE_DRAWS: usize = 50;
const SPECFUN_TIME: Duration = Duration::from_secs(30);
/// Front within two diffraction lengths of `vt`.
const FRONT_WIDTHS: f64 = 2.0;
const INTERFERENCE_MIN: f64 = 0.1;
const EARLY_EXCITATION_MAX: f64 = 1e-4;
/// "Before arrival" is taken as `t ≤ ξ/(2v)`.
const EARLY_FRACTION: f64 = 0.5;
const FRINGES_MIN: usize = 3;

struct Outcome {
    pass: bool,
    detail: String,
}

fn timed(f: impl FnOnce() -> Result<Outcome>) -> (Outcome, Duration) {
    let start = Instant::now();
    let out = f().unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}") });
    (out, start.elapsed())
}

fn quarter() -> Result<Outcome> {
    let d = verify::quarter_point_deviation()?;
    Ok(Outcome {
        pass: d <= QUARTER_TOL,
        detail: format!("max |P - 1/4| = {d:.2e} over {} couplings (tol {QUARTER_TOL:.0e})", QUARTER_COUPLINGS.len()),
    })
}

fn spectral() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut name = String::new();
    for (i, case) in SpectralCase::ALL.iter().enumerate() {
        let e = verify::spectral_equivalence_error(*case, SPECTRAL_POINTS, 1000 + i as u64)?;
        if e >= worst {
            worst = e;
            name = case.name();
        }
    }
    Ok(Outcome {
        pass: worst <= SPECTRAL_TOL,
        detail: format!(
            "worst relative deviation {worst:.2e} ({name}), {SPECTRAL_POINTS} points x {} configurations (tol {SPECTRAL_TOL:.0e})",
            SpectralCase::ALL.len()
        ),
    })
}

fn oracle() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [OraclePreset::Fig3, OraclePreset::Fig6] {
        let (scenario, opts) = oracle_preset(p)?;
        let c = certify(&scenario, &opts)?;
        pass &= c.passed();
        let per: Vec<String> = c.runs.iter().map(|r| format!("{:.3}/{:.3}", r.errors[0], r.errors[1])).collect();
        parts.push(format!(
            "{p:?}: extrapolated rho_1 {:.2e} rho_2 {:.2e}, monotone {} (8h,4h,2h: {})",
            c.extrapolated[0],
            c.extrapolated[1],
            c.monotone(),
            per.join(", ")
        ));
    }
    Ok(Outcome { pass, detail: format!("{} (tol 2%)", parts.join("; ")) })
}

fn strong() -> Result<Outcome> {
    let [a, b, c] = verify::strong_limit_errors(STRONG_POINTS, 4)?;
    Ok(Outcome {
        pass: a.max(b).max(c) <= STRONG_TOL,
        detail: format!("single {a:.2e}, one spoke {b:.2e}, two spokes {c:.2e} (tol {STRONG_TOL:.0e})"),
    })
}

fn specfun() -> Result<Outcome> {
    let grid = verify::faddeyeva_grid_points();
    let w = verify::faddeyeva_contour_error(&grid)?;
    let p = verify::primitive_error(PRIMITIVE_DRAWS, 28)?;
    Ok(Outcome {
        pass: w <= FADDEYEVA_TOL && p <= PRIMITIVE_TOL,
        detail: format!(
            "w vs contour {w:.2e} on {} points (tol {FADDEYEVA_TOL:.0e}); primitive {p:.2e} on {PRIMITIVE_DRAWS} draws (tol {PRIMITIVE_TOL:.0e})",
            grid.len()
        ),
    })
}

fn invariants() -> Result<Outcome> {
    let checks = verify::run(verify::Suite::All)?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.test).collect();
    let wanted = [
        "exchange_symmetry",
        "direct_sum_decoupling",
        "short_time_identity_limit",
        "packet_norm_conservation",
        "delta_jump_condition",
    ];
    let present = wanted.iter().all(|w| checks.iter().any(|c| c.test == *w));
    Ok(Outcome {
        pass: failed.is_empty() && present,
        detail: if failed.is_empty() {
            format!("verify all: {} checks green", checks.len())
        } else {
            format!("verify all: failing {}", failed.join(", "))
        },
    })
}

fn figures() -> Result<Outcome> {
    let r3 = figure_rows(Figure::Fig3)?;
    let (front, vt) = fig3_front(&r3)?;
    let t3 = Figure::Fig3.time().unwrap_or_default();
    let tol3 = FRONT_WIDTHS * diffraction_length(t3);
    let ok3 = (front - vt).abs() <= tol3;

    let dev4 = fig4_deviation(&figure_rows(Figure::Fig4)?);
    let ok4 = dev4 > INTERFERENCE_MIN;

    let t_early = EARLY_FRACTION * Figure::Fig5.xi() / VELOCITY;
    let e5 = fig5_early_excitation(&figure_rows(Figure::Fig5)?, t_early);
    let ok5 = e5 < EARLY_EXCITATION_MAX;

    let r6 = figure_rows(Figure::Fig6)?;
    let n6 = fig6_fringes(&r6);
    let (mirror, refl) = fig6_mirror_deviation(&r6)?;
    let ok6 = n6 >= FRINGES_MIN;

    let mut stable = true;
    for f in Figure::ALL {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        write_figure(f, &mut a)?;
        write_figure(f, &mut b)?;
        stable &= a == b;
    }
    let mark = |b: bool| if b { "ok" } else { "FAIL" };
    Ok(Outcome {
        pass: ok3 && ok4 && ok5 && ok6 && stable,
        detail: format!(
            "fig3 front {:.2} um vs vt {:.2} um (tol {:.2} um) {}; fig4 deviation {dev4:.3} (> {INTERFERENCE_MIN}) {}; \
             fig5 early rho_2 {e5:.2e} of peak for t <= {:.0} ms (< {EARLY_EXCITATION_MAX:.0e}) {}; \
             fig6 {n6} fringes (>= {FRINGES_MIN}) {} [reflected side = {refl:.4} x mirrored free packet, L2 {mirror:.1e}]; \
             byte-stable {}",
            front * 1e6,
            vt * 1e6,
            tol3 * 1e6,
            mark(ok3),
            mark(ok4),
            t_early * 1e3,
            mark(ok5),
            mark(ok6),
            mark(stable)
        ),
    })
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Result<Outcome>, Option<Duration>);
    let criteria: [Criterion; 7] = [
        ("quarter-probability point", quarter, Some(QUARTER_TIME)),
        ("spectral-oracle equivalence", spectral, Some(SPECTRAL_TIME)),
        ("TDSE-oracle certification", oracle, Some(ORACLE_TIME)),
        ("strong-laser limits", strong, Some(STRONG_TIME)),
        ("special-function certification", specfun, Some(SPECFUN_TIME)),
        ("invariant suite", invariants, None),
        ("figure features", figures, None),
    ];
    let mut all = true;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let (out, took) = timed(f);
        let in_time = budget.is_none_or(|b| took <= b);
        let pass = out.pass && in_time;
        all &= pass;
        let budget = budget.map_or(String::new(), |b| format!(" / {:.0} s", b.as_secs_f64()));
        println!(
            "criterion {} {name}: {} [{:.2} s{budget}] {}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            out.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
