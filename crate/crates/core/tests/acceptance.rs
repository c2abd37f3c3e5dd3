//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any line is FAIL.

use std::f64::consts::PI;

use framelab::coherent_states::{
    admissibility_eps, admissibility_eps_quadrature, admissibility_heisenberg,
    resolution_identity_residual, CsFamily, PhaseWindow,
};
use framelab::frames::*;
use framelab::groups::{g_eps_mul, h_mul, p_eps, p_eps_inv, EAElement, HeisenbergElement};
use framelab::representations::{
    affine_closed_form, contraction_residual, pi_eps_apply, t_eps_norm_pair, EARepParams,
    HeisRepParams, Schedule,
};
use framelab::signals::{band_limited, rational_analytic, time_localized};
use framelab::{Grid, SampledSignal, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TIGHT_TOL: f64 = 5e-3;
const EPS_LIST: [f64; 5] = [0.0, 1e-3, 0.25, 0.5, 1.0];
const SEEDS: u64 = 10;
const RECON_TOL: f64 = 1e-3;
const ATOM_DIST_TOL: f64 = 2e-3;
const RATE_BAND: (f64, f64) = (1.8, 2.2);
const REP_RESIDUAL_TOL: f64 = 1e-2;
const ROUNDTRIP_TOL: f64 = 1e-12;
const ADMISSIBILITY_REL_TOL: f64 = 1e-6;
const ADMISSIBILITY_LIMIT_TOL: f64 = 1e-4;
const PI1_TOL: f64 = 1e-6;
const ISOMETRY_TOL: f64 = 1e-8;
const RESOLUTION_TOL: f64 = 2e-2;
const ROUTE_TOL: f64 = 1e-6;

struct Outcome {
    pass: bool,
    detail: String,
}

type Case = (&'static str, fn(f64) -> C64, f64);
type Check = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn wavelet(count: usize) -> MotherWavelet {
    build_mother_wavelet(PI, PI, 1.0, Grid::spanning(-PI, PI, count).unwrap()).unwrap()
}

fn in_band(r: f64) -> bool {
    (RATE_BAND.0..=RATE_BAND.1).contains(&r)
}

fn tightness(kind: Kind) -> Outcome {
    let (grid, mw) = match kind {
        Kind::Time => (Grid::spanning(-PI, PI, 8192).unwrap(), wavelet(8192)),
        Kind::Frequency => (Grid::centered(8192, 0.1).unwrap(), wavelet(4096)),
    };
    let mut worst: f64 = 0.0;
    let mut consts = Vec::new();
    for &eps in &EPS_LIST {
        let cfg = FrameConfig::default().with_eps(eps).unwrap();
        consts.push(frame_constant(&cfg));
        for seed in 0..SEEDS {
            let f = match kind {
                Kind::Time => time_localized(seed, grid, -PI, PI, 4).unwrap(),
                Kind::Frequency => band_limited(seed, grid, PI, 3).unwrap(),
            };
            let t = analyze_auto(&cfg, &mw, kind, &f, &AutoWindowRule::default()).unwrap();
            worst = worst.max(tightness_ratio(&t, &f).unwrap().relative_deviation.abs());
        }
    }
    let consts_ok = (consts[0] - 2.0 * PI).abs() < 1e-12 && (consts[4] - 2.0 * PI.sinh()).abs() < 1e-12;
    outcome(
        worst <= TIGHT_TOL && consts_ok,
        format!(
            "max |ratio/C - 1| = {worst:.2e} (tol {TIGHT_TOL:.1e}) over {SEEDS} seeds x {} eps; C(0) = {:.5}, C(1) = {:.4}",
            EPS_LIST.len(),
            consts[0],
            consts[4]
        ),
    )
}

fn reconstruction() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for kind in [Kind::Time, Kind::Frequency] {
        let (grid, mw) = match kind {
            Kind::Time => (Grid::spanning(-PI, PI, 8192).unwrap(), wavelet(8192)),
            Kind::Frequency => (Grid::centered(8192, 0.1).unwrap(), wavelet(4096)),
        };
        for eps in [0.0, 1.0] {
            let cfg = FrameConfig::default().with_eps(eps).unwrap();
            let f = match kind {
                Kind::Time => time_localized(11, grid, -PI, PI, 4).unwrap(),
                Kind::Frequency => band_limited(11, grid, PI, 3).unwrap(),
            };
            let t = analyze_auto(&cfg, &mw, kind, &f, &AutoWindowRule::default()).unwrap();
            let e = reconstruction_error(&cfg, &mw, &t, &f).unwrap();
            parts.push(format!("{kind}/eps={eps}: {e:.1e}"));
            worst = worst.max(e);
        }
    }
    outcome(worst <= RECON_TOL, format!("{} (tol {RECON_TOL:.0e})", parts.join(", ")))
}

fn atom_contraction() -> Outcome {
    let mw = wavelet(4096);
    let cfg = FrameConfig::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, m) in [(0, 1), (1, 1), (-1, 2)] {
        let idx = AtomIndex::new(n, m);
        for kind in [Kind::Time, Kind::Frequency] {
            let grid = match kind {
                Kind::Time => atom_grid(&mw, n, 1e-3).unwrap(),
                Kind::Frequency => freq_atom_grid(&mw, n, 8192).unwrap(),
            };
            let r = atom_contraction_report(&cfg, &mw, kind, idx, &[1e-3, 5e-4], &grid).unwrap();
            let rate = r[0].distance / r[1].distance;
            pass &= r[0].distance <= ATOM_DIST_TOL && in_band(rate);
            parts.push(format!("{kind}({n},{m}) d={:.2e} rate={rate:.3}", r[0].distance));
        }
    }
    outcome(pass, format!("{} (d tol {ATOM_DIST_TOL:.0e} at eps=1e-3)", parts.join(", ")))
}

fn representation_contraction() -> Outcome {
    let s = Schedule::new(1.0, 0.5, 0.2, 0.3).unwrap();
    let grid = Grid::spanning(-10.0, 10.0, 4096).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut rates = Vec::new();
    for seed in 0..5 {
        let g = HeisenbergElement::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let f = time_localized(seed, grid, -3.0, 3.0, 3).unwrap();
        let r1 = contraction_residual(&s, 1e-3, &g, &f).unwrap();
        let r2 = contraction_residual(&s, 5e-4, &g, &f).unwrap();
        worst = worst.max(r1);
        rates.push(r1 / r2);
    }
    let pass = worst <= REP_RESIDUAL_TOL && rates.iter().all(|r| in_band(*r));
    outcome(
        pass,
        format!(
            "max residual at eps=1e-3 = {worst:.2e} (tol {REP_RESIDUAL_TOL:.0e}); halving rates {:?}",
            rates.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>()
        ),
    )
}

fn group_contraction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut draw = || HeisenbergElement::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let eps = 1e-3;
    let mut worst_c: f64 = 0.0;
    let mut min_rate = f64::INFINITY;
    let mut max_rate: f64 = 0.0;
    let mut worst_trip: f64 = 0.0;
    for _ in 0..100 {
        let (x, y) = (draw(), draw());
        let exact = h_mul(&x, &y);
        let e1 = g_eps_mul(eps, &x, &y).unwrap().max_diff(&exact);
        let e2 = g_eps_mul(eps / 2.0, &x, &y).unwrap().max_diff(&exact);
        worst_c = worst_c.max(e1 / eps);
        if e2 > 1e-12 {
            min_rate = min_rate.min(e1 / e2);
            max_rate = max_rate.max(e1 / e2);
        }
        for e in [0.3, 1.0] {
            worst_trip = worst_trip.max(p_eps_inv(e, &p_eps(e, &x).unwrap()).unwrap().max_diff(&x));
        }
    }
    let pass = in_band(min_rate) && in_band(max_rate) && worst_trip <= ROUNDTRIP_TOL;
    outcome(
        pass,
        format!(
            "error <= {worst_c:.2} eps; halving rate in [{min_rate:.3}, {max_rate:.3}]; P round trip {worst_trip:.1e} (tol {ROUNDTRIP_TOL:.0e})"
        ),
    )
}

fn admissibility() -> Outcome {
    let mw = wavelet(8192);
    let abs_sq = |x: f64| mw.value_at(x).powi(2);
    let mut worst: f64 = 0.0;
    for eps in [0.1, 0.5, 1.0] {
        let closed = admissibility_eps(1.0, 0.0, eps, &mw.psi).unwrap();
        let quad = admissibility_eps_quadrature(1.0, 0.0, eps, abs_sq, (-PI, PI), &mw.joints(), 64).unwrap();
        worst = worst.max((closed - quad).abs() / quad);
    }
    let heis = admissibility_heisenberg(&HeisRepParams::new(1.0, 0.0).unwrap(), &mw.psi);
    let near = admissibility_eps(1.0, 0.0, 1e-6, &mw.psi).unwrap();
    let gap = (near - heis).abs();
    outcome(
        worst <= ADMISSIBILITY_REL_TOL && gap <= ADMISSIBILITY_LIMIT_TOL,
        format!(
            "closed form vs double integral {worst:.1e} (tol {ADMISSIBILITY_REL_TOL:.0e}); |C(1e-6) - 2pi|psi|^4/|A|| = {gap:.1e} (tol {ADMISSIBILITY_LIMIT_TOL:.0e})"
        ),
    )
}

fn pi_identity() -> Outcome {
    let grid = Grid::centered(8192, 0.025).unwrap();
    let k = 8;
    let f = SampledSignal::from_fn(grid, |x| rational_analytic(k, x));
    let (a, b) = (0.7, -1.3);
    let p = EARepParams::new(a, b, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let g = EAElement::new(rng.gen_range(0.6..1.6), rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0)).unwrap();
        let out = pi_eps_apply(&p, &g, &f);
        let expect = affine_closed_form(a, b, &g, grid, |x| rational_analytic(k, x));
        worst = worst.max(out.signal.sub(&expect).unwrap().max_abs());
    }
    outcome(worst <= PI1_TOL, format!("max error {worst:.1e} over 5 elements (tol {PI1_TOL:.0e})"))
}

fn isometry() -> Outcome {
    let cases: [Case; 3] = [
        ("t e^-t", |t| C64::new(t * (-t).exp(), 0.0), 0.25),
        ("e^-(ln t)^2", |t| C64::new((-t.ln().powi(2)).exp(), 0.0), (PI / 2.0).sqrt()),
        ("sqrt(t)/(1+t^2)", |t| C64::new(t.sqrt() / (1.0 + t * t), 0.0), PI / 4.0),
    ];
    let mut worst: f64 = 0.0;
    for eps in [0.3, 1.0] {
        let grid = Grid::spanning(-40.0 / eps, 40.0 / eps, 8192).unwrap();
        for (_, f, exact) in &cases {
            let pair = t_eps_norm_pair(eps, grid, f).unwrap();
            worst = worst
                .max(pair.relative_gap())
                .max((pair.pulled_back - exact).abs() / exact)
                .max((pair.half_line - exact).abs() / exact);
        }
    }
    outcome(
        worst <= ISOMETRY_TOL,
        format!(
            "max relative gap {worst:.1e} among eps|T f|^2, the dt/t integral and closed forms for {} (tol {ISOMETRY_TOL:.0e})",
            cases.iter().map(|c| c.0).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn resolution() -> Outcome {
    let grid = Grid::centered(1024, 0.05).unwrap();
    let psi = SampledSignal::from_real_fn(grid, |x| PI.powf(-0.25) * (-x * x / 2.0).exp());
    let win = PhaseWindow::default();
    let heis = HeisRepParams::new(1.0, 0.0).unwrap();
    let h = resolution_identity_residual(&CsFamily::Heisenberg(heis), &psi, &psi, &psi, &win).unwrap();
    // the same truncated integral from the closed-form overlap e^{-q²/4 - A²p²/4}
    let (dq, dp) = (2.0 * win.q / win.nq as f64, 2.0 * win.p / win.np as f64);
    let mut sum = 0.0;
    for i in 0..win.nq {
        let q = -win.q + (i as f64 + 0.5) * dq;
        for j in 0..win.np {
            let p = -win.p + (j as f64 + 0.5) * dp;
            sum += (-q * q / 2.0 - p * p / 2.0).exp();
        }
    }
    let oracle = (1.0 - sum * dq * dp / (2.0 * PI)).abs();
    let s = Schedule::new(1.0, 0.0, 0.0, 0.0).unwrap();
    let e = resolution_identity_residual(&CsFamily::Eps(s, 0.25), &psi, &psi, &psi, &win).unwrap();
    let pass = h.residual <= RESOLUTION_TOL
        && (h.residual - oracle).abs() <= 1e-8
        && (e.residual - h.residual).abs() <= RESOLUTION_TOL;
    outcome(
        pass,
        format!(
            "Heisenberg residual {:.2e} (oracle {oracle:.2e}, tol {RESOLUTION_TOL:.0e}); eps=0.25 residual {:.2e}",
            h.residual, e.residual
        ),
    )
}

fn routes() -> Outcome {
    let mw = wavelet(4096);
    let cfg = FrameConfig::default().with_eps(1.0).unwrap();
    let input = Grid::centered(65536, 0.1).unwrap();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (n, m) in [(0, 1), (1, 0), (2, -1)] {
        let r = route_consistency(&cfg, &mw, AtomIndex::new(n, m), &input).unwrap();
        parts.push(format!("({n},{m}) {:.1e}", r.max_error));
        worst = worst.max(r.max_error);
    }
    outcome(worst <= ROUTE_TOL, format!("max |direct - route| {} (tol {ROUTE_TOL:.0e})", parts.join(", ")))
}

fn errata() -> Outcome {
    let mw = wavelet(4096);
    let r = erratum_report(&FrameConfig::default(), &mw).unwrap();
    let finite = |v: Option<f64>| v.is_some_and(f64::is_finite);
    let pass = r.gamma.limit_mismatch_used.is_finite()
        && r.gamma.limit_mismatch_alternative.is_finite()
        && r.gamma.taylor_exact.is_finite()
        && finite(r.eta_tilde_discrepancy)
        && finite(r.log_composition_gap)
        && r.notes.len() == 4;
    outcome(
        pass,
        format!(
            "gamma mismatch used/alt {:.1e}/{:.1e}; eta-tilde gap {:.2e}; eps=0 atom log-composition gap {:.2e}",
            r.gamma.limit_mismatch_used,
            r.gamma.limit_mismatch_alternative,
            r.eta_tilde_discrepancy.unwrap_or(f64::NAN),
            r.log_composition_gap.unwrap_or(f64::NAN)
        ),
    )
}

fn main() {
    let checks: [Check; 12] = [
        ("tightness, time kind", || tightness(Kind::Time)),
        ("tightness, frequency kind", || tightness(Kind::Frequency)),
        ("reconstruction", reconstruction),
        ("atom contraction", atom_contraction),
        ("representation contraction", representation_contraction),
        ("group contraction", group_contraction),
        ("admissibility", admissibility),
        ("pi at eps=1", pi_identity),
        ("isometry", isometry),
        ("resolution of identity", resolution),
        ("consistency of routes", routes),
        ("erratum documentation", errata),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in checks.iter().enumerate() {
        let o = check();
        println!("[{}] {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    println!("{} of {} criteria pass", checks.len() - failed.len(), checks.len());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
