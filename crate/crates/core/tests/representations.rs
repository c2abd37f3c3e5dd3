use std::f64::consts::PI;

use framelab::groups::{ea_mul, h_mul, p_eps, EAElement, HeisenbergElement};
use framelab::numerics::{fourier, relative_distance};
use framelab::representations::*;
use framelab::signals::{band_limited, hardy_noise, rational_analytic, time_localized};
use framelab::{Grid, SampledSignal, C64};
use proptest::prelude::*;

fn smooth(grid: Grid) -> SampledSignal {
    time_localized(4, grid, -3.0, 3.0, 3).unwrap()
}

fn fiducial(x: f64) -> f64 {
    // the ramp fiducial on [-π, π]
    let nu = |t: f64| {
        let t = t.clamp(0.0, 1.0);
        t * t * (3.0 - 2.0 * t)
    };
    if !(-PI..=PI).contains(&x) {
        0.0
    } else if x <= 0.0 {
        (PI / 2.0 * nu((x + PI) / PI)).sin()
    } else {
        (PI / 2.0 * nu(x / PI)).cos()
    }
}

#[test]
fn eta_special_elements() {
    let g = Grid::spanning(-10.0, 10.0, 2048).unwrap();
    let f = smooth(g);
    let p = HeisRepParams::new(1.3, -0.4).unwrap();
    assert_eq!(eta_apply(&p, &HeisenbergElement::IDENTITY, &f), f);
    let phase = eta_apply(&p, &HeisenbergElement::new(0.0, 0.8, 0.0), &f);
    assert!(phase.sub(&f.scaled(C64::from_polar(1.0, 1.3 * 0.8))).unwrap().max_abs() < 1e-14);
    let moved = eta_apply(&p, &HeisenbergElement::new(1.1, 0.0, 0.0), &f);
    assert!((moved.norm() - f.norm()).abs() < 1e-9 * f.norm());
    let direct = time_localized(4, Grid::new(g.x0 + 1.1, g.dx, g.count).unwrap(), -3.0, 3.0, 3).unwrap();
    assert!(moved.sub(&SampledSignal { grid: g, samples: direct.samples }).unwrap().max_abs() < 1e-9);
}

#[test]
fn rho_special_elements() {
    let g = Grid::spanning(-10.0, 10.0, 2048).unwrap();
    let f = smooth(g);
    let p = EARepParams::new(0.6, -2.0, 0.5).unwrap();
    let phase = rho_eps_apply(&p, &EAElement::new(1.0, 0.0, 0.9).unwrap(), &f);
    assert!(phase.sub(&f.scaled(C64::from_polar(1.0, 0.6 * 0.9))).unwrap().max_abs() < 1e-14);
    let alpha: f64 = 0.7;
    let moved = rho_eps_apply(&p, &EAElement::new(alpha, 0.0, 0.0).unwrap(), &f);
    assert!(relative_distance(&moved, &f.shifted(-alpha.ln() / 0.5)).unwrap() < 1e-14);
}

#[test]
fn pi_at_identity_and_unitarity() {
    let g = Grid::centered(4096, 0.1).unwrap();
    let f = band_limited(1, g, PI, 3).unwrap();
    let p = EARepParams::new(0.4, 1.5, 0.6).unwrap();
    let same = pi_eps_apply(&p, &EAElement::IDENTITY, &f);
    assert!(same.signal.sub(&f).unwrap().max_abs() < 1e-10 * f.max_abs());
    assert!(same.domain.is_silent());
    let moved = pi_eps_apply(&p, &EAElement::new(0.8, 0.3, -1.0).unwrap(), &f);
    assert!((moved.signal.norm() - f.norm()).abs() < 1e-6 * f.norm());
}

#[test]
fn pi_reports_negative_frequencies() {
    let g = Grid::centered(1024, 0.1).unwrap();
    let real = SampledSignal::from_real_fn(g, |x| (-x * x).exp() * (3.0 * x).cos());
    let p = EARepParams::new(0.0, 1.0, 1.0).unwrap();
    let out = pi_eps_apply(&p, &EAElement::IDENTITY, &real);
    assert!(out.domain.warning.is_some());
    assert!((out.domain.negative_fraction - 0.5).abs() < 0.01);
}

#[test]
fn pi_one_is_affine_action() {
    let g = Grid::centered(8192, 0.025).unwrap();
    let f = SampledSignal::from_fn(g, |x| rational_analytic(8, x));
    let (a, b) = (-0.3, 2.0);
    let p = EARepParams::new(a, b, 1.0).unwrap();
    for el in [EAElement::new(1.3, 0.4, 0.2).unwrap(), EAElement::new(0.75, -0.6, 1.0).unwrap()] {
        let out = pi_eps_apply(&p, &el, &f);
        let expect = affine_closed_form(a, b, &el, g, |x| rational_analytic(8, x));
        assert!(out.signal.sub(&expect).unwrap().max_abs() < 1e-6);
    }
}

#[test]
fn homomorphisms() {
    let g = Grid::spanning(-12.0, 12.0, 4096).unwrap();
    let f = smooth(g);
    let hp = HeisRepParams::new(0.9, 0.3).unwrap();
    let (x, y) = (HeisenbergElement::new(0.6, -0.4, 1.2), HeisenbergElement::new(-1.1, 0.7, 0.5));
    let two = eta_apply(&hp, &x, &eta_apply(&hp, &y, &f));
    let one = eta_apply(&hp, &h_mul(&x, &y), &f);
    assert!(two.sub(&one).unwrap().max_abs() < 1e-9);

    let rp = EARepParams::new(0.5, -1.5, 0.7).unwrap();
    let (u, v) = (EAElement::new(1.4, 0.3, -0.2).unwrap(), EAElement::new(0.8, -0.5, 0.9).unwrap());
    let two = rho_eps_apply(&rp, &u, &rho_eps_apply(&rp, &v, &f));
    let one = rho_eps_apply(&rp, &ea_mul(&u, &v), &f);
    assert!(two.sub(&one).unwrap().max_abs() < 1e-9);

    let h = band_limited(2, Grid::centered(32768, 0.1).unwrap(), PI, 3).unwrap();
    let (u, v) = (EAElement::new(1.2, 0.3, -0.2).unwrap(), EAElement::new(0.9, -0.5, 0.9).unwrap());
    let two = pi_eps_apply(&rp, &u, &pi_eps_apply(&rp, &v, &h).signal).signal;
    let one = pi_eps_apply(&rp, &ea_mul(&u, &v), &h).signal;
    assert!(two.sub(&one).unwrap().max_abs() < 1e-6);
}

#[test]
fn pullback_of_constant() {
    for eps in [0.2, 1.0] {
        let n = 4096;
        let grid = Grid::new(0.0, 1.0 / n as f64, n).unwrap();
        let h = HalfLineSignal::from_fn(eps, grid, |_| C64::new(1.0, 0.0)).unwrap();
        let pulled = t_eps_pullback(&h);
        assert!((eps * pulled.norm_sq() - eps).abs() < 1e-12);
    }
    let z = HalfLineSignal::from_fn(0.5, Grid::new(0.0, 0.1, 10).unwrap(), |_| C64::new(0.0, 0.0)).unwrap();
    assert_eq!(t_eps_pullback(&z).max_abs(), 0.0);
    assert!(HalfLineSignal::from_fn(0.0, Grid::new(0.0, 0.1, 10).unwrap(), |_| C64::new(1.0, 0.0)).is_err());
}

#[test]
fn pullback_norm_relation_for_identity_function() {
    // ∫_{e^{-4}}^{1} t dt = (1 - e^{-8})/2
    let grid = Grid::spanning(0.0, 4.0, 1 << 15).unwrap();
    let pair = t_eps_norm_pair(1.0, grid, |t| C64::new(t, 0.0)).unwrap();
    assert!((pair.half_line - (1.0 - (-8f64).exp()) / 2.0).abs() < 1e-12);
    assert!(pair.relative_gap() < 1e-8, "{pair:?}");
}

#[test]
fn intertwiner_support_norm_and_formula() {
    let out = Grid::centered(8192, 0.1).unwrap();
    let psi_tilde = intertwiner_i_fn(|u| C64::new(fiducial(u), 0.0), &out);
    let spec = fourier(&psi_tilde);
    let peak = spec.max_abs();
    for (j, z) in spec.samples.iter().enumerate() {
        let w = spec.grid.point(j);
        if w < (-PI).exp() * 0.999 || w > PI.exp() * 1.001 {
            assert!(z.norm() <= 1e-8 * peak, "w = {w}");
        } else if w > 0.0 {
            assert!((z.re - fiducial(-w.ln()) / w.sqrt()).abs() < 1e-12);
        }
    }
    let norm_sq: f64 = (0..8192).map(|k| fiducial(-PI + 2.0 * PI * k as f64 / 8192.0).powi(2)).sum::<f64>() * 2.0 * PI / 8192.0;
    assert!((psi_tilde.norm_sq() - norm_sq).abs() < 1e-6 * norm_sq);

    let psi = SampledSignal::from_real_fn(Grid::spanning(-PI, PI, 4096).unwrap(), fiducial);
    let via_samples = intertwiner_i(&psi, &out);
    assert!(relative_distance(&via_samples, &psi_tilde).unwrap() < 1e-6);
}

#[test]
fn intertwiner_round_trips() {
    let psi = SampledSignal::from_real_fn(Grid::spanning(-PI - 0.5, PI + 0.5, 4096).unwrap(), fiducial);
    let out = Grid::centered(65536, 0.1).unwrap();
    let forward = intertwiner_i(&psi, &out);
    let back = intertwiner_i_inv(&forward, &psi.grid);
    assert!(back.domain.is_silent());
    assert!(relative_distance(&back.signal, &psi).unwrap() < 1e-6);

    let z = SampledSignal::zeros(out);
    assert_eq!(intertwiner_i_inv(&z, &psi.grid).signal.max_abs(), 0.0);
    assert_eq!(intertwiner_i(&SampledSignal::zeros(psi.grid), &out).max_abs(), 0.0);
}

#[test]
fn hardy_noise_round_trip() {
    let g = Grid::centered(512, 0.1).unwrap();
    let f = hardy_noise(5, g);
    let lg = log_grid_for(&f, 3.0, 1 << 16, 1 << 16).unwrap();
    let h = intertwiner_i_inv(&f, &lg);
    let back = intertwiner_i(&h.signal, &g);
    let err = relative_distance(&back, &f).unwrap();
    assert!(err < 1e-6, "{err:.3e} on {lg:?}");
}

#[test]
fn eta_tilde_identity_unitarity_homomorphism() {
    let g = Grid::centered(32768, 0.1).unwrap();
    let f = band_limited(6, g, 2.0, 2).unwrap();
    let p = HeisRepParams::new(1.0, 0.5).unwrap();
    let id = eta_tilde_apply(&p, &HeisenbergElement::IDENTITY, &f).unwrap();
    assert!(relative_distance(&id.signal, &f).unwrap() < 1e-6);
    let (x, y) = (HeisenbergElement::new(0.4, 0.2, 0.7), HeisenbergElement::new(-0.3, 0.5, -0.6));
    let ex = eta_tilde_apply(&p, &x, &f).unwrap();
    assert!((ex.signal.norm() - f.norm()).abs() < 1e-6 * f.norm());
    assert!(ex.closed_form_discrepancy.is_some());
    let two = eta_tilde_apply(&p, &x, &eta_tilde_apply(&p, &y, &f).unwrap().signal).unwrap();
    let one = eta_tilde_apply(&p, &h_mul(&x, &y), &f).unwrap();
    assert!(relative_distance(&two.signal, &one.signal).unwrap() < 1e-6);
}

#[test]
fn contraction_residual_behaviour() {
    let grid = Grid::spanning(-10.0, 10.0, 4096).unwrap();
    let f = smooth(grid);
    let s = Schedule::new(1.0, 0.5, 0.2, 0.3).unwrap();
    assert_eq!(contraction_residual(&s, 0.1, &HeisenbergElement::IDENTITY, &f).unwrap(), 0.0);
    let g = HeisenbergElement::new(0.7, -0.3, 0.9);
    let r = |e: f64| contraction_residual(&s, e, &g, &f).unwrap();
    assert!(r(1e-3) <= 1e-2 * r(1e-1), "{} vs {}", r(1e-3), r(1e-1));
    let rate = r(1e-3) / r(5e-4);
    assert!((1.9..2.1).contains(&rate), "{rate}");
    assert!(contraction_residual(&s, 0.5, &g, &SampledSignal::zeros(grid)).is_err());
}

#[test]
fn pointwise_contraction() {
    let grid = Grid::spanning(-10.0, 10.0, 2048).unwrap();
    let f = smooth(grid);
    let s = Schedule::new(2.0, 0.0, 0.0, 0.0).unwrap();
    let g = HeisenbergElement::new(-0.5, 0.3, 0.4);
    let target = eta_apply(&s.heisenberg(), &g, &f);
    let mut prev = f64::INFINITY;
    for eps in [1e-1, 1e-2, 1e-3] {
        let approx = rho_eps_apply(&s.at(eps).unwrap(), &p_eps(eps, &g).unwrap(), &f);
        let k = 1024;
        let d = (approx.samples[k] - target.samples[k]).norm();
        assert!(d < prev);
        prev = d;
    }
}

#[test]
fn singular_schedule() {
    let s = Schedule::new(1.0, 2.0, 0.0, 2.0).unwrap();
    assert!(s.at(0.5).is_err());
    assert!(Schedule::new(1.0, 2.0, 0.5, 0.5).is_err());
    assert!(HeisRepParams::new(0.0, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn representations_are_unitary(
        c in -2.0f64..2.0, v1 in -2.0f64..2.0, v2 in -2.0f64..2.0,
        la in -0.5f64..0.5, eps in 0.1f64..1.0,
    ) {
        let grid = Grid::spanning(-12.0, 12.0, 2048).unwrap();
        let f = smooth(grid);
        let nf = f.norm();
        let hp = HeisRepParams::new(1.0, 0.2).unwrap();
        let e = eta_apply(&hp, &HeisenbergElement::new(c, v1, v2), &f);
        prop_assert!((e.norm() - nf).abs() <= 1e-9 * nf);
        let rp = EARepParams::new(0.3, -1.0, eps).unwrap();
        let r = rho_eps_apply(&rp, &EAElement::new(la.exp(), v1, v2).unwrap(), &f);
        prop_assert!((r.norm() - nf).abs() <= 1e-9 * nf);
    }
}
