//! Seeded test signals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{param, Result};
use crate::numerics::{fourier, inv_fourier_onto, Grid, SampledSignal, C64};

/// e^{−1/(1−t²)} on (−1, 1), zero elsewhere.
pub fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

fn coefficients(rng: &mut ChaCha8Rng, terms: usize) -> Vec<C64> {
    (0..2 * terms + 1)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn trig_poly(coeffs: &[C64], t: f64) -> C64 {
    let k0 = (coeffs.len() / 2) as f64;
    coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| c * C64::from_polar(1.0, (j as f64 - k0) * t))
        .sum()
}

/// A smooth bump on [lo, hi] times a random trigonometric polynomial with
/// `terms` harmonics on each side.
pub fn time_localized(seed: u64, grid: Grid, lo: f64, hi: f64, terms: usize) -> Result<SampledSignal> {
    if !(hi > lo) {
        return param("support must satisfy lo < hi");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = coefficients(&mut rng, terms);
    let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
    Ok(SampledSignal::from_fn(grid, |x| {
        let t = (x - mid) / half;
        let b = bump(t);
        if b == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            trig_poly(&coeffs, std::f64::consts::PI * t) * b
        }
    }))
}

/// Spectrum of `band_limited` at w: e^{u/2} h(u) at u = −ln w, where h is a
/// bump on [−span, span] times a random trigonometric polynomial. The
/// spectrum lives on [e^{−span}, e^{span}].
pub fn band_limited_spectrum(seed: u64, span: f64, terms: usize) -> impl Fn(f64) -> C64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = coefficients(&mut rng, terms);
    move |w: f64| {
        if w <= 0.0 {
            return C64::new(0.0, 0.0);
        }
        let u = -w.ln();
        let b = bump(u / span);
        if b == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            trig_poly(&coeffs, std::f64::consts::PI * u / span) * b * (u / 2.0).exp()
        }
    }
}

/// Band-limited signal with spectrum `band_limited_spectrum(seed, span, terms)`.
pub fn band_limited(seed: u64, grid: Grid, span: f64, terms: usize) -> Result<SampledSignal> {
    if !(span > 0.0) {
        return param("band span must be positive");
    }
    if span.exp() >= grid.nyquist() {
        return param(format!(
            "band edge e^{span} exceeds the grid Nyquist frequency {}",
            grid.nyquist()
        ));
    }
    let spec = band_limited_spectrum(seed, span, terms);
    let fg = grid.frequency_grid();
    let s = SampledSignal::from_fn(fg, spec);
    inv_fourier_onto(&s, &grid)
}

/// (1 − ix)^{−k}, whose spectrum √(2π) w^{k−1} e^{−w}/Γ(k) lives on w > 0.
pub fn rational_analytic(k: i32, x: f64) -> C64 {
    C64::new(1.0, -x).powi(-k)
}

pub fn gaussian(grid: Grid, center: f64, width: f64) -> SampledSignal {
    SampledSignal::from_real_fn(grid, |x| (-(x - center).powi(2) / (2.0 * width * width)).exp())
}

/// Seeded complex noise with its non-positive frequencies removed.
pub fn hardy_noise(seed: u64, grid: Grid) -> SampledSignal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..grid.count)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let noise = SampledSignal { grid, samples };
    let mut spec = fourier(&noise);
    let fg = spec.grid;
    for (j, z) in spec.samples.iter_mut().enumerate() {
        if fg.point(j) <= 0.0 {
            *z = C64::new(0.0, 0.0);
        }
    }
    inv_fourier_onto(&spec, &grid).expect("conjugate grid")
}
