//! Sampled signals on uniform grids, quadrature inner products and the
//! unitary Fourier transform F(f)(w) = (2π)^{-1/2} ∫ f(x) e^{-iwx} dx.
//!
//! Every integral is a left-endpoint Riemann sum over the grid. The discrete
//! transform is scaled so that it is exactly unitary between a grid and its
//! conjugate frequency grid, which spans [-π/dx, π/dx) with spacing
//! 2π/(count·dx).

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{param, FrameError, Result};

pub type C64 = Complex64;

const GRID_TOL: f64 = 1e-9;

/// A uniform sampling lattice `x_k = x0 + k·dx`, `k = 0..count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x0: f64,
    pub dx: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(x0: f64, dx: f64, count: usize) -> Result<Self> {
        if !(dx > 0.0) || !dx.is_finite() {
            return param(format!("grid spacing must be positive and finite, got {dx}"));
        }
        if !x0.is_finite() {
            return param("grid origin must be finite");
        }
        if count < 2 {
            return param(format!("grid needs at least 2 points, got {count}"));
        }
        Ok(Self { x0, dx, count })
    }

    /// Grid with the origin at index `count/2`.
    pub fn centered(count: usize, dx: f64) -> Result<Self> {
        Self::new(-((count / 2) as f64) * dx, dx, count)
    }

    /// Grid of `count` left-endpoint cells covering `[lo, hi)`.
    pub fn spanning(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(hi > lo) {
            return param(format!("empty interval [{lo}, {hi})"));
        }
        Self::new(lo, (hi - lo) / count as f64, count)
    }

    #[inline]
    pub fn point(&self, k: usize) -> f64 {
        self.x0 + k as f64 * self.dx
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.point(k)).collect()
    }

    /// Right end of the last cell.
    pub fn end(&self) -> f64 {
        self.x0 + self.count as f64 * self.dx
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.dx
    }

    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / (self.count as f64 * self.dx)
    }

    /// The conjugate grid on which [`fourier`] returns samples.
    pub fn frequency_grid(&self) -> Grid {
        let dw = self.frequency_step();
        Grid {
            x0: -((self.count / 2) as f64) * dw,
            dx: dw,
            count: self.count,
        }
    }

    /// The time grid that a frequency grid is conjugate to, centered at 0.
    pub fn centered_time_grid(&self) -> Grid {
        let dx = 2.0 * PI / (self.count as f64 * self.dx);
        Grid {
            x0: -((self.count / 2) as f64) * dx,
            dx,
            count: self.count,
        }
    }

    /// Same spacing, `factor` times as many points, symmetric around the
    /// original span.
    pub fn padded(&self, factor: usize) -> Grid {
        let factor = factor.max(1);
        let extra = self.count * (factor - 1);
        Grid {
            x0: self.x0 - (extra / 2) as f64 * self.dx,
            dx: self.dx,
            count: self.count * factor,
        }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.count == other.count
            && (self.dx - other.dx).abs() <= 1e-12 * self.dx
            && (self.x0 - other.x0).abs() <= 1e-9 * self.dx
    }

    /// Whether `dx·dw·count = 2π` for a time grid `self` and frequency grid `freq`.
    pub fn is_conjugate_to(&self, freq: &Grid) -> bool {
        self.count == freq.count
            && ((self.dx * freq.dx * self.count as f64) / (2.0 * PI) - 1.0).abs() <= GRID_TOL
    }

    /// Fractional index of `x`; `None` if outside `[x0, end)`.
    fn fractional_index(&self, x: f64) -> Option<f64> {
        let t = (x - self.x0) / self.dx;
        if t < -1e-9 || t > (self.count - 1) as f64 + 1e-9 {
            None
        } else {
            Some(t)
        }
    }
}

/// Complex samples on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSignal {
    pub grid: Grid,
    pub samples: Vec<C64>,
}

impl SampledSignal {
    pub fn new(grid: Grid, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != grid.count {
            return param(format!(
                "expected {} samples, got {}",
                grid.count,
                samples.len()
            ));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return param("signal contains non-finite samples");
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            samples: vec![C64::new(0.0, 0.0); grid.count],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> C64) -> Self {
        let samples = (0..grid.count).map(|k| f(grid.point(k))).collect();
        Self { grid, samples }
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| C64::new(f(x), 0.0))
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn norm_sq(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z * s).collect(),
        }
    }

    /// Pointwise multiply by `h(x)`.
    pub fn modulated(&self, h: impl Fn(f64) -> C64) -> Self {
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(k, z)| z * h(self.grid.point(k)))
            .collect();
        Self {
            grid: self.grid,
            samples,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_same_grid(&self.grid, &other.grid)?;
        Ok(Self {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_grid(&self.grid, &other.grid)?;
        Ok(Self {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Band-limited (trigonometric) interpolation at arbitrary points.
    /// Points outside the grid span read as zero; points that land on a
    /// grid node return the stored sample.
    pub fn interpolate(&self, xs: &[f64]) -> Vec<C64> {
        let spectrum = fourier(self);
        let fg = spectrum.grid;
        let scale = fg.dx / (2.0 * PI).sqrt();
        xs.par_iter()
            .map(|&x| match self.grid.fractional_index(x) {
                None => C64::new(0.0, 0.0),
                Some(t) => {
                    let r = t.round();
                    if (t - r).abs() < 1e-10 {
                        return self.samples[r as usize];
                    }
                    scale * uniform_phase_sum(&spectrum.samples, fg.x0 * x, fg.dx * x)
                }
            })
            .collect()
    }

    /// Values of the Fourier transform of the (zero-extended) samples at
    /// arbitrary frequencies.
    pub fn spectrum_at(&self, ws: &[f64]) -> Vec<C64> {
        let g = self.grid;
        let scale = g.dx / (2.0 * PI).sqrt();
        ws.par_iter()
            .map(|&w| scale * uniform_phase_sum(&self.samples, -w * g.x0, -w * g.dx))
            .collect()
    }

    /// `x ↦ f(x + c)` by a Fourier phase ramp.
    pub fn shifted(&self, c: f64) -> Self {
        if c == 0.0 {
            return self.clone();
        }
        let mut spec = fourier(self);
        let fg = spec.grid;
        for (j, z) in spec.samples.iter_mut().enumerate() {
            *z *= C64::from_polar(1.0, fg.point(j) * c);
        }
        inv_fourier_onto(&spec, &self.grid).expect("conjugate grids")
    }

    /// The same samples embedded in a grid `factor` times longer (zeros outside).
    pub fn zero_padded(&self, factor: usize) -> Self {
        let grid = self.grid.padded(factor);
        let offset = (grid.count - self.grid.count) / 2;
        let mut samples = vec![C64::new(0.0, 0.0); grid.count];
        samples[offset..offset + self.grid.count].copy_from_slice(&self.samples);
        Self { grid, samples }
    }

    /// Restrict to `sub`, whose nodes must coincide with nodes of this grid.
    pub fn restricted_to(&self, sub: &Grid) -> Result<Self> {
        if (sub.dx - self.grid.dx).abs() > 1e-12 * self.grid.dx {
            return Err(FrameError::GridMismatch("spacing differs".into()));
        }
        let t = (sub.x0 - self.grid.x0) / self.grid.dx;
        let offset = t.round();
        if (t - offset).abs() > 1e-6 || offset < 0.0 || offset as usize + sub.count > self.grid.count {
            return Err(FrameError::GridMismatch("sub-grid not aligned or out of range".into()));
        }
        let o = offset as usize;
        Ok(Self {
            grid: *sub,
            samples: self.samples[o..o + sub.count].to_vec(),
        })
    }

    /// Fraction of energy at frequencies `w < 0` (the Nyquist bin counts as negative).
    pub fn negative_frequency_fraction(&self) -> f64 {
        let spec = fourier(self);
        let total: f64 = spec.samples.iter().map(|z| z.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let neg: f64 = spec
            .samples
            .iter()
            .enumerate()
            .filter(|(j, _)| spec.grid.point(*j) < 0.0)
            .map(|(_, z)| z.norm_sqr())
            .sum();
        neg / total
    }
}

/// `Σ_j c_j e^{i(θ0 + j·dθ)}` by a unit-modulus recurrence.
fn uniform_phase_sum(coeffs: &[C64], theta0: f64, dtheta: f64) -> C64 {
    let step = C64::from_polar(1.0, dtheta);
    let mut term = C64::from_polar(1.0, theta0);
    let mut acc = C64::new(0.0, 0.0);
    for (j, c) in coeffs.iter().enumerate() {
        acc += c * term;
        term *= step;
        // re-anchor to keep the recurrence on the unit circle
        if j % 1024 == 1023 {
            term = C64::from_polar(1.0, theta0 + (j + 1) as f64 * dtheta);
        }
    }
    acc
}

pub(crate) fn check_same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(FrameError::GridMismatch(format!(
            "({}, {}, {}) vs ({}, {}, {})",
            a.x0, a.dx, a.count, b.x0, b.dx, b.count
        )))
    }
}

/// `⟨f, g⟩ = Σ conj(f_k) g_k dx`, antilinear in `f`.
pub fn inner_product(f: &SampledSignal, g: &SampledSignal) -> Result<C64> {
    check_same_grid(&f.grid, &g.grid)?;
    let s: C64 = f
        .samples
        .iter()
        .zip(&g.samples)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(s * f.grid.dx)
}

/// `Σ |f_k|² e^{eps·x_k} dx`, the squared norm in L²(ℝ, e^{eps x} dx).
pub fn weighted_norm_sq(f: &SampledSignal, eps: f64) -> Result<f64> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return param(format!("weight exponent must be >= 0, got {eps}"));
    }
    let g = f.grid;
    Ok(f.samples
        .iter()
        .enumerate()
        .map(|(k, z)| z.norm_sqr() * (eps * g.point(k)).exp())
        .sum::<f64>()
        * g.dx)
}

/// `‖a − b‖ / ‖b‖` on a shared grid.
pub fn relative_distance(a: &SampledSignal, b: &SampledSignal) -> Result<f64> {
    let d = a.sub(b)?;
    let nb = b.norm();
    if nb == 0.0 {
        return Err(FrameError::ZeroNorm);
    }
    Ok(d.norm() / nb)
}

/// Unitary Fourier transform onto the conjugate, centered frequency grid.
pub fn fourier(f: &SampledSignal) -> SampledSignal {
    let g = f.grid;
    let fg = g.frequency_grid();
    let n = g.count;
    let mut buf: Vec<C64> = f
        .samples
        .iter()
        .enumerate()
        .map(|(k, z)| z * C64::from_polar(1.0, -fg.x0 * k as f64 * g.dx))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = g.dx / (2.0 * PI).sqrt();
    for (j, z) in buf.iter_mut().enumerate() {
        *z *= scale * C64::from_polar(1.0, -fg.point(j) * g.x0);
    }
    SampledSignal {
        grid: fg,
        samples: buf,
    }
}

/// Inverse transform onto the centered time grid conjugate to `spec.grid`.
pub fn inv_fourier(spec: &SampledSignal) -> SampledSignal {
    let tg = spec.grid.centered_time_grid();
    inv_fourier_onto(spec, &tg).expect("centered grid is conjugate")
}

/// Inverse transform onto an arbitrary time grid conjugate to `spec.grid`.
pub fn inv_fourier_onto(spec: &SampledSignal, time: &Grid) -> Result<SampledSignal> {
    let fg = spec.grid;
    if !time.is_conjugate_to(&fg) {
        return Err(FrameError::GridMismatch(
            "time grid is not conjugate to the frequency grid".into(),
        ));
    }
    let n = fg.count;
    let mut buf: Vec<C64> = spec
        .samples
        .iter()
        .enumerate()
        .map(|(j, z)| z * C64::from_polar(1.0, j as f64 * fg.dx * time.x0))
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = fg.dx / (2.0 * PI).sqrt();
    for (k, z) in buf.iter_mut().enumerate() {
        *z *= scale * C64::from_polar(1.0, fg.x0 * time.point(k));
    }
    Ok(SampledSignal {
        grid: *time,
        samples: buf,
    })
}

/// Fourier transform of the samples at the uniformly spaced frequencies
/// `w_start + j·w_step`, `j < m`, by the chirp-z (Bluestein) algorithm.
pub fn dtft_uniform(f: &SampledSignal, w_start: f64, w_step: f64, m: usize) -> Vec<C64> {
    let g = f.grid;
    let n = g.count;
    if m == 0 {
        return Vec::new();
    }
    let theta = w_step * g.dx;
    let half = 0.5 * theta;
    let chirp = |l: usize| {
        let l = l as f64;
        C64::from_polar(1.0, half * l * l)
    };
    let size = (n + m - 1).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);

    let mut a = vec![C64::new(0.0, 0.0); size];
    for (k, z) in f.samples.iter().enumerate() {
        a[k] = z * C64::from_polar(1.0, -w_start * k as f64 * g.dx) * chirp(k).conj();
    }
    let mut b = vec![C64::new(0.0, 0.0); size];
    for (l, slot) in b.iter_mut().enumerate().take(m) {
        *slot = chirp(l);
    }
    for l in 1..n {
        b[size - l] = chirp(l);
    }
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    inv.process(&mut a);
    let scale = g.dx / (2.0 * PI).sqrt() / size as f64;
    (0..m)
        .map(|j| {
            let w = w_start + j as f64 * w_step;
            a[j] * chirp(j).conj() * C64::from_polar(scale, -w * g.x0)
        })
        .collect()
}

const GL8: [(f64, f64); 4] = [
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

/// Composite 8-point Gauss–Legendre quadrature of `f` over `[a, b]`.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut s = 0.0;
        for &(t, w) in &GL8 {
            s += w * (f(mid - half * t) + f(mid + half * t));
        }
        total += s * half;
    }
    total
}
