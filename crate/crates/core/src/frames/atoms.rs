use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{FrameConfig, MotherWavelet};
use crate::error::{param, Result};
use crate::groups::{expm1_ratio, EAElement};
use crate::numerics::{inv_fourier_onto, Grid, SampledSignal, C64};

/// Lattice position (n, m) of an atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AtomIndex {
    pub n: i64,
    pub m: i64,
}

impl AtomIndex {
    pub fn new(n: i64, m: i64) -> Self {
        Self { n, m }
    }
}

/// (α_n, β_mn, γ_mn) of the discrete subset of EA generating the ε-frame.
pub type LatticeElement = EAElement;

/// α_n = e^{−εnq0}, β_mn = −α_n π m/(b(ε) sinh(εL)), γ_mn = β_mn ln α_n/(α_n − 1).
pub fn lattice_coeffs(cfg: &FrameConfig, idx: AtomIndex) -> Result<LatticeElement> {
    if !(cfg.eps > 0.0) {
        return param("lattice coefficients need eps > 0; eps = 0 is the Gabor system");
    }
    let (_, b) = cfg.ab();
    let u = cfg.eps * idx.n as f64 * cfg.q0;
    let alpha = (-u).exp();
    let beta = -alpha * std::f64::consts::PI * idx.m as f64 / (b * (cfg.eps * cfg.l).sinh());
    // ln α/(α − 1) = u/(1 − e^{−u}), the reciprocal of (e^{−u} − 1)/(−u)
    let gamma = beta / expm1_ratio(u);
    Ok(EAElement { alpha, beta, gamma })
}

/// 2χ sinh(εL)/ε, or 2χL at ε = 0.
pub fn frame_constant(cfg: &FrameConfig) -> f64 {
    if cfg.eps > 0.0 {
        2.0 * cfg.chi * (cfg.eps * cfg.l).sinh() / cfg.eps
    } else {
        2.0 * cfg.chi * cfg.l
    }
}

/// Row data of the time atoms with fixed n: atom_(n,m)(x) = env(x) e^{i m ph(x)}
/// with ph(x) = c0 + k e^{−εx} (ε > 0) or c0 + k x (ε = 0).
#[derive(Clone, Copy, Debug)]
pub(crate) struct Row {
    pub c0: f64,
    pub k: f64,
    eps: f64,
    shift: f64,
}

impl Row {
    pub fn new(cfg: &FrameConfig, n: i64) -> Self {
        let shift = n as f64 * cfg.q0;
        if cfg.eps > 0.0 {
            let (a, b) = cfg.ab();
            let e = lattice_coeffs(cfg, AtomIndex { n, m: 1 }).expect("eps > 0");
            Self { c0: a * e.gamma, k: b * e.beta, eps: cfg.eps, shift }
        } else {
            let kk = cfg.big_a * cfg.p0;
            Self {
                c0: kk * shift / 2.0 + cfg.big_b * cfg.p0,
                k: kk,
                eps: 0.0,
                shift,
            }
        }
    }

    #[inline]
    pub fn phase(&self, x: f64) -> f64 {
        if self.eps > 0.0 {
            self.c0 + self.k * (-self.eps * x).exp()
        } else {
            self.c0 + self.k * x
        }
    }

    #[inline]
    pub fn envelope(&self, mw: &MotherWavelet, x: f64) -> f64 {
        let y = x + self.shift;
        let v = mw.value_at(y);
        if self.eps > 0.0 && v != 0.0 {
            v * (-self.eps * y / 2.0).exp()
        } else {
            v
        }
    }

    /// Interval in x where the envelope can be nonzero.
    pub fn support(&self, mw: &MotherWavelet) -> (f64, f64) {
        let h = mw.half_width();
        (-h - self.shift, h - self.shift)
    }
}

/// Time atom evaluated from the closed form at a single point.
pub fn time_atom_value(cfg: &FrameConfig, mw: &MotherWavelet, idx: AtomIndex, x: f64) -> C64 {
    let row = Row::new(cfg, idx.n);
    let env = row.envelope(mw, x);
    if env == 0.0 {
        return C64::new(0.0, 0.0);
    }
    C64::from_polar(env, idx.m as f64 * row.phase(x))
}

/// A grid with spacing `dx` covering the support of row n.
pub fn atom_grid(mw: &MotherWavelet, n: i64, dx: f64) -> Result<Grid> {
    let h = mw.half_width();
    let count = (2.0 * h / dx).ceil() as usize + 1;
    Grid::new(-h - n as f64 * mw.q0, dx, count)
}

/// A centred grid of `count` points whose Nyquist frequency is 1.25 times the
/// top of the spectral support of row n, e^{nq0 + q0}.
pub fn freq_atom_grid(mw: &MotherWavelet, n: i64, count: usize) -> Result<Grid> {
    let w_hi = (n as f64 * mw.q0 + mw.half_width()).exp();
    Grid::centered(count, std::f64::consts::PI / (1.25 * w_hi))
}

/// Time-localized atom sampled on `grid`.
pub fn time_atom(
    cfg: &FrameConfig,
    mw: &MotherWavelet,
    idx: AtomIndex,
    grid: &Grid,
) -> Result<SampledSignal> {
    cfg.check_wavelet(mw)?;
    Ok(SampledSignal::from_fn(*grid, |x| time_atom_value(cfg, mw, idx, x)))
}

/// Spectrum of the band-limited atom at frequency `w`.
///
/// For ε > 0 this is e^{iaγ} e^{−nq0/2} e^{ibβw^ε} ψ̃_ε(e^{−nq0} w) with
/// ψ̃_ε(t) = t^{(ε−1)/2} ψ(−ln t); at ε = 0 it is w^{−1/2} times the Gabor
/// atom at −ln w.
pub fn freq_atom_spectrum(cfg: &FrameConfig, mw: &MotherWavelet, idx: AtomIndex, w: f64) -> C64 {
    if w <= 0.0 {
        return C64::new(0.0, 0.0);
    }
    if cfg.eps > 0.0 {
        let e = lattice_coeffs(cfg, idx).expect("eps > 0");
        let (a, b) = cfg.ab();
        let nq0 = idx.n as f64 * cfg.q0;
        let t = (-nq0).exp() * w;
        let psi = mw.value_at(-t.ln());
        if psi == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let tilde = t.powf((cfg.eps - 1.0) / 2.0) * psi;
        let phase = a * e.gamma + b * e.beta * w.powf(cfg.eps);
        C64::from_polar((-nq0 / 2.0).exp() * tilde, phase)
    } else {
        time_atom_value(cfg, mw, idx, -w.ln()) / w.sqrt()
    }
}

/// Band-limited atom sampled on `grid`, from its spectrum on the conjugate
/// frequency grid.
pub fn freq_atom(
    cfg: &FrameConfig,
    mw: &MotherWavelet,
    idx: AtomIndex,
    grid: &Grid,
) -> Result<SampledSignal> {
    cfg.check_wavelet(mw)?;
    let fg = grid.frequency_grid();
    let samples: Vec<C64> = (0..fg.count)
        .into_par_iter()
        .map(|j| freq_atom_spectrum(cfg, mw, idx, fg.point(j)))
        .collect();
    inv_fourier_onto(&SampledSignal { grid: fg, samples }, grid)
}
