//! Unitary representations acting on sampled signals: η^{A,B} of H, the
//! realizations ρ_ε^{a,b} and π_ε^{a,b} of EA, the pullback T_ε and the
//! operator I carrying L²(ℝ) onto the Hardy-type space 𝓗 of signals with
//! spectrum on w > 0.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, FrameError, Result};
use crate::groups::{p_eps, EAElement, HeisenbergElement};
use crate::numerics::{
    dtft_uniform, fourier, gauss_legendre, inv_fourier_onto, Grid, SampledSignal, C64,
};

/// Negative-frequency energy fraction above which a signal is reported as
/// outside 𝓗.
pub const HARDY_WARN: f64 = 1e-2;
/// Fraction below which membership in 𝓗 is not mentioned at all.
pub const HARDY_SILENT: f64 = 1e-6;

/// Parameters (A, B) of η^{A,B}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeisRepParams {
    pub a: f64,
    pub b: f64,
}

impl HeisRepParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() || !b.is_finite() {
            return param(format!("A must be finite and nonzero, got A={a}, B={b}"));
        }
        Ok(Self { a, b })
    }
}

/// Parameters (a, b, ε) of ρ_ε^{a,b} and π_ε^{a,b}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EARepParams {
    pub a: f64,
    pub b: f64,
    pub eps: f64,
}

impl EARepParams {
    pub fn new(a: f64, b: f64, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return param(format!("eps must lie in (0, 1], got {eps}"));
        }
        if b == 0.0 || !b.is_finite() || !a.is_finite() {
            return Err(FrameError::Singular(format!("b must be finite and nonzero, got {b}")));
        }
        Ok(Self { a, b, eps })
    }

    /// a(ε) = a0 + A/ε, b(ε) = b0 − A/ε.
    pub fn contracted(big_a: f64, a0: f64, b0: f64, eps: f64) -> Result<Self> {
        Self::new(a0 + big_a / eps, b0 - big_a / eps, eps)
    }
}

/// The contraction schedule a(ε) = a0 + A/ε, b(ε) = b0 − A/ε with a0 + b0 = B.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    #[serde(rename = "A")]
    pub big_a: f64,
    #[serde(rename = "B")]
    pub big_b: f64,
    pub a0: f64,
    pub b0: f64,
}

impl Schedule {
    pub fn new(big_a: f64, big_b: f64, a0: f64, b0: f64) -> Result<Self> {
        HeisRepParams::new(big_a, big_b)?;
        if (a0 + b0 - big_b).abs() > 1e-12 * big_b.abs().max(1.0) {
            return param(format!("a0 + b0 must equal B, got {a0} + {b0} != {big_b}"));
        }
        Ok(Self { big_a, big_b, a0, b0 })
    }

    pub fn heisenberg(&self) -> HeisRepParams {
        HeisRepParams { a: self.big_a, b: self.big_b }
    }

    /// (a(ε), b(ε), ε); singular where A − b0ε = 0.
    pub fn at(&self, eps: f64) -> Result<EARepParams> {
        if eps > 0.0 && (self.big_a - self.b0 * eps) == 0.0 {
            return Err(FrameError::Singular(format!(
                "b(eps) vanishes at eps = A/b0 = {eps}"
            )));
        }
        EARepParams::contracted(self.big_a, self.a0, self.b0, eps)
    }
}

/// How far an input strays from 𝓗.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainReport {
    pub negative_fraction: f64,
    pub warning: Option<String>,
}

impl DomainReport {
    pub fn of(f: &SampledSignal) -> Self {
        let negative_fraction = f.negative_frequency_fraction();
        let warning = if negative_fraction > HARDY_WARN {
            Some(format!(
                "input carries {:.3e} of its energy at negative frequencies; it is discarded",
                negative_fraction
            ))
        } else {
            None
        };
        Self {
            negative_fraction,
            warning,
        }
    }

    pub fn is_silent(&self) -> bool {
        self.negative_fraction <= HARDY_SILENT
    }
}

/// `x ↦ e^{i[A(v1 + x v2) + B v2]} f(c + x)`.
pub fn eta_apply(p: &HeisRepParams, g: &HeisenbergElement, f: &SampledSignal) -> SampledSignal {
    let g = *g;
    let (a, b) = (p.a, p.b);
    f.shifted(g.c)
        .modulated(|x| C64::from_polar(1.0, a * (g.v1 + x * g.v2) + b * g.v2))
}

/// `x ↦ e^{iaγ} e^{ibβe^{−εx}} f(x − ln(α)/ε)`.
pub fn rho_eps_apply(p: &EARepParams, g: &EAElement, f: &SampledSignal) -> SampledSignal {
    let g = *g;
    let p = *p;
    let global = p.a * g.gamma;
    f.shifted(-g.alpha.ln() / p.eps).modulated(|x| {
        C64::from_polar(1.0, global + p.b * g.beta * (-p.eps * x).exp())
    })
}

/// Result of an operator that expects its input in 𝓗.
#[derive(Clone, Debug)]
pub struct HardyOutput {
    pub signal: SampledSignal,
    pub domain: DomainReport,
}

/// π_ε^{a,b}(α, β, γ) f on the input's own grid.
pub fn pi_eps_apply(p: &EARepParams, g: &EAElement, f: &SampledSignal) -> HardyOutput {
    pi_eps_apply_onto(p, g, f, &f.grid)
}

/// π_ε^{a,b}(α, β, γ) f = e^{iaγ} α^{1/(2ε)} F^{-1}(e^{ibβw^ε} F(f)(α^{1/ε} w)),
/// sampled on `out`. The dilated spectrum is evaluated exactly from the
/// input samples (chirp-z), reading zero beyond the input band.
pub fn pi_eps_apply_onto(
    p: &EARepParams,
    g: &EAElement,
    f: &SampledSignal,
    out: &Grid,
) -> HardyOutput {
    let domain = DomainReport::of(f);
    let fg = out.frequency_grid();
    let s = g.alpha.powf(1.0 / p.eps);
    let nyq = f.grid.nyquist();
    let dilated = dtft_uniform(f, s * fg.x0, s * fg.dx, fg.count);
    let scale = C64::from_polar(g.alpha.powf(0.5 / p.eps), p.a * g.gamma);
    let samples = dilated
        .into_iter()
        .enumerate()
        .map(|(j, z)| {
            let w = fg.point(j);
            if w <= 0.0 || s * w >= nyq {
                C64::new(0.0, 0.0)
            } else {
                z * scale * C64::from_polar(1.0, p.b * g.beta * w.powf(p.eps))
            }
        })
        .collect();
    let spec = SampledSignal {
        grid: fg,
        samples,
    };
    let signal = inv_fourier_onto(&spec, out).expect("frequency grid built from output grid");
    HardyOutput { signal, domain }
}

/// Samples of `t ↦ f(t)` on the half line, stored as `x ↦ f(e^{−εx})` on a
/// uniform x-grid.
#[derive(Clone, Debug)]
pub struct HalfLineSignal {
    pub eps: f64,
    pub samples: SampledSignal,
}

impl HalfLineSignal {
    pub fn from_fn(eps: f64, grid: Grid, f: impl Fn(f64) -> C64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return param(format!("eps must lie in (0, 1], got {eps}"));
        }
        Ok(Self {
            eps,
            samples: SampledSignal::from_fn(grid, |x| f((-eps * x).exp())),
        })
    }
}

/// T_ε f = f ∘ e^{−ε·}: with the half-line stored in log coordinates this is
/// the identity on samples.
pub fn t_eps_pullback(h: &HalfLineSignal) -> SampledSignal {
    h.samples.clone()
}

/// Both sides of ε‖T_ε f‖²_{L²(ℝ)} = ‖f‖²_{L²(ℝ⁺, dt/t)}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryPair {
    /// ε ∫ |f(e^{−εx})|² dx over [x0, end] by the trapezoid rule on the x-grid.
    pub pulled_back: f64,
    /// ∫ |f(t)|² dt/t over the image of the grid window, by Gauss–Legendre in t.
    pub half_line: f64,
}

impl IsometryPair {
    pub fn relative_gap(&self) -> f64 {
        (self.pulled_back - self.half_line).abs() / self.half_line.abs().max(f64::MIN_POSITIVE)
    }
}

/// Evaluate the T_ε isometry relation for an analytic half-line function.
pub fn t_eps_norm_pair(eps: f64, grid: Grid, f: impl Fn(f64) -> C64 + Sync) -> Result<IsometryPair> {
    let h = HalfLineSignal::from_fn(eps, grid, &f)?;
    // trapezoid over [x0, end]: the left sum plus the half-weight endpoint correction
    let pb = t_eps_pullback(&h);
    let tail = f((-eps * grid.end()).exp()).norm_sqr();
    let pulled_back = eps * (pb.norm_sq() - 0.5 * grid.dx * (pb.samples[0].norm_sqr() - tail));
    // panels graded geometrically in t so every scale is resolved
    let (t_lo, t_hi) = ((-eps * grid.end()).exp(), (-eps * grid.x0).exp());
    let panels = 4096usize;
    let ratio = (t_hi / t_lo).ln() / panels as f64;
    let parts: Vec<f64> = (0..panels)
        .into_par_iter()
        .map(|k| {
            let a = t_lo * (ratio * k as f64).exp();
            let b = t_lo * (ratio * (k + 1) as f64).exp();
            gauss_legendre(|t| f(t).norm_sqr() / t, a, b, 1)
        })
        .collect();
    let half_line = parts.iter().sum();
    Ok(IsometryPair {
        pulled_back,
        half_line,
    })
}

/// Positive-frequency interval holding all but a `tol` fraction of the
/// spectral energy (relative to the peak bin).
pub fn spectral_band(f: &SampledSignal, tol: f64) -> Option<(f64, f64)> {
    let spec = fourier(f);
    let fg = spec.grid;
    let peak = spec.samples.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    if peak == 0.0 {
        return None;
    }
    let mut lo = None;
    let mut hi = None;
    for (j, z) in spec.samples.iter().enumerate() {
        let w = fg.point(j);
        if w > 0.0 && z.norm_sqr() > tol * peak {
            lo.get_or_insert(w);
            hi = Some(w);
        }
    }
    match (lo, hi) {
        (Some(lo), Some(hi)) => Some(((lo - fg.dx).max(fg.dx), (hi + fg.dx).min(f.grid.nyquist()))),
        _ => None,
    }
}

/// A log-frequency grid for I^{-1} f: u = −ln w covering the spectral band
/// of `f`, widened by `margin` on both sides, with between `min_count` and
/// `max_count` points.
pub fn log_grid_for(f: &SampledSignal, margin: f64, min_count: usize, max_count: usize) -> Result<Grid> {
    let (w_lo, w_hi) = spectral_band(f, 1e-16).ok_or(FrameError::ZeroNorm)?;
    let (u_lo, u_hi) = (-w_hi.ln() - margin, -w_lo.ln() + margin);
    let g = f.grid;
    let x_max = g.x0.abs().max(g.end().abs()).max(g.dx);
    // F(e^{-u}) oscillates in u at rate up to w_hi * x_max; sample twice that
    let du = PI / (2.0 * x_max * w_hi);
    let count = (((u_hi - u_lo) / du).ceil() as usize)
        .next_power_of_two()
        .clamp(min_count.max(256), max_count.max(min_count).max(256));
    Grid::spanning(u_lo, u_hi, count)
}

/// I h for a function of the log variable given pointwise:
/// F(Ih)(w) = w^{−1/2} h(−ln w) for w > 0 and 0 otherwise, sampled on `out`.
pub fn intertwiner_i_fn(h: impl Fn(f64) -> C64 + Sync, out: &Grid) -> SampledSignal {
    let fg = out.frequency_grid();
    let samples: Vec<C64> = (0..fg.count)
        .into_par_iter()
        .map(|j| {
            let w = fg.point(j);
            if w > 0.0 {
                h(-w.ln()) / w.sqrt()
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    let spec = SampledSignal {
        grid: fg,
        samples,
    };
    inv_fourier_onto(&spec, out).expect("frequency grid built from output grid")
}

/// I f, reading f between its samples by band-limited interpolation.
pub fn intertwiner_i(f: &SampledSignal, out: &Grid) -> SampledSignal {
    let fg = out.frequency_grid();
    let us: Vec<f64> = (0..fg.count)
        .map(|j| {
            let w = fg.point(j);
            if w > 0.0 {
                -w.ln()
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let vals = f.interpolate(&us);
    let samples = vals
        .into_iter()
        .enumerate()
        .map(|(j, z)| {
            let w = fg.point(j);
            if w > 0.0 {
                z / w.sqrt()
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    let spec = SampledSignal {
        grid: fg,
        samples,
    };
    inv_fourier_onto(&spec, out).expect("frequency grid built from output grid")
}

/// I^{-1} f on `log_grid`: u ↦ e^{−u/2} F(f)(e^{−u}). Negative-frequency
/// content is reported and dropped.
pub fn intertwiner_i_inv(f: &SampledSignal, log_grid: &Grid) -> HardyOutput {
    let domain = DomainReport::of(f);
    let us = log_grid.points();
    let nyq = f.grid.nyquist();
    let ws: Vec<f64> = us.iter().map(|u| (-u).exp()).collect();
    let spec = f.spectrum_at(&ws);
    let samples = spec
        .into_iter()
        .zip(&us)
        .zip(&ws)
        .map(|((z, u), w)| {
            if *w >= nyq {
                C64::new(0.0, 0.0)
            } else {
                z * (-u / 2.0).exp()
            }
        })
        .collect();
    HardyOutput {
        signal: SampledSignal {
            grid: *log_grid,
            samples,
        },
        domain,
    }
}

/// η̃^{A,B}(g) f together with how far the log-composition closed form
/// `e^{i(Av2+Bv1)} f(−log(c + e^{Av2−x}))` is from it.
#[derive(Clone, Debug)]
pub struct EtaTildeOutput {
    pub signal: SampledSignal,
    pub domain: DomainReport,
    /// Relative L² distance between the operator result and the closed form,
    /// measured on the points where the closed form is defined.
    pub closed_form_discrepancy: Option<f64>,
}

/// η̃^{A,B}(g) = I ∘ η^{A,B}(g) ∘ I^{-1}, evaluated on the grid of `f`.
pub fn eta_tilde_apply(
    p: &HeisRepParams,
    g: &HeisenbergElement,
    f: &SampledSignal,
) -> Result<EtaTildeOutput> {
    let base = log_grid_for(f, 1.0, 1 << 12, 1 << 15)?;
    // room for the shift by c on either side
    let pad = g.c.abs();
    let extra = (pad / base.dx).ceil() as usize;
    let count = (base.count + 2 * extra).next_power_of_two();
    let log_grid = Grid::new(
        base.x0 - pad - (count - base.count - 2 * extra) as f64 * base.dx / 2.0,
        base.dx,
        count,
    )?;
    let h = intertwiner_i_inv(f, &log_grid);
    let moved = eta_apply(p, g, &h.signal);
    let signal = intertwiner_i(&moved, &f.grid);
    let closed_form_discrepancy = eta_tilde_closed_form_gap(p, g, f, &signal);
    Ok(EtaTildeOutput {
        signal,
        domain: h.domain,
        closed_form_discrepancy,
    })
}

fn eta_tilde_closed_form_gap(
    p: &HeisRepParams,
    g: &HeisenbergElement,
    f: &SampledSignal,
    chain: &SampledSignal,
) -> Option<f64> {
    let xs = f.grid.points();
    let mut idx = Vec::new();
    let mut args = Vec::new();
    for (k, &x) in xs.iter().enumerate() {
        let inner = g.c + (p.a * g.v2 - x).exp();
        if inner > 0.0 && inner.is_finite() {
            idx.push(k);
            args.push(-inner.ln());
        }
    }
    if idx.is_empty() {
        return None;
    }
    let vals = f.interpolate(&args);
    let phase = C64::from_polar(1.0, p.a * g.v2 + p.b * g.v1);
    let mut diff = 0.0;
    let mut norm = 0.0;
    for (k, v) in idx.iter().zip(vals) {
        diff += (chain.samples[*k] - phase * v).norm_sqr();
        norm += chain.samples[*k].norm_sqr();
    }
    if norm == 0.0 {
        None
    } else {
        Some((diff / norm).sqrt())
    }
}

/// ‖ρ_ε^{a(ε),b(ε)}(P_ε(g)) f − η^{A,B}(g) f‖ / ‖f‖.
pub fn contraction_residual(
    s: &Schedule,
    eps: f64,
    g: &HeisenbergElement,
    f: &SampledSignal,
) -> Result<f64> {
    let nf = f.norm();
    if nf == 0.0 {
        return Err(FrameError::ZeroNorm);
    }
    let lhs = rho_eps_apply(&s.at(eps)?, &p_eps(eps, g)?, f);
    let rhs = eta_apply(&s.heisenberg(), g, f);
    Ok(lhs.sub(&rhs)?.norm() / nf)
}

/// U^b ⊗ χ_a (α, β, γ) applied to an analytic f: e^{iaγ} α^{−1/2} f((x + bβ)/α).
pub fn affine_closed_form(
    a: f64,
    b: f64,
    g: &EAElement,
    grid: Grid,
    f: impl Fn(f64) -> C64,
) -> SampledSignal {
    let scale = C64::from_polar(1.0 / g.alpha.sqrt(), a * g.gamma);
    SampledSignal::from_fn(grid, |x| scale * f((x + b * g.beta) / g.alpha))
}
