use std::f64::consts::FRAC_PI_2;

use crate::error::{param, FrameError, Result};
use crate::numerics::{Grid, SampledSignal};

/// Smooth ramp ν(t) = t²(3 − 2t) on [0, 1], clamped outside.
pub fn ramp(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

fn profile(h: f64, chi: f64, x: f64) -> f64 {
    let s = chi.sqrt();
    if x < -h || x > h {
        0.0
    } else if x <= 0.0 {
        s * (FRAC_PI_2 * ramp((x + h) / h)).sin()
    } else {
        s * (FRAC_PI_2 * ramp(x / h)).cos()
    }
}

/// Compactly supported fiducial with Σ_n |ψ(x + n q0)|² = χ.
///
/// The profile rises as √χ sin(π/2 ν) over [−q0, 0] and falls as
/// √χ cos(π/2 ν) over [0, q0], so neighbouring translates add up in
/// quadrature to χ. Its support [−q0, q0] lies inside [−L, L].
#[derive(Clone, Debug)]
pub struct MotherWavelet {
    pub psi: SampledSignal,
    pub l: f64,
    pub q0: f64,
    pub chi: f64,
}

impl MotherWavelet {
    /// ψ(x), evaluated from the closed form.
    pub fn value_at(&self, x: f64) -> f64 {
        profile(self.q0, self.chi, x)
    }

    /// Half-width of the support.
    pub fn half_width(&self) -> f64 {
        self.q0
    }

    /// Points where ψ is not C³.
    pub fn joints(&self) -> [f64; 3] {
        [-self.q0, 0.0, self.q0]
    }

    /// max_x |Σ_n |ψ(x + n q0)|² − χ| over the sample grid.
    pub fn partition_deviation(&self) -> f64 {
        let g = self.psi.grid;
        (0..g.count)
            .map(|k| {
                let x = g.point(k);
                let base = -(x / self.q0).floor() as i64;
                let sum: f64 = (base - 2..=base + 2)
                    .map(|n| self.value_at(x + n as f64 * self.q0).powi(2))
                    .sum();
                (sum - self.chi).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Build the fiducial for translation step `q0` with partition constant `chi`,
/// sampled on `grid`.
pub fn build_mother_wavelet(l: f64, q0: f64, chi: f64, grid: Grid) -> Result<MotherWavelet> {
    if !(l > 0.0) || !l.is_finite() {
        return param(format!("L must be positive, got {l}"));
    }
    if !(chi > 0.0) || !chi.is_finite() {
        return param(format!("chi must be positive, got {chi}"));
    }
    if !(q0 > 0.0) {
        return param(format!("q0 must be positive for the wavelet construction, got {q0}"));
    }
    if q0 > l {
        return Err(FrameError::UnsupportedConstruction(format!(
            "q0 = {q0} exceeds L = {l}; overlaps of more than two translates are not implemented"
        )));
    }
    Ok(MotherWavelet {
        psi: SampledSignal::from_real_fn(grid, |x| profile(q0, chi, x)),
        l,
        q0,
        chi,
    })
}
