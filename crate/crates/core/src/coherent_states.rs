//! Coherent states of η^{A,B} and of the interpolating family ρ_ε ∘ P_ε,
//! their admissibility constants and truncated resolutions of the identity.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, FrameError, Result};
use crate::groups::{expm1_ratio, p_eps, HeisenbergElement};
use crate::numerics::{inner_product, weighted_norm_sq, SampledSignal, C64};
use crate::numerics::gauss_legendre;
use crate::representations::{eta_apply, rho_eps_apply, HeisRepParams, Schedule};

/// A point (q, p) of the phase plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(q: f64, p: f64) -> Self {
        Self { q, p }
    }

    /// The section (q, (qp/2, p)).
    pub fn section(&self) -> HeisenbergElement {
        HeisenbergElement::new(self.q, self.q * self.p / 2.0, self.p)
    }
}

fn nonzero(psi: &SampledSignal) -> Result<f64> {
    let n = psi.norm_sq();
    if n == 0.0 {
        param("fiducial state has zero norm")
    } else {
        Ok(n)
    }
}

/// η^{A,B}(q, (qp/2, p)) ψ.
pub fn cs_heisenberg(p: &HeisRepParams, pt: PhasePoint, psi: &SampledSignal) -> Result<SampledSignal> {
    nonzero(psi)?;
    Ok(eta_apply(p, &pt.section(), psi))
}

/// ρ_ε^{a(ε),b(ε)}(P_ε(q, (qp/2, p))) ψ.
pub fn cs_eps(s: &Schedule, eps: f64, pt: PhasePoint, psi: &SampledSignal) -> Result<SampledSignal> {
    nonzero(psi)?;
    Ok(rho_eps_apply(&s.at(eps)?, &p_eps(eps, &pt.section())?, psi))
}

/// 2π‖ψ‖⁴/|A|.
pub fn admissibility_heisenberg(p: &HeisRepParams, psi: &SampledSignal) -> f64 {
    let n = psi.norm_sq();
    2.0 * PI * n * n / p.a.abs()
}

/// (2π/|A − b0ε|) ‖ψ‖² ‖ψ‖²_{L²(e^{εx}dx)}.
pub fn admissibility_eps(big_a: f64, b0: f64, eps: f64, psi: &SampledSignal) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return param(format!("eps must lie in (0, 1], got {eps}"));
    }
    let d = big_a - b0 * eps;
    if d == 0.0 {
        return Err(FrameError::Singular("A - b0*eps = 0".into()));
    }
    Ok(2.0 * PI / d.abs() * psi.norm_sq() * weighted_norm_sq(psi, eps)?)
}

/// The admissibility constant as the double integral
/// (2π/|b(ε)|) ∫∫ |ψ(x)|² |ψ(x+t)|² e^{εt} e^{εx} dx dt/ε, by Gauss–Legendre
/// panels that break at the given nodes of non-smoothness of |ψ|².
pub fn admissibility_eps_quadrature(
    big_a: f64,
    b0: f64,
    eps: f64,
    abs_sq: impl Fn(f64) -> f64 + Sync,
    support: (f64, f64),
    joints: &[f64],
    panels: usize,
) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return param(format!("eps must lie in (0, 1], got {eps}"));
    }
    let b = b0 - big_a / eps;
    if b == 0.0 {
        return Err(FrameError::Singular("b(eps) = 0".into()));
    }
    let (lo, hi) = support;
    let mut breaks: Vec<f64> = joints.iter().copied().filter(|j| *j > lo && *j < hi).collect();
    breaks.push(lo);
    breaks.push(hi);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let piecewise = |f: &dyn Fn(f64) -> f64, shift: f64| -> f64 {
        breaks
            .windows(2)
            .map(|w| gauss_legendre(f, w[0] - shift, w[1] - shift, panels))
            .sum()
    };
    let outer: Vec<f64> = breaks
        .windows(2)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|w| {
            gauss_legendre(
                |x| {
                    let inner = piecewise(&|t: f64| abs_sq(x + t) * (eps * t).exp(), x);
                    abs_sq(x) * (eps * x).exp() * inner
                },
                w[0],
                w[1],
                panels,
            )
        })
        .collect();
    Ok(2.0 * PI / b.abs() / eps * outer.iter().sum::<f64>())
}

/// The invariant density (e^{εq} − 1)/(εq) on the phase plane; 1 at ε = 0.
pub fn mu_eps(eps: f64, q: f64) -> f64 {
    // (e^{u} − 1)/u = expm1_ratio(−u)
    expm1_ratio(-eps * q)
}

/// Which coherent-state family to integrate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CsFamily {
    Heisenberg(HeisRepParams),
    Eps(Schedule, f64),
}

/// Midpoint tensor rule on [−Q, Q] × [−P, P].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseWindow {
    pub q: f64,
    pub p: f64,
    pub nq: usize,
    pub np: usize,
}

impl Default for PhaseWindow {
    fn default() -> Self {
        Self { q: 6.0, p: 6.0, nq: 64, np: 64 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolutionCheck {
    pub inner: C64,
    pub reproduced: C64,
    pub residual: f64,
    pub constant: f64,
}

/// |⟨f|g⟩ − (‖ψ‖²/C) ∬ ⟨f|cs(q,p)⟩⟨cs(q,p)|g⟩ μ_ε(q) dq dp| on a truncated window.
pub fn resolution_identity_residual(
    family: &CsFamily,
    psi: &SampledSignal,
    f: &SampledSignal,
    g: &SampledSignal,
    win: &PhaseWindow,
) -> Result<ResolutionCheck> {
    let npsi = nonzero(psi)?;
    if win.nq == 0 || win.np == 0 || !(win.q > 0.0) || !(win.p > 0.0) {
        return param("phase window needs positive extents and node counts");
    }
    let constant = match family {
        CsFamily::Heisenberg(h) => admissibility_heisenberg(h, psi),
        CsFamily::Eps(s, eps) => admissibility_eps(s.big_a, s.b0, *eps, psi)?,
    };
    let inner = inner_product(f, g)?;
    let dq = 2.0 * win.q / win.nq as f64;
    let dp = 2.0 * win.p / win.np as f64;
    let rows: Vec<Result<C64>> = (0..win.nq)
        .into_par_iter()
        .map(|i| {
            let q = -win.q + (i as f64 + 0.5) * dq;
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..win.np {
                let pt = PhasePoint::new(q, -win.p + (j as f64 + 0.5) * dp);
                let (cs, weight) = match family {
                    CsFamily::Heisenberg(h) => (cs_heisenberg(h, pt, psi)?, 1.0),
                    CsFamily::Eps(s, eps) => (cs_eps(s, *eps, pt, psi)?, mu_eps(*eps, q)),
                };
                acc += inner_product(f, &cs)? * inner_product(&cs, g)? * weight;
            }
            Ok(acc)
        })
        .collect();
    let mut total = C64::new(0.0, 0.0);
    for r in rows {
        total += r?;
    }
    let reproduced = total * dq * dp * npsi / constant;
    Ok(ResolutionCheck {
        inner,
        reproduced,
        residual: (inner - reproduced).norm(),
        constant,
    })
}
