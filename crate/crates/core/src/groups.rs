//! The Heisenberg group H, the extended affine group EA and the contraction
//! maps P_ε carrying EA onto H as ε → 0⁺.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

const BRANCH: f64 = 1e-8;

/// The element (c, (v1, v2)) of ℝ² ⋊ ℝ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergElement {
    pub c: f64,
    pub v1: f64,
    pub v2: f64,
}

impl HeisenbergElement {
    pub const IDENTITY: Self = Self { c: 0.0, v1: 0.0, v2: 0.0 };

    pub fn new(c: f64, v1: f64, v2: f64) -> Self {
        Self { c, v1, v2 }
    }

    pub fn inverse(&self) -> Self {
        Self {
            c: -self.c,
            v1: -self.v1 + self.c * self.v2,
            v2: -self.v2,
        }
    }

    /// Largest componentwise difference.
    pub fn max_diff(&self, other: &Self) -> f64 {
        (self.c - other.c)
            .abs()
            .max((self.v1 - other.v1).abs())
            .max((self.v2 - other.v2).abs())
    }
}

/// The element (α, β, γ) of EA, α > 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EAElement {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EAElement {
    pub const IDENTITY: Self = Self { alpha: 1.0, beta: 0.0, gamma: 0.0 };

    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return param(format!("alpha must be positive, got {alpha}"));
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub fn inverse(&self) -> Self {
        Self {
            alpha: 1.0 / self.alpha,
            beta: -self.beta / self.alpha,
            gamma: -self.gamma,
        }
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        (self.alpha - other.alpha)
            .abs()
            .max((self.beta - other.beta).abs())
            .max((self.gamma - other.gamma).abs())
    }
}

/// (α, v)(β, u) = (α + β, φ_α(u) + v) with φ_α(x1, x2) = (x1 + α x2, x2).
pub fn h_mul(g: &HeisenbergElement, h: &HeisenbergElement) -> HeisenbergElement {
    HeisenbergElement {
        c: g.c + h.c,
        v1: g.v1 + h.v1 + g.c * h.v2,
        v2: g.v2 + h.v2,
    }
}

/// (α, β, γ)(x, y, z) = (αx, αy + β, γ + z).
pub fn ea_mul(g: &EAElement, h: &EAElement) -> EAElement {
    EAElement {
        alpha: g.alpha * h.alpha,
        beta: g.alpha * h.beta + g.beta,
        gamma: g.gamma + h.gamma,
    }
}

/// (e^{-u} − 1)/(−u), equal to 1 at u = 0.
pub fn expm1_ratio(u: f64) -> f64 {
    if u.abs() < BRANCH {
        1.0 - u / 2.0 + u * u / 6.0
    } else {
        (-u).exp_m1() / (-u)
    }
}

/// ln α/(α − 1), equal to 1 at α = 1.
pub fn log_ratio(alpha: f64) -> f64 {
    let d = alpha - 1.0;
    if d.abs() < BRANCH {
        1.0 - d / 2.0 + d * d / 3.0
    } else {
        d.ln_1p() / d
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        param(format!("eps must lie in (0, 1], got {eps}"))
    }
}

/// P_ε(x, (y, z)) = (e^{−εx}, z(e^{−εx} − 1)/(−εx), z + ε(y − xz/2)).
pub fn p_eps(eps: f64, g: &HeisenbergElement) -> Result<EAElement> {
    check_eps(eps)?;
    let (x, y, z) = (g.c, g.v1, g.v2);
    let u = eps * x;
    Ok(EAElement {
        alpha: (-u).exp(),
        beta: z * expm1_ratio(u),
        gamma: z + eps * (y - x * z / 2.0),
    })
}

/// Inverse of [`p_eps`].
pub fn p_eps_inv(eps: f64, g: &EAElement) -> Result<HeisenbergElement> {
    check_eps(eps)?;
    if !(g.alpha > 0.0) {
        return param(format!("alpha must be positive, got {}", g.alpha));
    }
    let ln_a = g.alpha.ln();
    let z = g.beta * log_ratio(g.alpha);
    let x = -ln_a / eps;
    // y from γ = z + ε(y − xz/2)
    let y = (g.gamma - z) / eps + x * z / 2.0;
    Ok(HeisenbergElement { c: x, v1: y, v2: z })
}

/// x ·_ε y = P_ε^{-1}(P_ε(x) P_ε(y)); at ε = 0 the Heisenberg product.
pub fn g_eps_mul(eps: f64, x: &HeisenbergElement, y: &HeisenbergElement) -> Result<HeisenbergElement> {
    if eps == 0.0 {
        return Ok(h_mul(x, y));
    }
    let prod = ea_mul(&p_eps(eps, x)?, &p_eps(eps, y)?);
    p_eps_inv(eps, &prod)
}
