use serde::{Deserialize, Serialize};

use super::atoms::{freq_atom, lattice_coeffs, time_atom};
use super::{AtomIndex, FrameConfig, Kind, MotherWavelet};
use crate::error::{param, Result};
use crate::groups::{expm1_ratio, HeisenbergElement};
use crate::numerics::{Grid, C64};
use crate::representations::{
    eta_tilde_apply, intertwiner_i_fn, pi_eps_apply_onto, DomainReport, EARepParams, HeisRepParams,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionPoint {
    pub eps: f64,
    /// ‖atom_ε − atom_0‖ / ‖atom_0‖ on the sampling grid.
    pub distance: f64,
}

/// Distance of the ε-atom with index `idx` from its ε = 0 counterpart, for
/// each ε in `eps_list`, both sampled on `grid`.
pub fn atom_contraction_report(
    cfg: &FrameConfig,
    mw: &MotherWavelet,
    kind: Kind,
    idx: AtomIndex,
    eps_list: &[f64],
    grid: &Grid,
) -> Result<Vec<ContractionPoint>> {
    let atom = |c: &FrameConfig| match kind {
        Kind::Time => time_atom(c, mw, idx, grid),
        Kind::Frequency => freq_atom(c, mw, idx, grid),
    };
    let base = atom(&cfg.with_eps(0.0)?)?;
    let nb = base.norm();
    if nb == 0.0 {
        return param("the limiting atom vanishes on this grid");
    }
    eps_list
        .iter()
        .map(|&eps| {
            if !(eps > 0.0 && eps <= 1.0) {
                return param(format!("eps must lie in (0, 1], got {eps}"));
            }
            let a = atom(&cfg.with_eps(eps)?)?;
            Ok(ContractionPoint {
                eps,
                distance: a.sub(&base)?.norm() / nb,
            })
        })
        .collect()
}

/// The two candidate values of γ_mn and how well each reproduces the ε = 0
/// phase p0 m (B + A n q0/2 + A x).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaConvention {
    pub eps: f64,
    pub index: AtomIndex,
    /// β ln α/(α − 1), the convention in use.
    pub gamma_used: f64,
    /// β εnq0/(e^{−εnq0} − 1), the opposite sign.
    pub gamma_alternative: f64,
    /// max over x ∈ [−L, L] of the phase mismatch with the ε = 0 atom.
    pub limit_mismatch_used: f64,
    pub limit_mismatch_alternative: f64,
    /// −u/(e^{−u} − 1) at u = εnq0 and its two first-order expansions.
    pub taylor_exact: f64,
    pub taylor_plus: f64,
    pub taylor_minus: f64,
}

pub fn gamma_convention(cfg: &FrameConfig, idx: AtomIndex, eps: f64) -> Result<GammaConvention> {
    let c = cfg.with_eps(eps)?;
    let e = lattice_coeffs(&c, idx)?;
    let (a, b) = c.ab();
    let u = eps * idx.n as f64 * c.q0;
    let alt = -e.gamma;
    let m = idx.m as f64;
    let limit = |x: f64| c.p0 * m * (c.big_b + c.big_a * idx.n as f64 * c.q0 / 2.0 + c.big_a * x);
    let mismatch = |gamma: f64| {
        (0..=64)
            .map(|k| {
                let x = -c.l + 2.0 * c.l * k as f64 / 64.0;
                (a * gamma + b * e.beta * (-eps * x).exp() - limit(x)).abs()
            })
            .fold(0.0, f64::max)
    };
    Ok(GammaConvention {
        eps,
        index: idx,
        gamma_used: e.gamma,
        gamma_alternative: alt,
        limit_mismatch_used: mismatch(e.gamma),
        limit_mismatch_alternative: mismatch(alt),
        taylor_exact: 1.0 / expm1_ratio(u),
        taylor_plus: 1.0 + u / 2.0,
        taylor_minus: 1.0 - u / 2.0,
    })
}

/// Relative distance, over the points where nq0 + e^{Amp0 − x} > 0, between
/// the ε = 0 band-limited atom and the log-composition expression
/// e^{i(Amp0 + Bnq0mp0/2)} ψ̃(−log(nq0 + e^{Amp0 − x})) with ψ̃ = Iψ.
/// `None` when that set is empty.
pub fn log_composition_gap(
    cfg: &FrameConfig,
    mw: &MotherWavelet,
    idx: AtomIndex,
    grid: &Grid,
) -> Result<Option<f64>> {
    let c = cfg.with_eps(0.0)?;
    let atom = freq_atom(&c, mw, idx, grid)?;
    let psi_tilde = intertwiner_i_fn(|u| C64::new(mw.value_at(u), 0.0), grid);
    let (n, m) = (idx.n as f64, idx.m as f64);
    let v2 = m * c.p0;
    let shift = n * c.q0;
    let mut pts = Vec::new();
    let mut args = Vec::new();
    for (k, x) in grid.points().into_iter().enumerate() {
        let inner = shift + (c.big_a * v2 - x).exp();
        if inner > 0.0 && inner.is_finite() {
            pts.push(k);
            args.push(-inner.ln());
        }
    }
    if pts.is_empty() {
        return Ok(None);
    }
    let phase = C64::from_polar(1.0, c.big_a * v2 + c.big_b * shift * v2 / 2.0);
    let vals = psi_tilde.interpolate(&args);
    let (mut diff, mut norm) = (0.0, 0.0);
    for (k, v) in pts.iter().zip(vals) {
        diff += (atom.samples[*k] - phase * v).norm_sqr();
        norm += atom.samples[*k].norm_sqr();
    }
    Ok((norm > 0.0).then(|| (diff / norm).sqrt()))
}

/// Band-limited atom from its spectrum against π_ε(lattice element) applied
/// to I(Q_ε ψ).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteCheck {
    pub eps: f64,
    pub index: AtomIndex,
    pub output_grid: Grid,
    pub max_error: f64,
    pub peak: f64,
    pub domain: DomainReport,
}

/// Compare the two routes to a band-limited atom. The fiducial I(Q_ε ψ) is
/// sampled on `input`; the atom is compared on a grid dilated by α^{1/ε},
/// centred on −bβ and deliberately offset from the input lattice.
pub fn route_consistency(
    cfg: &FrameConfig,
    mw: &MotherWavelet,
    idx: AtomIndex,
    input: &Grid,
) -> Result<RouteCheck> {
    let eps = cfg.eps;
    let e = lattice_coeffs(cfg, idx)?;
    let (a, b) = cfg.ab();
    let params = EARepParams::new(a, b, eps)?;
    let fid = intertwiner_i_fn(|u| C64::new((-eps * u / 2.0).exp() * mw.value_at(u), 0.0), input);
    let s = e.alpha.powf(1.0 / eps);
    let dx = s * input.dx * 0.97;
    let out = Grid::new(-b * e.beta - dx * (input.count / 2) as f64 + 0.31 * dx, dx, input.count)?;
    let route = pi_eps_apply_onto(&params, &e, &fid, &out);
    let direct = freq_atom(cfg, mw, idx, &out)?;
    let max_error = route.signal.sub(&direct)?.max_abs();
    Ok(RouteCheck {
        eps,
        index: idx,
        output_grid: out,
        max_error,
        peak: direct.max_abs(),
        domain: route.domain,
    })
}

/// Sign-convention and closed-form diagnostics, evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErratumReport {
    pub gamma: GammaConvention,
    /// Relative gap between I∘η∘I^{-1} and its log-composition closed form.
    pub eta_tilde_discrepancy: Option<f64>,
    /// Same comparison for an ε = 0 band-limited atom.
    pub log_composition_gap: Option<f64>,
    pub notes: Vec<String>,
}

/// Evaluate the erratum diagnostics at index (1, 1) on an 8192-point grid.
pub fn erratum_report(cfg: &FrameConfig, mw: &MotherWavelet) -> Result<ErratumReport> {
    let idx = AtomIndex::new(1, 1);
    let gamma = gamma_convention(cfg, idx, 1e-4)?;
    let grid = Grid::centered(8192, 0.1)?;
    let psi_tilde = intertwiner_i_fn(|u| C64::new(mw.value_at(u), 0.0), &grid);
    let heis = HeisRepParams::new(cfg.big_a, cfg.big_b)?;
    let g = HeisenbergElement::new(0.5, 0.5 * cfg.p0 / 2.0, cfg.p0);
    let eta = eta_tilde_apply(&heis, &g, &psi_tilde)?;
    let log_gap = log_composition_gap(cfg, mw, idx, &grid)?;
    let notes = vec![
        format!(
            "gamma_mn = beta ln(alpha)/(alpha - 1) (= {:.6e}); the opposite sign gives {:.6e} and misses the eps -> 0 phase by {:.3e} vs {:.3e}",
            gamma.gamma_used, gamma.gamma_alternative, gamma.limit_mismatch_alternative, gamma.limit_mismatch_used
        ),
        format!(
            "u/(1 - e^-u) at u = {:.1e} is {:.12}: 1 + u/2 = {:.12}, 1 - u/2 = {:.12}",
            1e-4 * cfg.q0,
            gamma.taylor_exact,
            gamma.taylor_plus,
            gamma.taylor_minus
        ),
        match eta.closed_form_discrepancy {
            Some(d) => format!("I eta I^-1 differs from the log-composition formula by {d:.3e} (relative L2)"),
            None => "log-composition formula for I eta I^-1 undefined on the whole grid".into(),
        },
        match log_gap {
            Some(d) => format!("eps = 0 band-limited atom (1, 1) differs from its log-composition formula by {d:.3e}"),
            None => "log-composition formula for atom (1, 1) undefined on the whole grid".into(),
        },
    ];
    Ok(ErratumReport {
        gamma,
        eta_tilde_discrepancy: eta.closed_form_discrepancy,
        log_composition_gap: log_gap,
        notes,
    })
}
