use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::atoms::{frame_constant, Row};
use super::{CoefficientTable, FrameConfig, Kind, MotherWavelet, Window};
use crate::error::{param, FrameError, Result};
use crate::numerics::{relative_distance, Grid, SampledSignal, C64};
use crate::representations::{intertwiner_i, intertwiner_i_inv, log_grid_for, DomainReport};

/// Steps between exact re-evaluations of e^{i m ph} in the m-recurrences.
const ANCHOR: i64 = 64;

/// How `analyze_auto` grows the m-range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutoWindowRule {
    /// m-values added per side in each step.
    pub block: i64,
    /// Stop once a block carries at most this share of the energy so far.
    pub tail_tol: f64,
    /// A block that grows after the tail fell below this share marks the
    /// onset of aliasing on the grid and is dropped.
    pub alias_floor: f64,
    /// Hard limit on |m|.
    pub max_m: i64,
}

impl Default for AutoWindowRule {
    fn default() -> Self {
        Self {
            block: 16,
            tail_tol: 1e-13,
            alias_floor: 1e-7,
            max_m: 4096,
        }
    }
}

/// One row of the analysis operator restricted to the grid points where the
/// atoms of that row live.
struct RowKernel {
    weights: Vec<C64>,
    phase: Vec<f64>,
}

impl RowKernel {
    fn new(row: &Row, mw: &MotherWavelet, s: &SampledSignal) -> Option<Self> {
        let g = s.grid;
        let (lo, hi) = row.support(mw);
        let k0 = (((lo - g.x0) / g.dx).floor().max(0.0)) as usize;
        let k1 = ((((hi - g.x0) / g.dx).ceil()) as usize + 1).min(g.count);
        let mut weights = Vec::new();
        let mut phase = Vec::new();
        for k in k0..k1 {
            let x = g.point(k);
            let env = row.envelope(mw, x);
            let v = s.samples[k];
            if env != 0.0 && v != C64::new(0.0, 0.0) {
                weights.push(v * env * g.dx);
                phase.push(row.phase(x));
            }
        }
        if weights.is_empty() {
            None
        } else {
            Some(Self { weights, phase })
        }
    }

    /// Σ_k w_k e^{−i m ph_k} for m = m1..=m2.
    fn coeffs(&self, m1: i64, m2: i64) -> Vec<C64> {
        let step: Vec<C64> = self.phase.iter().map(|p| C64::from_polar(1.0, -p)).collect();
        let mut cur = vec![C64::new(0.0, 0.0); self.weights.len()];
        let mut out = Vec::with_capacity((m2 - m1 + 1) as usize);
        for m in m1..=m2 {
            if (m - m1) % ANCHOR == 0 {
                for ((c, w), p) in cur.iter_mut().zip(&self.weights).zip(&self.phase) {
                    *c = w * C64::from_polar(1.0, -(m as f64) * p);
                }
            } else {
                for (c, s) in cur.iter_mut().zip(&step) {
                    *c *= s;
                }
            }
            out.push(cur.iter().sum());
        }
        out
    }
}

fn check_inputs(cfg: &FrameConfig, mw: &MotherWavelet) -> Result<()> {
    cfg.validate()?;
    cfg.check_wavelet(mw)
}

/// Coefficients of time atoms against `s` on its own grid, row-major.
fn analyze_domain(cfg: &FrameConfig, mw: &MotherWavelet, s: &SampledSignal, w: &Window) -> Vec<C64> {
    let rows: Vec<Vec<C64>> = (w.n1..=w.n2)
        .into_par_iter()
        .map(|n| match RowKernel::new(&Row::new(cfg, n), mw, s) {
            Some(kern) => kern.coeffs(w.m1, w.m2),
            None => vec![C64::new(0.0, 0.0); w.m_count()],
        })
        .collect();
    rows.concat()
}

/// (1/C) Σ c_(n,m) atom_(n,m) on `grid`.
fn synthesize_domain(
    cfg: &FrameConfig,
    mw: &MotherWavelet,
    grid: &Grid,
    w: &Window,
    entries: &[C64],
) -> SampledSignal {
    let rows: Vec<Row> = (w.n1..=w.n2).map(|n| Row::new(cfg, n)).collect();
    let mc = w.m_count();
    let scale = 1.0 / frame_constant(cfg);
    let samples: Vec<C64> = (0..grid.count)
        .into_par_iter()
        .map(|k| {
            let x = grid.point(k);
            let mut acc = C64::new(0.0, 0.0);
            for (r, row) in rows.iter().enumerate() {
                let env = row.envelope(mw, x);
                if env == 0.0 {
                    continue;
                }
                let coeffs = &entries[r * mc..(r + 1) * mc];
                if coeffs.iter().all(|c| *c == C64::new(0.0, 0.0)) {
                    continue;
                }
                let ph = row.phase(x);
                let step = C64::from_polar(1.0, ph);
                let mut e = C64::new(0.0, 0.0);
                let mut s = C64::new(0.0, 0.0);
                for (j, c) in coeffs.iter().enumerate() {
                    let m = w.m1 + j as i64;
                    if j as i64 % ANCHOR == 0 {
                        e = C64::from_polar(1.0, m as f64 * ph);
                    } else {
                        e *= step;
                    }
                    s += c * e;
                }
                acc += s * env;
            }
            acc * scale
        })
        .collect();
    SampledSignal {
        grid: *grid,
        samples,
    }
}

/// Log-frequency carrier of a band-limited signal: I^{-1} f on a grid fine
/// enough for both the signal and high-m atoms.
fn to_log_domain(f: &SampledSignal) -> Result<(SampledSignal, DomainReport)> {
    let grid = log_grid_for(f, 0.5, 1 << 14, 1 << 15)?;
    let out = intertwiner_i_inv(f, &grid);
    Ok((out.signal, out.domain))
}

/// ⟨atom_(n,m)|f⟩ for every index of `window`.
///
/// Band-limited atoms are the images of the time atoms under the unitary I,
/// so their coefficients are computed as time coefficients of I^{-1} f on a
/// log-frequency grid.
pub fn analyze(
    cfg: &FrameConfig,
    mw: &MotherWavelet,
    kind: Kind,
    f: &SampledSignal,
    window: Window,
) -> Result<CoefficientTable> {
    check_inputs(cfg, mw)?;
    match kind {
        Kind::Time => Ok(CoefficientTable {
            cfg: *cfg,
            kind,
            window,
            entries: analyze_domain(cfg, mw, f, &window),
            grid: f.grid,
            log_grid: None,
        }),
        Kind::Frequency => {
            let (h, _) = to_log_domain(f)?;
            Ok(CoefficientTable {
                cfg: *cfg,
                kind,
                window,
                entries: analyze_domain(cfg, mw, &h, &window),
                grid: f.grid,
                log_grid: Some(h.grid),
            })
        }
    }
}

/// Rows n whose atoms overlap the essential support of `s`.
fn row_range(cfg: &FrameConfig, mw: &MotherWavelet, s: &SampledSignal) -> Option<(i64, i64)> {
    let peak = s.samples.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    let idx: Vec<usize> = s
        .samples
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm_sqr() > 1e-28 * peak)
        .map(|(k, _)| k)
        .collect();
    let (first, last) = (*idx.first()?, *idx.last()?);
    let (x_lo, x_hi) = (s.grid.point(first), s.grid.point(last));
    let h = mw.half_width();
    let q0 = cfg.q0;
    let n_min = (-(h + x_hi) / q0).floor() as i64 + 1;
    let n_max = ((h - x_lo) / q0).ceil() as i64 - 1;
    (n_min <= n_max).then_some((n_min, n_max))
}

fn grow_window(
    cfg: &FrameConfig,
    mw: &MotherWavelet,
    s: &SampledSignal,
    rule: &AutoWindowRule,
) -> Result<(Window, Vec<C64>)> {
    let (n1, n2) = row_range(cfg, mw, s).ok_or(FrameError::ZeroNorm)?;
    let kernels: Vec<Option<RowKernel>> = (n1..=n2)
        .into_par_iter()
        .map(|n| RowKernel::new(&Row::new(cfg, n), mw, s))
        .collect();
    let block = rule.block.max(1);
    let cap = rule.max_m.max(block);
    // per-row coefficient columns for m = -M..=M, grown symmetrically
    let mut pos: Vec<Vec<C64>> = vec![Vec::new(); kernels.len()];
    let mut neg: Vec<Vec<C64>> = vec![Vec::new(); kernels.len()];
    let mut total = 0.0;
    let mut prev_block = f64::INFINITY;
    let mut m_hi = -1i64;
    loop {
        let lo = m_hi + 1;
        let hi = (lo + block - 1).min(cap);
        let parts: Vec<(Vec<C64>, Vec<C64>)> = kernels
            .par_iter()
            .map(|k| match k {
                Some(k) => {
                    let p = k.coeffs(lo, hi);
                    let mut n = k.coeffs(-hi, -lo.max(1));
                    n.reverse();
                    (p, n)
                }
                None => (
                    vec![C64::new(0.0, 0.0); (hi - lo + 1) as usize],
                    vec![C64::new(0.0, 0.0); (hi - lo.max(1) + 1) as usize],
                ),
            })
            .collect();
        let energy: f64 = parts
            .iter()
            .map(|(p, n)| p.iter().chain(n).map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        if lo > 0 && energy > prev_block && prev_block <= rule.alias_floor * total {
            break;
        }
        for (r, (p, n)) in parts.into_iter().enumerate() {
            pos[r].extend(p);
            neg[r].extend(n);
        }
        total += energy;
        m_hi = hi;
        if total == 0.0 {
            return Err(FrameError::ZeroNorm);
        }
        if (lo > 0 && energy <= rule.tail_tol * total) || hi >= cap {
            break;
        }
        prev_block = energy;
    }
    let window = Window::new(n1, n2, -m_hi, m_hi)?;
    let mut entries = Vec::with_capacity(window.len());
    for r in 0..kernels.len() {
        entries.extend(neg[r][..m_hi as usize].iter().rev());
        entries.extend(&pos[r][..=m_hi as usize]);
    }
    Ok((window, entries))
}

/// Analysis on a window chosen from the data: every row touching the
/// signal, and |m| grown until the coefficient tail is negligible.
pub fn analyze_auto(
    cfg: &FrameConfig,
    mw: &MotherWavelet,
    kind: Kind,
    f: &SampledSignal,
    rule: &AutoWindowRule,
) -> Result<CoefficientTable> {
    check_inputs(cfg, mw)?;
    if f.norm_sq() == 0.0 {
        return Err(FrameError::ZeroNorm);
    }
    let (domain, log_grid) = match kind {
        Kind::Time => (f.clone(), None),
        Kind::Frequency => {
            let (h, _) = to_log_domain(f)?;
            let g = h.grid;
            (h, Some(g))
        }
    };
    let (window, entries) = grow_window(cfg, mw, &domain, rule)?;
    Ok(CoefficientTable {
        cfg: *cfg,
        kind,
        window,
        entries,
        grid: f.grid,
        log_grid,
    })
}

/// (1/C) Σ_window c_(n,m) atom_(n,m), on the grid of the analysed signal.
pub fn synthesize(cfg: &FrameConfig, mw: &MotherWavelet, table: &CoefficientTable) -> Result<SampledSignal> {
    check_inputs(cfg, mw)?;
    if !cfg.matches(&table.cfg) {
        return param("coefficient table was computed for a different frame configuration");
    }
    if table.entries.len() != table.window.len() {
        return param("coefficient table does not fill its window");
    }
    match table.kind {
        Kind::Time => Ok(synthesize_domain(cfg, mw, &table.grid, &table.window, &table.entries)),
        Kind::Frequency => {
            let lg = table
                .log_grid
                .ok_or_else(|| FrameError::Parameter("band-limited table lacks its log grid".into()))?;
            let h = synthesize_domain(cfg, mw, &lg, &table.window, &table.entries);
            Ok(intertwiner_i(&h, &table.grid))
        }
    }
}

/// Σ_window |⟨atom|f⟩|² against ‖f‖² and the frame constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightnessReport {
    pub ratio: f64,
    pub frame_constant: f64,
    pub relative_deviation: f64,
    pub window: Window,
    pub boundary_fraction: f64,
    pub signal_norm_sq: f64,
}

pub fn tightness_ratio(table: &CoefficientTable, f: &SampledSignal) -> Result<TightnessReport> {
    let nf = f.norm_sq();
    if nf == 0.0 {
        return Err(FrameError::ZeroNorm);
    }
    let ratio = table.energy() / nf;
    let c = frame_constant(&table.cfg);
    Ok(TightnessReport {
        ratio,
        frame_constant: c,
        relative_deviation: ratio / c - 1.0,
        window: table.window,
        boundary_fraction: table.boundary_fraction(),
        signal_norm_sq: nf,
    })
}

/// ‖synthesize(analyze(f)) − f‖ / ‖f‖.
pub fn reconstruction_error(
    cfg: &FrameConfig,
    mw: &MotherWavelet,
    table: &CoefficientTable,
    f: &SampledSignal,
) -> Result<f64> {
    let rec = synthesize(cfg, mw, table)?;
    relative_distance(&rec, f)
}
