use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use framelab::coherent_states::{
    admissibility_eps, admissibility_eps_quadrature, admissibility_heisenberg, resolution_identity_residual,
    CsFamily, PhaseWindow,
};
use framelab::frames::*;
use framelab::groups::{g_eps_mul, h_mul, HeisenbergElement};
use framelab::io::{read_signal, read_table, sidecar_path, write_signal, write_table};
use framelab::numerics::gauss_legendre;
use framelab::representations::HeisRepParams;
use framelab::signals::{band_limited, gaussian, time_localized};
use framelab::{FrameError, SampledSignal};

use crate::config::RunConfig;

/// What a command found: `pass` is false when any requested check failed.
pub struct Outcome {
    pub pass: bool,
}

fn emit<T: Serialize>(report: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(report)? + "\n";
    if let Some(p) = out {
        std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
    }
    io::stdout().write_all(text.as_bytes())?;
    Ok(())
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

fn wavelet(rc: &RunConfig) -> Result<MotherWavelet> {
    let f = &rc.frame;
    Ok(build_mother_wavelet(f.l, f.q0, f.chi, rc.wavelet_grid()?)?)
}

/// The input signal, or a seeded test signal matching the kind.
fn signal(rc: &RunConfig) -> Result<SampledSignal> {
    if let Some(p) = &rc.input {
        return read_signal(p).with_context(|| format!("reading {}", p.display()));
    }
    let g = rc.grid()?;
    let l = rc.frame.l;
    Ok(match rc.kind {
        Kind::Time => time_localized(rc.seed, g, -l, l, rc.terms)?,
        Kind::Frequency => band_limited(rc.seed, g, l, rc.terms)?,
    })
}

fn table(rc: &RunConfig, cfg: &FrameConfig, mw: &MotherWavelet, f: &SampledSignal) -> Result<CoefficientTable> {
    Ok(match rc.window {
        Some(w) => analyze(cfg, mw, rc.kind, f, w)?,
        None => analyze_auto(cfg, mw, rc.kind, f, &AutoWindowRule::default())?,
    })
}

fn boundary_warning(rc: &RunConfig, fraction: f64) -> Option<String> {
    (fraction > rc.boundary_warn).then(|| {
        format!(
            "boundary atoms carry {fraction:.3e} of the coefficient energy (> {:.0e}); the window may be too small or the grid too coarse",
            rc.boundary_warn
        )
    })
}

fn default_out(rc: &RunConfig, name: &str) -> PathBuf {
    rc.out.clone().unwrap_or_else(|| PathBuf::from(name))
}

#[derive(Serialize)]
struct WaveletReport {
    #[serde(rename = "L")]
    l: f64,
    q0: f64,
    chi: f64,
    count: usize,
    partition_deviation: f64,
    norm_sq: f64,
    expected_norm_sq: f64,
    pass: bool,
}

pub fn gen_wavelet(rc: &RunConfig) -> Result<Outcome> {
    let mw = wavelet(rc)?;
    let out = default_out(rc, "wavelet.csv");
    write_signal(&out, &mw.psi)?;
    let f = &rc.frame;
    let dev = mw.partition_deviation();
    let norm_sq = mw.psi.norm_sq();
    let expected = f.chi * f.q0;
    let pass = dev <= 1e-12 * f.chi.max(1.0) && (norm_sq - expected).abs() <= 1e-6 * expected;
    let report = WaveletReport {
        l: f.l,
        q0: f.q0,
        chi: f.chi,
        count: rc.wavelet_count,
        partition_deviation: dev,
        norm_sq,
        expected_norm_sq: expected,
        pass,
    };
    emit(&report, Some(&sidecar_path(&out)))?;
    Ok(Outcome { pass })
}

#[derive(Serialize)]
struct AtomReport {
    n: i64,
    m: i64,
    x0: f64,
    dx: f64,
    count: usize,
    norm_sq: f64,
}

pub fn atoms(rc: &RunConfig) -> Result<Outcome> {
    let mw = wavelet(rc)?;
    let cfg = rc.frame;
    let window = rc.window.unwrap_or(Window::new(rc.index.n, rc.index.n, rc.index.m, rc.index.m)?);
    let out = default_out(rc, "atoms.csv");
    let mut w = BufWriter::new(File::create(&out).with_context(|| format!("creating {}", out.display()))?);
    writeln!(w, "n,m,x,re,im")?;
    let mut reports = Vec::new();
    for idx in window.indices() {
        let grid = match rc.kind {
            Kind::Time => atom_grid(&mw, idx.n, 1e-3)?,
            Kind::Frequency => freq_atom_grid(&mw, idx.n, 8192)?,
        };
        let a = match rc.kind {
            Kind::Time => time_atom(&cfg, &mw, idx, &grid)?,
            Kind::Frequency => freq_atom(&cfg, &mw, idx, &grid)?,
        };
        for (k, z) in a.samples.iter().enumerate() {
            writeln!(w, "{},{},{:.16e},{:.16e},{:.16e}", idx.n, idx.m, grid.point(k), z.re, z.im)?;
        }
        reports.push(AtomReport {
            n: idx.n,
            m: idx.m,
            x0: grid.x0,
            dx: grid.dx,
            count: grid.count,
            norm_sq: a.norm_sq(),
        });
    }
    w.flush()?;
    emit(&reports, None)?;
    Ok(Outcome { pass: true })
}

#[derive(Serialize)]
struct AnalyzeReport {
    kind: Kind,
    eps: f64,
    window: Window,
    coefficients: usize,
    energy: f64,
    frame_constant: f64,
    relative_deviation: f64,
    boundary_fraction: f64,
    table: String,
    warning: Option<String>,
}

pub fn analyze_cmd(rc: &RunConfig) -> Result<Outcome> {
    if rc.input.is_none() {
        bail!("analyze needs --input <signal.csv>");
    }
    let mw = wavelet(rc)?;
    let f = signal(rc)?;
    let t = table(rc, &rc.frame, &mw, &f)?;
    let out = default_out(rc, "coefficients.csv");
    write_table(&out, &t)?;
    let tr = tightness_ratio(&t, &f)?;
    let warning = boundary_warning(rc, tr.boundary_fraction);
    if let Some(w) = &warning {
        warn(w);
    }
    emit(
        &AnalyzeReport {
            kind: t.kind,
            eps: t.eps(),
            window: t.window,
            coefficients: t.entries.len(),
            energy: t.energy(),
            frame_constant: tr.frame_constant,
            relative_deviation: tr.relative_deviation,
            boundary_fraction: tr.boundary_fraction,
            table: out.display().to_string(),
            warning,
        },
        None,
    )?;
    Ok(Outcome { pass: true })
}

#[derive(Serialize)]
struct ReconstructReport {
    kind: Kind,
    eps: f64,
    output: String,
    relative_error: Option<f64>,
    tolerance: f64,
    pass: bool,
}

pub fn reconstruct(rc: &RunConfig) -> Result<Outcome> {
    let Some(path) = &rc.input else {
        bail!("reconstruct needs --input <coefficients.csv>");
    };
    let t = read_table(path).with_context(|| format!("reading {}", path.display()))?;
    if !rc.frame.matches(&t.cfg) {
        bail!(
            "configuration mismatch: table {} was computed with eps = {}, A = {}, B = {}, L = {}, q0 = {}, chi = {}; requested eps = {}, A = {}, B = {}, L = {}, q0 = {}, chi = {}",
            path.display(),
            t.cfg.eps,
            t.cfg.big_a,
            t.cfg.big_b,
            t.cfg.l,
            t.cfg.q0,
            t.cfg.chi,
            rc.frame.eps,
            rc.frame.big_a,
            rc.frame.big_b,
            rc.frame.l,
            rc.frame.q0,
            rc.frame.chi
        );
    }
    let mw = wavelet(rc)?;
    let rec = synthesize(&rc.frame, &mw, &t)?;
    let out = default_out(rc, "reconstruction.csv");
    write_signal(&out, &rec)?;
    let relative_error = match &rc.reference {
        Some(p) => {
            let f = read_signal(p).with_context(|| format!("reading {}", p.display()))?;
            Some(framelab::numerics::relative_distance(&rec, &f)?)
        }
        None => None,
    };
    let pass = relative_error.is_none_or(|e| e <= rc.recon_tol);
    emit(
        &ReconstructReport {
            kind: t.kind,
            eps: t.eps(),
            output: out.display().to_string(),
            relative_error,
            tolerance: rc.recon_tol,
            pass,
        },
        None,
    )?;
    Ok(Outcome { pass })
}

#[derive(Serialize)]
struct TightReport {
    kind: Kind,
    eps: f64,
    seed: Option<u64>,
    tightness_ratio: f64,
    frame_constant: f64,
    relative_deviation: f64,
    tolerance: f64,
    window: Window,
    boundary_fraction: f64,
    warning: Option<String>,
    pass: bool,
}

pub fn verify_tight(rc: &RunConfig) -> Result<Outcome> {
    let mw = wavelet(rc)?;
    let f = signal(rc)?;
    if f.norm_sq() == 0.0 {
        return Err(FrameError::ZeroNorm.into());
    }
    let t = table(rc, &rc.frame, &mw, &f)?;
    let tr = tightness_ratio(&t, &f)?;
    let warning = boundary_warning(rc, tr.boundary_fraction);
    if let Some(w) = &warning {
        warn(w);
    }
    let pass = tr.relative_deviation.abs() <= rc.tight_tol;
    emit(
        &TightReport {
            kind: rc.kind,
            eps: rc.frame.eps,
            seed: rc.input.is_none().then_some(rc.seed),
            tightness_ratio: tr.ratio,
            frame_constant: tr.frame_constant,
            relative_deviation: tr.relative_deviation,
            tolerance: rc.tight_tol,
            window: tr.window,
            boundary_fraction: tr.boundary_fraction,
            warning,
            pass,
        },
        rc.out.as_deref(),
    )?;
    Ok(Outcome { pass })
}

fn atom_sampling_grid(rc: &RunConfig, mw: &MotherWavelet, idx: AtomIndex) -> Result<framelab::Grid> {
    Ok(match rc.kind {
        Kind::Time => atom_grid(mw, idx.n, 1e-3)?,
        Kind::Frequency => freq_atom_grid(mw, idx.n, 8192)?,
    })
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        bail!("invalid parameter: every eps in eps_list must lie in (0, 1], got {eps}");
    }
    Ok(())
}

pub fn sweep_eps(rc: &RunConfig) -> Result<Outcome> {
    for &e in &rc.eps_list {
        check_eps(e)?;
    }
    let mw = wavelet(rc)?;
    let f = signal(rc)?;
    if f.norm_sq() == 0.0 {
        return Err(FrameError::ZeroNorm.into());
    }
    let idx = rc.index;
    let agrid = atom_sampling_grid(rc, &mw, idx)?;
    let mut lines = vec![format!(
        "eps,status,frame_constant,closed_form,tightness_deviation,atom_distance_{}_{},reconstruction_error",
        idx.n, idx.m
    )];
    let mut pass = true;
    let mut distances = Vec::new();
    for &eps in &rc.eps_list {
        let cfg = match rc.frame.with_eps(eps) {
            Ok(c) => c,
            Err(FrameError::Singular(msg)) => {
                warn(&format!("eps = {eps} skipped: {msg}"));
                lines.push(format!("{eps:e},singular,,,,,"));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let c = frame_constant(&cfg);
        let closed = 2.0 * cfg.chi * (eps * cfg.l).sinh() / eps;
        let t = table(rc, &cfg, &mw, &f)?;
        let dev = tightness_ratio(&t, &f)?.relative_deviation;
        let rec = reconstruction_error(&cfg, &mw, &t, &f)?;
        let d = atom_contraction_report(&rc.frame, &mw, rc.kind, idx, &[eps], &agrid)?[0].distance;
        distances.push((eps, d));
        pass &= dev.abs() <= rc.tight_tol && rec <= rc.recon_tol;
        lines.push(format!("{eps:e},ok,{c:.16e},{closed:.16e},{dev:.6e},{d:.6e},{rec:.6e}"));
    }
    distances.sort_by(|a, b| a.0.total_cmp(&b.0));
    let monotone = distances.windows(2).all(|w| w[1].1 >= w[0].1);
    if !monotone {
        warn("atom distances are not increasing with eps");
    }
    pass &= monotone;
    let text = lines.join("\n") + "\n";
    if let Some(p) = &rc.out {
        std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
    }
    io::stdout().write_all(text.as_bytes())?;
    Ok(Outcome { pass })
}

#[derive(Serialize)]
struct AtomContraction {
    n: i64,
    m: i64,
    eps: f64,
    distance: f64,
    halving_rate: f64,
    pass: bool,
}

#[derive(Serialize)]
struct GroupContraction {
    pairs: usize,
    eps: f64,
    max_error_over_eps: f64,
    min_rate: f64,
    max_rate: f64,
    pass: bool,
}

#[derive(Serialize)]
struct ContractionReport {
    kind: Kind,
    distance_tolerance: f64,
    rate_band: (f64, f64),
    atoms: Vec<AtomContraction>,
    group: GroupContraction,
    pass: bool,
}

pub fn verify_contraction(rc: &RunConfig) -> Result<Outcome> {
    check_eps(rc.contraction_eps)?;
    let mw = wavelet(rc)?;
    let eps = rc.contraction_eps;
    let in_band = |r: f64| (rc.rate_band.0..=rc.rate_band.1).contains(&r);
    let mut atoms = Vec::new();
    for &idx in &rc.indices {
        let grid = atom_sampling_grid(rc, &mw, idx)?;
        let r = atom_contraction_report(&rc.frame, &mw, rc.kind, idx, &[eps, eps / 2.0], &grid)?;
        let rate = r[0].distance / r[1].distance;
        atoms.push(AtomContraction {
            n: idx.n,
            m: idx.m,
            eps,
            distance: r[0].distance,
            halving_rate: rate,
            pass: r[0].distance <= rc.atom_tol && in_band(rate),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rc.seed);
    let mut draw = || HeisenbergElement::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let (mut worst, mut lo, mut hi) = (0.0f64, f64::INFINITY, 0.0f64);
    for _ in 0..100 {
        let (x, y) = (draw(), draw());
        let exact = h_mul(&x, &y);
        let e1 = g_eps_mul(eps, &x, &y)?.max_diff(&exact);
        let e2 = g_eps_mul(eps / 2.0, &x, &y)?.max_diff(&exact);
        worst = worst.max(e1 / eps);
        if e2 > 1e-12 {
            lo = lo.min(e1 / e2);
            hi = hi.max(e1 / e2);
        }
    }
    let group = GroupContraction {
        pairs: 100,
        eps,
        max_error_over_eps: worst,
        min_rate: lo,
        max_rate: hi,
        pass: in_band(lo) && in_band(hi),
    };
    let pass = group.pass && atoms.iter().all(|a| a.pass);
    emit(
        &ContractionReport {
            kind: rc.kind,
            distance_tolerance: rc.atom_tol,
            rate_band: rc.rate_band,
            atoms,
            group,
            pass,
        },
        rc.out.as_deref(),
    )?;
    Ok(Outcome { pass })
}

#[derive(Serialize)]
struct AdmissibilityRow {
    eps: f64,
    status: &'static str,
    closed_form: Option<f64>,
    quadrature: Option<f64>,
    relative_gap: Option<f64>,
}

#[derive(Serialize)]
struct AdmissibilityReport {
    #[serde(rename = "A")]
    big_a: f64,
    b0: f64,
    psi_norm_sq: f64,
    heisenberg: f64,
    near_limit: f64,
    limit_gap: f64,
    rows: Vec<AdmissibilityRow>,
    tolerance: f64,
    limit_tolerance: f64,
    pass: bool,
}

pub fn admissibility(rc: &RunConfig) -> Result<Outcome> {
    for &e in &rc.eps_list {
        check_eps(e)?;
    }
    let mw = wavelet(rc)?;
    let f = &rc.frame;
    let abs_sq = |x: f64| mw.value_at(x).powi(2);
    let h = mw.half_width();
    let mut rows = Vec::new();
    let mut pass = true;
    for &eps in &rc.eps_list {
        match admissibility_eps(f.big_a, f.b0, eps, &mw.psi) {
            Ok(closed) => {
                let quad = admissibility_eps_quadrature(f.big_a, f.b0, eps, abs_sq, (-h, h), &mw.joints(), rc.quad_panels)?;
                let gap = (closed - quad).abs() / quad;
                pass &= gap <= rc.admissibility_tol;
                rows.push(AdmissibilityRow {
                    eps,
                    status: "ok",
                    closed_form: Some(closed),
                    quadrature: Some(quad),
                    relative_gap: Some(gap),
                });
            }
            Err(FrameError::Singular(msg)) => {
                warn(&format!("eps = {eps} skipped: {msg}"));
                rows.push(AdmissibilityRow {
                    eps,
                    status: "singular",
                    closed_form: None,
                    quadrature: None,
                    relative_gap: None,
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    let heis = admissibility_heisenberg(&HeisRepParams::new(f.big_a, f.big_b)?, &mw.psi);
    let near = admissibility_eps(f.big_a, f.b0, 1e-6, &mw.psi)?;
    let limit_gap = (near - heis).abs();
    pass &= limit_gap <= rc.limit_tol;
    let psi_norm_sq = gauss_legendre(abs_sq, -h, 0.0, 64) + gauss_legendre(abs_sq, 0.0, h, 64);
    emit(
        &AdmissibilityReport {
            big_a: f.big_a,
            b0: f.b0,
            psi_norm_sq,
            heisenberg: heis,
            near_limit: near,
            limit_gap,
            rows,
            tolerance: rc.admissibility_tol,
            limit_tolerance: rc.limit_tol,
            pass,
        },
        rc.out.as_deref(),
    )?;
    Ok(Outcome { pass })
}

#[derive(Serialize)]
struct ResolutionReport {
    window: PhaseWindow,
    heisenberg_residual: f64,
    heisenberg_constant: f64,
    eps: Option<f64>,
    eps_residual: Option<f64>,
    tolerance: f64,
    pass: bool,
}

/// Truncated resolution of the identity for the normalized Gaussian fiducial,
/// applied to f = g = ψ or to the input signal.
pub fn resolution_id(rc: &RunConfig) -> Result<Outcome> {
    let (q, p, nq, np) = rc.phase_window;
    let win = PhaseWindow { q, p, nq, np };
    let f = match &rc.input {
        Some(_) => Some(signal(rc)?),
        None => None,
    };
    let grid = match &f {
        Some(s) => s.grid,
        None => framelab::Grid::centered(1024, 0.05)?,
    };
    let psi = gaussian(grid, 0.0, 1.0).scaled(framelab::C64::new(PI.powf(-0.25), 0.0));
    let f = f.unwrap_or_else(|| psi.clone());
    let fr = &rc.frame;
    let heis = resolution_identity_residual(
        &CsFamily::Heisenberg(HeisRepParams::new(fr.big_a, fr.big_b)?),
        &psi,
        &f,
        &f,
        &win,
    )?;
    let scale = f.norm_sq();
    let mut pass = heis.residual <= rc.resolution_tol * scale;
    let (eps, eps_residual) = if fr.eps > 0.0 {
        let e = resolution_identity_residual(&CsFamily::Eps(fr.schedule(), fr.eps), &psi, &f, &f, &win)?;
        pass &= (e.residual - heis.residual).abs() <= rc.resolution_tol * scale;
        (Some(fr.eps), Some(e.residual))
    } else {
        (None, None)
    };
    emit(
        &ResolutionReport {
            window: win,
            heisenberg_residual: heis.residual,
            heisenberg_constant: heis.constant,
            eps,
            eps_residual,
            tolerance: rc.resolution_tol,
            pass,
        },
        rc.out.as_deref(),
    )?;
    Ok(Outcome { pass })
}
