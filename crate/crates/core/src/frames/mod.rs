//! Tight frames generated by a compactly supported fiducial: time-localized
//! atoms in L²(ℝ) and their band-limited images under I, for every ε in
//! [0, 1], with ε = 0 the Gabor system of the Heisenberg group.

mod atoms;
mod diagnostics;
mod expansion;
mod wavelet;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{param, FrameError, Result};
use crate::numerics::{Grid, C64};
use crate::representations::Schedule;

pub use atoms::{
    atom_grid, freq_atom, freq_atom_grid, freq_atom_spectrum, frame_constant, lattice_coeffs, time_atom,
    time_atom_value, AtomIndex, LatticeElement,
};
pub use diagnostics::{
    atom_contraction_report, erratum_report, gamma_convention, log_composition_gap, route_consistency,
    ContractionPoint, ErratumReport, GammaConvention, RouteCheck,
};
pub use expansion::{
    analyze, analyze_auto, reconstruction_error, synthesize, tightness_ratio, AutoWindowRule,
    TightnessReport,
};
pub use wavelet::{build_mother_wavelet, ramp, MotherWavelet};

/// All frame parameters. `p0 = π/(A L)` is derived.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameConfig {
    #[serde(rename = "A")]
    pub big_a: f64,
    #[serde(rename = "B")]
    pub big_b: f64,
    pub a0: f64,
    pub b0: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub q0: f64,
    pub p0: f64,
    pub chi: f64,
    pub eps: f64,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0, PI, PI, 1.0, 0.0).expect("default parameters are valid")
    }
}

impl FrameConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        big_a: f64,
        big_b: f64,
        a0: f64,
        b0: f64,
        l: f64,
        q0: f64,
        chi: f64,
        eps: f64,
    ) -> Result<Self> {
        let cfg = Self {
            big_a,
            big_b,
            a0,
            b0,
            l,
            q0,
            p0: PI / (big_a * l),
            chi,
            eps,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Check every invariant, naming the first one violated.
    pub fn validate(&self) -> Result<()> {
        let all = [self.big_a, self.big_b, self.a0, self.b0, self.l, self.q0, self.chi, self.eps];
        if all.iter().any(|v| !v.is_finite()) {
            return param("frame parameters must be finite");
        }
        if self.big_a == 0.0 {
            return param("A must be nonzero");
        }
        if !(self.l > 0.0) {
            return param(format!("L must be positive, got {}", self.l));
        }
        if self.q0 == 0.0 {
            return param("q0 must be nonzero");
        }
        if !(self.chi > 0.0) {
            return param(format!("chi must be positive, got {}", self.chi));
        }
        if !(0.0..=1.0).contains(&self.eps) {
            return param(format!("eps must lie in [0, 1], got {}", self.eps));
        }
        if (self.a0 + self.b0 - self.big_b).abs() > 1e-12 * self.big_b.abs().max(1.0) {
            return param(format!(
                "a0 + b0 must equal B (got {} + {} vs {})",
                self.a0, self.b0, self.big_b
            ));
        }
        if (self.p0 - PI / (self.big_a * self.l)).abs() > 1e-12 * self.p0.abs() {
            return param("p0 must equal pi/(A L)");
        }
        if self.q0.abs() >= 2.0 * self.big_a.abs() * self.l {
            return param(format!(
                "|q0| must be below 2|A|L = {} (got q0 = {})",
                2.0 * self.big_a.abs() * self.l,
                self.q0
            ));
        }
        if self.eps > 0.0 && self.big_a - self.b0 * self.eps == 0.0 {
            return Err(FrameError::Singular(format!(
                "A - b0*eps vanishes at eps = {}",
                self.eps
            )));
        }
        Ok(())
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        let mut c = *self;
        c.eps = eps;
        c.validate()?;
        Ok(c)
    }

    pub fn schedule(&self) -> Schedule {
        Schedule {
            big_a: self.big_a,
            big_b: self.big_b,
            a0: self.a0,
            b0: self.b0,
        }
    }

    /// (a(ε), b(ε)); only meaningful for ε > 0.
    pub fn ab(&self) -> (f64, f64) {
        (self.a0 + self.big_a / self.eps, self.b0 - self.big_a / self.eps)
    }

    /// Whether `other` describes the same frame up to round-off.
    pub fn matches(&self, other: &Self) -> bool {
        let a = [self.big_a, self.big_b, self.a0, self.b0, self.l, self.q0, self.p0, self.chi, self.eps];
        let b = [other.big_a, other.big_b, other.a0, other.b0, other.l, other.q0, other.p0, other.chi, other.eps];
        a.iter()
            .zip(&b)
            .all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0))
    }

    pub(crate) fn check_wavelet(&self, mw: &MotherWavelet) -> Result<()> {
        if (mw.q0 - self.q0).abs() > 1e-12 * self.q0.abs() || (mw.l - self.l).abs() > 1e-12 * self.l
            || (mw.chi - self.chi).abs() > 1e-12 * self.chi
        {
            return param("mother wavelet was built for different L, q0 or chi");
        }
        Ok(())
    }
}

/// Which family of atoms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Compactly supported atoms in L²(ℝ).
    Time,
    /// Their band-limited images under I.
    Frequency,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Time => "time",
            Kind::Frequency => "frequency",
        })
    }
}

impl FromStr for Kind {
    type Err = FrameError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "time" => Ok(Kind::Time),
            "frequency" | "freq" => Ok(Kind::Frequency),
            _ => param(format!("unknown kind '{s}' (expected time or frequency)")),
        }
    }
}

/// Truncation window N1 ≤ n ≤ N2, M1 ≤ m ≤ M2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub n1: i64,
    pub n2: i64,
    pub m1: i64,
    pub m2: i64,
}

impl Window {
    pub fn new(n1: i64, n2: i64, m1: i64, m2: i64) -> Result<Self> {
        if n1 > n2 || m1 > m2 {
            return param(format!("empty window ({n1},{n2},{m1},{m2})"));
        }
        Ok(Self { n1, n2, m1, m2 })
    }

    pub fn n_count(&self) -> usize {
        (self.n2 - self.n1 + 1) as usize
    }

    pub fn m_count(&self) -> usize {
        (self.m2 - self.m1 + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.n_count() * self.m_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn indices(&self) -> impl Iterator<Item = AtomIndex> + '_ {
        (self.n1..=self.n2).flat_map(move |n| (self.m1..=self.m2).map(move |m| AtomIndex { n, m }))
    }
}

impl FromStr for Window {
    type Err = FrameError;
    /// `N1,N2,M1,M2`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<i64> = s
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| FrameError::Parameter(format!("window '{s}' is not N1,N2,M1,M2")))?;
        if parts.len() != 4 {
            return param(format!("window '{s}' is not N1,N2,M1,M2"));
        }
        Window::new(parts[0], parts[1], parts[2], parts[3])
    }
}

/// Frame coefficients ⟨atom_(n,m)|f⟩ on a window, with everything needed to
/// synthesize from them.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTable {
    pub cfg: FrameConfig,
    pub kind: Kind,
    pub window: Window,
    /// Row-major: n outer, m inner.
    pub entries: Vec<C64>,
    /// Grid of the analysed signal.
    pub grid: Grid,
    /// Log-frequency grid on which band-limited coefficients were computed.
    pub log_grid: Option<Grid>,
}

impl CoefficientTable {
    pub fn eps(&self) -> f64 {
        self.cfg.eps
    }

    pub fn zeros(cfg: FrameConfig, kind: Kind, window: Window, grid: Grid, log_grid: Option<Grid>) -> Self {
        Self {
            cfg,
            kind,
            window,
            entries: vec![C64::new(0.0, 0.0); window.len()],
            grid,
            log_grid,
        }
    }

    fn offset(&self, idx: AtomIndex) -> Option<usize> {
        let w = &self.window;
        if idx.n < w.n1 || idx.n > w.n2 || idx.m < w.m1 || idx.m > w.m2 {
            return None;
        }
        Some((idx.n - w.n1) as usize * w.m_count() + (idx.m - w.m1) as usize)
    }

    pub fn get(&self, idx: AtomIndex) -> Option<C64> {
        self.offset(idx).map(|o| self.entries[o])
    }

    pub fn set(&mut self, idx: AtomIndex, v: C64) -> Result<()> {
        let o = self
            .offset(idx)
            .ok_or_else(|| FrameError::Parameter(format!("index {idx:?} outside window")))?;
        self.entries[o] = v;
        Ok(())
    }

    pub fn energy(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Share of coefficient energy in the edge columns m = M1 and m = M2.
    pub fn boundary_fraction(&self) -> f64 {
        let total = self.energy();
        if total == 0.0 {
            return 0.0;
        }
        let w = self.window;
        let edge: f64 = w
            .indices()
            .filter(|i| i.m == w.m1 || i.m == w.m2)
            .map(|i| self.get(i).unwrap().norm_sqr())
            .sum();
        edge / total
    }
}
