//! Flat `key = value` run configuration. Later layers win: defaults, then
//! the config file, then command-line overrides.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use framelab::frames::{AtomIndex, FrameConfig, Kind, Window};
use framelab::Grid;

const KEYS: &[&str] = &[
    "A", "B", "a0", "b0", "L", "q0", "p0", "chi", "eps", "x0", "dx", "count", "wavelet_count", "kind",
    "window", "eps_list", "index", "indices", "seed", "terms", "input", "out", "reference", "tight_tol",
    "recon_tol", "atom_tol", "rate_lo", "rate_hi", "contraction_eps", "admissibility_tol", "limit_tol",
    "quad_panels", "resolution_tol", "cs_q", "cs_p", "cs_nq", "cs_np", "boundary_warn",
];

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_flat(text: &str, origin: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{origin}:{}: expected key = value", i + 1))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            bail!("{origin}:{}: unknown key '{k}'", i + 1);
        }
        map.insert(k.to_string(), v.trim().to_string());
    }
    Ok(map)
}

pub fn load_layers(file: Option<&Path>, overrides: &[(String, String)]) -> Result<BTreeMap<String, String>> {
    let mut map = match file {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            parse_flat(&text, &p.display().to_string())?
        }
        None => BTreeMap::new(),
    };
    for (k, v) in overrides {
        if !KEYS.contains(&k.as_str()) {
            bail!("unknown key '{k}'");
        }
        map.insert(k.clone(), v.clone());
    }
    Ok(map)
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub frame: FrameConfig,
    pub kind: Kind,
    grid: (Option<f64>, Option<f64>, Option<usize>),
    pub wavelet_count: usize,
    pub window: Option<Window>,
    pub eps_list: Vec<f64>,
    pub index: AtomIndex,
    pub indices: Vec<AtomIndex>,
    pub seed: u64,
    pub terms: usize,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub reference: Option<PathBuf>,
    pub tight_tol: f64,
    pub recon_tol: f64,
    pub atom_tol: f64,
    pub rate_band: (f64, f64),
    pub contraction_eps: f64,
    pub admissibility_tol: f64,
    pub limit_tol: f64,
    pub quad_panels: usize,
    pub resolution_tol: f64,
    pub phase_window: (f64, f64, usize, usize),
    pub boundary_warn: f64,
}

fn get<T: FromStr>(map: &BTreeMap<String, String>, key: &str, default: T) -> Result<T> {
    match map.get(key) {
        Some(v) => v.parse().map_err(|_| anyhow!("invalid value '{v}' for {key}")),
        None => Ok(default),
    }
}

fn opt<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    map.get(key)
        .map(|v| v.parse().map_err(|_| anyhow!("invalid value '{v}' for {key}")))
        .transpose()
}

fn parse_index(s: &str) -> Result<AtomIndex> {
    let (n, m) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("atom index '{s}' is not n:m"))?;
    Ok(AtomIndex::new(
        n.trim().parse().map_err(|_| anyhow!("atom index '{s}' is not n:m"))?,
        m.trim().parse().map_err(|_| anyhow!("atom index '{s}' is not n:m"))?,
    ))
}

fn list<T>(s: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty()).map(f).collect()
}

impl RunConfig {
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let d = FrameConfig::default();
        let frame = FrameConfig::new(
            get(map, "A", d.big_a)?,
            get(map, "B", d.big_b)?,
            get(map, "a0", d.a0)?,
            get(map, "b0", d.b0)?,
            get(map, "L", d.l)?,
            get(map, "q0", d.q0)?,
            get(map, "chi", d.chi)?,
            get(map, "eps", d.eps)?,
        )?;
        if let Some(p0) = opt::<f64>(map, "p0")? {
            if (p0 - frame.p0).abs() > 1e-12 * frame.p0.abs() {
                bail!("invalid parameter: p0 must equal pi/(A L) = {}", frame.p0);
            }
        }
        let kind: Kind = get(map, "kind", Kind::Time)?;
        let window = map.get("window").map(|w| w.parse::<Window>()).transpose()?;
        let eps_list = list(map.get("eps_list").map_or("1,0.5,0.25,0.125", |s| s.as_str()), |p| {
            p.parse::<f64>().map_err(|_| anyhow!("invalid eps '{p}' in eps_list"))
        })?;
        let index = map.get("index").map_or(Ok(AtomIndex::new(1, 1)), |s| parse_index(s))?;
        let indices = list(map.get("indices").map_or("0:1,1:1,-1:2", |s| s.as_str()), parse_index)?;
        let cfg = Self {
            frame,
            kind,
            grid: (opt(map, "x0")?, opt(map, "dx")?, opt(map, "count")?),
            wavelet_count: get(map, "wavelet_count", 8192)?,
            window,
            eps_list,
            index,
            indices,
            seed: get(map, "seed", 0)?,
            terms: get(map, "terms", 3)?,
            input: opt(map, "input")?,
            out: opt(map, "out")?,
            reference: opt(map, "reference")?,
            tight_tol: get(map, "tight_tol", 5e-3)?,
            recon_tol: get(map, "recon_tol", 1e-3)?,
            atom_tol: get(map, "atom_tol", 2e-3)?,
            rate_band: (get(map, "rate_lo", 1.8)?, get(map, "rate_hi", 2.2)?),
            contraction_eps: get(map, "contraction_eps", 1e-3)?,
            admissibility_tol: get(map, "admissibility_tol", 1e-6)?,
            limit_tol: get(map, "limit_tol", 1e-4)?,
            quad_panels: get(map, "quad_panels", 64)?,
            resolution_tol: get(map, "resolution_tol", 2e-2)?,
            phase_window: (
                get(map, "cs_q", 6.0)?,
                get(map, "cs_p", 6.0)?,
                get(map, "cs_nq", 64)?,
                get(map, "cs_np", 64)?,
            ),
            boundary_warn: get(map, "boundary_warn", 1e-6)?,
        };
        if cfg.wavelet_count < 2 {
            bail!("invalid parameter: wavelet_count must be at least 2");
        }
        if cfg.terms == 0 {
            bail!("invalid parameter: terms must be positive");
        }
        Ok(cfg)
    }

    /// The signal grid: explicit `x0`/`dx`/`count` entries over a default
    /// that depends on the kind.
    pub fn grid(&self) -> Result<Grid> {
        let l = self.frame.l;
        let (dx0, x00, n0) = match self.kind {
            Kind::Time => (2.0 * l / 8192.0, -l, 8192),
            Kind::Frequency => (0.1, -0.1 * 4096.0, 8192),
        };
        let (x0, dx, count) = self.grid;
        Ok(Grid::new(x0.unwrap_or(x00), dx.unwrap_or(dx0), count.unwrap_or(n0))?)
    }

    pub fn wavelet_grid(&self) -> Result<Grid> {
        let h = self.frame.q0.abs();
        Ok(Grid::spanning(-h, h, self.wavelet_count)?)
    }
}
