//! CSV/JSON files for signals and coefficient tables.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};
use crate::frames::{frame_constant, AtomIndex, CoefficientTable, FrameConfig, Kind, Window};
use crate::numerics::{Grid, SampledSignal, C64};

/// Largest accepted relative deviation of a sample spacing from the mean.
pub const SPACING_TOL: f64 = 1e-9;

#[derive(Serialize, Deserialize)]
struct SignalRow {
    x: f64,
    re: f64,
    im: f64,
}

pub fn write_signal(path: impl AsRef<Path>, s: &SampledSignal) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,re,im")?;
    for (k, z) in s.samples.iter().enumerate() {
        writeln!(w, "{:.16e},{:.16e},{:.16e}", s.grid.point(k), z.re, z.im)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a `x,re,im` file and recover its uniform grid.
pub fn read_signal(path: impl AsRef<Path>) -> Result<SampledSignal> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path)?;
    if rdr.headers()?.iter().map(str::trim).collect::<Vec<_>>() != ["x", "re", "im"] {
        return Err(FrameError::Format(format!(
            "{}: expected header x,re,im",
            path.display()
        )));
    }
    let rows: Vec<SignalRow> = rdr.deserialize().collect::<std::result::Result<_, _>>()?;
    if rows.len() < 2 {
        return Err(FrameError::Format(format!("{}: need at least two samples", path.display())));
    }
    let n = rows.len();
    let dx = (rows[n - 1].x - rows[0].x) / (n - 1) as f64;
    if !(dx > 0.0) {
        return Err(FrameError::Format(format!("{}: x must increase", path.display())));
    }
    for (k, pair) in rows.windows(2).enumerate() {
        let d = pair[1].x - pair[0].x;
        if ((d - dx) / dx).abs() > SPACING_TOL {
            return Err(FrameError::Format(format!(
                "{}: non-uniform spacing at row {} ({d:e} vs {dx:e})",
                path.display(),
                k + 2
            )));
        }
    }
    let grid = Grid::new(rows[0].x, dx, n)?;
    SampledSignal::new(grid, rows.iter().map(|r| C64::new(r.re, r.im)).collect())
}

/// Everything about a coefficient table except its entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableSidecar {
    pub cfg: FrameConfig,
    pub kind: Kind,
    pub window: Window,
    pub frame_constant: f64,
    pub eps: f64,
    pub grid: Grid,
    pub log_grid: Option<Grid>,
}

/// `table.csv` → `table.csv.json`.
pub fn sidecar_path(csv_path: impl AsRef<Path>) -> PathBuf {
    let mut p = csv_path.as_ref().as_os_str().to_owned();
    p.push(".json");
    PathBuf::from(p)
}

#[derive(Serialize, Deserialize)]
struct EntryRow {
    n: i64,
    m: i64,
    re: f64,
    im: f64,
}

/// Write entries as `n,m,re,im` and the rest to the JSON sidecar.
pub fn write_table(csv_path: impl AsRef<Path>, t: &CoefficientTable) -> Result<()> {
    let csv_path = csv_path.as_ref();
    let mut w = BufWriter::new(File::create(csv_path)?);
    writeln!(w, "n,m,re,im")?;
    for (idx, z) in t.window.indices().zip(&t.entries) {
        writeln!(w, "{},{},{:.16e},{:.16e}", idx.n, idx.m, z.re, z.im)?;
    }
    w.flush()?;
    let side = TableSidecar {
        cfg: t.cfg,
        kind: t.kind,
        window: t.window,
        frame_constant: frame_constant(&t.cfg),
        eps: t.cfg.eps,
        grid: t.grid,
        log_grid: t.log_grid,
    };
    let mut s = BufWriter::new(File::create(sidecar_path(csv_path))?);
    serde_json::to_writer_pretty(&mut s, &side)?;
    writeln!(s)?;
    s.flush()?;
    Ok(())
}

pub fn read_table(csv_path: impl AsRef<Path>) -> Result<CoefficientTable> {
    let csv_path = csv_path.as_ref();
    let side: TableSidecar = serde_json::from_reader(File::open(sidecar_path(csv_path))?)?;
    side.cfg.validate()?;
    if side.eps != side.cfg.eps {
        return Err(FrameError::Format("sidecar eps disagrees with its configuration".into()));
    }
    let mut t = CoefficientTable::zeros(side.cfg, side.kind, side.window, side.grid, side.log_grid);
    let mut seen = vec![false; side.window.len()];
    let mut rdr = csv::Reader::from_path(csv_path)?;
    for row in rdr.deserialize::<EntryRow>() {
        let row = row?;
        let idx = AtomIndex::new(row.n, row.m);
        t.set(idx, C64::new(row.re, row.im))
            .map_err(|_| FrameError::Format(format!("entry ({}, {}) outside the window", row.n, row.m)))?;
        let w = side.window;
        seen[(row.n - w.n1) as usize * w.m_count() + (row.m - w.m1) as usize] = true;
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        let idx = side.window.indices().nth(k).expect("in window");
        return Err(FrameError::Format(format!("entry ({}, {}) missing", idx.n, idx.m)));
    }
    Ok(t)
}
