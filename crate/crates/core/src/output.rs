//! CSV and JSON serialization of windows and fits.
//!
//! Floats are written in Rust's shortest round-trip form, so reading a file
//! back recovers the exact in-memory values.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{point_stats, FitModel, FitResult, FitSide};
use crate::error::{Error, Result};
use crate::montecarlo::{Outcome, StdpWindow, WindowPoint};

pub const WINDOW_CSV: &str = "window.csv";
pub const MEAN_CSV: &str = "mean.csv";
pub const STATES_CSV: &str = "states.csv";
pub const FITS_JSON: &str = "fits.json";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(io_err(path))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn finish(path: &Path, w: csv::Writer<BufWriter<File>>) -> Result<()> {
    let mut inner = w.into_inner().map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    })?;
    inner.flush().map_err(io_err(path))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanRow {
    pub delta_t: f64,
    pub mc_mean: f64,
    pub mc_std: f64,
    pub analytic: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct WindowRow {
    delta_t: f64,
    epoch: usize,
    delta_g_norm: f64,
    n_set: u32,
    n_reset: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct StateRow {
    delta_t: f64,
    state_index: usize,
    probability: f64,
}

/// Only `window.csv`; its bytes are the determinism fingerprint of a run.
pub fn write_outcomes_csv(w: &StdpWindow, path: &Path) -> Result<()> {
    let mut out = writer(path)?;
    for p in &w.points {
        for (epoch, o) in p.outcomes.iter().enumerate() {
            out.serialize(WindowRow {
                delta_t: p.delta_t,
                epoch,
                delta_g_norm: o.delta_g_norm,
                n_set: o.n_set,
                n_reset: o.n_reset,
            })
            .map_err(csv_err(path))?;
        }
    }
    finish(path, out)
}

/// Writes `window.csv`, `mean.csv` and `states.csv` into `dir`, creating it.
pub fn write_window_csv(w: &StdpWindow, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_outcomes_csv(w, &dir.join(WINDOW_CSV))?;

    let path = dir.join(MEAN_CSV);
    let mut out = writer(&path)?;
    for p in &w.points {
        let (mc_mean, mc_std) = point_stats(p);
        out.serialize(MeanRow {
            delta_t: p.delta_t,
            mc_mean,
            mc_std,
            analytic: p.analytic,
        })
        .map_err(csv_err(&path))?;
    }
    finish(&path, out)?;

    let path = dir.join(STATES_CSV);
    let file = File::create(&path).map_err(io_err(&path))?;
    write_states(
        BufWriter::new(file),
        w.points.iter().map(|p| (p.delta_t, p.states.as_slice())),
    )
    .map_err(csv_err(&path))
}

/// `states.csv` rows for arbitrary `(Δt, distribution)` pairs, to any sink.
pub fn write_states<'a, W: Write>(
    sink: W,
    rows: impl IntoIterator<Item = (f64, &'a [f64])>,
) -> std::result::Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(sink);
    for (delta_t, states) in rows {
        for (state_index, &probability) in states.iter().enumerate() {
            out.serialize(StateRow {
                delta_t,
                state_index,
                probability,
            })?;
        }
    }
    out.flush()?;
    Ok(())
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(csv_err(path))
}

pub fn read_mean_csv(dir: &Path) -> Result<Vec<MeanRow>> {
    read_rows(&dir.join(MEAN_CSV))
}

/// Rebuilds a window from a directory written by [`write_window_csv`].
pub fn read_window_dir(dir: &Path) -> Result<StdpWindow> {
    let means = read_mean_csv(dir)?;
    let mut points: BTreeMap<u64, WindowPoint> = BTreeMap::new();
    let key = |dt: f64| (dt + 0.0).to_bits();
    for m in &means {
        points.insert(
            key(m.delta_t),
            WindowPoint {
                delta_t: m.delta_t,
                outcomes: Vec::new(),
                analytic: m.analytic,
                states: Vec::new(),
            },
        );
    }
    let missing = |path: PathBuf, dt: f64| Error::Config {
        path,
        message: format!("Δt {dt} is not listed in {MEAN_CSV}"),
    };
    let path = dir.join(WINDOW_CSV);
    for row in read_rows::<WindowRow>(&path)? {
        let p = points
            .get_mut(&key(row.delta_t))
            .ok_or_else(|| missing(path.clone(), row.delta_t))?;
        p.outcomes.push(Outcome {
            delta_g_norm: row.delta_g_norm,
            n_set: row.n_set,
            n_reset: row.n_reset,
        });
    }
    let path = dir.join(STATES_CSV);
    for row in read_rows::<StateRow>(&path)? {
        let p = points
            .get_mut(&key(row.delta_t))
            .ok_or_else(|| missing(path.clone(), row.delta_t))?;
        p.states.push(row.probability);
    }
    let mut points: Vec<WindowPoint> = points.into_values().collect();
    points.sort_by(|a, b| a.delta_t.total_cmp(&b.delta_t));
    let n = points
        .first()
        .map_or(0, |p| p.states.len().saturating_sub(1));
    Ok(StdpWindow { n, points })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRecord {
    pub side: FitSide,
    pub model: &'static str,
    pub params: FitModel,
    pub rmse: f64,
    pub r2: f64,
    pub domain: [f64; 2],
    pub converged: bool,
    pub excluded: usize,
}

impl FitRecord {
    pub fn new(side: FitSide, fit: &FitResult) -> Self {
        Self {
            side,
            model: fit.model.name(),
            params: fit.model,
            rmse: fit.rmse,
            r2: fit.r_squared,
            domain: [fit.domain.0, fit.domain.1],
            converged: fit.converged,
            excluded: fit.excluded,
        }
    }
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    w.write_all(b"\n").map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}
