//! Learning-function fits and window summaries.
//!
//! The exponential model is fitted per side as `|value| = A·exp(-|Δt|/τ)`:
//! log-linear initialization, then damped Gauss-Newton on the original scale.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{StdpWindow, WindowPoint};
use crate::waveform::SpikeWaveform;

const MAX_ITERATIONS: usize = 100;
const STEP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitSide {
    Pos,
    Neg,
}

impl FitSide {
    /// Decaying part of the window on this side, excluding the plateau:
    /// `[τ₋, τ₋ + τ₊]` mirrored for the negative side.
    pub fn default_domain(self, w: &SpikeWaveform) -> (f64, f64) {
        let lo = w.tau_minus();
        let hi = w.tau_minus() + w.tau_plus();
        match self {
            FitSide::Pos => (lo, hi),
            FitSide::Neg => (-hi, -lo),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum FitModel {
    /// `sign · A · exp(-|Δt| / τ)`.
    Exponential {
        amplitude: f64,
        tau: f64,
        sign: f64,
    },
    Linear {
        slope: f64,
        intercept: f64,
    },
    /// `a − bΔt + cΔt²`.
    Quadratic {
        a: f64,
        b: f64,
        c: f64,
    },
}

impl FitModel {
    pub fn name(&self) -> &'static str {
        match self {
            FitModel::Exponential { .. } => "exp",
            FitModel::Linear { .. } => "linear",
            FitModel::Quadratic { .. } => "quadratic",
        }
    }

    pub fn predict(&self, x: f64) -> f64 {
        match *self {
            FitModel::Exponential {
                amplitude,
                tau,
                sign,
            } => sign * amplitude * (-x.abs() / tau).exp(),
            FitModel::Linear { slope, intercept } => intercept + slope * x,
            FitModel::Quadratic { a, b, c } => a - b * x + c * x * x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub model: FitModel,
    pub rmse: f64,
    pub r_squared: f64,
    pub domain: (f64, f64),
    pub converged: bool,
    /// Points dropped because their value was zero.
    pub excluded: usize,
    pub iterations: usize,
}

fn sorted(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    p
}

fn domain(points: &[(f64, f64)]) -> (f64, f64) {
    (points[0].0, points[points.len() - 1].0)
}

/// RMSE and R² of `model` against `points` (values compared as given).
fn quality(points: &[(f64, f64)], predict: impl Fn(f64) -> f64) -> (f64, f64) {
    let n = points.len() as f64;
    let mean = points.iter().map(|p| p.1).sum::<f64>() / n;
    let ss_res: f64 = points.iter().map(|&(x, y)| (y - predict(x)).powi(2)).sum();
    let ss_tot: f64 = points.iter().map(|&(_, y)| (y - mean).powi(2)).sum();
    let r2 = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res <= f64::EPSILON * f64::EPSILON {
        1.0
    } else {
        0.0
    };
    ((ss_res / n).sqrt(), r2)
}

/// Least-squares `A·exp(-|Δt|/τ)` fit to one side of a window.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<FitResult> {
    let points = sorted(points);
    if points.len() < 3 {
        return Err(Error::Fit("exponential fit needs at least 3 points".into()));
    }
    if points.iter().any(|p| p.0 < 0.0) && points.iter().any(|p| p.0 > 0.0) {
        return Err(Error::Fit("Δt values must share a sign".into()));
    }
    let positive = points.iter().filter(|p| p.1 > 0.0).count();
    let negative = points.iter().filter(|p| p.1 < 0.0).count();
    if positive > 0 && negative > 0 {
        return Err(Error::Fit("values must share a sign".into()));
    }
    let sign = if negative > 0 { -1.0 } else { 1.0 };
    let data: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 != 0.0)
        .map(|&(x, y)| (x.abs(), y.abs()))
        .collect();
    let excluded = points.len() - data.len();
    if data.len() < 3 {
        return Err(Error::Fit(format!(
            "exponential fit needs at least 3 nonzero points, {excluded} excluded"
        )));
    }

    // Log-linear start: ln y = ln A − λx.
    let logs: Vec<(f64, f64)> = data.iter().map(|&(x, y)| (x, y.ln())).collect();
    let (slope, intercept) = ols(&logs)?;
    let mut amp = intercept.exp();
    let mut rate = (-slope).max(0.0);

    let sse = |a: f64, l: f64| -> f64 {
        data.iter()
            .map(|&(x, y)| (y - a * (-l * x).exp()).powi(2))
            .sum()
    };
    let mut current = sse(amp, rate);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        // Normal equations for the 2-parameter Jacobian [e^{-λx}, −A x e^{-λx}].
        let (mut jtj, mut jtr) = ([[0.0; 2]; 2], [0.0; 2]);
        for &(x, y) in &data {
            let e = (-rate * x).exp();
            let j = [e, -amp * x * e];
            let r = y - amp * e;
            for a in 0..2 {
                jtr[a] += j[a] * r;
                for b in 0..2 {
                    jtj[a][b] += j[a] * j[b];
                }
            }
        }
        let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
        if det.abs() <= f64::MIN_POSITIVE || !det.is_finite() {
            break;
        }
        let d_amp = (jtj[1][1] * jtr[0] - jtj[0][1] * jtr[1]) / det;
        let d_rate = (jtj[0][0] * jtr[1] - jtj[1][0] * jtr[0]) / det;

        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let (a, l) = (amp + scale * d_amp, rate + scale * d_rate);
            let s = sse(a, l);
            if s <= current {
                amp = a;
                rate = l;
                current = s;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        let rel_amp = (scale * d_amp).abs() / amp.abs().max(f64::MIN_POSITIVE);
        let rel_rate = (scale * d_rate).abs() / rate.abs().max(1e-300);
        if !accepted || (rel_amp < STEP_TOLERANCE && (rel_rate < STEP_TOLERANCE || d_rate == 0.0)) {
            converged = accepted || current == 0.0;
            break;
        }
    }

    let tau = 1.0 / rate;
    let span = data[data.len() - 1].0 - data[0].0;
    // A decay constant far beyond the data span means the data carry no decay.
    if !(tau.is_finite() && tau > 0.0 && tau < 1e6 * span.max(1.0)) {
        converged = false;
    }
    let model = FitModel::Exponential {
        amplitude: amp,
        tau,
        sign,
    };
    let (rmse, r_squared) = quality(&data, |x| amp * (-rate * x).exp());
    Ok(FitResult {
        model,
        rmse,
        r_squared,
        domain: domain(&points),
        converged,
        excluded,
        iterations,
    })
}

fn ols(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all Δt values are identical".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Ordinary least-squares line.
pub fn fit_linear(points: &[(f64, f64)]) -> Result<FitResult> {
    let points = sorted(points);
    if points.len() < 2 {
        return Err(Error::Fit("linear fit needs at least 2 points".into()));
    }
    let (slope, intercept) = ols(&points)?;
    let (rmse, r_squared) = quality(&points, |x| intercept + slope * x);
    Ok(FitResult {
        model: FitModel::Linear { slope, intercept },
        rmse,
        r_squared,
        domain: domain(&points),
        converged: true,
        excluded: 0,
        iterations: 0,
    })
}

/// Least-squares quadratic, reported as `a − bΔt + cΔt²`.
pub fn fit_quadratic(points: &[(f64, f64)]) -> Result<FitResult> {
    let points = sorted(points);
    let distinct = points
        .iter()
        .map(|p| p.0.to_bits())
        .collect::<BTreeSet<_>>()
        .len();
    if distinct < 3 {
        return Err(Error::Fit(
            "quadratic fit needs at least 3 distinct Δt".into(),
        ));
    }
    // Centre and scale Δt for conditioning, then map coefficients back.
    let n = points.len();
    let mid = points.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let half = points.iter().map(|p| (p.0 - mid).abs()).fold(0.0, f64::max);
    let design = DMatrix::from_fn(n, 3, |i, j| ((points[i].0 - mid) / half).powi(j as i32));
    let rhs = DVector::from_iterator(n, points.iter().map(|p| p.1));
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() <= smax * 1e-12 {
        return Err(Error::Fit("rank-deficient quadratic design".into()));
    }
    let u = svd
        .solve(&rhs, smax * 1e-12)
        .map_err(|e| Error::Fit(e.to_string()))?;
    // y = u0 + u1 s + u2 s², s = (x − m)/h
    let (u0, u1, u2) = (u[0], u[1] / half, u[2] / (half * half));
    let c = u2;
    let lin = u1 - 2.0 * u2 * mid;
    let a = u0 - u1 * mid + u2 * mid * mid;
    let model = FitModel::Quadratic { a, b: -lin, c };
    let (rmse, r_squared) = quality(&points, |x| model.predict(x));
    Ok(FitResult {
        model,
        rmse,
        r_squared,
        domain: domain(&points),
        converged: true,
        excluded: 0,
        iterations: 0,
    })
}

/// Keep the points whose Δt lies in `[lo, hi]`.
pub fn select_domain(points: &[(f64, f64)], (lo, hi): (f64, f64)) -> Vec<(f64, f64)> {
    let eps = 1e-9;
    points
        .iter()
        .copied()
        .filter(|p| p.0 >= lo - eps && p.0 <= hi + eps)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSummary {
    pub delta_t: f64,
    pub mc_mean: f64,
    pub mc_std: f64,
    pub analytic: f64,
    pub distinct_levels: usize,
}

/// Sample mean and (N − 1) standard deviation of `delta_g_norm`.
pub fn point_stats(p: &WindowPoint) -> (f64, f64) {
    let n = p.outcomes.len();
    let mean = p.outcomes.iter().map(|o| o.delta_g_norm).sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = p
        .outcomes
        .iter()
        .map(|o| (o.delta_g_norm - mean).powi(2))
        .sum::<f64>()
        / (n - 1) as f64;
    (mean, var.sqrt())
}

pub fn window_summary(w: &StdpWindow) -> Vec<PointSummary> {
    w.points
        .iter()
        .map(|p| {
            let (mc_mean, mc_std) = point_stats(p);
            let levels: BTreeSet<i64> = p.outcomes.iter().map(|o| o.net_level()).collect();
            PointSummary {
                delta_t: p.delta_t,
                mc_mean,
                mc_std,
                analytic: p.analytic,
                distinct_levels: levels.len(),
            }
        })
        .collect()
}

/// Every net level `n_set − n_reset` observed anywhere in the window.
pub fn observed_levels(w: &StdpWindow) -> BTreeSet<i64> {
    w.points
        .iter()
        .flat_map(|p| p.outcomes.iter().map(|o| o.net_level()))
        .collect()
}

/// Observed frequency of each switched-device count `0..=n`.
pub fn empirical_state_distribution(p: &WindowPoint, n: usize) -> Vec<f64> {
    let mut hist = vec![0.0; n + 1];
    for o in &p.outcomes {
        hist[o.switched().min(n)] += 1.0;
    }
    let total = p.outcomes.len() as f64;
    hist.iter_mut().for_each(|h| *h /= total);
    hist
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
        / 2.0
}
