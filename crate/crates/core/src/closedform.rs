//! Closed-form average conductance of a compound synapse under the linear
//! switching model, with branch peaks falling linearly in branch index and Δt:
//! `V_i = A − iΔV − βΔt`.
//!
//! Two quadratic-coefficient paths are exposed: the printed formulas
//! ([`quadratic_coeffs_paper`]) and an exact quadratic through the
//! continuous-k expression ([`quadratic_coeffs_fitted`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::waveform::SpikeWaveform;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppendixParams {
    pub n: usize,
    /// Peak-to-peak amplitude `A₊ + A₋`.
    pub a: f64,
    pub delta_v: f64,
    /// Tail slope `A₋ / τ₊`.
    pub beta: f64,
    pub v_th: f64,
    pub gamma: f64,
}

impl Default for AppendixParams {
    fn default() -> Self {
        Self {
            n: 16,
            a: 1.3,
            delta_v: 0.02,
            beta: 0.08,
            v_th: 1.0,
            gamma: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KIndex {
    /// `a₁ + b₁Δt`.
    pub k: f64,
    pub k_ceil: f64,
    pub a1: f64,
    pub b1: f64,
    /// Real count of branches above threshold, `a₁ − b₁Δt`.
    pub active: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadCoeffs {
    /// `a − bΔt + cΔt²`.
    pub fn eval(&self, dt: f64) -> f64 {
        self.a - self.b * dt + self.c * dt * dt
    }
}

impl AppendixParams {
    pub fn from_waveform(
        w: &SpikeWaveform,
        n: usize,
        delta_v: f64,
        v_th: f64,
        gamma: f64,
    ) -> Result<Self> {
        let p = Self {
            n,
            a: w.a_plus() + w.a_minus(),
            delta_v,
            beta: w.a_minus() / w.tau_plus(),
            v_th,
            gamma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("n", "must be at least 1"));
        }
        for (field, v) in [
            ("a", self.a),
            ("delta_v", self.delta_v),
            ("v_th", self.v_th),
            ("gamma", self.gamma),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(field, "must be positive"));
            }
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::invalid("beta", "must be nonnegative"));
        }
        if self.n as f64 * self.delta_v >= self.a {
            return Err(Error::invalid("delta_v", "n·delta_v must stay below a"));
        }
        Ok(())
    }

    fn a1(&self) -> f64 {
        (self.a - self.v_th) / self.delta_v
    }

    fn b1(&self) -> f64 {
        self.beta / self.delta_v
    }

    /// Δt values at which some branch enters or leaves the saturated
    /// probability 1, in ascending order.
    fn clamp_breakpoints(&self) -> Vec<f64> {
        if self.beta == 0.0 {
            return Vec::new();
        }
        (1..=self.n)
            .map(|i| (self.a - i as f64 * self.delta_v - self.v_th - 1.0 / self.gamma) / self.beta)
            .filter(|t| *t >= 0.0)
            .rev()
            .collect()
    }
}

/// One-based branch peak `A − iΔV − βΔt`.
pub fn branch_peak(p: &AppendixParams, i: usize, delta_t: f64) -> f64 {
    p.a - i as f64 * p.delta_v - p.beta * delta_t
}

pub fn k_index(p: &AppendixParams, delta_t: f64) -> KIndex {
    let (a1, b1) = (p.a1(), p.b1());
    let k = a1 + b1 * delta_t;
    KIndex {
        k,
        k_ceil: k.ceil(),
        a1,
        b1,
        active: a1 - b1 * delta_t,
    }
}

/// Sum of clamped linear switching probabilities over every branch.
pub fn avg_conductance_direct(p: &AppendixParams, delta_t: f64) -> f64 {
    (1..=p.n)
        .map(|i| (p.gamma * (branch_peak(p, i, delta_t) - p.v_th)).clamp(0.0, 1.0))
        .sum()
}

/// The same sum with the branch cutoff treated as a real number:
/// `γΔV·K(K − 1)/2` for `K = a₁ − b₁Δt ≥ 1`, else 0. Valid while no branch
/// saturates.
pub fn avg_conductance_continuous(p: &AppendixParams, delta_t: f64) -> f64 {
    let k = k_index(p, delta_t).active;
    if k <= 1.0 {
        0.0
    } else {
        p.gamma * p.delta_v * k * (k - 1.0) / 2.0
    }
}

/// Coefficients exactly as printed, kept for comparison only.
pub fn quadratic_coeffs_paper(p: &AppendixParams) -> QuadCoeffs {
    let (a1, b1, n) = (p.a1(), p.b1(), p.n as f64);
    let (g, dv) = (p.gamma, p.delta_v);
    QuadCoeffs {
        a: g * (p.a - p.v_th) * (n - a1) - g * dv * (n * (n + 1.0) - a1 * (a1 + 1.0)) / 2.0,
        b: b1 * g * (0.5 * dv * (a1 + 1.0) - p.beta),
        c: b1 * (p.beta * g + b1),
    }
}

/// Exact quadratic through three points of [`avg_conductance_continuous`]
/// on `interval`, which must lie on one smooth piece.
pub fn quadratic_coeffs_fitted(p: &AppendixParams, interval: (f64, f64)) -> Result<QuadCoeffs> {
    p.validate()?;
    let (lo, hi) = interval;
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
        return Err(Error::invalid("interval", "must satisfy 0 <= lo < hi"));
    }
    let inside = |t: f64| lo < t && t < hi;
    if p.b1() > 0.0 {
        let knee = (p.a1() - 1.0) / p.b1();
        if inside(knee) {
            return Err(Error::invalid(
                "interval",
                format!("contains the last-branch cutoff at Δt = {knee}"),
            ));
        }
    }
    let breaks = p.clamp_breakpoints();
    if let Some(t) = breaks.iter().find(|t| inside(**t)) {
        return Err(Error::invalid(
            "interval",
            format!("contains a saturation breakpoint at Δt = {t}"),
        ));
    }
    if breaks.iter().any(|t| *t >= hi) {
        return Err(Error::invalid(
            "interval",
            "a branch is saturated on this interval",
        ));
    }

    let xs = [lo, 0.5 * (lo + hi), hi];
    let ys = xs.map(|x| avg_conductance_continuous(p, x));
    // Newton divided differences, expanded to monomials.
    let d1 = (ys[1] - ys[0]) / (xs[1] - xs[0]);
    let d2 = (ys[2] - ys[1]) / (xs[2] - xs[1]);
    let c = (d2 - d1) / (xs[2] - xs[0]);
    let lin = d1 - c * (xs[0] + xs[1]);
    let a = ys[0] - lin * xs[0] - c * xs[0] * xs[0];
    Ok(QuadCoeffs { a, b: -lin, c })
}

/// Second-order Taylor polynomial of `exp(-x)`.
pub fn taylor_exp_neg(x: f64) -> f64 {
    1.0 - x + 0.5 * x * x
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormSample {
    pub delta_t: f64,
    pub k: f64,
    pub k_ceil: f64,
    pub active: f64,
    pub direct: f64,
    pub continuous: f64,
    pub fitted: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormReport {
    pub params: AppendixParams,
    pub a1: f64,
    pub b1: f64,
    pub interval: (f64, f64),
    pub samples: Vec<ClosedFormSample>,
    pub paper_coeffs: QuadCoeffs,
    pub fitted_coeffs: QuadCoeffs,
    /// `fitted − paper`, per coefficient.
    pub coeff_deviation: QuadCoeffs,
    /// Largest `|direct − fitted|` over samples on the fitted piece.
    pub max_deviation: f64,
    /// Discretization envelope `γ·ΔV·n`.
    pub envelope: f64,
    pub notes: Vec<String>,
}

/// Samples `count` points over `[0, a₁/b₁]` (or `[0, 1]` when β = 0) and
/// compares both coefficient paths against the direct sum.
pub fn closed_form_report(
    p: &AppendixParams,
    interval: (f64, f64),
    count: usize,
) -> Result<ClosedFormReport> {
    let fitted = quadratic_coeffs_fitted(p, interval)?;
    let paper = quadratic_coeffs_paper(p);
    let ki = k_index(p, 0.0);
    let end = if ki.b1 > 0.0 { ki.a1 / ki.b1 } else { 1.0 };
    let count = count.max(2);
    let knee = if ki.b1 > 0.0 {
        (ki.a1 - 1.0) / ki.b1
    } else {
        f64::INFINITY
    };
    let sat = p.clamp_breakpoints().into_iter().fold(0.0, f64::max);
    let mut max_deviation: f64 = 0.0;
    let samples = (0..count)
        .map(|j| {
            let t = end * j as f64 / (count - 1) as f64;
            let k = k_index(p, t);
            let direct = avg_conductance_direct(p, t);
            let fit = fitted.eval(t);
            if t <= knee && t >= sat {
                max_deviation = max_deviation.max((direct - fit).abs());
            }
            ClosedFormSample {
                delta_t: t,
                k: k.k,
                k_ceil: k.k_ceil,
                active: k.active,
                direct,
                continuous: avg_conductance_continuous(p, t),
                fitted: fit,
            }
        })
        .collect();
    Ok(ClosedFormReport {
        params: *p,
        a1: ki.a1,
        b1: ki.b1,
        interval,
        samples,
        paper_coeffs: paper,
        fitted_coeffs: fitted,
        coeff_deviation: QuadCoeffs {
            a: fitted.a - paper.a,
            b: fitted.b - paper.b,
            c: fitted.c - paper.c,
        },
        max_deviation,
        envelope: p.gamma * p.delta_v * p.n as f64,
        notes: vec![
            "the printed index sum runs from k, the closed form used for it starts at k + 1".into(),
            "printed coefficients are not expected to match the fitted ones".into(),
        ],
    })
}
