//! Stochastic binary resistive switch.
//!
//! SET/RESET probabilities are functions of the peak voltage only: either the
//! Gaussian threshold model (probability that a normally distributed threshold
//! lies in `(0, V]`) or the piecewise-linear model with slope `gamma`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard normal CDF, accurate to ~1 ulp of `erfc` across the whole line.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbabilityModel {
    Gaussian,
    Linear { gamma: f64 },
}

/// Probability of switching when the threshold is `Normal(vth, sigma)`
/// restricted to `(0, v]`, for `v`, `vth` of the same (positive) polarity.
fn gaussian_switch(v: f64, vth: f64, sigma: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    let a = (v - vth) / sigma;
    let below_zero = normal_cdf(-vth / sigma);
    // Φ(a) − Φ(−vth/σ); above the mean use 1 − Q(a) so the upper tail keeps
    // its absolute precision.
    let p = if a > 0.0 {
        (1.0 - 0.5 * libm::erfc(a / std::f64::consts::SQRT_2)) - below_zero
    } else {
        normal_cdf(a) - below_zero
    };
    p.clamp(0.0, 1.0)
}

fn linear_switch(v: f64, vth: f64, gamma: f64) -> f64 {
    if v <= vth {
        0.0
    } else if v >= vth + 1.0 / gamma {
        1.0
    } else {
        gamma * (v - vth)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceParams {
    pub vth_pos: f64,
    pub vth_neg: f64,
    pub sigma_th: f64,
    pub r_on_ohm: f64,
    pub sigma_lrs: f64,
    /// `R_OFF / R_ON`; `None` means the OFF state conducts nothing.
    pub r_off_ratio: Option<f64>,
    pub prob_model: ProbabilityModel,
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self {
            vth_pos: 1.0,
            vth_neg: -1.0,
            sigma_th: 0.1,
            r_on_ohm: 1e6,
            sigma_lrs: 0.1,
            r_off_ratio: None,
            prob_model: ProbabilityModel::Gaussian,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviceModel {
    params: DeviceParams,
}

/// State of one binary device. `g_on` is the conductance it has when ON.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceState {
    pub on: bool,
    pub g_on: f64,
}

impl DeviceState {
    /// Present conductance in siemens, given the model's OFF conductance.
    pub fn conductance(&self, model: &DeviceModel) -> f64 {
        if self.on {
            self.g_on
        } else {
            model.g_off()
        }
    }
}

impl DeviceModel {
    pub fn new(params: DeviceParams) -> Result<Self> {
        let p = &params;
        if !(p.vth_pos.is_finite() && p.vth_pos > 0.0) {
            return Err(Error::invalid("vth_pos", "must be positive"));
        }
        if !(p.vth_neg.is_finite() && p.vth_neg < 0.0) {
            return Err(Error::invalid("vth_neg", "must be negative"));
        }
        if !(p.sigma_th.is_finite() && p.sigma_th > 0.0) {
            return Err(Error::invalid("sigma_th", "must be positive"));
        }
        if !(p.r_on_ohm.is_finite() && p.r_on_ohm > 0.0) {
            return Err(Error::invalid("r_on_ohm", "must be positive"));
        }
        if !(p.sigma_lrs.is_finite() && (0.0..0.5).contains(&p.sigma_lrs)) {
            return Err(Error::invalid("sigma_lrs", "must lie in [0, 0.5)"));
        }
        if let Some(r) = p.r_off_ratio {
            if !(r > 1.0) {
                return Err(Error::invalid("r_off_ratio", "must exceed 1 (or be null)"));
            }
        }
        if let ProbabilityModel::Linear { gamma } = p.prob_model {
            if !(gamma.is_finite() && gamma > 0.0) {
                return Err(Error::invalid(
                    "prob_model.linear.gamma",
                    "must be positive",
                ));
            }
        }
        Ok(Self { params })
    }

    pub fn params(&self) -> &DeviceParams {
        &self.params
    }

    pub fn r_on(&self) -> f64 {
        self.params.r_on_ohm
    }

    pub fn sigma_lrs(&self) -> f64 {
        self.params.sigma_lrs
    }

    /// Nominal ON conductance `1 / R_ON`.
    pub fn g_nominal(&self) -> f64 {
        1.0 / self.params.r_on_ohm
    }

    pub fn g_off(&self) -> f64 {
        match self.params.r_off_ratio {
            Some(ratio) => 1.0 / (self.params.r_on_ohm * ratio),
            None => 0.0,
        }
    }

    /// OFF→ON probability for a positive peak voltage.
    pub fn set_probability(&self, v_peak: f64) -> f64 {
        if v_peak <= 0.0 {
            return 0.0;
        }
        match self.params.prob_model {
            ProbabilityModel::Gaussian => {
                gaussian_switch(v_peak, self.params.vth_pos, self.params.sigma_th)
            }
            ProbabilityModel::Linear { gamma } => linear_switch(v_peak, self.params.vth_pos, gamma),
        }
    }

    /// ON→OFF probability for a negative peak voltage.
    pub fn reset_probability(&self, v_peak: f64) -> f64 {
        if v_peak >= 0.0 {
            return 0.0;
        }
        let vth = -self.params.vth_neg;
        match self.params.prob_model {
            ProbabilityModel::Gaussian => gaussian_switch(-v_peak, vth, self.params.sigma_th),
            ProbabilityModel::Linear { gamma } => linear_switch(-v_peak, vth, gamma),
        }
    }

    /// Draw an ON conductance `(1 / R_ON)(1 + ε)`, `ε ~ Normal(0, sigma_lrs)`,
    /// redrawing nonpositive results.
    pub fn sample_on_conductance<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g0 = self.g_nominal();
        let sigma = self.params.sigma_lrs;
        if sigma == 0.0 {
            return g0;
        }
        loop {
            let eps: f64 = StandardNormal.sample(rng);
            let g = g0 * (1.0 + sigma * eps);
            if g > 0.0 {
                return g;
            }
        }
    }
}

impl Default for DeviceModel {
    fn default() -> Self {
        Self::new(DeviceParams::default()).expect("defaults are valid")
    }
}
