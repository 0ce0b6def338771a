//! Parametric spike waveforms.
//!
//! Every shape places its positive head on `(-tau_minus, 0)` and its negative
//! tail on `(0, tau_plus)`, except the bio-plausible shape which is a smooth
//! sum of two Gaussians truncated to a padded support. Point evaluation uses
//! open intervals, so breakpoints evaluate to zero; [`SpikeWaveform::evaluate_side`]
//! gives the one-sided limits the peak extractor needs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible spike amplitude in volts.
pub const MAX_AMPLITUDE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shape {
    /// Half-rectangular head, half-triangular tail.
    #[serde(rename = "hrht")]
    Hrht,
    #[serde(rename = "rect")]
    Rectangular,
    #[serde(rename = "sawtooth")]
    DoubleSawtooth,
    #[serde(rename = "dexp")]
    DoubleExponential,
    #[serde(rename = "bio")]
    BioPlausible,
}

/// Shape-specific parameters. Fields that do not apply to a shape are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShapeExtra {
    /// Head time constant of the double exponential.
    pub tau_head: f64,
    /// Tail time constant of the double exponential.
    pub tau_tail: f64,
    /// Centre and width of the bio-plausible positive Gaussian.
    pub head_center: f64,
    pub head_width: f64,
    /// Centre and width of the bio-plausible negative Gaussian.
    pub tail_center: f64,
    pub tail_width: f64,
    /// Extra support before `-tau_minus` and after `tau_plus` for the bio shape.
    pub pad_start: f64,
    pub pad_end: f64,
}

impl Default for ShapeExtra {
    fn default() -> Self {
        Self {
            tau_head: 0.3,
            tau_tail: 1.5,
            head_center: -0.2,
            head_width: 0.3,
            tail_center: 2.0,
            tail_width: 1.5,
            pad_start: 0.5,
            pad_end: 1.0,
        }
    }
}

/// Parameter record accepted by [`SpikeWaveform::new`]; omitted fields take
/// the HRHT defaults (0.9 V head for 1 time unit, 0.4 V tail over 5).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveformParams {
    pub shape: Shape,
    pub a_plus: f64,
    pub a_minus: f64,
    pub tau_minus: f64,
    pub tau_plus: f64,
    pub extra: ShapeExtra,
}

impl Default for WaveformParams {
    fn default() -> Self {
        Self {
            shape: Shape::Hrht,
            a_plus: 0.9,
            a_minus: 0.4,
            tau_minus: 1.0,
            tau_plus: 5.0,
            extra: ShapeExtra::default(),
        }
    }
}

impl WaveformParams {
    pub fn with_shape(shape: Shape) -> Self {
        Self {
            shape,
            ..Self::default()
        }
    }
}

/// Which one-sided limit to take at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

/// A validated, immutable spike waveform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpikeWaveform {
    params: WaveformParams,
}

impl SpikeWaveform {
    pub fn new(params: WaveformParams) -> Result<Self> {
        check_positive("tau_minus", params.tau_minus)?;
        check_positive("tau_plus", params.tau_plus)?;
        if !(params.a_plus > 0.0 && params.a_plus <= MAX_AMPLITUDE) {
            return Err(Error::invalid(
                "a_plus",
                format!("must lie in (0, {MAX_AMPLITUDE}] V, got {}", params.a_plus),
            ));
        }
        if !(params.a_minus >= 0.0 && params.a_minus <= MAX_AMPLITUDE) {
            return Err(Error::invalid(
                "a_minus",
                format!("must lie in [0, {MAX_AMPLITUDE}] V, got {}", params.a_minus),
            ));
        }
        let x = &params.extra;
        match params.shape {
            Shape::DoubleExponential => {
                check_positive("extra.tau_head", x.tau_head)?;
                check_positive("extra.tau_tail", x.tau_tail)?;
            }
            Shape::BioPlausible => {
                check_positive("extra.head_width", x.head_width)?;
                check_positive("extra.tail_width", x.tail_width)?;
                check_finite("extra.head_center", x.head_center)?;
                check_finite("extra.tail_center", x.tail_center)?;
                check_nonnegative("extra.pad_start", x.pad_start)?;
                check_nonnegative("extra.pad_end", x.pad_end)?;
            }
            _ => {}
        }
        Ok(Self { params })
    }

    /// HRHT waveform with default parameters.
    pub fn hrht() -> Self {
        Self::new(WaveformParams::default()).expect("defaults are valid")
    }

    pub fn params(&self) -> &WaveformParams {
        &self.params
    }

    pub fn shape(&self) -> Shape {
        self.params.shape
    }

    pub fn a_plus(&self) -> f64 {
        self.params.a_plus
    }

    pub fn a_minus(&self) -> f64 {
        self.params.a_minus
    }

    pub fn tau_minus(&self) -> f64 {
        self.params.tau_minus
    }

    pub fn tau_plus(&self) -> f64 {
        self.params.tau_plus
    }

    /// Smallest interval outside which [`evaluate`](Self::evaluate) is zero.
    pub fn support(&self) -> (f64, f64) {
        let p = &self.params;
        match p.shape {
            Shape::BioPlausible => (
                -p.tau_minus - p.extra.pad_start,
                p.tau_plus + p.extra.pad_end,
            ),
            _ => (-p.tau_minus, p.tau_plus),
        }
    }

    /// Times where the waveform may be discontinuous or change formula.
    pub fn breakpoints(&self) -> Vec<f64> {
        let (lo, hi) = self.support();
        match self.params.shape {
            Shape::BioPlausible => vec![lo, hi],
            _ => vec![lo, 0.0, hi],
        }
    }

    /// Whether `t` lies strictly inside the support.
    pub fn is_active(&self, t: f64) -> bool {
        let (lo, hi) = self.support();
        t > lo && t < hi
    }

    /// Whether the support contains a one-sided neighbourhood of `t`.
    pub fn is_active_side(&self, t: f64, side: Side) -> bool {
        let (lo, hi) = self.support();
        match side {
            Side::Left => t > lo && t <= hi,
            Side::Right => t >= lo && t < hi,
        }
    }

    /// Spike voltage at time `t`, with open head/tail intervals.
    pub fn evaluate(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(t > lo && t < hi) {
            return 0.0;
        }
        if self.params.shape == Shape::BioPlausible {
            return self.bio(t);
        }
        if t < 0.0 {
            self.head(t)
        } else if t > 0.0 {
            self.tail(t)
        } else {
            0.0
        }
    }

    /// One-sided limit of the waveform at `t`.
    pub fn evaluate_side(&self, t: f64, side: Side) -> f64 {
        if !self.is_active_side(t, side) {
            return 0.0;
        }
        if self.params.shape == Shape::BioPlausible {
            return self.bio(t);
        }
        let in_head = match side {
            Side::Left => t <= 0.0,
            Side::Right => t < 0.0,
        };
        if in_head {
            self.head(t)
        } else {
            self.tail(t)
        }
    }

    fn head(&self, t: f64) -> f64 {
        let p = &self.params;
        match p.shape {
            Shape::Hrht | Shape::Rectangular => p.a_plus,
            Shape::DoubleSawtooth => p.a_plus * (1.0 + t / p.tau_minus),
            Shape::DoubleExponential => p.a_plus * (t / p.extra.tau_head).exp(),
            Shape::BioPlausible => unreachable!(),
        }
    }

    fn tail(&self, t: f64) -> f64 {
        let p = &self.params;
        match p.shape {
            Shape::Hrht | Shape::DoubleSawtooth => -p.a_minus * (1.0 - t / p.tau_plus),
            Shape::Rectangular => -p.a_minus,
            Shape::DoubleExponential => -p.a_minus * (-t / p.extra.tau_tail).exp(),
            Shape::BioPlausible => unreachable!(),
        }
    }

    fn bio(&self, t: f64) -> f64 {
        let p = &self.params;
        let x = &p.extra;
        let h = (t - x.head_center) / x.head_width;
        let g = (t - x.tail_center) / x.tail_width;
        p.a_plus * (-h * h).exp() - p.a_minus * (-g * g).exp()
    }
}

fn check_positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive, got {v}")))
    }
}

fn check_nonnegative(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            field,
            format!("must be nonnegative, got {v}"),
        ))
    }
}

fn check_finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite, got {v}")))
    }
}
