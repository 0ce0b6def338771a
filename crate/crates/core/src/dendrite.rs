//! Dendritic branch bank: per-branch attenuation and delay applied to the
//! pre-synaptic spike. Branch `i` drives device `i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::waveform::{Side, SpikeWaveform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DelayAssignment {
    /// `0 → delay_max` across branches, in the same order as attenuation.
    #[default]
    Ramp,
    /// Every branch delayed by `delay_max`.
    Uniform,
    /// `delay_max → 0` across branches.
    Reversed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DendriteParams {
    pub n: usize,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub delay_max: f64,
    pub delay_assignment: DelayAssignment,
}

impl Default for DendriteParams {
    fn default() -> Self {
        Self {
            n: 16,
            alpha_min: 0.6,
            alpha_max: 1.0,
            delay_max: 0.0,
            delay_assignment: DelayAssignment::Ramp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Branch {
    pub alpha: f64,
    pub delay: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DendriteBank {
    branches: Vec<Branch>,
}

impl DendriteBank {
    /// Linear attenuation ramp `alpha_min → alpha_max` with a ramped delay.
    pub fn new(n: usize, alpha_min: f64, alpha_max: f64, delay_max: f64) -> Result<Self> {
        Self::from_params(&DendriteParams {
            n,
            alpha_min,
            alpha_max,
            delay_max,
            delay_assignment: DelayAssignment::Ramp,
        })
    }

    pub fn from_params(p: &DendriteParams) -> Result<Self> {
        if p.n == 0 {
            return Err(Error::invalid("n", "must be at least 1"));
        }
        if !(p.alpha_min > 0.0) {
            return Err(Error::invalid("alpha_min", "must be positive"));
        }
        if !(p.alpha_max <= 1.0 && p.alpha_min <= p.alpha_max) {
            return Err(Error::invalid(
                "alpha_max",
                "must satisfy alpha_min <= alpha_max <= 1",
            ));
        }
        if !(p.delay_max.is_finite() && p.delay_max >= 0.0) {
            return Err(Error::invalid("delay_max", "must be nonnegative"));
        }
        let n = p.n;
        let branches = (0..n)
            .map(|i| {
                // Fraction along the ramp; a single branch sits at the top end.
                let frac = if n == 1 {
                    1.0
                } else {
                    i as f64 / (n - 1) as f64
                };
                let alpha = if n == 1 {
                    p.alpha_max
                } else {
                    p.alpha_min + (p.alpha_max - p.alpha_min) * frac
                };
                let delay = match p.delay_assignment {
                    DelayAssignment::Ramp if n == 1 => 0.0,
                    DelayAssignment::Ramp => p.delay_max * frac,
                    DelayAssignment::Uniform => p.delay_max,
                    DelayAssignment::Reversed if n == 1 => 0.0,
                    DelayAssignment::Reversed => p.delay_max * (1.0 - frac),
                };
                Branch { alpha, delay }
            })
            .collect();
        Ok(Self { branches })
    }

    /// Bank of explicit branches.
    pub fn from_branches(branches: Vec<Branch>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::invalid("n", "must be at least 1"));
        }
        for (i, b) in branches.iter().enumerate() {
            if !(b.alpha > 0.0 && b.alpha <= 1.0) {
                return Err(Error::invalid(
                    format!("branches[{i}].alpha"),
                    "must lie in (0, 1]",
                ));
            }
            if !(b.delay.is_finite() && b.delay >= 0.0) {
                return Err(Error::invalid(
                    format!("branches[{i}].delay"),
                    "must be nonnegative",
                ));
            }
        }
        Ok(Self { branches })
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Zero-based branch lookup.
    pub fn branch(&self, i: usize) -> Result<Branch> {
        self.branches
            .get(i)
            .copied()
            .ok_or(Error::BranchOutOfRange {
                index: i,
                len: self.branches.len(),
            })
    }

    /// `alpha_i * w(t - delay_i)` for zero-based branch `i`.
    pub fn pre_spike_value(&self, i: usize, w: &SpikeWaveform, t: f64) -> Result<f64> {
        let b = self.branch(i)?;
        Ok(b.alpha * w.evaluate(t - b.delay))
    }

    pub(crate) fn pre_spike_side(b: Branch, w: &SpikeWaveform, t: f64, side: Side) -> f64 {
        b.alpha * w.evaluate_side(t - b.delay, side)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_branch_ramp() {
        let bank = DendriteBank::new(16, 0.6, 1.0, 0.0).unwrap();
        assert_eq!(bank.len(), 16);
        let a: Vec<f64> = bank.branches().iter().map(|b| b.alpha).collect();
        assert!((a[0] - 0.6).abs() < 1e-15);
        assert!((a[1] - 0.626_666_666_666_666_7).abs() < 1e-12);
        assert!((a[15] - 1.0).abs() < 1e-15);
        assert!(a.windows(2).all(|w| w[0] <= w[1]));
        assert!(bank.branches().iter().all(|b| b.delay == 0.0));
    }

    #[test]
    fn unit_bank() {
        let bank = DendriteBank::new(16, 1.0, 1.0, 0.0).unwrap();
        assert!(bank.branches().iter().all(|b| b.alpha == 1.0));
    }

    #[test]
    fn two_point_ramp_with_delay() {
        let bank = DendriteBank::new(2, 0.5, 1.0, 0.3).unwrap();
        assert_eq!(
            bank.branches()[0],
            Branch {
                alpha: 0.5,
                delay: 0.0
            }
        );
        assert_eq!(
            bank.branches()[1],
            Branch {
                alpha: 1.0,
                delay: 0.3
            }
        );
    }

    #[test]
    fn single_branch_collapses_to_top() {
        let bank = DendriteBank::new(1, 0.6, 0.9, 0.3).unwrap();
        assert_eq!(
            bank.branches()[0],
            Branch {
                alpha: 0.9,
                delay: 0.0
            }
        );
    }

    #[test]
    fn alternative_delay_assignments() {
        let mk = |d| {
            DendriteBank::from_params(&DendriteParams {
                n: 4,
                delay_max: 0.3,
                delay_assignment: d,
                ..DendriteParams::default()
            })
            .unwrap()
        };
        assert!(mk(DelayAssignment::Uniform)
            .branches()
            .iter()
            .all(|b| b.delay == 0.3));
        let r = mk(DelayAssignment::Reversed);
        assert!((r.branches()[0].delay - 0.3).abs() < 1e-15 && r.branches()[3].delay == 0.0);
    }

    #[test]
    fn rejects_bad_banks() {
        assert!(DendriteBank::new(0, 0.6, 1.0, 0.0).is_err());
        assert!(DendriteBank::new(4, 0.0, 1.0, 0.0).is_err());
        assert!(DendriteBank::new(4, 0.6, 1.2, 0.0).is_err());
        assert!(DendriteBank::new(4, 0.9, 0.6, 0.0).is_err());
        assert!(DendriteBank::new(4, 0.6, 1.0, -0.1).is_err());
    }

    #[test]
    fn branch_values() {
        let w = SpikeWaveform::hrht();
        let bank = DendriteBank::from_branches(vec![
            Branch {
                alpha: 0.6,
                delay: 0.0,
            },
            Branch {
                alpha: 1.0,
                delay: 0.3,
            },
        ])
        .unwrap();
        assert!((bank.pre_spike_value(0, &w, -0.5).unwrap() - 0.54).abs() < 1e-15);
        assert_eq!(bank.pre_spike_value(1, &w, 0.1).unwrap(), 0.9);
        assert_eq!(bank.pre_spike_value(1, &w, 50.0).unwrap(), 0.0);
        assert!(matches!(
            bank.pre_spike_value(2, &w, 0.0),
            Err(Error::BranchOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn identity_bank_passes_waveform_through() {
        let w = SpikeWaveform::hrht();
        let bank = DendriteBank::new(3, 1.0, 1.0, 0.0).unwrap();
        for k in -150..650 {
            let t = k as f64 * 0.01;
            for i in 0..3 {
                assert_eq!(bank.pre_spike_value(i, &w, t).unwrap(), w.evaluate(t));
            }
        }
    }
}
