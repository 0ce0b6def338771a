//! Net device potential for a single pre/post pairing.
//!
//! The pre spike fires at `t = 0`, the post spike at `t = delta_t`. Device `i`
//! sees `post(t - delta_t) - alpha_i * pre(t - delay_i)`; positive peaks drive
//! SET and negative peaks drive RESET. Peaks are taken over a grid of
//! `dt_step` multiples plus both one-sided limits at every waveform
//! breakpoint, so plateau values are exact rather than grid-limited.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dendrite::{Branch, DendriteBank};
use crate::device::{DeviceModel, DeviceState};
use crate::error::{Error, Result};
use crate::waveform::{Side, SpikeWaveform};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PairingParams {
    pub dt_step: f64,
    pub pair_only: bool,
    pub amp_noise_sigma: f64,
}

impl Default for PairingParams {
    fn default() -> Self {
        Self {
            dt_step: 0.01,
            pair_only: true,
            amp_noise_sigma: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairingGeometry {
    pre: SpikeWaveform,
    post: SpikeWaveform,
    bank: DendriteBank,
    device: DeviceModel,
    params: PairingParams,
}

/// Peak potentials of one branch and the resulting switching probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchDrive {
    pub v_max: f64,
    pub t_max: f64,
    pub v_min: f64,
    pub t_min: f64,
    pub p_set: f64,
    pub p_reset: f64,
    /// The positive peak occurs after the negative one, so a successful SET
    /// decides the final state.
    pub set_last: bool,
}

impl BranchDrive {
    /// Probability that a device starting OFF ends ON.
    pub fn p_off_to_on(&self) -> f64 {
        if self.set_last {
            self.p_set
        } else {
            self.p_set * (1.0 - self.p_reset)
        }
    }

    /// Probability that a device starting ON ends OFF.
    pub fn p_on_to_off(&self) -> f64 {
        if self.set_last {
            self.p_reset * (1.0 - self.p_set)
        } else {
            self.p_reset
        }
    }
}

/// Switching counts from one pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SwitchCounts {
    pub n_set: usize,
    pub n_reset: usize,
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    t: f64,
    side: Side,
    /// Post-spike component.
    post: f64,
    /// Attenuated, delayed pre-spike component.
    pre: f64,
    /// Both spikes active (inside their supports) at this sample.
    paired: bool,
}

impl Sample {
    fn counts(&self, pair_only: bool) -> bool {
        !pair_only || self.paired
    }
}

#[derive(Debug, Clone, Copy)]
struct Line {
    slope: f64,
    intercept: f64,
    t: f64,
    side: Side,
}

impl Line {
    fn at(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Upper envelope of a set of lines, queried by binary search.
#[derive(Debug, Clone)]
struct Envelope {
    lines: Vec<Line>,
    cuts: Vec<f64>,
}

impl Envelope {
    fn upper(mut lines: Vec<Line>) -> Self {
        lines.sort_by(|a, b| {
            a.slope
                .total_cmp(&b.slope)
                .then(b.intercept.total_cmp(&a.intercept))
                .then(a.t.total_cmp(&b.t))
                .then(a.side.cmp(&b.side))
        });
        lines.dedup_by(|later, kept| later.slope == kept.slope);
        let mut hull: Vec<Line> = Vec::with_capacity(lines.len());
        for l in lines {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                // b is dominated when a and l cross at or left of where a and b cross.
                if (a.intercept - l.intercept) * (b.slope - a.slope)
                    <= (a.intercept - b.intercept) * (l.slope - a.slope)
                {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(l);
        }
        let cuts = hull
            .windows(2)
            .map(|w| (w[0].intercept - w[1].intercept) / (w[1].slope - w[0].slope))
            .collect();
        Self { lines: hull, cuts }
    }

    fn query(&self, x: f64) -> Line {
        self.lines[self.cuts.partition_point(|&c| c < x)]
    }
}

/// Precomputed per-branch response that can be rescaled for amplitude noise.
///
/// For spike scale factors `s_pre`, `s_post` the trace is
/// `s_post * (post - r * pre)` with `r = s_pre / s_post`, so its extrema are
/// read off the upper and lower line envelopes in `r`.
#[derive(Debug, Clone)]
pub struct BranchResponse {
    nominal: BranchDrive,
    upper: Envelope,
    lower: Envelope,
}

impl BranchResponse {
    pub fn nominal(&self) -> &BranchDrive {
        &self.nominal
    }

    /// Peaks and probabilities with the pre and post spikes scaled.
    pub fn scaled(&self, device: &DeviceModel, s_pre: f64, s_post: f64) -> BranchDrive {
        let r = s_pre / s_post;
        let hi = self.upper.query(r);
        let lo = self.lower.query(r);
        let v_max = s_post * hi.at(r);
        let v_min = -s_post * lo.at(r);
        BranchDrive {
            v_max,
            t_max: hi.t,
            v_min,
            t_min: lo.t,
            p_set: device.set_probability(v_max),
            p_reset: device.reset_probability(v_min),
            set_last: (hi.t, hi.side) > (lo.t, lo.side),
        }
    }
}

impl PairingGeometry {
    pub fn new(
        pre: SpikeWaveform,
        post: SpikeWaveform,
        bank: DendriteBank,
        device: DeviceModel,
        params: PairingParams,
    ) -> Result<Self> {
        if !(params.dt_step.is_finite() && params.dt_step > 0.0) {
            return Err(Error::invalid("dt_step", "must be positive"));
        }
        let limit = pre.tau_minus().min(post.tau_minus()) / 10.0;
        if params.dt_step > limit * (1.0 + 1e-12) {
            return Err(Error::invalid(
                "dt_step",
                format!("must not exceed a tenth of the shortest head duration ({limit})"),
            ));
        }
        if !(params.amp_noise_sigma.is_finite() && (0.0..0.5).contains(&params.amp_noise_sigma)) {
            return Err(Error::invalid("amp_noise_sigma", "must lie in [0, 0.5)"));
        }
        Ok(Self {
            pre,
            post,
            bank,
            device,
            params,
        })
    }

    /// Identical pre and post waveforms.
    pub fn symmetric(
        waveform: SpikeWaveform,
        bank: DendriteBank,
        device: DeviceModel,
        params: PairingParams,
    ) -> Result<Self> {
        Self::new(waveform, waveform, bank, device, params)
    }

    pub fn pre(&self) -> &SpikeWaveform {
        &self.pre
    }

    pub fn post(&self) -> &SpikeWaveform {
        &self.post
    }

    pub fn bank(&self) -> &DendriteBank {
        &self.bank
    }

    pub fn device(&self) -> &DeviceModel {
        &self.device
    }

    pub fn params(&self) -> &PairingParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.bank.len()
    }

    fn supports(&self, b: Branch, delta_t: f64) -> ((f64, f64), (f64, f64)) {
        let (plo, phi) = self.pre.support();
        let (qlo, qhi) = self.post.support();
        (
            (plo + b.delay, phi + b.delay),
            (qlo + delta_t, qhi + delta_t),
        )
    }

    /// Net potential sampled at multiples of `dt_step` over the union of both
    /// supports. With `pair_only`, samples outside either spike's support are
    /// zero; disjoint supports then give a single zero sample.
    pub fn net_potential_trace(&self, i: usize, delta_t: f64) -> Result<Vec<(f64, f64)>> {
        let b = self.bank.branch(i)?;
        let ((alo, ahi), (blo, bhi)) = self.supports(b, delta_t);
        if self.params.pair_only && (ahi <= blo || bhi <= alo) {
            return Ok(vec![(alo.min(blo), 0.0)]);
        }
        let step = self.params.dt_step;
        let (k0, k1) = grid_range(alo.min(blo), ahi.max(bhi), step);
        Ok((k0..=k1)
            .map(|k| {
                let t = k as f64 * step;
                let post = self.post.evaluate(t - delta_t);
                let pre = b.alpha * self.pre.evaluate(t - b.delay);
                let paired = self.post.is_active(t - delta_t) && self.pre.is_active(t - b.delay);
                let v = if self.params.pair_only && !paired {
                    0.0
                } else {
                    post - pre
                };
                (t, v)
            })
            .collect())
    }

    fn samples(&self, b: Branch, delta_t: f64) -> Vec<Sample> {
        let ((alo, ahi), (blo, bhi)) = self.supports(b, delta_t);
        let step = self.params.dt_step;
        let mut breaks: Vec<f64> = self
            .pre
            .breakpoints()
            .into_iter()
            .map(|x| x + b.delay)
            .chain(self.post.breakpoints().into_iter().map(|x| x + delta_t))
            .collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();

        let sample = |t: f64, side: Option<Side>| {
            let (post, pre, paired) = match side {
                Some(s) => (
                    self.post.evaluate_side(t - delta_t, s),
                    DendriteBank::pre_spike_side(b, &self.pre, t, s),
                    self.post.is_active_side(t - delta_t, s)
                        && self.pre.is_active_side(t - b.delay, s),
                ),
                None => (
                    self.post.evaluate(t - delta_t),
                    b.alpha * self.pre.evaluate(t - b.delay),
                    self.post.is_active(t - delta_t) && self.pre.is_active(t - b.delay),
                ),
            };
            Sample {
                t,
                side: side.unwrap_or(Side::Left),
                post,
                pre,
                paired,
            }
        };

        let (k0, k1) = grid_range(alo.min(blo), ahi.max(bhi), step);
        let mut out = Vec::with_capacity((k1 - k0 + 1) as usize + 2 * breaks.len());
        for k in k0..=k1 {
            let t = k as f64 * step;
            // Breakpoints are sampled exactly, from both sides, below.
            if breaks.iter().any(|&x| (x - t).abs() < 1e-12) {
                continue;
            }
            out.push(sample(t, None));
        }
        for &x in &breaks {
            out.push(sample(x, Some(Side::Left)));
            out.push(sample(x, Some(Side::Right)));
        }
        out.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.side.cmp(&b.side)));
        out
    }

    fn drive_from_samples(&self, samples: &[Sample]) -> BranchDrive {
        let pair_only = self.params.pair_only;
        let mut max = (f64::NEG_INFINITY, 0.0, Side::Left);
        let mut min = (f64::INFINITY, 0.0, Side::Left);
        for s in samples {
            let v = if s.counts(pair_only) {
                s.post - s.pre
            } else {
                0.0
            };
            if v > max.0 {
                max = (v, s.t, s.side);
            }
            if v < min.0 {
                min = (v, s.t, s.side);
            }
        }
        BranchDrive {
            v_max: max.0,
            t_max: max.1,
            v_min: min.0,
            t_min: min.1,
            p_set: self.device.set_probability(max.0),
            p_reset: self.device.reset_probability(min.0),
            set_last: (max.1, max.2) > (min.1, min.2),
        }
    }

    /// Peaks of the net potential of branch `i` and the SET/RESET
    /// probabilities they imply.
    pub fn branch_drive(&self, i: usize, delta_t: f64) -> Result<BranchDrive> {
        let b = self.bank.branch(i)?;
        Ok(self.drive_from_samples(&self.samples(b, delta_t)))
    }

    /// Drives of every branch, in bank order.
    pub fn drives(&self, delta_t: f64) -> Vec<BranchDrive> {
        self.bank
            .branches()
            .iter()
            .map(|&b| self.drive_from_samples(&self.samples(b, delta_t)))
            .collect()
    }

    /// Per-branch responses supporting amplitude-scaled queries.
    pub fn responses(&self, delta_t: f64) -> Vec<BranchResponse> {
        let pair_only = self.params.pair_only;
        self.bank
            .branches()
            .iter()
            .map(|&b| {
                let samples = self.samples(b, delta_t);
                let nominal = self.drive_from_samples(&samples);
                let lines: Vec<Line> = samples
                    .iter()
                    .map(|s| {
                        let (slope, intercept) = if s.counts(pair_only) {
                            (-s.pre, s.post)
                        } else {
                            (0.0, 0.0)
                        };
                        Line {
                            slope,
                            intercept,
                            t: s.t,
                            side: s.side,
                        }
                    })
                    .collect();
                let negated = lines
                    .iter()
                    .map(|l| Line {
                        slope: -l.slope,
                        intercept: -l.intercept,
                        ..*l
                    })
                    .collect();
                BranchResponse {
                    nominal,
                    upper: Envelope::upper(lines),
                    lower: Envelope::upper(negated),
                }
            })
            .collect()
    }

    /// Draw independent spike scale factors `1 + ε` for (pre, post).
    pub fn sample_amplitude_scales<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let sigma = self.params.amp_noise_sigma;
        let mut draw = || loop {
            let e: f64 = StandardNormal.sample(rng);
            let s = 1.0 + sigma * e;
            if s > 0.0 {
                return s;
            }
        };
        let pre = draw();
        let post = draw();
        (pre, post)
    }

    /// Apply one pairing at `delta_t` to `states`.
    pub fn apply_pairing<R: Rng + ?Sized>(
        &self,
        states: &mut [DeviceState],
        delta_t: f64,
        rng: &mut R,
    ) -> Result<SwitchCounts> {
        let drives = self.drives(delta_t);
        apply_drives(&drives, states, rng)
    }
}

/// Stochastically switch each device given its branch drive. Both attempts
/// are drawn for every device (SET first, then RESET) and applied in the
/// chronological order of their peaks.
pub fn apply_drives<R: Rng + ?Sized>(
    drives: &[BranchDrive],
    states: &mut [DeviceState],
    rng: &mut R,
) -> Result<SwitchCounts> {
    if drives.len() != states.len() {
        return Err(Error::StateLengthMismatch {
            expected: drives.len(),
            actual: states.len(),
        });
    }
    let mut counts = SwitchCounts::default();
    for (d, s) in drives.iter().zip(states.iter_mut()) {
        let set = rng.random::<f64>() < d.p_set;
        let reset = rng.random::<f64>() < d.p_reset;
        let order = if d.set_last {
            [(reset, false), (set, true)]
        } else {
            [(set, true), (reset, false)]
        };
        for (fired, target_on) in order {
            if fired && s.on != target_on {
                s.on = target_on;
                if target_on {
                    counts.n_set += 1;
                } else {
                    counts.n_reset += 1;
                }
            }
        }
    }
    Ok(counts)
}

fn grid_range(lo: f64, hi: f64, step: f64) -> (i64, i64) {
    let k0 = (lo / step - 1e-9).ceil() as i64;
    let k1 = (hi / step + 1e-9).floor() as i64;
    (k0, k1.max(k0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::DeviceParams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn geometry(alphas: &[f64]) -> PairingGeometry {
        let bank = DendriteBank::from_branches(
            alphas
                .iter()
                .map(|&alpha| Branch { alpha, delay: 0.0 })
                .collect(),
        )
        .unwrap();
        PairingGeometry::symmetric(
            SpikeWaveform::hrht(),
            bank,
            DeviceModel::default(),
            PairingParams::default(),
        )
        .unwrap()
    }

    fn fine(g: PairingGeometry) -> PairingGeometry {
        PairingGeometry::new(
            g.pre,
            g.post,
            g.bank,
            g.device,
            PairingParams {
                dt_step: 0.001,
                ..g.params
            },
        )
        .unwrap()
    }

    fn extrema(trace: &[(f64, f64)]) -> (f64, f64) {
        trace
            .iter()
            .fold((f64::MIN, f64::MAX), |(hi, lo), &(_, v)| {
                (hi.max(v), lo.min(v))
            })
    }

    #[test]
    fn trace_peaks_match_overlap_algebra() {
        let g = fine(geometry(&[1.0]));
        let (hi, lo) = extrema(&g.net_potential_trace(0, 0.5).unwrap());
        assert!((hi - 1.3).abs() < 1e-3, "{hi}");
        assert!((lo + 0.04).abs() < 1e-3, "{lo}");

        let g = fine(geometry(&[0.6]));
        let (hi, lo) = extrema(&g.net_potential_trace(0, -2.0).unwrap());
        assert!((hi - 0.096).abs() < 1e-3, "{hi}");
        assert!((lo + 0.86).abs() < 1e-3, "{lo}");
    }

    #[test]
    fn disjoint_supports_give_zero_trace() {
        let g = geometry(&[1.0]);
        let trace = g.net_potential_trace(0, 20.0).unwrap();
        assert!(trace.iter().all(|&(_, v)| v == 0.0));
        assert_eq!(trace.len(), 1);
    }

    #[test]
    fn drive_examples() {
        let g = geometry(&[1.0]);
        let d = g.branch_drive(0, 0.5).unwrap();
        assert!((d.v_max - 1.3).abs() < 1e-12);
        assert!((d.v_min + 0.04).abs() < 1e-12);
        assert!((d.p_set - 0.99865).abs() < 1e-5);
        assert!(d.p_reset < 1e-20);

        let d = g.branch_drive(0, 2.0).unwrap();
        assert!((d.v_max - 1.22).abs() < 1e-12);
        assert!((d.p_set - 0.98610).abs() < 1e-5);

        let g = geometry(&[0.6]);
        let d = g.branch_drive(0, 2.0).unwrap();
        assert!((d.v_max - 1.092).abs() < 1e-12);
        assert!((d.p_set - 0.82121).abs() < 1e-5);
        let d = g.branch_drive(0, -2.0).unwrap();
        assert!((d.v_min + 0.86).abs() < 1e-12);
        assert!((d.p_reset - 0.08076).abs() < 1e-5);
    }

    #[test]
    fn exact_peaks_agree_with_dense_grid() {
        // Dense-grid search at dt_step = 0.001 brackets the exact one-sided peaks.
        let g = geometry(&[0.6, 0.8, 1.0]);
        let dense = fine(g.clone());
        for k in -65..=65 {
            let dt = k as f64 * 0.1;
            for i in 0..3 {
                let d = g.branch_drive(i, dt).unwrap();
                let (hi, lo) = extrema(&dense.net_potential_trace(i, dt).unwrap());
                assert!(
                    d.v_max >= hi - 1e-12 && d.v_max - hi < 2e-3,
                    "dt {dt}: {} vs {hi}",
                    d.v_max
                );
                assert!(
                    d.v_min <= lo + 1e-12 && lo - d.v_min < 2e-3,
                    "dt {dt}: {} vs {lo}",
                    d.v_min
                );
            }
        }
    }

    #[test]
    fn plateaus() {
        let g = geometry(&[0.6, 1.0]);
        for k in 1..100 {
            let dt = k as f64 * 0.01;
            for (i, a) in [0.6, 1.0].into_iter().enumerate() {
                let d = g.branch_drive(i, dt).unwrap();
                assert_eq!(d.v_max, 0.9 + 0.4 * a, "dt {dt}");
                let d = g.branch_drive(i, -dt).unwrap();
                assert!((d.v_min + 0.9 * a + 0.4).abs() < 1e-15, "dt {dt}");
            }
        }
    }

    #[test]
    fn peaks_decay_outside_plateau() {
        let g = geometry(&[0.8]);
        let mut last = (f64::INFINITY, f64::INFINITY);
        for k in 10..=70 {
            let dt = k as f64 * 0.1;
            let up = g.branch_drive(0, dt).unwrap().v_max;
            let down = -g.branch_drive(0, -dt).unwrap().v_min;
            assert!(up <= last.0 + 1e-12 && down <= last.1 + 1e-12);
            last = (up, down);
        }
    }

    #[test]
    fn attenuation_orders_probabilities() {
        let alphas: Vec<f64> = (0..9).map(|i| 0.6 + 0.05 * i as f64).collect();
        let g = geometry(&alphas);
        for dt in [0.3, 1.5, 2.0, 3.7, 5.2] {
            let d = g.drives(dt);
            assert!(d.windows(2).all(|w| w[0].p_set <= w[1].p_set));
            let d = g.drives(-dt);
            assert!(d.windows(2).all(|w| w[0].p_reset <= w[1].p_reset));
        }
    }

    #[test]
    fn voltage_spread_asymmetry() {
        let g = geometry(&[0.6, 1.0]);
        let d = g.drives(2.0);
        assert!((d[1].v_max - d[0].v_max - 0.4 * 0.4 * 0.8).abs() < 1e-12);
        let d = g.drives(-2.0);
        assert!((d[0].v_min - d[1].v_min - 0.36).abs() < 1e-12);
        let d = g.drives(1.0 + 1e-9);
        assert!((d[1].v_max - d[0].v_max - 0.16).abs() < 1e-6);
    }

    #[test]
    fn unit_bank_branches_identical() {
        let g = geometry(&[1.0; 4]);
        for k in -60..=60 {
            let d = g.drives(k as f64 * 0.1);
            assert!(d.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn envelope_matches_brute_force() {
        let g = geometry(&[0.6, 1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dt in [-4.0, -0.5, 0.0, 0.7, 2.5] {
            let resp = g.responses(dt);
            for (i, r) in resp.iter().enumerate() {
                assert_eq!(r.scaled(g.device(), 1.0, 1.0).v_max, r.nominal().v_max);
                for _ in 0..20 {
                    let s_pre = 0.8 + 0.4 * rng.random::<f64>();
                    let s_post = 0.8 + 0.4 * rng.random::<f64>();
                    let fast = r.scaled(g.device(), s_pre, s_post);
                    let b = g.bank().branches()[i];
                    let samples = g.samples(b, dt);
                    let (mut hi, mut lo) = (f64::MIN, f64::MAX);
                    for s in &samples {
                        let v = if s.paired {
                            s_post * s.post - s_pre * s.pre
                        } else {
                            0.0
                        };
                        hi = hi.max(v);
                        lo = lo.min(v);
                    }
                    assert!((fast.v_max - hi).abs() < 1e-12, "{} vs {hi}", fast.v_max);
                    assert!((fast.v_min - lo).abs() < 1e-12, "{} vs {lo}", fast.v_min);
                }
            }
        }
    }

    #[test]
    fn certain_and_impossible_switching() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let sure = BranchDrive {
            v_max: 2.0,
            t_max: 0.0,
            v_min: 0.0,
            t_min: 1.0,
            p_set: 1.0,
            p_reset: 0.0,
            set_last: false,
        };
        let mut states = vec![
            DeviceState {
                on: false,
                g_on: 1e-6
            };
            16
        ];
        let c = apply_drives(&[sure; 16], &mut states, &mut rng).unwrap();
        assert_eq!(c.n_set, 16);
        assert!(states.iter().all(|s| s.on));

        let idle = BranchDrive { p_set: 0.0, ..sure };
        let c = apply_drives(&[idle; 16], &mut states, &mut rng).unwrap();
        assert_eq!(c, SwitchCounts::default());
        assert!(states.iter().all(|s| s.on));

        assert!(matches!(
            apply_drives(&[idle; 3], &mut states, &mut rng),
            Err(Error::StateLengthMismatch {
                expected: 3,
                actual: 16
            })
        ));
    }

    #[test]
    fn later_event_wins() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let both = BranchDrive {
            v_max: 2.0,
            t_max: 0.0,
            v_min: -2.0,
            t_min: 1.0,
            p_set: 1.0,
            p_reset: 1.0,
            set_last: false,
        };
        let mut s = [DeviceState {
            on: false,
            g_on: 1e-6,
        }];
        let c = apply_drives(&[both], &mut s, &mut rng).unwrap();
        assert!(!s[0].on);
        assert_eq!((c.n_set, c.n_reset), (1, 1));
        let c = apply_drives(
            &[BranchDrive {
                set_last: true,
                ..both
            }],
            &mut s,
            &mut rng,
        )
        .unwrap();
        assert!(s[0].on);
        assert_eq!((c.n_set, c.n_reset), (1, 0));
    }

    #[test]
    fn apply_pairing_mean_matches_binomial() {
        let g = geometry(&[1.0; 16]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let epochs = 10_000;
        let mut total = 0usize;
        for _ in 0..epochs {
            let mut states = vec![
                DeviceState {
                    on: false,
                    g_on: 1e-6
                };
                16
            ];
            total += g.apply_pairing(&mut states, 0.5, &mut rng).unwrap().n_set;
        }
        let mean = total as f64 / epochs as f64;
        assert!((mean - 15.978).abs() < 0.02, "{mean}");
    }

    #[test]
    fn rejects_coarse_step() {
        let r = PairingGeometry::symmetric(
            SpikeWaveform::hrht(),
            DendriteBank::new(1, 1.0, 1.0, 0.0).unwrap(),
            DeviceModel::new(DeviceParams::default()).unwrap(),
            PairingParams {
                dt_step: 0.2,
                ..PairingParams::default()
            },
        );
        assert!(r.is_err());
    }
}
