//! Δt sweeps producing full STDP windows.
//!
//! Each (grid point, epoch) pair owns a ChaCha8 stream derived purely from
//! `(seed, point, epoch)`, so a window is bit-for-bit reproducible under any
//! rayon pool size.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::device::DeviceState;
use crate::error::{Error, Result};
use crate::pairing::{apply_drives, BranchDrive, BranchResponse, PairingGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitPolicy {
    /// All OFF for Δt > 0, all ON for Δt < 0; epochs alternate OFF/ON at Δt = 0.
    #[default]
    Split,
    AllOff,
    AllOn,
    /// Each device independently ON with probability `q`.
    Random {
        q: f64,
    },
}

/// Uniform initial state of every device in the compound synapse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitState {
    AllOff,
    AllOn,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowParams {
    pub delta_t_min: f64,
    pub delta_t_max: f64,
    pub delta_t_step: f64,
    pub epochs: usize,
    pub seed: u64,
    pub init_policy: InitPolicy,
}

impl Default for WindowParams {
    fn default() -> Self {
        Self {
            delta_t_min: -6.0,
            delta_t_max: 6.0,
            delta_t_step: 0.1,
            epochs: 10_000,
            seed: 42,
            init_policy: InitPolicy::Split,
        }
    }
}

impl WindowParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta_t_step.is_finite() && self.delta_t_step > 0.0) {
            return Err(Error::invalid("delta_t_step", "must be positive"));
        }
        if self.epochs == 0 {
            return Err(Error::invalid("epochs", "must be at least 1"));
        }
        if !(self.delta_t_min.is_finite()
            && self.delta_t_max.is_finite()
            && self.delta_t_min < self.delta_t_max)
        {
            return Err(Error::invalid("delta_t_max", "must exceed delta_t_min"));
        }
        if let InitPolicy::Random { q } = self.init_policy {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::invalid("init_policy.random.q", "must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        delta_t_grid(self.delta_t_min, self.delta_t_max, self.delta_t_step)
    }
}

#[derive(Debug, Clone)]
pub struct WindowConfig {
    pub geometry: PairingGeometry,
    pub window: WindowParams,
}

/// One stochastic trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Outcome {
    /// Conductance change normalized by the nominal ON conductance.
    pub delta_g_norm: f64,
    pub n_set: u32,
    pub n_reset: u32,
}

impl Outcome {
    pub fn net_level(&self) -> i64 {
        self.n_set as i64 - self.n_reset as i64
    }

    pub fn switched(&self) -> usize {
        (self.n_set + self.n_reset) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowPoint {
    pub delta_t: f64,
    pub outcomes: Vec<Outcome>,
    /// Expected `delta_g_norm` under the init policy, noiseless drives.
    pub analytic: f64,
    /// Probability of `k` devices switching, `k = 0..=n`.
    pub states: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StdpWindow {
    pub n: usize,
    pub points: Vec<WindowPoint>,
}

/// Δt values from `min` to `max` inclusive, rounded to 1e-9 so grid labels
/// are clean decimals.
pub fn delta_t_grid(min: f64, max: f64, step: f64) -> Vec<f64> {
    let count = ((max - min) / step + 1e-9).floor().max(0.0) as usize + 1;
    (0..count)
        .map(|k| ((min + k as f64 * step) * 1e9).round() / 1e9 + 0.0)
        .collect()
}

/// Independent, reproducible random stream for one trial.
///
/// The seed expands to a ChaCha key; `(point, epoch)` selects the stream, so
/// streams never overlap and do not depend on scheduling.
pub fn rng_substream(seed: u64, point: usize, epoch: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut state = seed;
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(((point as u64) << 32) | (epoch as u64 & 0xffff_ffff));
    rng
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Exact distribution of the number of successes among independent
/// Bernoulli trials with probabilities `p`.
pub fn state_distribution(p: &[f64]) -> Vec<f64> {
    let mut dist = vec![0.0; p.len() + 1];
    dist[0] = 1.0;
    for (i, &pi) in p.iter().enumerate() {
        let q = 1.0 - pi;
        for k in (1..=i + 1).rev() {
            dist[k] = dist[k] * q + dist[k - 1] * pi;
        }
        dist[0] *= q;
    }
    dist
}

/// Mean normalized gain of an OFF→ON transition.
fn on_gain(g: &PairingGeometry) -> f64 {
    1.0 - g.device().g_off() / g.device().g_nominal()
}

/// Expected normalized conductance change from a uniform initial state.
/// LRS variation has unit mean and drops out.
pub fn expected_delta_g(g: &PairingGeometry, delta_t: f64, init: InitState) -> f64 {
    expected_from_drives(&g.drives(delta_t), init, on_gain(g))
}

fn expected_from_drives(drives: &[BranchDrive], init: InitState, gain: f64) -> f64 {
    match init {
        InitState::AllOff => gain * drives.iter().map(BranchDrive::p_off_to_on).sum::<f64>(),
        InitState::AllOn => -gain * drives.iter().map(BranchDrive::p_on_to_off).sum::<f64>(),
    }
}

/// Fraction of epochs that start all-OFF at Δt = 0 under [`InitPolicy::Split`].
fn split_off_fraction(epochs: usize) -> f64 {
    epochs.div_ceil(2) as f64 / epochs as f64
}

fn split_init(delta_t: f64, epoch: usize) -> InitState {
    if delta_t > 0.0 || (delta_t == 0.0 && epoch % 2 == 0) {
        InitState::AllOff
    } else {
        InitState::AllOn
    }
}

/// Expected `delta_g_norm` and switched-count distribution at one Δt.
fn analytic_point(
    g: &PairingGeometry,
    drives: &[BranchDrive],
    params: &WindowParams,
    delta_t: f64,
) -> (f64, Vec<f64>) {
    let gain = on_gain(g);
    let up: Vec<f64> = drives.iter().map(BranchDrive::p_off_to_on).collect();
    let down: Vec<f64> = drives.iter().map(BranchDrive::p_on_to_off).collect();
    let mix = |w: f64, a: Vec<f64>, b: Vec<f64>| {
        a.iter()
            .zip(&b)
            .map(|(x, y)| w * x + (1.0 - w) * y)
            .collect::<Vec<_>>()
    };
    match params.init_policy {
        InitPolicy::AllOff => (
            expected_from_drives(drives, InitState::AllOff, gain),
            state_distribution(&up),
        ),
        InitPolicy::AllOn => (
            expected_from_drives(drives, InitState::AllOn, gain),
            state_distribution(&down),
        ),
        InitPolicy::Split if delta_t > 0.0 => (
            expected_from_drives(drives, InitState::AllOff, gain),
            state_distribution(&up),
        ),
        InitPolicy::Split if delta_t < 0.0 => (
            expected_from_drives(drives, InitState::AllOn, gain),
            state_distribution(&down),
        ),
        InitPolicy::Split => {
            let w = split_off_fraction(params.epochs);
            let e = w * expected_from_drives(drives, InitState::AllOff, gain)
                + (1.0 - w) * expected_from_drives(drives, InitState::AllOn, gain);
            // Every device shares the initial state, so the count law is a
            // mixture of two Poisson-binomials, not one with mixed probabilities.
            let states = mix(w, state_distribution(&up), state_distribution(&down));
            (e, states)
        }
        InitPolicy::Random { q } => {
            let e = gain
                * up.iter()
                    .zip(&down)
                    .map(|(u, d)| (1.0 - q) * u - q * d)
                    .sum::<f64>();
            let p: Vec<f64> = up
                .iter()
                .zip(&down)
                .map(|(u, d)| (1.0 - q) * u + q * d)
                .collect();
            (e, state_distribution(&p))
        }
    }
}

struct PointContext<'a> {
    geometry: &'a PairingGeometry,
    params: &'a WindowParams,
    drives: Vec<BranchDrive>,
    responses: Option<Vec<BranchResponse>>,
    delta_t: f64,
    index: usize,
}

impl PointContext<'_> {
    fn trial(&self, epoch: usize) -> Outcome {
        let g = self.geometry;
        let device = g.device();
        let n = g.n();
        let mut rng = rng_substream(self.params.seed, self.index, epoch);

        let mut states: Vec<DeviceState> = match self.params.init_policy {
            InitPolicy::Random { q } => (0..n)
                .map(|_| DeviceState {
                    on: rng.random::<f64>() < q,
                    g_on: 0.0,
                })
                .collect(),
            policy => {
                let init = match policy {
                    InitPolicy::AllOff => InitState::AllOff,
                    InitPolicy::AllOn => InitState::AllOn,
                    _ => split_init(self.delta_t, epoch),
                };
                vec![
                    DeviceState {
                        on: init == InitState::AllOn,
                        g_on: 0.0,
                    };
                    n
                ]
            }
        };
        for s in states.iter_mut() {
            s.g_on = device.sample_on_conductance(&mut rng);
        }
        let before: Vec<f64> = states.iter().map(|s| s.conductance(device)).collect();

        let noisy;
        let drives = match &self.responses {
            Some(resp) => {
                let (s_pre, s_post) = g.sample_amplitude_scales(&mut rng);
                noisy = resp
                    .iter()
                    .map(|r| r.scaled(device, s_pre, s_post))
                    .collect::<Vec<_>>();
                &noisy
            }
            None => &self.drives,
        };
        let counts = apply_drives(drives, &mut states, &mut rng).expect("one state per branch");

        let g0 = device.g_nominal();
        let delta_g_norm = states
            .iter()
            .zip(&before)
            .map(|(s, b)| (s.conductance(device) - b) / g0)
            .sum();
        Outcome {
            delta_g_norm,
            n_set: counts.n_set as u32,
            n_reset: counts.n_reset as u32,
        }
    }
}

/// Simulate every Δt grid point for `epochs` independent trials and attach
/// the analytic expectation and switched-count distribution.
pub fn run_window(cfg: &WindowConfig) -> Result<StdpWindow> {
    cfg.window.validate()?;
    let g = &cfg.geometry;
    let noisy = g.params().amp_noise_sigma > 0.0;
    let points = cfg
        .window
        .grid()
        .into_par_iter()
        .enumerate()
        .map(|(index, delta_t)| {
            let (drives, responses) = if noisy {
                let resp = g.responses(delta_t);
                (resp.iter().map(|r| *r.nominal()).collect(), Some(resp))
            } else {
                (g.drives(delta_t), None)
            };
            let (analytic, states) = analytic_point(g, &drives, &cfg.window, delta_t);
            let ctx = PointContext {
                geometry: g,
                params: &cfg.window,
                drives,
                responses,
                delta_t,
                index,
            };
            let outcomes = (0..cfg.window.epochs)
                .into_par_iter()
                .with_min_len(512)
                .map(|epoch| ctx.trial(epoch))
                .collect();
            WindowPoint {
                delta_t,
                outcomes,
                analytic,
                states,
            }
        })
        .collect();
    Ok(StdpWindow { n: g.n(), points })
}

/// Expected `delta_g_norm` and switched-count distribution at one Δt under
/// the window's init policy.
pub fn expected_point(g: &PairingGeometry, params: &WindowParams, delta_t: f64) -> (f64, Vec<f64>) {
    analytic_point(g, &g.drives(delta_t), params, delta_t)
}

/// Noiseless expectation curve under `policy` without running trials.
pub fn analytic_curve(g: &PairingGeometry, params: &WindowParams) -> Vec<(f64, f64)> {
    params
        .grid()
        .into_iter()
        .map(|dt| (dt, analytic_point(g, &g.drives(dt), params, dt).0))
        .collect()
}
