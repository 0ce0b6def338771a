//! Self-check suite: Monte Carlo against the analytic expectation, the
//! switched-count distribution against enumeration, the energy table, and
//! the closed-form oracle.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::point_stats;
use crate::closedform::{
    avg_conductance_continuous, avg_conductance_direct, quadratic_coeffs_fitted, AppendixParams,
};
use crate::config::RunConfig;
use crate::energy::{
    snn_event_energy, spike_energy, table1, throughput_per_watt, EnergyScenario, SpikeMode,
    DEFAULT_GPU_BASELINE,
};
use crate::error::Result;
use crate::montecarlo::{run_window, state_distribution, StdpWindow};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    pub epochs: usize,
    pub delta_t_step: f64,
    pub seed: u64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            epochs: 10_000,
            delta_t_step: 0.1,
            seed: 42,
        }
    }
}

/// Distribution of the number of successes by summing over all `2ⁿ`
/// outcomes.
pub fn enumerate_state_distribution(p: &[f64]) -> Vec<f64> {
    let n = p.len();
    assert!(n < 24, "enumeration is exponential in n");
    let mut dist = vec![0.0; n + 1];
    for mask in 0u32..(1u32 << n) {
        let mut prob = 1.0;
        for (i, &pi) in p.iter().enumerate() {
            prob *= if mask >> i & 1 == 1 { pi } else { 1.0 - pi };
        }
        dist[mask.count_ones() as usize] += prob;
    }
    dist
}

/// Grid points where `|MC mean − analytic| > 4·s/√N`.
pub fn mc_outliers(w: &StdpWindow) -> Vec<(f64, f64, f64)> {
    w.points
        .iter()
        .filter_map(|p| {
            let (mean, std) = point_stats(p);
            let bound = 4.0 * std / (p.outcomes.len() as f64).sqrt();
            let diff = (mean - p.analytic).abs();
            (diff > bound).then_some((p.delta_t, diff, bound))
        })
        .collect()
}

/// The attenuated (`alpha_min`) or unattenuated (`1.0`) default setup.
pub fn setup_config(alpha_min: f64, opts: &ValidationOptions) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.dendrites.alpha_min = alpha_min;
    cfg.simulation.epochs = opts.epochs;
    cfg.simulation.delta_t_step = opts.delta_t_step;
    cfg.simulation.seed = opts.seed;
    cfg
}

fn check_mc(report: &mut ValidationReport, opts: &ValidationOptions) -> Result<()> {
    for (name, alpha_min) in [
        ("mc-vs-analytic attenuated", 0.6),
        ("mc-vs-analytic unit", 1.0),
    ] {
        let w = run_window(&setup_config(alpha_min, opts).build()?)?;
        let out = mc_outliers(&w);
        let detail = format!(
            "{} points x {} epochs, {} outside 4s/sqrt(N){}",
            w.points.len(),
            opts.epochs,
            out.len(),
            out.iter()
                .map(|(dt, d, b)| format!(" [Δt {dt}: {d:.3e} > {b:.3e}]"))
                .collect::<String>()
        );
        report.push(name, out.len() <= 1, detail);
    }
    Ok(())
}

fn check_poisson_binomial(report: &mut ValidationReport) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for n in 1..=12 {
        for _ in 0..50 {
            let p: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let a = state_distribution(&p);
            let b = enumerate_state_distribution(&p);
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    report.push(
        "poisson-binomial",
        worst <= 1e-12,
        format!("600 vectors n=1..12, max |dp| = {worst:.2e}"),
    );
}

fn check_energy(report: &mut ValidationReport) -> Result<()> {
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    let published = [
        ("conservative", 45e-15, 62e-6, 16e3),
        ("medium", 0.45e-15, 560e-9, 1.8e6),
        ("aggressive", 0.045e-15, 25e-9, 41e6),
    ];
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for (name, spk, snn, tput) in published {
        let sc = EnergyScenario::preset(name).expect("preset");
        worst.0 = worst.0.max(rel(spike_energy(&sc, SpikeMode::Head), spk));
        worst.1 = worst
            .1
            .max(rel(snn_event_energy(&sc, SpikeMode::Head), snn));
        worst.2 = worst
            .2
            .max(rel(throughput_per_watt(&sc, SpikeMode::Head), tput));
    }
    let t = table1(
        &[("conservative".into(), EnergyScenario::conservative())],
        SpikeMode::Head,
        DEFAULT_GPU_BASELINE,
    )?;
    let ratio = t.rows[0].acceleration.unwrap_or(f64::NAN);
    let passed = worst.0 < 0.005 && worst.1 <= 0.02 && worst.2 <= 0.02 && rel(ratio, 94.0) <= 0.03;
    report.push(
        "energy table",
        passed,
        format!(
            "max rel err E_spk {:.2e}, E_SNN {:.2e}, img/s/W {:.2e}; ratio {ratio:.1}",
            worst.0, worst.1, worst.2
        ),
    );
    Ok(())
}

fn check_closed_form(report: &mut ValidationReport) -> Result<()> {
    let p = AppendixParams::default();
    // Brute force over the 16 branches, with clamping spelled out separately.
    let brute: f64 = (1..=16)
        .map(|i| {
            let v = 1.3 - 0.02 * i as f64 - 1.0;
            if v <= 0.0 {
                0.0
            } else {
                (2.0 * v).min(1.0)
            }
        })
        .sum();
    let direct = avg_conductance_direct(&p, 0.0);
    let q = quadratic_coeffs_fitted(&p, (0.3, 0.4))?;
    let mut interp: f64 = 0.0;
    let mut envelope: f64 = 0.0;
    for j in 0..20 {
        let t = 3.5 * j as f64 / 19.0;
        interp = interp.max((q.eval(t) - avg_conductance_continuous(&p, t)).abs());
        envelope = envelope.max((avg_conductance_direct(&p, t) - q.eval(t)).abs());
    }
    let bound = p.gamma * p.delta_v * p.n as f64;
    let passed = (direct - 4.2).abs() <= 1e-12
        && (direct - brute).abs() <= 1e-12
        && interp <= 1e-9
        && q.c > 0.0
        && envelope <= bound;
    report.push(
        "closed form",
        passed,
        format!(
            "direct(0) = {direct}, fitted (a, b, c) = ({:.6}, {:.6}, {:.6}), interpolation err {interp:.1e}, max |direct - fitted| {envelope:.4} <= {bound}",
            q.a, q.b, q.c
        ),
    );
    Ok(())
}

pub fn run_validation(opts: &ValidationOptions) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    check_mc(&mut report, opts)?;
    check_poisson_binomial(&mut report);
    check_energy(&mut report)?;
    check_closed_form(&mut report)?;
    Ok(report)
}
