//! Acceptance criteria A1-A10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion expected to hold does not.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use synstdp_core::analysis::{
    empirical_state_distribution, fit_exponential, fit_linear, fit_quadratic, select_domain,
    total_variation, window_summary,
};
use synstdp_core::closedform::{
    avg_conductance_continuous, avg_conductance_direct, quadratic_coeffs_fitted,
    quadratic_coeffs_paper, AppendixParams,
};
use synstdp_core::energy::{
    snn_event_energy, spike_energy, table1, throughput_per_watt, EnergyScenario, SpikeMode,
};
use synstdp_core::montecarlo::{analytic_curve, expected_point, run_window, state_distribution};
use synstdp_core::output::write_outcomes_csv;
use synstdp_core::validation::{enumerate_state_distribution, mc_outliers};
use synstdp_core::{FitModel, RunConfig, StdpWindow};

struct Outcome {
    id: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
}

fn timed(id: &'static str, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = f();
    Outcome {
        id,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn config(alpha_min: f64) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.dendrites.alpha_min = alpha_min;
    cfg
}

fn window(cfg: &RunConfig) -> StdpWindow {
    run_window(&cfg.build().unwrap()).unwrap()
}

fn a1_energy_table() -> (bool, String) {
    let published = [
        ("conservative", 45e-15, 62e-6, 16e3),
        ("medium", 0.45e-15, 560e-9, 1.8e6),
        ("aggressive", 0.045e-15, 25e-9, 41e6),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, spk, snn, tput) in published {
        let sc = EnergyScenario::preset(name).unwrap();
        let (e_spk, e_snn) = (
            spike_energy(&sc, SpikeMode::Head),
            snn_event_energy(&sc, SpikeMode::Head),
        );
        let t = throughput_per_watt(&sc, SpikeMode::Head);
        ok &= rel(e_spk, spk) < 0.005 && rel(e_snn, snn) <= 0.02 && rel(t, tput) <= 0.02;
        parts.push(format!(
            "{name}: E_spk {e_spk:.4e} E_SNN {e_snn:.4e} ({:+.2}%) img/s/W {t:.4e} ({:+.2}%)",
            100.0 * (e_snn - snn) / snn,
            100.0 * (t - tput) / tput
        ));
    }
    let t = table1(
        &[("conservative".into(), EnergyScenario::conservative())],
        SpikeMode::Head,
        170.0,
    )
    .unwrap();
    let ratio = t.rows[0].acceleration.unwrap();
    ok &= rel(ratio, 94.0) <= 0.03;
    parts.push(format!("ratio x{ratio:.1}"));
    (ok, parts.join("; "))
}

fn a2_mc_consistency() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, alpha_min) in [("alpha 1", 1.0), ("alpha 0.6-1", 0.6)] {
        let start = Instant::now();
        let w = window(&config(alpha_min));
        let secs = start.elapsed().as_secs_f64();
        let out = mc_outliers(&w);
        ok &= out.len() <= 1 && w.points.len() == 121 && secs <= 10.0;
        parts.push(format!(
            "{name}: {} pts x {} epochs, {} outlier(s){} in {secs:.2}s",
            w.points.len(),
            w.points[0].outcomes.len(),
            out.len(),
            out.iter()
                .map(|(dt, d, b)| format!(" [dt {dt}: {d:.2e} > {b:.2e}]"))
                .collect::<String>()
        ));
    }
    (ok, parts.join("; "))
}

fn a3_poisson_binomial() -> (bool, String) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for n in 1..=12 {
        for _ in 0..50 {
            let p: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let dp = state_distribution(&p);
            let en = enumerate_state_distribution(&p);
            for (a, b) in dp.iter().zip(&en) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        worst <= 1e-12 && secs < 1.0,
        format!("600 vectors, max abs diff {worst:.2e}, {secs:.3}s"),
    )
}

fn a4_closed_form() -> (bool, String) {
    let p = AppendixParams::default();
    // Frozen from an exact rational summation script.
    let oracle = [(0.0, 4.2), (0.25, 3.64), (1.3, 1.728), (3.5, 0.0)];
    let direct_err = oracle
        .iter()
        .map(|(t, v)| (avg_conductance_direct(&p, *t) - v).abs())
        .fold(0.0, f64::max);
    let fitted = quadratic_coeffs_fitted(&p, (0.3, 0.4)).unwrap();
    let (mut interp, mut envelope) = (0.0f64, 0.0f64);
    for j in 0..20 {
        let t = 3.5 * j as f64 / 19.0;
        interp = interp.max((fitted.eval(t) - avg_conductance_continuous(&p, t)).abs());
        envelope = envelope.max((avg_conductance_direct(&p, t) - fitted.eval(t)).abs());
    }
    let bound = p.gamma * p.delta_v * p.n as f64;
    let paper = quadratic_coeffs_paper(&p);
    // Curvature fitted on the raw direct sum as an extra cross-check.
    let pts: Vec<(f64, f64)> = (0..=35)
        .map(|j| {
            let t = j as f64 * 0.1;
            (t, avg_conductance_direct(&p, t))
        })
        .collect();
    let FitModel::Quadratic { c: direct_c, .. } = fit_quadratic(&pts).unwrap().model else {
        unreachable!()
    };
    let ok = direct_err <= 1e-12 && interp <= 1e-9 && fitted.c > 0.0 && envelope <= bound;
    (
        ok,
        format!(
            "direct(0) = {:.15}, oracle err {direct_err:.1e}; fitted (a,b,c) = ({:.4}, {:.4}, {:.4}), probe err {interp:.1e}; \
             max |direct - fitted| {envelope:.4} <= {bound:.2}; direct-sum LSQ c = {direct_c:.4}; \
             printed (a,b,c) = ({:.4}, {:.4}, {:.4}), deviation ({:+.4}, {:+.4}, {:+.4})",
            avg_conductance_direct(&p, 0.0),
            fitted.a,
            fitted.b,
            fitted.c,
            paper.a,
            paper.b,
            paper.c,
            fitted.a - paper.a,
            fitted.b - paper.b,
            fitted.c - paper.c,
        ),
    )
}

fn a5_shape() -> (bool, String) {
    let curve = |alpha_min: f64| {
        let wc = config(alpha_min).build().unwrap();
        analytic_curve(&wc.geometry, &wc.window)
    };
    let attenuated = select_domain(&curve(0.6), (1.0, 6.0));
    let (e, l) = (
        fit_exponential(&attenuated).unwrap(),
        fit_linear(&attenuated).unwrap(),
    );
    let exp_ok = e.r_squared >= 0.95 && e.rmse < l.rmse;
    let unit = select_domain(&curve(1.0), (1.0, 5.0));
    let (ue, ul) = (fit_exponential(&unit).unwrap(), fit_linear(&unit).unwrap());
    let lin_ok = ul.rmse <= ue.rmse;
    (
        exp_ok && lin_ok,
        format!(
            "alpha 0.6-1 on [1,6]: exp R2 {:.4} rmse {:.4} vs linear rmse {:.4} R2 {:.4} -> {}; \
             alpha 1 on [1,5]: linear rmse {:.4} vs exp rmse {:.4} -> {}",
            e.r_squared,
            e.rmse,
            l.rmse,
            l.r_squared,
            if exp_ok { "ok" } else { "not met" },
            ul.rmse,
            ue.rmse,
            if lin_ok { "ok" } else { "not met" },
        ),
    )
}

fn a6_plateaus() -> (bool, String) {
    let wc = config(1.0).build().unwrap();
    let spread = |lo: f64| {
        let v: Vec<f64> = (1..20)
            .map(|k| expected_point(&wc.geometry, &wc.window, lo + k as f64 * 0.05).0)
            .collect();
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        (max - min, v[0])
    };
    let (pos, pv) = spread(0.0);
    let (neg, nv) = spread(-1.0);
    (
        pos <= 1e-9 && neg <= 1e-9,
        format!("(0,1): value {pv:.9} spread {pos:.1e}; (-1,0): value {nv:.9} spread {neg:.1e}"),
    )
}

fn a7_levels() -> (bool, String) {
    let mut cfg = config(0.6);
    cfg.device.sigma_lrs = 0.0;
    let w = window(&cfg);
    let mut seen = [false; 17];
    let mut integral = true;
    for p in &w.points {
        for o in &p.outcomes {
            integral &= o.delta_g_norm == o.net_level() as f64;
            seen[o.net_level().unsigned_abs() as usize] = true;
        }
    }
    let missing: Vec<usize> = (1..=16).filter(|&k| !seen[k]).collect();
    let max_levels = window_summary(&w)
        .iter()
        .map(|s| s.distinct_levels)
        .max()
        .unwrap();
    (
        missing.is_empty() && integral,
        format!(
            "levels 1..16 missing: {missing:?}; integer outcomes: {integral}; max distinct levels at one dt: {max_levels}"
        ),
    )
}

fn a8_delay() -> (bool, String) {
    let mut cfg = config(0.6);
    cfg.dendrites.delay_max = 0.3;
    let wc = cfg.build().unwrap();
    let plain = config(0.6).build().unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for dt in [-0.1, 0.0, 0.1] {
        let g = expected_point(&wc.geometry, &wc.window, dt).0;
        let g0 = expected_point(&plain.geometry, &plain.window, dt).0;
        ok &= g.abs() > 0.0;
        parts.push(format!("dt {dt}: {g:.4} (no delay {g0:.2e})"));
    }
    (ok, parts.join("; "))
}

fn a9_noise() -> (bool, String) {
    let base = config(0.6);
    let reference = window(&base);
    let n = reference.n;
    let tv_against = |sigma: f64| -> Vec<f64> {
        let mut cfg = base.clone();
        cfg.simulation.amp_noise_sigma = sigma;
        let w = window(&cfg);
        w.points
            .iter()
            .zip(&reference.points)
            .map(|(p, r)| total_variation(&empirical_state_distribution(p, n), &r.states))
            .collect()
    };
    let strong = tv_against(0.05);
    let weak = tv_against(0.01);
    let above = strong.iter().filter(|&&d| d > 0.05).count();
    let max_strong = strong.iter().copied().fold(0.0, f64::max);
    let max_weak = weak.iter().copied().fold(0.0, f64::max);
    (
        above >= 10 && max_weak < max_strong,
        format!(
            "sigma 0.05: {above} dt points with TV > 0.05, max TV {max_strong:.3}; sigma 0.01: max TV {max_weak:.3}"
        ),
    )
}

fn a10_determinism() -> (bool, String) {
    let cfg = config(0.6);
    let wc = cfg.build().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let bytes: Vec<Vec<u8>> = [1, 4, 16]
        .iter()
        .map(|&threads| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let w = pool.install(|| run_window(&wc).unwrap());
            let path = dir.path().join(format!("window-{threads}.csv"));
            write_outcomes_csv(&w, &path).unwrap();
            std::fs::read(&path).unwrap()
        })
        .collect();
    let same = bytes.windows(2).all(|b| b[0] == b[1]);
    (
        same,
        format!(
            "window.csv {} bytes under 1/4/16 workers, identical: {same}",
            bytes[0].len()
        ),
    )
}

fn main() {
    // A5's attenuated half does not hold under this model; see README.
    let expected_failures = ["A5"];
    let results = [
        timed("A1", a1_energy_table),
        timed("A2", a2_mc_consistency),
        timed("A3", a3_poisson_binomial),
        timed("A4", a4_closed_form),
        timed("A5", a5_shape),
        timed("A6", a6_plateaus),
        timed("A7", a7_levels),
        timed("A8", a8_delay),
        timed("A9", a9_noise),
        timed("A10", a10_determinism),
    ];
    let mut unexpected = Vec::new();
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!(
            "{tag} {} ({:.2}s): {}",
            r.id,
            r.elapsed.as_secs_f64(),
            r.detail
        );
        if r.passed == expected_failures.contains(&r.id) {
            unexpected.push(r.id);
        }
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria pass", results.len());
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for {unexpected:?}");
        std::process::exit(1);
    }
}
