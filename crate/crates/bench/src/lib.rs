//! Fixtures shared by the benchmarks.

use synstdp_core::{PairingGeometry, RunConfig, WindowConfig};

/// The default attenuated setup with a reduced grid and epoch count.
pub fn small_window(epochs: usize, step: f64) -> WindowConfig {
    let mut cfg = RunConfig::default();
    cfg.simulation.epochs = epochs;
    cfg.simulation.delta_t_step = step;
    cfg.build().expect("default config is valid")
}

pub fn geometry() -> PairingGeometry {
    small_window(1, 1.0).geometry
}

/// Sixteen switching probabilities spread over (0, 1).
pub fn probabilities() -> Vec<f64> {
    (0..16).map(|i| (i as f64 + 0.5) / 16.0).collect()
}
