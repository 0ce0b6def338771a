//! Stochastic STDP learning windows for compound binary resistive synapses.
//!
//! A compound synapse is `n` bistable devices in parallel. The pre-synaptic
//! spike reaches device `i` through a dendritic branch that scales it by
//! `alpha_i` and delays it by `delay_i`; the device sees the difference
//! between the post spike and that branch copy, and switches stochastically
//! according to the peak voltage. Sweeping the pre/post offset Δt yields the
//! learning window.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod closedform;
pub mod config;
pub mod dendrite;
pub mod device;
pub mod energy;
pub mod error;
pub mod montecarlo;
pub mod output;
pub mod pairing;
pub mod svg;
pub mod validation;
pub mod waveform;

pub use analysis::{
    empirical_state_distribution, fit_exponential, fit_linear, fit_quadratic, observed_levels,
    point_stats, select_domain, total_variation, window_summary, FitModel, FitResult, FitSide,
    PointSummary,
};
pub use closedform::{
    avg_conductance_continuous, avg_conductance_direct, branch_peak, closed_form_report, k_index,
    quadratic_coeffs_fitted, quadratic_coeffs_paper, taylor_exp_neg, AppendixParams,
    ClosedFormReport, KIndex, QuadCoeffs,
};
pub use config::{load_config, OutputParams, RunConfig, SimulationParams};
pub use dendrite::{Branch, DelayAssignment, DendriteBank, DendriteParams};
pub use device::{normal_cdf, DeviceModel, DeviceParams, DeviceState, ProbabilityModel};
pub use energy::{
    snn_event_energy, spike_energy, table1, throughput_per_watt, EnergyScenario, SpikeMode, Table1,
    Table1Row, DEFAULT_GPU_BASELINE,
};
pub use error::{Error, Result};
pub use montecarlo::{
    analytic_curve, delta_t_grid, expected_delta_g, expected_point, rng_substream, run_window,
    state_distribution, InitPolicy, InitState, Outcome, StdpWindow, WindowConfig, WindowParams,
    WindowPoint,
};
pub use output::{read_mean_csv, read_window_dir, write_window_csv, FitRecord, MeanRow};
pub use pairing::{apply_drives, BranchDrive, PairingGeometry, PairingParams, SwitchCounts};
pub use svg::{write_svg_scatter, SvgOptions};
pub use validation::{run_validation, ValidationOptions, ValidationReport};
pub use waveform::{Shape, ShapeExtra, Side, SpikeWaveform, WaveformParams};
