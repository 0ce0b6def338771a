//! Energy per image for a memristive spiking network, and the comparison
//! table against a GPU throughput baseline.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Images/s/W of the reference GPU.
pub const DEFAULT_GPU_BASELINE: f64 = 170.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyScenario {
    /// Head duration, seconds.
    pub tau_minus: f64,
    /// Tail duration, seconds.
    pub tau_plus: f64,
    pub a_plus: f64,
    pub a_minus: f64,
    pub r_on: f64,
    /// Joules per neuron per event.
    pub e_neuron: f64,
    pub eta_act: f64,
    pub eta_on: f64,
    /// Synaptic connections.
    pub s: f64,
    /// Neurons.
    pub n: f64,
    #[serde(default = "default_devices")]
    pub devices_per_synapse: f64,
}

fn default_devices() -> f64 {
    16.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpikeMode {
    /// Head term only.
    #[default]
    #[serde(alias = "headonly")]
    Head,
    /// Head plus the triangular tail.
    Full,
}

impl EnergyScenario {
    pub fn conservative() -> Self {
        Self {
            tau_minus: 500e-9,
            tau_plus: 2500e-9,
            a_plus: 0.3,
            a_minus: 0.15,
            r_on: 1e6,
            e_neuron: 70e-12,
            eta_act: 0.8,
            eta_on: 0.5,
            s: 61e6,
            n: 640e3,
            devices_per_synapse: 16.0,
        }
    }

    pub fn medium() -> Self {
        Self {
            tau_minus: 50e-9,
            tau_plus: 250e-9,
            r_on: 10e6,
            e_neuron: 700e-15,
            eta_act: 0.5,
            ..Self::conservative()
        }
    }

    pub fn aggressive() -> Self {
        Self {
            tau_minus: 5e-9,
            tau_plus: 25e-9,
            r_on: 10e6,
            e_neuron: 35e-15,
            eta_act: 0.1,
            ..Self::conservative()
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "conservative" => Some(Self::conservative()),
            "medium" => Some(Self::medium()),
            "aggressive" => Some(Self::aggressive()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("tau_minus", self.tau_minus),
            ("tau_plus", self.tau_plus),
            ("a_plus", self.a_plus),
            ("a_minus", self.a_minus),
            ("e_neuron", self.e_neuron),
            ("s", self.s),
            ("n", self.n),
            ("devices_per_synapse", self.devices_per_synapse),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(field, "must be nonnegative"));
            }
        }
        if !(self.r_on.is_finite() && self.r_on > 0.0) {
            return Err(Error::invalid("r_on", "must be positive"));
        }
        for (field, v) in [("eta_act", self.eta_act), ("eta_on", self.eta_on)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::invalid(field, "must lie in (0, 1]"));
            }
        }
        Ok(())
    }
}

/// Energy of one spike across an ON device, joules.
pub fn spike_energy(sc: &EnergyScenario, mode: SpikeMode) -> f64 {
    let head = sc.a_plus * sc.a_plus * sc.tau_minus / sc.r_on;
    match mode {
        SpikeMode::Head => head,
        SpikeMode::Full => head + sc.a_minus * sc.a_minus * sc.tau_plus / (3.0 * sc.r_on),
    }
}

/// Network energy for one event (one image), joules.
pub fn snn_event_energy(sc: &EnergyScenario, mode: SpikeMode) -> f64 {
    sc.eta_act * sc.eta_on * sc.s * sc.devices_per_synapse * spike_energy(sc, mode)
        + sc.n * sc.e_neuron
}

/// Images per second per watt; infinite for a network that costs nothing.
pub fn throughput_per_watt(sc: &EnergyScenario, mode: SpikeMode) -> f64 {
    let e = snn_event_energy(sc, mode);
    if e > 0.0 {
        1.0 / e
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub name: String,
    pub scenario: EnergyScenario,
    pub e_spk: f64,
    pub e_snn: f64,
    /// `None` when the throughput overflows.
    pub images_per_sec_per_watt: Option<f64>,
    pub acceleration: Option<f64>,
    pub overflow: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1 {
    pub mode: SpikeMode,
    pub gpu_baseline: f64,
    pub rows: Vec<Table1Row>,
}

pub fn table1(
    scenarios: &[(String, EnergyScenario)],
    mode: SpikeMode,
    baseline: f64,
) -> Result<Table1> {
    if !(baseline.is_finite() && baseline > 0.0) {
        return Err(Error::invalid("gpu_baseline", "must be positive"));
    }
    let rows = scenarios
        .iter()
        .map(|(name, sc)| {
            sc.validate()?;
            let tput = throughput_per_watt(sc, mode);
            let overflow = !tput.is_finite();
            Ok(Table1Row {
                name: name.clone(),
                scenario: *sc,
                e_spk: spike_energy(sc, mode),
                e_snn: snn_event_energy(sc, mode),
                images_per_sec_per_watt: (!overflow).then_some(tput),
                acceleration: (!overflow).then_some(tput / baseline),
                overflow,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Table1 {
        mode,
        gpu_baseline: baseline,
        rows,
    })
}

/// Value with an SI prefix, e.g. `45 fJ`.
pub fn si(value: f64, unit: &str) -> String {
    if !value.is_finite() {
        return format!("inf {unit}");
    }
    if value == 0.0 {
        return format!("0 {unit}");
    }
    const PREFIXES: [(f64, &str); 9] = [
        (1e9, "G"),
        (1e6, "M"),
        (1e3, "k"),
        (1.0, ""),
        (1e-3, "m"),
        (1e-6, "μ"),
        (1e-9, "n"),
        (1e-12, "p"),
        (1e-15, "f"),
    ];
    let (scale, p) = PREFIXES
        .iter()
        .find(|(s, _)| value.abs() >= *s * 0.9995)
        .copied()
        .unwrap_or((1e-15, "f"));
    let digits = format!("{:.4}", value / scale);
    let digits = digits.trim_end_matches('0').trim_end_matches('.');
    format!("{digits} {p}{unit}")
}

impl Table1 {
    pub fn render(&self) -> String {
        let mut rows: Vec<(String, Vec<String>)> = vec![
            (
                "".into(),
                self.rows.iter().map(|r| r.name.clone()).collect(),
            ),
            (
                "E_spk".into(),
                self.rows.iter().map(|r| si(r.e_spk, "J")).collect(),
            ),
            (
                "E_SNN".into(),
                self.rows.iter().map(|r| si(r.e_snn, "J")).collect(),
            ),
        ];
        rows.push((
            "img/s/W".into(),
            self.rows
                .iter()
                .map(|r| {
                    r.images_per_sec_per_watt
                        .map_or("overflow".into(), |v| si(v, ""))
                })
                .collect(),
        ));
        rows.push((
            format!("x GPU ({})", self.gpu_baseline),
            self.rows
                .iter()
                .map(|r| {
                    r.acceleration
                        .map_or("overflow".into(), |v| format!("{v:.1}"))
                })
                .collect(),
        ));
        let label_w = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
        let col_w = rows
            .iter()
            .flat_map(|r| r.1.iter().map(|c| c.chars().count()))
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        for (label, cells) in rows {
            let _ = write!(out, "{label:<label_w$}");
            for c in cells {
                let _ = write!(out, "  {c:>col_w$}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn standard_scenarios() -> Vec<(String, EnergyScenario)> {
    ["conservative", "medium", "aggressive"]
        .iter()
        .map(|n| (n.to_string(), EnergyScenario::preset(n).unwrap()))
        .collect()
}
