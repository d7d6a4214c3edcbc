use std::io::Write;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::transfer::{output_points, simulate, Engine, TRANSFER_HALF_WIDTH};
use crate::dynamics::{Tolerances, Trajectory};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::io::fmt_num;
use crate::schedule::{CouplingSchedule, PulseDelays, Shape};
use crate::sta::{synthesize_tqd_pulses, SynthesisMode, TqdPulseSummary};
use crate::system::{Dissipation, FockDims, SystemConfig};

/// Default decay grid κ₁ = κ₂ = κ in MHz.
pub const DEFAULT_KAPPAS: [f64; 6] = [0.0, 0.005, 0.01, 0.02, 0.05, 0.1];
/// Mechanical damping of the thermal runs, 500 Hz in MHz.
pub const THERMAL_GAMMA_M: f64 = 5e-4;
pub const THERMAL_N_TH: f64 = 100.0;

/// Detuning of the counter-diabatic arm of the decay comparison.
const DECAY_TQD_DELTA: f64 = 40.0;
/// Peak coupling of the adiabatic arm of the decay comparison.
const DECAY_ADIABATIC_G0: f64 = 1.0;
/// Window half-width of the decay comparison in units of 1/ν; 5 gives [0, 10/ν].
const DECAY_HALF_WIDTH: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanParameter {
    #[serde(rename = "delay-dt1")]
    DelayFirst,
    #[serde(rename = "delay-dt2")]
    DelaySecond,
    Detuning,
    Decay,
    ShapeRate,
}

impl ScanParameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScanParameter::DelayFirst => "delay-dt1",
            ScanParameter::DelaySecond => "delay-dt2",
            ScanParameter::Detuning => "detuning",
            ScanParameter::Decay => "decay",
            ScanParameter::ShapeRate => "shape-rate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    FinalP2,
    Fidelity,
    MaxPhonon,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::FinalP2 => "final-p2",
            Metric::Fidelity => "fidelity",
            Metric::MaxPhonon => "max-phonon",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    Adiabatic,
    Tqd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub parameter: ScanParameter,
    pub values: Vec<f64>,
    pub metric: Metric,
    pub base: SystemConfig,
    pub tolerances: Tolerances,
    /// Window half-width in units of 1/ν, centred on the pulse midpoint.
    pub half_width: f64,
    /// Output points; `None` picks enough to resolve the detuning.
    pub n_points: Option<usize>,
    /// Repeat open-system points with two more mechanical levels.
    pub truncation_check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub parameter: f64,
    pub metric: f64,
    /// |Δ metric| when the tolerances are halved.
    pub convergence_delta: f64,
    pub detuning_ratio: Option<f64>,
    /// |Δ metric| with d_m + 2 mechanical levels.
    pub truncation_delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub engine: String,
    pub tolerances: Tolerances,
}

/// Least-squares line through (ln ratio, ln metric).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    /// (max − min) / mean of metric × ratio.
    pub product_spread: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub parameter: ScanParameter,
    pub metric: Metric,
    pub rows: Vec<ScanRow>,
    pub provenance: Provenance,
    pub fit: Option<PowerLawFit>,
    pub warnings: Vec<String>,
}

impl ScanResult {
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(
            w,
            "{},{},convergence_delta,detuning_ratio,truncation_delta",
            self.parameter.as_str(),
            self.metric.as_str()
        )?;
        let opt = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                fmt_num(r.parameter),
                fmt_num(r.metric),
                fmt_num(r.convergence_delta),
                opt(r.detuning_ratio),
                opt(r.truncation_delta)
            )?;
        }
        Ok(())
    }

    pub fn row_at(&self, parameter: f64) -> Option<&ScanRow> {
        self.rows.iter().find(|r| r.parameter == parameter)
    }
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Option<PowerLawFit> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let products: Vec<f64> = points.iter().map(|&(x, y)| x * y).collect();
    let mean = products.iter().sum::<f64>() / n;
    let (lo, hi) = products
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &p| (a.min(p), b.max(p)));
    Some(PowerLawFit {
        slope,
        intercept: my - slope * mx,
        product_spread: (hi - lo) / mean,
    })
}

struct PointOutcome {
    metric: f64,
    warnings: Vec<String>,
}

impl ScanSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::validation("scan.values", "must not be empty"));
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::validation("scan.values", format!("must be finite, got {v}")));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::validation("grid.half_width", "must be positive"));
        }
        self.base.validate()?;
        self.tolerances.validate()?;
        if self.base.schedule.nu().is_none() {
            return Err(Error::validation(
                "schedule.kind",
                "scans need a vitanov or tqd-synthesized schedule",
            ));
        }
        Ok(())
    }

    fn nu(&self) -> f64 {
        self.base.schedule.nu().expect("validated")
    }

    /// System configuration of the scan point at `value`.
    pub fn point_config(&self, value: f64) -> Result<SystemConfig> {
        let mut c = self.base.clone();
        let delays = c.schedule.delays();
        match self.parameter {
            ScanParameter::DelayFirst => {
                c.schedule = c.schedule.with_delays(PulseDelays {
                    first: value,
                    ..delays
                })?;
            }
            ScanParameter::DelaySecond => {
                c.schedule = c.schedule.with_delays(PulseDelays {
                    second: value,
                    ..delays
                })?;
            }
            ScanParameter::Detuning => {
                let (s, _) = synthesize_tqd_pulses(self.nu(), value, SynthesisMode::EqualCouplings)?;
                c.schedule = s.with_delays(delays)?;
                c.detunings = [value, value];
            }
            ScanParameter::Decay => {
                if value < 0.0 {
                    return Err(Error::validation("scan.values", "decay rates must be >= 0"));
                }
                c.dissipation.kappa1 = value;
                c.dissipation.kappa2 = value;
            }
            ScanParameter::ShapeRate => {
                c.schedule = match *c.schedule.shape() {
                    Shape::Vitanov { g0, .. } => CouplingSchedule::vitanov(g0, value)?,
                    Shape::TqdSynthesized { delta, .. } => {
                        synthesize_tqd_pulses(value, delta, SynthesisMode::EqualCouplings)?.0
                    }
                    _ => unreachable!("validated"),
                }
                .with_delays(delays)?;
            }
        }
        Ok(c)
    }

    /// Output grid of the scan point configured by `config`.
    pub fn point_grid(&self, config: &SystemConfig) -> Result<TimeGrid> {
        let nu = config.schedule.nu().expect("validated");
        let span = 2.0 * self.half_width / nu;
        let fastest = config.detunings[0].abs().max(config.detunings[1].abs());
        let n = self.n_points.unwrap_or_else(|| output_points(span, fastest));
        let grid = TimeGrid::protocol_window(nu, self.half_width, n)?;
        match self.parameter {
            ScanParameter::DelayFirst | ScanParameter::DelaySecond => {
                let margin = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                grid.widened(margin)
            }
            _ => Ok(grid),
        }
    }

    /// Decay scans and any scan with dissipation use the master equation.
    pub fn engine(&self) -> Engine {
        let open = match self.parameter {
            ScanParameter::Decay => true,
            _ => !self.base.dissipation.is_closed(),
        };
        if open {
            Engine::Lindblad
        } else {
            Engine::Schrodinger
        }
    }

    fn config_hash(&self) -> String {
        hex::encode(Sha256::digest(format!("{self:?}").as_bytes()))
    }
}

fn evaluate(
    config: &SystemConfig,
    grid: &TimeGrid,
    metric: Metric,
    engine: Engine,
    dims: FockDims,
    tol: Tolerances,
) -> Result<PointOutcome> {
    let config = SystemConfig {
        fock_dims: dims,
        ..config.clone()
    };
    let sim = simulate(&config, grid, engine, tol)?;
    let traj = &sim.trajectory;
    let metric = match metric {
        Metric::FinalP2 => traj.final_populations()[2],
        Metric::MaxPhonon => traj.max_population(1),
        Metric::Fidelity => sim.fidelity,
    };
    Ok(PointOutcome {
        metric,
        warnings: traj.diagnostics.warnings.clone(),
    })
}

/// Trajectory of the single scan point at `value`.
pub fn run_scan_point(spec: &ScanSpec, value: f64) -> Result<Trajectory> {
    spec.validate()?;
    let config = spec.point_config(value)?;
    let grid = spec.point_grid(&config)?;
    Ok(simulate(&config, &grid, spec.engine(), spec.tolerances)?.trajectory)
}

/// Runs every scan point (in parallel, rows kept in input order).
pub fn run_scan(spec: &ScanSpec) -> Result<ScanResult> {
    spec.validate()?;
    let engine = spec.engine();
    let dims = spec.base.fock_dims;
    let rows: Vec<(ScanRow, Vec<String>)> = spec
        .values
        .par_iter()
        .map(|&value| -> Result<(ScanRow, Vec<String>)> {
            let config = spec.point_config(value)?;
            let grid = spec.point_grid(&config)?;
            let base = evaluate(&config, &grid, spec.metric, engine, dims, spec.tolerances)?;
            let fine = evaluate(&config, &grid, spec.metric, engine, dims, spec.tolerances.halved())?;
            let truncation_delta = if engine == Engine::Lindblad && spec.truncation_check {
                let bigger = dims.with_mechanical(dims.mechanical + 2);
                let wide = evaluate(&config, &grid, spec.metric, engine, bigger, spec.tolerances)?;
                Some((wide.metric - base.metric).abs())
            } else {
                None
            };
            let detuning_ratio = match *config.schedule.shape() {
                Shape::TqdSynthesized { nu, delta } => {
                    Some(TqdPulseSummary::for_parameters(nu, delta).detuning_ratio)
                }
                _ => None,
            };
            let warnings = base
                .warnings
                .into_iter()
                .map(|w| format!("{}={value}: {w}", spec.parameter.as_str()))
                .collect();
            Ok((
                ScanRow {
                    parameter: value,
                    metric: base.metric,
                    convergence_delta: (fine.metric - base.metric).abs(),
                    detuning_ratio,
                    truncation_delta,
                },
                warnings,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut warnings = Vec::new();
    let rows: Vec<ScanRow> = rows
        .into_iter()
        .map(|(r, w)| {
            warnings.extend(w);
            r
        })
        .collect();
    let fit = match spec.parameter {
        ScanParameter::Detuning => fit_power_law(
            &rows
                .iter()
                .filter_map(|r| r.detuning_ratio.map(|x| (x, r.metric)))
                .collect::<Vec<_>>(),
        ),
        _ => None,
    };
    for w in &warnings {
        warn!("{w}");
    }
    Ok(ScanResult {
        parameter: spec.parameter,
        metric: spec.metric,
        rows,
        provenance: Provenance {
            config_hash: spec.config_hash(),
            engine: engine.as_str().into(),
            tolerances: spec.tolerances,
        },
        fit,
        warnings,
    })
}

fn closed_tqd_spec(parameter: ScanParameter, values: &[f64], metric: Metric, delta: f64, nu: f64) -> Result<ScanSpec> {
    let (schedule, _) = synthesize_tqd_pulses(nu, delta, SynthesisMode::EqualCouplings)?;
    Ok(ScanSpec {
        parameter,
        values: values.to_vec(),
        metric,
        base: SystemConfig {
            schedule,
            detunings: [delta, delta],
            dissipation: Dissipation::default(),
            fock_dims: FockDims::CLOSED,
        },
        tolerances: Tolerances::SCHRODINGER,
        half_width: TRANSFER_HALF_WIDTH,
        n_points: None,
        truncation_check: false,
    })
}

/// Spec of [`run_detuning_scan`].
pub fn detuning_scan_spec(deltas: &[f64], nu: f64) -> Result<ScanSpec> {
    let base = deltas.first().copied().unwrap_or(1.0);
    closed_tqd_spec(ScanParameter::Detuning, deltas, Metric::MaxPhonon, base, nu)
}

/// Maximum phonon population of the closed transfer against δ.
pub fn run_detuning_scan(deltas: &[f64], nu: f64) -> Result<ScanResult> {
    if let Some(d) = deltas.iter().find(|&&d| d <= 0.0 || d.is_nan()) {
        return Err(Error::validation("scan.values", format!("detunings must be > 0, got {d}")));
    }
    run_scan(&detuning_scan_spec(deltas, nu)?)
}

/// Spec of [`run_delay_scan`].
pub fn delay_scan_spec(values: &[f64], pulse: crate::schedule::Pulse, delta: f64, nu: f64) -> Result<ScanSpec> {
    use crate::schedule::Pulse;
    let parameter = match pulse {
        Pulse::G1 => ScanParameter::DelayFirst,
        Pulse::G2 => ScanParameter::DelaySecond,
        Pulse::Both => {
            return Err(Error::invalid("pulse", "a delay scan shifts one pulse"));
        }
    };
    closed_tqd_spec(parameter, values, Metric::FinalP2, delta, nu)
}

/// Final p₂ of the closed transfer with one pulse shifted by each Δt.
pub fn run_delay_scan(
    values: &[f64],
    pulse: crate::schedule::Pulse,
    delta: f64,
    nu: f64,
) -> Result<ScanResult> {
    let spec = delay_scan_spec(values, pulse, delta, nu)?;
    if let Some(v) = values.iter().find(|v| v.abs() > 5.0 / nu) {
        return Err(Error::validation("scan.values", format!("|Δt| = {} exceeds 5/ν", v.abs())));
    }
    run_scan(&spec)
}

/// Spec of [`run_decay_scan`].
pub fn decay_scan_spec(kappas: &[f64], protocol: Protocol, nu: f64) -> Result<ScanSpec> {
    let (schedule, detunings) = match protocol {
        Protocol::Adiabatic => (CouplingSchedule::vitanov(DECAY_ADIABATIC_G0, nu)?, [0.0, 0.0]),
        Protocol::Tqd => (
            synthesize_tqd_pulses(nu, DECAY_TQD_DELTA, SynthesisMode::EqualCouplings)?.0,
            [DECAY_TQD_DELTA; 2],
        ),
    };
    Ok(ScanSpec {
        parameter: ScanParameter::Decay,
        values: kappas.to_vec(),
        metric: Metric::Fidelity,
        base: SystemConfig {
            schedule,
            detunings,
            dissipation: Dissipation {
                kappa1: 0.0,
                kappa2: 0.0,
                gamma_m: THERMAL_GAMMA_M,
                n_th: THERMAL_N_TH,
            },
            fock_dims: FockDims::THERMAL,
        },
        tolerances: Tolerances::LINDBLAD,
        half_width: DECAY_HALF_WIDTH,
        n_points: None,
        truncation_check: true,
    })
}

/// Transfer fidelity under κ₁ = κ₂ = κ with thermal mechanical damping.
pub fn run_decay_scan(kappas: &[f64], protocol: Protocol, nu: f64) -> Result<ScanResult> {
    run_scan(&decay_scan_spec(kappas, protocol, nu)?)
}
