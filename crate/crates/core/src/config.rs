//! TOML run configuration: parsing, defaulting, validation and the run
//! manifest written next to every output.
//!
//! A file has the optional sections `[system]`, `[schedule]`,
//! `[dissipation]`, `[grid]`, `[scan]` and `[solver]`. Every field left out
//! is filled from the per-command [`Defaults`] and listed in
//! [`Resolved::defaulted`].

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::dynamics::Tolerances;
use crate::error::{Error, Result};
use crate::experiments::{output_points, Metric, ScanParameter, ScanSpec};
use crate::grid::TimeGrid;
use crate::io::read_schedule_csv;
use crate::schedule::{CouplingSchedule, PulseDelays, ScheduleKind, Shape};
use crate::sta::{synthesize_tqd_pulses, SynthesisMode};
use crate::system::{Dissipation, FockDims, SystemConfig};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSystem {
    pub delta: Option<f64>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub fock_dims: Option<[usize; 3]>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSchedule {
    pub kind: Option<ScheduleKind>,
    pub nu: Option<f64>,
    pub g0: Option<f64>,
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub samples: Option<Vec<[f64; 3]>>,
    /// `t,g1,g2` file, relative to the config file.
    pub samples_csv: Option<PathBuf>,
    pub delay1: Option<f64>,
    pub delay2: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDissipation {
    /// Sets κ₁ = κ₂.
    pub kappa: Option<f64>,
    pub kappa1: Option<f64>,
    pub kappa2: Option<f64>,
    pub gamma_m: Option<f64>,
    pub n_th: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub n_points: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScan {
    pub parameter: Option<ScanParameter>,
    pub values: Option<Vec<f64>>,
    /// `start:stop:step`, inclusive of both ends.
    pub range: Option<String>,
    pub metric: Option<Metric>,
    pub half_width: Option<f64>,
    pub n_points: Option<usize>,
    pub truncation_check: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSolver {
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
}

/// A configuration file as written, before defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub system: RawSystem,
    #[serde(default)]
    pub schedule: RawSchedule,
    #[serde(default)]
    pub dissipation: RawDissipation,
    #[serde(default)]
    pub grid: RawGrid,
    pub scan: Option<RawScan>,
    #[serde(default)]
    pub solver: RawSolver,
    /// Present in manifests; ignored on input.
    pub manifest: Option<toml::Table>,
}

impl RawConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut raw = Self::from_toml(&text, path)?;
        if let Some(rel) = raw.schedule.samples_csv.take() {
            let file = path.parent().unwrap_or(Path::new(".")).join(rel);
            let table = read_schedule_csv(std::io::BufReader::new(fs::File::open(&file)?))?;
            if let Shape::Tabulated(t) = table.shape() {
                raw.schedule.samples = Some(t.samples().map(|(t, a, b)| [t, a, b]).collect());
            }
        }
        Ok(raw)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemSection {
    pub delta1: f64,
    pub delta2: f64,
    pub fock_dims: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSection {
    pub kind: ScheduleKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<[f64; 3]>>,
    pub delay1: f64,
    pub delay2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSection {
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSection {
    pub parameter: ScanParameter,
    pub values: Vec<f64>,
    pub metric: Metric,
    pub half_width: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
    pub truncation_check: bool,
}

/// Fully resolved configuration; every field is explicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub system: SystemSection,
    pub schedule: ScheduleSection,
    pub dissipation: Dissipation,
    pub grid: GridSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSection>,
    pub solver: Tolerances,
}

/// How the output grid is chosen when `[grid]` is absent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridDefault {
    /// `[0, 10/ν]` with 2001 points.
    Vitanov,
    /// Centred on 5/ν with half-width `h/ν`, sampled to resolve δ.
    Centred(f64),
}

/// Per-command defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Defaults {
    pub kind: ScheduleKind,
    pub nu: f64,
    pub g0: f64,
    pub delta: f64,
    pub dissipation: Dissipation,
    pub fock_dims: FockDims,
    pub grid: GridDefault,
    pub tolerances: Tolerances,
    pub scan: Option<ScanDefaults>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanDefaults {
    pub parameter: ScanParameter,
    pub values: Vec<f64>,
    pub metric: Metric,
    pub half_width: f64,
    pub truncation_check: bool,
}

pub const DEFAULT_NU: f64 = 2.0;
pub const DEFAULT_DELTA: f64 = 40.0;
pub const DEFAULT_G0: f64 = 1.0;

impl Default for Defaults {
    fn default() -> Self {
        Self {
            kind: ScheduleKind::TqdSynthesized,
            nu: DEFAULT_NU,
            g0: DEFAULT_G0,
            delta: DEFAULT_DELTA,
            dissipation: Dissipation::default(),
            fock_dims: FockDims::CLOSED,
            grid: GridDefault::Centred(crate::experiments::TRANSFER_HALF_WIDTH),
            tolerances: Tolerances::SCHRODINGER,
            scan: None,
        }
    }
}

/// Resolved configuration and the names of every defaulted field.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub config: ResolvedConfig,
    pub defaulted: Vec<String>,
}

struct Tracker(Vec<String>);

impl Tracker {
    fn take<T>(&mut self, name: &str, value: Option<T>, default: T) -> T {
        value.unwrap_or_else(|| {
            self.0.push(name.to_string());
            default
        })
    }
}

/// Parses `start:stop:step` into an inclusive list. A value within 1e-9
/// steps of zero is set to exactly 0, so `-0.6:0.6:0.05` contains the
/// unshifted point.
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let bad = |reason: &str| Error::validation("scan.range", format!("`{text}`: {reason}"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("expected start:stop:step"));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad("not a number")))
        .collect::<Result<_>>()?;
    let (a, b, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0 && step.is_finite() && a.is_finite() && b.is_finite()) || b < a {
        return Err(bad("need finite start <= stop and step > 0"));
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| {
            let v = a + i as f64 * step;
            if v.abs() < 1e-9 * step {
                0.0
            } else {
                v
            }
        })
        .collect())
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(field, format!("must be positive, got {v}")))
    }
}

/// Applies `defaults` to `raw` and validates the result.
pub fn resolve(raw: &RawConfig, defaults: &Defaults) -> Result<Resolved> {
    let mut tr = Tracker(Vec::new());
    let s = &raw.schedule;
    let kind = tr.take("schedule.kind", s.kind, defaults.kind);
    let (nu, g0, g1, g2, samples) = match kind {
        ScheduleKind::Vitanov => (
            Some(tr.take("schedule.nu", s.nu, defaults.nu)),
            Some(tr.take("schedule.g0", s.g0, defaults.g0)),
            None,
            None,
            None,
        ),
        ScheduleKind::TqdSynthesized => {
            (Some(tr.take("schedule.nu", s.nu, defaults.nu)), None, None, None, None)
        }
        ScheduleKind::Constant => (
            None,
            None,
            Some(s.g1.ok_or_else(|| Error::validation("schedule.g1", "required for constant schedules"))?),
            Some(s.g2.ok_or_else(|| Error::validation("schedule.g2", "required for constant schedules"))?),
            None,
        ),
        ScheduleKind::Tabulated => (
            None,
            None,
            None,
            None,
            Some(s.samples.clone().ok_or_else(|| {
                Error::validation("schedule.samples", "required for tabulated schedules")
            })?),
        ),
    };
    if let Some(nu) = nu {
        positive("schedule.nu", nu)?;
    }
    if let Some(g0) = g0 {
        positive("schedule.g0", g0)?;
    }
    let schedule = ScheduleSection {
        kind,
        nu,
        g0,
        g1,
        g2,
        samples,
        delay1: tr.take("schedule.delay1", s.delay1, 0.0),
        delay2: tr.take("schedule.delay2", s.delay2, 0.0),
    };

    let sys = &raw.system;
    let default_delta = match kind {
        ScheduleKind::TqdSynthesized => defaults.delta,
        _ => 0.0,
    };
    let (delta1, delta2) = match (sys.delta, sys.delta1, sys.delta2) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(Error::validation("system.delta", "give either delta or delta1/delta2"));
        }
        (Some(d), None, None) => (d, d),
        (None, d1, d2) => (
            tr.take("system.delta1", d1, default_delta),
            tr.take("system.delta2", d2, default_delta),
        ),
    };
    if kind == ScheduleKind::TqdSynthesized {
        positive("system.delta", delta1)?;
        if delta1 != delta2 {
            return Err(Error::validation(
                "system.delta2",
                "synthesized pulses need delta1 == delta2",
            ));
        }
    }
    let fock_dims = tr.take("system.fock_dims", sys.fock_dims, defaults.fock_dims.as_array());
    let system = SystemSection {
        delta1,
        delta2,
        fock_dims,
    };

    let d = &raw.dissipation;
    let (k1, k2) = match (d.kappa, d.kappa1, d.kappa2) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(Error::validation("dissipation.kappa", "give either kappa or kappa1/kappa2"));
        }
        (Some(k), None, None) => (k, k),
        (None, k1, k2) => (
            tr.take("dissipation.kappa1", k1, defaults.dissipation.kappa1),
            tr.take("dissipation.kappa2", k2, defaults.dissipation.kappa2),
        ),
    };
    let dissipation = Dissipation {
        kappa1: k1,
        kappa2: k2,
        gamma_m: tr.take("dissipation.gamma_m", d.gamma_m, defaults.dissipation.gamma_m),
        n_th: tr.take("dissipation.n_th", d.n_th, defaults.dissipation.n_th),
    };

    let solver = Tolerances {
        rtol: tr.take("solver.rtol", raw.solver.rtol, defaults.tolerances.rtol),
        atol: tr.take("solver.atol", raw.solver.atol, defaults.tolerances.atol),
    };
    if !(solver.rtol > 0.0) {
        return Err(Error::validation("solver.rtol", "must be positive"));
    }
    if !(solver.atol > 0.0) {
        return Err(Error::validation("solver.atol", "must be positive"));
    }

    let scan = match (&raw.scan, &defaults.scan) {
        (None, None) => None,
        (scan, sd) => {
            let empty = RawScan::default();
            let rs = scan.as_ref().unwrap_or(&empty);
            let values = match (&rs.values, &rs.range) {
                (Some(_), Some(_)) => {
                    return Err(Error::validation("scan.values", "give either values or range"));
                }
                (Some(v), None) => v.clone(),
                (None, Some(r)) => parse_range(r)?,
                (None, None) => match sd {
                    Some(sd) => {
                        tr.0.push("scan.values".into());
                        sd.values.clone()
                    }
                    None => return Err(Error::validation("scan.values", "required")),
                },
            };
            let need = |name: &str| Error::validation(name, "required");
            let parameter = match (rs.parameter, sd) {
                (Some(p), _) => p,
                (None, Some(sd)) => tr.take("scan.parameter", None, sd.parameter),
                (None, None) => return Err(need("scan.parameter")),
            };
            let metric = match (rs.metric, sd) {
                (Some(m), _) => m,
                (None, Some(sd)) => tr.take("scan.metric", None, sd.metric),
                (None, None) => return Err(need("scan.metric")),
            };
            let half_width = match (rs.half_width, sd) {
                (Some(h), _) => h,
                (None, Some(sd)) => tr.take("scan.half_width", None, sd.half_width),
                (None, None) => return Err(need("scan.half_width")),
            };
            positive("scan.half_width", half_width)?;
            let truncation_check = tr.take(
                "scan.truncation_check",
                rs.truncation_check,
                sd.as_ref().is_some_and(|sd| sd.truncation_check),
            );
            if values.is_empty() {
                return Err(Error::validation("scan.values", "must not be empty"));
            }
            if let Some(v) = values.iter().find(|v| !v.is_finite()) {
                return Err(Error::validation("scan.values", format!("must be finite, got {v}")));
            }
            Some(ScanSection {
                parameter,
                values,
                metric,
                half_width,
                n_points: rs.n_points,
                truncation_check,
            })
        }
    };

    let mut config = ResolvedConfig {
        system,
        schedule,
        dissipation,
        grid: GridSection {
            t_start: 0.0,
            t_end: 1.0,
            n_points: 2,
        },
        scan,
        solver,
    };
    config.grid = resolve_grid(&raw.grid, &config, defaults.grid, &mut tr)?;
    config.system_config()?;
    Ok(Resolved {
        config,
        defaulted: tr.0,
    })
}

fn resolve_grid(
    raw: &RawGrid,
    config: &ResolvedConfig,
    default: GridDefault,
    tr: &mut Tracker,
) -> Result<GridSection> {
    let fallback = match (config.schedule.nu, default) {
        (Some(nu), GridDefault::Vitanov) => Some(TimeGrid::vitanov_default(nu)?),
        (Some(nu), GridDefault::Centred(h)) => {
            let fastest = config.system.delta1.abs().max(config.system.delta2.abs());
            Some(TimeGrid::protocol_window(nu, h, output_points(2.0 * h / nu, fastest))?)
        }
        (None, _) => match &config.schedule.samples {
            Some(s) if s.len() >= 2 => Some(TimeGrid::new(
                s[0][0],
                s[s.len() - 1][0],
                crate::grid::DEFAULT_POINTS,
            )?),
            _ => None,
        },
    };
    let need = |field: &str| Error::validation(field, "required when the schedule has no rate");
    let t_start = match (raw.t_start, &fallback) {
        (Some(t), _) => t,
        (None, Some(g)) => tr.take("grid.t_start", None, g.t_start()),
        (None, None) => return Err(need("grid.t_start")),
    };
    let t_end = match (raw.t_end, &fallback) {
        (Some(t), _) => t,
        (None, Some(g)) => tr.take("grid.t_end", None, g.t_end()),
        (None, None) => return Err(need("grid.t_end")),
    };
    let n_points = match (raw.n_points, &fallback) {
        (Some(n), _) => n,
        (None, Some(g)) => tr.take("grid.n_points", None, g.n_points()),
        (None, None) => tr.take("grid.n_points", None, crate::grid::DEFAULT_POINTS),
    };
    TimeGrid::new(t_start, t_end, n_points).map_err(|e| Error::validation("grid", e.to_string()))?;
    Ok(GridSection {
        t_start,
        t_end,
        n_points,
    })
}

impl ResolvedConfig {
    pub fn schedule(&self) -> Result<CouplingSchedule> {
        let s = &self.schedule;
        let base = match s.kind {
            ScheduleKind::Vitanov => CouplingSchedule::vitanov(s.g0.unwrap_or(DEFAULT_G0), s.nu.unwrap_or(DEFAULT_NU))?,
            ScheduleKind::TqdSynthesized => {
                synthesize_tqd_pulses(s.nu.unwrap_or(DEFAULT_NU), self.system.delta1, SynthesisMode::EqualCouplings)?.0
            }
            ScheduleKind::Constant => CouplingSchedule::constant(s.g1.unwrap_or(0.0), s.g2.unwrap_or(0.0))?,
            ScheduleKind::Tabulated => CouplingSchedule::tabulated(
                s.samples
                    .iter()
                    .flatten()
                    .map(|r| (r[0], r[1], r[2]))
                    .collect(),
            )
            .map_err(|e| Error::validation("schedule.samples", e.to_string()))?,
        };
        base.with_delays(PulseDelays {
            first: s.delay1,
            second: s.delay2,
        })
    }

    pub fn system_config(&self) -> Result<SystemConfig> {
        let [a, b, c] = self.system.fock_dims;
        let cfg = SystemConfig {
            schedule: self.schedule()?,
            detunings: [self.system.delta1, self.system.delta2],
            dissipation: self.dissipation,
            fock_dims: FockDims::new(a, b, c)
                .map_err(|e| Error::validation("system.fock_dims", e.to_string()))?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.grid.t_start, self.grid.t_end, self.grid.n_points)
    }

    pub fn scan_spec(&self) -> Result<ScanSpec> {
        let scan = self
            .scan
            .as_ref()
            .ok_or_else(|| Error::validation("scan", "section required"))?;
        Ok(ScanSpec {
            parameter: scan.parameter,
            values: scan.values.clone(),
            metric: scan.metric,
            base: self.system_config()?,
            tolerances: self.solver,
            half_width: scan.half_width,
            n_points: scan.n_points,
            truncation_check: scan.truncation_check,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::validation("config", e.to_string()))
    }
}

/// Reads, defaults and validates the file at `path`.
pub fn parse_config(path: &Path, defaults: &Defaults) -> Result<Resolved> {
    resolve(&RawConfig::load(path)?, defaults)
}

/// Provenance written as `manifest.toml` in each output directory. The
/// file also carries the resolved configuration, so it can be fed back as
/// a config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_path: Option<PathBuf>,
    pub tool_version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub defaulted: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<String>,
    /// SHA-256 of the scan specification.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    /// Output file name to number of data rows.
    pub outputs: BTreeMap<String, usize>,
    pub metrics: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config_path: Option<&Path>, defaulted: Vec<String>) -> Self {
        Self {
            command: command.into(),
            config_path: config_path.map(Path::to_path_buf),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            defaulted,
            engine: None,
            config_hash: None,
            outputs: BTreeMap::new(),
            metrics: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn to_toml(&self, config: &ResolvedConfig) -> Result<String> {
        #[derive(Serialize)]
        struct File<'a> {
            manifest: &'a RunManifest,
            #[serde(flatten)]
            config: &'a ResolvedConfig,
        }
        toml::to_string(&File {
            manifest: self,
            config,
        })
        .map_err(|e| Error::validation("manifest", e.to_string()))
    }

    pub fn write(&self, dir: &Path, config: &ResolvedConfig) -> Result<PathBuf> {
        let path = dir.join("manifest.toml");
        fs::write(&path, self.to_toml(config)?)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Resolved> {
        resolve(&RawConfig::from_toml(text, Path::new("test.toml"))?, &Defaults::default())
    }

    #[test]
    fn range_snaps_zero_and_counts_rows() {
        let v = parse_range("-0.6:0.6:0.05").unwrap();
        assert_eq!(v.len(), 25);
        assert_eq!(v[12], 0.0);
        assert_eq!(v[0], -0.6);
        assert!((v[24] - 0.6).abs() < 1e-15);
        assert_eq!(parse_range("1:1:0.5").unwrap(), vec![1.0]);
        assert!(parse_range("1:0:0.5").is_err());
        assert!(parse_range("0:1").is_err());
    }

    #[test]
    fn minimal_config_records_defaults() {
        let r = parse("[schedule]\nnu = 2.0\n[system]\ndelta = 40.0\n").unwrap();
        assert_eq!(r.config.schedule.kind, ScheduleKind::TqdSynthesized);
        assert!(r.defaulted.contains(&"schedule.kind".to_string()));
        assert!(r.defaulted.contains(&"dissipation.kappa1".to_string()));
        assert!(r.defaulted.contains(&"grid.n_points".to_string()));
        assert!(r.defaulted.contains(&"solver.rtol".to_string()));
        assert!(!r.defaulted.iter().any(|f| f == "schedule.nu" || f.starts_with("system.delta")));
    }

    #[test]
    fn negative_kappa_names_field() {
        match parse("[dissipation]\nkappa1 = -0.1\n") {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "dissipation.kappa1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_parse_errors() {
        match parse("[schedule]\nnuu = 2.0\n") {
            Err(Error::Parse { message, .. }) => assert!(message.contains("nuu"), "{message}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let r = parse("[schedule]\nnu = 1.5\ndelay1 = 0.1\n[system]\ndelta = 80.0\n[scan]\nparameter = \"delay-dt1\"\nrange = \"-0.2:0.2:0.1\"\nmetric = \"final-p2\"\nhalf_width = 20.0\n").unwrap();
        let text = r.config.to_toml().unwrap();
        let again = parse(&text).unwrap();
        assert_eq!(again.config, r.config);
        assert!(again.defaulted.is_empty(), "{:?}", again.defaulted);
    }

    #[test]
    fn manifest_reparses_to_same_config() {
        let r = parse("[schedule]\nkind = \"vitanov\"\nnu = 0.5\n").unwrap();
        let mut m = RunManifest::new("transfer", None, r.defaulted.clone());
        m.outputs.insert("trajectory.csv".into(), 10);
        m.metrics.insert("final_p2".into(), 0.5);
        let text = m.to_toml(&r.config).unwrap();
        assert_eq!(parse(&text).unwrap().config, r.config);
    }
}
