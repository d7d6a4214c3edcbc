//! Coupling schedules g₁(t), g₂(t).
//!
//! The Vitanov family uses a logistic mixing angle
//! θ(t) = (π/2) / (1 + e^{−ν(t − 5/ν)}), with g₁ = g₀ sin θ and g₂ = g₀ cos θ.
//! Synthesized transitionless pulses use G₁ = G₂ = √(δ θ̇). Each pulse can be
//! shifted in time independently through [`PulseDelays`].

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Logistic s(x) = 1/(1+e^{−x}) and its complement 1 − s, both evaluated
/// without cancellation.
fn logistic_pair(x: f64) -> (f64, f64) {
    (1.0 / (1.0 + (-x).exp()), 1.0 / (1.0 + x.exp()))
}

fn check_nu(nu: f64) -> Result<()> {
    if nu > 0.0 && nu.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("nu", format!("must be positive, got {nu}")))
    }
}

/// Mixing angle θ(t) of the Vitanov shape, in radians.
pub fn vitanov_theta(t: f64, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    Ok(theta_unchecked(t, nu))
}

/// Time derivative θ̇(t) in rad/µs; peaks at πν/8 at t = 5/ν.
pub fn vitanov_theta_dot(t: f64, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    Ok(theta_dot_unchecked(t, nu))
}

pub(crate) fn theta_unchecked(t: f64, nu: f64) -> f64 {
    FRAC_PI_2 * logistic_pair(nu * t - 5.0).0
}

pub(crate) fn theta_dot_unchecked(t: f64, nu: f64) -> f64 {
    let (s, c) = logistic_pair(nu * t - 5.0);
    FRAC_PI_2 * nu * s * c
}

pub(crate) fn theta_ddot_unchecked(t: f64, nu: f64) -> f64 {
    let (s, c) = logistic_pair(nu * t - 5.0);
    FRAC_PI_2 * nu * nu * s * c * (c - s)
}

/// Peak of θ̇, reached at the sigmoid midpoint.
pub fn theta_dot_max(nu: f64) -> f64 {
    FRAC_PI_2 * nu / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    Vitanov,
    TqdSynthesized,
    Constant,
    Tabulated,
}

impl ScheduleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScheduleKind::Vitanov => "vitanov",
            ScheduleKind::TqdSynthesized => "tqd-synthesized",
            ScheduleKind::Constant => "constant",
            ScheduleKind::Tabulated => "tabulated",
        }
    }
}

/// Time offsets of the two pulses: pulse k is evaluated at t − Δtₖ.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PulseDelays {
    pub first: f64,
    pub second: f64,
}

/// Which pulse(s) a delay applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pulse {
    G1,
    G2,
    Both,
}

impl PulseDelays {
    pub fn shifted(pulse: Pulse, dt: f64) -> Self {
        match pulse {
            Pulse::G1 => Self { first: dt, second: 0.0 },
            Pulse::G2 => Self { first: 0.0, second: dt },
            Pulse::Both => Self { first: dt, second: dt },
        }
    }
}

/// Sampled pulse pair with linear interpolation between samples.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseTable {
    times: Vec<f64>,
    g1: Vec<f64>,
    g2: Vec<f64>,
    // node derivatives: central in the interior, one-sided second order at the ends
    dg1: Vec<f64>,
    dg2: Vec<f64>,
}

impl PulseTable {
    pub fn new(samples: Vec<(f64, f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::invalid("samples", "need at least two rows"));
        }
        if samples
            .iter()
            .any(|&(t, a, b)| !(t.is_finite() && a.is_finite() && b.is_finite()))
        {
            return Err(Error::invalid("samples", "non-finite value"));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::invalid("samples", "times must be strictly increasing"));
        }
        let times: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let g1: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let g2: Vec<f64> = samples.iter().map(|s| s.2).collect();
        let dg1 = node_derivatives(&times, &g1);
        let dg2 = node_derivatives(&times, &g2);
        Ok(Self {
            times,
            g1,
            g2,
            dg1,
            dg2,
        })
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.times
            .iter()
            .zip(&self.g1)
            .zip(&self.g2)
            .map(|((&t, &a), &b)| (t, a, b))
    }

    pub fn range(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }

    fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let (start, end) = self.range();
        if !(t >= start && t <= end) {
            return Err(Error::OutOfRange { t, start, end });
        }
        let upper = self.times.partition_point(|&x| x <= t);
        let i = upper.saturating_sub(1).min(self.times.len() - 2);
        let w = (t - self.times[i]) / (self.times[i + 1] - self.times[i]);
        Ok((i, w))
    }

    fn lerp(values: &[f64], i: usize, w: f64) -> f64 {
        values[i] + w * (values[i + 1] - values[i])
    }

    fn value(&self, which: usize, t: f64) -> Result<f64> {
        let (i, w) = self.locate(t)?;
        let v = if which == 0 { &self.g1 } else { &self.g2 };
        Ok(Self::lerp(v, i, w))
    }

    /// Derivative and whether an endpoint (one-sided) stencil contributed.
    fn rate(&self, which: usize, t: f64) -> Result<(f64, bool)> {
        let (i, w) = self.locate(t)?;
        let d = if which == 0 { &self.dg1 } else { &self.dg2 };
        let one_sided = (i == 0 && w < 1.0) || (i + 2 == self.times.len() && w > 0.0);
        Ok((Self::lerp(d, i, w), one_sided))
    }
}

fn node_derivatives(t: &[f64], f: &[f64]) -> Vec<f64> {
    let n = t.len();
    if n == 2 {
        let s = (f[1] - f[0]) / (t[1] - t[0]);
        return vec![s, s];
    }
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let h1 = t[i] - t[i - 1];
        let h2 = t[i + 1] - t[i];
        d[i] = -h2 / (h1 * (h1 + h2)) * f[i - 1]
            + (h2 - h1) / (h1 * h2) * f[i]
            + h1 / (h2 * (h1 + h2)) * f[i + 1];
    }
    let (h1, h2) = (t[1] - t[0], t[2] - t[1]);
    d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1]
        - h1 / (h2 * (h1 + h2)) * f[2];
    let (h1, h2) = (t[n - 2] - t[n - 3], t[n - 1] - t[n - 2]);
    d[n - 1] = (2.0 * h2 + h1) / (h2 * (h1 + h2)) * f[n - 1]
        - (h1 + h2) / (h1 * h2) * f[n - 2]
        + h2 / (h1 * (h1 + h2)) * f[n - 3];
    d
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Vitanov { g0: f64, nu: f64 },
    TqdSynthesized { nu: f64, delta: f64 },
    Constant { g1: f64, g2: f64 },
    Tabulated(PulseTable),
}

/// Time derivatives of the two couplings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingRates {
    pub g1_dot: f64,
    pub g2_dot: f64,
    /// A tabulated endpoint stencil was used for at least one pulse.
    pub one_sided: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSchedule {
    shape: Shape,
    delays: PulseDelays,
}

impl CouplingSchedule {
    pub fn vitanov(g0: f64, nu: f64) -> Result<Self> {
        check_nu(nu)?;
        if !(g0 > 0.0 && g0.is_finite()) {
            return Err(Error::invalid("g0", format!("must be positive, got {g0}")));
        }
        Ok(Self::from_shape(Shape::Vitanov { g0, nu }))
    }

    /// G₁ = G₂ = √(δ θ̇); use [`crate::sta::synthesize_tqd_pulses`] for the
    /// validated entry point.
    pub(crate) fn tqd(nu: f64, delta: f64) -> Self {
        Self::from_shape(Shape::TqdSynthesized { nu, delta })
    }

    pub fn constant(g1: f64, g2: f64) -> Result<Self> {
        if !(g1.is_finite() && g2.is_finite()) {
            return Err(Error::invalid("constant", "couplings must be finite"));
        }
        Ok(Self::from_shape(Shape::Constant { g1, g2 }))
    }

    pub fn tabulated(samples: Vec<(f64, f64, f64)>) -> Result<Self> {
        Ok(Self::from_shape(Shape::Tabulated(PulseTable::new(samples)?)))
    }

    fn from_shape(shape: Shape) -> Self {
        Self {
            shape,
            delays: PulseDelays::default(),
        }
    }

    pub fn with_delays(mut self, delays: PulseDelays) -> Result<Self> {
        if !(delays.first.is_finite() && delays.second.is_finite()) {
            return Err(Error::invalid("delays", "must be finite"));
        }
        self.delays = delays;
        Ok(self)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn delays(&self) -> PulseDelays {
        self.delays
    }

    pub fn kind(&self) -> ScheduleKind {
        match self.shape {
            Shape::Vitanov { .. } => ScheduleKind::Vitanov,
            Shape::TqdSynthesized { .. } => ScheduleKind::TqdSynthesized,
            Shape::Constant { .. } => ScheduleKind::Constant,
            Shape::Tabulated(_) => ScheduleKind::Tabulated,
        }
    }

    pub fn nu(&self) -> Option<f64> {
        match self.shape {
            Shape::Vitanov { nu, .. } | Shape::TqdSynthesized { nu, .. } => Some(nu),
            _ => None,
        }
    }

    pub fn delta(&self) -> Option<f64> {
        match self.shape {
            Shape::TqdSynthesized { delta, .. } => Some(delta),
            _ => None,
        }
    }

    /// (g₁(t), g₂(t)) in MHz.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        let (t1, t2) = (t - self.delays.first, t - self.delays.second);
        Ok(match &self.shape {
            Shape::Vitanov { g0, nu } => (
                g0 * theta_unchecked(t1, *nu).sin(),
                g0 * theta_unchecked(t2, *nu).cos(),
            ),
            Shape::TqdSynthesized { nu, delta } => (
                (delta * theta_dot_unchecked(t1, *nu)).sqrt(),
                (delta * theta_dot_unchecked(t2, *nu)).sqrt(),
            ),
            Shape::Constant { g1, g2 } => (*g1, *g2),
            Shape::Tabulated(table) => (table.value(0, t1)?, table.value(1, t2)?),
        })
    }

    /// (ġ₁(t), ġ₂(t)): analytic for the closed-form families, finite
    /// differences of the samples for tabulated schedules.
    pub fn eval_rates(&self, t: f64) -> Result<CouplingRates> {
        let (t1, t2) = (t - self.delays.first, t - self.delays.second);
        Ok(match &self.shape {
            Shape::Vitanov { g0, nu } => CouplingRates {
                g1_dot: g0 * theta_unchecked(t1, *nu).cos() * theta_dot_unchecked(t1, *nu),
                g2_dot: -g0 * theta_unchecked(t2, *nu).sin() * theta_dot_unchecked(t2, *nu),
                one_sided: false,
            },
            Shape::TqdSynthesized { nu, delta } => {
                let rate = |tk: f64| {
                    let w = theta_dot_unchecked(tk, *nu);
                    if w > 0.0 {
                        0.5 * (delta / w).sqrt() * theta_ddot_unchecked(tk, *nu)
                    } else {
                        0.0
                    }
                };
                CouplingRates {
                    g1_dot: rate(t1),
                    g2_dot: rate(t2),
                    one_sided: false,
                }
            }
            Shape::Constant { .. } => CouplingRates {
                g1_dot: 0.0,
                g2_dot: 0.0,
                one_sided: false,
            },
            Shape::Tabulated(table) => {
                let (g1_dot, a) = table.rate(0, t1)?;
                let (g2_dot, b) = table.rate(1, t2)?;
                CouplingRates {
                    g1_dot,
                    g2_dot,
                    one_sided: a || b,
                }
            }
        })
    }
}
