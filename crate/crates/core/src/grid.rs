use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform, strictly increasing sampling grid in µs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    n_points: usize,
}

/// Default number of samples on a grid.
pub const DEFAULT_POINTS: usize = 2001;

/// Half-width, in units of 1/ν, of the window used for propagation runs.
/// At ±10/ν from the sigmoid midpoint θ is within 7.2e-5 rad of its limits.
pub const PROTOCOL_HALF_WIDTH: f64 = 10.0;

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_points: usize) -> Result<Self> {
        if !t_start.is_finite() || !t_end.is_finite() {
            return Err(Error::invalid("grid", "bounds must be finite"));
        }
        if t_end <= t_start {
            return Err(Error::invalid(
                "grid",
                format!("t_end ({t_end}) must exceed t_start ({t_start})"),
            ));
        }
        if n_points < 2 {
            return Err(Error::invalid("grid.n_points", "need at least 2 points"));
        }
        Ok(Self {
            t_start,
            t_end,
            n_points,
        })
    }

    /// `[0, 10/ν]` with the sigmoid midpoint 5/ν at its centre.
    pub fn vitanov_default(nu: f64) -> Result<Self> {
        check_rate(nu)?;
        Self::new(0.0, 10.0 / nu, DEFAULT_POINTS)
    }

    /// Window centred on the sigmoid midpoint 5/ν with half-width
    /// `half_width / ν`.
    pub fn protocol_window(nu: f64, half_width: f64, n_points: usize) -> Result<Self> {
        check_rate(nu)?;
        if !(half_width > 0.0) {
            return Err(Error::invalid("half_width", "must be positive"));
        }
        let centre = 5.0 / nu;
        Self::new(centre - half_width / nu, centre + half_width / nu, n_points)
    }

    /// Same grid spacing, extended by `margin` µs on both sides.
    pub fn widened(&self, margin: f64) -> Result<Self> {
        if margin == 0.0 {
            return Ok(*self);
        }
        let dt = self.step();
        let extra = (margin.abs() / dt).ceil() as usize;
        Self::new(
            self.t_start - extra as f64 * dt,
            self.t_end + extra as f64 * dt,
            self.n_points + 2 * extra,
        )
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn span(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn step(&self) -> f64 {
        self.span() / (self.n_points - 1) as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.t_end
        } else {
            self.t_start + i as f64 * self.step()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.time(i)).collect()
    }
}

fn check_rate(nu: f64) -> Result<()> {
    if nu > 0.0 && nu.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("nu", format!("must be positive, got {nu}")))
    }
}
