use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::CouplingSchedule;

/// Mode order used by every vector and Fock index: outer mode 1, the
/// intermediate (mechanical) mode, outer mode 2.
pub const MODE_LABELS: [&str; 3] = ["a1", "b_m", "a2"];

/// Cavity decay and thermal mechanical damping, all rates in MHz.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Dissipation {
    pub kappa1: f64,
    pub kappa2: f64,
    pub gamma_m: f64,
    pub n_th: f64,
}

impl Dissipation {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("dissipation.kappa1", self.kappa1),
            ("dissipation.kappa2", self.kappa2),
            ("dissipation.gamma_m", self.gamma_m),
            ("dissipation.n_th", self.n_th),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::validation(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn is_closed(&self) -> bool {
        self.kappa1 == 0.0 && self.kappa2 == 0.0 && self.gamma_m == 0.0
    }
}

/// Per-mode Fock truncation (number of levels kept, so the largest
/// occupation represented is `d - 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockDims {
    pub optical1: usize,
    pub mechanical: usize,
    pub optical2: usize,
}

impl FockDims {
    /// Two levels everywhere: enough for closed single-excitation runs.
    pub const CLOSED: FockDims = FockDims {
        optical1: 2,
        mechanical: 2,
        optical2: 2,
    };

    /// Default for thermal runs: the mechanical mode keeps six levels.
    pub const THERMAL: FockDims = FockDims {
        optical1: 2,
        mechanical: 6,
        optical2: 2,
    };

    pub fn new(optical1: usize, mechanical: usize, optical2: usize) -> Result<Self> {
        let dims = Self {
            optical1,
            mechanical,
            optical2,
        };
        dims.validate()?;
        Ok(dims)
    }

    pub fn validate(&self) -> Result<()> {
        if self.as_array().iter().any(|&d| d < 2) {
            return Err(Error::InvalidDims(format!(
                "every mode needs at least 2 levels, got {:?}",
                self.as_array()
            )));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.optical1, self.mechanical, self.optical2]
    }

    pub fn with_mechanical(&self, mechanical: usize) -> Self {
        Self {
            mechanical,
            ..*self
        }
    }
}

/// Physical description of one run: couplings, detunings of the outer
/// modes, dissipation and truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub schedule: CouplingSchedule,
    /// δ₁, δ₂ of the outer modes relative to the intermediate one.
    pub detunings: [f64; 2],
    pub dissipation: Dissipation,
    pub fock_dims: FockDims,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        self.dissipation.validate()?;
        self.fock_dims.validate()?;
        for (i, d) in self.detunings.iter().enumerate() {
            if !d.is_finite() {
                return Err(Error::validation(format!("system.delta{}", i + 1), "must be finite"));
            }
        }
        Ok(())
    }
}
