//! Unit conventions.
//!
//! Every frequency-like quantity (couplings, detunings, decay rates, the
//! shape rate ν) is stored in MHz and read as an angular rate, so a coupling
//! of 1 MHz accumulates one radian of phase per microsecond. Times are in µs.
//! No factors of 2π are inserted anywhere.

/// Label of the frequency unit used throughout.
pub const FREQUENCY_UNIT: &str = "MHz";
/// Label of the time unit used throughout.
pub const TIME_UNIT: &str = "us";

/// Converts a rate quoted in Hz to the internal MHz unit.
pub fn from_hz(value: f64) -> f64 {
    value * 1e-6
}

/// Converts an internal MHz rate back to Hz.
pub fn to_hz(value: f64) -> f64 {
    value * 1e6
}
