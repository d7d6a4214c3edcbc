//! Shortcut-to-adiabaticity state transfer in a three-mode bosonic chain:
//! coupling schedules, counter-diabatic synthesis, and closed and open
//! system propagation.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod config;
pub mod grid;
pub mod io;
pub mod schedule;
pub mod sta;
pub mod system;
pub mod units;

pub use error::{Error, Result};
