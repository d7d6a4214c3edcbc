//! Scenario runners and parameter scans.

mod fig2;
mod scan;
mod transfer;

pub use fig2::{run_fig2_suite, Fig2Point, FIG2_NUS};
pub use scan::{
    decay_scan_spec, delay_scan_spec, detuning_scan_spec, fit_power_law, run_decay_scan, run_delay_scan, run_detuning_scan, run_scan, run_scan_point, Metric,
    PowerLawFit, Protocol, Provenance, ScanParameter, ScanResult, ScanRow, ScanSpec,
    DEFAULT_KAPPAS, THERMAL_GAMMA_M, THERMAL_N_TH,
};
pub use transfer::{
    output_points, run_fig4_transfer, run_transfer, simulate, transfer_grid, Engine, Simulation,
    TransferRun,
    TRANSFER_HALF_WIDTH,
};
