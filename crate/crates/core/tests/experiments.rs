use approx::assert_abs_diff_eq;
use tqd_core::dynamics::Tolerances;
use tqd_core::experiments::*;
use tqd_core::schedule::{CouplingSchedule, Pulse, PulseDelays};
use tqd_core::sta::{synthesize_tqd_pulses, SynthesisMode};
use tqd_core::system::FockDims;
use tqd_core::Error;

#[test]
fn output_points_resolve_the_fast_scale() {
    assert_eq!(output_points(1.0, 1.0), 2001);
    let n = output_points(20.0, 40.0);
    assert!(n > 2001);
    assert!((n - 1) as f64 >= 20.0 * 40.0 / std::f64::consts::TAU * 16.0);
}

#[test]
fn scans_are_deterministic() {
    let a = run_detuning_scan(&[20.0, 40.0], 2.0).unwrap();
    let b = run_detuning_scan(&[20.0, 40.0], 2.0).unwrap();
    assert_eq!(a.rows.len(), 2);
    for (r, s) in a.rows.iter().zip(&b.rows) {
        assert_eq!(r.metric.to_bits(), s.metric.to_bits());
    }
    assert_eq!(a.provenance.config_hash, b.provenance.config_hash);
    let mut x = Vec::new();
    let mut y = Vec::new();
    a.write_csv(&mut x).unwrap();
    b.write_csv(&mut y).unwrap();
    assert_eq!(x, y);
}

#[test]
fn scan_row_matches_standalone_transfer() {
    let scan = run_detuning_scan(&[40.0], 2.0).unwrap();
    assert!(scan.fit.is_none());
    let run = run_fig4_transfer(40.0, 2.0, Tolerances::SCHRODINGER).unwrap();
    let row = scan.row_at(40.0).unwrap();
    assert_eq!(scan.metric, Metric::MaxPhonon);
    assert_abs_diff_eq!(row.metric, run.max_phonon, epsilon = 1e-12);
    assert!(row.detuning_ratio.unwrap() >= 5.0);
    assert_eq!(scan.provenance.engine, "schrodinger");
}

#[test]
fn zero_delay_row_is_the_baseline() {
    let scan = run_delay_scan(&[-0.1, 0.0, 0.1], Pulse::G1, 40.0, 2.0).unwrap();
    assert_eq!(scan.rows.len(), 3);
    let baseline = run_fig4_transfer(40.0, 2.0, Tolerances::SCHRODINGER).unwrap();
    let spec = delay_scan_spec(&[-0.1, 0.0, 0.1], Pulse::G1, 40.0, 2.0).unwrap();
    let grid = spec.point_grid(&spec.point_config(0.0).unwrap()).unwrap();
    let widened = run_transfer(&spec.base.schedule, 40.0, &grid, FockDims::CLOSED, Tolerances::SCHRODINGER).unwrap();
    assert_abs_diff_eq!(scan.row_at(0.0).unwrap().metric, widened.final_p2, epsilon = 0.0);
    assert_abs_diff_eq!(widened.final_p2, baseline.final_p2, epsilon = 1e-8);
}

#[test]
fn shifting_both_pulses_is_a_time_translation() {
    let (s, _) = synthesize_tqd_pulses(2.0, 40.0, SynthesisMode::EqualCouplings).unwrap();
    let spec = delay_scan_spec(&[0.3], Pulse::G1, 40.0, 2.0).unwrap();
    let grid = spec.point_grid(&spec.point_config(0.3).unwrap()).unwrap();
    let base = run_transfer(&s, 40.0, &grid, FockDims::CLOSED, Tolerances::SCHRODINGER).unwrap();
    let moved = s.with_delays(PulseDelays::shifted(Pulse::Both, 0.3)).unwrap();
    let shifted = run_transfer(&moved, 40.0, &grid, FockDims::CLOSED, Tolerances::SCHRODINGER).unwrap();
    assert_abs_diff_eq!(base.final_p2, shifted.final_p2, epsilon = 1e-8);
}

#[test]
fn delay_scan_rejects_large_or_joint_shifts() {
    assert!(run_delay_scan(&[3.0], Pulse::G1, 40.0, 2.0).is_err());
    assert!(matches!(
        delay_scan_spec(&[0.1], Pulse::Both, 40.0, 2.0),
        Err(Error::InvalidParameter { .. })
    ));
}

#[test]
fn decay_spec_uses_master_equation() {
    let spec = decay_scan_spec(&DEFAULT_KAPPAS, Protocol::Tqd, 2.0).unwrap();
    assert_eq!(spec.engine(), Engine::Lindblad);
    assert_eq!(spec.values.len(), 6);
    let cfg = spec.point_config(0.02).unwrap();
    assert_eq!(cfg.dissipation.kappa1, 0.02);
    assert_eq!(cfg.dissipation.kappa2, 0.02);
    assert_eq!(cfg.dissipation.n_th, THERMAL_N_TH);
    let closed = detuning_scan_spec(&[40.0], 2.0).unwrap();
    assert_eq!(closed.engine(), Engine::Schrodinger);
}

#[test]
fn decay_point_reports_diagnostics() {
    let spec = decay_scan_spec(&[0.01], Protocol::Tqd, 2.0).unwrap();
    let traj = run_scan_point(&spec, 0.01).unwrap();
    let d = &traj.diagnostics;
    assert!(d.trace_drift.unwrap() < 1e-6);
    assert!(d.min_eigenvalue.unwrap() > -1e-7);
    let f = traj.final_fidelity().unwrap();
    assert!(f > 0.9 && f < 1.0);
}

#[test]
fn fig2_tqd_arm_never_populates_middle_mode() {
    let pts = run_fig2_suite(&[1.0], Tolerances::UNITARY).unwrap();
    let p = &pts[0];
    assert_eq!(p.tqd.max_population(1), 0.0);
    assert!(p.tqd.final_populations()[2] >= 0.99);
    assert!(p.tqd_completion_time.is_some());
    assert_eq!(p.couplings.len(), p.grid.n_points());
}

#[test]
fn power_law_fit_recovers_exponent() {
    let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0].iter().map(|&d| (d, 3.0 / (d * d))).collect();
    let fit = fit_power_law(&pts).unwrap();
    assert_abs_diff_eq!(fit.slope, -2.0, epsilon = 1e-12);
    assert_abs_diff_eq!(fit.intercept, 3f64.ln(), epsilon = 1e-12);
    assert!(fit_power_law(&pts[..1]).is_none());
}

#[test]
fn zero_coupling_transfers_nothing() {
    let s = CouplingSchedule::constant(0.0, 0.0).unwrap();
    let grid = tqd_core::grid::TimeGrid::new(0.0, 1.0, 3).unwrap();
    let run = run_transfer(&s, 1.0, &grid, FockDims::CLOSED, Tolerances::SCHRODINGER).unwrap();
    assert_eq!(run.final_p2, 0.0);
    assert_eq!(run.fidelity, 0.0);
}
