//! Adaptive Dormand–Prince 5(4) integrator for complex state vectors.
//!
//! The integrator steps exactly onto every requested output time, so no
//! interpolation is involved in reported samples.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Tolerances {
    /// Three-mode amplitude runs.
    pub const UNITARY: Tolerances = Tolerances {
        rtol: 1e-9,
        atol: 1e-12,
    };
    /// Fock-space Schrödinger runs. The far-detuned outer modes rotate at
    /// δ for the whole window, and at 1e-9 the norm drifts by ~3e-7.
    pub const SCHRODINGER: Tolerances = Tolerances {
        rtol: 1e-12,
        atol: 1e-15,
    };
    /// Master-equation runs.
    pub const LINDBLAD: Tolerances = Tolerances {
        rtol: 1e-7,
        atol: 1e-10,
    };

    pub fn halved(self) -> Self {
        Self {
            rtol: 0.5 * self.rtol,
            atol: 0.5 * self.atol,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::invalid("tolerances", "rtol and atol must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub tol: Tolerances,
    pub max_steps: usize,
}

impl Dopri5 {
    pub fn new(tol: Tolerances) -> Self {
        Self {
            tol,
            max_steps: 50_000_000,
        }
    }

    fn error_norm(&self, y: &[C64], y_new: &[C64], err: &[C64]) -> f64 {
        let mut acc = 0.0;
        for ((a, b), e) in y.iter().zip(y_new).zip(err) {
            let sc = self.tol.atol + self.tol.rtol * a.norm().max(b.norm());
            acc += (e.norm() / sc).powi(2);
        }
        (acc / y.len().max(1) as f64).sqrt()
    }

    fn scaled_norm(&self, y: &[C64], v: &[C64]) -> f64 {
        let mut acc = 0.0;
        for (a, x) in y.iter().zip(v) {
            let sc = self.tol.atol + self.tol.rtol * a.norm();
            acc += (x.norm() / sc).powi(2);
        }
        (acc / y.len().max(1) as f64).sqrt()
    }

    /// Integrates y′ = f(t, y) from `times[0]`, calling `observe(k, t_k, y)`
    /// at every output time including the first.
    pub fn integrate<F, O>(
        &self,
        mut rhs: F,
        times: &[f64],
        y0: &[C64],
        mut observe: O,
    ) -> Result<SolverStats>
    where
        F: FnMut(f64, &[C64], &mut [C64]) -> Result<()>,
        O: FnMut(usize, f64, &[C64]) -> Result<()>,
    {
        self.tol.validate()?;
        if times.is_empty() {
            return Ok(SolverStats::default());
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("times", "output times must be strictly increasing"));
        }
        let n = y0.len();
        let mut stats = SolverStats::default();
        let mut t = times[0];
        let mut y = y0.to_vec();
        observe(0, t, &y)?;
        if times.len() == 1 {
            return Ok(stats);
        }

        let zero = C64::new(0.0, 0.0);
        let mut k1 = vec![zero; n];
        let mut k2 = vec![zero; n];
        let mut k3 = vec![zero; n];
        let mut k4 = vec![zero; n];
        let mut k5 = vec![zero; n];
        let mut k6 = vec![zero; n];
        let mut k7 = vec![zero; n];
        let mut stage = vec![zero; n];
        let mut y_new = vec![zero; n];
        let mut err = vec![zero; n];

        rhs(t, &y, &mut k1)?;
        stats.rhs_evals += 1;

        let span = times[times.len() - 1] - t;
        let mut h = self.initial_step(&mut rhs, t, &y, &k1, span, &mut stats)?;
        let mut last_rejected = false;
        let mut steps = 0usize;

        for (k, &target) in times.iter().enumerate().skip(1) {
            while t < target {
                steps += 1;
                if steps > self.max_steps {
                    return Err(Error::Solver {
                        t,
                        step: h,
                        reason: format!("exceeded {} steps", self.max_steps),
                    });
                }
                let remaining = target - t;
                let (h_try, lands) = if h * 1.01 >= remaining {
                    (remaining, true)
                } else {
                    (h, false)
                };
                if h_try <= 1e-14 * t.abs().max(1.0) && !lands {
                    return Err(Error::Solver {
                        t,
                        step: h_try,
                        reason: "step size underflow".into(),
                    });
                }

                let combine = |out: &mut [C64], parts: &[(f64, &[C64])]| {
                    for i in 0..n {
                        let mut acc = y[i];
                        for (c, kv) in parts {
                            acc += kv[i] * (c * h_try);
                        }
                        out[i] = acc;
                    }
                };
                combine(&mut stage, &[(A21, &k1)]);
                rhs(t + C2 * h_try, &stage, &mut k2)?;
                combine(&mut stage, &[(A31, &k1), (A32, &k2)]);
                rhs(t + C3 * h_try, &stage, &mut k3)?;
                combine(&mut stage, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
                rhs(t + C4 * h_try, &stage, &mut k4)?;
                combine(&mut stage, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
                rhs(t + C5 * h_try, &stage, &mut k5)?;
                combine(
                    &mut stage,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                );
                rhs(t + h_try, &stage, &mut k6)?;
                combine(
                    &mut y_new,
                    &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
                );
                let t_new = if lands { target } else { t + h_try };
                rhs(t_new, &y_new, &mut k7)?;
                stats.rhs_evals += 6;

                for i in 0..n {
                    err[i] = (k1[i] * E1
                        + k3[i] * E3
                        + k4[i] * E4
                        + k5[i] * E5
                        + k6[i] * E6
                        + k7[i] * E7)
                        * h_try;
                }
                let e = self.error_norm(&y, &y_new, &err);
                if !e.is_finite() {
                    return Err(Error::Solver {
                        t,
                        step: h_try,
                        reason: "non-finite error estimate".into(),
                    });
                }
                let mut fac = if e == 0.0 {
                    FAC_MAX
                } else {
                    (SAFETY * e.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
                };
                if e <= 1.0 {
                    stats.accepted += 1;
                    t = t_new;
                    std::mem::swap(&mut y, &mut y_new);
                    std::mem::swap(&mut k1, &mut k7);
                    if last_rejected {
                        fac = fac.min(1.0);
                    }
                    let proposal = h_try * fac;
                    h = if lands { h.max(proposal) } else { proposal };
                    last_rejected = false;
                } else {
                    stats.rejected += 1;
                    h = h_try * fac.min(1.0);
                    last_rejected = true;
                }
            }
            observe(k, t, &y)?;
        }
        Ok(stats)
    }

    fn initial_step<F>(
        &self,
        rhs: &mut F,
        t: f64,
        y: &[C64],
        f0: &[C64],
        span: f64,
        stats: &mut SolverStats,
    ) -> Result<f64>
    where
        F: FnMut(f64, &[C64], &mut [C64]) -> Result<()>,
    {
        let d0 = self.scaled_norm(y, y);
        let d1 = self.scaled_norm(y, f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6 * span
        } else {
            (0.01 * d0 / d1).min(span)
        };
        let y1: Vec<C64> = y.iter().zip(f0).map(|(a, f)| a + f * h0).collect();
        let mut f1 = vec![C64::new(0.0, 0.0); y.len()];
        rhs(t + h0, &y1, &mut f1)?;
        stats.rhs_evals += 1;
        let diff: Vec<C64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
        let d2 = self.scaled_norm(y, &diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6 * span)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        Ok((100.0 * h0).min(h1).min(span))
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    #[test]
    fn exponential_decay_and_rotation() {
        // y′ = (−0.3 + 2i) y
        let rate = C64::new(-0.3, 2.0);
        let times: Vec<f64> = (0..=50).map(|i| 0.2 * i as f64).collect();
        let mut out = Vec::new();
        let stats = Dopri5::new(Tolerances::UNITARY)
            .integrate(
                |_, y, dy| {
                    dy[0] = rate * y[0];
                    Ok(())
                },
                &times,
                &[C64::new(1.0, 0.0)],
                |_, t, y| {
                    out.push((t, y[0]));
                    Ok(())
                },
            )
            .unwrap();
        assert_eq!(out.len(), times.len());
        for (t, y) in out {
            let exact = (rate * t).exp();
            assert!((y - exact).norm() < 1e-8, "t={t}");
        }
        assert!(stats.accepted > 0);
    }

    #[test]
    fn lands_exactly_on_output_times() {
        let times = [0.0, 0.1, 0.35, 1.0];
        let mut seen = Vec::new();
        Dopri5::new(Tolerances::LINDBLAD)
            .integrate(
                |t, _, dy| {
                    dy[0] = C64::new(t.cos(), 0.0);
                    Ok(())
                },
                &times,
                &[C64::new(0.0, 0.0)],
                |_, t, y| {
                    seen.push(t);
                    assert_relative_eq!(y[0].re, t.sin(), epsilon = 1e-8);
                    Ok(())
                },
            )
            .unwrap();
        assert_eq!(seen, times);
    }

    #[test]
    fn halving_tolerance_tightens_error() {
        let f = |_: f64, y: &[C64], dy: &mut [C64]| {
            dy[0] = y[1];
            dy[1] = -y[0] * 25.0;
            Ok(())
        };
        let times = [0.0, 10.0];
        let run = |tol: Tolerances| {
            let mut last = C64::new(0.0, 0.0);
            Dopri5::new(tol)
                .integrate(f, &times, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], |_, _, y| {
                    last = y[0];
                    Ok(())
                })
                .unwrap();
            (last.re - (50.0f64).cos()).abs()
        };
        let coarse = run(Tolerances { rtol: 1e-6, atol: 1e-9 });
        let fine = run(Tolerances { rtol: 1e-10, atol: 1e-13 });
        assert!(fine < coarse);
        assert!(fine < 1e-8);
    }

    #[test]
    fn rhs_errors_propagate() {
        let r = Dopri5::new(Tolerances::UNITARY).integrate(
            |t, _, _| {
                if t > 0.5 {
                    Err(Error::invalid("t", "boom"))
                } else {
                    Ok(())
                }
            },
            &[0.0, 1.0],
            &[C64::new(1.0, 0.0)],
            |_, _, _| Ok(()),
        );
        assert!(r.is_err());
    }

    #[test]
    fn step_budget_reported_as_solver_error() {
        let mut solver = Dopri5::new(Tolerances::UNITARY);
        solver.max_steps = 3;
        let r = solver.integrate(
            |_, y, dy| {
                dy[0] = y[0] * C64::new(0.0, 100.0);
                Ok(())
            },
            &[0.0, 10.0],
            &[C64::new(1.0, 0.0)],
            |_, _, _| Ok(()),
        );
        assert!(matches!(r, Err(Error::Solver { .. })));
    }
}
