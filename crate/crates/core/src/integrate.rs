//! Adaptive Dormand–Prince 5(4) integration of Hamiltonian flows.
//!
//! [`Stepper`] exposes single accepted steps with the continuous extension of
//! the last step, which is what event detection needs. [`integrate`] drives a
//! stepper over an interval and records a [`Trajectory`].
//!
//! Error control is mixed: `atol = rtol = tol`. Periodic chart coordinates
//! are reduced mod 1 after every accepted step; the dense interpolant of a
//! step is built from unreduced values so it never sees the wrap.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::phase::{sgrad_from_gradient, Hamiltonian, PhaseError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrateError {
    #[error("trajectory escaped the bound {bound} at t = {t}")]
    Escape { t: f64, bound: f64, state: Vec<f64> },
    #[error("step size underflow at t = {t} (h = {h:e}); system too stiff for the tolerance")]
    Stiffness { t: f64, h: f64 },
    #[error("invalid interval [{t0}, {t1}]")]
    Interval { t0: f64, t1: f64 },
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub tol: f64,
    /// Euclidean norm of the state above which integration stops.
    pub escape_bound: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            escape_bound: 1e6,
            max_steps: 1_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    /// Default escape bound for a tetragon with ceiling level `r1`.
    pub fn escape_for(r1: f64) -> f64 {
        10.0 * (r1.sqrt() + 1.0)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// Largest normalized error estimate among accepted steps (≤ 1).
    pub max_error_estimate: f64,
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
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

struct RkStep {
    y: Vec<f64>,
    err: Vec<f64>,
    k: [Vec<f64>; 7],
}

/// One-step state machine for the flow of `sgrad H`.
pub struct Stepper<'a> {
    ham: &'a dyn Hamiltonian,
    cfg: IntegratorConfig,
    t: f64,
    y: Vec<f64>,
    f: Vec<f64>,
    h: f64,
    prev_t: f64,
    prev_y: Vec<f64>,
    /// Continuous extension coefficients of the last accepted step.
    rcont: [Vec<f64>; 5],
    grad: Vec<f64>,
    stats: IntegratorStats,
}

impl<'a> Stepper<'a> {
    pub fn new(ham: &'a dyn Hamiltonian, y0: &[f64], t0: f64, cfg: IntegratorConfig) -> Result<Self, IntegrateError> {
        let dim = ham.chart().dim();
        if y0.len() != dim {
            return Err(PhaseError::DimensionMismatch {
                expected: dim,
                got: y0.len(),
            }
            .into());
        }
        let mut y = y0.to_vec();
        ham.chart().reduce(&mut y);
        let mut s = Self {
            ham,
            cfg,
            t: t0,
            y: y.clone(),
            f: vec![0.0; dim],
            h: 0.0,
            prev_t: t0,
            prev_y: y.clone(),
            rcont: std::array::from_fn(|_| vec![0.0; dim]),
            grad: vec![0.0; dim],
            stats: IntegratorStats::default(),
        };
        s.f = s.field(t0, &y)?;
        s.rcont[0] = y;
        s.h = s.initial_step();
        Ok(s)
    }

    fn field(&mut self, t: f64, y: &[f64]) -> Result<Vec<f64>, IntegrateError> {
        self.stats.evaluations += 1;
        self.ham.gradient(y, t, &mut self.grad);
        if !self.grad.iter().all(|g| g.is_finite()) {
            return Err(PhaseError::NonFinite {
                point: y.to_vec(),
                time: t,
            }
            .into());
        }
        let mut v = vec![0.0; y.len()];
        sgrad_from_gradient(&self.grad, &mut v);
        Ok(v)
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.cfg.tol + self.cfg.tol * a.abs().max(b.abs())
    }

    fn initial_step(&mut self) -> f64 {
        let n = self.y.len() as f64;
        let (mut d0, mut d1) = (0.0, 0.0);
        for (y, f) in self.y.iter().zip(&self.f) {
            let sc = self.scale(*y, 0.0);
            d0 += (y / sc).powi(2);
            d1 += (f / sc).powi(2);
        }
        let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let y1: Vec<f64> = self.y.iter().zip(&self.f).map(|(y, f)| y + h0 * f).collect();
        let (t, f0) = (self.t, self.f.clone());
        let Ok(f1) = self.field(t + h0, &y1) else {
            return h0;
        };
        let mut d2 = 0.0;
        for i in 0..self.y.len() {
            d2 += ((f1[i] - f0[i]) / self.scale(self.y[i], 0.0)).powi(2);
        }
        let d2 = (d2 / n).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1)
    }

    fn rk_step(&mut self, t: f64, y: &[f64], f: &[f64], h: f64) -> Result<RkStep, IntegrateError> {
        let n = y.len();
        let comb = |terms: &[(f64, &Vec<f64>)]| -> Vec<f64> {
            (0..n)
                .map(|i| y[i] + h * terms.iter().map(|(a, k)| a * k[i]).sum::<f64>())
                .collect()
        };
        let k1 = f.to_vec();
        let k2 = self.field(t + C2 * h, &comb(&[(A21, &k1)]))?;
        let k3 = self.field(t + C3 * h, &comb(&[(A31, &k1), (A32, &k2)]))?;
        let k4 = self.field(t + C4 * h, &comb(&[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = self.field(t + C5 * h, &comb(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
        let k6 = self.field(
            t + h,
            &comb(&[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        )?;
        let y_new = comb(&[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = self.field(t + h, &y_new)?;
        let err = (0..n)
            .map(|i| {
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
            })
            .collect();
        Ok(RkStep {
            y: y_new,
            err,
            k: [k1, k2, k3, k4, k5, k6, k7],
        })
    }

    /// Performs one accepted step, never stepping past `t_limit`.
    pub fn step(&mut self, t_limit: f64) -> Result<(), IntegrateError> {
        let n = self.y.len();
        loop {
            if self.stats.accepted + self.stats.rejected >= self.cfg.max_steps {
                return Err(IntegrateError::Stiffness { t: self.t, h: self.h });
            }
            let last = self.t + self.h >= t_limit;
            let h = if last { t_limit - self.t } else { self.h };
            if h <= 1e-14 * self.t.abs().max(1.0) && !last {
                return Err(IntegrateError::Stiffness { t: self.t, h });
            }
            let (t, y, f) = (self.t, self.y.clone(), self.f.clone());
            let st = self.rk_step(t, &y, &f, h)?;
            let mut e2 = 0.0;
            for i in 0..n {
                e2 += (st.err[i] / self.scale(y[i], st.y[i])).powi(2);
            }
            let err = (e2 / n as f64).sqrt();
            let fac = if err == 0.0 { 10.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 10.0) };
            if err <= 1.0 {
                let k = &st.k;
                let mut r = std::array::from_fn(|_| vec![0.0; n]);
                for i in 0..n {
                    let dy = st.y[i] - y[i];
                    let bspl = h * k[0][i] - dy;
                    r[0][i] = y[i];
                    r[1][i] = dy;
                    r[2][i] = bspl;
                    r[3][i] = dy - h * k[6][i] - bspl;
                    r[4][i] = h
                        * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i]
                            + D7 * k[6][i]);
                }
                self.rcont = r;
                self.prev_t = t;
                self.prev_y = y;
                self.t = if last { t_limit } else { t + h };
                self.y = st.y;
                self.ham.chart().reduce(&mut self.y);
                self.f = st.k[6].clone();
                self.stats.accepted += 1;
                self.stats.max_error_estimate = self.stats.max_error_estimate.max(err);
                if !last || fac < 1.0 {
                    self.h = h * fac;
                }
                let norm = self.y.iter().map(|v| v * v).sum::<f64>().sqrt();
                if !(norm <= self.cfg.escape_bound) {
                    return Err(IntegrateError::Escape {
                        t: self.t,
                        bound: self.cfg.escape_bound,
                        state: self.prev_y.clone(),
                    });
                }
                return Ok(());
            }
            self.stats.rejected += 1;
            self.h = h * fac.min(1.0);
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn prev_t(&self) -> f64 {
        self.prev_t
    }

    pub fn prev_y(&self) -> &[f64] {
        &self.prev_y
    }

    pub fn stats(&self) -> IntegratorStats {
        self.stats
    }

    /// Continuous extension of the last step at `θ ∈ [0, 1]`, reduced.
    pub fn dense(&self, theta: f64) -> Vec<f64> {
        let r = &self.rcont;
        let th1 = 1.0 - theta;
        let mut y: Vec<f64> = (0..r[0].len())
            .map(|i| r[0][i] + theta * (r[1][i] + th1 * (r[2][i] + theta * (r[3][i] + th1 * r[4][i]))))
            .collect();
        self.ham.chart().reduce(&mut y);
        y
    }

    /// State at `prev_t + dt` from one fresh RK step out of the last step's start.
    pub fn resample(&mut self, dt: f64) -> Result<Vec<f64>, IntegrateError> {
        if dt == 0.0 {
            return Ok(self.prev_y.clone());
        }
        let (t, y) = (self.prev_t, self.prev_y.clone());
        let f = self.field(t, &y)?;
        let mut out = self.rk_step(t, &y, &f, dt)?.y;
        self.ham.chart().reduce(&mut out);
        Ok(out)
    }

    /// First sign change of `level` inside the last step, located by bisection
    /// to `time_tol` with fresh RK steps. Sign changes are looked for at the
    /// step ends and at interior points of the dense output.
    pub fn locate_crossing(
        &mut self,
        level: &dyn Fn(&[f64]) -> f64,
        time_tol: f64,
    ) -> Result<Option<(f64, Vec<f64>)>, IntegrateError> {
        const PROBES: usize = 4;
        let h = self.t - self.prev_t;
        let mut prev_theta = 0.0;
        let mut prev_val = level(&self.prev_y);
        for j in 1..=PROBES {
            let theta = j as f64 / PROBES as f64;
            let val = if j == PROBES { level(&self.y) } else { level(&self.dense(theta)) };
            if prev_val < 0.0 && val >= 0.0 || prev_val > 0.0 && val <= 0.0 {
                let (mut lo, mut hi) = (prev_theta * h, theta * h);
                let neg_at_lo = prev_val < 0.0;
                while hi - lo > time_tol {
                    let mid = 0.5 * (lo + hi);
                    let v = level(&self.resample(mid)?);
                    if (v < 0.0) == neg_at_lo {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let y = self.resample(hi)?;
                return Ok(Some((self.prev_t + hi, y)));
            }
            prev_theta = theta;
            prev_val = val;
        }
        Ok(None)
    }
}

/// Sampled integral curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub stats: IntegratorStats,
}

impl Trajectory {
    pub fn last(&self) -> (f64, &[f64]) {
        (*self.times.last().unwrap(), self.states.last().unwrap())
    }

    /// `t` plus one column per coordinate, header row first.
    pub fn to_csv(&self, labels: &[String]) -> String {
        let mut out = String::from("t");
        for l in labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (t, x) in self.times.iter().zip(&self.states) {
            out.push_str(&format!("{t}"));
            for v in x {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }

    /// Max over consecutive samples of `|Δx/Δt − sgrad H(x_mid)|`, with the
    /// midpoint taken as the average of the endpoints.
    pub fn ode_residual(&self, ham: &dyn Hamiltonian) -> f64 {
        let chart = ham.chart();
        let mut worst: f64 = 0.0;
        let mut g = vec![0.0; chart.dim()];
        let mut v = vec![0.0; chart.dim()];
        for i in 1..self.times.len() {
            let dt = self.times[i] - self.times[i - 1];
            let d = chart.displacement(&self.states[i - 1], &self.states[i]);
            let mid: Vec<f64> = self.states[i - 1].iter().zip(&d).map(|(a, b)| a + 0.5 * b).collect();
            ham.gradient(&mid, self.times[i - 1] + 0.5 * dt, &mut g);
            sgrad_from_gradient(&g, &mut v);
            let r = d.iter().zip(&v).map(|(a, b)| (a / dt - b).powi(2)).sum::<f64>().sqrt();
            worst = worst.max(r);
        }
        worst
    }
}

/// Integrates `sgrad H` from `(x0, t0)` to `t1`, recording every accepted
/// step. With `samples_per_step > 1` dense-output points are inserted.
pub fn integrate_dense(
    ham: &dyn Hamiltonian,
    x0: &[f64],
    t0: f64,
    t1: f64,
    cfg: IntegratorConfig,
    samples_per_step: usize,
) -> Result<Trajectory, IntegrateError> {
    if !(t1 > t0) {
        return Err(IntegrateError::Interval { t0, t1 });
    }
    let mut st = Stepper::new(ham, x0, t0, cfg)?;
    let mut times = vec![t0];
    let mut states = vec![st.y().to_vec()];
    while st.t() < t1 {
        st.step(t1)?;
        let (a, b) = (st.prev_t(), st.t());
        for j in 1..samples_per_step.max(1) {
            let th = j as f64 / samples_per_step as f64;
            times.push(a + th * (b - a));
            states.push(st.dense(th));
        }
        times.push(b);
        states.push(st.y().to_vec());
    }
    Ok(Trajectory {
        times,
        states,
        stats: st.stats(),
    })
}

pub fn integrate(
    ham: &dyn Hamiltonian,
    x0: &[f64],
    t0: f64,
    t1: f64,
    cfg: IntegratorConfig,
) -> Result<Trajectory, IntegrateError> {
    integrate_dense(ham, x0, t0, t1, cfg, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{FnHamiltonian, PhaseChart, TimeDependence};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{E, PI};

    fn saddle() -> FnHamiltonian {
        FnHamiltonian::new(
            PhaseChart::flat(1).unwrap(),
            TimeDependence::Autonomous,
            |x, _| 0.5 * (x[0] * x[0] - x[1] * x[1]),
            |x, _, g| {
                g[0] = x[0];
                g[1] = -x[1];
            },
        )
    }

    fn oscillator() -> FnHamiltonian {
        FnHamiltonian::new(
            PhaseChart::flat(1).unwrap(),
            TimeDependence::Autonomous,
            |x, _| 0.5 * (x[0] * x[0] + x[1] * x[1]),
            |x, _, g| {
                g[0] = x[0];
                g[1] = x[1];
            },
        )
    }

    #[test]
    fn unstable_diagonal_grows_like_exp() {
        let x0 = [0.3, 0.3];
        let tr = integrate(&saddle(), &x0, 0.0, 1.0, IntegratorConfig::with_tol(1e-12)).unwrap();
        let (t, x) = tr.last();
        assert_eq!(t, 1.0);
        assert_abs_diff_eq!(x[0], 0.3 * E, epsilon = 1e-8);
        assert_abs_diff_eq!(x[1], 0.3 * E, epsilon = 1e-8);
    }

    #[test]
    fn zero_hamiltonian_is_constant() {
        let h = FnHamiltonian::zero(PhaseChart::flat(2).unwrap());
        let tr = integrate(&h, &[1.0, 2.0, 3.0, 4.0], 0.0, 5.0, IntegratorConfig::default()).unwrap();
        assert!(tr.states.iter().all(|s| s == &vec![1.0, 2.0, 3.0, 4.0]));
    }

    #[test]
    fn potential_channel_is_linear_in_time() {
        let h = FnHamiltonian::new(
            PhaseChart::cotangent_torus(1).unwrap(),
            TimeDependence::Autonomous,
            |x, _| (2.0 * PI * x[1]).cos(),
            |x, _, g| {
                g[0] = 0.0;
                g[1] = -2.0 * PI * (2.0 * PI * x[1]).sin();
            },
        );
        let q0 = 0.13;
        let tr = integrate(&h, &[1.0, q0], 0.0, 3.0, IntegratorConfig::with_tol(1e-12)).unwrap();
        for (t, x) in tr.times.iter().zip(&tr.states) {
            assert_abs_diff_eq!(x[1], q0, epsilon = 1e-15);
            let expect = 1.0 + 2.0 * PI * (2.0 * PI * q0).sin() * t;
            assert_abs_diff_eq!(x[0], expect, epsilon = 1e-10);
        }
    }

    #[test]
    fn energy_drift_small() {
        let tr = integrate(&oscillator(), &[1.0, 0.5], 0.0, 10.0, IntegratorConfig::with_tol(1e-12)).unwrap();
        let h0 = 0.625;
        for x in &tr.states {
            assert!((0.5 * (x[0] * x[0] + x[1] * x[1]) - h0).abs() <= 1e-10);
        }
    }

    #[test]
    fn dense_output_matches_exact_rotation() {
        let cfg = IntegratorConfig::with_tol(1e-10);
        let h = oscillator();
        let mut st = Stepper::new(&h, &[1.0, 0.0], 0.0, cfg).unwrap();
        while st.t() < 3.0 {
            st.step(3.0).unwrap();
            for j in 0..=10 {
                let th = j as f64 / 10.0;
                let t = st.prev_t() + th * (st.t() - st.prev_t());
                let y = st.dense(th);
                // ṗ = −q, q̇ = p: p = cos t, q = sin t.
                assert_abs_diff_eq!(y[0], t.cos(), epsilon = 1e-8);
                assert_abs_diff_eq!(y[1], t.sin(), epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn crossing_located_to_tolerance() {
        let cfg = IntegratorConfig::with_tol(1e-12);
        let h = saddle();
        let mut st = Stepper::new(&h, &[1.0, 1.0], 0.0, cfg).unwrap();
        let level = |y: &[f64]| y[0] * y[0] + y[1] * y[1] - 4.0;
        loop {
            st.step(10.0).unwrap();
            if let Some((t, y)) = st.locate_crossing(&level, 1e-12).unwrap() {
                assert_abs_diff_eq!(t, 0.5 * 2f64.ln(), epsilon = 1e-10);
                assert_abs_diff_eq!(level(&y), 0.0, epsilon = 1e-9);
                break;
            }
        }
    }

    #[test]
    fn escape_and_interval_errors() {
        let cfg = IntegratorConfig {
            escape_bound: 5.0,
            ..IntegratorConfig::with_tol(1e-8)
        };
        match integrate(&saddle(), &[1.0, 1.0], 0.0, 10.0, cfg) {
            Err(IntegrateError::Escape { state, .. }) => {
                assert!(state.iter().map(|v| v * v).sum::<f64>().sqrt() <= 5.0)
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            integrate(&saddle(), &[1.0, 1.0], 1.0, 1.0, cfg),
            Err(IntegrateError::Interval { .. })
        ));
    }

    #[test]
    fn stiff_blowup_reports_stiffness() {
        // ṗ = p², finite-time blow-up at t = 1 without the escape guard.
        let h = FnHamiltonian::new(
            PhaseChart::flat(1).unwrap(),
            TimeDependence::Autonomous,
            |x, _| -x[0] * x[0] * x[1],
            |x, _, g| {
                g[0] = -2.0 * x[0] * x[1];
                g[1] = -x[0] * x[0];
            },
        );
        let cfg = IntegratorConfig {
            escape_bound: f64::INFINITY,
            ..IntegratorConfig::with_tol(1e-8)
        };
        let r = integrate(&h, &[1.0, 1.0], 0.0, 2.0, cfg);
        assert!(matches!(r, Err(IntegrateError::Stiffness { .. }) | Err(IntegrateError::Escape { .. }) | Err(IntegrateError::Phase(_))), "{r:?}");
    }

    #[test]
    fn periodic_coordinates_stay_reduced() {
        let h = FnHamiltonian::new(
            PhaseChart::cotangent_torus(1).unwrap(),
            TimeDependence::Autonomous,
            |x, _| 0.5 * x[0] * x[0],
            |x, _, g| {
                g[0] = x[0];
                g[1] = 0.0;
            },
        );
        let mut st = Stepper::new(&h, &[3.0, 0.9], 0.0, IntegratorConfig::with_tol(1e-12)).unwrap();
        while st.t() < 2.0 {
            st.step(2.0).unwrap();
            assert!((0.0..1.0).contains(&st.y()[1]));
            let mid = st.dense(0.5);
            let t = 0.5 * (st.prev_t() + st.t());
            let expect = crate::phase::wrap_unit(0.9 + 3.0 * t);
            let d = crate::phase::wrap_centered(mid[1] - expect);
            assert!(d.abs() < 1e-9);
        }
    }

    #[test]
    fn residual_of_recorded_trajectory() {
        let tr = integrate_dense(&oscillator(), &[1.0, 0.0], 0.0, 2.0, IntegratorConfig::with_tol(1e-12), 8)
            .unwrap();
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
        assert!(tr.ode_residual(&oscillator()) < 1e-3);
        let csv = tr.to_csv(&["p1".into(), "q1".into()]);
        assert!(csv.starts_with("t,p1,q1\n0,1,0\n"));
    }
}
