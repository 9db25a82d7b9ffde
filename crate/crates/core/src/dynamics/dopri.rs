//! Embedded Dormand-Prince 5(4) stepper on flat `f64` state vectors.
//!
//! The stepper exposes single accepted steps so that callers can sample on
//! a fixed grid (by clipping steps to grid points) and locate events by
//! re-stepping from the last accepted point.

use crate::error::{Error, Result};

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

// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const MAX_REJECTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    pub max_step: f64,
}

/// Right-hand side `dy/dt = f(t, y)`.
pub trait Rhs {
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]);
}

impl<F: Fn(f64, &[f64], &mut [f64])> Rhs for F {
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        self(t, y, dy)
    }
}

pub struct Stepper<R> {
    rhs: R,
    tol: Tolerances,
    t: f64,
    y: Vec<f64>,
    /// derivative at (t, y)
    f: Vec<f64>,
    h: f64,
    prev_t: f64,
    prev_y: Vec<f64>,
    prev_f: Vec<f64>,
    k: [Vec<f64>; 6],
    stage: Vec<f64>,
    y_new: Vec<f64>,
    evals: usize,
}

impl<R: Rhs> Stepper<R> {
    pub fn new(rhs: R, t0: f64, y0: Vec<f64>, tol: Tolerances) -> Self {
        let n = y0.len();
        let mut f = vec![0.0; n];
        rhs.eval(t0, &y0, &mut f);
        let mut s = Stepper {
            rhs,
            tol,
            t: t0,
            prev_t: t0,
            prev_y: y0.clone(),
            prev_f: f.clone(),
            y: y0,
            f,
            h: 0.0,
            k: std::array::from_fn(|_| vec![0.0; n]),
            stage: vec![0.0; n],
            y_new: vec![0.0; n],
            evals: 1,
        };
        s.h = s.initial_step();
        s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Derivative at the current point.
    pub fn dy(&self) -> &[f64] {
        &self.f
    }

    pub fn rhs(&self) -> &R {
        &self.rhs
    }

    pub fn evaluations(&self) -> usize {
        self.evals
    }

    /// Time and state before the most recent accepted step.
    pub fn previous(&self) -> (f64, &[f64]) {
        (self.prev_t, &self.prev_y)
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.tol.abs + self.tol.rel * a.abs().max(b.abs())
    }

    fn rms(&self, v: &[f64], reference: &[f64]) -> f64 {
        let sum: f64 = v
            .iter()
            .zip(reference)
            .map(|(vi, ri)| (vi / self.scale(*ri, *ri)).powi(2))
            .sum();
        (sum / v.len().max(1) as f64).sqrt()
    }

    /// Starting step size following Hairer, Norsett & Wanner.
    fn initial_step(&mut self) -> f64 {
        let d0 = self.rms(&self.y, &self.y);
        let d1 = self.rms(&self.f, &self.y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(self.tol.max_step);
        for i in 0..self.y.len() {
            self.stage[i] = self.y[i] + h0 * self.f[i];
        }
        let mut f1 = vec![0.0; self.y.len()];
        self.rhs.eval(self.t + h0, &self.stage, &mut f1);
        self.evals += 1;
        let diff: Vec<f64> = f1.iter().zip(&self.f).map(|(a, b)| a - b).collect();
        let d2 = self.rms(&diff, &self.y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.tol.max_step)
    }

    /// One trial step of size `h` from `(t, y, f)`. Writes the fifth-order
    /// solution into `y_new`, the derivative there into `k[5]`, and returns
    /// the scaled error norm.
    fn attempt(&mut self, t: f64, h: f64, from_prev: bool) -> f64 {
        let n = self.y.len();
        let (y, f) = if from_prev {
            (&self.prev_y, &self.prev_f)
        } else {
            (&self.y, &self.f)
        };
        let [k2, k3, k4, k5, k6, k7] = &mut self.k;
        let st = &mut self.stage;

        for i in 0..n {
            st[i] = y[i] + h * A21 * f[i];
        }
        self.rhs.eval(t + C2 * h, st, k2);
        for i in 0..n {
            st[i] = y[i] + h * (A31 * f[i] + A32 * k2[i]);
        }
        self.rhs.eval(t + C3 * h, st, k3);
        for i in 0..n {
            st[i] = y[i] + h * (A41 * f[i] + A42 * k2[i] + A43 * k3[i]);
        }
        self.rhs.eval(t + C4 * h, st, k4);
        for i in 0..n {
            st[i] = y[i] + h * (A51 * f[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        self.rhs.eval(t + C5 * h, st, k5);
        for i in 0..n {
            st[i] = y[i] + h * (A61 * f[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        self.rhs.eval(t + h, st, k6);
        for i in 0..n {
            self.y_new[i] =
                y[i] + h * (A71 * f[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        self.rhs.eval(t + h, &self.y_new, k7);
        self.evals += 6;

        let mut sum = 0.0;
        for i in 0..n {
            let err =
                h * (E1 * f[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.tol.abs + self.tol.rel * y[i].abs().max(self.y_new[i].abs());
            sum += (err / sc).powi(2);
        }
        (sum / n.max(1) as f64).sqrt()
    }

    /// Take one accepted step that does not pass `t_limit`. A step clipped
    /// to `t_limit` lands on it exactly.
    pub fn step_to(&mut self, t_limit: f64) -> Result<()> {
        let remaining = t_limit - self.t;
        if remaining <= 0.0 {
            return Ok(());
        }
        let mut h = self.h.min(self.tol.max_step);
        for _ in 0..MAX_REJECTS {
            let clipped = h >= remaining;
            let h_try = if clipped { remaining } else { h };
            if h_try <= 16.0 * f64::EPSILON * self.t.abs().max(1.0) {
                return Err(Error::numerical(self.t, "step size underflow"));
            }
            let err = self.attempt(self.t, h_try, false);
            if !err.is_finite() {
                h = h_try * MIN_FACTOR;
                continue;
            }
            if err <= 1.0 {
                let factor = if err == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                std::mem::swap(&mut self.prev_y, &mut self.y);
                std::mem::swap(&mut self.prev_f, &mut self.f);
                self.prev_t = self.t;
                std::mem::swap(&mut self.y, &mut self.y_new);
                self.f.copy_from_slice(&self.k[5]);
                self.t = if clipped { t_limit } else { self.t + h_try };
                let proposed = h_try * factor;
                self.h = if clipped {
                    proposed.max(self.h)
                } else {
                    proposed
                };
                return Ok(());
            }
            h = h_try * (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
        }
        Err(Error::numerical(self.t, "too many rejected steps"))
    }

    /// State reached by a single step of size `h` from the point before the
    /// last accepted step. Used to refine events inside that step.
    pub fn restep(&mut self, h: f64) -> Vec<f64> {
        if h <= 0.0 {
            return self.prev_y.clone();
        }
        self.attempt(self.prev_t, h, true);
        self.y_new.clone()
    }
}
