//! Numerical integration of the nonlinear search at three levels:
//! the full `N`-dimensional state, the reduced amplitude pair, and the
//! decoupled equation for the success probability alone.
//!
//! Time evolution follows `d psi / dt = i A psi` with `A = -(H0 - V)`.
//! Under the critical policy γ is recomputed from the instantaneous state
//! inside every Runge-Kutta stage.

mod dopri;
mod verify;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{
    marked_mask, project_amplitudes, reduced_generator, validate_marked, GammaPolicy, ReducedState,
    SearchParams, Trajectory,
};

pub use dopri::{Rhs, Stepper, Tolerances};
pub use verify::{verify_identities, VerificationReport, MIN_VERIFY_SAMPLES};

/// Slack on the physical range `[k/N, 1]` for the decoupled engine.
pub const DECOUPLED_RANGE_SLACK: f64 = 1e-6;

/// Where trajectory samples are taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampler {
    /// `points` equally spaced samples over `[0, t_end]`, both ends included.
    /// Integrator steps are clipped to land on every sample time.
    Uniform { points: usize },
    /// Every accepted integrator step.
    Steps,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub sampler: Sampler,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            sampler: Sampler::Uniform { points: 2001 },
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_sampler(mut self, sampler: Sampler) -> Self {
        self.sampler = sampler;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::domain(
                "rel_tol",
                format!("must be positive, got {}", self.rel_tol),
            ));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::domain(
                "abs_tol",
                format!("must be positive, got {}", self.abs_tol),
            ));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::domain(
                "max_step",
                format!("must be positive, got {}", self.max_step),
            ));
        }
        if let Sampler::Uniform { points } = self.sampler {
            if points < 2 {
                return Err(Error::domain(
                    "samples",
                    format!("need at least 2 points, got {points}"),
                ));
            }
        }
        Ok(())
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances {
            rel: self.rel_tol,
            abs: self.abs_tol,
            max_step: self.max_step,
        }
    }
}

fn check_t_end(t_end: f64) -> Result<()> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::domain(
            "t_end",
            format!("must be positive and finite, got {t_end}"),
        ));
    }
    Ok(())
}

/// Drive `stepper` to `t_end`, calling `record` at every sample point.
fn drive<R: Rhs>(
    stepper: &mut Stepper<R>,
    t_end: f64,
    sampler: Sampler,
    mut record: impl FnMut(f64, &[f64]) -> Result<()>,
) -> Result<()> {
    record(stepper.t(), stepper.y())?;
    match sampler {
        Sampler::Uniform { points } => {
            let last = points - 1;
            for i in 1..=last {
                let tg = if i == last {
                    t_end
                } else {
                    t_end * i as f64 / last as f64
                };
                while stepper.t() < tg {
                    stepper.step_to(tg)?;
                }
                record(stepper.t(), stepper.y())?;
            }
        }
        Sampler::Steps => {
            while stepper.t() < t_end {
                stepper.step_to(t_end)?;
                record(stepper.t(), stepper.y())?;
            }
        }
    }
    Ok(())
}

fn reduced_from_flat(y: &[f64]) -> ReducedState {
    ReducedState {
        alpha: Complex64::new(y[0], y[1]),
        beta: Complex64::new(y[2], y[3]),
    }
}

fn reduced_to_flat(s: &ReducedState) -> Vec<f64> {
    vec![s.alpha.re, s.alpha.im, s.beta.re, s.beta.im]
}

/// `i A (alpha, beta)` for a given hopping rate.
pub fn derivative_reduced(p: &SearchParams, gamma: f64, state: &ReducedState) -> ReducedState {
    let a = reduced_generator(p, gamma, state.alpha.norm_sqr(), state.beta.norm_sqr());
    let i = Complex64::i();
    ReducedState {
        alpha: i * (a[0][0] * state.alpha + a[0][1] * state.beta),
        beta: i * (a[1][0] * state.alpha + a[1][1] * state.beta),
    }
}

struct ReducedRhs<'a> {
    params: &'a SearchParams,
    policy: &'a GammaPolicy,
}

impl ReducedRhs<'_> {
    fn gamma(&self, t: f64, y: &[f64]) -> f64 {
        let a2 = y[0] * y[0] + y[1] * y[1];
        let b2 = y[2] * y[2] + y[3] * y[3];
        self.policy.eval(self.params, t, a2, b2)
    }
}

impl Rhs for ReducedRhs<'_> {
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let gamma = self.gamma(t, y);
        let d = derivative_reduced(self.params, gamma, &reduced_from_flat(y));
        dy.copy_from_slice(&[d.alpha.re, d.alpha.im, d.beta.re, d.beta.im]);
    }
}

/// Integrate the reduced equations from the equal superposition.
pub fn integrate_reduced(
    p: &SearchParams,
    policy: &GammaPolicy,
    t_end: f64,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    policy.validate()?;
    config.validate()?;
    check_t_end(t_end)?;
    let rhs = ReducedRhs { params: p, policy };
    let y0 = reduced_to_flat(&ReducedState::equal_superposition(p));
    let mut stepper = Stepper::new(rhs, 0.0, y0, config.tolerances());
    let mut traj = Trajectory::default();
    drive(&mut stepper, t_end, config.sampler, |t, y| {
        let gamma = ReducedRhs { params: p, policy }.gamma(t, y);
        traj.push(t, reduced_from_flat(y), gamma);
        Ok(())
    })?;
    Ok(traj)
}

/// A located extremum of the success probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub time: f64,
    pub x: f64,
}

/// Shrink `(lo, hi]`, offsets from the last accepted point, onto the first
/// point where `event` is non-negative. `event` must be negative at `lo` and
/// non-negative at `hi`.
fn bisect_in_step<R: Rhs>(
    stepper: &mut Stepper<R>,
    mut lo: f64,
    mut hi: f64,
    event: &impl Fn(f64, &[f64], &[f64]) -> f64,
) -> (f64, Vec<f64>) {
    let (t0, _) = stepper.previous();
    let mut y_hi = stepper.restep(hi);
    let mut dy = vec![0.0; y_hi.len()];
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let ym = stepper.restep(mid);
        stepper.rhs().eval(t0 + mid, &ym, &mut dy);
        if event(t0 + mid, &ym, &dy) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
            y_hi = ym;
        }
    }
    (t0 + hi, y_hi)
}

/// Run until `event` changes sign from negative to non-negative, then
/// bisect inside the last step. `event` sees `(t, y, dy)`.
fn locate_event<R: Rhs>(
    stepper: &mut Stepper<R>,
    t_end: f64,
    event: impl Fn(f64, &[f64], &[f64]) -> f64,
) -> Result<Option<(f64, Vec<f64>)>> {
    let mut armed = event(stepper.t(), stepper.y(), stepper.dy()) < 0.0;
    while stepper.t() < t_end {
        stepper.step_to(t_end)?;
        let value = event(stepper.t(), stepper.y(), stepper.dy());
        if value < 0.0 {
            armed = true;
            continue;
        }
        if !armed {
            continue;
        }
        let h = stepper.t() - stepper.previous().0;
        return Ok(Some(bisect_in_step(stepper, 0.0, h, &event)));
    }
    Ok(None)
}

fn x_rate(y: &[f64], dy: &[f64]) -> f64 {
    2.0 * (y[0] * dy[0] + y[1] * dy[1])
}

/// First local maximum of the success probability in `(0, t_end]`, located
/// as the zero of `dx/dt`.
pub fn first_peak(
    p: &SearchParams,
    policy: &GammaPolicy,
    t_end: f64,
    config: &IntegratorConfig,
) -> Result<Option<Peak>> {
    policy.validate()?;
    config.validate()?;
    check_t_end(t_end)?;
    let rhs = ReducedRhs { params: p, policy };
    let y0 = reduced_to_flat(&ReducedState::equal_superposition(p));
    let mut stepper = Stepper::new(rhs, 0.0, y0, config.tolerances());
    let hit = locate_event(&mut stepper, t_end, |_, y, dy| -x_rate(y, dy))?;
    Ok(hit.map(|(time, y)| Peak {
        time,
        x: y[0] * y[0] + y[1] * y[1],
    }))
}

/// First time the success probability reaches `threshold`.
pub fn first_crossing(
    p: &SearchParams,
    policy: &GammaPolicy,
    threshold: f64,
    t_end: f64,
    config: &IntegratorConfig,
) -> Result<Option<f64>> {
    policy.validate()?;
    config.validate()?;
    check_t_end(t_end)?;
    let rhs = ReducedRhs { params: p, policy };
    let y0 = reduced_to_flat(&ReducedState::equal_superposition(p));
    let mut stepper = Stepper::new(rhs, 0.0, y0, config.tolerances());
    let above = |_: f64, y: &[f64], _: &[f64]| y[0] * y[0] + y[1] * y[1] - threshold;
    let falling = |_: f64, y: &[f64], dy: &[f64]| -x_rate(y, dy);
    if above(0.0, stepper.y(), stepper.dy()) >= 0.0 {
        return Ok(Some(0.0));
    }
    while stepper.t() < t_end {
        let rising = x_rate(stepper.y(), stepper.dy()) >= 0.0;
        stepper.step_to(t_end)?;
        let h = stepper.t() - stepper.previous().0;
        if above(0.0, stepper.y(), stepper.dy()) >= 0.0 {
            return Ok(Some(bisect_in_step(&mut stepper, 0.0, h, &above).0));
        }
        // a peak narrower than the step can clear the threshold between
        // two samples that both sit below it
        if rising && x_rate(stepper.y(), stepper.dy()) < 0.0 {
            let (tp, yp) = bisect_in_step(&mut stepper, 0.0, h, &falling);
            let hp = tp - stepper.previous().0;
            if above(0.0, &yp, &[]) >= 0.0 {
                return Ok(Some(bisect_in_step(&mut stepper, 0.0, hp, &above).0));
            }
        }
    }
    Ok(None)
}

struct FullRhs<'a> {
    params: &'a SearchParams,
    policy: &'a GammaPolicy,
    mask: Vec<bool>,
}

impl FullRhs<'_> {
    fn gamma(&self, t: f64, y: &[f64]) -> f64 {
        let (mut pm, mut pu) = (0.0, 0.0);
        for (i, &m) in self.mask.iter().enumerate() {
            let w = y[2 * i] * y[2 * i] + y[2 * i + 1] * y[2 * i + 1];
            if m {
                pm += w;
            } else {
                pu += w;
            }
        }
        self.policy.eval(self.params, t, pm, pu)
    }
}

impl Rhs for FullRhs<'_> {
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let gamma = self.gamma(t, y);
        let g = self.params.g();
        // gamma N |s><s| psi = gamma * (sum_j psi_j) on every component
        let (mut sr, mut si) = (0.0, 0.0);
        for pair in y.chunks_exact(2) {
            sr += pair[0];
            si += pair[1];
        }
        let (hr, hi) = (gamma * sr, gamma * si);
        for (i, &m) in self.mask.iter().enumerate() {
            let (re, im) = (y[2 * i], y[2 * i + 1]);
            let diag = g * (re * re + im * im) + if m { 1.0 } else { 0.0 };
            let (ar, ai) = (hr + diag * re, hi + diag * im);
            dy[2 * i] = -ai;
            dy[2 * i + 1] = ar;
        }
    }
}

/// Output of a full-state integration.
#[derive(Debug, Clone, PartialEq)]
pub struct FullRun {
    /// Projection onto `{|w>, |r>}` at every sample; `norm_residual` is the
    /// full-state norm deviation.
    pub trajectory: Trajectory,
    /// Norm of the component orthogonal to the subspace, per sample.
    pub leakage: Vec<f64>,
}

impl FullRun {
    pub fn max_leakage(&self) -> f64 {
        self.leakage.iter().copied().fold(0.0, f64::max)
    }

    /// Norm and leakage part of a verification report.
    pub fn report(&self) -> VerificationReport {
        VerificationReport {
            max_norm_residual: self.trajectory.max_norm_residual(),
            max_subspace_leakage: self.max_leakage(),
            ..VerificationReport::default()
        }
    }
}

/// Integrate the `N`-dimensional state from the equal superposition. Each
/// derivative evaluation is `O(N)`.
pub fn integrate_full(
    p: &SearchParams,
    marked: &[usize],
    policy: &GammaPolicy,
    t_end: f64,
    config: &IntegratorConfig,
) -> Result<FullRun> {
    policy.validate()?;
    config.validate()?;
    check_t_end(t_end)?;
    if marked.len() != p.k() {
        return Err(Error::domain(
            "marked",
            format!("expected {} marked indices, got {}", p.k(), marked.len()),
        ));
    }
    let marked = validate_marked(p.n(), marked.to_vec())?;
    let n = p.n();
    let mask = marked_mask(n, &marked);
    let amp = 1.0 / (n as f64).sqrt();
    let mut y0 = vec![0.0; 2 * n];
    for i in 0..n {
        y0[2 * i] = amp;
    }
    let rhs = FullRhs {
        params: p,
        policy,
        mask: mask.clone(),
    };
    let mut stepper = Stepper::new(rhs, 0.0, y0, config.tolerances());
    let mut run = FullRun {
        trajectory: Trajectory::default(),
        leakage: Vec::new(),
    };
    let mut amps = vec![Complex64::new(0.0, 0.0); n];
    let probe = FullRhs {
        params: p,
        policy,
        mask: mask.clone(),
    };
    drive(&mut stepper, t_end, config.sampler, |t, y| {
        for (a, pair) in amps.iter_mut().zip(y.chunks_exact(2)) {
            *a = Complex64::new(pair[0], pair[1]);
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let (reduced, leak) = project_amplitudes(&amps, &mask, marked.len());
        let traj = &mut run.trajectory;
        traj.times.push(t);
        traj.x.push(reduced.x());
        traj.gamma.push(probe.gamma(t, y));
        traj.norm_residual.push((norm - 1.0).abs());
        traj.states.push(reduced);
        run.leakage.push(leak);
        Ok(())
    })?;
    Ok(run)
}

/// `f(x) = (dx/dt)^2 = 4k (Nx - k)(1 - x)[1 + G(Nx - k)]^2 / N^2` under the
/// critical policy.
pub fn decoupled_rate_squared(p: &SearchParams, x: f64) -> f64 {
    let (nf, kf, big_g) = (p.nf(), p.kf(), p.big_g());
    let u = nf * x - kf;
    let r = 1.0 + big_g * u;
    4.0 * kf * u * (1.0 - x) * r * r / (nf * nf)
}

fn decoupled_rate_squared_slope(p: &SearchParams, x: f64) -> f64 {
    let (nf, kf, big_g) = (p.nf(), p.kf(), p.big_g());
    let u = nf * x - kf;
    let q = 1.0 - x;
    let r = 1.0 + big_g * u;
    4.0 * kf / (nf * nf) * (nf * q * r * r - u * r * r + 2.0 * u * q * r * big_g * nf)
}

/// Samples of the decoupled success-probability equation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DecoupledTrajectory {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    /// `dx/dt`; its sign is the current branch of `+-sqrt(f(x))`.
    pub rate: Vec<f64>,
    /// `|(dx/dt)^2 - f(x)|`, conserved at zero by the exact flow.
    pub invariant_residual: Vec<f64>,
}

/// Integrate the success probability alone.
///
/// The first-order form `dx/dt = +-sqrt(f(x))` is stationary at `x = k/N`
/// and not Lipschitz at its turning points, so it is carried as the
/// equivalent second-order system `x' = v`, `v' = f'(x)/2` started at
/// `(k/N, 0)`. The branch flips wherever `v` changes sign.
pub fn integrate_decoupled(
    p: &SearchParams,
    t_end: f64,
    config: &IntegratorConfig,
) -> Result<DecoupledTrajectory> {
    config.validate()?;
    check_t_end(t_end)?;
    let params = *p;
    let rhs = move |_t: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = 0.5 * decoupled_rate_squared_slope(&params, y[0]);
    };
    let x0 = p.initial_probability();
    let mut stepper = Stepper::new(rhs, 0.0, vec![x0, 0.0], config.tolerances());
    let mut out = DecoupledTrajectory::default();
    let (lo, hi) = (x0 - DECOUPLED_RANGE_SLACK, 1.0 + DECOUPLED_RANGE_SLACK);
    let check = |t: f64, x: f64| {
        if x < lo || x > hi || !x.is_finite() {
            Err(Error::numerical(t, format!("x = {x} left [{lo}, {hi}]")))
        } else {
            Ok(())
        }
    };
    let mut record = |t: f64, y: &[f64]| -> Result<()> {
        check(t, y[0])?;
        out.times.push(t);
        out.x.push(y[0]);
        out.rate.push(y[1]);
        out.invariant_residual
            .push((y[1] * y[1] - decoupled_rate_squared(p, y[0])).abs());
        Ok(())
    };
    match config.sampler {
        Sampler::Steps => drive(&mut stepper, t_end, Sampler::Steps, record)?,
        Sampler::Uniform { points } => {
            // check the range at every internal step as well
            record(0.0, stepper.y())?;
            let last = points - 1;
            for i in 1..=last {
                let tg = if i == last {
                    t_end
                } else {
                    t_end * i as f64 / last as f64
                };
                while stepper.t() < tg {
                    stepper.step_to(tg)?;
                    check(stepper.t(), stepper.y()[0])?;
                }
                record(stepper.t(), stepper.y())?;
            }
        }
    }
    Ok(out)
}
