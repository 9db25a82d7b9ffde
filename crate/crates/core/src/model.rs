//! Domain types shared by every level of the simulation.
//!
//! The search lives in an `N`-dimensional space with `k` marked basis
//! states. Under the cubic self-potential the evolution never leaves the
//! two-dimensional subspace spanned by the normalized marked superposition
//! `|w>` and the normalized unmarked superposition `|r>`, so most of the
//! crate works with the amplitude pair `(alpha, beta)` in that basis.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Norm tolerance used when validating user-supplied states.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Peak-height deficit used when none is given.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// How the nonlinearity strength is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    /// The coefficient `g` of the self-potential `g |psi_i|^2`.
    Raw(f64),
    /// The rescaled coefficient `G = g / (k (N - k))`.
    Rescaled(f64),
}

/// A search instance: dimension, marked count and nonlinearity.
///
/// `g` and `G` are kept consistent: whichever one the instance was built
/// from determines the other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchParams {
    n: usize,
    k: usize,
    g_raw: f64,
    g_rescaled: f64,
    epsilon: f64,
}

impl SearchParams {
    pub fn new(n: usize, k: usize, coupling: Coupling, epsilon: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("n", format!("need N >= 2, got {n}")));
        }
        if k < 1 || k >= n {
            return Err(Error::domain(
                "k",
                format!("need 1 <= k < N = {n}, got {k}"),
            ));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::domain(
                "epsilon",
                format!("need 0 < eps < 1, got {epsilon}"),
            ));
        }
        let scale = (k as f64) * ((n - k) as f64);
        let (g_raw, g_rescaled) = match coupling {
            Coupling::Raw(g) if g.is_finite() => (g, g / scale),
            Coupling::Rescaled(big) if big.is_finite() => (big * scale, big),
            Coupling::Raw(g) => return Err(Error::domain("g", format!("not finite: {g}"))),
            Coupling::Rescaled(big) => {
                return Err(Error::domain("G", format!("not finite: {big}")))
            }
        };
        Ok(SearchParams {
            n,
            k,
            g_raw,
            g_rescaled,
            epsilon,
        })
    }

    /// Same instance with a different peak-height deficit.
    pub fn with_epsilon(self, epsilon: f64) -> Result<Self> {
        SearchParams::new(self.n, self.k, Coupling::Rescaled(self.g_rescaled), epsilon)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Raw nonlinearity coefficient `g`.
    pub fn g(&self) -> f64 {
        self.g_raw
    }

    /// Rescaled nonlinearity coefficient `G = g / (k (N - k))`.
    pub fn big_g(&self) -> f64 {
        self.g_rescaled
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub(crate) fn nf(&self) -> f64 {
        self.n as f64
    }

    pub(crate) fn kf(&self) -> f64 {
        self.k as f64
    }

    /// `N - k` as a float.
    pub(crate) fn rest(&self) -> f64 {
        (self.n - self.k) as f64
    }

    /// Success probability of the equal superposition, `k / N`.
    pub fn initial_probability(&self) -> f64 {
        self.kf() / self.nf()
    }
}

/// Build a [`SearchParams`], validating every bound.
pub fn make_params(n: usize, k: usize, coupling: Coupling, epsilon: f64) -> Result<SearchParams> {
    SearchParams::new(n, k, coupling, epsilon)
}

/// Tabulated γ(t) with linear interpolation and clamping at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl Schedule {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::domain("schedule", "no knots"));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::domain(
                    "schedule",
                    format!("times must increase strictly ({} then {})", w[0].0, w[1].0),
                ));
            }
        }
        for &(t, v) in &knots {
            if !t.is_finite() {
                return Err(Error::domain("schedule", format!("time {t} is not finite")));
            }
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(
                    "schedule",
                    format!("gamma must be finite and positive, got {v} at t = {t}"),
                ));
            }
        }
        let (times, values) = knots.into_iter().unzip();
        Ok(Schedule { times, values })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let last = self.times.len() - 1;
        if t <= self.times[0] {
            return self.values[0];
        }
        if t >= self.times[last] {
            return self.values[last];
        }
        // first knot strictly greater than t
        let hi = self.times.partition_point(|&tk| tk <= t);
        let lo = hi - 1;
        let w = (t - self.times[lo]) / (self.times[hi] - self.times[lo]);
        self.values[lo] + w * (self.values[hi] - self.values[lo])
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }
}

/// Control law for the hopping rate γ.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaPolicy {
    Constant(f64),
    /// Track the state-dependent critical value at every evaluation.
    Critical,
    Schedule(Schedule),
}

impl GammaPolicy {
    pub fn constant(gamma: f64) -> Result<Self> {
        let policy = GammaPolicy::Constant(gamma);
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GammaPolicy::Constant(v) if !(v.is_finite() && *v > 0.0) => Err(Error::domain(
                "gamma",
                format!("constant gamma must be finite and positive, got {v}"),
            )),
            _ => Ok(()),
        }
    }

    /// γ at time `t` given the populations of the marked and unmarked parts.
    pub fn eval(&self, params: &SearchParams, t: f64, alpha_sq: f64, beta_sq: f64) -> f64 {
        match self {
            GammaPolicy::Constant(v) => *v,
            GammaPolicy::Critical => critical_gamma_from_populations(params, alpha_sq, beta_sq),
            GammaPolicy::Schedule(s) => s.eval(t),
        }
    }

    pub fn is_critical(&self) -> bool {
        matches!(self, GammaPolicy::Critical)
    }
}

/// `(1 + G delta) / N` with `delta = (N-k)|alpha|^2 - k|beta|^2`.
pub(crate) fn critical_gamma_from_populations(
    p: &SearchParams,
    alpha_sq: f64,
    beta_sq: f64,
) -> f64 {
    let delta = p.rest() * alpha_sq - p.kf() * beta_sq;
    (1.0 + p.big_g() * delta) / p.nf()
}

/// The real symmetric generator `A` of the reduced dynamics in the
/// `{|w>, |r>}` basis, for hopping rate `gamma` and populations
/// `|alpha|^2`, `|beta|^2`.
pub fn reduced_generator(
    p: &SearchParams,
    gamma: f64,
    alpha_sq: f64,
    beta_sq: f64,
) -> [[f64; 2]; 2] {
    let (k, rest, big_g) = (p.kf(), p.rest(), p.big_g());
    let off = gamma * (k * rest).sqrt();
    [
        [gamma * k + 1.0 + big_g * rest * alpha_sq, off],
        [off, gamma * rest + big_g * k * beta_sq],
    ]
}

/// Amplitudes on `|w>` (normalized marked superposition) and `|r>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl ReducedState {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let s = ReducedState { alpha, beta };
        let dev = s.norm_residual();
        if !(dev <= NORM_TOLERANCE) {
            return Err(Error::domain(
                "state",
                format!("|alpha|^2 + |beta|^2 deviates from 1 by {dev:e}"),
            ));
        }
        Ok(s)
    }

    /// The equal superposition `|s>`.
    pub fn equal_superposition(p: &SearchParams) -> Self {
        ReducedState {
            alpha: Complex64::new(p.initial_probability().sqrt(), 0.0),
            beta: Complex64::new((p.rest() / p.nf()).sqrt(), 0.0),
        }
    }

    /// Success probability `|alpha|^2`.
    pub fn x(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    pub fn norm_residual(&self) -> f64 {
        (self.alpha.norm_sqr() + self.beta.norm_sqr() - 1.0).abs()
    }

    /// `sigma = (N-k)|alpha|^2 + k|beta|^2`.
    pub fn sigma(&self, p: &SearchParams) -> f64 {
        p.rest() * self.alpha.norm_sqr() + p.kf() * self.beta.norm_sqr()
    }

    /// `delta = (N-k)|alpha|^2 - k|beta|^2`.
    pub fn delta(&self, p: &SearchParams) -> f64 {
        p.rest() * self.alpha.norm_sqr() - p.kf() * self.beta.norm_sqr()
    }
}

/// A dense state over the full computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    amplitudes: Vec<Complex64>,
    marked: Vec<usize>,
}

impl FullState {
    pub fn new(amplitudes: Vec<Complex64>, marked: Vec<usize>) -> Result<Self> {
        let marked = validate_marked(amplitudes.len(), marked)?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !((norm - 1.0).abs() <= NORM_TOLERANCE) {
            return Err(Error::domain(
                "state",
                format!("squared norm {norm} deviates from 1"),
            ));
        }
        Ok(FullState { amplitudes, marked })
    }

    pub(crate) fn from_parts_unchecked(amplitudes: Vec<Complex64>, marked: Vec<usize>) -> Self {
        FullState { amplitudes, marked }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn marked(&self) -> &[usize] {
        &self.marked
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }
}

/// Sort, deduplicate-check and range-check a marked set.
pub(crate) fn validate_marked(n: usize, mut marked: Vec<usize>) -> Result<Vec<usize>> {
    marked.sort_unstable();
    if marked.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::domain("marked", "duplicate marked index"));
    }
    if let Some(&bad) = marked.iter().find(|&&i| i >= n) {
        return Err(Error::domain(
            "marked",
            format!("index {bad} out of range for N = {n}"),
        ));
    }
    if marked.is_empty() || marked.len() >= n {
        return Err(Error::domain(
            "marked",
            format!("need 1 <= |M| < N, got |M| = {}", marked.len()),
        ));
    }
    Ok(marked)
}

pub(crate) fn marked_mask(n: usize, marked: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &i in marked {
        mask[i] = true;
    }
    mask
}

/// Lift a reduced state into the full basis: `alpha/sqrt(k)` on every marked
/// index and `beta/sqrt(N-k)` on every other one.
pub fn embed(p: &SearchParams, reduced: &ReducedState, marked: &[usize]) -> Result<FullState> {
    if marked.len() != p.k() {
        return Err(Error::domain(
            "marked",
            format!("expected {} marked indices, got {}", p.k(), marked.len()),
        ));
    }
    let marked = validate_marked(p.n(), marked.to_vec())?;
    let on = reduced.alpha / p.kf().sqrt();
    let off = reduced.beta / p.rest().sqrt();
    let mask = marked_mask(p.n(), &marked);
    let amplitudes = mask.iter().map(|&m| if m { on } else { off }).collect();
    Ok(FullState::from_parts_unchecked(amplitudes, marked))
}

/// Project onto `{|w>, |r>}`. Also returns the norm of the component
/// orthogonal to that subspace.
pub fn project(full: &FullState) -> (ReducedState, f64) {
    project_amplitudes(
        full.amplitudes(),
        &marked_mask(full.dim(), full.marked()),
        full.marked().len(),
    )
}

pub(crate) fn project_amplitudes(
    amps: &[Complex64],
    mask: &[bool],
    k: usize,
) -> (ReducedState, f64) {
    let n = amps.len();
    let (mut sum_m, mut sum_u) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for (a, &m) in amps.iter().zip(mask) {
        if m {
            sum_m += a;
        } else {
            sum_u += a;
        }
    }
    let (kf, rf) = (k as f64, (n - k) as f64);
    let mean_m = sum_m / kf;
    let mean_u = sum_u / rf;
    let leak_sq: f64 = amps
        .iter()
        .zip(mask)
        .map(|(a, &m)| (a - if m { mean_m } else { mean_u }).norm_sqr())
        .sum();
    let reduced = ReducedState {
        alpha: sum_m / kf.sqrt(),
        beta: sum_u / rf.sqrt(),
    };
    (reduced, leak_sq.sqrt())
}

/// Time-ordered samples of an integration run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ReducedState>,
    /// Success probability `|alpha|^2` per sample.
    pub x: Vec<f64>,
    /// γ in effect at each sample.
    pub gamma: Vec<f64>,
    pub norm_residual: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub(crate) fn push(&mut self, t: f64, state: ReducedState, gamma: f64) {
        self.times.push(t);
        self.x.push(state.x());
        self.norm_residual.push(state.norm_residual());
        self.states.push(state);
        self.gamma.push(gamma);
    }

    pub fn max_norm_residual(&self) -> f64 {
        self.norm_residual.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_x(&self) -> f64 {
        self.x.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}
