//! Closed-form results under the critical-γ control law.
//!
//! Everything here is parameterized by the combination
//! `c = 1 + G (N - k)`. With `c > 0` the success probability oscillates
//! between `k/N` and 1 with period `2 t*`; with `c <= 0` (strong repulsion)
//! it saturates below 1 and the runtime is undefined.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::model::{critical_gamma_from_populations, reduced_generator, SearchParams};

/// `1 + G (N - k)`.
fn growth(p: &SearchParams) -> f64 {
    1.0 + p.big_g() * p.rest()
}

/// Critical hopping rate `(1 + G delta) / N` at success probability `x`,
/// taking `|beta|^2 = 1 - x`.
pub fn critical_gamma(p: &SearchParams, x: f64) -> f64 {
    critical_gamma_from_populations(p, x, 1.0 - x)
}

/// Squared overlaps of the normalized eigenvectors with `|w>` and `|s>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlaps {
    pub w_plus: f64,
    pub w_minus: f64,
    pub s_plus: f64,
    pub s_minus: f64,
}

/// Eigen-decomposition of the reduced generator `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub gap: f64,
    /// Coefficient of `|w>` relative to `|s>` in the upper eigenvector when
    /// written as `rho |w> + |s>`.
    pub w_component_ratio: f64,
    /// Same for the lower eigenvector.
    pub w_component_ratio_minus: f64,
    pub overlaps: Overlaps,
}

pub fn spectrum(p: &SearchParams, gamma: f64, x: f64) -> Result<Spectrum> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain(
            "gamma",
            format!("need gamma > 0, got {gamma}"),
        ));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain("x", format!("need 0 <= x <= 1, got {x}")));
    }
    let [[a, b], [_, d]] = reduced_generator(p, gamma, x, 1.0 - x);
    let mean = 0.5 * (a + d);
    let gap = ((a - d).powi(2) + 4.0 * b * b).sqrt();
    let lambda_plus = mean + 0.5 * gap;
    let lambda_minus = mean - 0.5 * gap;

    let (nf, kf) = (p.nf(), p.kf());
    let delta = p.rest() * x - kf * (1.0 - x);
    let base = -gamma * nf + 1.0 + delta * p.big_g();
    let denom = 2.0 * gamma * (kf * nf).sqrt();

    let (sw, sr) = ((kf / nf).sqrt(), (p.rest() / nf).sqrt());
    let overlap = |lambda: f64| {
        let v1 = [b, lambda - a];
        let v2 = [lambda - d, b];
        let n1 = v1[0].hypot(v1[1]);
        let n2 = v2[0].hypot(v2[1]);
        let (u, v) = if n1 >= n2 {
            (v1[0] / n1, v1[1] / n1)
        } else {
            (v2[0] / n2, v2[1] / n2)
        };
        (u * u, (sw * u + sr * v).powi(2))
    };
    let (w_plus, s_plus) = overlap(lambda_plus);
    let (w_minus, s_minus) = overlap(lambda_minus);

    Ok(Spectrum {
        lambda_plus,
        lambda_minus,
        gap,
        w_component_ratio: (base + gap) / denom,
        w_component_ratio_minus: (base - gap) / denom,
        overlaps: Overlaps {
            w_plus,
            w_minus,
            s_plus,
            s_minus,
        },
    })
}

/// Success probability `x(t)` under the critical-γ policy, starting from
/// the equal superposition.
///
/// For `c > 0` the curve is evaluated on the half period `[0, t*]` and
/// extended by reflection and periodicity, which avoids the tangent
/// singularity at the peak.
pub fn success_probability(p: &SearchParams, t: f64) -> f64 {
    let (nf, kf) = (p.nf(), p.kf());
    let c = growth(p);
    let t = t.abs();
    if c > 0.0 {
        let omega = (kf * c / nf).sqrt();
        let t_star = FRAC_PI_2 / omega;
        let mut u = t.rem_euclid(2.0 * t_star);
        if u > t_star {
            u = 2.0 * t_star - u;
        }
        let (s, co) = (omega * u).sin_cos();
        let (s2, c2) = (s * s, co * co);
        (nf * s2 + kf * c * c2) / (nf * s2 + nf * c * c2)
    } else {
        // x = k (1 + S) / (N + k S) with S -> t^2 at c = 0 and
        // S = tanh^2(mu t) / mu^2 for c < 0.
        let s = if c == 0.0 {
            t * t
        } else {
            let mu = (-kf * c / nf).sqrt();
            let th = (mu * t).tanh();
            th * th / (mu * mu)
        };
        kf * (1.0 + s) / (nf + kf * s)
    }
}

/// Supremum of the success probability over all time.
pub fn probability_ceiling(p: &SearchParams) -> f64 {
    let c = growth(p);
    if c >= 0.0 {
        1.0
    } else {
        (p.nf() - p.kf() * c) / (p.nf() * (1.0 - c))
    }
}

/// Smallest `t >= 0` at which the success probability equals `x`.
pub fn time_to_probability(p: &SearchParams, x: f64) -> Result<f64> {
    let (nf, kf) = (p.nf(), p.kf());
    let x0 = p.initial_probability();
    if !(x >= x0 && x <= 1.0) {
        return Err(Error::domain("x", format!("need {x0} <= x <= 1, got {x}")));
    }
    let c = growth(p);
    let num = (nf * x - kf).max(0.0);
    let den = kf * (1.0 - x);
    if c > 0.0 {
        let omega = (kf * c / nf).sqrt();
        Ok((omega * num.sqrt()).atan2(den.sqrt()) / omega)
    } else if c == 0.0 {
        if den == 0.0 {
            return Err(Error::domain(
                "x",
                "x = 1 is only approached asymptotically",
            ));
        }
        Ok((num / den).sqrt())
    } else {
        let mu = (-kf * c / nf).sqrt();
        let arg = mu * (num / den).sqrt();
        if !(arg < 1.0) {
            return Err(Error::domain(
                "x",
                format!(
                    "x = {x} lies at or beyond the stationary ceiling {}",
                    probability_ceiling(p)
                ),
            ));
        }
        Ok(arg.atanh() / mu)
    }
}

/// First time the success probability reaches 1,
/// `t* = pi sqrt(N) / (2 sqrt(k (1 + G (N - k))))`.
pub fn runtime(p: &SearchParams) -> Result<f64> {
    let c = growth(p);
    if !(c > 0.0) {
        return Err(Error::domain(
            "G",
            format!(
                "success probability 1 unreachable for G = {} <= -1/(N-k)",
                p.big_g()
            ),
        ));
    }
    Ok(PI * p.nf().sqrt() / (2.0 * (p.kf() * c).sqrt()))
}

/// Width of the peak at height `1 - eps`, its leading Taylor term, and a
/// bound on the Taylor remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakWidth {
    pub exact: f64,
    pub taylor_first_term: f64,
    pub remainder_bound: f64,
    /// The remainder bound is only derived for one marked state; for
    /// `k > 1` it is the same expression with `k` substituted.
    pub extrapolated: bool,
}

pub fn peak_width(p: &SearchParams) -> Result<PeakWidth> {
    let eps = p.epsilon();
    let (nf, kf, rest, big_g) = (p.nf(), p.kf(), p.rest(), p.big_g());
    let x0 = p.initial_probability();
    if !(eps > 0.0 && eps < 1.0 - x0) {
        return Err(Error::domain(
            "epsilon",
            format!("need 0 < eps < 1 - k/N = {}, got {eps}", 1.0 - x0),
        ));
    }
    let c = growth(p);
    if !(c > 0.0) {
        return Err(Error::domain(
            "G",
            "no peak: success probability 1 unreachable",
        ));
    }
    let m = nf * (1.0 - eps) - kf;
    let exact =
        2.0 * (nf / (kf * c)).sqrt() * (nf.sqrt() * eps.sqrt() / (c.sqrt() * m.sqrt())).atan();
    let taylor_first_term = 2.0 * nf / c * (eps / (kf * rest)).sqrt();
    let remainder_bound = nf * nf * (1.0 + 3.0 * big_g * m)
        / (kf.sqrt() * m.powf(1.5) * (1.0 + big_g * m).powi(2))
        * eps.powf(1.5);
    Ok(PeakWidth {
        exact,
        taylor_first_term,
        remainder_bound,
        extrapolated: p.k() > 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    Minimum,
    Maximum,
    Stationary,
}

/// Critical points of the decoupled success-probability equation (one
/// marked state).
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryPoints {
    pub points: Vec<(f64, CriticalKind)>,
    /// The stationary point lies strictly inside `(1/N, 1)`, so the
    /// success probability never reaches 1.
    pub blocks_peak: bool,
}

impl StationaryPoints {
    pub fn stationary(&self) -> Option<f64> {
        self.points
            .iter()
            .find(|(_, kind)| *kind == CriticalKind::Stationary)
            .map(|(x, _)| *x)
    }
}

pub fn stationary_points(p: &SearchParams) -> Result<StationaryPoints> {
    if p.k() != 1 {
        return Err(Error::Unsupported(
            "stationary points are only available for a single marked state".into(),
        ));
    }
    let (nf, big_g) = (p.nf(), p.big_g());
    let mut points = vec![
        (1.0 / nf, CriticalKind::Minimum),
        (1.0, CriticalKind::Maximum),
    ];
    let mut blocks_peak = false;
    if big_g != 0.0 {
        let xs = (big_g - 1.0) / (nf * big_g);
        blocks_peak = xs > 1.0 / nf && xs < 1.0;
        points.push((xs, CriticalKind::Stationary));
    }
    Ok(StationaryPoints {
        points,
        blocks_peak,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_params, Coupling};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(n: usize, k: usize, big_g: f64) -> SearchParams {
        make_params(n, k, Coupling::Rescaled(big_g), 0.1).unwrap()
    }

    /// Fixed-step classical RK4 on the coupled amplitude equations with the
    /// critical hopping rate, written out independently of the crate.
    fn rk4_success(n: f64, big_g: f64, t_end: f64, h: f64) -> f64 {
        // state: (re a, im a, re b, im b), k = 1
        let f = |y: [f64; 4]| -> [f64; 4] {
            let a2 = y[0] * y[0] + y[1] * y[1];
            let b2 = y[2] * y[2] + y[3] * y[3];
            let gam = (1.0 + big_g * ((n - 1.0) * a2 - b2)) / n;
            let d11 = gam + 1.0 + big_g * (n - 1.0) * a2;
            let d22 = gam * (n - 1.0) + big_g * b2;
            let off = gam * (n - 1.0).sqrt();
            // i * (M v): (re, im) -> (-im, re)
            let ra = d11 * y[0] + off * y[2];
            let ia = d11 * y[1] + off * y[3];
            let rb = off * y[0] + d22 * y[2];
            let ib = off * y[1] + d22 * y[3];
            [-ia, ra, -ib, rb]
        };
        let mut y = [1.0 / n.sqrt(), 0.0, ((n - 1.0) / n).sqrt(), 0.0];
        let steps = (t_end / h).round() as usize;
        let h = t_end / steps as f64;
        let add = |y: [f64; 4], k: [f64; 4], s: f64| {
            [
                y[0] + s * k[0],
                y[1] + s * k[1],
                y[2] + s * k[2],
                y[3] + s * k[3],
            ]
        };
        for _ in 0..steps {
            let k1 = f(y);
            let k2 = f(add(y, k1, h / 2.0));
            let k3 = f(add(y, k2, h / 2.0));
            let k4 = f(add(y, k3, h));
            for i in 0..4 {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        y[0] * y[0] + y[1] * y[1]
    }

    #[test]
    fn critical_gamma_values() {
        for &(n, k, g) in &[(1024, 1, 1.0), (256, 4, 0.3), (50, 7, -0.01)] {
            let p = params(n, k, g);
            let x0 = k as f64 / n as f64;
            assert!((critical_gamma(&p, x0) - 1.0 / n as f64).abs() < 1e-15);
        }
        let lin = params(1024, 1, 0.0);
        for x in [0.0, 0.3, 1.0] {
            assert_eq!(critical_gamma(&lin, x), 1.0 / 1024.0);
        }
        let p = params(1024, 1, 1.0);
        assert!((critical_gamma(&p, 1.0) - 1.0).abs() < 1e-15);
        // gamma_c N = 1 - G + G N x
        for x in [0.1, 0.5, 0.9] {
            let want = (1.0 - 1.0 + 1024.0 * x) / 1024.0;
            assert!((critical_gamma(&p, x) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn linear_gap_at_critical_gamma() {
        let p = params(1024, 1, 0.0);
        let s = spectrum(&p, 1.0 / 1024.0, 1.0 / 1024.0).unwrap();
        assert!((s.gap - 0.0625).abs() < 1e-15);
        assert!((s.w_component_ratio - 1.0).abs() < 1e-12);
        assert!((s.w_component_ratio_minus + 1.0).abs() < 1e-12);
        // eigenvectors (|s> +- |w>)/norm overlap equally with |s> and |w>
        assert!((s.overlaps.w_plus - s.overlaps.s_plus).abs() < 1e-12);
        assert!(spectrum(&p, 0.0, 0.5).is_err());
        assert!(spectrum(&p, 0.1, 1.5).is_err());
    }

    #[test]
    fn spectrum_matches_paper_gap_form_for_one_marked() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.gen_range(2..5000usize) as f64;
            let big_g = rng.gen_range(-0.5..2.0);
            let gamma = rng.gen_range(1e-4..1.0);
            let x: f64 = rng.gen_range(0.0..1.0);
            let p = params(n as usize, 1, big_g);
            let s = spectrum(&p, gamma, x).unwrap();
            let delta = (n - 1.0) * x - (1.0 - x);
            let gap2 = (gamma * n - 1.0).powi(2)
                + 4.0 * gamma
                + big_g * big_g * delta * delta
                + 2.0 * big_g * delta * (1.0 - gamma * (n - 2.0));
            assert!((s.gap - gap2.sqrt()).abs() <= 1e-9 * (1.0 + s.gap));
        }
    }

    #[test]
    fn spectrum_trace_and_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(2..4096usize);
            let k = rng.gen_range(1..n.min(9));
            let big_g = rng.gen_range(-0.2..2.0);
            let gamma = rng.gen_range(1e-4..0.5);
            let x: f64 = rng.gen_range(0.0..1.0);
            let p = params(n, k, big_g);
            let s = spectrum(&p, gamma, x).unwrap();
            let (nf, kf, rf) = (n as f64, k as f64, (n - k) as f64);
            // A built from the k-marked operator in the {|w>, |r>} basis
            let a11 = gamma * kf + 1.0 + p.g() * x / kf;
            let a22 = gamma * rf + p.g() * (1.0 - x) / rf;
            let a12 = gamma * (kf * rf).sqrt();
            let tr = a11 + a22;
            let det = a11 * a22 - a12 * a12;
            let scale = 1.0 + tr.abs() + a11.abs() * a22.abs();
            assert!((s.lambda_plus + s.lambda_minus - tr).abs() < 1e-12 * scale);
            assert!((s.lambda_plus * s.lambda_minus - det).abs() < 1e-12 * scale);
            assert!(s.gap >= 0.0);
            for o in [
                s.overlaps.w_plus,
                s.overlaps.w_minus,
                s.overlaps.s_plus,
                s.overlaps.s_minus,
            ] {
                assert!((0.0..=1.0 + 1e-12).contains(&o));
            }
            let _ = nf;
        }
    }

    #[test]
    fn critical_gamma_gives_balanced_eigenvectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.gen_range(2..100_000usize);
            let big_g = rng.gen_range(0.0..3.0);
            let x: f64 = rng.gen_range(0.0..1.0);
            let p = params(n, 1, big_g);
            let s = spectrum(&p, critical_gamma(&p, x), x).unwrap();
            assert!((s.w_component_ratio - 1.0).abs() < 1e-12, "{s:?}");
        }
        // holds for several marked states too
        let p = params(300, 6, 0.4);
        let s = spectrum(&p, critical_gamma(&p, 0.7), 0.7).unwrap();
        assert!((s.w_component_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn success_probability_special_values() {
        for n in [4, 100, 1024, 1_000_000] {
            let p = params(n, 1, 1.0);
            assert!((success_probability(&p, 0.0) - 1.0 / n as f64).abs() < 1e-15);
            assert!((success_probability(&p, FRAC_PI_2) - 1.0).abs() < 1e-12);
        }
        let p = params(20, 3, 0.5);
        assert!((success_probability(&p, 0.0) - 0.15).abs() < 1e-15);
        // G = 1 simplifies to 1 / (N cos^2 t + sin^2 t)
        let p = params(4, 1, 1.0);
        let t = PI / 4.0;
        assert!((success_probability(&p, t) - 0.4).abs() < 1e-15);
        let oracle = rk4_success(4.0, 1.0, t, 1e-5);
        assert!((oracle - 0.4).abs() < 1e-10, "rk4 oracle {oracle}");
    }

    #[test]
    fn success_probability_matches_rk4_oracle() {
        for &(n, g, t) in &[
            (64.0, 0.3, 3.0),
            (1024.0, 1.0 / 1023.0, 20.0),
            (16.0, -0.02, 2.5),
        ] {
            let p = params(n as usize, 1, g);
            let oracle = rk4_success(n, g, t, 1e-4);
            assert!((success_probability(&p, t) - oracle).abs() < 1e-9);
        }
    }

    #[test]
    fn linear_limit_is_sine_law() {
        let n = 1024.0f64;
        let p = params(1024, 1, 0.0);
        let t_star = runtime(&p).unwrap();
        for i in 0..=50 {
            let t = t_star * i as f64 / 50.0;
            let arg = t / n.sqrt();
            let want = arg.sin().powi(2) + arg.cos().powi(2) / n;
            assert!((success_probability(&p, t) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn time_to_probability_inverts() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let p = params(1024, 1, 1.0 / 1023.0);
        assert_eq!(time_to_probability(&p, 1.0 / 1024.0).unwrap(), 0.0);
        assert!((time_to_probability(&p, 1.0).unwrap() - runtime(&p).unwrap()).abs() < 1e-13);
        for _ in 0..20 {
            let x = rng.gen_range(1.0 / 1024.0..1.0);
            let t = time_to_probability(&p, x).unwrap();
            assert!((success_probability(&p, t) - x).abs() < 1e-10);
        }
        assert!(time_to_probability(&p, 0.0).is_err());
        assert!(time_to_probability(&p, 1.1).is_err());

        let p4 = params(256, 4, 0.05);
        let t_star = PI * 16.0 / (2.0 * (4.0f64 * (1.0 + 0.05 * 252.0)).sqrt());
        assert!((time_to_probability(&p4, 1.0).unwrap() - t_star).abs() < 1e-12);
    }

    #[test]
    fn time_to_probability_repulsive_branches() {
        let strong = make_params(1024, 1, Coupling::Raw(-1.5), 0.1).unwrap();
        let ceiling = probability_ceiling(&strong);
        let x = 0.5;
        let t = time_to_probability(&strong, x).unwrap();
        assert!((success_probability(&strong, t) - x).abs() < 1e-12);
        assert!(time_to_probability(&strong, ceiling + 1e-6).is_err());

        let boundary = make_params(1024, 1, Coupling::Raw(-1.0), 0.1).unwrap();
        let t = time_to_probability(&boundary, 0.9).unwrap();
        assert!((success_probability(&boundary, t) - 0.9).abs() < 1e-12);
        assert!(time_to_probability(&boundary, 1.0).is_err());
    }

    #[test]
    fn runtime_values() {
        for n in [100, 1_000_000] {
            assert!((runtime(&params(n, 1, 1.0)).unwrap() - FRAC_PI_2).abs() < 1e-14);
        }
        let lin = runtime(&params(1024, 1, 0.0)).unwrap();
        assert!((lin - PI * 16.0).abs() < 1e-12);
        assert!((lin - 50.265).abs() < 1e-3);

        // G = N^{-1/2}: runtime grows as N^{1/4}
        let r = |n: usize| runtime(&params(n, 1, (n as f64).powf(-0.5))).unwrap();
        let ratio = r(1 << 22) / r(1 << 20);
        assert!((ratio - 2f64.sqrt()).abs() < 2e-3, "{ratio}");

        let edge = make_params(1024, 1, Coupling::Raw(-1.0), 0.1).unwrap();
        assert!(matches!(runtime(&edge), Err(Error::Domain { .. })));
        let neg = make_params(1024, 1, Coupling::Raw(-0.5), 0.1).unwrap();
        assert!(runtime(&neg).is_ok());
    }

    #[test]
    fn linear_width_is_root_n() {
        let p = params(1 << 20, 1, 0.0);
        let w = peak_width(&p).unwrap();
        let approx = 2.0 * ((1u64 << 20) as f64 * 0.1).sqrt();
        assert!((w.taylor_first_term / approx - 1.0).abs() < 1e-6);
        assert!(!w.extrapolated);
    }

    #[test]
    fn constant_g_width_halves() {
        let w = |n: usize| peak_width(&params(n, 1, 1.0)).unwrap().exact;
        let ratio = w(1 << 22) / w(1 << 20);
        assert!((ratio - 0.5).abs() < 1e-3, "{ratio}");
    }

    #[test]
    fn jointly_optimized_width_is_flat() {
        let w = |n: usize| {
            peak_width(&params(n, 1, (n as f64).powf(-0.5)))
                .unwrap()
                .exact
        };
        let (a, b) = (w(100), w(1000));
        assert!((a / b - 1.0).abs() < 0.15, "{a} {b}");
    }

    #[test]
    fn taylor_remainder_bounds_error() {
        for big_g in [0.0, 1.0 / 1023.0, 1.0] {
            let p = make_params(1024, 1, Coupling::Rescaled(big_g), 0.01).unwrap();
            let w = peak_width(&p).unwrap();
            assert!(
                (w.exact - w.taylor_first_term).abs() <= w.remainder_bound,
                "{w:?}"
            );
        }
        let p = make_params(1024, 4, Coupling::Rescaled(0.01), 0.01).unwrap();
        assert!(peak_width(&p).unwrap().extrapolated);
    }

    #[test]
    fn width_domain_errors() {
        let p = make_params(4, 1, Coupling::Rescaled(0.0), 0.8).unwrap();
        assert!(peak_width(&p).is_err());
        let p = make_params(1024, 1, Coupling::Raw(-2.0), 0.1).unwrap();
        assert!(peak_width(&p).is_err());
    }

    #[test]
    fn repulsive_stationary_points() {
        let n = 1024usize;
        let edge = params(n, 1, -1.0 / (n as f64 - 1.0));
        let sp = stationary_points(&edge).unwrap();
        assert!((sp.stationary().unwrap() - 1.0).abs() < 1e-12);

        let strong = make_params(n, 1, Coupling::Raw(-1.5), 0.1).unwrap();
        let sp = stationary_points(&strong).unwrap();
        let xs = sp.stationary().unwrap();
        assert!((xs - 1024.5 / 1536.0).abs() < 1e-13);
        assert!((xs - 0.667).abs() < 1e-3);
        assert!(sp.blocks_peak);
        assert!((probability_ceiling(&strong) - xs).abs() < 1e-13);

        let weak = make_params(n, 1, Coupling::Raw(-0.5), 0.1).unwrap();
        assert!(!stationary_points(&weak).unwrap().blocks_peak);

        for g in [0.01, 1.0, 10.0] {
            let sp = stationary_points(&params(n, 1, g)).unwrap();
            assert!(sp.stationary().unwrap() < 1.0 / n as f64);
            assert!(!sp.blocks_peak);
        }
        assert_eq!(
            stationary_points(&params(n, 1, 0.0)).unwrap().points.len(),
            2
        );
        assert!(matches!(
            stationary_points(&params(n, 2, 0.1)),
            Err(Error::Unsupported(_))
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn any_params() -> impl Strategy<Value = SearchParams> {
            (2usize..5000, 0.0f64..1.0, 0.0f64..3.0).prop_map(|(n, kf, g)| {
                let k = 1 + ((n - 1) as f64 * kf * 0.1) as usize;
                make_params(n, k, Coupling::Rescaled(g), 0.1).unwrap()
            })
        }

        proptest! {
            #[test]
            fn even_about_peak(p in any_params(), frac in 0.0f64..1.0) {
                let t_star = runtime(&p).unwrap();
                let s = frac * t_star;
                let (a, b) = (success_probability(&p, t_star + s), success_probability(&p, t_star - s));
                prop_assert!((a - b).abs() < 1e-12);
            }

            #[test]
            fn periodic(p in any_params(), frac in 0.0f64..4.0) {
                let t_star = runtime(&p).unwrap();
                let t = frac * t_star;
                let (a, b) = (success_probability(&p, t), success_probability(&p, t + 2.0 * t_star));
                prop_assert!((a - b).abs() < 1e-12);
            }

            #[test]
            fn bounded(p in any_params(), t in 0.0f64..100.0) {
                let x = success_probability(&p, t);
                prop_assert!(x >= p.initial_probability() - 1e-15 && x <= 1.0 + 1e-15);
            }

            #[test]
            fn runtime_decreases_with_g(n in 2usize..100_000, g1 in 0.0f64..5.0, dg in 1e-6f64..5.0) {
                let a = runtime(&make_params(n, 1, Coupling::Rescaled(g1), 0.1).unwrap()).unwrap();
                let b = runtime(&make_params(n, 1, Coupling::Rescaled(g1 + dg), 0.1).unwrap()).unwrap();
                prop_assert!(b < a);
            }

            #[test]
            fn inverse_pair(p in any_params(), frac in 0.0f64..=1.0) {
                let x0 = p.initial_probability();
                let x = x0 + frac * (1.0 - x0);
                let t = time_to_probability(&p, x).unwrap();
                prop_assert!((success_probability(&p, t) - x).abs() < 1e-10);
            }
        }
    }
}
