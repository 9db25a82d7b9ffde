//! Space and time accounting for the nonlinear search.
//!
//! With `G = N^kappa` and `k = N^lambda` marked states, an entangled clock
//! of `n_clock` ions resolves times down to `1/n_clock`, so it needs about
//! `1/Δt` ions to catch the peak. "Space" is those ions plus the `log2 N`
//! qubits holding the search register.

use statrs::function::gamma::ln_gamma;

use crate::analytic::{peak_width, runtime};
use crate::error::{Error, Result};
use crate::model::{make_params, Coupling, SearchParams};

/// One peak width per clock tick.
pub const DEFAULT_CLOCK_CONSTANT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceProfile {
    pub n: u64,
    pub k: u64,
    pub kappa: f64,
    pub lambda_exp: f64,
    pub big_g: f64,
    pub t_star: f64,
    pub delta_t: f64,
    pub n_clock: u64,
    pub qubits: f64,
    pub space: f64,
    pub st_product: f64,
}

/// `k = round(N^lambda)` clamped to `[1, N - 1]`.
pub fn marked_count(n: u64, lambda_exp: f64) -> u64 {
    let k = (n as f64).powf(lambda_exp).round();
    (k as u64).clamp(1, n - 1)
}

pub fn resource_profile(
    n: u64,
    lambda_exp: f64,
    kappa: f64,
    epsilon: f64,
    clock_constant: f64,
) -> Result<ResourceProfile> {
    if n < 2 {
        return Err(Error::domain("n", format!("need N >= 2, got {n}")));
    }
    if !(0.0..=1.0).contains(&lambda_exp) {
        return Err(Error::domain(
            "lambda",
            format!("need 0 <= lambda <= 1, got {lambda_exp}"),
        ));
    }
    if !kappa.is_finite() {
        return Err(Error::domain("kappa", format!("not finite: {kappa}")));
    }
    if !(clock_constant > 0.0 && clock_constant.is_finite()) {
        return Err(Error::domain(
            "clock_constant",
            format!("must be positive, got {clock_constant}"),
        ));
    }
    let k = marked_count(n, lambda_exp);
    let big_g = (n as f64).powf(kappa);
    let params = make_params(n as usize, k as usize, Coupling::Rescaled(big_g), epsilon)?;
    let mut prof = profile_from_params(&params, clock_constant)?;
    prof.kappa = kappa;
    prof.lambda_exp = lambda_exp;
    Ok(prof)
}

/// Profile for explicit parameters. `kappa` is `log_N G`, which is `-inf`
/// at `G = 0` and NaN for repulsive couplings.
pub fn profile_from_params(p: &SearchParams, clock_constant: f64) -> Result<ResourceProfile> {
    if !(clock_constant > 0.0 && clock_constant.is_finite()) {
        return Err(Error::domain(
            "clock_constant",
            format!("must be positive, got {clock_constant}"),
        ));
    }
    let nf = p.n() as f64;
    let big_g = p.big_g();
    let t_star = runtime(p)?;
    let delta_t = peak_width(p)?.exact;
    let n_clock = ((clock_constant / delta_t).ceil() as u64).max(1);
    let qubits = nf.log2();
    let space = n_clock as f64 + qubits;
    let kappa = if big_g == 0.0 {
        f64::NEG_INFINITY
    } else {
        big_g.ln() / nf.ln()
    };
    Ok(ResourceProfile {
        n: p.n() as u64,
        k: p.k() as u64,
        kappa,
        lambda_exp: (p.k() as f64).ln() / nf.ln(),
        big_g,
        t_star,
        delta_t,
        n_clock,
        qubits,
        space,
        st_product: space * t_star,
    })
}

/// Grid point minimizing the space-time product; ties go to the smaller κ.
pub fn optimize_kappa(
    n: u64,
    lambda_exp: f64,
    kappa_grid: &[f64],
    epsilon: f64,
    clock_constant: f64,
) -> Result<(f64, ResourceProfile)> {
    if kappa_grid.is_empty() {
        return Err(Error::domain("kappa_grid", "grid is empty"));
    }
    if let Some(bad) = kappa_grid.iter().find(|k| !(-1.0..=0.0).contains(*k)) {
        return Err(Error::domain(
            "kappa_grid",
            format!("{bad} outside [-1, 0]"),
        ));
    }
    let mut best: Option<ResourceProfile> = None;
    for &kappa in kappa_grid {
        let prof = resource_profile(n, lambda_exp, kappa, epsilon, clock_constant)?;
        best = match best {
            Some(b)
                if b.st_product < prof.st_product
                    || (b.st_product == prof.st_product && b.kappa <= prof.kappa) =>
            {
                Some(b)
            }
            _ => Some(prof),
        };
    }
    let best = best.expect("grid is nonempty");
    Ok((best.kappa, best))
}

/// Points `start, start + step, ...` up to `stop` inclusive.
pub fn kappa_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) {
        return Err(Error::domain(
            "grid",
            format!("bad grid {start}:{stop}:{step}"),
        ));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| {
            let v = start + step * i as f64;
            // snap to the step's decimal resolution
            (v / step).round() * step
        })
        .map(|v| v.clamp(start, stop))
        .collect())
}

/// Lower bound on the particle number from space x time^2 >= N, with
/// `N_0 log2 N` space and the runtime at `G = N^kappa`.
pub fn zalka_lower_bound(n: u64, kappa: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("n", format!("need N >= 2, got {n}")));
    }
    if !(-1.0..=0.0).contains(&kappa) {
        return Err(Error::domain(
            "kappa",
            format!("need -1 <= kappa <= 0, got {kappa}"),
        ));
    }
    let nf = n as f64;
    let params = make_params(n as usize, 1, Coupling::Rescaled(nf.powf(kappa)), 0.1)?;
    let t_star = runtime(&params)?;
    Ok((nf / (nf.log2() * t_star * t_star)).max(1.0))
}

/// Natural log of the volume `sqrt(N / 2^(N-1)) / (N-1)!` of the unit-edge
/// regular simplex on `N` vertices.
pub fn log_simplex_volume(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("n", format!("need N >= 2, got {n}")));
    }
    let nf = n as f64;
    Ok(0.5 * nf.ln() - 0.5 * (nf - 1.0) * std::f64::consts::LN_2 - ln_gamma(nf))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub exponent: f64,
    pub r_squared: f64,
}

/// Least-squares slope of `ln value` against `ln N`.
pub fn fit_scaling_exponent(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: points.len(),
        });
    }
    if let Some(&(n, v)) = points.iter().find(|(n, v)| !(*n > 0.0 && *v > 0.0)) {
        return Err(Error::domain(
            "points",
            format!("non-positive point ({n}, {v})"),
        ));
    }
    let m = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|(n, v)| (n.ln(), v.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx <= f64::EPSILON * m * mx.abs().max(1.0) {
        return Err(Error::domain("points", "all N are equal"));
    }
    let exponent = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    Ok(ScalingFit {
        exponent,
        r_squared,
    })
}
