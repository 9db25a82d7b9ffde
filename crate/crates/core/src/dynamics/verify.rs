//! Residuals of the exact identities satisfied by a critical-γ trajectory
//! with one marked state.
//!
//! With `y + i z = alpha conj(beta)`:
//!
//! * `y = (1 - x) / sqrt(N - 1)`
//! * `z = (dx/dt) / (2 gamma_c sqrt(N - 1))`
//! * `x'' = N G (x')^2 / (1 - G + N G x) + 2 (1 - G + N G x)^2 (1 + N - 2 N x) / N^2`
//! * `x(t) = sin^2(tau / sqrt N) + cos^2(tau / sqrt N) / N` with
//!   `tau(t) = int_0^t gamma_c N`.
//!
//! Derivatives are centered differences, so the samples must be uniform.

use crate::error::{Error, Result};
use crate::model::{critical_gamma_from_populations, SearchParams, Trajectory};

pub const MIN_VERIFY_SAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VerificationReport {
    pub max_norm_residual: f64,
    pub max_subspace_leakage: f64,
    pub max_y_identity_residual: f64,
    pub max_z_identity_residual: f64,
    pub max_uncoupled_residual: f64,
    pub max_rescaled_time_residual: f64,
}

impl VerificationReport {
    pub fn entries(&self) -> [(&'static str, f64); 6] {
        [
            ("norm", self.max_norm_residual),
            ("subspace_leakage", self.max_subspace_leakage),
            ("y_identity", self.max_y_identity_residual),
            ("z_identity", self.max_z_identity_residual),
            ("uncoupled_second_order", self.max_uncoupled_residual),
            ("rescaled_time", self.max_rescaled_time_residual),
        ]
    }

    /// Names of the residuals that are not below `tol`.
    pub fn failures(&self, tol: f64) -> Vec<&'static str> {
        self.entries()
            .into_iter()
            .filter(|(_, v)| !(*v < tol))
            .map(|(name, _)| name)
            .collect()
    }
}

pub fn verify_identities(traj: &Trajectory, p: &SearchParams) -> Result<VerificationReport> {
    if p.k() != 1 {
        return Err(Error::Unsupported(
            "identity verification is derived for a single marked state".into(),
        ));
    }
    let len = traj.len();
    if len < MIN_VERIFY_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_VERIFY_SAMPLES,
            got: len,
        });
    }
    let h = (traj.times[len - 1] - traj.times[0]) / (len - 1) as f64;
    for (i, w) in traj.times.windows(2).enumerate() {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h {
            return Err(Error::domain(
                "trajectory",
                format!("samples are not uniform near index {i}"),
            ));
        }
    }
    for (i, (s, &g)) in traj.states.iter().zip(&traj.gamma).enumerate() {
        let gc = critical_gamma_from_populations(p, s.alpha.norm_sqr(), s.beta.norm_sqr());
        if (gc - g).abs() > 1e-12 * (1.0 + g.abs()) {
            return Err(Error::domain(
                "trajectory",
                format!("gamma at sample {i} is not the critical value"),
            ));
        }
    }

    let nf = p.nf();
    let big_g = p.big_g();
    let root = (nf - 1.0).sqrt();
    let x = &traj.x;
    let mut report = VerificationReport {
        max_norm_residual: traj.max_norm_residual(),
        ..VerificationReport::default()
    };

    for (s, &xi) in traj.states.iter().zip(x) {
        let y = (s.alpha * s.beta.conj()).re;
        report.max_y_identity_residual = report
            .max_y_identity_residual
            .max((y - (1.0 - xi) / root).abs());
    }

    for i in 1..len - 1 {
        let rate = (x[i + 1] - x[i - 1]) / (2.0 * h);
        let accel = (x[i + 1] - 2.0 * x[i] + x[i - 1]) / (h * h);
        let gamma = traj.gamma[i];
        let s = &traj.states[i];
        let z = (s.alpha * s.beta.conj()).im;
        report.max_z_identity_residual = report
            .max_z_identity_residual
            .max((z - rate / (2.0 * gamma * root)).abs());

        let scale = 1.0 - big_g + nf * big_g * x[i];
        let rhs = nf * big_g / scale * rate * rate
            + 2.0 / (nf * nf) * scale * scale * (1.0 + nf - 2.0 * nf * x[i]);
        report.max_uncoupled_residual = report.max_uncoupled_residual.max((accel - rhs).abs());
    }

    let mut tau = 0.0;
    let mut prev_gamma = None;
    for (&xi, &gamma) in x.iter().zip(&traj.gamma) {
        if let Some(prev) = prev_gamma {
            tau += 0.5 * h * nf * (gamma + prev);
        }
        prev_gamma = Some(gamma);
        let phase = tau / nf.sqrt();
        let law = phase.sin().powi(2) + phase.cos().powi(2) / nf;
        report.max_rescaled_time_residual = report.max_rescaled_time_residual.max((xi - law).abs());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::runtime;
    use crate::dynamics::{integrate_reduced, IntegratorConfig, Sampler};
    use crate::model::{make_params, Coupling, GammaPolicy};

    fn run(g: f64, points: usize) -> (SearchParams, Trajectory) {
        let p = make_params(1024, 1, Coupling::Raw(g), 0.1).unwrap();
        let t_star = runtime(&p).unwrap();
        let cfg = IntegratorConfig::default()
            .with_tolerances(1e-12, 1e-14)
            .with_sampler(Sampler::Uniform { points });
        let traj = integrate_reduced(&p, &GammaPolicy::Critical, t_star, &cfg).unwrap();
        (p, traj)
    }

    #[test]
    fn attractive_run_satisfies_identities() {
        let (p, traj) = run(1.0, 2001);
        let r = verify_identities(&traj, &p).unwrap();
        assert!(r.failures(1e-5).is_empty(), "{r:?}");
    }

    #[test]
    fn linear_run_is_unrescaled() {
        let (p, traj) = run(0.0, 2001);
        let r = verify_identities(&traj, &p).unwrap();
        assert!(r.max_rescaled_time_residual < 1e-8, "{r:?}");
    }

    #[test]
    fn too_few_samples() {
        let (p, traj) = run(1.0, 3);
        assert_eq!(
            verify_identities(&traj, &p),
            Err(Error::InsufficientSamples { needed: 5, got: 3 })
        );
    }

    #[test]
    fn detects_non_critical_and_non_uniform_input() {
        let p = make_params(1024, 1, Coupling::Raw(1.0), 0.1).unwrap();
        let cfg = IntegratorConfig::default().with_sampler(Sampler::Uniform { points: 11 });
        let constant = integrate_reduced(&p, &GammaPolicy::Constant(0.5), 5.0, &cfg).unwrap();
        assert!(verify_identities(&constant, &p).is_err());

        let steps = IntegratorConfig::default().with_sampler(Sampler::Steps);
        let ragged = integrate_reduced(&p, &GammaPolicy::Critical, 5.0, &steps).unwrap();
        assert!(verify_identities(&ragged, &p).is_err());

        let p2 = make_params(1024, 2, Coupling::Raw(1.0), 0.1).unwrap();
        assert!(matches!(
            verify_identities(&constant, &p2),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn corrupted_trajectory_is_flagged() {
        let (p, mut traj) = run(1.0, 401);
        traj.x[200] += 1e-3;
        let r = verify_identities(&traj, &p).unwrap();
        assert!(!r.failures(1e-5).is_empty());
    }
}
