use std::f64::consts::PI;
use std::path::Path;

use gpsearch_core::analytic::{
    critical_gamma, peak_width, runtime, spectrum, success_probability, time_to_probability,
};
use gpsearch_core::dynamics::{
    integrate_decoupled, integrate_full, integrate_reduced, verify_identities,
};
use gpsearch_core::resources::{
    fit_scaling_exponent, kappa_grid, log_simplex_volume, marked_count, optimize_kappa,
    profile_from_params, resource_profile, zalka_lower_bound, ResourceProfile,
};
use gpsearch_core::{
    make_params, Coupling, GammaPolicy, IntegratorConfig, Sampler, Schedule, SearchParams,
};
use rayon::prelude::*;

use crate::args::{
    AnalyticQuery, CouplingArgs, Engine, OutputArgs, OutputFormat, ProblemArgs, ResourcesArgs,
    SimulateArgs, SweepArgs, VerifyArgs,
};
use crate::error::CliError;
use crate::parse::{GammaSpec, TEnd};
use crate::svg::Chart;
use crate::table::{emit, Cell, Format, Table};

type Result<T> = std::result::Result<T, CliError>;

const MAX_SWEEP_THREADS: usize = 8;

fn size(n: u64) -> Result<usize> {
    usize::try_from(n)
        .map_err(|_| CliError::Usage(format!("N = {n} does not fit in memory indices")))
}

fn coupling(c: &CouplingArgs) -> Option<Coupling> {
    match (c.g, c.big_g) {
        (Some(g), _) => Some(Coupling::Raw(g)),
        (_, Some(big)) => Some(Coupling::Rescaled(big)),
        _ => None,
    }
}

/// Without a coupling flag the search is linear.
fn params(p: &ProblemArgs) -> Result<SearchParams> {
    let c = coupling(&p.coupling).unwrap_or(Coupling::Raw(0.0));
    Ok(make_params(size(p.n)?, p.k, c, p.eps)?)
}

fn chart_or_csv(output: &OutputArgs, chart: impl FnOnce() -> Chart) -> Format {
    match output.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Svg => Format::Svg(chart()),
    }
}

fn csv_only(output: &OutputArgs, what: &str) -> Result<Format> {
    match output.format {
        OutputFormat::Csv => Ok(Format::Csv),
        OutputFormat::Svg => Err(CliError::Usage(format!(
            "{what} has no chart; use --format csv"
        ))),
    }
}

fn sampled(rel_tol: f64, samples: usize) -> IntegratorConfig {
    IntegratorConfig::default()
        .with_tolerances(rel_tol, rel_tol * 1e-2)
        .with_sampler(Sampler::Uniform { points: samples })
}

pub fn read_schedule(path: &Path) -> Result<Schedule> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut knots = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let parsed: Option<(f64, f64)> = match (record.get(0), record.get(1), record.len()) {
            (Some(t), Some(g), 2) => t.parse().ok().zip(g.parse().ok()),
            _ => None,
        };
        match parsed {
            Some(knot) => knots.push(knot),
            None if line == 0 => continue,
            None => {
                return Err(CliError::Usage(format!(
                    "{}: line {} is not a (t, gamma) pair",
                    path.display(),
                    line + 1
                )))
            }
        }
    }
    Ok(Schedule::new(knots)?)
}

fn policy(spec: &GammaSpec, p: &SearchParams) -> Result<GammaPolicy> {
    Ok(match spec {
        GammaSpec::Critical => GammaPolicy::Critical,
        GammaSpec::Constant(v) => GammaPolicy::constant(*v)?,
        GammaSpec::InverseN => GammaPolicy::constant(1.0 / p.n() as f64)?,
        GammaSpec::File(path) => GammaPolicy::Schedule(read_schedule(path)?),
    })
}

/// `2t*` under critical γ, `π√N` otherwise. A critical run with no peak
/// gets two linear periods to approach its ceiling.
fn auto_t_end(p: &SearchParams, policy: &GammaPolicy) -> f64 {
    let period = PI * (p.n() as f64).sqrt();
    if policy.is_critical() {
        runtime(p).map(|t| 2.0 * t).unwrap_or(2.0 * period)
    } else {
        period
    }
}

pub fn simulate(a: &SimulateArgs) -> Result<()> {
    let p = params(&a.problem)?;
    let policy = policy(&a.gamma, &p)?;
    let t_end = match a.t_end {
        TEnd::At(t) => t,
        TEnd::Auto => auto_t_end(&p, &policy),
    };
    if a.samples < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    if a.compare_analytic && !policy.is_critical() {
        return Err(CliError::Usage(
            "--compare-analytic needs --gamma critical".into(),
        ));
    }
    let cfg = sampled(a.tol, a.samples);

    let mut header = vec!["t", "x", "gamma", "norm_residual"];
    let (times, xs, gammas, residuals, leakage) = match a.engine {
        Engine::Reduced => {
            let tr = integrate_reduced(&p, &policy, t_end, &cfg)?;
            (tr.times, tr.x, tr.gamma, tr.norm_residual, None)
        }
        Engine::Full => {
            let marked = a.marked.clone().unwrap_or_else(|| (0..p.k()).collect());
            let run = integrate_full(&p, &marked, &policy, t_end, &cfg)?;
            let tr = run.trajectory;
            (
                tr.times,
                tr.x,
                tr.gamma,
                tr.norm_residual,
                Some(run.leakage),
            )
        }
        Engine::Decoupled => {
            if !policy.is_critical() {
                return Err(CliError::Usage(
                    "the decoupled engine needs --gamma critical".into(),
                ));
            }
            let tr = integrate_decoupled(&p, t_end, &cfg)?;
            let gammas = tr.x.iter().map(|&x| critical_gamma(&p, x)).collect();
            (tr.times, tr.x, gammas, tr.invariant_residual, None)
        }
    };
    if leakage.is_some() {
        header.push("leakage");
    }
    if a.compare_analytic {
        header.extend(["x_closed", "residual"]);
    }
    let mut table = Table::new(header);
    for i in 0..times.len() {
        let mut row: Vec<Cell> = vec![
            times[i].into(),
            xs[i].into(),
            gammas[i].into(),
            residuals[i].into(),
        ];
        if let Some(l) = &leakage {
            row.push(l[i].into());
        }
        if a.compare_analytic {
            let closed = success_probability(&p, times[i]);
            row.extend([Cell::Real(closed), Cell::Real(xs[i] - closed)]);
        }
        table.push(row);
    }
    let series: &[&str] = if a.compare_analytic {
        &["x", "x_closed"]
    } else {
        &["x"]
    };
    let format = chart_or_csv(&a.output, || {
        Chart::new(
            format!("success probability, N = {}, k = {}", p.n(), p.k()),
            "t",
            series,
        )
    });
    emit(&table, format, a.output.out.as_deref())
}

pub fn analytic(q: &AnalyticQuery) -> Result<()> {
    match q {
        AnalyticQuery::XOfT { problem, t, output } => {
            if !(t.is_finite() && *t >= 0.0) {
                return Err(CliError::Usage(format!(
                    "--t must be non-negative, got {t}"
                )));
            }
            let p = params(problem)?;
            let mut table = Table::new(["t", "x"]);
            table.push(vec![(*t).into(), success_probability(&p, *t).into()]);
            emit(&table, csv_only(output, "x-of-t")?, output.out.as_deref())
        }
        AnalyticQuery::TOfX { problem, x, output } => {
            let p = params(problem)?;
            let mut table = Table::new(["x", "t"]);
            table.push(vec![(*x).into(), time_to_probability(&p, *x)?.into()]);
            emit(&table, csv_only(output, "t-of-x")?, output.out.as_deref())
        }
        AnalyticQuery::Runtime { problem, output } => {
            let p = params(problem)?;
            let mut table = Table::new(["t_star"]);
            table.push(vec![runtime(&p)?.into()]);
            emit(&table, csv_only(output, "runtime")?, output.out.as_deref())
        }
        AnalyticQuery::Width { problem, output } => {
            let p = params(problem)?;
            let w = peak_width(&p)?;
            let mut table = Table::new([
                "eps",
                "exact",
                "taylor_first_term",
                "remainder_bound",
                "extrapolated",
            ]);
            table.push(vec![
                p.epsilon().into(),
                w.exact.into(),
                w.taylor_first_term.into(),
                w.remainder_bound.into(),
                u64::from(w.extrapolated).into(),
            ]);
            emit(&table, csv_only(output, "width")?, output.out.as_deref())
        }
        AnalyticQuery::Spectrum {
            problem,
            x,
            gamma_range,
            output,
        } => {
            let p = params(problem)?;
            let x = x.unwrap_or_else(|| p.initial_probability());
            let mut table = Table::new([
                "gamma",
                "lambda_plus",
                "lambda_minus",
                "gap",
                "w_component_ratio",
                "w_plus",
                "w_minus",
                "s_plus",
                "s_minus",
            ]);
            for gamma in gamma_range.values() {
                let s = spectrum(&p, gamma, x)?;
                table.push(vec![
                    gamma.into(),
                    s.lambda_plus.into(),
                    s.lambda_minus.into(),
                    s.gap.into(),
                    s.w_component_ratio.into(),
                    s.overlaps.w_plus.into(),
                    s.overlaps.w_minus.into(),
                    s.overlaps.s_plus.into(),
                    s.overlaps.s_minus.into(),
                ]);
            }
            let format = chart_or_csv(output, || {
                Chart::new(
                    format!("eigenvalue gap, N = {}, x = {x:.6}", p.n()),
                    "gamma",
                    &["gap"],
                )
            });
            emit(&table, format, output.out.as_deref())
        }
    }
}

fn sweep_row(a: &SweepArgs, n: u64) -> Result<ResourceProfile> {
    let k = match (a.k, a.lambda) {
        (Some(k), _) => k,
        (None, Some(l)) => {
            if !(0.0..=1.0).contains(&l) {
                return Err(CliError::Usage(format!(
                    "--lambda must be in [0, 1], got {l}"
                )));
            }
            marked_count(n, l) as usize
        }
        (None, None) => 1,
    };
    let c = match (a.kappa, coupling(&a.coupling)) {
        (Some(kappa), _) => Coupling::Rescaled((n as f64).powf(kappa)),
        (None, Some(c)) => c,
        (None, None) => return Err(CliError::Usage("sweep needs --kappa, --g or --G".into())),
    };
    let p = make_params(size(n)?, k, c, a.eps)?;
    Ok(profile_from_params(&p, a.clock_constant)?)
}

const SWEEP_COLUMNS: [&str; 8] = [
    "n",
    "k",
    "G",
    "t_star",
    "delta_t",
    "n_clock",
    "space",
    "st_product",
];
const FIT_COLUMNS: [&str; 4] = ["t_star", "delta_t", "n_clock", "st_product"];

pub fn sweep(a: &SweepArgs) -> Result<()> {
    let sizes = a
        .n_range
        .clone()
        .map(|s| s.0)
        .unwrap_or_else(|| a.n.clone());
    let threads = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(MAX_SWEEP_THREADS);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let rows: Vec<ResourceProfile> = pool.install(|| {
        sizes
            .par_iter()
            .map(|&n| sweep_row(a, n))
            .collect::<Result<_>>()
    })?;

    let mut table = Table::new(SWEEP_COLUMNS);
    for r in &rows {
        table.push(vec![
            r.n.into(),
            r.k.into(),
            r.big_g.into(),
            r.t_star.into(),
            r.delta_t.into(),
            r.n_clock.into(),
            r.space.into(),
            r.st_product.into(),
        ]);
    }
    if a.fit {
        let ns = table.column("n").unwrap_or_default();
        for name in FIT_COLUMNS {
            let ys = table.column(name).unwrap_or_default();
            let points: Vec<(f64, f64)> = ns.iter().copied().zip(ys).collect();
            let fit = fit_scaling_exponent(&points)?;
            eprintln!(
                "fit {name}: exponent {:.6} r2 {:.6}",
                fit.exponent, fit.r_squared
            );
        }
    }
    let format = chart_or_csv(&a.output, || {
        Chart::new("runtime and peak width", "n", &["t_star", "delta_t"]).log_log()
    });
    emit(&table, format, a.output.out.as_deref())
}

pub fn resources(a: &ResourcesArgs) -> Result<()> {
    let format = csv_only(&a.output, "resources")?;
    let profile = if a.optimize {
        let grid = kappa_grid(a.grid.start, a.grid.stop, a.grid.step)?;
        Some(optimize_kappa(a.n, a.lambda, &grid, a.eps, a.clock_constant)?.1)
    } else if let Some(kappa) = a.kappa {
        Some(resource_profile(
            a.n,
            a.lambda,
            kappa,
            a.eps,
            a.clock_constant,
        )?)
    } else {
        None
    };
    if profile.is_none() && (a.zalka || !a.simplex) {
        return Err(CliError::Usage("need --kappa or --optimize".into()));
    }

    let mut header: Vec<&str> = vec!["n"];
    let mut row: Vec<Cell> = vec![a.n.into()];
    if let Some(r) = &profile {
        header.extend([
            "k",
            "lambda",
            "kappa",
            "G",
            "t_star",
            "delta_t",
            "n_clock",
            "qubits",
            "space",
            "st_product",
        ]);
        row.extend::<[Cell; 10]>([
            r.k.into(),
            r.lambda_exp.into(),
            r.kappa.into(),
            r.big_g.into(),
            r.t_star.into(),
            r.delta_t.into(),
            r.n_clock.into(),
            r.qubits.into(),
            r.space.into(),
            r.st_product.into(),
        ]);
        if a.zalka {
            header.push("zalka_bound");
            row.push(zalka_lower_bound(a.n, r.kappa)?.into());
        }
    }
    if a.simplex {
        header.push("log_simplex_volume");
        row.push(log_simplex_volume(a.n)?.into());
    }
    let mut table = Table::new(header);
    table.push(row);
    emit(&table, format, a.output.out.as_deref())
}

pub fn verify(a: &VerifyArgs) -> Result<()> {
    let format = csv_only(&a.output, "verify")?;
    let p = params(&a.problem)?;
    let t_end = match a.t_end {
        TEnd::At(t) => t,
        TEnd::Auto => runtime(&p)?,
    };
    let cfg = IntegratorConfig::default()
        .with_tolerances(1e-12, 1e-14)
        .with_sampler(Sampler::Uniform {
            points: a.samples.max(2),
        });
    let traj = integrate_reduced(&p, &GammaPolicy::Critical, t_end, &cfg)?;
    let report = verify_identities(&traj, &p)?;
    let entries = report.entries();
    let mut table = Table::new(entries.iter().map(|(name, _)| *name));
    table.push(entries.iter().map(|(_, v)| Cell::Real(*v)).collect());
    emit(&table, format, a.output.out.as_deref())?;
    let failed = report.failures(a.tol);
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(
            failed
                .into_iter()
                .map(|name| format!("{name} >= {}", a.tol))
                .collect(),
        ))
    }
}
