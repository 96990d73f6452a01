//! Subcommand bodies. Each returns the text to emit and whether a mode was found.

use anyhow::{bail, Context, Result};
use guidetrap::asymptotics::{critical_offset, symmetry_class};
use guidetrap::contour::{build_contour, Symmetry};
use guidetrap::neumann_bem::dipole_strengths;
use guidetrap::oracle::{
    fixtures, ft_identity_check, mu_richardson, perturbed_circle_series, singular_value_scan, Fixture,
};
use guidetrap::secular::{solve_discrete_sigma, solve_embedded, FieldGrid};
use guidetrap::{ContourSpec, ModeFamily, SolveOptions, SpectralResult, WaveguideGeometry};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, RunConfig, SweepParam};
use crate::output::{csv, json, num, Provenance};

pub struct Outcome {
    pub body: String,
    /// `Some(false)` when the run ended in a nonexistence verdict.
    pub mode_found: Option<bool>,
    /// `false` when a validation check failed or nothing could be produced.
    pub ok: bool,
    /// Diagnostic for standard error.
    pub note: Option<String>,
}

impl Outcome {
    fn plain(body: String) -> Self {
        Outcome { body, mode_found: None, ok: true, note: None }
    }
}

fn contour(cfg: &RunConfig) -> Result<ContourSpec> {
    cfg.contour.to_spec::<f64>().context("contour")
}

#[derive(Serialize)]
struct DipoleReport {
    #[serde(rename = "S")]
    s: f64,
    mu: f64,
    nu: f64,
    a_star0: f64,
    b: f64,
    mu_trace_form: f64,
    nu_trace_form: f64,
    symmetry: Symmetry,
    n_nodes: usize,
}

pub fn dipole(cfg: &RunConfig) -> Result<Outcome> {
    let spec = contour(cfg)?;
    let c = build_contour(&spec, cfg.solver.n_nodes)?;
    let d = dipole_strengths(&c)?;
    let b = cfg.b();
    let report = DipoleReport {
        s: d.s,
        mu: d.mu,
        nu: d.nu,
        a_star0: critical_offset(&d, b),
        b,
        mu_trace_form: d.mu_trace_form,
        nu_trace_form: d.nu_trace_form,
        symmetry: symmetry_class(&c),
        n_nodes: c.n_nodes,
    };
    Ok(Outcome::plain(json(&report, &Provenance::new("dipole", cfg, &spec)?)?))
}

fn solve(cfg: &RunConfig, family: ModeFamily, spec: &ContourSpec) -> Result<SpectralResult> {
    let eps = cfg.require_eps()?;
    let r = match family {
        ModeFamily::Discrete => {
            let g = WaveguideGeometry::new(cfg.b(), cfg.require_a()?, eps);
            solve_discrete_sigma(spec, &g, &cfg.solver)?
        }
        ModeFamily::Embedded => solve_embedded(spec, &WaveguideGeometry::new(cfg.b(), 0.0, eps), &cfg.solver)?,
    };
    Ok(r)
}

fn annotated(command: &str, cfg: &RunConfig, spec: &ContourSpec, r: &SpectralResult) -> Result<Provenance> {
    let mut prov = Provenance::new(command, cfg, spec)?;
    prov.p_nodes = r.system.as_ref().map(|s| s.pgrid.len());
    prov.iterations = Some(r.iterations);
    prov.outer_iterations = Some(r.outer_iterations);
    Ok(prov)
}

pub fn spectral(cfg: &RunConfig, family: ModeFamily) -> Result<Outcome> {
    let spec = contour(cfg)?;
    let mut r = solve(cfg, family, &spec)?;
    let command = match family {
        ModeFamily::Discrete => "discrete",
        ModeFamily::Embedded => "embedded",
    };
    let prov = annotated(command, cfg, &spec, &r)?;
    if !cfg.output.traces {
        r.traces = None;
    }
    Ok(Outcome { body: json(&r, &prov)?, mode_found: Some(r.exists), ok: true, note: None })
}

#[derive(Serialize)]
struct SweepRow {
    param: f64,
    sigma: f64,
    k_squared: f64,
    exists: bool,
    residual: f64,
    iterations: usize,
}

#[derive(Serialize)]
struct SweepReport<'a> {
    param: SweepParam,
    family: ModeFamily,
    rows: &'a [SweepRow],
}

/// Worker count for sweeps: GUIDETRAP_THREADS if set, otherwise rayon's default.
fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("GUIDETRAP_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("GUIDETRAP_THREADS = {v:?} is not a count"))?;
        builder = builder.num_threads(n.max(1));
    }
    Ok(builder.build()?)
}

pub fn sweep(cfg: &RunConfig) -> Result<Outcome> {
    let spec = contour(cfg)?;
    let family = cfg.family.unwrap_or(ModeFamily::Discrete);
    let param = cfg.sweep.param.context("sweep needs a parameter (--param a|eps or [sweep] param)")?;
    if family == ModeFamily::Embedded && param == SweepParam::A {
        bail!("embedded modes solve for a; sweep eps instead");
    }
    let values = cfg.sweep_values()?;
    let pool = thread_pool()?;
    let solved: Vec<Result<SweepRow>> = pool.install(|| {
        values
            .par_iter()
            .map(|&v| {
                let mut local = cfg.clone();
                match param {
                    SweepParam::A => local.geometry.a = Some(v),
                    SweepParam::Eps => local.geometry.eps = Some(v),
                }
                let r = solve(&local, family, &spec).with_context(|| format!("{param:?} = {v}"))?;
                Ok(SweepRow {
                    param: v,
                    sigma: r.sigma,
                    k_squared: r.k_squared,
                    exists: r.exists,
                    residual: r.residual,
                    iterations: r.iterations,
                })
            })
            .collect()
    });
    let mut rows = solved.into_iter().collect::<Result<Vec<_>>>()?;
    rows.sort_by(|x, y| x.param.total_cmp(&y.param));
    let body = match cfg.output.format.unwrap_or(Format::Csv) {
        Format::Csv => csv(
            &["param", "sigma", "k_squared", "exists", "residual", "iterations"],
            rows.iter().map(|r| {
                vec![
                    num(r.param),
                    num(r.sigma),
                    num(r.k_squared),
                    r.exists.to_string(),
                    num(r.residual),
                    r.iterations.to_string(),
                ]
            }),
        ),
        Format::Json => json(&SweepReport { param, family, rows: &rows }, &Provenance::new("sweep", cfg, &spec)?)?,
    };
    let found = rows.iter().any(|r| r.exists);
    Ok(Outcome { body, mode_found: Some(found), ok: true, note: None })
}

#[derive(Serialize)]
struct FieldReport<'a> {
    sigma: f64,
    k_squared: f64,
    a_solved: f64,
    field: &'a guidetrap::FieldSamples,
}

pub fn field(cfg: &RunConfig) -> Result<Outcome> {
    let spec = contour(cfg)?;
    let family = cfg.family.unwrap_or(ModeFamily::Discrete);
    let r = solve(cfg, family, &spec)?;
    if !r.exists {
        // Nothing to sample: the caller maps this to exit 2 under --require-mode, else to an error.
        let reason = r.reason.map_or("unknown", |c| c.code());
        return Ok(Outcome { body: String::new(), mode_found: Some(false), ok: false, note: Some(no_mode(reason)) });
    }
    let b = cfg.b();
    let xi = cfg.field.xi.unwrap_or((-3.0 * b, 3.0 * b, 61));
    let eta = cfg.field.eta.unwrap_or((-b, b, 21));
    let samples = r.field(&FieldGrid::uniform(xi, eta))?;
    let body = match cfg.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut rows = Vec::with_capacity(samples.u.len());
            for (i, &y) in samples.eta.iter().enumerate() {
                for (j, &x) in samples.xi.iter().enumerate() {
                    let u = samples.get(i, j);
                    rows.push(vec![
                        num(x),
                        num(y),
                        u.map_or(String::new(), |u| num(u.re)),
                        u.map_or(String::new(), |u| num(u.im)),
                        u.is_some().to_string(),
                    ]);
                }
            }
            csv(&["xi", "eta", "u_re", "u_im", "valid"], rows)
        }
        Format::Json => json(
            &FieldReport { sigma: r.sigma, k_squared: r.k_squared, a_solved: r.a_solved, field: &samples },
            &annotated("field", cfg, &spec, &r)?,
        )?,
    };
    Ok(Outcome { body, mode_found: Some(true), ok: true, note: None })
}

fn no_mode(reason: &str) -> String {
    format!("no trapped mode to reconstruct (reason: {reason})")
}

#[derive(Serialize)]
struct Check {
    name: String,
    value: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct ValidationReport<'a> {
    pass: bool,
    checks: &'a [Check],
    fixtures: &'a [Fixture],
}

fn check(name: impl Into<String>, value: f64, tolerance: f64) -> Check {
    Check { name: name.into(), value, tolerance, pass: value <= tolerance }
}

/// Oracle suite: converged dipole values, series, transform identities and the scan-versus-fixed-
/// point agreement; optionally compared with a stored fixture file.
pub fn validate(stored: Option<&std::path::Path>, write: Option<&std::path::Path>) -> Result<Outcome> {
    let mut checks = Vec::new();
    let circle = mu_richardson(&ContourSpec::circle(1.0))?;
    checks.push(check("mu_circle_minus_one", (circle.value - 1.0).abs(), 1e-10));
    let series = perturbed_circle_series(0.12f64)?;
    checks.push(check("series_a1_at_0.12", (series.a1_series + 0.01).abs(), 1e-15));
    for (k, y, p) in [(1.0, 1.0, 2.0), (1.0, 1.0, 0.5), (1.0, 2.0, 1.7)] {
        checks.push(check(format!("ft_identity_k{k}_y{y}_p{p}"), ft_identity_check(k, y, p)?.max(), 1e-6));
    }
    let opts = SolveOptions { n_nodes: 64, ..SolveOptions::default() };
    let spec = ContourSpec::circle(1.0);
    let g = WaveguideGeometry::new(1.0, 0.8, 0.02);
    let fp = solve_discrete_sigma(&spec, &g, &opts)?;
    let c = build_contour(&spec, opts.n_nodes)?;
    let scan = singular_value_scan(&c, &g, ModeFamily::Discrete, (0.5 * fp.sigma, 2.0 * fp.sigma), 8, &opts)?;
    let agreement = match scan.candidates.as_slice() {
        [one] => (one.sigma / fp.sigma - 1.0).abs(),
        _ => f64::INFINITY,
    };
    checks.push(check("scan_vs_fixed_point_circle_a0.8", agreement, 1e-6));

    let fresh = fixtures()?;
    if let Some(path) = stored {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let old: Vec<Fixture> = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        for f in &old {
            let now = fresh.iter().find(|n| n.name == f.name).with_context(|| format!("unknown fixture {}", f.name))?;
            checks.push(check(format!("fixture_{}", f.name), (now.value - f.value).abs(), 10.0 * f.error_estimate));
        }
    }
    if let Some(path) = write {
        let mut text = serde_json::to_string_pretty(&fresh)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    let pass = checks.iter().all(|c| c.pass);
    let mut body = serde_json::to_string_pretty(&ValidationReport { pass, checks: &checks, fixtures: &fresh })?;
    body.push('\n');
    Ok(Outcome { body, mode_found: None, ok: pass, note: None })
}
