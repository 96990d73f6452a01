use num_complex::Complex;
use serde::Serialize;

use super::field::{reconstruct_mode, FieldGrid, FieldSamples};
use super::pgrid::embedded_real_pole;
use super::system::{assemble_system, DiscretizedSystem, SecularValue};
use super::traces::{boundary_traces, default_trace_grid, ModeTraces};
use super::{ModeFamily, SolveOptions};
use crate::asymptotics::{
    discrete_sigma_leading, embedded_offset_a1, embedded_sigma_leading, symmetry_class, ModeKind, Reason,
};
use crate::contour::{build_contour, ContourSpec, SampledContour, WaveguideGeometry};
use crate::error::{Error, Result};
use crate::neumann_bem::{dipole_strengths, DipoleData};
use crate::scalar::{lit, to_f64, Real};

/// Outcome of a full solve. Nonexistence is reported through `exists` and `reason`.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralResult<T> {
    pub mode_kind: ModeKind,
    pub family: ModeFamily,
    pub exists: bool,
    pub reason: Option<Reason>,
    pub sigma: T,
    /// ε·Im F at the converged σ; zero up to rounding for symmetric configurations.
    pub sigma_imag: T,
    pub sigma_leading: T,
    pub k_squared: T,
    pub a_solved: T,
    /// Inner σ iterations, summed over every outer step.
    pub iterations: usize,
    /// Secant steps on a (embedded y-symmetric only).
    pub outer_iterations: usize,
    /// |σ − εF(σ)|/|σ| at the returned σ.
    pub residual: T,
    /// max |A₁,₂(±p₁)| with A₁(iσ) = 1 (embedded family).
    pub orthogonality: Option<T>,
    pub history: Vec<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traces: Option<ModeTraces<T>>,
    #[serde(skip)]
    pub system: Option<DiscretizedSystem<T>>,
}

impl<T: Real> SpectralResult<T> {
    /// Field samples of the converged mode.
    pub fn field(&self, grid: &FieldGrid<T>) -> Result<FieldSamples<T>> {
        match (&self.system, &self.traces) {
            (Some(sys), Some(tr)) if self.exists => reconstruct_mode(sys, &tr.theta, grid),
            _ => Err(Error::Precondition("no converged mode to reconstruct".into())),
        }
    }
}

struct FixedPoint<T> {
    sigma: T,
    sys: DiscretizedSystem<T>,
    value: SecularValue<T>,
    iterations: usize,
    history: Vec<T>,
    residual: T,
}

impl<T: Real> FixedPoint<T> {
    /// θ scaled so that A₁(iσ) = 1 exactly.
    fn normalized_theta(&self) -> Vec<Complex<T>> {
        let raw: Vec<Complex<T>> = self.value.z.iter().map(|v| *v * (lit::<T>(2.0) / self.sigma)).collect();
        let (s1, _) = self.sys.special_rows();
        let a1: Complex<T> = self.sys.k_matrix.row(s1).iter().zip(&raw).map(|(&k, &v)| k * v).sum::<Complex<T>>()
            * self.sys.geometry.eps;
        raw.into_iter().map(|v| v / a1).collect()
    }
}

fn converged<T: Real>(delta: T, sigma: T, eps: T, tol: T) -> bool {
    delta <= tol * sigma.abs().max(eps * eps * lit(1e-3))
}

/// σ = εF(σ) by direct iteration, switching to a secant on σ − εF(σ) when the steps stop shrinking.
fn fixed_point<T: Real>(
    c: &SampledContour<T>,
    g: &WaveguideGeometry<T>,
    family: ModeFamily,
    opts: &SolveOptions,
    sigma0: T,
) -> Result<FixedPoint<T>> {
    let eps = g.eps;
    let tol = lit::<T>(opts.tol);
    let eval = |sigma: T| -> Result<(DiscretizedSystem<T>, SecularValue<T>)> {
        let sys = assemble_system(c, g, sigma, family, opts)?;
        let v = sys.secular_value()?;
        Ok((sys, v))
    };
    let mut sigma = sigma0;
    let mut history = Vec::new();
    let mut prev_delta = T::infinity();
    let mut growth = 0;
    let mut last: Option<(T, T)> = None;
    let mut prev: Option<(T, T)> = None;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let (sys, value) = eval(sigma)?;
        history.push(sigma);
        let next = eps * value.f.re;
        let delta = (next - sigma).abs();
        if converged(delta, sigma, eps, tol) {
            return Ok(FixedPoint { sigma, sys, value, iterations, history, residual: delta / sigma.abs() });
        }
        prev = last;
        last = Some((sigma, sigma - next));
        growth = if delta > prev_delta { growth + 1 } else { 0 };
        if growth >= 5 {
            break;
        }
        prev_delta = delta;
        sigma = next;
    }
    // Secant on g(σ) = σ − εF(σ) from the last two iterates.
    let (mut s0, mut g0) = prev.ok_or_else(|| Error::Convergence("fixed point stalled immediately".into()))?;
    let (mut s1, mut g1) = last.expect("at least one iterate");
    for _ in 0..opts.max_iter {
        iterations += 1;
        if g1 == g0 {
            break;
        }
        let s2 = s1 - g1 * (s1 - s0) / (g1 - g0);
        let (sys, value) = eval(s2)?;
        history.push(s2);
        let g2 = s2 - eps * value.f.re;
        if converged(g2.abs(), s2, eps, tol) {
            return Ok(FixedPoint { sigma: s2, sys, value, iterations, history, residual: g2.abs() / s2.abs() });
        }
        (s0, g0, s1, g1) = (s1, g1, s2, g2);
    }
    Err(Error::Convergence(format!(
        "sigma iteration did not converge; history: {:?}",
        history.iter().map(|v| to_f64(*v)).collect::<Vec<_>>()
    )))
}

fn blank<T: Real>(kind: ModeKind, family: ModeFamily, reason: Reason, lead: T, a: T, b: T) -> SpectralResult<T> {
    let lambda = match family {
        ModeFamily::Discrete => (T::FRAC_PI_2() / b).powi(2),
        ModeFamily::Embedded => (T::PI() / b).powi(2),
    };
    SpectralResult {
        mode_kind: kind,
        family,
        exists: false,
        reason: Some(reason),
        sigma: T::nan(),
        sigma_imag: T::zero(),
        sigma_leading: lead,
        k_squared: lambda,
        a_solved: a,
        iterations: 0,
        outer_iterations: 0,
        residual: T::nan(),
        orthogonality: None,
        history: Vec::new(),
        traces: None,
        system: None,
    }
}

fn sample<T: Real>(
    spec: &ContourSpec<T>,
    g: &WaveguideGeometry<T>,
    opts: &SolveOptions,
) -> Result<(SampledContour<T>, DipoleData<T>)> {
    let c = build_contour(spec, opts.n_nodes)?;
    g.validate(&c)?;
    let d = dipole_strengths(&c)?;
    Ok((c, d))
}

/// Discrete eigenvalue below Λ₁ = π²/4b² for the obstacle at offset `g.a`.
pub fn solve_discrete_sigma<T: Real>(
    spec: &ContourSpec<T>,
    g: &WaveguideGeometry<T>,
    opts: &SolveOptions,
) -> Result<SpectralResult<T>> {
    let (c, d) = sample(spec, g, opts)?;
    let lead = discrete_sigma_leading(&d, g);
    let sigma0 = lead.max(g.eps.powi(3));
    let family = ModeFamily::Discrete;
    let fp = match fixed_point(&c, g, family, opts, sigma0) {
        Ok(fp) => fp,
        Err(Error::Range(_)) => return Ok(blank(ModeKind::None, family, Reason::NoConvergence, lead, g.a, g.b)),
        Err(e) => return Err(e),
    };
    let sigma = fp.sigma;
    let exists = sigma > T::zero();
    let traces = if exists {
        let theta = fp.normalized_theta();
        Some(boundary_traces(&fp.sys, &theta, &default_trace_grid(sigma, g.b))?)
    } else {
        None
    };
    Ok(SpectralResult {
        mode_kind: if exists { ModeKind::Discrete } else { ModeKind::None },
        family,
        exists,
        reason: if exists { None } else { Some(Reason::BelowThreshold) },
        sigma,
        sigma_imag: g.eps * fp.value.f.im,
        sigma_leading: lead,
        k_squared: (T::FRAC_PI_2() / g.b).powi(2) - sigma * sigma,
        a_solved: g.a,
        iterations: fp.iterations,
        outer_iterations: 0,
        residual: fp.residual,
        orthogonality: None,
        history: fp.history,
        traces,
        system: if exists { Some(fp.sys) } else { None },
    })
}

/// Orthogonality data of the embedded fixed point at the offset `g.a`.
#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityProbe<T> {
    pub a: T,
    pub sigma: T,
    pub sigma_imag: T,
    /// A₁(p₁), A₁(−p₁), A₂(p₁), A₂(−p₁) with A₁(iσ) = 1.
    pub pole_values: Vec<Complex<T>>,
    pub iterations: usize,
    pub residual: T,
}

impl<T: Real> OrthogonalityProbe<T> {
    pub fn max_abs(&self) -> T {
        self.pole_values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }
}

fn probe<T: Real>(
    c: &SampledContour<T>,
    g: &WaveguideGeometry<T>,
    opts: &SolveOptions,
    sigma0: T,
) -> Result<(OrthogonalityProbe<T>, FixedPoint<T>)> {
    let fp = fixed_point(c, g, ModeFamily::Embedded, opts, sigma0)?;
    let theta = fp.normalized_theta();
    let pole_values = fp.sys.pole_values(&theta).expect("embedded systems carry pole rows");
    Ok((
        OrthogonalityProbe {
            a: g.a,
            sigma: fp.sigma,
            sigma_imag: g.eps * fp.value.f.im,
            pole_values,
            iterations: fp.iterations,
            residual: fp.residual,
        },
        fp,
    ))
}

/// Runs the embedded σ fixed point at the given offset and reports how far the wall spectra are
/// from vanishing at ±p₁. Works for any contour; used to document nonexistence.
pub fn embedded_orthogonality<T: Real>(
    spec: &ContourSpec<T>,
    g: &WaveguideGeometry<T>,
    opts: &SolveOptions,
) -> Result<OrthogonalityProbe<T>> {
    let (c, d) = sample(spec, g, opts)?;
    let sigma0 = embedded_sigma_leading(&d, g).max(g.eps.powi(3));
    Ok(probe(&c, g, opts, sigma0)?.0)
}

/// Embedded eigenvalue in [Λ₁, Λ₂). The offset in `g` is ignored: x-symmetric obstacles sit on
/// the axis, y-symmetric ones at the offset found by a secant on the orthogonality residual.
pub fn solve_embedded<T: Real>(
    spec: &ContourSpec<T>,
    g: &WaveguideGeometry<T>,
    opts: &SolveOptions,
) -> Result<SpectralResult<T>> {
    let (c, d) = sample(spec, &g.with_a(T::zero()), opts)?;
    let family = ModeFamily::Embedded;
    let sym = symmetry_class(&c);
    let g0 = g.with_a(T::zero());
    let lead0 = embedded_sigma_leading(&d, &g0);
    let orth_tol = lit::<T>(1e-9);

    if d.nu.abs() > lit::<T>(1e-9) * d.mu || !(sym.is_x() || sym.is_y()) {
        // No offset can satisfy both orthogonality conditions; document the residual at a = g.a.
        let reason = if d.nu.abs() > lit::<T>(1e-9) * d.mu { Reason::NuNonzero } else { Reason::OrthogonalityViolated };
        let mut out = blank(ModeKind::None, family, reason, embedded_sigma_leading(&d, g), g.a, g.b);
        if let Ok((pr, _)) = probe(&c, g, opts, embedded_sigma_leading(&d, g).max(g.eps.powi(3))) {
            out.sigma = pr.sigma;
            out.sigma_imag = pr.sigma_imag;
            out.iterations = pr.iterations;
            out.residual = pr.residual;
            out.orthogonality = Some(pr.max_abs());
            out.k_squared = (T::PI() / g.b).powi(2) - pr.sigma * pr.sigma;
        }
        return Ok(out);
    }

    let (kind, fp, pr, outer, history) = if sym.is_x() {
        let (pr, fp) = probe(&c, &g0, opts, lead0.max(g.eps.powi(3)))?;
        let h = fp.history.clone();
        (ModeKind::EmbeddedXSymmetric, fp, pr, 0, h)
    } else {
        let a1 = embedded_offset_a1(&c, &d)?;
        let eps = g.eps;
        let mut history = Vec::new();
        let mut iterations = 0;
        let mut sigma_guess = lead0.max(eps.powi(3));
        let mut eval = |a: T, sigma0: T| -> Result<(OrthogonalityProbe<T>, FixedPoint<T>)> {
            let ga = g.with_a(a);
            ga.validate(&c)?;
            let out = probe(&c, &ga, opts, sigma0)?;
            iterations += out.0.iterations;
            history.extend(out.1.history.iter().copied());
            Ok(out)
        };
        let mut a0 = eps * a1;
        let (p0, f0) = eval(a0, sigma_guess)?;
        sigma_guess = p0.sigma;
        let mut r0 = p0.pole_values[0].re;
        let mut best = (p0, f0);
        let mut a_cur = a0 + eps * eps * g.b;
        let mut outer = 1;
        loop {
            if best.0.pole_values[0].re.abs() <= lit::<T>(opts.tol) {
                break;
            }
            if outer > 40 {
                return Err(Error::Convergence(format!(
                    "offset secant did not converge; last a = {}, residual {}",
                    to_f64(best.0.a),
                    to_f64(best.0.pole_values[0].re)
                )));
            }
            let (p1, f1) = eval(a_cur, sigma_guess)?;
            outer += 1;
            sigma_guess = p1.sigma;
            let r1 = p1.pole_values[0].re;
            let step_base = a_cur - a0;
            let done = r1.abs() <= lit::<T>(opts.tol) || step_base.abs() <= lit::<T>(1e-15) * g.b;
            if r1.abs() < best.0.pole_values[0].re.abs() || done {
                best = (p1, f1);
            }
            if done || r1 == r0 {
                break;
            }
            let a_next = a_cur - r1 * step_base / (r1 - r0);
            if !a_next.is_finite() || a_next.abs() >= g.b {
                return Err(Error::Convergence("offset secant left the strip".into()));
            }
            (a0, r0) = (a_cur, r1);
            a_cur = a_next;
        }
        let (pr, mut fp) = best;
        fp.iterations = iterations;
        (ModeKind::EmbeddedYSymmetric, fp, pr, outer, history)
    };

    let sigma = fp.sigma;
    let b = g.b;
    let orth = pr.max_abs();
    // Stay an O(ε) distance below the point where the real poles ±p₁ merge at the origin.
    let window_ok = embedded_real_pole(b, sigma).map(|p1| p1 > g.eps / b).unwrap_or(false);
    let exists = sigma > T::zero() && orth <= orth_tol && window_ok;
    let reason = if exists {
        None
    } else if !(sigma > T::zero()) {
        Some(Reason::BelowThreshold)
    } else if orth > orth_tol {
        Some(Reason::OrthogonalityViolated)
    } else {
        Some(Reason::NoConvergence)
    };
    let traces = if exists {
        let theta = fp.normalized_theta();
        Some(boundary_traces(&fp.sys, &theta, &default_trace_grid(sigma, b))?)
    } else {
        None
    };
    Ok(SpectralResult {
        mode_kind: if exists { kind } else { ModeKind::None },
        family,
        exists,
        reason,
        sigma,
        sigma_imag: pr.sigma_imag,
        sigma_leading: embedded_sigma_leading(&d, &g.with_a(pr.a)),
        k_squared: (T::PI() / b).powi(2) - sigma * sigma,
        a_solved: pr.a,
        iterations: fp.iterations,
        outer_iterations: outer,
        residual: fp.residual,
        orthogonality: Some(orth),
        history,
        traces,
        system: if exists { Some(fp.sys) } else { None },
    })
}
