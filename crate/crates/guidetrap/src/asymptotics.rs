//! Closed-form leading-order quantities: threshold offset, leading σ for both mode families,
//! the orthogonality leading terms and the vertical offset that enables y-symmetric embedded modes.

use serde::{Deserialize, Serialize};

use crate::contour::{detect_symmetry, SampledContour, Symmetry, WaveguideGeometry};
use crate::error::{Error, Result};
use crate::neumann_bem::DipoleData;
use crate::scalar::{lit, to_f64, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    Discrete,
    EmbeddedXSymmetric,
    EmbeddedYSymmetric,
    None,
}

/// Machine-readable cause of a nonexistence verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    BelowThreshold,
    NuNonzero,
    OrthogonalityViolated,
    NoConvergence,
}

impl Reason {
    pub fn code(self) -> &'static str {
        match self {
            Reason::BelowThreshold => "below_threshold",
            Reason::NuNonzero => "nu_nonzero",
            Reason::OrthogonalityViolated => "orthogonality_violated",
            Reason::NoConvergence => "no_convergence",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticVerdict<T> {
    pub mode_kind: ModeKind,
    pub sigma_leading: T,
    pub a_star: Option<T>,
    pub a1: Option<T>,
    pub reason: Option<Reason>,
}

/// Leading-order threshold offset a₀* = (2b/π)·atan √(S/(2πμ)).
pub fn critical_offset<T: Real>(d: &DipoleData<T>, b: T) -> T {
    lit::<T>(2.0) * b / T::PI() * (d.s / (T::TAU() * d.mu)).sqrt().atan()
}

/// Leading discrete σ. The half-angle α = πa/(2b) is used throughout, so the
/// bracket reads πμ·sin²α − (S/2)·cos²α. Negative values signal an antibound state.
pub fn discrete_sigma_leading<T: Real>(d: &DipoleData<T>, g: &WaveguideGeometry<T>) -> T {
    let alpha = T::PI() * g.a / (lit::<T>(2.0) * g.b);
    let (s, c) = alpha.sin_cos();
    g.eps * g.eps * T::PI() * T::PI() / (lit::<T>(4.0) * g.b.powi(3))
        * (T::PI() * d.mu * s * s - d.s / lit(2.0) * c * c)
}

/// Leading embedded σ: (π²ε²/b³)(πμ cos²(πa/b) − (S/2) sin²(πa/b)), which is ε²π³μ/b³ at a = 0.
pub fn embedded_sigma_leading<T: Real>(d: &DipoleData<T>, g: &WaveguideGeometry<T>) -> T {
    let (s, c) = (T::PI() * g.a / g.b).sin_cos();
    T::PI() * T::PI() * g.eps * g.eps / g.b.powi(3) * (T::PI() * d.mu * c * c - d.s / lit(2.0) * s * s)
}

/// Leading real and imaginary parts of the orthogonality residual at ±p₁.
pub fn orthogonality_leading<T: Real>(d: &DipoleData<T>, a: T, b: T) -> (T, T) {
    let half = T::PI() * a / (lit::<T>(2.0) * b);
    let full = T::PI() * a / b;
    let o_r = (lit::<T>(2.0) * d.s * half.cos().powi(2) + T::PI() * d.mu * full.cos()) * half.sin();
    let o_i = d.nu * half.cos() * full.cos();
    (o_r, o_i)
}

fn symmetry_tol<T: Real>(c: &SampledContour<T>) -> T {
    lit::<T>(1e-10) * c.diameter()
}

/// Vertical offset coefficient a₁ (a = εa₁ at leading order) for a y-symmetric obstacle.
///
/// Evaluates the L̂₀Y form and the Ψ form and requires them to agree.
pub fn embedded_offset_a1<T: Real>(c: &SampledContour<T>, d: &DipoleData<T>) -> Result<T> {
    if !detect_symmetry(c, symmetry_tol(c)).is_y() {
        return Err(Error::Precondition("offset a1 needs a contour symmetric about the y-axis".into()));
    }
    let n = c.n_nodes;
    let w = c.weight;
    let denom = lit::<T>(2.0) * d.s + T::PI() * d.mu;
    let (mut i_yx, mut i_xy, mut i_psi, mut scale) = (T::zero(), T::zero(), T::zero(), T::zero());
    for j in 0..n {
        let f = d.l0y[j];
        let weight_fn = c.y[j] * c.xdot[j] - lit::<T>(3.0) * c.x[j] * c.ydot[j];
        i_yx += c.y[j] * c.xdot[j] * f;
        i_xy += c.x[j] * c.ydot[j] * f;
        i_psi += weight_fn * (c.y[j] - d.psi_on_gamma[j]);
        scale += (weight_fn * f).abs();
    }
    let from_l0y = w * (i_yx - lit::<T>(3.0) * i_xy) / denom;
    let from_psi = w * i_psi / (lit::<T>(2.0) * denom);
    let tol = lit::<T>(1e-9) * from_l0y.abs().max(w * scale / denom.abs());
    if (from_l0y - from_psi).abs() > tol {
        return Err(Error::Consistency(format!("a1 forms disagree: {} vs {}", to_f64(from_l0y), to_f64(from_psi))));
    }
    Ok(from_l0y)
}

/// Leading-order decision tree for which mode family (if any) the configuration supports.
pub fn classify_existence<T: Real>(
    c: &SampledContour<T>,
    d: &DipoleData<T>,
    g: &WaveguideGeometry<T>,
) -> AsymptoticVerdict<T> {
    let none = |reason, sigma| AsymptoticVerdict {
        mode_kind: ModeKind::None,
        sigma_leading: sigma,
        a_star: None,
        a1: None,
        reason: Some(reason),
    };
    let sigma_d = discrete_sigma_leading(d, g);
    if sigma_d > T::zero() {
        return AsymptoticVerdict {
            mode_kind: ModeKind::Discrete,
            sigma_leading: sigma_d,
            a_star: Some(critical_offset(d, g.b)),
            a1: None,
            reason: None,
        };
    }
    let diam = c.diameter();
    let eps = g.eps;
    if g.a.abs() > eps * diam.max(T::one()) * lit(2.0) {
        return none(Reason::BelowThreshold, sigma_d);
    }
    let sigma_e = embedded_sigma_leading(d, g);
    if d.nu.abs() > lit::<T>(1e-9) * d.mu {
        return none(Reason::NuNonzero, sigma_e);
    }
    let sym = detect_symmetry(c, symmetry_tol(c));
    if sym.is_x() && g.a.abs() <= lit::<T>(1e-12) * g.b {
        return AsymptoticVerdict {
            mode_kind: ModeKind::EmbeddedXSymmetric,
            sigma_leading: sigma_e,
            a_star: None,
            a1: None,
            reason: None,
        };
    }
    if sym.is_y() {
        if let Ok(a1) = embedded_offset_a1(c, d) {
            let window = eps * eps * (T::one() + eps.ln().abs()) * diam.max(T::one());
            if (g.a - eps * a1).abs() <= window {
                return AsymptoticVerdict {
                    mode_kind: ModeKind::EmbeddedYSymmetric,
                    sigma_leading: sigma_e,
                    a_star: None,
                    a1: Some(a1),
                    reason: None,
                };
            }
        }
    }
    none(Reason::OrthogonalityViolated, sigma_e)
}

/// Symmetry class used by the classifier, exposed for reporting.
pub fn symmetry_class<T: Real>(c: &SampledContour<T>) -> Symmetry {
    detect_symmetry(c, symmetry_tol(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{build_contour, ContourSpec};
    use crate::neumann_bem::dipole_strengths;
    use std::f64::consts::PI;

    fn setup(spec: ContourSpec<f64>) -> (SampledContour<f64>, DipoleData<f64>) {
        let c = build_contour(&spec, 128).unwrap();
        let d = dipole_strengths(&c).unwrap();
        (c, d)
    }

    #[test]
    fn circle_threshold() {
        for r0 in [0.5, 1.0, 2.0] {
            let (_, d) = setup(ContourSpec::circle(r0));
            let a = critical_offset(&d, 1.0);
            assert!((a - 2.0 / PI * (0.5f64).sqrt().atan()).abs() < 1e-12);
            assert!((a - 0.391827).abs() < 1e-6);
        }
    }

    #[test]
    fn threshold_limits() {
        let mk = |s: f64, mu: f64| DipoleData {
            s,
            mu,
            nu: 0.0,
            psi_on_gamma: vec![],
            l0y: vec![],
            mu_trace_form: mu,
            nu_trace_form: 0.0,
        };
        assert!(critical_offset(&mk(1.0, 1e12), 1.0) < 1e-6);
        assert!((critical_offset(&mk(1e20, 1.0), 1.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn discrete_sigma_examples() {
        let (_, d) = setup(ContourSpec::circle(1.0));
        let eps = 0.05;
        let s0 = discrete_sigma_leading(&d, &WaveguideGeometry::new(1.0, 0.0, eps));
        assert!((s0 + eps * eps * PI.powi(3) / 8.0).abs() < 1e-12);
        let s8 = discrete_sigma_leading(&d, &WaveguideGeometry::new(1.0, 0.8, eps));
        let want = eps * eps * PI * PI / 4.0 * (PI * (0.4 * PI).sin().powi(2) - PI / 2.0 * (0.4 * PI).cos().powi(2));
        assert!((s8 - want).abs() < 1e-12 && s8 > 0.0);
        let a0 = critical_offset(&d, 1.0);
        assert!(discrete_sigma_leading(&d, &WaveguideGeometry::new(1.0, a0, eps)).abs() < 1e-15);
    }

    #[test]
    fn embedded_sigma_examples() {
        let (_, d) = setup(ContourSpec::circle(1.0));
        let g = WaveguideGeometry::new(1.0, 0.0, 0.05);
        assert!((embedded_sigma_leading(&d, &g) - 0.0025 * PI.powi(3)).abs() < 1e-12);
        assert!((embedded_sigma_leading(&d, &g) - 0.077525).abs() < 1e-4);
    }

    #[test]
    fn orthogonality_examples() {
        let (_, d) = setup(ContourSpec::circle(1.0));
        let (o_r, o_i) = orthogonality_leading(&d, 0.0, 1.0);
        assert_eq!(o_r, 0.0);
        assert!(o_i.abs() < 1e-12);
        let (o_r, _) = orthogonality_leading(&d, 0.5, 1.0);
        let want = 2.0 * d.s * (PI / 4.0).cos().powi(2) * (PI / 4.0).sin();
        assert!((o_r - want).abs() < 1e-10 && o_r > 0.0);
    }

    #[test]
    fn offset_vanishes_for_circle_and_follows_translation() {
        let (c, d) = setup(ContourSpec::circle(1.0));
        assert!(embedded_offset_a1(&c, &d).unwrap().abs() < 1e-12);
        // Lifting the obstacle by h lowers the required offset by h.
        let (c0, d0) = setup(ContourSpec::perturbed_circle(0.1));
        let base = embedded_offset_a1(&c0, &d0).unwrap();
        let mut c1 = c0.clone();
        c1.y.iter_mut().for_each(|y| *y += 0.2);
        let d1 = dipole_strengths(&c1).unwrap();
        assert!((d1.mu - d0.mu).abs() < 1e-12);
        assert!((embedded_offset_a1(&c1, &d1).unwrap() - (base - 0.2)).abs() < 1e-10);
    }

    #[test]
    fn offset_needs_y_symmetry() {
        let (c, d) = setup(ContourSpec::new(vec![0.0, 0.0, 0.15], vec![1.0], vec![-1.0], vec![0.0, 0.3]));
        assert!(matches!(embedded_offset_a1(&c, &d), Err(Error::Precondition(_))));
    }

    #[test]
    fn classifier_branches() {
        let (c, d) = setup(ContourSpec::circle(1.0));
        let v = classify_existence(&c, &d, &WaveguideGeometry::new(1.0, 0.8, 0.02));
        assert_eq!(v.mode_kind, ModeKind::Discrete);
        assert!(v.sigma_leading > 0.0 && v.a_star.is_some());
        let v = classify_existence(&c, &d, &WaveguideGeometry::new(1.0, 0.0, 0.02));
        assert_eq!(v.mode_kind, ModeKind::EmbeddedXSymmetric);
        assert!((v.sigma_leading - 0.0004 * PI.powi(3)).abs() < 1e-12);
        let v = classify_existence(&c, &d, &WaveguideGeometry::new(1.0, 0.2, 0.02));
        assert_eq!(v.reason, Some(Reason::BelowThreshold));

        let (c, d) = setup(ContourSpec::new(vec![0.0, 0.0, 0.15], vec![1.0], vec![-1.0], vec![0.0, 0.3]));
        assert!(d.nu.abs() > 0.05 * d.mu, "nu = {}", d.nu);
        let v = classify_existence(&c, &d, &WaveguideGeometry::new(1.0, 0.0, 0.02));
        assert_eq!(v.reason, Some(Reason::NuNonzero));

        let (c, d) = setup(ContourSpec::perturbed_circle(0.05));
        let v = classify_existence(&c, &d, &WaveguideGeometry::new(1.0, 0.0, 0.02));
        assert_eq!(v.mode_kind, ModeKind::EmbeddedYSymmetric);
        assert!(v.a1.is_some());
        let v = classify_existence(&c, &d, &WaveguideGeometry::new(1.0, 0.03, 0.02));
        assert_eq!(v.reason, Some(Reason::OrthogonalityViolated));
    }
}
