//! Nyström discretization of the obstacle's double-layer operators, and the dipole strengths.

use crate::contour::{contour_area, SampledContour};
use crate::error::{Error, Result};
use crate::linalg::{norm_max, Lu, Mat};
use crate::scalar::{from_usize, lit, to_f64, Real};
use crate::specfun::n0_prime_split;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelKind<T> {
    LaplaceM0,
    HelmholtzM { eps: T, k: T },
}

/// Quadrature-weighted kernel matrix: entries[i][j] ≈ w·kernel(t_i, s_j).
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix<T> {
    pub entries: Mat<T>,
    pub kind: KernelKind<T>,
}

impl<T: Real> KernelMatrix<T> {
    /// I + M.
    pub fn shifted_identity(&self) -> Mat<T> {
        let n = self.entries.rows();
        let mut a = self.entries.clone();
        for i in 0..n {
            a[(i, i)] += T::one();
        }
        a
    }
}

struct Pair<T> {
    /// (r(s) − r(t))·m(s)
    dot: T,
    dist2: T,
}

fn pair<T: Real>(c: &SampledContour<T>, i: usize, j: usize) -> Pair<T> {
    let dx = c.x[j] - c.x[i];
    let dy = c.y[j] - c.y[i];
    Pair { dot: -dx * c.ydot[j] + dy * c.xdot[j], dist2: dx * dx + dy * dy }
}

/// Smooth limit of the Laplace kernel on the diagonal.
fn m0_diagonal<T: Real>(c: &SampledContour<T>, i: usize) -> T {
    let speed2 = c.xdot[i] * c.xdot[i] + c.ydot[i] * c.ydot[i];
    (c.xdot[i] * c.yddot[i] - c.ydot[i] * c.xddot[i]) / (T::TAU() * speed2)
}

fn check_separation<T: Real>(c: &SampledContour<T>) -> Result<()> {
    let n = c.n_nodes;
    let diam = c.diameter();
    let floor = diam * lit(1e-8);
    for i in 0..n {
        for j in i + 1..n {
            let gap = (j - i).min(n - (j - i));
            if gap >= n / 8 && pair(c, i, j).dist2.sqrt() < floor {
                return Err(Error::Conditioning(format!("contour nearly touches itself between nodes {i} and {j}")));
            }
        }
    }
    Ok(())
}

/// Laplace double-layer kernel M₀(t,s) = −(1/π)(r(s)−r(t))·m(s)/|r(s)−r(t)|², weighted.
pub fn assemble_m0<T: Real>(c: &SampledContour<T>) -> Result<KernelMatrix<T>> {
    check_separation(c)?;
    let n = c.n_nodes;
    let w = c.weight;
    let entries = Mat::from_fn(n, n, |i, j| {
        if i == j {
            w * m0_diagonal(c, i)
        } else {
            let p = pair(c, i, j);
            -w * p.dot / (T::PI() * p.dist2)
        }
    });
    Ok(KernelMatrix { entries, kind: KernelKind::LaplaceM0 })
}

/// Product-quadrature weights for ∫ ln(4 sin²((t−s)/2)) f(s) ds on the equispaced grid, by offset.
fn log_weights<T: Real>(n: usize) -> Vec<T> {
    let nf: T = from_usize(n);
    let half = n / 2;
    (0..n)
        .map(|m| {
            let tau = T::TAU() * from_usize::<T>(m) / nf;
            let mut s = T::zero();
            for l in 1..half {
                s += (from_usize::<T>(l) * tau).cos() / from_usize(l);
            }
            -lit::<T>(4.0) * T::PI() / nf * s
                - lit::<T>(4.0) * T::PI() / (nf * nf) * (from_usize::<T>(half) * tau).cos()
        })
        .collect()
}

/// Full Helmholtz double-layer kernel M(t,s) = −(εk/2) N₀′(εk d)(r(s)−r(t))·m(s)/d, d = |r(s)−r(t)|.
///
/// The kernel carries a d²·ln d singularity; its logarithmic part is integrated with exact
/// product weights so the scheme keeps the spectral accuracy of the smooth Laplace part.
pub fn assemble_m<T: Real>(c: &SampledContour<T>, eps: T, k: T) -> Result<KernelMatrix<T>> {
    let diam = c.diameter();
    if !(eps * k * diam < lit(0.5)) {
        return Err(Error::Range(format!(
            "eps·k·diameter = {} outside the small-obstacle regime (< 0.5)",
            to_f64(eps * k * diam)
        )));
    }
    if !(eps > T::zero() && k > T::zero()) {
        return Err(Error::Precondition("assemble_m needs eps > 0 and k > 0".into()));
    }
    let base = assemble_m0(c)?;
    let n = c.n_nodes;
    let w = c.weight;
    let ek = eps * k;
    let lw = log_weights::<T>(n);
    let ln_half_ek = (ek / lit(2.0)).ln();
    let mut entries = base.entries;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let p = pair(c, i, j);
            let d = p.dist2.sqrt();
            let ratio = p.dot / d;
            let (j1, reg) = n0_prime_split(ek * d);
            let g1 = ek / T::PI() * ratio * j1;
            let greg = -ek / lit(2.0) * ratio * reg;
            let half_angle = (c.t[i] - c.t[j]) / lit(2.0);
            let four_sin2 = lit::<T>(4.0) * half_angle.sin().powi(2);
            let smooth_extra = g1 * ((p.dist2 / four_sin2).ln() / lit(2.0) + ln_half_ek) + greg;
            let log_coeff = g1 / lit(2.0);
            entries[(i, j)] += w * smooth_extra + lw[(j + n - i) % n] * log_coeff;
        }
    }
    Ok(KernelMatrix { entries, kind: KernelKind::HelmholtzM { eps, k } })
}

/// Factored (I + M) for repeated solves.
pub struct SecondKindSolver<T> {
    lu: Lu<T>,
    matrix: Mat<T>,
}

impl<T: Real> SecondKindSolver<T> {
    pub fn new(m: &KernelMatrix<T>) -> Result<Self> {
        let matrix = m.shifted_identity();
        let lu = Lu::new(&matrix).map_err(|e| match e {
            Error::Singular(_) => Error::Conditioning("I + M is numerically singular".into()),
            other => other,
        })?;
        if lu.pivot_ratio() < 1e-13 {
            return Err(Error::Conditioning(format!("I + M is ill-conditioned (pivot ratio {:e})", lu.pivot_ratio())));
        }
        Ok(SecondKindSolver { lu, matrix })
    }

    pub fn solve(&self, f: &[T]) -> Result<Vec<T>> {
        if f.len() != self.matrix.rows() {
            return Err(Error::Precondition(format!(
                "data has {} samples, contour has {}",
                f.len(),
                self.matrix.rows()
            )));
        }
        let g = self.lu.solve(f);
        let r: Vec<T> = self.matrix.matvec(&g).iter().zip(f).map(|(a, b)| *a - *b).collect();
        let scale = norm_max(f).max(T::min_positive_value());
        if norm_max(&r) > lit::<T>(1e-12) * scale * from_usize::<T>(f.len()).sqrt() {
            return Err(Error::Conditioning(format!(
                "second-kind residual {:e} too large",
                to_f64(norm_max(&r) / scale)
            )));
        }
        Ok(g)
    }
}

/// L̂₀f: solves (I + M₀)g = f.
pub fn apply_l0<T: Real>(c: &SampledContour<T>, f: &[T]) -> Result<Vec<T>> {
    SecondKindSolver::new(&assemble_m0(c)?)?.solve(f)
}

/// L̂f: solves (I + M)g = f with the full Helmholtz kernel.
pub fn solve_l<T: Real>(c: &SampledContour<T>, eps: T, k: T, f: &[T]) -> Result<Vec<T>> {
    SecondKindSolver::new(&assemble_m(c, eps, k)?)?.solve(f)
}

/// Area, dipole strengths and the boundary trace of the exterior flow potential.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct DipoleData<T> {
    #[serde(rename = "S")]
    pub s: T,
    pub mu: T,
    pub nu: T,
    /// Ψ on the contour nodes, Ψ = Y − 2 L̂₀Y.
    pub psi_on_gamma: Vec<T>,
    /// L̂₀Y on the contour nodes.
    pub l0y: Vec<T>,
    /// μ from the trace form (1/2π)(S + ∫Ẋ Ψ dt); equals `mu` to the consistency tolerance.
    pub mu_trace_form: T,
    /// ν from the trace form (1/2π)∫(−Ẏ)Ψ dt.
    pub nu_trace_form: T,
}

pub fn dipole_strengths<T: Real>(c: &SampledContour<T>) -> Result<DipoleData<T>> {
    let f = apply_l0(c, &c.y)?;
    let w = c.weight;
    let s = contour_area(c);
    let psi: Vec<T> = c.y.iter().zip(&f).map(|(&y, &fj)| y - lit::<T>(2.0) * fj).collect();
    let int = |a: &[T], b: &[T]| a.iter().zip(b).map(|(&u, &v)| u * v).sum::<T>() * w;
    let mu = -int(&c.xdot, &f) / T::PI();
    let nu = int(&c.ydot, &f) / T::PI();
    let mu_trace_form = (s + int(&c.xdot, &psi)) / T::TAU();
    let neg_ydot: Vec<T> = c.ydot.iter().map(|&v| -v).collect();
    let nu_trace_form = int(&neg_ydot, &psi) / T::TAU();
    if !(mu > T::zero()) {
        return Err(Error::Invariant(format!("dipole strength mu = {} is not positive", to_f64(mu))));
    }
    let tol = lit::<T>(1e-9) * mu.abs();
    if (mu - mu_trace_form).abs() > tol || (nu - nu_trace_form).abs() > tol {
        return Err(Error::Consistency(format!(
            "dipole cross-check failed: mu {} vs {}, nu {} vs {}",
            to_f64(mu),
            to_f64(mu_trace_form),
            to_f64(nu),
            to_f64(nu_trace_form)
        )));
    }
    Ok(DipoleData { s, mu, nu, psi_on_gamma: psi, l0y: f, mu_trace_form, nu_trace_form })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{build_contour, ContourSpec};
    use std::f64::consts::PI;

    #[test]
    fn circle_kernel_is_constant() {
        let c: SampledContour<f64> = build_contour(&ContourSpec::circle(1.0), 32).unwrap();
        let m = assemble_m0(&c).unwrap();
        let want = c.weight / (2.0 * PI);
        assert!(m.entries.map(|x| x - want).max_abs() < 1e-14);
    }

    #[test]
    fn row_sums_are_one() {
        for spec in [ContourSpec::ellipse(2.0, 1.0), ContourSpec::perturbed_circle(0.3)] {
            let c: SampledContour<f64> = build_contour(&spec, 128).unwrap();
            let m = assemble_m0(&c).unwrap();
            for i in 0..c.n_nodes {
                let s: f64 = m.entries.row(i).iter().sum();
                assert!((s - 1.0).abs() < 1e-10, "row {i}: {s}");
            }
        }
    }

    #[test]
    fn log_weights_integrate_log_kernel() {
        // ∫ ln(4 sin²((t−s)/2)) cos(s) ds = −2π cos t.
        let n = 32;
        let lw = log_weights::<f64>(n);
        let t: Vec<f64> = (0..n).map(|j| -PI + 2.0 * PI * j as f64 / n as f64).collect();
        for i in 0..n {
            let q: f64 = (0..n).map(|j| lw[(j + n - i) % n] * t[j].cos()).sum();
            assert!((q + 2.0 * PI * t[i].cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn helmholtz_kernel_approaches_laplace() {
        let c: SampledContour<f64> = build_contour(&ContourSpec::perturbed_circle(0.2), 64).unwrap();
        let m0 = assemble_m0(&c).unwrap().entries;
        let mut ratios = Vec::new();
        for eps in [0.1, 0.05, 0.025] {
            let m = assemble_m(&c, eps, 1.0).unwrap().entries;
            ratios.push(m.sub(&m0).max_abs() / (eps * eps * f64::ln(eps).abs()));
        }
        assert!(ratios.iter().all(|&r| r < 1.0), "{ratios:?}");
        assert!(assemble_m(&c, 0.4, 1.0).is_err());
    }

    #[test]
    fn circle_helmholtz_eigenvalues_match_addition_theorem() {
        // On a circle the kernel is diagonal in Fourier modes: λ_n = (πx/2)(J_n Y_n)′(x), x = εkR.
        let (r0, eps, k): (f64, f64, f64) = (1.3, 0.15, 1.1);
        let x = eps * k * r0;
        let [j0, j1, y0, y1] = crate::specfun::bessel01(x);
        // Forward recurrence is stable for Y_n only; J_n comes from its power series.
        let j: Vec<f64> = (0..5)
            .map(|n| {
                let (mut term, mut sum) = ((x / 2.0).powi(n) / (1..=n).product::<i32>() as f64, 0.0);
                for m in 0..20 {
                    sum += term;
                    term *= -(x / 2.0).powi(2) / ((m + 1) as f64 * (m + 1 + n) as f64);
                }
                sum
            })
            .collect();
        assert!((j[0] - j0).abs() < 1e-15 && (j[1] - j1).abs() < 1e-15);
        let mut y = vec![y0, y1];
        for n in 1..4 {
            y.push(2.0 * n as f64 / x * y[n] - y[n - 1]);
        }
        let c: SampledContour<f64> = build_contour(&ContourSpec::circle(r0), 64).unwrap();
        let m = assemble_m(&c, eps, k).unwrap().entries;
        for n in 0..4 {
            let (jd, yd) =
                if n == 0 { (-j[1], -y[1]) } else { (j[n - 1] - n as f64 / x * j[n], y[n - 1] - n as f64 / x * y[n]) };
            let lambda = PI * x / 2.0 * (jd * y[n] + j[n] * yd);
            let v: Vec<f64> = c.t.iter().map(|t| (n as f64 * t).cos()).collect();
            let mv = m.matvec(&v);
            for (a, b) in mv.iter().zip(&v) {
                assert!((a - lambda * b).abs() < 1e-12, "n={n}: {a} vs {}", lambda * b);
            }
        }
    }

    #[test]
    fn circle_dipole() {
        let c: SampledContour<f64> = build_contour(&ContourSpec::circle(1.0), 64).unwrap();
        let d: DipoleData<f64> = dipole_strengths(&c).unwrap();
        assert!((d.mu - 1.0).abs() < 1e-12);
        assert!(d.nu.abs() < 1e-12);
        for (l, y) in d.l0y.iter().zip(c.y.iter()) {
            assert!((*l - *y).abs() < 1e-12);
        }
    }

    #[test]
    fn l0_of_constant_is_half() {
        let c: SampledContour<f64> = build_contour(&ContourSpec::ellipse(2.0, 1.0), 64).unwrap();
        let g = apply_l0(&c, &vec![1.0; 64]).unwrap();
        assert!(g.iter().all(|v| (v - 0.5).abs() < 1e-12));
    }

    #[test]
    fn perturbed_circle_l0y_first_order() {
        let beta: f64 = 1e-3;
        let c: SampledContour<f64> = build_contour(&ContourSpec::perturbed_circle(beta), 64).unwrap();
        let g = apply_l0(&c, &c.y).unwrap();
        for (gi, t) in g.iter().zip(&c.t) {
            let want = -t.cos() + beta * ((2.0 * t).cos() - 0.5) / 2.0;
            assert!((gi - want).abs() < 10.0 * beta * beta, "{gi} vs {want}");
        }
    }

    #[test]
    fn full_operator_tends_to_laplace() {
        let c: SampledContour<f64> = build_contour(&ContourSpec::perturbed_circle(0.2), 64).unwrap();
        let f: Vec<f64> = c.t.iter().map(|t| (2.0 * t).sin() + 1.0).collect();
        let g0 = apply_l0(&c, &f).unwrap();
        for eps in [0.1f64, 0.05, 0.025, 0.0125] {
            let g = solve_l(&c, eps, 1.0, &f).unwrap();
            let dev = g.iter().zip(&g0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(dev / (eps * eps * eps.ln().abs()) < 1.0, "eps={eps}: {dev}");
        }
        let again = solve_l(&c, 0.05, 1.0, &f).unwrap();
        assert_eq!(again, solve_l(&c, 0.05, 1.0, &f).unwrap());
    }

    #[test]
    fn dipole_converges_spectrally() {
        let spec = ContourSpec::perturbed_circle(0.3);
        let a: DipoleData<f64> = dipole_strengths(&build_contour(&spec, 128).unwrap()).unwrap();
        let b: DipoleData<f64> = dipole_strengths(&build_contour(&spec, 256).unwrap()).unwrap();
        assert!((a.mu - b.mu).abs() < 1e-10);
    }

    #[test]
    fn ellipse_dipole_matches_added_mass() {
        // Vertical dipole of an ellipse with half-widths A (across) and C (along the stream): A(A+C)/2.
        let c: SampledContour<f64> = build_contour(&ContourSpec::ellipse(2.0, 1.0), 128).unwrap();
        let d: DipoleData<f64> = dipole_strengths(&c).unwrap();
        assert!((d.mu - 3.0).abs() < 1e-10, "{}", d.mu);
        assert!(d.nu.abs() < 1e-12);
        assert!((d.s - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn perturbed_circle_area_plus_dipole() {
        let c: SampledContour<f64> = build_contour(&ContourSpec::perturbed_circle(0.01), 64).unwrap();
        let d: DipoleData<f64> = dipole_strengths(&c).unwrap();
        assert!((2.0 * d.s + PI * d.mu - 3.0 * PI).abs() < 0.01 * 3.0);
    }
}
