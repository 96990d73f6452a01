use num_complex::Complex;
use serde::Serialize;

use super::kernels::Kernels;
use super::system::DiscretizedSystem;
use super::ModeFamily;
use crate::contour::SampledContour;
use crate::error::Result;
use crate::quadrature::{gauss_legendre, map_rule, uniform_panels};
use crate::scalar::{cplx, lit, Real};
use crate::specfun::tau;

/// Wall spectra generated by a fixed obstacle density: A(p) = ε∫K(p,t)θ(t)dt at any p.
#[derive(Clone, Debug)]
pub struct ModeSpectrum<T> {
    pub kernels: Kernels<T>,
    pub contour: SampledContour<T>,
    pub theta: Vec<Complex<T>>,
}

impl<T: Real> ModeSpectrum<T> {
    pub fn new(sys: &DiscretizedSystem<T>, theta: &[Complex<T>]) -> Self {
        ModeSpectrum { kernels: sys.kernels, contour: sys.contour.clone(), theta: theta.to_vec() }
    }

    /// (A₁(p), A₂(p)).
    pub fn at(&self, p: Complex<T>) -> (Complex<T>, Complex<T>) {
        let c = &self.contour;
        let mut a1 = Complex::new(T::zero(), T::zero());
        let mut a2 = a1;
        for j in 0..c.n_nodes {
            let (k1, k2) = self.kernels.outbound(p, c.x[j], c.y[j], c.xdot[j], c.ydot[j]);
            a1 += k1 * self.theta[j];
            a2 += k2 * self.theta[j];
        }
        let s = self.kernels.eps * c.weight;
        (a1 * s, a2 * s)
    }

    /// Transforms of the wall Neumann data, (φ̃, ψ̃): A/cosh bτ, or τA/sinh 2bτ when embedded.
    pub fn wall_transforms(&self, p: Complex<T>) -> (Complex<T>, Complex<T>) {
        let (a1, a2) = self.at(p);
        let t = tau(p, self.kernels.k);
        let b = self.kernels.b;
        let f = match self.kernels.family {
            ModeFamily::Discrete => (t * b).cosh().inv(),
            ModeFamily::Embedded => t / (t * (lit::<T>(2.0) * b)).sinh(),
        };
        (a1 * f, a2 * f)
    }

    /// 2πi × residue factor of the wall transforms at p = ±iσ (same for both signs).
    fn residue_factor(&self) -> T {
        let (b, s) = (self.kernels.b, self.kernels.sigma);
        match self.kernels.family {
            ModeFamily::Discrete => T::PI() * T::PI() / (b * b * s),
            ModeFamily::Embedded => -T::PI().powi(3) / (b * b * b * s),
        }
    }
}

/// Converged mode data: obstacle density, wall spectra, and the real-space wall Neumann data.
#[derive(Clone, Debug, Serialize)]
pub struct ModeTraces<T> {
    pub family: ModeFamily,
    pub sigma: T,
    pub k: T,
    /// Obstacle density θ on the t-grid, normalized so that A₁(iσ) = 1.
    pub theta: Vec<Complex<T>>,
    pub a1_special: Complex<T>,
    pub a2_special: Complex<T>,
    /// A₁(p₁), A₁(−p₁), A₂(p₁), A₂(−p₁) (embedded family).
    pub pole_values: Option<Vec<Complex<T>>>,
    pub p_nodes: Vec<Complex<T>>,
    pub a1: Vec<Complex<T>>,
    pub a2: Vec<Complex<T>>,
    pub x: Vec<T>,
    /// Neumann data on the wall y = b.
    pub phi: Vec<Complex<T>>,
    /// Neumann data on the wall y = −b.
    pub psi: Vec<Complex<T>>,
}

/// Default sampling of the wall traces: x = 0 plus a far-field band on each side reaching 8/σ.
/// The near field between is left to the field reconstruction.
pub fn default_trace_grid<T: Real>(sigma: T, b: T) -> Vec<T> {
    let reach = (lit::<T>(8.0) / sigma.abs()).max(lit::<T>(4.0) * b);
    let start = (lit::<T>(27.0) * b).min(reach / lit(2.0));
    let n = 80;
    let band: Vec<T> = (0..n).map(|i| start + (reach - start) * lit::<T>(i as f64 / (n - 1) as f64)).collect();
    let mut x: Vec<T> = band.iter().rev().map(|v| -*v).collect();
    x.push(T::zero());
    x.extend(band);
    x
}

/// Recovers φ, ψ at the points `x` from θ.
///
/// The real-line inverse transform is moved to Im p = ±h (sign of x); the crossed poles at ±iσ give
/// the e^{−σ|x|} far field exactly. The shifted line is only integrated where e^{−h|x|} matters.
pub fn boundary_traces<T: Real>(sys: &DiscretizedSystem<T>, theta: &[Complex<T>], x: &[T]) -> Result<ModeTraces<T>> {
    let spec = ModeSpectrum::new(sys, theta);
    let b = sys.geometry.b;
    let sigma = sys.sigma;
    let height = lit::<T>(1.5) / b;
    let cutoff = lit::<T>(40.0);
    let reach = x.iter().filter(|v| v.abs() * height < cutoff).fold(T::zero(), |m, v| m.max(v.abs()));
    let decay = b - sys.geometry.a.abs() - sys.geometry.eps * sys.contour.max_abs_y();
    let s_max = lit::<T>(38.0) / decay;
    let panel = (lit::<T>(3.0) / b).min(lit::<T>(6.0) / decay).min(lit::<T>(4.0) / reach.max(T::one()));
    let rule = gauss_legendre::<T>(16);
    let mut line: Vec<(T, T)> = Vec::new();
    for (lo, hi) in uniform_panels(-s_max, s_max, panel) {
        line.extend(map_rule(&rule, lo, hi));
    }
    let need_line = x.iter().any(|v| v.abs() * height < cutoff);
    let (up, down): (Vec<_>, Vec<_>) = if need_line {
        line.iter()
            .map(|&(s, _)| (spec.wall_transforms(cplx(s, height)), spec.wall_transforms(cplx(s, -height))))
            .unzip()
    } else {
        (Vec::new(), Vec::new())
    };
    let factor = spec.residue_factor();
    let (a_up, a_down) = (spec.at(cplx(T::zero(), sigma)), spec.at(cplx(T::zero(), -sigma)));
    let two_pi = T::TAU();
    let mut phi = Vec::with_capacity(x.len());
    let mut psi = Vec::with_capacity(x.len());
    for &xv in x {
        let upper = xv >= T::zero();
        let (vals, h, res) = if upper { (&up, height, a_up) } else { (&down, -height, a_down) };
        let far = (-sigma * xv.abs()).exp() * factor;
        let mut f1 = res.0 * far;
        let mut f2 = res.1 * far;
        if xv.abs() * height < cutoff {
            for ((s, w), (t1, t2)) in line.iter().zip(vals.iter()) {
                let e = (cplx(T::zero(), xv) * cplx(*s, h)).exp() * *w;
                f1 += *t1 * e;
                f2 += *t2 * e;
            }
        }
        phi.push(f1 / two_pi);
        psi.push(f2 / two_pi);
    }
    let wall = sys.wall_spectrum(theta);
    let np = sys.n_nodes();
    Ok(ModeTraces {
        family: sys.family,
        sigma,
        k: sys.kernels.k,
        theta: theta.to_vec(),
        a1_special: wall[2 * np],
        a2_special: wall[2 * np + 1],
        pole_values: sys.pole_values(theta),
        p_nodes: sys.pgrid.nodes.clone(),
        a1: wall[..np].to_vec(),
        a2: wall[np..2 * np].to_vec(),
        x: x.to_vec(),
        phi,
        psi,
    })
}
