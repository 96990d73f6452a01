use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{ModeFamily, SolveOptions};
use crate::contour::WaveguideGeometry;
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, graded_toward_hi, graded_toward_lo, map_rule, uniform_panels};
use crate::scalar::{cplx, creal, lit, to_f64, Real};

/// How the p-integral passes the pole at iσ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridRoute {
    /// An arc over the origin above iσ, with the residue added back analytically.
    Lifted,
    /// The real axis itself with σ-scaled panels near the origin (σ > 0 only).
    RealAxis,
}

/// Quadrature nodes and complex weights for ∫ f(p) dp along the chosen contour.
#[derive(Clone, Debug, PartialEq)]
pub struct PGrid<T> {
    pub family: ModeFamily,
    pub route: GridRoute,
    pub nodes: Vec<Complex<T>>,
    pub weights: Vec<Complex<T>>,
    /// Index of the node −p̄ for each node.
    pub mirror: Vec<usize>,
    pub special_point: Complex<T>,
    pub sigma: T,
    pub k: T,
    /// Height of the arc over the origin (lifted route).
    pub lift: T,
    /// Half-width of the arc base.
    pub arc_half_width: T,
    /// Real pole ±p₁ and indentation radius (embedded family).
    pub indentation: Option<(T, T)>,
    pub p_max: T,
}

impl<T: Real> PGrid<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Complex<T> {
        self.nodes.iter().zip(&self.weights).map(|(&p, &w)| f(p) * w).sum()
    }
}

/// k for a given σ: k² = Λ₁ − σ² (discrete) or Λ₂ − σ² (embedded).
pub fn wavenumber<T: Real>(family: ModeFamily, b: T, sigma: T) -> Result<T> {
    let n: T = match family {
        ModeFamily::Discrete => lit(0.5),
        ModeFamily::Embedded => T::one(),
    };
    let k2 = (n * T::PI() / b).powi(2) - sigma * sigma;
    if !(k2 > T::zero()) {
        return Err(Error::Range(format!("sigma = {} leaves the spectral window", to_f64(sigma))));
    }
    Ok(k2.sqrt())
}

/// Real pole of the embedded kernels: p₁ = √(3π²/4b² − σ²).
pub fn embedded_real_pole<T: Real>(b: T, sigma: T) -> Result<T> {
    let p2 = lit::<T>(0.75) * (T::PI() / b).powi(2) - sigma * sigma;
    if !(p2 > T::zero()) {
        return Err(Error::Range("sigma too large: the real poles ±p1 have merged".into()));
    }
    Ok(p2.sqrt())
}

struct Builder<T> {
    nodes: Vec<Complex<T>>,
    weights: Vec<Complex<T>>,
}

impl<T: Real> Builder<T> {
    fn gl(&mut self, rule: &(Vec<T>, Vec<T>), lo: T, hi: T) {
        for (x, w) in map_rule(rule, lo, hi) {
            self.nodes.push(creal(x));
            self.weights.push(creal(w));
        }
    }

    /// p = k sin u on [pa, pb] ⊂ [0, k]: smooths the approach to the branch point from inside.
    fn sine(&mut self, rule: &(Vec<T>, Vec<T>), k: T, pa: T, pb: T) {
        let ua = (pa / k).min(T::one()).asin();
        let ub = (pb / k).min(T::one()).asin();
        for (u, w) in map_rule(rule, ua, ub) {
            self.nodes.push(creal(k * u.sin()));
            self.weights.push(creal(w * k * u.cos()));
        }
    }

    /// p = k cosh u on [k, pb]: absorbs the 1/τ endpoint singularity from outside.
    fn hyperbolic(&mut self, rule: &(Vec<T>, Vec<T>), k: T, pb: T, pieces: usize) {
        let umax = (pb / k).acosh();
        let step = umax / lit(pieces as f64);
        for i in 0..pieces {
            let lo = step * lit(i as f64);
            for (u, w) in map_rule(rule, lo, lo + step) {
                self.nodes.push(creal(k * u.cosh()));
                self.weights.push(creal(w * k * u.sinh()));
            }
        }
    }

    /// Lower semicircle p = c + ρe^{iφ}, φ ∈ [π, 2π].
    fn lower_arc(&mut self, rule: &(Vec<T>, Vec<T>), c: T, rho: T) {
        for (phi, w) in map_rule(rule, T::PI(), T::TAU()) {
            let e = cplx(phi.cos(), phi.sin());
            self.nodes.push(creal::<T>(c) + e * rho);
            self.weights.push(cplx(T::zero(), rho) * e * w);
        }
    }
}

/// Builds the symmetric p-grid for a trial σ.
///
/// `max_abs_y` is max|Y| over the contour; it fixes the decay rate 2(b − |a| − ε max|Y|) of the
/// kernel products and hence the truncation point.
pub fn build_pgrid<T: Real>(
    family: ModeFamily,
    g: &WaveguideGeometry<T>,
    max_abs_y: T,
    sigma: T,
    opts: &SolveOptions,
    route: GridRoute,
) -> Result<PGrid<T>> {
    let b = g.b;
    let k = wavenumber(family, b, sigma)?;
    let rate = lit::<T>(2.0) * (b - g.a.abs() - g.eps * max_abs_y);
    if !(rate > T::zero()) {
        return Err(Error::Geometry("obstacle touches a wall".into()));
    }
    let p_max = lit::<T>(opts.decay_cutoff) / rate;
    if lit::<T>(2.0) * b * p_max > lit(650.0) {
        return Err(Error::Range(format!(
            "kernel decay rate {} too slow: truncation at p = {} would overflow",
            to_f64(rate),
            to_f64(p_max)
        )));
    }
    let (p1_pole, arc_half_width) = match family {
        ModeFamily::Discrete => (None, lit::<T>(0.6) * k),
        ModeFamily::Embedded => {
            let p1 = embedded_real_pole(b, sigma)?;
            (Some(p1), lit::<T>(0.4) * p1)
        }
    };
    // A circular arc: its parametrization keeps the pole at iσ far from the φ-interval.
    let lift = arc_half_width;
    match route {
        GridRoute::Lifted => {
            if sigma.abs() > lit::<T>(0.6) * lift {
                return Err(Error::Range(format!(
                    "|sigma| = {} too large for the lifted contour (limit {})",
                    to_f64(sigma.abs()),
                    to_f64(lit::<T>(0.6) * lift)
                )));
            }
        }
        GridRoute::RealAxis => {
            if !(sigma > T::zero()) {
                return Err(Error::Precondition("the real-axis route needs sigma > 0".into()));
            }
        }
    }
    let r = opts.refine.max(1);
    let panel = gauss_legendre::<T>(opts.panel_nodes * r);
    let bump_rule = gauss_legendre::<T>(opts.bump_nodes * r);
    let indent_rule = gauss_legendre::<T>(opts.indent_nodes * r);

    let indentation = p1_pole.map(|p1| {
        let default = lit::<T>(0.1).min(p1 / lit(10.0));
        (p1, opts.indent_radius.map_or(default, |r| lit::<T>(r).min(p1 / lit(2.0))))
    });

    // Positive half-line from the arc's foot outward; mirrored afterwards.
    let mut half = Builder { nodes: Vec::new(), weights: Vec::new() };
    let q = arc_half_width;
    let unit = T::one() / b;
    if route == GridRoute::RealAxis {
        let mut lo = T::zero();
        let mut len = sigma.min(q);
        while lo < q {
            let hi = (lo + len).min(q);
            half.gl(&panel, lo, hi);
            lo = hi;
            len *= lit(2.0);
        }
    }
    match indentation {
        None => half.sine(&panel, k, q, k),
        Some((p1, rho)) => {
            for (lo, hi) in graded_toward_hi(q, p1 - rho, rho, lit::<T>(0.5) * unit) {
                half.gl(&panel, lo, hi);
            }
            half.lower_arc(&indent_rule, p1, rho);
            for (lo, hi) in graded_toward_lo(p1 + rho, k, rho, lit::<T>(0.5) * unit) {
                half.sine(&panel, k, lo, hi);
            }
        }
    }
    let shoulder = k + unit;
    half.hyperbolic(&panel, k, shoulder, 2);
    let tail_len = (lit::<T>(opts.tail_panel) * unit).min(lit::<T>(6.0) / rate);
    for (lo, hi) in uniform_panels(shoulder, p_max.max(shoulder + unit), tail_len) {
        half.gl(&panel, lo, hi);
    }

    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    if route == GridRoute::Lifted {
        let quarter = T::FRAC_PI_4();
        for piece in 0..4 {
            let lo = quarter * lit(piece as f64);
            for (phi, w) in map_rule(&bump_rule, lo, lo + quarter) {
                let (s, c) = phi.sin_cos();
                nodes.push(cplx(-q * c, lift * s));
                weights.push(cplx(q * s, lift * c) * w);
            }
        }
    }
    let nb = nodes.len();
    let nh = half.nodes.len();
    nodes.extend(half.nodes.iter().copied());
    weights.extend(half.weights.iter().copied());
    nodes.extend(half.nodes.iter().map(|p| -p.conj()));
    weights.extend(half.weights.iter().map(|w| w.conj()));
    let mut mirror: Vec<usize> = (0..nb).map(|i| nb - 1 - i).collect();
    mirror.extend((0..nh).map(|i| nb + nh + i));
    mirror.extend((0..nh).map(|i| nb + i));

    Ok(PGrid {
        family,
        route,
        nodes,
        weights,
        mirror,
        special_point: cplx(T::zero(), sigma),
        sigma,
        k,
        lift,
        arc_half_width,
        indentation,
        p_max,
    })
}
