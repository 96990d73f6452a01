use num_complex::Complex;

use super::pgrid::wavenumber;
use super::{GridRoute, ModeFamily};
use crate::contour::WaveguideGeometry;
use crate::error::Result;
use crate::scalar::{cplx, creal, expm1_over, lit, sinhc, Real};
use crate::specfun::tau;

/// Wall/obstacle coupling kernels for one (family, geometry, σ).
///
/// `inbound` maps wall spectra to obstacle forcing (P₁, P₂ or Q₁, Q₂); `outbound` maps the
/// obstacle density to wall spectra (P₃, P₄ or Q₃, Q₄). Functions of τ² are evaluated in
/// overflow-safe forms; the non-even parts use the arithmetic branch, valid for |Re p| > k.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kernels<T> {
    pub family: ModeFamily,
    pub b: T,
    pub a: T,
    pub eps: T,
    pub k: T,
    pub sigma: T,
}

/// Replaces τ by ±τ with Re ≥ 0; valid for functions even in τ.
fn even_rep<T: Real>(t: Complex<T>) -> Complex<T> {
    if t.re < T::zero() {
        -t
    } else {
        t
    }
}

/// sinh(hτ)/sinh(Bτ) for 0 ≤ h, evaluated stably.
fn sinh_ratio<T: Real>(h: T, big: T, t: Complex<T>) -> Complex<T> {
    let t = even_rep(t);
    if t.re * big > T::one() {
        let one = creal::<T>(T::one());
        (t * (h - big)).exp() * (one - (t * (-lit::<T>(2.0) * h)).exp()) / (one - (t * (-lit::<T>(2.0) * big)).exp())
    } else {
        sinhc(t * h) * h / (sinhc(t * big) * big)
    }
}

/// τ·cosh(hτ)/sinh(Bτ), evaluated stably.
fn tau_cosh_ratio<T: Real>(h: T, big: T, t: Complex<T>) -> Complex<T> {
    let t = even_rep(t);
    if t.re * big > T::one() {
        let one = creal::<T>(T::one());
        t * (t * (h - big)).exp() * (one + (t * (-lit::<T>(2.0) * h)).exp())
            / (one - (t * (-lit::<T>(2.0) * big)).exp())
    } else {
        (t * h).cosh() / (sinhc(t * big) * big)
    }
}

/// sinh(hτ)/τ.
fn sinh_over_tau<T: Real>(h: T, t: Complex<T>) -> Complex<T> {
    sinhc(t * h) * h
}

impl<T: Real> Kernels<T> {
    pub fn new(family: ModeFamily, g: &WaveguideGeometry<T>, sigma: T) -> Result<Self> {
        let k = wavenumber(family, g.b, sigma)?;
        Ok(Kernels { family, b: g.b, a: g.a, eps: g.eps, k, sigma })
    }

    /// Distances (b − a − εY, b + a + εY) from the point at height a + εY to the walls.
    fn heights(&self, y: T) -> (T, T) {
        let c = self.a + self.eps * y;
        (self.b - c, self.b + c)
    }

    fn outside(&self, p: Complex<T>) -> bool {
        p.re.abs() > self.k
    }

    /// (P₁, P₂) or (Q₁, Q₂) at spectral point p and obstacle point (X, Y).
    pub fn inbound(&self, p: Complex<T>, x: T, y: T) -> (Complex<T>, Complex<T>) {
        let t = tau(p, self.k);
        let (hm, hp) = self.heights(y);
        let phase = (cplx(T::zero(), self.eps * x) * p).exp() / lit::<T>(4.0 * std::f64::consts::PI);
        let two = lit::<T>(2.0);
        let one = creal::<T>(T::one());
        let outside = self.outside(p);
        let profile = |h: T| -> Complex<T> {
            match self.family {
                ModeFamily::Discrete => {
                    let b = self.b;
                    if outside {
                        if t.re * b > T::one() {
                            (t * (-(h + b))).exp() * lit::<T>(4.0) / (t * (one + (t * (-two * b)).exp()))
                        } else {
                            (t * (-h)).exp() * two / (t * (t * b).cosh())
                        }
                    } else {
                        -sinhc(t * h) * (two * h) / even_rep(t * b).cosh()
                    }
                }
                ModeFamily::Embedded => {
                    let bb = two * self.b;
                    if outside {
                        if t.re * bb > T::one() {
                            (t * (-(h + bb))).exp() * lit::<T>(4.0) / (one - (t * (-two * bb)).exp())
                        } else {
                            (t * (-h)).exp() * two / (t * bb).sinh()
                        }
                    } else {
                        -sinh_ratio(h, bb, t) * two
                    }
                }
            }
        };
        (phase * profile(hm), phase * profile(hp))
    }

    /// (P₃, P₄) or (Q₃, Q₄) at spectral point p for the obstacle point (X, Y) with tangent (Ẋ, Ẏ).
    pub fn outbound(&self, p: Complex<T>, x: T, y: T, xd: T, yd: T) -> (Complex<T>, Complex<T>) {
        let t = tau(p, self.k);
        let (hm, hp) = self.heights(y);
        let phase = (cplx(T::zero(), -self.eps * x) * p).exp();
        let ipyd = cplx(T::zero(), yd) * p;
        match self.family {
            ModeFamily::Discrete => {
                let half = phase / lit::<T>(2.0);
                let b = self.b;
                let p3 = half * (ipyd * sinh_ratio(hp, b, t) + tau_cosh_ratio(hp, b, t) * xd);
                let p4 = half * (ipyd * sinh_ratio(hm, b, t) - tau_cosh_ratio(hm, b, t) * xd);
                (p3, p4)
            }
            ModeFamily::Embedded => {
                let te = even_rep(t);
                let q3 = phase * (ipyd * sinh_over_tau(hp, te) + (te * hp).cosh() * xd);
                let q4 = phase * (ipyd * sinh_over_tau(hm, te) - (te * hm).cosh() * xd);
                (q3, q4)
            }
        }
    }

    /// R(t): the obstacle-side factor of the residue at p = iσ.
    pub fn residue_coefficient(&self, y: T) -> T {
        let c = self.a + self.eps * y;
        match self.family {
            ModeFamily::Discrete => -(T::FRAC_PI_2() * c / self.b).cos() / self.b,
            ModeFamily::Embedded => T::PI() / (lit::<T>(2.0) * self.b * self.b) * (T::PI() * c / self.b).sin(),
        }
    }

    /// s in A₁(iσ) + s·A₂(iσ): +1 for the discrete family, −1 for the embedded one.
    pub fn residue_sign(&self) -> T {
        match self.family {
            ModeFamily::Discrete => T::one(),
            ModeFamily::Embedded => -T::one(),
        }
    }

    /// Coefficient c(t) multiplying A₁(iσ) + s·A₂(iσ) in the subtracted operator T̂₁.
    ///
    /// On the real axis this is −R/σ. When the contour passes above iσ, the residue
    /// e^{−σεX}R/σ is added back, leaving R(e^{−σεX} − 1)/σ, which stays finite as σ → 0.
    pub fn subtraction_weight(&self, x: T, y: T, route: GridRoute) -> T {
        let r = self.residue_coefficient(y);
        match route {
            GridRoute::RealAxis => -r / self.sigma,
            GridRoute::Lifted => -r * self.eps * x * expm1_over(-self.sigma * self.eps * x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::tau_check;
    use std::f64::consts::PI;

    fn kernels(family: ModeFamily) -> Kernels<f64> {
        Kernels::new(family, &WaveguideGeometry::new(1.0, 0.3, 0.05), 0.02).unwrap()
    }

    #[test]
    fn outbound_is_real_at_the_special_point() {
        for family in [ModeFamily::Discrete, ModeFamily::Embedded] {
            let kk = kernels(family);
            let (a, b) = kk.outbound(Complex::new(0.0, kk.sigma), 0.7, -0.4, 0.3, 0.9);
            assert!(a.im.abs() < 1e-14 && b.im.abs() < 1e-14, "{a} {b}");
            // Coincide (discrete) or are opposite (embedded) at iσ.
            let s = kk.residue_sign();
            assert!((a - b * s).norm() < 1e-13 * a.norm().max(1.0), "{a} {b}");
        }
    }

    /// The outbound kernels are even in τ, hence continuous across |Re p| = k where the
    /// evaluation form switches. (The inbound ones carry a one-sided 1/τ singularity there.)
    #[test]
    fn continuous_across_the_branch_points() {
        for family in [ModeFamily::Discrete, ModeFamily::Embedded] {
            let kk = kernels(family);
            for d in [1e-9, 1e-7] {
                let lo = Complex::new(kk.k - d, 0.0);
                let hi = Complex::new(kk.k + d, 0.0);
                let (a0, b0) = kk.outbound(lo, 0.3, 0.2, -0.5, 0.8);
                let (a1, b1) = kk.outbound(hi, 0.3, 0.2, -0.5, 0.8);
                assert!((a0 - a1).norm() < 1e-5 && (b0 - b1).norm() < 1e-5, "{family:?} {d}: {a0} {a1} {b0} {b1}");
            }
        }
    }

    /// The profiles agree with the two-branch sums they abbreviate, e.g.
    /// e^{−hτ}/τ + e^{−hτ̌}/τ̌ and e^{−hτ}/sinh 2bτ + e^{−hτ̌}/sinh 2bτ̌.
    #[test]
    fn profiles_match_two_branch_sums() {
        let pts = [
            Complex::new(0.4, 0.3),
            Complex::new(-0.9, 0.2),
            Complex::new(2.5, 0.0),
            Complex::new(-4.0, 0.0),
            Complex::new(0.7, -0.05),
            Complex::new(1.2, 0.0),
        ];
        for family in [ModeFamily::Discrete, ModeFamily::Embedded] {
            let kk = kernels(family);
            for &p in &pts {
                let (t, tc) = (tau(p, kk.k), tau_check(p, kk.k));
                let (x, y) = (0.4, -0.3);
                let (hm, hp) = kk.heights(y);
                let phase = (Complex::new(0.0, kk.eps * x) * p).exp() / (4.0 * PI);
                let sum = |h: f64| match family {
                    ModeFamily::Discrete => ((-h * t).exp() / t + (-h * tc).exp() / tc) / (t * kk.b).cosh(),
                    ModeFamily::Embedded => {
                        (-h * t).exp() / (2.0 * kk.b * t).sinh() + (-h * tc).exp() / (2.0 * kk.b * tc).sinh()
                    }
                };
                let (q1, q2) = kk.inbound(p, x, y);
                assert!((q1 - phase * sum(hm)).norm() < 1e-12 * q1.norm().max(1.0), "{family:?} {p}: {q1}");
                assert!((q2 - phase * sum(hp)).norm() < 1e-12 * q2.norm().max(1.0));
            }
        }
    }

    /// Evaluating through τ̌ instead of τ changes nothing in the even kernels.
    #[test]
    fn branch_choice_is_irrelevant_for_even_kernels() {
        let kk = kernels(ModeFamily::Embedded);
        for re in [-3.0, -1.0, 0.2, 0.9, 2.0, 3.5] {
            for im in [-0.3, 0.1, 0.4] {
                let p = Complex::new(re, im);
                let (t, tc) = (tau(p, kk.k), tau_check(p, kk.k));
                let f = |s: Complex<f64>| s / (2.0 * kk.b * s).sinh();
                assert!((f(t) - f(tc)).norm() < 1e-12 * f(t).norm().max(1.0), "{p}: {t} {tc}");
                let via = |s: Complex<f64>| sinh_ratio(1.3, 2.0, s);
                assert!((via(t) - via(tc)).norm() < 1e-12 * via(t).norm().max(1.0));
            }
        }
    }

    #[test]
    fn stable_forms_match_direct_ones() {
        for t in [Complex::new(0.3, 0.8), Complex::new(2.5, -0.4), Complex::new(0.0, 1.1), Complex::new(7.0, 0.2)] {
            let direct = (t * 1.4).sinh() / (t * 1.0).sinh();
            assert!((sinh_ratio(1.4, 1.0, t) - direct).norm() < 1e-12 * direct.norm());
            let direct = t * (t * 0.6).cosh() / (t * 1.0).sinh();
            assert!((tau_cosh_ratio(0.6, 1.0, t) - direct).norm() < 1e-12 * direct.norm());
        }
    }

    #[test]
    fn subtraction_weight_is_regular() {
        let g = WaveguideGeometry::new(1.0, 0.8, 0.02);
        let mut prev: Option<f64> = None;
        for sigma in [1e-3, 1e-6, 1e-9, 0.0] {
            let kk = Kernels::new(ModeFamily::Discrete, &g, sigma).unwrap();
            let c = kk.subtraction_weight(0.7, 0.1, GridRoute::Lifted);
            if let Some(p) = prev {
                assert!((c - p).abs() < 1e-4);
            }
            prev = Some(c);
        }
    }
}
