//! Cylinder functions of real argument and the two branches of √(p² − k²).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cplx, from_usize, lit, to_f64, Real};

/// Euler–Mascheroni constant, 20 significant digits.
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

/// J₀, N₀ and their derivatives at a real argument.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylinderValues<T> {
    pub j0: T,
    pub y0: T,
    /// J₀′ = −J₁.
    pub j0_prime: T,
    /// N₀′ = −N₁.
    pub y0_prime: T,
}

/// Below this the ascending series is used.
const SERIES_LIMIT: f64 = 1.0;
/// At and above this the Hankel expansion is used; between the two, Miller's recurrence.
const HANKEL_LIMIT: f64 = 25.0;

pub fn cylinder_values<T: Real>(x: T) -> Result<CylinderValues<T>> {
    if !(x > T::zero()) {
        return Err(Error::Domain(format!("cylinder functions need x > 0, got {}", to_f64(x))));
    }
    if x > lit(1e4) {
        return Err(Error::Range(format!("argument {} above 1e4", to_f64(x))));
    }
    let [j0, j1, y0, y1] = bessel01(x);
    Ok(CylinderValues { j0, y0, j0_prime: -j1, y0_prime: -y1 })
}

/// [J₀, J₁, Y₀, Y₁] at x > 0.
pub(crate) fn bessel01<T: Real>(x: T) -> [T; 4] {
    if x < lit(SERIES_LIMIT) {
        ascending(x)
    } else if x < lit(HANKEL_LIMIT) {
        miller(x)
    } else {
        hankel_real(x)
    }
}

fn ascending<T: Real>(x: T) -> [T; 4] {
    let g: T = lit(EULER_GAMMA);
    let half = x / lit(2.0);
    let q = -half * half;
    let lg = half.ln();
    // term_k = q^k / (k!)^2 drives J0; term_k/(k+1) drives J1/(x/2).
    let (mut j0, mut j1s, mut y0s, mut y1s) = (T::zero(), T::zero(), T::zero(), T::zero());
    let mut term = T::one();
    let mut harmonic = T::zero();
    for k in 0..40usize {
        let kf: T = from_usize(k);
        if k > 0 {
            term = term * q / (kf * kf);
            harmonic += T::one() / kf;
        }
        let t1 = term / (kf + T::one());
        j0 += term;
        j1s += t1;
        // Σ_{k≥1} (−1)^{k+1} H_k (x²/4)^k/(k!)² = −Σ H_k q^k/(k!)².
        y0s -= harmonic * term;
        // ψ(k+1) + ψ(k+2) = 2H_k + 1/(k+1) − 2γ.
        y1s += (lit::<T>(2.0) * harmonic + T::one() / (kf + T::one()) - lit::<T>(2.0) * g) * t1;
        if term.abs() < T::epsilon() * lit(1e-3) {
            break;
        }
    }
    let j1 = half * j1s;
    let two_pi = lit::<T>(2.0) / T::PI();
    let y0 = two_pi * ((lg + g) * j0 + y0s);
    let y1 = two_pi * j1 * lg - two_pi / x - half * y1s / T::PI();
    [j0, j1, y0, y1]
}

fn miller<T: Real>(x: T) -> [T; 4] {
    let xf = to_f64(x);
    let mut n = (1.5 * xf + 30.0).ceil() as usize;
    n += n % 2;
    let big: T = T::max_value().sqrt().sqrt();
    let mut j = vec![T::zero(); n + 2];
    j[n] = T::min_positive_value().sqrt().sqrt();
    for m in (1..=n).rev() {
        let v = lit::<T>(2.0) * from_usize::<T>(m) / x * j[m] - j[m + 1];
        j[m - 1] = v;
        if v.abs() > big {
            for e in j[m - 1..].iter_mut() {
                *e /= big;
            }
        }
    }
    let mut norm = j[0];
    let (mut sy0, mut sy1) = (T::zero(), T::zero());
    let mut k = 1usize;
    while 2 * k <= n {
        let sign = if k % 2 == 1 { T::one() } else { -T::one() };
        let kf: T = from_usize(k);
        norm += lit::<T>(2.0) * j[2 * k];
        sy0 += sign * j[2 * k] / kf;
        sy1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / kf;
        k += 1;
    }
    let (j0, j1) = (j[0] / norm, j[1] / norm);
    let (sy0, sy1) = (sy0 / norm, sy1 / norm);
    let lg = (x / lit(2.0)).ln() + lit(EULER_GAMMA);
    let two_pi = lit::<T>(2.0) / T::PI();
    let y0 = two_pi * (lg * j0 + lit::<T>(2.0) * sy0);
    let y1 = -two_pi * (j0 / x - lg * j1 + sy1);
    [j0, j1, y0, y1]
}

/// Asymptotic P, Q for order ν at large real x.
fn hankel_pq<T: Real>(nu: usize, x: T) -> (T, T) {
    let mu: T = lit::<T>(4.0) * from_usize::<T>(nu * nu);
    let (mut p, mut q) = (T::zero(), T::zero());
    let mut a = T::one();
    let mut last = T::infinity();
    for k in 0..60usize {
        let term = a;
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < T::epsilon() * lit(1e-2) {
            break;
        }
        let odd: T = from_usize(2 * k + 1);
        a = a * (mu - odd * odd) / (from_usize::<T>(k + 1) * lit(8.0) * x);
    }
    (p, q)
}

fn hankel_real<T: Real>(x: T) -> [T; 4] {
    let amp = (lit::<T>(2.0) / (T::PI() * x)).sqrt();
    let mut out = [T::zero(); 4];
    for nu in 0..2usize {
        let chi = x - (from_usize::<T>(nu) / lit(2.0) + lit(0.25)) * T::PI();
        let (p, q) = hankel_pq(nu, x);
        let (s, c) = chi.sin_cos();
        out[nu] = amp * (p * c - q * s);
        out[nu + 2] = amp * (p * s + q * c);
    }
    out
}

/// Hankel function H_ν^{(1)} (first kind) or H_ν^{(2)} (second kind), ν ∈ {0, 1}, at large complex z.
///
/// Valid where |z| is large and the sector keeps the exponential factor bounded; used by the
/// Fourier-transform identity checks on complex integration tails.
pub fn hankel_asymptotic<T: Real>(nu: usize, z: Complex<T>, first_kind: bool) -> Complex<T> {
    let dir = if first_kind { cplx(T::zero(), T::one()) } else { cplx(T::zero(), -T::one()) };
    hankel_asymptotic_scaled(nu, z, first_kind) * (dir * z).exp()
}

/// H_ν^{(1,2)}(z)·e^{∓iz}: the slowly varying factor, for callers that must merge the oscillatory
/// exponential with others before evaluating it.
pub fn hankel_asymptotic_scaled<T: Real>(nu: usize, z: Complex<T>, first_kind: bool) -> Complex<T> {
    let mu: T = lit::<T>(4.0) * from_usize::<T>(nu * nu);
    let i = cplx(T::zero(), T::one());
    let dir = if first_kind { i } else { -i };
    let mut sum = cplx(T::zero(), T::zero());
    let mut term = cplx(T::one(), T::zero());
    let mut last = T::infinity();
    for k in 0..60usize {
        if term.norm() > last {
            break;
        }
        last = term.norm();
        sum += term;
        if term.norm() < T::epsilon() * lit(1e-2) {
            break;
        }
        let odd: T = from_usize(2 * k + 1);
        term = term * dir * (mu - odd * odd) / (z * (from_usize::<T>(k + 1) * lit(8.0)));
    }
    let phase = -T::PI() * (from_usize::<T>(nu) / lit(2.0) + lit(0.25));
    (cplx(lit::<T>(2.0) / T::PI(), T::zero()) / z).sqrt() * (dir * phase).exp() * sum
}

/// Three-term small-argument expansion of N₀′(r) and the remainder N₀′(r) − expansion.
pub fn n0_prime_expansion<T: Real>(r: T) -> Result<(T, T)> {
    if !(r > T::zero()) {
        return Err(Error::Domain(format!("expansion needs r > 0, got {}", to_f64(r))));
    }
    if r >= lit(0.5) {
        return Err(Error::Range(format!("expansion not accurate for r = {} ≥ 0.5", to_f64(r))));
    }
    let half = r / lit(2.0);
    let value = lit::<T>(2.0) / T::PI() * (T::one() / r - half * half.ln() + half * (lit::<T>(0.5) - lit(EULER_GAMMA)));
    let exact = -bessel01(r)[3];
    Ok((value, exact - value))
}

/// Splits N₀′(x) = 2/(πx) − (2/π) J₁(x) ln(x/2) + reg(x) for small x; returns (J₁(x), reg(x)).
///
/// Both parts are entire, odd power series, so they can be evaluated at any x ≥ 0 including 0.
pub fn n0_prime_split<T: Real>(x: T) -> (T, T) {
    let g: T = lit(EULER_GAMMA);
    let half = x / lit(2.0);
    let q = -half * half;
    let (mut j1s, mut regs) = (T::zero(), T::zero());
    let mut term = T::one();
    let mut harmonic = T::zero();
    for k in 0..40usize {
        let kf: T = from_usize(k);
        if k > 0 {
            term = term * q / (kf * kf);
            harmonic += T::one() / kf;
        }
        let t1 = term / (kf + T::one());
        j1s += t1;
        regs += (lit::<T>(2.0) * harmonic + T::one() / (kf + T::one()) - lit::<T>(2.0) * g) * t1;
        if term.abs() < T::epsilon() * lit(1e-3) {
            break;
        }
    }
    (half * j1s, half * regs / T::PI())
}

/// Which continuation of √(p² − k²) to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Cuts from +k upward and from −k downward; −i√(k²−p²) on (−k, k).
    Tau,
    /// Mirror image: cuts from +k downward and from −k upward; +i√(k²−p²) on (−k, k).
    TauCheck,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchValue<T> {
    pub value: Complex<T>,
    pub branch: Branch,
    pub p: Complex<T>,
    pub k: T,
}

/// √z with arg z taken in [lo, lo + 2π) (`closed_lo`) or (lo, lo + 2π].
fn sqrt_with_cut<T: Real>(z: Complex<T>, lo: T, closed_lo: bool) -> Complex<T> {
    let r = z.norm();
    if r == T::zero() {
        return cplx(T::zero(), T::zero());
    }
    let mut th = z.im.atan2(z.re);
    let hi = lo + T::TAU();
    if closed_lo {
        while th < lo {
            th += T::TAU();
        }
        while th >= hi {
            th -= T::TAU();
        }
    } else {
        while th <= lo {
            th += T::TAU();
        }
        while th > hi {
            th -= T::TAU();
        }
    }
    Complex::from_polar(r.sqrt(), th / lit(2.0))
}

/// τ(p): equals the arithmetic root for real p > k. On a cut it takes the limit from the side facing Re p = 0.
pub fn tau<T: Real>(p: Complex<T>, k: T) -> Complex<T> {
    let h = T::FRAC_PI_2();
    let z = sqrt_with_cut(p - k, -lit::<T>(3.0) * h, true);
    let w = sqrt_with_cut(p + k, -h, true);
    z * w
}

/// τ̌(p): the mirrored branch, equal to τ for |Re p| > k and to −τ between the cuts.
pub fn tau_check<T: Real>(p: Complex<T>, k: T) -> Complex<T> {
    let h = T::FRAC_PI_2();
    let z = sqrt_with_cut(p - k, -h, false);
    let w = sqrt_with_cut(p + k, -lit::<T>(3.0) * h, false);
    z * w
}

pub fn branch_value<T: Real>(p: Complex<T>, k: T, branch: Branch) -> BranchValue<T> {
    let value = match branch {
        Branch::Tau => tau(p, k),
        Branch::TauCheck => tau_check(p, k),
    };
    BranchValue { value, branch, p, k }
}

/// τ(p) together with the relation between the branches: `true` when τ̌ = τ, `false` when τ̌ = −τ.
pub fn tau_pair<T: Real>(p: Complex<T>, k: T) -> (Complex<T>, bool) {
    let t = tau(p, k);
    let tc = tau_check(p, k);
    (t, (tc - t).norm() <= (tc + t).norm())
}
