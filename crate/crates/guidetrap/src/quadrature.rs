//! Gauss–Legendre rules and panel helpers.

use crate::scalar::{from_usize, lit, Real};

/// Gauss–Legendre nodes and weights on [-1, 1], ascending.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut x = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let nf: T = from_usize(n);
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let fi: T = from_usize(i);
        let mut z = (T::PI() * (fi + lit(0.75)) / (nf + lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (mut p0, mut p1) = (T::one(), z);
            for j in 2..=n {
                let jf: T = from_usize(j);
                let p2 = ((lit::<T>(2.0) * jf - T::one()) * z * p1 - (jf - T::one()) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pnm1 = if n == 1 { T::one() } else { p0 };
            dp = nf * (z * pn - pnm1) / (z * z - T::one());
            let dz = pn / dp;
            z -= dz;
            if dz.abs() <= T::epsilon() * lit(4.0) {
                break;
            }
        }
        let wi = lit::<T>(2.0) / ((T::one() - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = T::zero();
    }
    (x, w)
}

/// Maps a reference rule onto [lo, hi].
pub fn map_rule<T: Real>(rule: &(Vec<T>, Vec<T>), lo: T, hi: T) -> impl Iterator<Item = (T, T)> + '_ {
    let half = (hi - lo) / lit(2.0);
    let mid = (hi + lo) / lit(2.0);
    rule.0.iter().zip(&rule.1).map(move |(&x, &w)| (mid + half * x, half * w))
}

/// Splits [lo, hi] into equal panels no longer than `max_len`.
pub fn uniform_panels<T: Real>(lo: T, hi: T, max_len: T) -> Vec<(T, T)> {
    let len = hi - lo;
    if len <= T::zero() {
        return Vec::new();
    }
    let count = (len / max_len).ceil().to_usize().unwrap_or(1).max(1);
    let h = len / from_usize(count);
    (0..count).map(|i| (lo + h * from_usize(i), lo + h * from_usize(i + 1))).collect()
}

/// Panels on [lo, hi] whose lengths double away from `hi` starting at `first`, then cap at `max_len`.
pub fn graded_toward_hi<T: Real>(lo: T, hi: T, first: T, max_len: T) -> Vec<(T, T)> {
    let mut out = Vec::new();
    let mut right = hi;
    let mut len = first;
    while right - lo > len * lit(1.5) {
        out.push((right - len, right));
        right -= len;
        len = (len * lit(2.0)).min(max_len);
    }
    if right > lo {
        out.push((lo, right));
    }
    out.reverse();
    out
}

/// Mirror image of [`graded_toward_hi`]: fine panels next to `lo`.
pub fn graded_toward_lo<T: Real>(lo: T, hi: T, first: T, max_len: T) -> Vec<(T, T)> {
    graded_toward_hi(-hi, -lo, first, max_len).into_iter().rev().map(|(a, b)| (-b, -a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let rule = gauss_legendre::<f64>(12);
        for deg in 0..24usize {
            let q: f64 = rule.0.iter().zip(&rule.1).map(|(x, w)| w * x.powi(deg as i32)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "deg {deg}: {q} vs {exact}");
        }
    }

    #[test]
    fn odd_rules_have_centre_node() {
        let (x, w) = gauss_legendre::<f64>(5);
        assert_eq!(x[2], 0.0);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn graded_panels_cover_interval() {
        let p = graded_toward_hi(0.0f64, 1.0, 0.01, 0.3);
        assert!((p[0].0 - 0.0).abs() < 1e-15 && (p.last().unwrap().1 - 1.0).abs() < 1e-15);
        assert!((p.last().unwrap().1 - p.last().unwrap().0 - 0.01).abs() < 1e-15);
        for w in p.windows(2) {
            assert!((w[0].1 - w[1].0).abs() < 1e-15);
        }
        let q = graded_toward_lo(0.0f64, 1.0, 0.01, 0.3);
        assert!((q[0].1 - 0.01).abs() < 1e-15);
    }
}
