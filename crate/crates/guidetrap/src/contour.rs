//! Obstacle boundaries as finite Fourier series, their samples, and the waveguide geometry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, to_f64, Real};

/// X(t) = Σ x_cos[n-1] cos nt + x_sin[n-1] sin nt, likewise Y(t); harmonics start at n = 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec<T> {
    pub x_cos: Vec<T>,
    pub x_sin: Vec<T>,
    pub y_cos: Vec<T>,
    pub y_sin: Vec<T>,
}

/// One harmonic of a contour, with an explicit index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Harmonic {
    pub n: usize,
    #[serde(default)]
    pub x_cos: f64,
    #[serde(default)]
    pub x_sin: f64,
    #[serde(default)]
    pub y_cos: f64,
    #[serde(default)]
    pub y_sin: f64,
}

/// Position, first and second derivatives at one parameter value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint<T> {
    pub x: T,
    pub y: T,
    pub xd: T,
    pub yd: T,
    pub xdd: T,
    pub ydd: T,
}

impl<T: Real> ContourSpec<T> {
    pub fn new(x_cos: Vec<T>, x_sin: Vec<T>, y_cos: Vec<T>, y_sin: Vec<T>) -> Self {
        ContourSpec { x_cos, x_sin, y_cos, y_sin }
    }

    /// Builds a spec from indexed harmonics; an `n = 0` entry would shift the mean and is rejected.
    pub fn from_harmonics(terms: &[Harmonic]) -> Result<Self> {
        let mut spec = ContourSpec::new(vec![], vec![], vec![], vec![]);
        for h in terms {
            if h.n == 0 {
                return Err(Error::Geometry("harmonic n = 0 present: contours must have zero mean".into()));
            }
            for (list, v) in [
                (&mut spec.x_cos, h.x_cos),
                (&mut spec.x_sin, h.x_sin),
                (&mut spec.y_cos, h.y_cos),
                (&mut spec.y_sin, h.y_sin),
            ] {
                if list.len() < h.n {
                    list.resize(h.n, T::zero());
                }
                list[h.n - 1] += lit(v);
            }
        }
        Ok(spec)
    }

    /// Circle of radius `r0`: X = r0 sin t, Y = −r0 cos t.
    pub fn circle(r0: T) -> Self {
        ContourSpec::new(vec![], vec![r0], vec![-r0], vec![])
    }

    /// X = sin t − (β/2) sin 2t, Y = −cos t + (β/2) cos 2t.
    pub fn perturbed_circle(beta: T) -> Self {
        let h = beta / lit(2.0);
        ContourSpec::new(vec![], vec![T::one(), -h], vec![-T::one(), h], vec![])
    }

    /// Ellipse X = ax sin t, Y = −ay cos t.
    pub fn ellipse(ax: T, ay: T) -> Self {
        ContourSpec::new(vec![], vec![ax], vec![-ay], vec![])
    }

    pub fn degree(&self) -> usize {
        [&self.x_cos, &self.x_sin, &self.y_cos, &self.y_sin]
            .iter()
            .map(|v| v.iter().rposition(|c| *c != T::zero()).map_or(0, |i| i + 1))
            .max()
            .unwrap_or(0)
    }

    pub fn is_finite(&self) -> bool {
        [&self.x_cos, &self.x_sin, &self.y_cos, &self.y_sin].iter().all(|v| v.iter().all(|c| c.is_finite()))
    }

    pub fn eval(&self, t: T) -> CurvePoint<T> {
        let (x, xd, xdd) = series(&self.x_cos, &self.x_sin, t);
        let (y, yd, ydd) = series(&self.y_cos, &self.y_sin, t);
        CurvePoint { x, y, xd, yd, xdd, ydd }
    }

    /// Same curve traversed backwards (t → −t).
    pub fn reversed(&self) -> Self {
        ContourSpec::new(
            self.x_cos.clone(),
            self.x_sin.iter().map(|&c| -c).collect(),
            self.y_cos.clone(),
            self.y_sin.iter().map(|&c| -c).collect(),
        )
    }

    pub fn scaled(&self, s: T) -> Self {
        let f = |v: &Vec<T>| v.iter().map(|&c| c * s).collect();
        ContourSpec::new(f(&self.x_cos), f(&self.x_sin), f(&self.y_cos), f(&self.y_sin))
    }
}

fn series<T: Real>(cos: &[T], sin: &[T], t: T) -> (T, T, T) {
    let (mut v, mut d, mut dd) = (T::zero(), T::zero(), T::zero());
    for n in 1..=cos.len().max(sin.len()) {
        let nf: T = from_usize(n);
        let (s, c) = (nf * t).sin_cos();
        let a = cos.get(n - 1).copied().unwrap_or_else(T::zero);
        let b = sin.get(n - 1).copied().unwrap_or_else(T::zero);
        v += a * c + b * s;
        d += nf * (b * c - a * s);
        dd -= nf * nf * (a * c + b * s);
    }
    (v, d, dd)
}

/// Quadrature samples of a contour on t_j = −π + 2πj/n.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledContour<T> {
    pub spec: ContourSpec<T>,
    pub n_nodes: usize,
    pub t: Vec<T>,
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub xdot: Vec<T>,
    pub ydot: Vec<T>,
    pub xddot: Vec<T>,
    pub yddot: Vec<T>,
    pub weight: T,
    /// Extremes of Y over an 8× oversampled grid.
    pub y_range: (T, T),
    /// Set when construction reversed a clockwise spec.
    pub reversed: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Reverse clockwise specs instead of failing.
    pub auto_reverse: bool,
}

pub fn build_contour<T: Real>(spec: &ContourSpec<T>, n_nodes: usize) -> Result<SampledContour<T>> {
    build_contour_with(spec, n_nodes, BuildOptions::default())
}

pub fn build_contour_with<T: Real>(
    spec: &ContourSpec<T>,
    n_nodes: usize,
    opts: BuildOptions,
) -> Result<SampledContour<T>> {
    if n_nodes < 16 || !n_nodes.is_multiple_of(2) {
        return Err(Error::Precondition(format!("n_nodes must be even and ≥ 16, got {n_nodes}")));
    }
    if !spec.is_finite() {
        return Err(Error::Geometry("non-finite Fourier coefficient".into()));
    }
    if spec.degree() == 0 {
        return Err(Error::Geometry("contour has no nonzero harmonic".into()));
    }
    let area = signed_area_exact(spec);
    let (spec, reversed) = if area > T::zero() {
        (spec.clone(), false)
    } else if opts.auto_reverse && area < T::zero() {
        (spec.reversed(), true)
    } else {
        return Err(Error::Orientation(format!(
            "signed area {} is not positive (clockwise or degenerate contour)",
            to_f64(area)
        )));
    };
    check_simple(&spec, 4 * n_nodes)?;

    let h = T::TAU() / from_usize(n_nodes);
    let t: Vec<T> = (0..n_nodes).map(|j| -T::PI() + h * from_usize(j)).collect();
    let pts: Vec<CurvePoint<T>> = t.iter().map(|&tj| spec.eval(tj)).collect();
    let scale = pts.iter().fold(T::zero(), |m, p| m.max(p.x.abs()).max(p.y.abs()));
    for (j, p) in pts.iter().enumerate() {
        if (p.xd * p.xd + p.yd * p.yd).sqrt() <= scale * lit(1e-12) {
            return Err(Error::Geometry(format!("normal vector vanishes at node {j}")));
        }
    }
    let fine = 8 * n_nodes;
    let hf = T::TAU() / from_usize(fine);
    let y_range = (0..fine).fold((T::infinity(), T::neg_infinity()), |(lo, hi), j| {
        let y = spec.eval(hf * from_usize(j)).y;
        (lo.min(y), hi.max(y))
    });
    Ok(SampledContour {
        spec,
        n_nodes,
        x: pts.iter().map(|p| p.x).collect(),
        y: pts.iter().map(|p| p.y).collect(),
        xdot: pts.iter().map(|p| p.xd).collect(),
        ydot: pts.iter().map(|p| p.yd).collect(),
        xddot: pts.iter().map(|p| p.xdd).collect(),
        yddot: pts.iter().map(|p| p.ydd).collect(),
        t,
        weight: h,
        y_range,
        reversed,
    })
}

/// (1/2)∮(XẎ − YẊ)dt in closed form from the coefficients.
fn signed_area_exact<T: Real>(spec: &ContourSpec<T>) -> T {
    // With X = Σ a_n cos + b_n sin, Y = Σ c_n cos + d_n sin: area = π Σ n (a_n d_n − b_n c_n).
    let get = |v: &Vec<T>, i: usize| v.get(i).copied().unwrap_or_else(T::zero);
    let mut s = T::zero();
    for i in 0..spec.degree() {
        let nf: T = from_usize(i + 1);
        s += nf * (get(&spec.x_cos, i) * get(&spec.y_sin, i) - get(&spec.x_sin, i) * get(&spec.y_cos, i));
    }
    s * T::PI()
}

fn check_simple<T: Real>(spec: &ContourSpec<T>, m: usize) -> Result<()> {
    let h = T::TAU() / from_usize(m);
    let pts: Vec<(T, T)> = (0..m)
        .map(|j| {
            let p = spec.eval(h * from_usize(j));
            (p.x, p.y)
        })
        .collect();
    let mut diam = T::zero();
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (T::infinity(), T::neg_infinity(), T::infinity(), T::neg_infinity());
    for p in &pts {
        xmin = xmin.min(p.0);
        xmax = xmax.max(p.0);
        ymin = ymin.min(p.1);
        ymax = ymax.max(p.1);
    }
    diam = diam.max(((xmax - xmin).powi(2) + (ymax - ymin).powi(2)).sqrt());
    let tol = diam * lit(1e-10);
    let seg = |i: usize| (pts[i], pts[(i + 1) % m]);
    let bbox = |i: usize| {
        let (a, b) = seg(i);
        (a.0.min(b.0) - tol, a.0.max(b.0) + tol, a.1.min(b.1) - tol, a.1.max(b.1) + tol)
    };
    let boxes: Vec<_> = (0..m).map(bbox).collect();
    for i in 0..m {
        for j in i + 2..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            let (bi, bj) = (boxes[i], boxes[j]);
            if bi.1 < bj.0 || bj.1 < bi.0 || bi.3 < bj.2 || bj.3 < bi.2 {
                continue;
            }
            let (p, q) = seg(i);
            let (r, s) = seg(j);
            if segments_touch(p, q, r, s, tol) {
                return Err(Error::Geometry(format!("self-intersecting contour: chords {i} and {j} of {m} meet")));
            }
        }
    }
    Ok(())
}

fn segments_touch<T: Real>(p: (T, T), q: (T, T), r: (T, T), s: (T, T), tol: T) -> bool {
    let cross = |o: (T, T), a: (T, T), b: (T, T)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let d1 = cross(r, s, p);
    let d2 = cross(r, s, q);
    let d3 = cross(p, q, r);
    let d4 = cross(p, q, s);
    if ((d1 > T::zero()) != (d2 > T::zero())) && ((d3 > T::zero()) != (d4 > T::zero())) {
        return true;
    }
    let dist =
        point_segment(p, r, s).min(point_segment(q, r, s)).min(point_segment(r, p, q)).min(point_segment(s, p, q));
    dist < tol
}

fn point_segment<T: Real>(p: (T, T), a: (T, T), b: (T, T)) -> T {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let u = if len2 > T::zero() {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    let (ex, ey) = (a.0 + u * dx - p.0, a.1 + u * dy - p.1);
    (ex * ex + ey * ey).sqrt()
}

impl<T: Real> SampledContour<T> {
    pub fn len(&self) -> usize {
        self.n_nodes
    }

    pub fn is_empty(&self) -> bool {
        self.n_nodes == 0
    }

    /// Largest chord between samples.
    pub fn diameter(&self) -> T {
        let mut d = T::zero();
        for i in 0..self.n_nodes {
            for j in i + 1..self.n_nodes {
                d = d.max(((self.x[i] - self.x[j]).powi(2) + (self.y[i] - self.y[j]).powi(2)).sqrt());
            }
        }
        d
    }

    pub fn max_abs_y(&self) -> T {
        self.y_range.0.abs().max(self.y_range.1.abs())
    }

    /// Node index of −t_j (mod 2π).
    pub fn mirror_index(&self, j: usize) -> usize {
        (self.n_nodes - j) % self.n_nodes
    }
}

/// Area S = −∫ẊY dt.
pub fn contour_area<T: Real>(c: &SampledContour<T>) -> T {
    -c.xdot.iter().zip(&c.y).map(|(&xd, &y)| xd * y).sum::<T>() * c.weight
}

/// Green-theorem form (1/2)∫(XẎ − YẊ)dt, used as a cross-check of [`contour_area`].
pub fn contour_area_symmetric<T: Real>(c: &SampledContour<T>) -> T {
    (0..c.n_nodes).map(|j| c.x[j] * c.ydot[j] - c.y[j] * c.xdot[j]).sum::<T>() * c.weight / lit(2.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    XSymmetric,
    YSymmetric,
    Both,
    None,
}

impl Symmetry {
    pub fn is_x(self) -> bool {
        matches!(self, Symmetry::XSymmetric | Symmetry::Both)
    }
    pub fn is_y(self) -> bool {
        matches!(self, Symmetry::YSymmetric | Symmetry::Both)
    }
}

/// Reflection pivots (node indices) for the two mirror symmetries, if present.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymmetryPivots {
    /// Pivot q with Y(t_{2q−j}) = −Y(t_j), X(t_{2q−j}) = X(t_j): mirror in the x-axis.
    pub x_axis: Option<usize>,
    /// Pivot q with X(t_{2q−j}) = −X(t_j), Y(t_{2q−j}) = Y(t_j): mirror in the y-axis.
    pub y_axis: Option<usize>,
}

/// Tests reflection parity about t = 0 first, then about t = ±π/2 and π (when the grid allows).
pub fn symmetry_pivots<T: Real>(c: &SampledContour<T>, tol: T) -> SymmetryPivots {
    let n = c.n_nodes;
    let mut pivots = vec![n / 2, 0];
    if n.is_multiple_of(4) {
        pivots.extend([3 * n / 4, n / 4]);
    }
    let check = |q: usize, sx: T, sy: T| {
        (0..n).all(|j| {
            let k = (2 * q + n - j) % n;
            (c.x[k] - sx * c.x[j]).abs() <= tol && (c.y[k] - sy * c.y[j]).abs() <= tol
        })
    };
    SymmetryPivots {
        x_axis: pivots.iter().copied().find(|&q| check(q, T::one(), -T::one())),
        y_axis: pivots.iter().copied().find(|&q| check(q, -T::one(), T::one())),
    }
}

pub fn detect_symmetry<T: Real>(c: &SampledContour<T>, tol: T) -> Symmetry {
    let p = symmetry_pivots(c, tol);
    match (p.x_axis.is_some(), p.y_axis.is_some()) {
        (true, true) => Symmetry::Both,
        (true, false) => Symmetry::XSymmetric,
        (false, true) => Symmetry::YSymmetric,
        (false, false) => Symmetry::None,
    }
}

/// Strip half-width b, obstacle centre offset a, obstacle scale ε.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveguideGeometry<T> {
    pub b: T,
    pub a: T,
    pub eps: T,
}

impl<T: Real> WaveguideGeometry<T> {
    pub fn new(b: T, a: T, eps: T) -> Self {
        WaveguideGeometry { b, a, eps }
    }

    pub fn with_a(self, a: T) -> Self {
        WaveguideGeometry { a, ..self }
    }

    pub fn with_eps(self, eps: T) -> Self {
        WaveguideGeometry { eps, ..self }
    }

    /// Checks b > 0, ε > 0 and that the inflated obstacle stays strictly inside the strip.
    pub fn validate(&self, c: &SampledContour<T>) -> Result<()> {
        if !(self.b > T::zero()) || !(self.eps > T::zero()) || !self.a.is_finite() {
            return Err(Error::Precondition(format!(
                "need b > 0 and eps > 0 (b = {}, eps = {})",
                to_f64(self.b),
                to_f64(self.eps)
            )));
        }
        if !(self.a.abs() + self.eps * c.max_abs_y() < self.b) {
            return Err(Error::Geometry(format!(
                "obstacle leaves the strip: |a| + eps·max|Y| = {} ≥ b = {}",
                to_f64(self.a.abs() + self.eps * c.max_abs_y()),
                to_f64(self.b)
            )));
        }
        Ok(())
    }

    /// Smallest vertical gap between the obstacle and a wall.
    pub fn wall_gap(&self, c: &SampledContour<T>) -> T {
        let top = self.a + self.eps * c.y_range.1;
        let bottom = self.a + self.eps * c.y_range.0;
        (self.b - top).min(self.b + bottom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Circle,
    PerturbedCircle,
}

/// On-disk contour table: coefficient arrays (index n starts at 1), indexed harmonics, or a preset.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourTable {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_cos: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_sin: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_cos: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_sin: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub harmonics: Option<Vec<Harmonic>>,
}

impl ContourTable {
    pub fn from_spec(spec: &ContourSpec<f64>) -> Self {
        ContourTable {
            x_cos: Some(spec.x_cos.clone()),
            x_sin: Some(spec.x_sin.clone()),
            y_cos: Some(spec.y_cos.clone()),
            y_sin: Some(spec.y_sin.clone()),
            ..Default::default()
        }
    }

    pub fn to_spec<T: Real>(&self) -> Result<ContourSpec<T>> {
        let has_arrays = self.x_cos.is_some()
            || self.x_sin.is_some()
            || self.y_cos.is_some()
            || self.y_sin.is_some()
            || self.harmonics.is_some();
        match self.preset {
            Some(_) if has_arrays => {
                Err(Error::Geometry("contour table mixes `preset` with coefficient arrays".into()))
            }
            Some(Preset::Circle) => {
                if self.beta.is_some() {
                    return Err(Error::Geometry("`beta` does not apply to the circle preset".into()));
                }
                let r0 = self.r0.unwrap_or(1.0);
                if !(r0 > 0.0) {
                    return Err(Error::Geometry(format!("circle radius must be positive, got {r0}")));
                }
                Ok(ContourSpec::circle(lit(r0)))
            }
            Some(Preset::PerturbedCircle) => {
                if self.r0.is_some() {
                    return Err(Error::Geometry("`r0` does not apply to the perturbed_circle preset".into()));
                }
                let beta = self.beta.ok_or_else(|| Error::Geometry("perturbed_circle needs `beta`".into()))?;
                Ok(ContourSpec::perturbed_circle(lit(beta)))
            }
            None => {
                if !has_arrays {
                    return Err(Error::Geometry("contour table defines no preset and no coefficients".into()));
                }
                if self.r0.is_some() || self.beta.is_some() {
                    return Err(Error::Geometry("`r0`/`beta` require a preset".into()));
                }
                let conv = |v: &Option<Vec<f64>>| v.iter().flatten().map(|&c| lit::<T>(c)).collect::<Vec<T>>();
                let mut spec =
                    ContourSpec::new(conv(&self.x_cos), conv(&self.x_sin), conv(&self.y_cos), conv(&self.y_sin));
                if let Some(h) = &self.harmonics {
                    let extra = ContourSpec::<T>::from_harmonics(h)?;
                    for (dst, src) in [
                        (&mut spec.x_cos, &extra.x_cos),
                        (&mut spec.x_sin, &extra.x_sin),
                        (&mut spec.y_cos, &extra.y_cos),
                        (&mut spec.y_sin, &extra.y_sin),
                    ] {
                        if dst.len() < src.len() {
                            dst.resize(src.len(), T::zero());
                        }
                        for (d, s) in dst.iter_mut().zip(src) {
                            *d += *s;
                        }
                    }
                }
                Ok(spec)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_samples_match_closed_form() {
        let c = build_contour(&ContourSpec::circle(1.0), 64).unwrap();
        for j in 0..64 {
            let t = -std::f64::consts::PI + std::f64::consts::TAU * j as f64 / 64.0;
            assert_eq!(c.t[j], t);
            assert!((c.x[j] - t.sin()).abs() < 1e-15);
            assert!((c.y[j] + t.cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn perturbed_circle_coefficients() {
        let c = build_contour(&ContourSpec::perturbed_circle(0.8), 128).unwrap();
        for j in 0..128 {
            let t: f64 = c.t[j];
            assert!((c.x[j] - (t.sin() - 0.4 * (2.0 * t).sin())).abs() < 1e-14);
            assert!((c.y[j] - (-t.cos() + 0.4 * (2.0 * t).cos())).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_harmonic_rejected() {
        let h = [Harmonic { n: 0, x_cos: 0.1, ..Default::default() }];
        assert!(matches!(ContourSpec::<f64>::from_harmonics(&h), Err(Error::Geometry(_))));
    }

    #[test]
    fn areas() {
        let area = |s: ContourSpec<f64>| contour_area(&build_contour(&s, 64).unwrap());
        assert!((area(ContourSpec::circle(1.0)) - std::f64::consts::PI).abs() < 1e-13);
        assert!((area(ContourSpec::ellipse(2.0, 1.0)) - std::f64::consts::TAU).abs() < 1e-13);
        let beta = 0.3;
        let want = std::f64::consts::PI * (1.0 + beta * beta / 2.0);
        assert!((area(ContourSpec::perturbed_circle(beta)) - want).abs() < 1e-13);
    }

    #[test]
    fn clockwise_rejected_unless_auto_reversed() {
        let cw = ContourSpec::circle(1.0).reversed();
        assert!(matches!(build_contour(&cw, 32), Err(Error::Orientation(_))));
        let c = build_contour_with(&cw, 32, BuildOptions { auto_reverse: true }).unwrap();
        assert!(c.reversed && contour_area(&c) > 0.0);
    }

    #[test]
    fn figure_eight_rejected() {
        // Limaçon with an inner loop (mean removed): positive signed area but not simple.
        let spec = ContourSpec::new(vec![0.5, 0.5], vec![], vec![], vec![0.5, 0.5]);
        assert!(matches!(build_contour(&spec, 64), Err(Error::Geometry(_))));
    }

    #[test]
    fn symmetry_classes() {
        let sym = |s: ContourSpec<f64>| detect_symmetry(&build_contour(&s, 64).unwrap(), 1e-12);
        assert_eq!(sym(ContourSpec::circle(1.0)), Symmetry::Both);
        assert_eq!(sym(ContourSpec::perturbed_circle(0.2)), Symmetry::YSymmetric);
        // Parity about t = 0 fails here, but t → π − t mirrors the curve in the x-axis.
        let shifted = ContourSpec::new(vec![], vec![1.0], vec![-1.0], vec![0.0, 0.3]);
        assert_eq!(sym(shifted), Symmetry::XSymmetric);
        let none = ContourSpec::new(vec![0.0, 0.0, 0.15], vec![1.0], vec![-1.0], vec![0.0, 0.3]);
        assert_eq!(sym(none), Symmetry::None);
        let xs = ContourSpec::new(vec![1.0, 0.2], vec![], vec![], vec![1.0]);
        assert_eq!(sym(xs), Symmetry::XSymmetric);
    }

    #[test]
    fn geometry_bounds() {
        let c = build_contour(&ContourSpec::circle(1.0), 32).unwrap();
        assert!(WaveguideGeometry::new(1.0, 0.5, 0.4).validate(&c).is_ok());
        assert!(WaveguideGeometry::new(1.0, 0.7, 0.4).validate(&c).is_err());
    }

    #[test]
    fn table_round_trip() {
        let t = ContourTable { preset: Some(Preset::PerturbedCircle), beta: Some(0.1), ..Default::default() };
        let s: ContourSpec<f64> = t.to_spec().unwrap();
        let back: ContourSpec<f64> = ContourTable::from_spec(&s).to_spec().unwrap();
        assert_eq!(s, back);
        let mixed = ContourTable { preset: Some(Preset::Circle), x_sin: Some(vec![1.0]), ..Default::default() };
        assert!(mixed.to_spec::<f64>().is_err());
    }
}
