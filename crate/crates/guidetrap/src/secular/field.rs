use num_complex::Complex;
use serde::Serialize;

use super::pgrid::build_pgrid;
use super::system::DiscretizedSystem;
use super::traces::ModeSpectrum;
use super::{GridRoute, SolveOptions};
use crate::error::{Error, Result};
use crate::scalar::{cplx, lit, Real};
use crate::specfun::{bessel01, tau};

/// Rectangular sample grid in (ξ, η).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldGrid<T> {
    pub xi: Vec<T>,
    pub eta: Vec<T>,
}

impl<T: Real> FieldGrid<T> {
    pub fn uniform(xi: (T, T, usize), eta: (T, T, usize)) -> Self {
        let axis = |(lo, hi, n): (T, T, usize)| -> Vec<T> {
            if n <= 1 {
                return vec![lo];
            }
            (0..n).map(|i| lo + (hi - lo) * lit::<T>(i as f64 / (n - 1) as f64)).collect()
        };
        FieldGrid { xi: axis(xi), eta: axis(eta) }
    }
}

/// u on the grid, row-major in η then ξ. Masked points (inside or too close to the obstacle,
/// or outside the strip) hold zero.
#[derive(Clone, Debug, Serialize)]
pub struct FieldSamples<T> {
    pub xi: Vec<T>,
    pub eta: Vec<T>,
    pub u: Vec<Complex<T>>,
    pub mask: Vec<bool>,
}

impl<T: Real> FieldSamples<T> {
    pub fn get(&self, i_eta: usize, i_xi: usize) -> Option<Complex<T>> {
        let idx = i_eta * self.xi.len() + i_xi;
        if self.mask[idx] {
            Some(self.u[idx])
        } else {
            None
        }
    }
}

/// Mode field from the Green formula with G = (1/4i)H₀⁽¹⁾(kr): a wall part from the Neumann
/// transforms and an obstacle part from θ.
pub fn reconstruct_mode<T: Real>(
    sys: &DiscretizedSystem<T>,
    theta: &[Complex<T>],
    grid: &FieldGrid<T>,
) -> Result<FieldSamples<T>> {
    if !(sys.sigma > T::zero()) {
        return Err(Error::Precondition("field reconstruction needs sigma > 0".into()));
    }
    let spec = ModeSpectrum::new(sys, theta);
    let g = sys.geometry;
    let c = &sys.contour;
    let k = sys.kernels.k;
    // The wall part is integrated along the real axis (indented below ±p₁), where the 1/τ factor
    // needs the branch-aware substitutions; the truncation is doubled so points near a wall,
    // where e^{−(b∓η)τ} no longer helps, still converge.
    let opts = SolveOptions { decay_cutoff: 76.0, ..SolveOptions::default() };
    let pg = build_pgrid(sys.family, &g, c.max_abs_y(), sys.sigma, &opts, GridRoute::RealAxis)?;
    // (p, τ(p), weighted φ̃ transform, weighted ψ̃ transform)
    let wall: Vec<[Complex<T>; 4]> = pg
        .nodes
        .iter()
        .zip(&pg.weights)
        .map(|(&p, &w)| {
            let (f1, f2) = spec.wall_transforms(p);
            [p, tau(p, k), f1 * w, f2 * w]
        })
        .collect();

    let px: Vec<T> = c.x.iter().map(|&x| g.eps * x).collect();
    let py: Vec<T> = c.y.iter().map(|&y| g.a + g.eps * y).collect();
    let speed_max = c.xdot.iter().zip(&c.ydot).fold(T::zero(), |m, (a, b)| m.max((*a * *a + *b * *b).sqrt()));
    let spacing = g.eps * speed_max * c.weight;
    let quarter_i = cplx(T::zero(), -lit::<T>(0.25));
    let four_pi = lit::<T>(4.0) * T::PI();

    let mut u = Vec::with_capacity(grid.xi.len() * grid.eta.len());
    let mut mask = Vec::with_capacity(u.capacity());
    for &eta in &grid.eta {
        for &xi in &grid.xi {
            let inside_strip = eta.abs() <= g.b;
            let near = (0..c.n_nodes).any(|j| {
                let (dx, dy) = (px[j] - xi, py[j] - eta);
                (dx * dx + dy * dy).sqrt() < spacing
            });
            if !inside_strip || near || inside_obstacle(&px, &py, xi, eta) {
                u.push(Complex::new(T::zero(), T::zero()));
                mask.push(false);
                continue;
            }
            let mut wall_part = Complex::new(T::zero(), T::zero());
            for &[p, t, f1, f2] in &wall {
                let e = (cplx(T::zero(), xi) * p).exp();
                wall_part += (f1 * (-t * (g.b - eta)).exp() + f2 * (-t * (g.b + eta)).exp()) / t * e;
            }
            wall_part /= four_pi;
            let mut body = Complex::new(T::zero(), T::zero());
            for j in 0..c.n_nodes {
                let (dx, dy) = (px[j] - xi, py[j] - eta);
                let d = (dx * dx + dy * dy).sqrt();
                let [_, j1, _, y1] = bessel01(k * d);
                let h0_prime = -Complex::new(j1, y1);
                let normal = -dx * c.ydot[j] + dy * c.xdot[j];
                body += theta[j] * h0_prime * (k * normal / d);
            }
            body = body * quarter_i * (g.eps * c.weight);
            u.push(wall_part + body);
            mask.push(true);
        }
    }
    Ok(FieldSamples { xi: grid.xi.clone(), eta: grid.eta.clone(), u, mask })
}

/// Even–odd crossing test against the sampled polygon.
fn inside_obstacle<T: Real>(px: &[T], py: &[T], x: T, y: T) -> bool {
    let n = px.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        if (py[i] > y) != (py[j] > y) && x < (px[j] - px[i]) * (y - py[i]) / (py[j] - py[i]) + px[i] {
            inside = !inside;
        }
        j = i;
    }
    inside
}
