use num_complex::Complex;

use super::kernels::Kernels;
use super::pgrid::{build_pgrid, PGrid};
use super::{GridRoute, ModeFamily, SolveOptions};
use crate::contour::{SampledContour, WaveguideGeometry};
use crate::error::{Error, Result};
use crate::linalg::{Lu, Mat};
use crate::neumann_bem::{assemble_m, KernelMatrix};
use crate::scalar::{creal, lit, to_f64, Real};

/// Operator blocks of the secular problem at one trial σ. Immutable once assembled.
///
/// Wall-side unknowns are stacked as [A₁ on the nodes, A₂ on the nodes, A₁(iσ), A₂(iσ)].
/// `k_matrix` maps θ to that stack (A = ε·K·θ); `t1_matrix` maps the stack back to obstacle
/// forcing with the iσ residue handled per the grid route.
#[derive(Clone, Debug)]
pub struct DiscretizedSystem<T> {
    pub family: ModeFamily,
    pub geometry: WaveguideGeometry<T>,
    pub contour: SampledContour<T>,
    pub pgrid: PGrid<T>,
    pub kernels: Kernels<T>,
    pub theta_dim: usize,
    pub k_matrix: Mat<Complex<T>>,
    pub t1_matrix: Mat<Complex<T>>,
    /// T̂₁·K̂ as an n × n block.
    pub t1k: Mat<Complex<T>>,
    pub r_vector: Vec<T>,
    pub m_matrix: KernelMatrix<T>,
    /// K rows at the real poles: A₁(p₁), A₁(−p₁), A₂(p₁), A₂(−p₁) (embedded family).
    pub pole_rows: Option<Mat<Complex<T>>>,
    pub sigma: T,
    l_factor: Lu<T>,
}

/// Secular function value with the solution data it came from.
#[derive(Clone, Debug)]
pub struct SecularValue<T> {
    /// F(σ); the fixed point is σ = εF.
    pub f: Complex<T>,
    /// z = ((I + M) − εT̂₁K̂)⁻¹R. The normalized density is θ = (2/σ)z.
    pub z: Vec<Complex<T>>,
    pub pivot_ratio: f64,
}

impl<T: Real> DiscretizedSystem<T> {
    pub fn n_nodes(&self) -> usize {
        self.pgrid.len()
    }

    pub fn special_rows(&self) -> (usize, usize) {
        let n = self.n_nodes();
        (2 * n, 2 * n + 1)
    }

    /// (I + M) − εT̂₁K̂ as a complex matrix.
    pub fn theta_operator(&self) -> Mat<Complex<T>> {
        let n = self.theta_dim;
        let im = self.m_matrix.shifted_identity();
        let eps = creal::<T>(self.geometry.eps);
        Mat::from_fn(n, n, |i, j| creal::<T>(im[(i, j)]) - self.t1k[(i, j)] * eps)
    }

    /// Applies L̂ = (I + M)⁻¹ to complex data.
    pub fn apply_l(&self, f: &[Complex<T>]) -> Vec<Complex<T>> {
        let re: Vec<T> = f.iter().map(|v| v.re).collect();
        let im: Vec<T> = f.iter().map(|v| v.im).collect();
        let (a, b) = (self.l_factor.solve(&re), self.l_factor.solve(&im));
        a.into_iter().zip(b).map(|(x, y)| Complex::new(x, y)).collect()
    }

    /// A = εK̂θ on the whole stack.
    pub fn wall_spectrum(&self, theta: &[Complex<T>]) -> Vec<Complex<T>> {
        let eps = creal::<T>(self.geometry.eps);
        self.k_matrix.matvec(theta).into_iter().map(|v| v * eps).collect()
    }

    /// [A₁(p₁), A₁(−p₁), A₂(p₁), A₂(−p₁)] for the embedded family.
    pub fn pole_values(&self, theta: &[Complex<T>]) -> Option<Vec<Complex<T>>> {
        let eps = creal::<T>(self.geometry.eps);
        self.pole_rows.as_ref().map(|m| m.matvec(theta).into_iter().map(|v| v * eps).collect())
    }

    /// F = 2(K̂z)(iσ)₁ from the θ-space solve.
    pub fn secular_value(&self) -> Result<SecularValue<T>> {
        let lu = Lu::new(&self.theta_operator())
            .map_err(|_| Error::Conditioning("(I + M) − εT1K is numerically singular".into()))?;
        let rhs: Vec<Complex<T>> = self.r_vector.iter().map(|&r| creal(r)).collect();
        let z = lu.solve(&rhs);
        let (s1, _) = self.special_rows();
        let f: Complex<T> =
            self.k_matrix.row(s1).iter().zip(&z).map(|(&k, &v)| k * v).sum::<Complex<T>>() * lit::<T>(2.0);
        Ok(SecularValue { f, z, pivot_ratio: lu.pivot_ratio() })
    }

    /// F from the stacked resolvent (I − εK̂L̂T̂₁)⁻¹K̂L̂R. Dense in the wall unknowns; use on
    /// coarse grids only. K̂ grows and T̂₁ decays exponentially along the tail, so the stack is
    /// rescaled row-wise by the size of K̂ before factoring.
    pub fn stacked_secular_value(&self) -> Result<Complex<T>> {
        let rows = self.k_matrix.rows();
        let scale: Vec<T> = (0..rows)
            .map(|m| {
                let s = self.k_matrix.row(m).iter().fold(T::zero(), |a, v| a.max(v.norm()));
                if s > T::zero() {
                    s
                } else {
                    T::one()
                }
            })
            .collect();
        let k_scaled = Mat::from_fn(rows, self.theta_dim, |m, j| self.k_matrix[(m, j)] / scale[m]);
        let mut lt1 = Mat::zeros(self.theta_dim, rows);
        for j in 0..rows {
            let col: Vec<Complex<T>> = (0..self.theta_dim).map(|i| self.t1_matrix[(i, j)] * scale[j]).collect();
            for (i, v) in self.apply_l(&col).into_iter().enumerate() {
                lt1[(i, j)] = v;
            }
        }
        let eps = creal::<T>(self.geometry.eps);
        let op = k_scaled.matmul(&lt1);
        let a = Mat::from_fn(rows, rows, |i, j| {
            let d = if i == j { creal(T::one()) } else { creal(T::zero()) };
            d - op[(i, j)] * eps
        });
        let lr = self.apply_l(&self.r_vector.iter().map(|&r| creal(r)).collect::<Vec<_>>());
        let rhs = k_scaled.matvec(&lr);
        let v = Lu::new(&a).map_err(|_| Error::Conditioning("stacked resolvent singular".into()))?.solve(&rhs);
        let s1 = self.special_rows().0;
        Ok(v[s1] * scale[s1] * lit::<T>(2.0))
    }

    /// Two-term series 2(K̂L̂R + εK̂L̂T̂₁K̂L̂R)(iσ)₁.
    pub fn neumann_two_term(&self) -> Complex<T> {
        let lr = self.apply_l(&self.r_vector.iter().map(|&r| creal(r)).collect::<Vec<_>>());
        let klr = self.k_matrix.matvec(&lr);
        let correction = self.apply_l(&self.t1_matrix.matvec(&klr));
        let (s1, _) = self.special_rows();
        let kc: Complex<T> = self.k_matrix.row(s1).iter().zip(&correction).map(|(&k, &v)| k * v).sum();
        (klr[s1] + kc * self.geometry.eps) * lit::<T>(2.0)
    }

    /// K̂L̂R on the wall stack.
    pub fn klr(&self) -> Vec<Complex<T>> {
        let lr = self.apply_l(&self.r_vector.iter().map(|&r| creal(r)).collect::<Vec<_>>());
        self.k_matrix.matvec(&lr)
    }
}

/// Assembles every block at trial σ on a freshly built p-grid.
pub fn assemble_system<T: Real>(
    c: &SampledContour<T>,
    g: &WaveguideGeometry<T>,
    sigma: T,
    family: ModeFamily,
    opts: &SolveOptions,
) -> Result<DiscretizedSystem<T>> {
    assemble_system_on(c, g, sigma, family, opts, opts.route)
}

pub(crate) fn assemble_system_on<T: Real>(
    c: &SampledContour<T>,
    g: &WaveguideGeometry<T>,
    sigma: T,
    family: ModeFamily,
    opts: &SolveOptions,
    route: GridRoute,
) -> Result<DiscretizedSystem<T>> {
    g.validate(c)?;
    if !sigma.is_finite() {
        return Err(Error::Precondition("sigma must be finite".into()));
    }
    let pgrid = build_pgrid(family, g, c.max_abs_y(), sigma, opts, route)?;
    let kernels = Kernels::new(family, g, sigma)?;
    let n = c.n_nodes;
    let np = pgrid.len();
    let w = c.weight;

    let min_gap = pgrid.indentation.map(|(_, rho)| rho * lit(0.5));
    if let (Some(gap), Some((p1, _))) = (min_gap, pgrid.indentation) {
        for p in &pgrid.nodes {
            if (*p - p1).norm() < gap || (*p + p1).norm() < gap {
                return Err(Error::Assembly(format!("p-node {} collides with a real pole", to_f64(p.re))));
            }
        }
    }

    let special = pgrid.special_point;
    let mut k_matrix = Mat::zeros(2 * np + 2, n);
    for (m, &p) in pgrid.nodes.iter().enumerate() {
        for j in 0..n {
            let (k1, k2) = kernels.outbound(p, c.x[j], c.y[j], c.xdot[j], c.ydot[j]);
            k_matrix[(m, j)] = k1 * w;
            k_matrix[(np + m, j)] = k2 * w;
        }
    }
    for j in 0..n {
        let (k1, k2) = kernels.outbound(special, c.x[j], c.y[j], c.xdot[j], c.ydot[j]);
        k_matrix[(2 * np, j)] = k1 * w;
        k_matrix[(2 * np + 1, j)] = k2 * w;
    }
    let pole_rows = pgrid.indentation.map(|(p1, _)| {
        let mut rows = Mat::zeros(4, n);
        for j in 0..n {
            let (a, b) = kernels.outbound(creal(p1), c.x[j], c.y[j], c.xdot[j], c.ydot[j]);
            let (am, bm) = kernels.outbound(creal(-p1), c.x[j], c.y[j], c.xdot[j], c.ydot[j]);
            rows[(0, j)] = a * w;
            rows[(1, j)] = am * w;
            rows[(2, j)] = b * w;
            rows[(3, j)] = bm * w;
        }
        rows
    });

    let s = kernels.residue_sign();
    let mut t1_matrix = Mat::zeros(n, 2 * np + 2);
    let mut r_vector = Vec::with_capacity(n);
    for i in 0..n {
        for (m, (&p, &om)) in pgrid.nodes.iter().zip(&pgrid.weights).enumerate() {
            let (p1, p2) = kernels.inbound(p, c.x[i], c.y[i]);
            t1_matrix[(i, m)] = p1 * om;
            t1_matrix[(i, np + m)] = p2 * om;
        }
        let cw = kernels.subtraction_weight(c.x[i], c.y[i], route);
        t1_matrix[(i, 2 * np)] = creal(cw);
        t1_matrix[(i, 2 * np + 1)] = creal(cw * s);
        r_vector.push(kernels.residue_coefficient(c.y[i]));
    }
    let t1k = t1_matrix.matmul(&k_matrix);

    let m_matrix = assemble_m(c, g.eps, kernels.k)?;
    let l_factor = Lu::new(&m_matrix.shifted_identity())
        .map_err(|_| Error::Conditioning("I + M is numerically singular".into()))?;

    Ok(DiscretizedSystem {
        family,
        geometry: *g,
        contour: c.clone(),
        pgrid,
        kernels,
        theta_dim: n,
        k_matrix,
        t1_matrix,
        t1k,
        r_vector,
        m_matrix,
        pole_rows,
        sigma,
        l_factor,
    })
}
