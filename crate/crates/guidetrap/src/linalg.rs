//! Small dense linear algebra: row-major matrices and LU with partial pivoting.

use std::fmt::Debug;
use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{Float, NumAssign, Zero};

use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};

/// Matrix element: a real scalar or its complex extension.
pub trait Field: Copy + NumAssign + std::ops::Neg<Output = Self> + Send + Sync + Debug {
    type Re: Real;
    fn modulus(self) -> Self::Re;
    fn conjugate(self) -> Self;
    fn from_re(x: Self::Re) -> Self;
}

macro_rules! real_field {
    ($t:ty) => {
        impl Field for $t {
            type Re = $t;
            fn modulus(self) -> $t {
                self.abs()
            }
            fn conjugate(self) -> $t {
                self
            }
            fn from_re(x: $t) -> $t {
                x
            }
        }
    };
}
real_field!(f32);
real_field!(f64);

impl<T: Real> Field for Complex<T> {
    type Re = T;
    fn modulus(self) -> T {
        self.norm()
    }
    fn conjugate(self) -> Self {
        self.conj()
    }
    fn from_re(x: T) -> Self {
        Complex::new(x, T::zero())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Field> Mat<E> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![E::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = E::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [E] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<F: Field>(&self, f: impl Fn(E) -> F) -> Mat<F> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn matvec(&self, x: &[E]) -> Vec<E> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut s = E::zero();
                for (a, b) in self.row(i).iter().zip(x) {
                    s += *a * *b;
                }
                s
            })
            .collect()
    }

    /// `selfᴴ x`.
    pub fn adjoint_matvec(&self, x: &[E]) -> Vec<E> {
        assert_eq!(x.len(), self.rows, "adjoint matvec dimension mismatch");
        let mut y = vec![E::zero(); self.cols];
        for (i, xi) in x.iter().enumerate() {
            for (yj, a) in y.iter_mut().zip(self.row(i)) {
                *yj += a.conjugate() * *xi;
            }
        }
        y
    }

    pub fn matmul(&self, other: &Mat<E>) -> Mat<E> {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == E::zero() {
                    continue;
                }
                for (o, &b) in orow.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Mat<E>) -> Mat<E> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: E) -> Mat<E> {
        self.map(|x| x * s)
    }

    pub fn max_abs(&self) -> E::Re {
        self.data.iter().fold(E::Re::zero(), |m, x| m.max(x.modulus()))
    }

    /// Induced infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> E::Re {
        (0..self.rows)
            .map(|i| self.row(i).iter().fold(E::Re::zero(), |s, x| s + x.modulus()))
            .fold(E::Re::zero(), |m, x| m.max(x))
    }
}

impl<E> Index<(usize, usize)> for Mat<E> {
    type Output = E;
    fn index(&self, (i, j): (usize, usize)) -> &E {
        &self.data[i * self.cols + j]
    }
}

impl<E> IndexMut<(usize, usize)> for Mat<E> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization `P A = L U` of a square matrix.
#[derive(Clone, Debug)]
pub struct Lu<E> {
    lu: Mat<E>,
    perm: Vec<usize>,
    pivot_ratio: f64,
}

impl<E: Field> Lu<E> {
    pub fn new(a: &Mat<E>) -> Result<Self> {
        assert_eq!(a.rows, a.cols, "LU needs a square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = to_f64(a.max_abs()).max(f64::MIN_POSITIVE);
        for col in 0..n {
            let mut p = col;
            let mut best = lu[(col, col)].modulus();
            for r in col + 1..n {
                let v = lu[(r, col)].modulus();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if to_f64(best) <= scale * 1e-300 {
                return Err(Error::Singular(0.0));
            }
            if p != col {
                for j in 0..n {
                    lu.data.swap(col * n + j, p * n + j);
                }
                perm.swap(col, p);
            }
            let inv = E::one() / lu[(col, col)];
            for r in col + 1..n {
                let f = lu[(r, col)] * inv;
                if f == E::zero() {
                    continue;
                }
                lu[(r, col)] = f;
                let (top, bottom) = lu.data.split_at_mut(r * n);
                let prow = &top[col * n + col + 1..col * n + n];
                let rrow = &mut bottom[col + 1..n];
                for (x, &y) in rrow.iter_mut().zip(prow) {
                    *x -= f * y;
                }
            }
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let d = to_f64(lu[(i, i)].modulus());
            lo = lo.min(d);
            hi = hi.max(d);
        }
        let pivot_ratio = if n == 0 { 1.0 } else { lo / hi };
        Ok(Lu { lu, perm, pivot_ratio })
    }

    /// Ratio of smallest to largest pivot modulus: a cheap conditioning indicator.
    pub fn pivot_ratio(&self) -> f64 {
        self.pivot_ratio
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn solve(&self, b: &[E]) -> Vec<E> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<E> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in 0..i {
                s -= row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in i + 1..n {
                s -= row[j] * x[j];
            }
            x[i] = s / row[i];
        }
        x
    }

    /// Solves `Aᴴ x = b`.
    #[allow(clippy::needless_range_loop)]
    pub fn solve_adjoint(&self, b: &[E]) -> Vec<E> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        // Aᴴ = Uᴴ Lᴴ P, so solve Uᴴ w = b, Lᴴ y = w, then x = Pᵀ y.
        let mut w = b.to_vec();
        for i in 0..n {
            let mut s = w[i];
            for j in 0..i {
                s -= self.lu[(j, i)].conjugate() * w[j];
            }
            w[i] = s / self.lu[(i, i)].conjugate();
        }
        for i in (0..n).rev() {
            let mut s = w[i];
            for j in i + 1..n {
                s -= self.lu[(j, i)].conjugate() * w[j];
            }
            w[i] = s;
        }
        let mut x = vec![E::zero(); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = w[i];
        }
        x
    }

    pub fn solve_mat(&self, b: &Mat<E>) -> Mat<E> {
        assert_eq!(b.rows, self.dim());
        let mut out = Mat::zeros(b.rows, b.cols);
        let mut col = vec![E::zero(); b.rows];
        for j in 0..b.cols {
            for i in 0..b.rows {
                col[i] = b[(i, j)];
            }
            let x = self.solve(&col);
            for i in 0..b.rows {
                out[(i, j)] = x[i];
            }
        }
        out
    }
}

/// Euclidean norm.
pub fn norm2<E: Field>(x: &[E]) -> E::Re {
    x.iter()
        .fold(E::Re::zero(), |s, v| {
            let m = v.modulus();
            s + m * m
        })
        .sqrt()
}

/// Maximum modulus.
pub fn norm_max<E: Field>(x: &[E]) -> E::Re {
    x.iter().fold(E::Re::zero(), |m, v| m.max(v.modulus()))
}
