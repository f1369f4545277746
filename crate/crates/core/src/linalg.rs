//! Small dense complex kernels used on the trajectory hot path.
//!
//! Matrices are kept column-major with split real/imaginary planes so the
//! inner loop is a pair of real axpys, which the compiler vectorizes.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// State vector with split real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitVec {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl SplitVec {
    pub fn zeros(dim: usize) -> Self {
        Self {
            re: vec![0.0; dim],
            im: vec![0.0; dim],
        }
    }

    pub fn from_complex(v: &[Complex64]) -> Self {
        Self {
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect()
    }

    pub fn copy_from_complex(&mut self, v: &[Complex64]) {
        for ((r, i), z) in self.re.iter_mut().zip(self.im.iter_mut()).zip(v) {
            *r = z.re;
            *i = z.im;
        }
    }

    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re.iter().map(|x| x * x).sum::<f64>() + self.im.iter().map(|x| x * x).sum::<f64>()
    }

    pub fn scale(&mut self, s: f64) {
        self.re.iter_mut().for_each(|x| *x *= s);
        self.im.iter_mut().for_each(|x| *x *= s);
    }

    /// Multiplies entry-wise by a diagonal operator.
    pub fn mul_diag(&mut self, diag: &[Complex64]) {
        for ((r, i), d) in self.re.iter_mut().zip(self.im.iter_mut()).zip(diag) {
            let (a, b) = (*r, *i);
            *r = a * d.re - b * d.im;
            *i = a * d.im + b * d.re;
        }
    }
}

/// Dense complex square matrix, column-major, split planes.
#[derive(Debug, Clone)]
pub struct DenseOp {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl DenseOp {
    pub fn from_matrix(m: &DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "operator must be square");
        // nalgebra storage is column-major already
        let data = m.as_slice();
        Self {
            dim: m.nrows(),
            re: data.iter().map(|z| z.re).collect(),
            im: data.iter().map(|z| z.im).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `y = A x`.
    pub fn apply(&self, x: &SplitVec, y: &mut SplitVec) {
        let d = self.dim;
        debug_assert_eq!(x.len(), d);
        debug_assert_eq!(y.len(), d);
        y.re.fill(0.0);
        y.im.fill(0.0);
        for j in 0..d {
            let (xr, xi) = (x.re[j], x.im[j]);
            if xr == 0.0 && xi == 0.0 {
                continue;
            }
            let col_re = &self.re[j * d..(j + 1) * d];
            let col_im = &self.im[j * d..(j + 1) * d];
            for (((yr, yi), &ar), &ai) in
                y.re.iter_mut().zip(y.im.iter_mut()).zip(col_re).zip(col_im)
            {
                *yr += ar * xr - ai * xi;
                *yi += ar * xi + ai * xr;
            }
        }
    }
}

/// Maximum absolute entry of `a - b`.
pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apply_matches_nalgebra() {
        let d = 7;
        let m = DMatrix::from_fn(d, d, |i, j| {
            Complex64::new((i as f64 + 0.3 * j as f64).sin(), (i * j) as f64 * 0.1)
        });
        let x: Vec<Complex64> = (0..d)
            .map(|k| Complex64::new(k as f64 * 0.5 - 1.0, (k as f64).cos()))
            .collect();
        let expected = &m * nalgebra::DVector::from_column_slice(&x);
        let op = DenseOp::from_matrix(&m);
        let mut y = SplitVec::zeros(d);
        op.apply(&SplitVec::from_complex(&x), &mut y);
        for (got, want) in y.to_complex().iter().zip(expected.iter()) {
            assert!((got - want).norm() < 1e-12);
        }
    }
}
