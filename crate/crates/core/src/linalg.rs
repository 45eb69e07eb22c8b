//! Dense LU solves and condition numbers.

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::{Mat, MatRef};

use crate::error::{Error, Result};

pub type Matrix = Mat<f64>;

/// Partial-pivot LU factorization of a square matrix.
pub struct DenseFactorization {
    lu: PartialPivLu<f64>,
    n: usize,
}

impl DenseFactorization {
    /// Factors `a`, rejecting pivots below `n·ε·max|a_ij|`.
    pub fn new(a: MatRef<'_, f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Dimension {
                expected: n,
                got: a.ncols(),
            });
        }
        let mut amax = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let v = a[(i, j)];
                if !v.is_finite() {
                    return Err(Error::Singular { row: i, pivot: v });
                }
                amax = amax.max(v.abs());
            }
        }
        let lu = PartialPivLu::new(a);
        let tol = n.max(1) as f64 * f64::EPSILON * amax;
        let u = lu.U();
        for i in 0..n {
            let p = u[(i, i)];
            if !(p.abs() > tol) {
                return Err(Error::Singular { row: i, pivot: p });
            }
        }
        Ok(DenseFactorization { lu, n })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = self.column(b)?;
        self.lu.solve_in_place(x.as_mut());
        Ok(x.col(0).iter().copied().collect())
    }

    /// Solves `Aᵀx = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = self.column(b)?;
        self.lu.solve_transpose_in_place(x.as_mut());
        Ok(x.col(0).iter().copied().collect())
    }

    /// Solves for every column of `b` in place.
    pub fn solve_in_place(&self, b: &mut Matrix) -> Result<()> {
        if b.nrows() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: b.nrows(),
            });
        }
        self.lu.solve_in_place(b.as_mut());
        Ok(())
    }

    /// Solves `Aᵀ X = B` for every column of `b` in place.
    pub fn solve_transpose_in_place(&self, b: &mut Matrix) -> Result<()> {
        if b.nrows() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: b.nrows(),
            });
        }
        self.lu.solve_transpose_in_place(b.as_mut());
        Ok(())
    }

    fn column(&self, b: &[f64]) -> Result<Matrix> {
        if b.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: b.len(),
            });
        }
        Ok(Mat::from_fn(self.n, 1, |i, _| b[i]))
    }

    /// `‖PA − LU‖_max`, computed against the original matrix.
    pub fn reconstruction_error(&self, a: MatRef<'_, f64>) -> f64 {
        let l = self.lu.L();
        let u = self.lu.U();
        let lu = l * u;
        let (fwd, _) = self.lu.P().arrays();
        let mut err = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                err = err.max((a[(fwd[i], j)] - lu[(i, j)]).abs());
            }
        }
        err
    }
}

pub fn lu_solve(a: MatRef<'_, f64>, b: &[f64]) -> Result<Vec<f64>> {
    DenseFactorization::new(a)?.solve(b)
}

/// 2-norm condition number `σ_max/σ_min`; `+∞` when `σ_min` underflows.
pub fn condition_number(a: MatRef<'_, f64>) -> Result<f64> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    let s = a
        .singular_values()
        .map_err(|e| Error::Unsupported(format!("singular value decomposition failed: {e:?}")))?;
    let smax = s.iter().copied().fold(0.0f64, f64::max);
    let smin = s.iter().copied().fold(f64::INFINITY, f64::min);
    if smax == 0.0 || smin <= smax * f64::MIN_POSITIVE {
        return Ok(f64::INFINITY);
    }
    Ok(smax / smin)
}

pub fn matvec(a: MatRef<'_, f64>, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.nrows()];
    for j in 0..a.ncols() {
        let xj = x[j];
        if xj == 0.0 {
            continue;
        }
        for (yi, &aij) in y.iter_mut().zip(a.col(j).iter()) {
            *yi += aij * xj;
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn random(n: usize, seed: u64) -> Matrix {
        let mut g = SplitMix64::new(seed);
        Mat::from_fn(n, n, |_, _| g.range(-1.0, 1.0))
    }

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn identity_and_diagonal() {
        let i3 = Mat::<f64>::identity(3, 3);
        assert_eq!(lu_solve(i3.as_ref(), &[1.0, -2.0, 3.5]).unwrap(), vec![1.0, -2.0, 3.5]);
        let d = Mat::from_fn(2, 2, |i, j| if i == j { [2.0, 4.0][i] } else { 0.0 });
        assert_eq!(lu_solve(d.as_ref(), &[2.0, 4.0]).unwrap(), vec![1.0, 1.0]);
        assert_relative_eq!(condition_number(i3.as_ref()).unwrap(), 1.0, max_relative = 1e-14);
        let d = Mat::from_fn(2, 2, |i, j| if i == j { [10.0, 0.1][i] } else { 0.0 });
        assert_relative_eq!(condition_number(d.as_ref()).unwrap(), 100.0, max_relative = 1e-13);
    }

    #[test]
    fn random_residual() {
        let a = random(50, 7);
        let mut g = SplitMix64::new(8);
        let b: Vec<f64> = (0..50).map(|_| g.uniform()).collect();
        let x = lu_solve(a.as_ref(), &b).unwrap();
        let r: Vec<f64> = matvec(a.as_ref(), &x).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(norm(&r) / norm(&b) <= 1e-11);
        let f = DenseFactorization::new(a.as_ref()).unwrap();
        let xt = f.solve_transpose(&b).unwrap();
        let at = a.transpose().to_owned();
        let r: Vec<f64> = matvec(at.as_ref(), &xt).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(norm(&r) / norm(&b) <= 1e-11);
    }

    #[test]
    fn reconstruction() {
        for seed in 0..3 {
            let a = random(100, seed);
            let f = DenseFactorization::new(a.as_ref()).unwrap();
            let amax = a.col_iter().flat_map(|c| c.iter().copied().collect::<Vec<_>>()).fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(f.reconstruction_error(a.as_ref()) <= 1e-12 * amax);
        }
    }

    #[test]
    fn hilbert_condition() {
        // 40-digit SVD of the 3×3 Hilbert matrix.
        let h = Mat::from_fn(3, 3, |i, j| 1.0 / (i + j + 1) as f64);
        assert_relative_eq!(condition_number(h.as_ref()).unwrap(), 524.056_777_586_060_8, max_relative = 1e-6);
    }

    #[test]
    fn singular_matrices() {
        let z = Mat::<f64>::zeros(3, 3);
        assert!(matches!(lu_solve(z.as_ref(), &[1.0, 1.0, 1.0]), Err(Error::Singular { .. })));
        assert_eq!(condition_number(z.as_ref()).unwrap(), f64::INFINITY);
        let r = Mat::from_fn(3, 3, |i, j| (i + 1) as f64 * (j + 1) as f64);
        assert!(lu_solve(r.as_ref(), &[1.0, 1.0, 1.0]).is_err());
        let rect = Mat::<f64>::zeros(2, 3);
        assert!(matches!(DenseFactorization::new(rect.as_ref()), Err(Error::Dimension { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn condition_scale_invariant(seed in 0u64..1000, c in prop_oneof![-1e3..-1e-3f64, 1e-3..1e3f64]) {
            let a = random(12, seed);
            let k = condition_number(a.as_ref()).unwrap();
            let ca = Mat::from_fn(12, 12, |i, j| c * a[(i, j)]);
            let kc = condition_number(ca.as_ref()).unwrap();
            prop_assert!(k >= 1.0);
            prop_assert!((k - kc).abs() <= 1e-10 * k);
        }

        #[test]
        fn solve_then_multiply_is_identity(seed in 0u64..1000) {
            let a = random(20, seed);
            prop_assume!(condition_number(a.as_ref()).unwrap() <= 1e6);
            let mut g = SplitMix64::new(seed + 1);
            let x: Vec<f64> = (0..20).map(|_| g.range(-1.0, 1.0)).collect();
            let b = matvec(a.as_ref(), &x);
            let y = lu_solve(a.as_ref(), &b).unwrap();
            let err: Vec<f64> = y.iter().zip(&x).map(|(p, q)| p - q).collect();
            prop_assert!(norm(&err) <= 1e-10 * norm(&x));
        }
    }
}
