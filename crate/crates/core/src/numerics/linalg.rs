use super::matrix::{DenseMatrix, Real};
use super::NumericsError;

/// Symmetric positive definite matrix. Construction runs a Cholesky
/// factorization, so holding an `SpdMatrix` means the factorization exists.
#[derive(Clone, Debug, PartialEq)]
pub struct SpdMatrix<T> {
    inner: DenseMatrix<T>,
}

impl<T: Real> SpdMatrix<T> {
    pub fn new(m: DenseMatrix<T>) -> Result<Self, NumericsError> {
        cholesky(&m)?;
        Ok(Self { inner: m })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DenseMatrix::identity(n),
        }
    }

    /// Caller guarantees symmetry and positive definiteness.
    pub(crate) fn new_unchecked(m: DenseMatrix<T>) -> Self {
        Self { inner: m }
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.inner
    }

    pub fn into_matrix(self) -> DenseMatrix<T> {
        self.inner
    }
}

impl<T> std::ops::Index<(usize, usize)> for SpdMatrix<T> {
    type Output = T;
    fn index(&self, ij: (usize, usize)) -> &T {
        &self.inner[ij]
    }
}

fn symmetry_tol<T: Real>() -> T {
    T::epsilon().sqrt()
}

/// Lower-triangular `L` with `L Lᵀ = A`.
///
/// Fails with [`NumericsError::NotPositiveDefinite`] as soon as a pivot is
/// not strictly positive.
pub fn cholesky<T: Real>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>, NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::Shape(format!(
            "cholesky needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_symmetric(symmetry_tol()) {
        return Err(NumericsError::NotSymmetric);
    }
    let n = a.rows();
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d = d - l[(j, k)] * l[(j, k)];
        }
        if !(d > T::zero()) {
            return Err(NumericsError::NotPositiveDefinite { pivot: j });
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Inverse through the Cholesky factor: `A⁻¹ = L⁻ᵀ L⁻¹`.
pub fn spd_inverse<T: Real>(a: &SpdMatrix<T>) -> Result<SpdMatrix<T>, NumericsError> {
    let l = cholesky(a.matrix())?;
    let n = a.dim();
    // columns of L⁻¹ by forward substitution
    let mut linv = DenseMatrix::zeros(n, n);
    for c in 0..n {
        for i in c..n {
            let mut s = if i == c { T::one() } else { T::zero() };
            for k in c..i {
                s = s - l[(i, k)] * linv[(k, c)];
            }
            linv[(i, c)] = s / l[(i, i)];
        }
    }
    let mut inv = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = T::zero();
            for k in i..n {
                s = s + linv[(k, i)] * linv[(k, j)];
            }
            inv[(i, j)] = s;
            inv[(j, i)] = s;
        }
    }
    Ok(SpdMatrix::new_unchecked(inv))
}

/// `log det A = 2 Σ log L_ii`.
pub fn log_det<T: Real>(a: &SpdMatrix<T>) -> Result<T, NumericsError> {
    let l = cholesky(a.matrix())?;
    Ok(l.diagonal()
        .into_iter()
        .fold(T::zero(), |acc, d| acc + d.ln())
        * T::lit(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{sample_standard_normal, SeededRng};
    use approx::assert_relative_eq;

    fn m(rows: &[&[f64]]) -> DenseMatrix<f64> {
        DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn random_spd(rng: &mut SeededRng, n: usize) -> SpdMatrix<f64> {
        let g: DenseMatrix<f64> = sample_standard_normal(rng, n, n + 2).unwrap();
        let mut a = g.matmul(&g.transpose()).unwrap();
        for i in 0..n {
            a[(i, i)] += 0.5;
        }
        SpdMatrix::new(a).unwrap()
    }

    // Jacobi eigenvalue iteration, independent of the Cholesky path.
    fn jacobi_eigenvalues(a: &DenseMatrix<f64>) -> Vec<f64> {
        let n = a.rows();
        let mut a = a.clone();
        for _ in 0..100 {
            let mut off = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    off += a[(p, q)] * a[(p, q)];
                    if a[(p, q)].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
            if off < 1e-30 {
                break;
            }
        }
        a.diagonal()
    }

    #[test]
    fn cholesky_examples() {
        let id = DenseMatrix::<f64>::identity(4);
        assert_eq!(cholesky(&id).unwrap(), id);
        let l = cholesky(&m(&[&[4.0, 2.0], &[2.0, 3.0]])).unwrap();
        assert_relative_eq!(l[(0, 0)], 2.0);
        assert_relative_eq!(l[(1, 0)], 1.0);
        assert_relative_eq!(l[(1, 1)], 2f64.sqrt());
        assert_eq!(l[(0, 1)], 0.0);
        assert_eq!(
            cholesky(&m(&[&[1.0, 2.0], &[2.0, 1.0]])),
            Err(NumericsError::NotPositiveDefinite { pivot: 1 })
        );
        assert_eq!(
            cholesky(&m(&[&[1.0, 2.0], &[0.0, 1.0]])),
            Err(NumericsError::NotSymmetric)
        );
        assert!(matches!(
            cholesky(&m(&[&[1.0, 2.0]])),
            Err(NumericsError::Shape(_))
        ));
    }

    #[test]
    fn cholesky_reconstructs_random_spd() {
        let mut rng = SeededRng::new(11);
        for n in 1..=9 {
            let a = random_spd(&mut rng, n);
            let l = cholesky(a.matrix()).unwrap();
            let llt = l.matmul(&l.transpose()).unwrap();
            assert!(llt.max_abs_diff(a.matrix()) <= 1e-10 * a.matrix().max_abs());
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(
            spd_inverse(&SpdMatrix::<f64>::identity(3)).unwrap(),
            SpdMatrix::identity(3)
        );
        let d = SpdMatrix::new(DenseMatrix::from_diagonal(&[2.0, 4.0])).unwrap();
        let inv = spd_inverse(&d).unwrap();
        assert_relative_eq!(inv[(0, 0)], 0.5, max_relative = 1e-15);
        assert_relative_eq!(inv[(1, 1)], 0.25, max_relative = 1e-15);
        assert_eq!(inv[(0, 1)], 0.0);

        let mut rng = SeededRng::new(5);
        let a = random_spd(&mut rng, 5);
        let prod = a
            .matrix()
            .matmul(spd_inverse(&a).unwrap().matrix())
            .unwrap();
        assert!(prod.max_abs_diff(&DenseMatrix::identity(5)) <= 1e-8);
    }

    #[test]
    fn log_det_examples() {
        assert_eq!(log_det(&SpdMatrix::<f64>::identity(4)).unwrap(), 0.0);
        let e = std::f64::consts::E;
        let d = SpdMatrix::new(DenseMatrix::from_diagonal(&[e, e])).unwrap();
        assert_relative_eq!(log_det(&d).unwrap(), 2.0, max_relative = 1e-12);

        let mut rng = SeededRng::new(17);
        for n in 2..=9 {
            let a = random_spd(&mut rng, n);
            let oracle: f64 = jacobi_eigenvalues(a.matrix()).iter().map(|v| v.ln()).sum();
            let ld = log_det(&a).unwrap();
            assert_relative_eq!(ld, oracle, max_relative = 1e-10, epsilon = 1e-10);
            let inv_ld = log_det(&spd_inverse(&a).unwrap()).unwrap();
            assert!((inv_ld + ld).abs() <= 1e-8);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let a =
            SpdMatrix::new(DenseMatrix::from_rows(&[vec![4.0f32, 2.0], vec![2.0, 3.0]]).unwrap())
                .unwrap();
        let inv = spd_inverse(&a).unwrap();
        let prod = a.matrix().matmul(inv.matrix()).unwrap();
        assert!(prod.max_abs_diff(&DenseMatrix::identity(2)) < 1e-5);
        assert!((log_det(&a).unwrap() - 8f32.ln()).abs() < 1e-5);
    }
}
