//! Dense complex matrices and a cyclic Jacobi eigensolver for Hermitian
//! matrices up to dimension 64.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Outer product v w^dagger.
    pub fn outer(v: &[Complex64], w: &[Complex64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> CMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max_ij |a_ij - conj(a_ji)|, zero for exactly Hermitian matrices.
    pub fn hermitian_deviation(&self) -> f64 {
        assert!(self.is_square());
        let mut dev = 0.0_f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Off-diagonal Frobenius norm.
fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Maximum number of cyclic Jacobi sweeps before giving up.
const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the unitary of eigenvectors as
/// columns, so that `a = V diag(w) V^dagger`. Convergence is declared when the
/// off-diagonal Frobenius norm drops below 1e-13 (scaled by the Frobenius norm
/// of the input when that exceeds one), within at most 100 sweeps.
pub fn eigh(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            actual: a.cols(),
        });
    }
    let n = a.rows();
    let dev = a.hermitian_deviation();
    if dev > 1e-10 {
        return Err(Error::NotHermitian { deviation: dev });
    }
    // Work on the exact Hermitian part so rounding in the input cannot leak
    // into complex eigenvalues.
    let mut m = CMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)].conj()));
    let mut v = CMatrix::identity(n);
    let threshold = 1e-13 * a.frobenius_norm().max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m) < threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let phase = apq / mag; // e^{i phi}
                let theta = (aqq - app) / (2.0 * mag);
                // Smaller root of t^2 + 2 theta t - 1 = 0 keeps the rotation
                // angle below 45 degrees.
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let sp = s * phase.conj(); // s e^{-i phi}

                // Columns p and q of M and V pick up J; rows of M follow by
                // Hermitian symmetry.
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - sp * mkq;
                    m[(k, q)] = s * mkp + c * phase.conj() * mkq;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sp * vkq;
                    v[(k, q)] = s * vkp + c * phase.conj() * vkq;
                }
                for k in 0..n {
                    m[(p, k)] = m[(k, p)].conj();
                    m[(q, k)] = m[(k, q)].conj();
                }
                let new_pp = c * c * app + s * s * aqq - 2.0 * c * s * mag;
                let new_qq = s * s * app + c * c * aqq + 2.0 * c * s * mag;
                m[(p, p)] = Complex64::new(new_pp, 0.0);
                m[(q, q)] = Complex64::new(new_qq, 0.0);
                m[(p, q)] = Complex64::new(0.0, 0.0);
                m[(q, p)] = Complex64::new(0.0, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((eigenvalues, vectors))
}

/// Hermitian square root of a positive semidefinite matrix (negative
/// eigenvalues within tolerance are clamped to zero).
pub fn sqrt_psd(a: &CMatrix) -> Result<CMatrix> {
    let (w, v) = eigh(a)?;
    let n = a.rows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lambda) in w.iter().enumerate() {
        if lambda <= 0.0 {
            continue;
        }
        let root = lambda.sqrt();
        let col = v.column(k);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += root * col[i] * col[j].conj();
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let g = CMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        g.add(&g.adjoint()).scale(Complex64::new(0.5, 0.0))
    }

    fn reconstruct(w: &[f64], v: &CMatrix) -> CMatrix {
        let n = w.len();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lambda) in w.iter().enumerate() {
            let col = v.column(k);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += lambda * col[i] * col[j].conj();
                }
            }
        }
        out
    }

    #[test]
    fn matmul_and_kron_basics() {
        let x = CMatrix::from_fn(2, 2, |i, j| {
            Complex64::new(if i != j { 1.0 } else { 0.0 }, 0.0)
        });
        let id = CMatrix::identity(2);
        assert_eq!(x.mul(&id), x);
        assert_eq!(x.mul(&x), id);
        let xx = x.kron(&x);
        assert_eq!(xx.rows(), 4);
        assert_eq!(xx[(0, 3)], Complex64::new(1.0, 0.0));
        assert_eq!(xx[(0, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn eigh_pauli_x() {
        let x = CMatrix::from_fn(2, 2, |i, j| {
            Complex64::new(if i != j { 1.0 } else { 0.0 }, 0.0)
        });
        let (w, v) = eigh(&x).unwrap();
        assert!((w[0] + 1.0).abs() < 1e-14);
        assert!((w[1] - 1.0).abs() < 1e-14);
        assert!(reconstruct(&w, &v).sub(&x).frobenius_norm() < 1e-13);
    }

    #[test]
    fn eigh_pauli_y() {
        let y = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => Complex64::new(0.0, -1.0),
            (1, 0) => Complex64::new(0.0, 1.0),
            _ => Complex64::new(0.0, 0.0),
        });
        let (w, v) = eigh(&y).unwrap();
        assert!((w[0] + 1.0).abs() < 1e-14);
        assert!((w[1] - 1.0).abs() < 1e-14);
        assert!(reconstruct(&w, &v).sub(&y).frobenius_norm() < 1e-13);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let mut a = CMatrix::identity(3);
        a[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(eigh(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eigh_reconstructs_random_matrices() {
        // 1000 random Hermitian matrices with dimensions across 2..=64.
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        for trial in 0..1000 {
            let n = rng.gen_range(2..=64);
            let a = random_hermitian(n, &mut rng);
            let (w, v) = eigh(&a).unwrap();
            let err = reconstruct(&w, &v).sub(&a).frobenius_norm();
            assert!(err < 1e-10, "trial {trial}: dim {n}, residual {err}");
            // Eigenvector unitarity.
            let vv = v.adjoint().mul(&v);
            assert!(vv.sub(&CMatrix::identity(n)).frobenius_norm() < 1e-10);
            // Ascending order.
            for k in 1..w.len() {
                assert!(w[k] >= w[k - 1]);
            }
        }
    }

    #[test]
    fn sqrt_psd_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.gen_range(2..=8);
            let g = random_hermitian(n, &mut rng);
            let psd = g.mul(&g.adjoint());
            let root = sqrt_psd(&psd).unwrap();
            let err = root.mul(&root).sub(&psd).frobenius_norm();
            assert!(err < 1e-9, "dim {n}: {err}");
        }
    }
}
