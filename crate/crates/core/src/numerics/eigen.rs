//! Dense Hermitian eigendecomposition (nalgebra backend).

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigenpairs with eigenvalues ascending; column k of `vectors` belongs to `values[k]`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

/// Max-norm of M − M† relative to max |M|.
pub fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    let scale = max_abs(m);
    if scale == 0.0 {
        return 0.0;
    }
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst / scale
}

fn check_square(m: &DMatrix<Complex64>) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::invalid("matrix", format!("must be square and non-empty, got {}x{}", m.nrows(), m.ncols())));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("matrix", "contains non-finite entries"));
    }
    Ok(())
}

fn symmetrized(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    check_square(m)?;
    let defect = hermitian_defect(m);
    if defect > 1e-10 {
        return Err(Error::invalid("matrix", format!("not Hermitian: relative defect {defect:e}")));
    }
    Ok((m + m.adjoint()) * Complex64::new(0.5, 0.0))
}

pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<HermitianEigen> {
    let h = symmetrized(m)?;
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Ascending eigenvalues only; uses a real symmetric solver when M is real.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let h = symmetrized(m)?;
    let mut values: Vec<f64> = if h.iter().all(|z| z.im == 0.0) {
        let re = h.map(|z| z.re);
        re.symmetric_eigenvalues().iter().copied().collect()
    } else {
        h.symmetric_eigenvalues().iter().copied().collect()
    };
    values.sort_by(f64::total_cmp);
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
    }

    #[test]
    fn dark_and_bright_pair() {
        let (g0, ga) = (2.0, 0.7);
        let m = DMatrix::from_row_slice(2, 2, &[g0, ga, ga, g0]).map(|x| Complex64::new(x, 0.0));
        let e = hermitian_eigen(&m).unwrap();
        assert!((e.values[0] - (g0 - ga)).abs() < 1e-14);
        assert!((e.values[1] - (g0 + ga)).abs() < 1e-14);
    }

    #[test]
    fn identity() {
        let m = DMatrix::<Complex64>::identity(5, 5);
        assert!(hermitian_eigen(&m).unwrap().values.iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let m = random_hermitian(50, 7);
        let e = hermitian_eigen(&m).unwrap();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(50, e.values.iter().map(|&v| Complex64::new(v, 0.0))));
        let rebuilt = &e.vectors * d * e.vectors.adjoint();
        assert!(max_abs(&(rebuilt - &m)) < 1e-9);
        let gram = e.vectors.adjoint() * &e.vectors;
        assert!(max_abs(&(gram - DMatrix::identity(50, 50))) < 1e-9);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let trace: f64 = (0..50).map(|i| m[(i, i)].re).sum();
        let sum: f64 = e.values.iter().sum();
        assert!((trace - sum).abs() <= 1e-9 * trace.abs().max(1.0));
        let only = hermitian_eigenvalues(&m).unwrap();
        for (a, b) in only.iter().zip(&e.values) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn residuals() {
        let m = random_hermitian(30, 11);
        let e = hermitian_eigen(&m).unwrap();
        let norm2 = e.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for k in 0..30 {
            let v = e.vectors.column(k);
            let r = &m * v - v * Complex64::new(e.values[k], 0.0);
            assert!(r.norm() <= 1e-9 * norm2);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = random_hermitian(4, 3);
        m[(0, 1)] += Complex64::new(1e-3, 0.0);
        assert!(hermitian_eigen(&m).is_err());
        assert!(hermitian_eigen(&DMatrix::<Complex64>::zeros(2, 3)).is_err());
    }
}
