//! Dense symmetric-matrix algebra: eigendecomposition, SPD square roots
//! and inverse square roots, with an explicit rejection floor for
//! eigenvalues instead of silent regularization.

use crate::error::{Error, Result};
use crate::smallmat;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Dense symmetric matrix. Construction copies the upper triangle to the
/// lower one, so symmetry holds exactly by construction. Positive
/// definiteness is enforced where an operation requires it, against
/// [`SpdMatrix::eig_floor`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    m: DMatrix<f64>,
}

impl SpdMatrix {
    /// Build from a row-major square slice; the upper triangle is
    /// authoritative.
    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {dim}x{dim} entries, got {}",
                entries.len()
            )));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        let mut m = DMatrix::from_row_slice(dim, dim, entries);
        for i in 0..dim {
            for j in (i + 1)..dim {
                m[(j, i)] = m[(i, j)];
            }
        }
        Ok(Self { m })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut flat = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::InvalidMatrix("ragged rows".into()));
            }
            flat.extend_from_slice(row);
        }
        Self::from_row_slice(dim, &flat)
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidMatrix("not square".into()));
        }
        Self::from_row_slice(m.nrows(), m.transpose().as_slice())
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let mut m = DMatrix::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidMatrix("non-finite entry".into()));
            }
            m[(i, i)] = v;
        }
        Ok(Self { m })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn frobenius(&self) -> f64 {
        self.m.norm()
    }

    /// Eigenvalues below this floor reject the matrix as not positive
    /// definite: near-singularity signals a degenerate configuration
    /// rather than a case to regularize silently.
    pub fn eig_floor(&self) -> f64 {
        1e-12 * self.frobenius().max(1.0)
    }

    /// Eigendecomposition with eigenvalues sorted ascending and
    /// orthonormal eigenvectors as columns.
    pub fn sym_eig(&self) -> (DVector<f64>, DMatrix<f64>) {
        let d = self.dim();
        if d <= smallmat::MAX_DIM {
            let mut flat = vec![0.0; d * d];
            for i in 0..d {
                for j in 0..d {
                    flat[i * d + j] = self.m[(i, j)];
                }
            }
            let mut vals = [0.0; smallmat::MAX_DIM];
            let mut vecs = smallmat::ZERO_BUF;
            smallmat::sym_eig(&flat, d, &mut vals, &mut vecs);
            let p = DMatrix::from_fn(d, d, |i, j| vecs[i * d + j]);
            (DVector::from_row_slice(&vals[..d]), p)
        } else {
            let eig = nalgebra::SymmetricEigen::new(self.m.clone());
            let mut order: Vec<usize> = (0..d).collect();
            order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
            let vals = DVector::from_iterator(d, order.iter().map(|&i| eig.eigenvalues[i]));
            let p = DMatrix::from_fn(d, d, |i, j| eig.eigenvectors[(i, order[j])]);
            (vals, p)
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let (vals, _) = self.sym_eig();
        vals[0]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.min_eigenvalue() >= self.eig_floor()
    }

    fn spectral_map<F: Fn(f64) -> f64>(&self, f: F) -> SpdMatrix {
        let (vals, p) = self.sym_eig();
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let mut acc = 0.0;
                for k in 0..d {
                    acc += p[(i, k)] * f(vals[k]) * p[(j, k)];
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc;
            }
        }
        SpdMatrix { m: out }
    }

    fn require_spd(&self) -> Result<()> {
        let min_eig = self.min_eigenvalue();
        let floor = self.eig_floor();
        if min_eig < floor {
            return Err(Error::NotPositiveDefinite { min_eig, floor });
        }
        Ok(())
    }

    /// Symmetric positive definite square root.
    pub fn spd_sqrt(&self) -> Result<SpdMatrix> {
        self.require_spd()?;
        Ok(self.spectral_map(f64::sqrt))
    }

    /// Symmetric positive definite inverse square root.
    pub fn spd_inv_sqrt(&self) -> Result<SpdMatrix> {
        self.require_spd()?;
        Ok(self.spectral_map(|x| 1.0 / x.sqrt()))
    }
}

/// Random SPD matrix with condition number at most `max_cond`, built from
/// a Haar-ish orthogonal basis (QR of a Gaussian matrix) and log-uniform
/// eigenvalues.
pub fn random_spd<R: Rng>(dim: usize, max_cond: f64, rng: &mut R) -> SpdMatrix {
    let q = random_orthogonal(dim, rng);
    let log_span = max_cond.ln();
    let base: f64 = rng.gen_range(-2.0..2.0);
    let mut m = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        let lam = (base + rng.gen_range(0.0..1.0) * log_span).exp();
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] += q[(i, k)] * lam * q[(j, k)];
            }
        }
    }
    SpdMatrix::from_dmatrix(&m).expect("finite by construction")
}

/// Random orthogonal matrix from the QR decomposition of a Gaussian draw.
pub fn random_orthogonal<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    loop {
        let g = DMatrix::from_fn(dim, dim, |_, _| {
            rng.sample::<f64, _>(rand_distr::StandardNormal)
        });
        let qr = g.qr();
        let q = qr.q();
        if q.determinant().abs() > 0.5 {
            return q;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn identity_eig() {
        let s = SpdMatrix::identity(3);
        let (vals, p) = s.sym_eig();
        for k in 0..3 {
            assert!((vals[k] - 1.0).abs() < 1e-14);
        }
        let ortho = (p.transpose() * &p - DMatrix::identity(3, 3)).norm();
        assert!(ortho <= 1e-12 * 3.0);
    }

    #[test]
    fn diagonal_eig() {
        let s = SpdMatrix::from_diagonal(&[9.0, 4.0]).unwrap();
        let (vals, _) = s.sym_eig();
        assert!((vals[0] - 4.0).abs() < 1e-14);
        assert!((vals[1] - 9.0).abs() < 1e-14);
    }

    #[test]
    fn hand_2x2_eigenvalues() {
        // char poly of [[2,1],[1,2]]: (2-l)^2 - 1 = 0 -> l in {1, 3}
        let s = SpdMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let (vals, p) = s.sym_eig();
        assert!((vals[0] - 1.0).abs() < 1e-13);
        assert!((vals[1] - 3.0).abs() < 1e-13);
        let rec = (&p * DMatrix::from_diagonal(&vals) * p.transpose() - s.matrix()).norm();
        assert!(rec <= 1e-10 * s.frobenius());
    }

    #[test]
    fn sqrt_diagonal() {
        let s = SpdMatrix::from_diagonal(&[4.0, 9.0]).unwrap();
        let r = s.spd_sqrt().unwrap();
        assert!((r.entry(0, 0) - 2.0).abs() < 1e-14);
        assert!((r.entry(1, 1) - 3.0).abs() < 1e-14);
        assert!(r.entry(0, 1).abs() < 1e-14);
        let ri = s.spd_inv_sqrt().unwrap();
        assert!((ri.entry(0, 0) - 0.5).abs() < 1e-14);
        assert!((ri.entry(1, 1) - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn sqrt_hand_2x2() {
        // eigenvalues of [[2,1],[1,2]] are (1,3); sqrt has (1, sqrt 3)
        let s = SpdMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let r = s.spd_sqrt().unwrap();
        let (vals, _) = r.sym_eig();
        assert!((vals[0] - 1.0).abs() < 1e-13);
        assert!((vals[1] - 3.0f64.sqrt()).abs() < 1e-13);
        let rr = r.matrix() * r.matrix();
        assert!((rr - s.matrix()).norm() <= 1e-10 * s.frobenius());
    }

    #[test]
    fn random_spd_roundtrips() {
        let mut rng = ChaCha12Rng::seed_from_u64(2024);
        for case in 0..1000 {
            let dim = 1 + case % 8;
            let s = random_spd(dim, 1e6, &mut rng);
            let r = s.spd_sqrt().unwrap();
            let rr = r.matrix() * r.matrix();
            assert!(
                (rr - s.matrix()).norm() <= 1e-10 * s.frobenius(),
                "sqrt reconstruction failed at dim {dim}"
            );
            let ri = s.spd_inv_sqrt().unwrap();
            let prod = ri.matrix() * s.matrix() * ri.matrix();
            let err = (prod - DMatrix::identity(dim, dim)).norm();
            assert!(err <= 1e-9 * dim as f64, "inv sqrt failed: {err:e}");
            // inv_sqrt is the inverse of sqrt
            let both = ri.matrix() * r.matrix();
            assert!((both - DMatrix::identity(dim, dim)).norm() <= 1e-9 * dim as f64);
            let (vals, _) = s.sym_eig();
            assert!(vals[0] >= s.eig_floor());
        }
    }

    #[test]
    fn rejects_non_finite() {
        let err = SpdMatrix::from_rows(&[vec![1.0, f64::NAN], vec![0.0, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::InvalidMatrix(_)));
    }

    #[test]
    fn rejects_indefinite_sqrt() {
        let s = SpdMatrix::from_diagonal(&[1.0, -2.0]).unwrap();
        let err = s.spd_sqrt().unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
    }

    #[test]
    fn upper_triangle_authoritative() {
        let s = SpdMatrix::from_rows(&[vec![1.0, 0.5], vec![0.9, 1.0]]).unwrap();
        assert_eq!(s.entry(1, 0), 0.5);
        assert_eq!(s.entry(0, 1), s.entry(1, 0));
    }
}
