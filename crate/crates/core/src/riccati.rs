//! Solver for the algebraic matrix equation
//!
//! ```text
//! 2 tr(LJ) L + 4 LJL = KᵀJK
//! ```
//!
//! which has a unique symmetric positive definite solution `L` for SPD `J`
//! and regular `K`. The solver reduces the matrix problem to one monotone
//! scalar equation: substituting `M = J^{1/2} L J^{1/2}` turns the
//! equation into `4M² + 2 tr(M) M = C` with `C = J^{1/2} KᵀJK J^{1/2}`
//! SPD. Given `t = tr(M)`, `M` shares the eigenbasis of `C` with
//! eigenvalues `mᵢ(t) = (−t + √(t² + 4cᵢ))/4`, so `t` solves
//! `g(t) = Σᵢ mᵢ(t) − t = 0`, which is strictly decreasing with
//! `g(0) > 0 ≥ g(Σᵢ √cᵢ / 2)`. The root is found by bisection plus a
//! Newton polish, and `L = J^{−1/2} M J^{−1/2}`.
//!
//! Dimensions up to 8 are supported; all tolerances are relative to
//! `‖KᵀJK‖_F` so the solver is scale-free.

use crate::error::{Error, Result};
use crate::matalg::SpdMatrix;
use crate::smallmat::{self, Buf, ZERO_BUF};
use nalgebra::DMatrix;

/// Relative residual tolerance of an accepted solution.
pub const RESIDUAL_RTOL: f64 = 1e-10;

/// Solution of the matrix equation, with its verified residual.
#[derive(Debug, Clone)]
pub struct RiccatiSolution {
    pub l: SpdMatrix,
    /// ‖2 tr(LJ) L + 4 LJL − KᵀJK‖_F of the returned `l`.
    pub residual_norm: f64,
    pub trace_lj: f64,
    /// The root of the internal scalar equation, equal to tr(J^{1/2} L J^{1/2}).
    pub scalar_root: f64,
}

pub(crate) struct SliceSolution {
    pub l: Buf,
    pub residual_norm: f64,
    pub trace_lj: f64,
    pub scalar_root: f64,
}

/// Solve `2 tr(LJ) L + 4 LJL = KᵀJK` for the unique SPD `L`.
pub fn solve_ell(j: &SpdMatrix, k: &DMatrix<f64>) -> Result<RiccatiSolution> {
    let d = j.dim();
    if k.nrows() != d || k.ncols() != d {
        return Err(Error::InvalidInput(format!(
            "K is {}x{}, expected {d}x{d}",
            k.nrows(),
            k.ncols()
        )));
    }
    if d > smallmat::MAX_DIM {
        return Err(Error::InvalidInput(format!(
            "dimension {d} exceeds supported maximum {}",
            smallmat::MAX_DIM
        )));
    }
    let mut jf = ZERO_BUF;
    let mut kf = ZERO_BUF;
    for r in 0..d {
        for c in 0..d {
            jf[r * d + c] = j.entry(r, c);
            kf[r * d + c] = k[(r, c)];
        }
    }
    let sol = solve_ell_slice(&jf[..d * d], &kf[..d * d], d)?;
    let l = SpdMatrix::from_row_slice(d, &sol.l[..d * d])?;
    Ok(RiccatiSolution {
        l,
        residual_norm: sol.residual_norm,
        trace_lj: sol.trace_lj,
        scalar_root: sol.scalar_root,
    })
}

/// Residual norm ‖2 tr(LJ) L + 4 LJL − KᵀJK‖_F for an arbitrary candidate `L`.
pub fn ell_residual(j: &SpdMatrix, k: &DMatrix<f64>, l: &SpdMatrix) -> Result<f64> {
    let d = j.dim();
    if k.nrows() != d || k.ncols() != d || l.dim() != d {
        return Err(Error::InvalidInput("shape mismatch".into()));
    }
    let lj = l.matrix() * j.matrix();
    let kjk = k.transpose() * j.matrix() * k;
    let res = 2.0 * lj.trace() * l.matrix() + 4.0 * &lj * l.matrix() - kjk;
    Ok(res.norm())
}

/// Slice-based solver used in per-node simulation loops; `j` and `k` are
/// row-major d×d with d ≤ MAX_DIM.
pub(crate) fn solve_ell_slice(j: &[f64], k: &[f64], d: usize) -> Result<SliceSolution> {
    debug_assert!(d >= 1 && d <= smallmat::MAX_DIM);
    let n = d * d;

    let j_norm = smallmat::frobenius(&j[..n]);
    let j_floor = 1e-12 * j_norm.max(1.0);
    let mut jvals = [0.0; smallmat::MAX_DIM];
    let mut jvecs = ZERO_BUF;
    smallmat::sym_eig(j, d, &mut jvals, &mut jvecs);
    if jvals[0] < j_floor {
        return Err(Error::NotPositiveDefinite {
            min_eig: jvals[0],
            floor: j_floor,
        });
    }

    // regularity of K via the eigenvalues of KᵀK
    let mut ktk = ZERO_BUF;
    smallmat::mul_at_b(k, k, &mut ktk, d);
    let mut svals = [0.0; smallmat::MAX_DIM];
    let mut svecs = ZERO_BUF;
    smallmat::sym_eig(&ktk[..n], d, &mut svals, &mut svecs);
    let sigma_min = svals[0].max(0.0).sqrt();
    let sigma_max = svals[d - 1].max(0.0).sqrt();
    let threshold = 1e-12 * sigma_max;
    if sigma_max == 0.0 || sigma_min < threshold {
        return Err(Error::SingularK {
            sigma_min,
            threshold,
        });
    }

    let mut j_sqrt = ZERO_BUF;
    let mut j_inv_sqrt = ZERO_BUF;
    smallmat::spectral(&jvals[..d], &jvecs, f64::sqrt, &mut j_sqrt, d);
    smallmat::spectral(&jvals[..d], &jvecs, |x| 1.0 / x.sqrt(), &mut j_inv_sqrt, d);

    // kjk = KᵀJK, C = J^{1/2} kjk J^{1/2}
    let mut tmp = ZERO_BUF;
    let mut kjk = ZERO_BUF;
    smallmat::mul(j, k, &mut tmp, d);
    smallmat::mul_at_b(k, &tmp[..n], &mut kjk, d);
    smallmat::symmetrize(&mut kjk[..n], d);
    let kjk_norm = smallmat::frobenius(&kjk[..n]);

    let mut c = ZERO_BUF;
    smallmat::mul(&kjk[..n], &j_sqrt[..n], &mut tmp, d);
    smallmat::mul(&j_sqrt[..n], &tmp[..n], &mut c, d);
    smallmat::symmetrize(&mut c[..n], d);

    let mut cvals = [0.0; smallmat::MAX_DIM];
    let mut cvecs = ZERO_BUF;
    smallmat::sym_eig(&c[..n], d, &mut cvals, &mut cvecs);
    for v in cvals[..d].iter_mut() {
        *v = v.max(0.0);
    }

    let root = solve_trace_equation(&cvals[..d])?;

    // M = (−t I + (t² I + 4C)^{1/2})/4 in the eigenbasis of C
    let mut m = ZERO_BUF;
    smallmat::spectral(
        &cvals[..d],
        &cvecs,
        |ci| 0.25 * (-root + (root * root + 4.0 * ci).sqrt()),
        &mut m,
        d,
    );
    let mut l = ZERO_BUF;
    smallmat::mul(&m[..n], &j_inv_sqrt[..n], &mut tmp, d);
    smallmat::mul(&j_inv_sqrt[..n], &tmp[..n], &mut l, d);
    smallmat::symmetrize(&mut l[..n], d);

    // residual of the defining equation
    let mut lj = ZERO_BUF;
    smallmat::mul(&l[..n], j, &mut lj, d);
    let trace_lj = smallmat::trace(&lj[..n], d);
    let mut ljl = ZERO_BUF;
    smallmat::mul(&lj[..n], &l[..n], &mut ljl, d);
    let mut residual_sq = 0.0;
    for i in 0..n {
        let r = 2.0 * trace_lj * l[i] + 4.0 * ljl[i] - kjk[i];
        residual_sq += r * r;
    }
    let residual_norm = residual_sq.sqrt();
    if !residual_norm.is_finite() || residual_norm > RESIDUAL_RTOL * kjk_norm {
        return Err(Error::NumericalFailure(format!(
            "riccati residual {residual_norm:e} exceeds {:e}",
            RESIDUAL_RTOL * kjk_norm
        )));
    }

    Ok(SliceSolution {
        l,
        residual_norm,
        trace_lj,
        scalar_root: root,
    })
}

/// Solve Σᵢ (−t + √(t² + 4cᵢ))/4 = t on (0, Σᵢ √cᵢ / 2] by bisection to
/// 1e−14 of the initial bracket, then two Newton polish steps.
fn solve_trace_equation(cvals: &[f64]) -> Result<f64> {
    let g = |t: f64| -> f64 {
        cvals
            .iter()
            .map(|&ci| 0.25 * (-t + (t * t + 4.0 * ci).sqrt()))
            .sum::<f64>()
            - t
    };
    let g_prime = |t: f64| -> f64 {
        cvals
            .iter()
            .map(|&ci| 0.25 * (t / (t * t + 4.0 * ci).sqrt() - 1.0))
            .sum::<f64>()
            - 1.0
    };

    let hi0: f64 = cvals.iter().map(|&ci| ci.sqrt()).sum::<f64>() / 2.0;
    if !(hi0 > 0.0) || !hi0.is_finite() {
        return Err(Error::NumericalFailure(format!(
            "trace equation bracket degenerate: {hi0:e}"
        )));
    }
    let (mut lo, mut hi) = (0.0, hi0);
    if g(hi) > 0.0 {
        // impossible for exact arithmetic; internal bug signal
        return Err(Error::NumericalFailure(
            "trace equation not bracketed".into(),
        ));
    }
    let width = 1e-14 * hi0;
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..2 {
        let gp = g_prime(t);
        if gp.abs() > 0.0 {
            t = (t - g(t) / gp).clamp(0.0, hi0);
        }
    }
    Ok(t)
}
