//! Allocation-free kernels for small dense symmetric matrices stored as
//! row-major `&[f64]` slices. Used by the per-node simulation loops, where
//! millions of d×d (d ≤ 8) decompositions make heap-backed matrix types
//! too slow. Dimensions 1 and 2 use closed forms; larger dimensions fall
//! back to nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};

/// Largest dimension the stack scratch buffers support.
pub const MAX_DIM: usize = 8;

/// Scratch buffer for one d×d matrix.
pub type Buf = [f64; MAX_DIM * MAX_DIM];

pub const ZERO_BUF: Buf = [0.0; MAX_DIM * MAX_DIM];

/// out = a · b
pub fn mul(a: &[f64], b: &[f64], out: &mut [f64], d: usize) {
    for i in 0..d {
        for j in 0..d {
            let mut acc = 0.0;
            for k in 0..d {
                acc += a[i * d + k] * b[k * d + j];
            }
            out[i * d + j] = acc;
        }
    }
}

/// out = aᵀ · b
pub fn mul_at_b(a: &[f64], b: &[f64], out: &mut [f64], d: usize) {
    for i in 0..d {
        for j in 0..d {
            let mut acc = 0.0;
            for k in 0..d {
                acc += a[k * d + i] * b[k * d + j];
            }
            out[i * d + j] = acc;
        }
    }
}

pub fn transpose(a: &[f64], out: &mut [f64], d: usize) {
    for i in 0..d {
        for j in 0..d {
            out[i * d + j] = a[j * d + i];
        }
    }
}

pub fn frobenius(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// tr(a · b) for symmetric-sized square slices.
pub fn trace_prod(a: &[f64], b: &[f64], d: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            acc += a[i * d + j] * b[j * d + i];
        }
    }
    acc
}

pub fn trace(a: &[f64], d: usize) -> f64 {
    (0..d).map(|i| a[i * d + i]).sum()
}

/// xᵀ · a · x
pub fn quad_form(a: &[f64], x: &[f64], d: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..d {
        let mut row = 0.0;
        for j in 0..d {
            row += a[i * d + j] * x[j];
        }
        acc += x[i] * row;
    }
    acc
}

/// a ← (a + aᵀ)/2
pub fn symmetrize(a: &mut [f64], d: usize) {
    for i in 0..d {
        for j in (i + 1)..d {
            let v = 0.5 * (a[i * d + j] + a[j * d + i]);
            a[i * d + j] = v;
            a[j * d + i] = v;
        }
    }
}

/// Eigendecomposition of a symmetric matrix: `vals` ascending, `vecs`
/// orthonormal with eigenvector k in column k (row-major storage).
pub fn sym_eig(a: &[f64], d: usize, vals: &mut [f64], vecs: &mut [f64]) {
    debug_assert!(d <= MAX_DIM);
    match d {
        1 => {
            vals[0] = a[0];
            vecs[0] = 1.0;
        }
        2 => sym_eig2(a, vals, vecs),
        _ => sym_eig_general(a, d, vals, vecs),
    }
}

/// Closed-form Jacobi rotation for the symmetric 2×2 case.
fn sym_eig2(a: &[f64], vals: &mut [f64], vecs: &mut [f64]) {
    let (a00, a01, a11) = (a[0], a[1], a[3]);
    let (mut l0, mut l1, c, s);
    if a01 == 0.0 {
        l0 = a00;
        l1 = a11;
        c = 1.0;
        s = 0.0;
    } else {
        let tau = (a11 - a00) / (2.0 * a01);
        let t = if tau >= 0.0 {
            1.0 / (tau + (1.0 + tau * tau).sqrt())
        } else {
            -1.0 / (-tau + (1.0 + tau * tau).sqrt())
        };
        c = 1.0 / (1.0 + t * t).sqrt();
        s = t * c;
        l0 = a00 - t * a01;
        l1 = a11 + t * a01;
    }
    // columns: (c, -s) for l0 and (s, c) for l1
    let (mut v0, mut v1) = ([c, -s], [s, c]);
    if l0 > l1 {
        std::mem::swap(&mut l0, &mut l1);
        std::mem::swap(&mut v0, &mut v1);
    }
    vals[0] = l0;
    vals[1] = l1;
    vecs[0] = v0[0];
    vecs[2] = v0[1];
    vecs[1] = v1[0];
    vecs[3] = v1[1];
}

fn sym_eig_general(a: &[f64], d: usize, vals: &mut [f64], vecs: &mut [f64]) {
    let m = DMatrix::from_row_slice(d, d, &a[..d * d]);
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    for (col, &src) in order.iter().enumerate() {
        vals[col] = eig.eigenvalues[src];
        for row in 0..d {
            vecs[row * d + col] = eig.eigenvectors[(row, src)];
        }
    }
}

/// out = vecs · diag(f(vals)) · vecsᵀ
pub fn spectral<F: Fn(f64) -> f64>(vals: &[f64], vecs: &[f64], f: F, out: &mut [f64], d: usize) {
    let mut fv = [0.0; MAX_DIM];
    for k in 0..d {
        fv[k] = f(vals[k]);
    }
    for i in 0..d {
        for j in i..d {
            let mut acc = 0.0;
            for k in 0..d {
                acc += vecs[i * d + k] * fv[k] * vecs[j * d + k];
            }
            out[i * d + j] = acc;
            out[j * d + i] = acc;
        }
    }
}
