//! Dense complex linear algebra on row-major `ndarray` buffers.
//!
//! Hermitian eigendecomposition goes through LAPACK `zheevd`; products go
//! through BLAS `zgemm`/`zgemv`. Everything else (Kronecker products, norms,
//! the Taylor-scaled propagator) is plain Rust.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

extern "C" {
    fn zheevd_(
        jobz: *const u8,
        uplo: *const u8,
        n: *const i32,
        a: *mut C64,
        lda: *const i32,
        w: *mut f64,
        work: *mut C64,
        lwork: *const i32,
        rwork: *mut f64,
        lrwork: *const i32,
        iwork: *mut i32,
        liwork: *const i32,
        info: *mut i32,
    );

    fn zgemm_(
        transa: *const u8,
        transb: *const u8,
        m: *const i32,
        n: *const i32,
        k: *const i32,
        alpha: *const C64,
        a: *const C64,
        lda: *const i32,
        b: *const C64,
        ldb: *const i32,
        beta: *const C64,
        c: *mut C64,
        ldc: *const i32,
    );

    fn zgemv_(
        trans: *const u8,
        m: *const i32,
        n: *const i32,
        alpha: *const C64,
        a: *const C64,
        lda: *const i32,
        x: *const C64,
        incx: *const i32,
        beta: *const C64,
        y: *mut C64,
        incy: *const i32,
    );
}

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// Eigendecomposition of a Hermitian matrix. Returns eigenvalues in ascending
/// order and the matching eigenvectors as columns. Hermiticity is the
/// caller's contract; only the upper triangle (of the logical matrix) is read.
pub fn eigh(m: &ArrayView2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Dimension(format!(
            "eigh needs a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    if n == 0 {
        return Ok((Array1::zeros(0), Array2::zeros((0, 0))));
    }
    if n == 1 {
        return Ok((
            Array1::from(vec![m[(0, 0)].re]),
            Array2::from_elem((1, 1), ONE),
        ));
    }

    // LAPACK reads the buffer column-major; for Hermitian input the row-major
    // buffer is conj(M), whose eigenvectors are the conjugates of M's.
    let mut a: Vec<C64> = m.iter().cloned().collect();
    let mut w = vec![0.0f64; n];
    let ni = n as i32;
    let mut info = 0i32;

    let (lwork, lrwork, liwork) = {
        let mut wq = [ZERO];
        let mut rq = [0.0f64];
        let mut iq = [0i32];
        let query = -1i32;
        unsafe {
            zheevd_(
                b"V".as_ptr(),
                b"L".as_ptr(),
                &ni,
                a.as_mut_ptr(),
                &ni,
                w.as_mut_ptr(),
                wq.as_mut_ptr(),
                &query,
                rq.as_mut_ptr(),
                &query,
                iq.as_mut_ptr(),
                &query,
                &mut info,
            );
        }
        if info != 0 {
            return Err(Error::Linalg(format!("zheevd workspace query failed: info={info}")));
        }
        (wq[0].re as i32, rq[0] as i32, iq[0])
    };

    let mut work = vec![ZERO; lwork.max(1) as usize];
    let mut rwork = vec![0.0f64; lrwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        zheevd_(
            b"V".as_ptr(),
            b"L".as_ptr(),
            &ni,
            a.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &lrwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Linalg(format!("zheevd failed: info={info}")));
    }

    // Buffer rows (row-major view) now hold eigenvectors of conj(M);
    // conjugate and transpose so columns are eigenvectors of M.
    let vec_rows = Array2::from_shape_vec((n, n), a)
        .map_err(|e| Error::Linalg(e.to_string()))?;
    let mut v = Array2::<C64>::zeros((n, n));
    for k in 0..n {
        for i in 0..n {
            v[(i, k)] = vec_rows[(k, i)].conj();
        }
    }
    Ok((Array1::from(w), v))
}

/// `a * b` via BLAS zgemm (row-major operands).
pub fn mat_mul(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> Array2<C64> {
    let (m, k) = (a.nrows(), a.ncols());
    let (k2, n) = (b.nrows(), b.ncols());
    assert_eq!(k, k2, "mat_mul inner dimensions differ");
    let mut c = Array2::<C64>::zeros((m, n));
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    let a_s = a.as_standard_layout();
    let b_s = b.as_standard_layout();
    // Row-major product through the column-major transpose identity
    // C^T = B^T A^T.
    let (mi, ni, ki) = (n as i32, m as i32, k as i32);
    unsafe {
        zgemm_(
            b"N".as_ptr(),
            b"N".as_ptr(),
            &mi,
            &ni,
            &ki,
            &ONE,
            b_s.as_ptr(),
            &mi,
            a_s.as_ptr(),
            &ki,
            &ZERO,
            c.as_mut_ptr(),
            &mi,
        );
    }
    c
}

/// `a * x` via BLAS zgemv (row-major matrix).
pub fn mat_vec(a: &ArrayView2<C64>, x: &ArrayView1<C64>) -> Array1<C64> {
    let (m, n) = (a.nrows(), a.ncols());
    assert_eq!(n, x.len(), "mat_vec dimensions differ");
    let mut y = Array1::<C64>::zeros(m);
    if m == 0 || n == 0 {
        return y;
    }
    let a_s = a.as_standard_layout();
    let x_s = x.as_standard_layout();
    let (mi, ni) = (n as i32, m as i32);
    let inc = 1i32;
    unsafe {
        zgemv_(
            b"T".as_ptr(),
            &mi,
            &ni,
            &ONE,
            a_s.as_ptr(),
            &mi,
            x_s.as_ptr(),
            &inc,
            &ZERO,
            y.as_mut_ptr(),
            &inc,
        );
    }
    y
}

/// Conjugate transpose.
pub fn adjoint(m: &ArrayView2<C64>) -> Array2<C64> {
    let (r, c) = (m.nrows(), m.ncols());
    let mut out = Array2::<C64>::zeros((c, r));
    for i in 0..r {
        for j in 0..c {
            out[(j, i)] = m[(i, j)].conj();
        }
    }
    out
}

/// `u * m * u†`.
pub fn sandwich(u: &ArrayView2<C64>, m: &ArrayView2<C64>) -> Array2<C64> {
    let um = mat_mul(u, m);
    let udag = adjoint(u);
    mat_mul(&um.view(), &udag.view())
}

/// Kronecker product, row-major with the left factor major.
pub fn kron(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> Array2<C64> {
    let (ra, ca) = (a.nrows(), a.ncols());
    let (rb, cb) = (b.nrows(), b.ncols());
    let mut out = Array2::<C64>::zeros((ra * rb, ca * cb));
    for i1 in 0..ra {
        for j1 in 0..ca {
            let aij = a[(i1, j1)];
            if aij == ZERO {
                continue;
            }
            for i2 in 0..rb {
                for j2 in 0..cb {
                    out[(i1 * rb + i2, j1 * cb + j2)] = aij * b[(i2, j2)];
                }
            }
        }
    }
    out
}

pub fn frobenius(m: &ArrayView2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &ArrayView2<C64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Max entry of |M - M†|.
pub fn hermiticity_deviation(m: &ArrayView2<C64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Gershgorin bound on the spectral radius of a Hermitian matrix.
pub fn gershgorin_bound(m: &ArrayView2<C64>) -> f64 {
    let n = m.nrows();
    let mut bound: f64 = 0.0;
    for i in 0..n {
        let row: f64 = (0..n).map(|j| m[(i, j)].norm()).sum();
        bound = bound.max(row);
    }
    bound
}

/// `exp(-i h t) psi` for Hermitian `h`, by Taylor series with scaling.
///
/// The step count is chosen from a Gershgorin bound so each sub-step has
/// `‖h‖ τ ≤ 0.5`, where the series reaches machine precision in ~15 terms.
pub fn expm_apply(h: &ArrayView2<C64>, psi: &ArrayView1<C64>, t: f64) -> Array1<C64> {
    let bound = gershgorin_bound(h);
    expm_apply_bounded(h, psi, t, bound)
}

/// Same as [`expm_apply`] with a caller-supplied spectral bound (saves the
/// O(N²) Gershgorin scan in stepping loops).
pub fn expm_apply_bounded(
    h: &ArrayView2<C64>,
    psi: &ArrayView1<C64>,
    t: f64,
    spectral_bound: f64,
) -> Array1<C64> {
    let steps = ((spectral_bound * t.abs()) / 0.5).ceil().max(1.0) as usize;
    let tau = C64::new(0.0, -t / steps as f64);
    let mut state = psi.to_owned();
    for _ in 0..steps {
        let mut acc = state.clone();
        let mut term = state.clone();
        for j in 1..=30u32 {
            term = mat_vec(h, &term.view());
            let scale = tau / j as f64;
            term.mapv_inplace(|z| z * scale);
            acc = acc + &term;
            let tn: f64 = term.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if tn < 1e-17 * acc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() {
                break;
            }
        }
        state = acc;
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn test_hermitian(n: usize) -> Array2<C64> {
        let mut m = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            m[(i, i)] = C64::new(i as f64 * 0.7 - 1.0, 0.0);
            if i + 1 < n {
                m[(i, i + 1)] = C64::new(0.4, -0.2);
                m[(i + 1, i)] = C64::new(0.4, 0.2);
            }
        }
        m
    }

    #[test]
    fn eigh_reconstructs() {
        let m = test_hermitian(12);
        let (w, v) = eigh(&m.view()).unwrap();
        // M V = V diag(w)
        let mv = mat_mul(&m.view(), &v.view());
        let mut err: f64 = 0.0;
        for k in 0..12 {
            for i in 0..12 {
                err = err.max((mv[(i, k)] - v[(i, k)] * w[k]).norm());
            }
        }
        assert!(err < 1e-12, "residual {err}");
        // ascending
        for k in 1..12 {
            assert!(w[k] >= w[k - 1]);
        }
        // unitary columns
        let vdag = adjoint(&v.view());
        let id = mat_mul(&vdag.view(), &v.view());
        for i in 0..12 {
            for j in 0..12 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gemm_matches_naive() {
        let a = array![
            [C64::new(1.0, 2.0), C64::new(0.0, -1.0)],
            [C64::new(2.5, 0.0), C64::new(-1.0, 1.0)],
            [C64::new(0.0, 0.5), C64::new(3.0, 0.0)]
        ];
        let b = array![
            [C64::new(0.5, 0.0), C64::new(1.0, 1.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 2.0), C64::new(-1.0, 0.0), C64::new(1.0, -1.0)]
        ];
        let c = mat_mul(&a.view(), &b.view());
        for i in 0..3 {
            for j in 0..3 {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..2 {
                    s += a[(i, k)] * b[(k, j)];
                }
                assert!((c[(i, j)] - s).norm() < 1e-14);
            }
        }
        let x = array![C64::new(1.0, -1.0), C64::new(0.0, 2.0), C64::new(0.3, 0.0)];
        let y = mat_vec(&b.view(), &x.view());
        for i in 0..2 {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..3 {
                s += b[(i, k)] * x[k];
            }
            assert!((y[i] - s).norm() < 1e-14);
        }
    }

    #[test]
    fn expm_apply_matches_eigh_route() {
        let m = test_hermitian(9);
        let mut psi = Array1::<C64>::zeros(9);
        psi[0] = C64::new(0.6, 0.0);
        psi[3] = C64::new(0.0, 0.8);
        let t = 2.37;
        let direct = expm_apply(&m.view(), &psi.view(), t);
        let (w, v) = eigh(&m.view()).unwrap();
        let coeffs = mat_vec(&adjoint(&v.view()).view(), &psi.view());
        let phased: Array1<C64> = coeffs
            .iter()
            .zip(w.iter())
            .map(|(c, &e)| c * C64::new(0.0, -e * t).exp())
            .collect();
        let reference = mat_vec(&v.view(), &phased.view());
        let err: f64 = direct
            .iter()
            .zip(reference.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-12, "distance {err}");
    }
}
