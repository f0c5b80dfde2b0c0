//! Dense complex linear algebra helpers.
//!
//! Chains are capped small enough that dense `Array2<Complex64>` storage plus
//! LAPACK eigensolvers are the right tool; nothing here is sparse-aware.

use ndarray::{s, Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = Array2<C64>;
pub type CVector = Array1<C64>;

/// Kronecker product `a ⊗ b`, block-filled row by row.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = CMatrix::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == C64::ZERO {
                continue;
            }
            out.slice_mut(s![i * br..(i + 1) * br, j * bc..(j + 1) * bc])
                .assign(&b.mapv(|z| z * aij));
        }
    }
    out
}

/// Conjugate transpose.
pub fn dagger(a: &CMatrix) -> CMatrix {
    a.t().mapv(|z| z.conj())
}

/// `[a, b] = a·b − b·a`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.dot(b) - b.dot(a)
}

pub fn trace(a: &CMatrix) -> C64 {
    a.diag().sum()
}

pub fn frobenius_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest elementwise deviation from `a = a†`.
pub fn hermiticity_error(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (a[(i, j)] - a[(j, i)].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `Tr[op·rho]` without forming the product matrix.
pub fn expectation(op: &CMatrix, rho: &CMatrix) -> C64 {
    let n = op.nrows();
    let mut acc = C64::ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += op[(i, j)] * rho[(j, i)];
        }
    }
    acc
}

/// Hermitian eigendecomposition. Eigenvalues ascending; columns of the second
/// return are the corresponding orthonormal eigenvectors, so
/// `h = v · diag(w) · v†`.
///
/// The backing LAPACK call hands back eigenvectors of the transposed matrix
/// (a row-major layout artifact), i.e. the conjugates of what we want; the
/// conjugation below normalizes that, and the unit tests pin the convention.
pub fn eigh(h: &CMatrix) -> Result<(Array1<f64>, CMatrix)> {
    let herm = hermiticity_error(h);
    if herm > 1e-9 {
        return Err(Error::NotHermitian(format!(
            "max |h_ij - conj(h_ji)| = {herm:.3e}"
        )));
    }
    let (w, v) = h
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Eigen(e.to_string()))?;
    Ok((w, v.mapv(|z| z.conj())))
}

/// `‖u†u − 1‖_max`, for checking that an eigenvector matrix is unitary.
pub fn unitarity_error(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let prod = dagger(u).dot(u);
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { C64::ONE } else { C64::ZERO };
            worst = worst.max((prod[(i, j)] - expect).norm());
        }
    }
    worst
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::eye(dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_of_2x2_blocks() {
        let a = ndarray::array![[c(1.0, 0.0), c(2.0, 0.0)], [c(0.0, 0.0), c(1.0, -1.0)]];
        let b = ndarray::array![[c(0.0, 1.0), c(3.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
        let k = kron(&a, &b);
        assert_eq!(k.dim(), (4, 4));
        // top-left block = 1·b, top-right = 2·b
        assert_eq!(k[(0, 0)], c(0.0, 1.0));
        assert_eq!(k[(0, 2)], c(0.0, 2.0));
        assert_eq!(k[(0, 3)], c(6.0, 0.0));
        // bottom-right block = (1−i)·b, so its corner is (1−i)·i = 1+i
        assert_eq!(k[(2, 2)], c(1.0, 1.0));
        assert_eq!(k[(3, 2)], c(1.0, -1.0));
        // trace multiplicativity: tr(a⊗b) = tr(a)·tr(b)
        assert_eq!(trace(&k), trace(&a) * trace(&b));
    }

    #[test]
    fn kron_identity_is_block_diagonal_copy() {
        let b = ndarray::array![[c(1.0, 0.0), c(2.0, 3.0)], [c(2.0, -3.0), c(-1.0, 0.0)]];
        let k = kron(&identity(2), &b);
        assert_eq!(k[(0, 1)], b[(0, 1)]);
        assert_eq!(k[(2, 3)], b[(0, 1)]);
        assert_eq!(k[(0, 2)], C64::ZERO);
    }

    #[test]
    fn hermiticity_error_detects_asymmetry() {
        let mut m = identity(3);
        assert_eq!(hermiticity_error(&m), 0.0);
        m[(0, 1)] = c(0.0, 1.0);
        m[(1, 0)] = c(0.0, 1.0); // conj would be -i
        assert_relative_eq!(hermiticity_error(&m), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn eigh_matches_hand_solved_2x2() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let h = ndarray::array![[c(1.0, 0.0), c(0.0, 1.0)], [c(0.0, -1.0), c(1.0, 0.0)]];
        let (w, v) = eigh(&h).unwrap();
        assert_relative_eq!(w[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(w[1], 2.0, epsilon = 1e-12);
        assert!(unitarity_error(&v) < 1e-12);
        // columns satisfy h·v_k = w_k·v_k
        for k in 0..2 {
            let col = v.column(k).to_owned();
            let hv = h.dot(&col);
            let err: f64 = hv
                .iter()
                .zip(col.iter())
                .map(|(a, b)| (a - b * w[k]).norm())
                .sum();
            assert!(err < 1e-12, "column {k} is not an eigenvector");
        }
        // reconstruct h = v diag(w) v†
        let mut d = CMatrix::zeros((2, 2));
        d[(0, 0)] = c(w[0], 0.0);
        d[(1, 1)] = c(w[1], 0.0);
        let rec = v.dot(&d).dot(&dagger(&v));
        assert!(max_abs_diff(&rec, &h) < 1e-12);
    }

    #[test]
    fn eigh_rejects_non_hermitian_input() {
        let m = ndarray::array![[c(0.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
        assert!(matches!(eigh(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn expectation_equals_trace_of_product() {
        let op = ndarray::array![[c(1.0, 0.0), c(0.0, 2.0)], [c(0.0, -2.0), c(3.0, 0.0)]];
        let rho = ndarray::array![[c(0.7, 0.0), c(0.1, 0.1)], [c(0.1, -0.1), c(0.3, 0.0)]];
        let direct = trace(&op.dot(&rho));
        let fast = expectation(&op, &rho);
        assert!((direct - fast).norm() < 1e-14);
    }
}
