//! Density matrices and initial-state preparation.
//!
//! All states are represented as dense density matrices. The physically
//! motivated starting point is the thermal state of the flipped static
//! Hamiltonian `H_static + B Sx_tot` (the chain relaxed in the presence of
//! the drive field frozen at its t = 0 direction); fully polarized and
//! seeded random product states are provided for controls.

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{eigh, hermiticity_error, trace, CMatrix, CVector, C64};
use crate::spin::{spin_ops, ChainBasis, Spin};

/// A validated density matrix: Hermitian, unit trace, positive
/// semidefinite within numerical tolerance.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates and wraps `matrix`. Tolerances: Hermiticity and trace
    /// deviation 1e-9, eigenvalue floor -1e-9.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = hermiticity_error(&matrix);
        if herm > 1e-9 {
            return Err(Error::InvalidState(format!(
                "not Hermitian: max |r_ij - conj(r_ji)| = {herm:.3e}"
            )));
        }
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
            return Err(Error::InvalidState(format!(
                "trace = {tr}, expected 1"
            )));
        }
        let (evals, _) = eigh(&matrix)?;
        if let Some(min) = evals.iter().cloned().reduce(f64::min) {
            if min < -1e-9 {
                return Err(Error::InvalidState(format!(
                    "negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(DensityMatrix { matrix })
    }

    /// Wraps a matrix that is trusted to be a valid state (used internally
    /// where validity is guaranteed by construction).
    pub(crate) fn trusted(matrix: CMatrix) -> Self {
        DensityMatrix { matrix }
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Consumes the wrapper.
    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Purity `Tr[rho^2] = sum_ij |rho_ij|^2` (real by Hermiticity).
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Thermal (Gibbs) state `exp(-beta H) / Tr[exp(-beta H)]`, computed in
/// the eigenbasis of `h`. The minimum eigenvalue is subtracted before
/// exponentiation so large `beta` underflows gracefully toward the
/// ground-state projector instead of producing 0/0.
pub fn thermal_state(h: &CMatrix, beta: f64) -> Result<DensityMatrix> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::Config(format!(
            "inverse temperature must be finite and non-negative, got {beta}"
        )));
    }
    let (evals, evecs) = eigh(h)?;
    let e0 = evals.iter().cloned().fold(f64::INFINITY, f64::min);
    let weights: Array1<f64> = evals.mapv(|e| (-beta * (e - e0)).exp());
    let z: f64 = weights.sum();
    let dim = h.nrows();
    // rho = V diag(w/Z) V^dag, assembled without a dense diagonal matrix.
    let mut rho = CMatrix::zeros((dim, dim));
    for (k, &w) in weights.iter().enumerate() {
        let p = w / z;
        if p == 0.0 {
            continue;
        }
        let col = evecs.column(k);
        for i in 0..dim {
            let ci = col[i] * p;
            for j in 0..dim {
                rho[(i, j)] += ci * col[j].conj();
            }
        }
    }
    // Exact by construction up to rounding; re-normalize the trace.
    let tr = trace(&rho).re;
    rho.mapv_inplace(|z| z / tr);
    Ok(DensityMatrix::trusted(rho))
}

/// Direction on the unit sphere for polarized product states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    /// Polar angle from +z, radians.
    pub theta: f64,
    /// Azimuthal angle from +x, radians.
    pub phi: f64,
}

impl Direction {
    /// +z.
    pub const Z: Direction = Direction { theta: 0.0, phi: 0.0 };
    /// +x.
    pub const X: Direction = Direction {
        theta: std::f64::consts::FRAC_PI_2,
        phi: 0.0,
    };
}

/// Single-site coherent (maximal-projection) state along `dir`: the top
/// eigenvector of `n . S`.
fn site_coherent_state(spin: Spin, dir: Direction) -> Result<CVector> {
    let ops = spin_ops(spin);
    let (st, ct) = dir.theta.sin_cos();
    let (sp, cp) = dir.phi.sin_cos();
    let mut n_dot_s = CMatrix::zeros((spin.dim(), spin.dim()));
    n_dot_s.scaled_add(C64::new(st * cp, 0.0), &ops.sx);
    n_dot_s.scaled_add(C64::new(st * sp, 0.0), &ops.sy);
    n_dot_s.scaled_add(C64::new(ct, 0.0), &ops.sz);
    let (evals, evecs) = eigh(&n_dot_s)?;
    let top = evals.len() - 1;
    debug_assert!((evals[top] - spin.s()).abs() < 1e-9);
    Ok(evecs.column(top).to_owned())
}

/// Kronecker product of per-site state vectors, ordered site 0 first
/// (most significant factor), matching the chain basis convention.
fn product_vector(site_states: &[CVector]) -> CVector {
    let mut acc = Array1::from_elem(1, C64::new(1.0, 0.0));
    for s in site_states {
        let mut next = Array1::zeros(acc.len() * s.len());
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in s.iter().enumerate() {
                next[i * s.len() + j] = a * b;
            }
        }
        acc = next;
    }
    acc
}

fn pure_density(vector: &CVector) -> CMatrix {
    let n = vector.len();
    let mut rho = CMatrix::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            rho[(i, j)] = vector[i] * vector[j].conj();
        }
    }
    rho
}

/// Product state with every site polarized along `dir`.
pub fn polarized_product(basis: &ChainBasis, dir: Direction) -> Result<DensityMatrix> {
    let site = site_coherent_state(basis.spin(), dir)?;
    let states: Vec<CVector> = (0..basis.n_sites()).map(|_| site.clone()).collect();
    let psi = product_vector(&states);
    Ok(DensityMatrix::trusted(pure_density(&psi)))
}

/// Product state from explicit per-site vectors. Each vector must have the
/// site dimension and unit norm (tolerance 1e-9).
pub fn custom_product(basis: &ChainBasis, site_states: &[CVector]) -> Result<DensityMatrix> {
    if site_states.len() != basis.n_sites() {
        return Err(Error::DimensionMismatch(format!(
            "expected {} site states, got {}",
            basis.n_sites(),
            site_states.len()
        )));
    }
    let d = basis.spin().dim();
    for (j, s) in site_states.iter().enumerate() {
        if s.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "site {j}: expected dimension {d}, got {}",
                s.len()
            )));
        }
        let norm: f64 = s.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!(
                "site {j}: state norm = {norm}, expected 1"
            )));
        }
    }
    let psi = product_vector(site_states);
    Ok(DensityMatrix::trusted(pure_density(&psi)))
}

/// Seeded random product state: each site gets an independent Haar-like
/// random unit vector drawn from a ChaCha stream, so runs are reproducible
/// across platforms for a fixed seed.
pub fn random_product(basis: &ChainBasis, seed: u64) -> Result<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = basis.spin().dim();
    let mut states = Vec::with_capacity(basis.n_sites());
    for _ in 0..basis.n_sites() {
        // Complex-Gaussian components via Box-Muller give a rotation
        // invariant distribution after normalization.
        let mut v: CVector = Array1::zeros(d);
        for i in 0..d {
            let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
            let u2: f64 = rng.random();
            let r = (-2.0 * u1.ln()).sqrt();
            let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
            v[i] = C64::new(r * c, r * s);
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.mapv_inplace(|z| z / norm);
        states.push(v);
    }
    custom_product(basis, &states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, expectation, frobenius_norm, identity, max_abs_diff};
    use crate::model::{operators_for, static_hamiltonian, ModelParams};
        use approx::assert_abs_diff_eq;

    use ndarray::Array2;

    fn s1_single_site_h() -> CMatrix {
        // -D Sz^2 for S = 1, D = 1: diag(-1, 0, -1).
        Array2::from_diag(&ndarray::arr1(&[
            C64::new(-1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-1.0, 0.0),
        ]))
    }

    #[test]
    fn thermal_single_site_matches_partition_function() {
        // Populations e^{beta D m^2} / Z directly from the scalar partition
        // function: for beta = D = 1, {e, 1, e} / (2e + 1).
        let h = s1_single_site_h();
        let rho = thermal_state(&h, 1.0).unwrap();
        let e = std::f64::consts::E;
        let z = 2.0 * e + 1.0;
        let expected = [e / z, 1.0 / z, e / z];
        for (i, &want) in expected.iter().enumerate() {
            assert_abs_diff_eq!(rho.matrix()[(i, i)].re, want, epsilon = 1e-12);
            assert_abs_diff_eq!(rho.matrix()[(i, i)].im, 0.0, epsilon = 1e-14);
        }
        // Off-diagonals vanish: h is diagonal.
        assert_abs_diff_eq!(rho.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-14);
        // Frozen decimal values of the same populations.
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 0.42231879825151816, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.matrix()[(1, 1)].re, 0.15536240349696366, epsilon = 1e-12);
    }

    #[test]
    fn thermal_state_is_stationary() {
        let p = ModelParams {
            spin: Spin::from_two_s(2).unwrap(),
            n_sites: 2,
            ..ModelParams::default()
        };
        let ops = operators_for(&p).unwrap();
        let h = static_hamiltonian(&p, &ops);
        let rho = thermal_state(&h, 0.7).unwrap();
        let c = commutator(&h, rho.matrix());
        assert!(frobenius_norm(&c) < 1e-10, "[H, rho] must vanish");
    }

    #[test]
    fn thermal_limits() {
        let h = s1_single_site_h();
        // beta -> 0: maximally mixed.
        let hot = thermal_state(&h, 1e-12).unwrap();
        let maximally_mixed = identity(3).mapv(|z| z / C64::new(3.0, 0.0));
        assert!(max_abs_diff(hot.matrix(), &maximally_mixed) < 1e-9);
        // beta -> inf: projector onto the (here twofold degenerate) ground
        // space, purity 1/2.
        let cold = thermal_state(&h, 1e6).unwrap();
        assert_abs_diff_eq!(cold.purity(), 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(cold.matrix()[(1, 1)].re, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn thermal_rejects_bad_beta() {
        let h = s1_single_site_h();
        assert!(thermal_state(&h, -1.0).is_err());
        assert!(thermal_state(&h, f64::NAN).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        let mut ok = identity(2).mapv(|z| z * C64::new(0.5, 0.0));
        assert!(DensityMatrix::new(ok.clone()).is_ok());
        ok[(0, 1)] = C64::new(0.0, 0.3); // breaks Hermiticity
        assert!(matches!(
            DensityMatrix::new(ok),
            Err(Error::InvalidState(_))
        ));
        let traceless = identity(2);
        assert!(DensityMatrix::new(traceless).is_err());
        // Hermitian, unit trace, but indefinite.
        let mut neg = identity(2).mapv(|z| z * C64::new(0.5, 0.0));
        neg[(0, 1)] = C64::new(0.7, 0.0);
        neg[(1, 0)] = C64::new(0.7, 0.0);
        assert!(DensityMatrix::new(neg).is_err());
    }

    #[test]
    fn polarized_product_expectations() {
        let basis = ChainBasis::new(Spin::from_two_s(2).unwrap(), 2).unwrap();
        let p = ModelParams {
            spin: basis.spin(),
            n_sites: 2,
            ..ModelParams::default()
        };
        let ops = operators_for(&p).unwrap();
        let rho_z = polarized_product(&basis, Direction::Z).unwrap();
        assert_abs_diff_eq!(rho_z.purity(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            expectation(&ops.sz_total, rho_z.matrix()).re,
            2.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            expectation(&ops.sx_total, rho_z.matrix()).re,
            0.0,
            epsilon = 1e-12
        );
        let rho_x = polarized_product(&basis, Direction::X).unwrap();
        assert_abs_diff_eq!(
            expectation(&ops.sx_total, rho_x.matrix()).re,
            2.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            expectation(&ops.sz_total, rho_x.matrix()).re,
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn custom_product_rejects_unnormalized() {
        let basis = ChainBasis::new(Spin::from_two_s(1).unwrap(), 2).unwrap();
        let good = ndarray::arr1(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let bad = ndarray::arr1(&[C64::new(0.7, 0.0), C64::new(0.0, 0.0)]);
        assert!(custom_product(&basis, &[good.clone(), good.clone()]).is_ok());
        assert!(custom_product(&basis, &[good.clone(), bad]).is_err());
        assert!(custom_product(&basis, &[good]).is_err());
    }

    #[test]
    fn random_product_is_reproducible_and_valid() {
        let basis = ChainBasis::new(Spin::from_two_s(2).unwrap(), 3).unwrap();
        let a = random_product(&basis, 7).unwrap();
        let b = random_product(&basis, 7).unwrap();
        let c = random_product(&basis, 8).unwrap();
        assert!(max_abs_diff(a.matrix(), b.matrix()) == 0.0);
        assert!(max_abs_diff(a.matrix(), c.matrix()) > 1e-3);
        assert_abs_diff_eq!(a.purity(), 1.0, epsilon = 1e-12);
        assert!(DensityMatrix::new(a.matrix().clone()).is_ok());
    }

    #[test]
    fn product_state_marginals_match_partial_trace() {
        // The reduced state of site 0 of a product state equals the site
        // state; partial trace computed by direct index contraction as an
        // independent route.
        let basis = ChainBasis::new(Spin::from_two_s(2).unwrap(), 2).unwrap();
        let site0 = ndarray::arr1(&[
            C64::new(0.6, 0.0),
            C64::new(0.0, 0.8),
            C64::new(0.0, 0.0),
        ]);
        let site1 = ndarray::arr1(&[
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ]);
        let rho = custom_product(&basis, &[site0.clone(), site1]).unwrap();
        let d = 3;
        let mut reduced = CMatrix::zeros((d, d));
        for a in 0..d {
            for b in 0..d {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..d {
                    s += rho.matrix()[(a * d + k, b * d + k)];
                }
                reduced[(a, b)] = s;
            }
        }
        for a in 0..d {
            for b in 0..d {
                let want = site0[a] * site0[b].conj();
                assert_abs_diff_eq!(reduced[(a, b)].re, want.re, epsilon = 1e-12);
                assert_abs_diff_eq!(reduced[(a, b)].im, want.im, epsilon = 1e-12);
            }
        }
    }
}
