//! Time evolution backends.
//!
//! Two routes to the same dynamics, kept deliberately independent so they
//! can check each other:
//!
//! * **stepping**: fixed-step RK4 integration of the Liouville-von Neumann
//!   equation `d rho / dt = -i [H(t), rho]` with the explicitly
//!   time-dependent lab-frame Hamiltonian;
//! * **spectral**: one exact diagonalization of the static rotating-frame
//!   Hamiltonian, after which every expectation value is a closed-form
//!   phase sum, with no accumulating integration error at any horizon.
//!
//! The rotating-frame transformation `R(t) = prod_j exp(+i w t S_j^z)` is
//! diagonal in the product basis, so frame changes are elementwise phase
//! multiplications driven by the total-m bookkeeping of the basis.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dagger, eigh, expectation, hermiticity_error, trace, CMatrix, C64};
use crate::model::LabHamiltonian;
use crate::states::DensityMatrix;

/// Which evolution route to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// RK4 integration in the lab frame.
    Stepping,
    /// Exact diagonalization in the rotating frame.
    #[default]
    Spectral,
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stepping" => Ok(Backend::Stepping),
            "spectral" => Ok(Backend::Spectral),
            other => Err(Error::Config(format!(
                "unknown backend '{other}'; expected 'stepping' or 'spectral'"
            ))),
        }
    }
}

/// Maximum total number of samples per run (`periods * samples_per_period`).
pub const MAX_SAMPLES: usize = 10_000_000;

/// Evolution horizon and sampling grid. Doubles as the `[evolution]`
/// config-file section, so unknown keys are rejected and every field
/// defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionConfig {
    /// Evolution route.
    pub backend: Backend,
    /// Integration step for the stepping backend. `None` picks `T0 / 1000`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Number of drive periods to evolve.
    pub periods: usize,
    /// Expectation-value samples per drive period.
    pub samples_per_period: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            backend: Backend::Spectral,
            dt: None,
            periods: 1000,
            samples_per_period: 20,
        }
    }
}

impl EvolutionConfig {
    /// Validates the grid against the drive period and resolves the
    /// integration step. At least two samples per period are needed to see
    /// a sub-harmonic at all; the step must resolve the drive
    /// (`dt <= T0 / 100`).
    pub fn resolve_dt(&self, period: f64) -> Result<f64> {
        if self.periods == 0 {
            return Err(Error::Config("periods must be at least 1".into()));
        }
        if self.samples_per_period < 2 {
            return Err(Error::Config(format!(
                "samples_per_period must be at least 2, got {}",
                self.samples_per_period
            )));
        }
        let total = self
            .periods
            .checked_mul(self.samples_per_period)
            .filter(|&n| n <= MAX_SAMPLES);
        if total.is_none() {
            return Err(Error::Config(format!(
                "periods * samples_per_period exceeds {MAX_SAMPLES}"
            )));
        }
        let dt = self.dt.unwrap_or(period / 1000.0);
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::Config(format!("dt must be positive, got {dt}")));
        }
        if dt > period / 100.0 {
            return Err(Error::Config(format!(
                "dt = {dt:.3e} is too coarse to resolve the drive; need dt <= T0/100 = {:.3e}",
                period / 100.0
            )));
        }
        Ok(dt)
    }

    /// The sampling grid `t_k = k * T0 / samples_per_period`,
    /// `k = 0 .. periods * samples_per_period - 1`.
    pub fn sample_times(&self, period: f64) -> Vec<f64> {
        let n = self.periods * self.samples_per_period;
        let step = period / self.samples_per_period as f64;
        (0..n).map(|k| k as f64 * step).collect()
    }
}

/// Expectation values of a set of observables on a common time grid.
/// Values stay complex here; observable-specific reality checks live with
/// the observable definitions.
#[derive(Debug, Clone)]
pub struct ExpectationSeries {
    /// Sample times (physical units, not periods).
    pub times: Vec<f64>,
    /// One row per observable, one column per sample time.
    pub values: Array2<C64>,
}

/// RK4 integration of `d rho / dt = -i [H(t), rho]` in the lab frame,
/// sampling `Tr[O rho(t)]` for each observable on the config grid.
///
/// The state is re-Hermitized (`rho <- (rho + rho^dag) / 2`) after every
/// step; trace and Hermiticity drift are monitored and the run aborts if
/// either exceeds 1e-6 (NaN poisoning also trips this, by construction of
/// the comparison).
pub fn step_evolve(
    lab: &LabHamiltonian,
    rho0: &DensityMatrix,
    config: &EvolutionConfig,
    observables: &[&CMatrix],
) -> Result<ExpectationSeries> {
    step_evolve_final(lab, rho0, config, observables).map(|(series, _)| series)
}

/// [`step_evolve`] that also returns the state at the last sample, for
/// invariant audits (trace, purity) of the integrator itself.
pub fn step_evolve_final(
    lab: &LabHamiltonian,
    rho0: &DensityMatrix,
    config: &EvolutionConfig,
    observables: &[&CMatrix],
) -> Result<(ExpectationSeries, DensityMatrix)> {
    let period = lab.period();
    let dt_max = config.resolve_dt(period)?;
    let times = config.sample_times(period);
    let dim = rho0.dim();
    if lab.static_part.nrows() != dim {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {dim} does not match Hamiltonian dimension {}",
            lab.static_part.nrows()
        )));
    }

    let sample_dt = period / config.samples_per_period as f64;
    let steps_per_sample = (sample_dt / dt_max).ceil() as usize;
    let h = sample_dt / steps_per_sample as f64;

    let mut rho = rho0.matrix().clone();
    let mut values = Array2::zeros((observables.len(), times.len()));
    let mut ham = CMatrix::zeros((dim, dim));

    let record = |rho: &CMatrix, k: usize, values: &mut Array2<C64>| {
        for (i, op) in observables.iter().enumerate() {
            values[(i, k)] = expectation(op, rho);
        }
    };

    record(&rho, 0, &mut values);
    for k in 1..times.len() {
        let t_base = times[k - 1];
        for s in 0..steps_per_sample {
            let t = t_base + s as f64 * h;
            rk4_step(lab, &mut ham, &mut rho, t, h);
            // Re-Hermitize: transpose-conjugate averaging kills the
            // antisymmetric part of the rounding error.
            rho = rho.mapv(|z| z * C64::new(0.5, 0.0)) + dagger(&rho).mapv(|z| z * C64::new(0.5, 0.0));
            let trace_dev = (trace(&rho).re - 1.0).abs() + trace(&rho).im.abs();
            let herm = hermiticity_error(&rho);
            if !(trace_dev <= 1e-6 && herm <= 1e-6) {
                return Err(Error::Drift(format!(
                    "state drift at t = {t:.6}: |trace - 1| = {trace_dev:.3e}, \
                     hermiticity = {herm:.3e}; reduce dt"
                )));
            }
        }
        record(&rho, k, &mut values);
    }
    let series = ExpectationSeries { times, values };
    Ok((series, DensityMatrix::trusted(rho)))
}

/// `-i [H, rho]`, allocated fresh (two gemm calls dominate the cost).
fn liouville(ham: &CMatrix, rho: &CMatrix) -> CMatrix {
    let mut k = ham.dot(rho);
    k -= &rho.dot(ham);
    k.mapv_inplace(|z| C64::new(z.im, -z.re)); // multiply by -i
    k
}

fn rk4_step(lab: &LabHamiltonian, ham: &mut CMatrix, rho: &mut CMatrix, t: f64, h: f64) {
    let half = C64::new(0.5 * h, 0.0);
    let full = C64::new(h, 0.0);

    lab.eval_into(t, ham);
    let k1 = liouville(ham, rho);

    lab.eval_into(t + 0.5 * h, ham);
    let mut stage = rho.clone();
    stage.scaled_add(half, &k1);
    let k2 = liouville(ham, &stage);

    stage.assign(rho);
    stage.scaled_add(half, &k2);
    let k3 = liouville(ham, &stage);

    lab.eval_into(t + h, ham);
    stage.assign(rho);
    stage.scaled_add(full, &k3);
    let k4 = liouville(ham, &stage);

    let sixth = C64::new(h / 6.0, 0.0);
    let third = C64::new(h / 3.0, 0.0);
    rho.scaled_add(sixth, &k1);
    rho.scaled_add(third, &k2);
    rho.scaled_add(third, &k3);
    rho.scaled_add(sixth, &k4);
}

/// Exact propagation from one diagonalization of a time-independent
/// Hamiltonian (the rotating-frame generator in the driven problem).
pub struct SpectralEvolution {
    /// Eigenvalues of the generator, ascending.
    pub eigenvalues: Array1<f64>,
    /// Eigenvector columns.
    pub eigenvectors: CMatrix,
    /// Initial state in the eigenbasis, `V^dag rho V`.
    rho_eig: CMatrix,
}

/// Number of sample times processed per phase-matrix block; bounds the
/// working set of the gemm formulation to a few megabytes.
const TIME_CHUNK: usize = 1024;

impl SpectralEvolution {
    /// Diagonalizes `h` and projects the initial state.
    pub fn new(h: &CMatrix, rho0: &DensityMatrix) -> Result<Self> {
        if h.nrows() != rho0.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state dimension {} does not match Hamiltonian dimension {}",
                rho0.dim(),
                h.nrows()
            )));
        }
        let (eigenvalues, eigenvectors) = eigh(h)?;
        let vd = dagger(&eigenvectors);
        let rho_eig = vd.dot(rho0.matrix()).dot(&eigenvectors);
        Ok(SpectralEvolution {
            eigenvalues,
            eigenvectors,
            rho_eig,
        })
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Tr[rho H]`, conserved under the evolution this object generates.
    pub fn energy(&self) -> f64 {
        self.rho_eig
            .diag()
            .iter()
            .zip(self.eigenvalues.iter())
            .map(|(p, e)| p.re * e)
            .sum()
    }

    /// Expectation values of `op` (expressed in the same frame as the
    /// generator) at the given times:
    ///
    /// ```text
    /// <O>(t) = sum_{mn} rho_mn(0) exp(-i (E_m - E_n) t) O_nm
    /// ```
    ///
    /// evaluated as one phase-vector gemm per time block, O(dim^2) per
    /// sample with a BLAS constant.
    pub fn expectations(&self, op: &CMatrix, times: &[f64]) -> Result<Vec<C64>> {
        let dim = self.dim();
        if op.nrows() != dim || op.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "observable is {}x{}, expected {dim}x{dim}",
                op.nrows(),
                op.ncols()
            )));
        }
        // OE_{nm} = (V^dag O V)_{nm}; P_{mn} = rho_mn OE_{nm}. Then
        // <O>(t) = sum_{mn} P_{mn} u_m(t) conj(u_n(t)) with
        // u_m(t) = exp(-i E_m t).
        let vd = dagger(&self.eigenvectors);
        let oe = vd.dot(op).dot(&self.eigenvectors);
        let p = &self.rho_eig * &oe.t();

        let mut out = Vec::with_capacity(times.len());
        let mut phases = Array2::zeros((TIME_CHUNK.min(times.len().max(1)), dim));
        for chunk in times.chunks(TIME_CHUNK) {
            if phases.nrows() != chunk.len() {
                phases = Array2::zeros((chunk.len(), dim));
            }
            for (r, &t) in chunk.iter().enumerate() {
                for (m, &e) in self.eigenvalues.iter().enumerate() {
                    phases[(r, m)] = C64::new(0.0, -e * t).exp();
                }
            }
            // rows of V_block = conj(phases) P^T; <O>(t_r) = phases_r . V_r.
            let v_block = phases.mapv(|z| z.conj()).dot(&p.t());
            for (r, _) in chunk.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for m in 0..dim {
                    acc += phases[(r, m)] * v_block[(r, m)];
                }
                out.push(acc);
            }
        }
        Ok(out)
    }

    /// Expectation series for several observables on a shared grid,
    /// matching the [`ExpectationSeries`] layout of the stepping backend.
    pub fn expectation_series(
        &self,
        observables: &[&CMatrix],
        times: &[f64],
    ) -> Result<ExpectationSeries> {
        let mut values = Array2::zeros((observables.len(), times.len()));
        for (i, op) in observables.iter().enumerate() {
            let row = self.expectations(op, times)?;
            for (k, v) in row.into_iter().enumerate() {
                values[(i, k)] = v;
            }
        }
        Ok(ExpectationSeries {
            times: times.to_vec(),
            values,
        })
    }

    /// The full state at time `t`, reconstructed in the original basis.
    pub fn state_at(&self, t: f64) -> DensityMatrix {
        let dim = self.dim();
        let mut shifted = CMatrix::zeros((dim, dim));
        for m in 0..dim {
            for n in 0..dim {
                let phase = C64::new(0.0, -(self.eigenvalues[m] - self.eigenvalues[n]) * t).exp();
                shifted[(m, n)] = self.rho_eig[(m, n)] * phase;
            }
        }
        let rho = self
            .eigenvectors
            .dot(&shifted)
            .dot(&dagger(&self.eigenvectors));
        DensityMatrix::trusted(rho)
    }
}

/// Conjugates `x` by the frame rotation `R(theta) = diag(exp(i theta M_k))`:
/// `(R x R^dag)_{kl} = exp(i theta (M_k - M_l)) x_{kl}`. With
/// `theta = w t` this maps a lab-frame observable to its rotating-frame
/// representative; `-w t` inverts it. Diagonal operators (any function of
/// the `S^z`s) are fixed points.
pub fn rotate_matrix(x: &CMatrix, m_totals: &[f64], theta: f64) -> CMatrix {
    let dim = x.nrows();
    debug_assert_eq!(m_totals.len(), dim);
    let mut out = x.clone();
    for k in 0..dim {
        for l in 0..dim {
            let phase = C64::new(0.0, theta * (m_totals[k] - m_totals[l])).exp();
            out[(k, l)] *= phase;
        }
    }
    out
}
