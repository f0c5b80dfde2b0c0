//! Spin-S operator algebra and dense chain embedding.
//!
//! Basis conventions used everywhere in this crate:
//! - single site: |S, m⟩ ordered m = S, S−1, …, −S, so `sz` is
//!   diag(S, S−1, …, −S);
//! - chain: Kronecker order site 0 ⊗ site 1 ⊗ … ⊗ site N−1, row-major, so
//!   basis index `k` decomposes into per-site digits base (2S+1) with site 0
//!   as the most significant digit.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

/// Hard cap on the many-body dimension (2S+1)^N for dense storage.
pub const DIM_CAP: usize = 5000;

/// Spin quantum number stored as 2S, so half-integer spins are exact.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Spin {
    two_s: u32,
}

impl Spin {
    pub fn from_two_s(two_s: u32) -> Result<Self> {
        if two_s == 0 {
            return Err(Error::InvalidSpin(
                "S = 0 carries no dynamics; need 2S ≥ 1".into(),
            ));
        }
        Ok(Spin { two_s })
    }

    /// From S itself; accepts only exact integers and half-integers.
    pub fn new(s: f64) -> Result<Self> {
        let two_s = 2.0 * s;
        if !two_s.is_finite() || two_s < 0.0 || (two_s - two_s.round()).abs() > 1e-9 {
            return Err(Error::InvalidSpin(format!(
                "S = {s} is not a non-negative integer or half-integer"
            )));
        }
        Spin::from_two_s(two_s.round() as u32)
    }

    pub fn two_s(self) -> u32 {
        self.two_s
    }

    pub fn s(self) -> f64 {
        f64::from(self.two_s) / 2.0
    }

    /// Local Hilbert-space dimension 2S+1.
    pub fn dim(self) -> usize {
        self.two_s as usize + 1
    }

    /// Magnetic quantum numbers in basis order: S, S−1, …, −S.
    pub fn m_values(self) -> Vec<f64> {
        let s = self.s();
        (0..self.dim()).map(|i| s - i as f64).collect()
    }
}

impl TryFrom<f64> for Spin {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Spin::new(v)
    }
}

impl From<Spin> for f64 {
    fn from(s: Spin) -> f64 {
        s.s()
    }
}

/// The five standard operators for one spin-S site.
#[derive(Clone, Debug)]
pub struct SpinOps {
    pub spin: Spin,
    pub sx: CMatrix,
    pub sy: CMatrix,
    pub sz: CMatrix,
    pub sp: CMatrix,
    pub sm: CMatrix,
}

/// Builds sx, sy, sz, s± for one site from the ladder matrix elements
/// ⟨m±1|S±|m⟩ = √(S(S+1) − m(m±1)).
pub fn spin_ops(spin: Spin) -> SpinOps {
    let d = spin.dim();
    let s = spin.s();
    let ms = spin.m_values();
    let mut sz = CMatrix::zeros((d, d));
    let mut sp = CMatrix::zeros((d, d));
    for (i, &m) in ms.iter().enumerate() {
        sz[(i, i)] = C64::new(m, 0.0);
        // S+ |m⟩ = √(S(S+1) − m(m+1)) |m+1⟩; |m+1⟩ sits at row i−1.
        if i > 0 {
            sp[(i - 1, i)] = C64::new((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let sm = crate::linalg::dagger(&sp);
    let sx = (&sp + &sm).mapv(|z| z * 0.5);
    let sy = (&sp - &sm).mapv(|z| z * C64::new(0.0, -0.5));
    SpinOps {
        spin,
        sx,
        sy,
        sz,
        sp,
        sm,
    }
}

/// Many-body dimension (2S+1)^N, enforcing [`DIM_CAP`].
pub fn chain_dim(spin: Spin, n_sites: usize) -> Result<usize> {
    if n_sites == 0 {
        return Err(Error::DimensionMismatch("chain needs at least one site".into()));
    }
    let d = spin.dim();
    let mut dim: usize = 1;
    for _ in 0..n_sites {
        dim = dim.checked_mul(d).ok_or(Error::DimensionCap {
            dim: usize::MAX,
            cap: DIM_CAP,
        })?;
        if dim > DIM_CAP {
            return Err(Error::DimensionCap { dim, cap: DIM_CAP });
        }
    }
    Ok(dim)
}

/// Product basis bookkeeping for a uniform chain.
#[derive(Clone, Debug)]
pub struct ChainBasis {
    spin: Spin,
    n_sites: usize,
    dim: usize,
    /// Σ_j m_j for every basis state; drives the diagonal frame rotation.
    m_totals: Vec<f64>,
}

impl ChainBasis {
    pub fn new(spin: Spin, n_sites: usize) -> Result<Self> {
        let dim = chain_dim(spin, n_sites)?;
        let d = spin.dim();
        let ms = spin.m_values();
        let mut m_totals = vec![0.0; dim];
        for (k, slot) in m_totals.iter_mut().enumerate() {
            let mut rest = k;
            let mut total = 0.0;
            for _ in 0..n_sites {
                total += ms[rest % d];
                rest /= d;
            }
            *slot = total;
        }
        Ok(ChainBasis {
            spin,
            n_sites,
            dim,
            m_totals,
        })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m_totals(&self) -> &[f64] {
        &self.m_totals
    }
}

/// An operator acting on one site, kept together with its site tag.
#[derive(Clone, Debug)]
pub struct SiteOperator {
    pub site: usize,
    pub matrix: CMatrix,
}

/// Embeds a single-site operator at `site`: 1 ⊗ … ⊗ a ⊗ … ⊗ 1.
///
/// Filled by direct index arithmetic, O(dim·d), never via repeated Kronecker
/// products of the full chain.
pub fn embed(a: &CMatrix, site: usize, basis: &ChainBasis) -> Result<SiteOperator> {
    let d = basis.spin.dim();
    if a.dim() != (d, d) {
        return Err(Error::DimensionMismatch(format!(
            "local operator is {:?}, site dimension is {d}",
            a.dim()
        )));
    }
    if site >= basis.n_sites {
        return Err(Error::DimensionMismatch(format!(
            "site {site} out of range for {} sites",
            basis.n_sites
        )));
    }
    let dim_right = d.pow((basis.n_sites - 1 - site) as u32);
    let dim_left = basis.dim / (d * dim_right);
    let mut out = CMatrix::zeros((basis.dim, basis.dim));
    for l in 0..dim_left {
        for ia in 0..d {
            for ja in 0..d {
                let v = a[(ia, ja)];
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                let row_base = (l * d + ia) * dim_right;
                let col_base = (l * d + ja) * dim_right;
                for r in 0..dim_right {
                    out[(row_base + r, col_base + r)] = v;
                }
            }
        }
    }
    Ok(SiteOperator { site, matrix: out })
}

/// Embeds a two-site product a_site · b_{site+1} on neighbouring sites.
///
/// Equivalent to embed(a)·embed(b) but filled directly in O(dim·d²), avoiding
/// a dim³ matrix product per bond.
pub fn embed_pair(a: &CMatrix, b: &CMatrix, site: usize, basis: &ChainBasis) -> Result<CMatrix> {
    let d = basis.spin.dim();
    if a.dim() != (d, d) || b.dim() != (d, d) {
        return Err(Error::DimensionMismatch(format!(
            "local operators are {:?} and {:?}, site dimension is {d}",
            a.dim(),
            b.dim()
        )));
    }
    if site + 1 >= basis.n_sites {
        return Err(Error::DimensionMismatch(format!(
            "bond ({site}, {}) out of range for {} sites",
            site + 1,
            basis.n_sites
        )));
    }
    let dim_right = d.pow((basis.n_sites - 2 - site) as u32);
    let dim_left = basis.dim / (d * d * dim_right);
    let mut out = CMatrix::zeros((basis.dim, basis.dim));
    for l in 0..dim_left {
        for ia in 0..d {
            for ja in 0..d {
                let va = a[(ia, ja)];
                if va == C64::new(0.0, 0.0) {
                    continue;
                }
                for ib in 0..d {
                    for jb in 0..d {
                        let v = va * b[(ib, jb)];
                        if v == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let row_base = ((l * d + ia) * d + ib) * dim_right;
                        let col_base = ((l * d + ja) * d + jb) * dim_right;
                        for r in 0..dim_right {
                            out[(row_base + r, col_base + r)] = v;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// All per-site operators plus the total-spin components, built once per model.
#[derive(Clone, Debug)]
pub struct ChainOperators {
    pub basis: ChainBasis,
    pub local: SpinOps,
    pub sx: Vec<CMatrix>,
    pub sy: Vec<CMatrix>,
    pub sz: Vec<CMatrix>,
    pub sx_total: CMatrix,
    pub sy_total: CMatrix,
    pub sz_total: CMatrix,
}

pub fn chain_operators(spin: Spin, n_sites: usize) -> Result<ChainOperators> {
    let basis = ChainBasis::new(spin, n_sites)?;
    let local = spin_ops(spin);
    let mut sx = Vec::with_capacity(n_sites);
    let mut sy = Vec::with_capacity(n_sites);
    let mut sz = Vec::with_capacity(n_sites);
    for j in 0..n_sites {
        sx.push(embed(&local.sx, j, &basis)?.matrix);
        sy.push(embed(&local.sy, j, &basis)?.matrix);
        sz.push(embed(&local.sz, j, &basis)?.matrix);
    }
    let dim = basis.dim();
    let sum = |ops: &[CMatrix]| {
        let mut tot = CMatrix::zeros((dim, dim));
        for o in ops {
            tot += o;
        }
        tot
    };
    let sx_total = sum(&sx);
    let sy_total = sum(&sy);
    let sz_total = sum(&sz);
    Ok(ChainOperators {
        basis,
        local,
        sx,
        sy,
        sz,
        sx_total,
        sy_total,
        sz_total,
    })
}

/// Dense identity on the full chain.
pub fn chain_identity(basis: &ChainBasis) -> CMatrix {
    Array2::eye(basis.dim())
}
