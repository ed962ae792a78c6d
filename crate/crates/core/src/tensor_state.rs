//! Canonical tensor chain for a chain of fermionic sites.
//!
//! A state of `N` sites is stored as
//!
//! ```text
//!   λ[0] Γ[0] λ[1] Γ[1] λ[2] ... λ[N-1] Γ[N-1] λ[N]
//! ```
//!
//! where each `Γ[s]` holds one complex matrix per local occupation `k ∈ {0, 1}`
//! and each `λ[b]` is the vector of positive Schmidt coefficients across bond
//! `b` (the cut to the left of site `b`). The boundary bonds `λ[0]` and `λ[N]`
//! have dimension one. In canonical form
//!
//! ```text
//!   Σ_k (λ[s] Γ[s]^k)† (λ[s] Γ[s]^k) = 1      (left Schmidt vectors orthonormal)
//!   Σ_k (Γ[s]^k λ[s+1]) (Γ[s]^k λ[s+1])† = 1  (right Schmidt vectors orthonormal)
//! ```
//!
//! Sites are treated as distinguishable tensor factors. Fermionic signs of
//! two-site gates are already folded into the gate matrices and the sign
//! string of end-to-end operators is carried by the caller.
//!
//! When the state has definite fermion parity and only parity-preserving gates
//! are applied, every bond index carries a parity label and singular value
//! decompositions are done sector by sector, so amplitudes in the wrong parity
//! sector stay exactly zero.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{KitaevError, Result};
use crate::quadratic::{Boundary, KitaevParams};
use crate::C64;

/// Largest chain whose Fock amplitudes may be expanded.
pub const MAX_FOCK_SITES: usize = 14;

/// Bond dimension allowed in the end-pair contraction.
pub const CONTRACTION_BUDGET: usize = 1024;

const UNITARY_TOL: f64 = 1e-10;

/// Fermion-number parity `(−1)^P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_count(count: usize) -> Self {
        if count.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `(−1)^P`.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    fn from_label(label: u8) -> Self {
        Self::from_count(label as usize)
    }
}

/// Singular value truncation policy for two-site updates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationConfig {
    /// Singular values at or below `threshold · s_max` are discarded.
    pub threshold: f64,
    /// Largest bond dimension kept before reporting an overflow.
    pub max_bond: usize,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self { threshold: 1e-12, max_bond: 256 }
    }
}

impl TruncationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(KitaevError::InvalidParams(format!(
                "truncation threshold must lie in (0, 1), got {}",
                self.threshold
            )));
        }
        if self.max_bond == 0 {
            return Err(KitaevError::InvalidParams("bond cap must be positive".into()));
        }
        Ok(())
    }
}

/// Hermitian, unit-trace reduced density matrix of one site (dim 2) or two
/// sites (dim 4, first slot = left site).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityBlock(DMatrix<C64>);

impl DensityBlock {
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() || !(m.nrows() == 2 || m.nrows() == 4) {
            return Err(KitaevError::DimensionMismatch { expected: 4, got: m.nrows() });
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        (&self.0 - self.0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0);
        nalgebra::SymmetricEigen::new(herm).eigenvalues.min()
    }

    /// `Tr(ρ O)`.
    pub fn expectation(&self, op: &DMatrix<C64>) -> C64 {
        (&self.0 * op).trace()
    }

    /// Largest violation among Hermiticity, unit trace and positivity.
    pub fn invariant_residual(&self) -> f64 {
        let tr = (self.trace() - C64::new(1.0, 0.0)).norm();
        let neg = (-self.min_eigenvalue()).max(0.0);
        self.hermiticity_residual().max(tr).max(neg)
    }

    /// For a two-site block: the one-site block of the first (`keep_first`)
    /// or second slot.
    pub fn partial_trace(&self, keep_first: bool) -> Result<DensityBlock> {
        if self.dim() != 4 {
            return Err(KitaevError::DimensionMismatch { expected: 4, got: self.dim() });
        }
        let m = DMatrix::from_fn(2, 2, |a, b| {
            (0..2)
                .map(|e| {
                    if keep_first {
                        self.0[(2 * a + e, 2 * b + e)]
                    } else {
                        self.0[(2 * e + a, 2 * e + b)]
                    }
                })
                .sum()
        });
        Ok(DensityBlock(m))
    }
}

/// One retained singular triple of a two-site update.
struct Triple {
    s: f64,
    label: Option<u8>,
    u: DVector<C64>,
    vh: DVector<C64>,
}

/// Canonical tensor chain (see the module docs for the layout).
#[derive(Clone, Debug, PartialEq)]
pub struct TensorChain {
    gammas: Vec<[DMatrix<C64>; 2]>,
    lambdas: Vec<DVector<f64>>,
    labels: Option<Vec<Vec<u8>>>,
}

fn unitarity_residual<const D: usize>(u: &nalgebra::SMatrix<C64, D, D>) -> f64
where
    nalgebra::Const<D>: nalgebra::DimName,
{
    (u * u.adjoint() - nalgebra::SMatrix::<C64, D, D>::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn scale_rows(m: &DMatrix<C64>, v: &DVector<f64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)] * v[r])
}

fn scale_cols(m: &DMatrix<C64>, v: &DVector<f64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)] * v[c])
}

fn frobenius_inner(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl TensorChain {
    /// Product state with the given site occupations (bond dimension one).
    pub fn product(occupations: &[u8]) -> Result<Self> {
        if occupations.is_empty() {
            return Err(KitaevError::InvalidParams("a chain needs at least one site".into()));
        }
        if let Some(b) = occupations.iter().find(|&&b| b > 1) {
            return Err(KitaevError::InvalidParams(format!("occupation must be 0 or 1, got {b}")));
        }
        let one = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        let zero = DMatrix::from_element(1, 1, C64::new(0.0, 0.0));
        let gammas = occupations
            .iter()
            .map(|&b| if b == 0 { [one.clone(), zero.clone()] } else { [zero.clone(), one.clone()] })
            .collect();
        let lambdas = vec![DVector::from_element(1, 1.0); occupations.len() + 1];
        let mut labels = Vec::with_capacity(occupations.len() + 1);
        let mut acc = 0u8;
        labels.push(vec![0]);
        for &b in occupations {
            acc ^= b;
            labels.push(vec![acc]);
        }
        Ok(Self { gammas, lambdas, labels: Some(labels) })
    }

    pub fn vacuum(n_sites: usize) -> Result<Self> {
        Self::product(&vec![0; n_sites])
    }

    pub fn n_sites(&self) -> usize {
        self.gammas.len()
    }

    /// `Γ[site]^k`.
    pub fn gamma(&self, site: usize, k: usize) -> &DMatrix<C64> {
        &self.gammas[site][k]
    }

    /// Schmidt coefficients of bond `b` (`0 ..= N`; bonds 0 and N are trivial).
    pub fn lambda(&self, bond: usize) -> &DVector<f64> {
        &self.lambdas[bond]
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        self.lambdas.iter().map(|l| l.len()).collect()
    }

    pub fn max_bond_dim(&self) -> usize {
        self.lambdas.iter().map(|l| l.len()).max().unwrap_or(1)
    }

    /// Fermion parity tracked through the bond labels, if still available.
    pub fn parity(&self) -> Option<Parity> {
        self.labels.as_ref().map(|l| Parity::from_label(l[self.n_sites()][0]))
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_sites() {
            return Err(KitaevError::SiteOutOfRange { site, n_sites: self.n_sites() });
        }
        Ok(())
    }

    /// `Γ'^k = Σ_k' u_{k k'} Γ^k'` at one site; λ untouched.
    pub fn apply_single_site_gate(&mut self, site: usize, u: &Matrix2<C64>) -> Result<()> {
        self.check_site(site)?;
        let res = unitarity_residual(u);
        if res > UNITARY_TOL {
            return Err(KitaevError::NotUnitary(res));
        }
        let [g0, g1] = &self.gammas[site];
        let new0 = g0 * u[(0, 0)] + g1 * u[(0, 1)];
        let new1 = g0 * u[(1, 0)] + g1 * u[(1, 1)];
        self.gammas[site] = [new0, new1];

        let diagonal = u[(0, 1)].norm() == 0.0 && u[(1, 0)].norm() == 0.0;
        let flip = u[(0, 0)].norm() == 0.0 && u[(1, 1)].norm() == 0.0;
        if !diagonal {
            match (&mut self.labels, flip) {
                (Some(labels), true) => {
                    for bond in labels.iter_mut().skip(site + 1) {
                        bond.iter_mut().for_each(|p| *p ^= 1);
                    }
                }
                (labels, _) => *labels = None,
            }
        }
        Ok(())
    }

    /// Applies a 4×4 gate (basis `|00⟩, |01⟩, |10⟩, |11⟩`, left site first) to
    /// sites `left` and `left + 1`, then restores canonical form with an SVD.
    pub fn apply_two_site_gate(
        &mut self,
        left: usize,
        u: &Matrix4<C64>,
        config: &TruncationConfig,
    ) -> Result<()> {
        config.validate()?;
        if left + 1 >= self.n_sites() {
            return Err(KitaevError::SiteOutOfRange { site: left + 1, n_sites: self.n_sites() });
        }
        let res = unitarity_residual(u);
        if res > UNITARY_TOL {
            return Err(KitaevError::NotUnitary(res));
        }
        let lam_l = &self.lambdas[left];
        let lam_m = &self.lambdas[left + 1];
        let lam_r = &self.lambdas[left + 2];
        let (a, c) = (lam_l.len(), lam_r.len());

        let parity_preserving = [(0, 1), (0, 2), (3, 1), (3, 2), (1, 0), (1, 3), (2, 0), (2, 3)]
            .iter()
            .all(|&(r, cc)| u[(r, cc)].norm() == 0.0);
        let blocked = parity_preserving && self.labels.is_some();

        // Rows (j, ξ) of the left factor and columns (k, ν) of the right one.
        let b = lam_m.len();
        let mut left_full = DMatrix::<C64>::zeros(2 * a, b);
        let mut right_full = DMatrix::<C64>::zeros(b, 2 * c);
        for j in 0..2 {
            let g = &self.gammas[left][j];
            for mu in 0..b {
                for xi in 0..a {
                    left_full[(j * a + xi, mu)] = g[(xi, mu)] * (lam_l[xi] * lam_m[mu]);
                }
            }
            let g = &self.gammas[left + 1][j];
            for nu in 0..c {
                for mu in 0..b {
                    right_full[(mu, j * c + nu)] = g[(mu, nu)] * lam_r[nu];
                }
            }
        }

        // Sector index sets; with labels the contraction is block diagonal.
        let sectors: Option<[(Vec<usize>, Vec<usize>, Vec<usize>); 2]> =
            self.labels.as_ref().filter(|_| blocked).map(|labels| {
                let (pl, pm, pr) = (&labels[left], &labels[left + 1], &labels[left + 2]);
                [0u8, 1].map(|q| {
                    let rows = (0..2 * a).filter(|&r| (pl[r % a] + (r / a) as u8) % 2 == q).collect();
                    let mids = (0..b).filter(|&m| pm[m] == q).collect();
                    let cols = (0..2 * c).filter(|&cc| (pr[cc % c] + (cc / c) as u8) % 2 == q).collect();
                    (rows, mids, cols)
                })
            });

        let contracted = match &sectors {
            Some(secs) => {
                let mut full = DMatrix::<C64>::zeros(2 * a, 2 * c);
                for (rows, mids, cols) in secs {
                    if rows.is_empty() || mids.is_empty() || cols.is_empty() {
                        continue;
                    }
                    let lq = left_full.select_rows(rows.iter()).select_columns(mids.iter());
                    let rq = right_full.select_rows(mids.iter()).select_columns(cols.iter());
                    let prod = lq * rq;
                    for (ci, &cc) in cols.iter().enumerate() {
                        for (ri, &r) in rows.iter().enumerate() {
                            full[(r, cc)] = prod[(ri, ci)];
                        }
                    }
                }
                full
            }
            None => &left_full * &right_full,
        };

        let mut theta = DMatrix::<C64>::zeros(2 * a, 2 * c);
        for out in 0..4 {
            let (big_j, big_k) = (out >> 1, out & 1);
            for inp in 0..4 {
                let coef = u[(out, inp)];
                if coef.norm() == 0.0 {
                    continue;
                }
                let (j, k) = (inp >> 1, inp & 1);
                let src = contracted.view((j * a, k * c), (a, c));
                let mut dst = theta.view_mut((big_j * a, big_k * c), (a, c));
                dst.zip_apply(&src, |d, s| *d += s * coef);
            }
        }

        let mut triples = Vec::new();
        match &sectors {
            Some(secs) => {
                for (q, (rows, _, cols)) in secs.iter().enumerate() {
                    if rows.is_empty() || cols.is_empty() {
                        continue;
                    }
                    let sub = theta.select_rows(rows.iter()).select_columns(cols.iter());
                    for t in svd_triples(&sub)? {
                        let mut u_full = DVector::<C64>::zeros(2 * a);
                        let mut vh_full = DVector::<C64>::zeros(2 * c);
                        for (i, &r) in rows.iter().enumerate() {
                            u_full[r] = t.1[i];
                        }
                        for (i, &cc) in cols.iter().enumerate() {
                            vh_full[cc] = t.2[i];
                        }
                        triples.push(Triple { s: t.0, label: Some(q as u8), u: u_full, vh: vh_full });
                    }
                }
            }
            None => {
                for t in svd_triples(&theta)? {
                    triples.push(Triple { s: t.0, label: None, u: t.1, vh: t.2 });
                }
            }
        }

        order_triples(&mut triples);
        let s_max = triples.first().map_or(0.0, |t| t.s);
        if !(s_max.is_finite() && s_max > f64::MIN_POSITIVE) {
            return Err(KitaevError::Annihilated);
        }
        let kept = triples.iter().take_while(|t| t.s > config.threshold * s_max).count();
        if kept > config.max_bond {
            return Err(KitaevError::BondOverflow { dim: kept, cap: config.max_bond });
        }
        triples.truncate(kept);
        let norm = triples.iter().map(|t| t.s * t.s).sum::<f64>().sqrt();
        let new_lam = DVector::from_iterator(kept, triples.iter().map(|t| t.s / norm));

        let mut gl = [DMatrix::<C64>::zeros(a, kept), DMatrix::<C64>::zeros(a, kept)];
        let mut gr = [DMatrix::<C64>::zeros(kept, c), DMatrix::<C64>::zeros(kept, c)];
        for (m, t) in triples.iter().enumerate() {
            for j in 0..2 {
                for xi in 0..a {
                    gl[j][(xi, m)] = t.u[j * a + xi] / lam_l[xi];
                }
                for nu in 0..c {
                    gr[j][(m, nu)] = t.vh[j * c + nu] / lam_r[nu];
                }
            }
        }

        let new_labels: Option<Vec<u8>> = triples.iter().map(|t| t.label).collect();
        match (new_labels, self.labels.as_mut()) {
            (Some(l), Some(labels)) => labels[left + 1] = l,
            _ => self.labels = None,
        }
        self.gammas[left] = gl;
        self.gammas[left + 1] = gr;
        self.lambdas[left + 1] = new_lam;
        Ok(())
    }

    /// One-site reduced density matrix.
    pub fn rdm_site(&self, site: usize) -> Result<DensityBlock> {
        self.check_site(site)?;
        let x: Vec<_> = (0..2)
            .map(|k| scale_cols(&scale_rows(&self.gammas[site][k], &self.lambdas[site]), &self.lambdas[site + 1]))
            .collect();
        let m = DMatrix::from_fn(2, 2, |k, kp| frobenius_inner(&x[k], &x[kp]));
        DensityBlock::from_matrix(m)
    }

    fn pair_tensors(&self, left: usize) -> Vec<DMatrix<C64>> {
        let lam_l = &self.lambdas[left];
        let lam_m = &self.lambdas[left + 1];
        let lam_r = &self.lambdas[left + 2];
        (0..4)
            .map(|jk| {
                let lj = scale_cols(&scale_rows(&self.gammas[left][jk >> 1], lam_l), lam_m);
                scale_cols(&(lj * &self.gammas[left + 1][jk & 1]), lam_r)
            })
            .collect()
    }

    /// Reduced density matrix of sites `left` and `left + 1`.
    pub fn rdm_pair(&self, left: usize) -> Result<DensityBlock> {
        if left + 1 >= self.n_sites() {
            return Err(KitaevError::SiteOutOfRange { site: left + 1, n_sites: self.n_sites() });
        }
        let y = self.pair_tensors(left);
        let m = DMatrix::from_fn(4, 4, |r, c| frobenius_inner(&y[r], &y[c]));
        DensityBlock::from_matrix(m)
    }

    /// `Γ[site]^k λ[site+1]`, the site tensor with its right Schmidt weights.
    fn right_weighted(&self, site: usize, k: usize) -> DMatrix<C64> {
        scale_cols(&self.gammas[site][k], &self.lambdas[site + 1])
    }

    /// Reduced density matrix of the first and last site.
    ///
    /// The bulk sites are traced out by sweeping a connecting matrix (one per
    /// pair of end-site indices) through the chain, one transfer step per site.
    pub fn rdm_ends(&self) -> Result<DensityBlock> {
        let n = self.n_sites();
        if n < 3 {
            return Err(KitaevError::InvalidParams(format!(
                "end-pair reduction needs at least 3 sites, got {n}"
            )));
        }
        let chi = self.max_bond_dim();
        if chi > CONTRACTION_BUDGET {
            return Err(KitaevError::BondOverflow { dim: chi, cap: CONTRACTION_BUDGET });
        }
        let first: Vec<_> = (0..2).map(|k| self.right_weighted(0, k)).collect();
        let mut connecting: Vec<DMatrix<C64>> = (0..4)
            .map(|kk| first[kk >> 1].transpose() * first[kk & 1].conjugate())
            .collect();
        for site in 1..n - 1 {
            let a: Vec<_> = (0..2).map(|j| self.right_weighted(site, j)).collect();
            let at: Vec<_> = a.iter().map(|m| m.transpose()).collect();
            let ac: Vec<_> = a.iter().map(|m| m.conjugate()).collect();
            for x in connecting.iter_mut() {
                *x = &at[0] * &*x * &ac[0] + &at[1] * &*x * &ac[1];
            }
        }
        let last: Vec<_> = (0..2).map(|k| self.right_weighted(n - 1, k)).collect();
        let m = DMatrix::from_fn(4, 4, |r, c| {
            let (k1, kn) = (r >> 1, r & 1);
            let (k1p, knp) = (c >> 1, c & 1);
            let x = &connecting[2 * k1 + k1p];
            (last[kn].transpose() * x * last[knp].conjugate())[(0, 0)]
        });
        DensityBlock::from_matrix(m)
    }

    /// Fock amplitudes `c_{k_1…k_N}`, indexed with site 0 as the most
    /// significant bit.
    pub fn fock_coefficients(&self) -> Result<Vec<C64>> {
        let n = self.n_sites();
        if n > MAX_FOCK_SITES {
            return Err(KitaevError::BudgetExceeded { n_sites: n, max: MAX_FOCK_SITES });
        }
        let mut rows = vec![DMatrix::from_element(1, 1, C64::new(1.0, 0.0))];
        for site in 0..n {
            let a: Vec<_> = (0..2).map(|k| self.right_weighted(site, k)).collect();
            rows = rows.iter().flat_map(|r| [r * &a[0], r * &a[1]]).collect();
        }
        Ok(rows.into_iter().map(|r| r[(0, 0)]).collect())
    }

    fn transfer_expectation(&self, signed: bool) -> C64 {
        let mut env = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        for site in 0..self.n_sites() {
            let mut next = DMatrix::zeros(self.lambdas[site + 1].len(), self.lambdas[site + 1].len());
            for k in 0..2 {
                let a = self.right_weighted(site, k);
                let term = a.adjoint() * &env * &a;
                if signed && k == 1 {
                    next -= term;
                } else {
                    next += term;
                }
            }
            env = next;
        }
        env[(0, 0)]
    }

    /// `⟨ψ|ψ⟩` by full contraction (does not assume canonical form).
    pub fn norm_squared(&self) -> f64 {
        self.transfer_expectation(false).re
    }

    /// `⟨ψ|(−1)^N̂|ψ⟩` by full contraction.
    pub fn parity_expectation(&self) -> f64 {
        self.transfer_expectation(true).re
    }

    /// Largest `|Σ λ² − 1|` over all bonds.
    pub fn bond_normalization_residual(&self) -> f64 {
        self.lambdas
            .iter()
            .map(|l| (l.norm_squared() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from orthonormality of the left and right Schmidt
    /// vectors built from each site tensor.
    pub fn canonical_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for site in 0..self.n_sites() {
            let dl = self.lambdas[site + 1].len();
            let dr = self.lambdas[site].len();
            let mut left = DMatrix::<C64>::zeros(dl, dl);
            let mut right = DMatrix::<C64>::zeros(dr, dr);
            for k in 0..2 {
                let lg = scale_rows(&self.gammas[site][k], &self.lambdas[site]);
                left += lg.adjoint() * &lg;
                let gr = self.right_weighted(site, k);
                right += &gr * gr.adjoint();
            }
            worst = worst
                .max(max_abs(&(left - DMatrix::identity(dl, dl))))
                .max(max_abs(&(right - DMatrix::identity(dr, dr))));
        }
        worst
    }

    /// The same network with the site order reversed.
    pub fn mirrored(&self) -> Self {
        let gammas = self
            .gammas
            .iter()
            .rev()
            .map(|[g0, g1]| [g0.transpose(), g1.transpose()])
            .collect();
        let lambdas = self.lambdas.iter().rev().cloned().collect();
        let labels = self.labels.as_ref().map(|l| {
            let total = l[self.n_sites()][0];
            l.iter().rev().map(|b| b.iter().map(|p| p ^ total).collect()).collect()
        });
        Self { gammas, lambdas, labels }
    }

    /// `⟨H⟩` of the Kitaev Hamiltonian.
    ///
    /// Open chains sum `Tr(ρ_pair h_bond)` over all bonds, with the on-site
    /// term of every site split evenly between its bonds (end sites put it
    /// all on their single bond). Periodic chains use `N` times the energy of
    /// the first bond, which requires a translation-invariant state; the
    /// shortcut is refused if the internal bond energies disagree.
    pub fn energy_expectation(&self, params: &KitaevParams) -> Result<f64> {
        params.validate()?;
        let n = self.n_sites();
        if params.n_sites != n {
            return Err(KitaevError::DimensionMismatch { expected: n, got: params.n_sites });
        }
        match params.boundary {
            Boundary::Open => {
                let mut total = 0.0;
                for left in 0..n - 1 {
                    let wl = if left == 0 { 1.0 } else { 0.5 };
                    let wr = if left + 2 == n { 1.0 } else { 0.5 };
                    let h = bond_hamiltonian(params, wl, wr);
                    total += self.rdm_pair(left)?.expectation(&h).re;
                }
                Ok(total)
            }
            Boundary::Periodic => {
                let h = bond_hamiltonian(params, 0.5, 0.5);
                let energies = (0..n - 1)
                    .map(|left| Ok(self.rdm_pair(left)?.expectation(&h).re))
                    .collect::<Result<Vec<f64>>>()?;
                let lo = energies.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if hi - lo > 1e-8 * hi.abs().max(1.0) {
                    return Err(KitaevError::Unsupported(format!(
                        "state is not translation invariant (bond energies spread {:e}); \
                         the periodic shortcut needs a nondegenerate eigenstate",
                        hi - lo
                    )));
                }
                Ok(n as f64 * energies[0])
            }
        }
    }

    /// Serializable snapshot for debugging and golden files.
    pub fn dump(&self) -> ChainDump {
        let to_pairs = |m: &DMatrix<C64>| -> Vec<Vec<[f64; 2]>> {
            (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                .collect()
        };
        ChainDump {
            n_sites: self.n_sites(),
            gammas: self.gammas.iter().map(|[g0, g1]| [to_pairs(g0), to_pairs(g1)]).collect(),
            lambdas: self.lambdas.iter().map(|l| l.iter().copied().collect()).collect(),
        }
    }

    /// Rebuilds a chain from a dump. Parity labels are not stored, so the
    /// restored chain uses unblocked decompositions.
    pub fn from_dump(dump: &ChainDump) -> Result<Self> {
        if dump.gammas.len() != dump.n_sites || dump.lambdas.len() != dump.n_sites + 1 {
            return Err(KitaevError::DimensionMismatch { expected: dump.n_sites, got: dump.gammas.len() });
        }
        let from_pairs = |rows: &Vec<Vec<[f64; 2]>>, nr: usize, nc: usize| -> Result<DMatrix<C64>> {
            if rows.len() != nr || rows.iter().any(|r| r.len() != nc) {
                return Err(KitaevError::DimensionMismatch { expected: nr, got: rows.len() });
            }
            Ok(DMatrix::from_fn(nr, nc, |r, c| C64::new(rows[r][c][0], rows[r][c][1])))
        };
        let lambdas: Vec<DVector<f64>> =
            dump.lambdas.iter().map(|l| DVector::from_vec(l.clone())).collect();
        let gammas = dump
            .gammas
            .iter()
            .enumerate()
            .map(|(s, [g0, g1])| {
                let (nr, nc) = (lambdas[s].len(), lambdas[s + 1].len());
                Ok([from_pairs(g0, nr, nc)?, from_pairs(g1, nr, nc)?])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { gammas, lambdas, labels: None })
    }
}

/// JSON layout of a [`TensorChain`]: per-site Γ as nested `[re, im]` arrays
/// (`gammas[site][k][row][col]`) and per-bond λ arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainDump {
    pub n_sites: usize,
    pub gammas: Vec<[Vec<Vec<[f64; 2]>>; 2]>,
    pub lambdas: Vec<Vec<f64>>,
}

/// Two-site Hamiltonian of one bond in the basis `|n_l n_r⟩`, with the
/// on-site terms weighted by `left_weight` and `right_weight`.
///
/// Adjacent-site fermionic signs: `c_l†c_r` acts as `a_l†a_r`, `c_l c_r` as
/// `−a_l a_r`.
pub fn bond_hamiltonian(params: &KitaevParams, left_weight: f64, right_weight: f64) -> DMatrix<C64> {
    let w = params.hopping;
    let mu = params.chemical_potential;
    let delta = params.pairing();
    let mut h = DMatrix::<C64>::zeros(4, 4);
    for idx in 0..4 {
        let nl = (idx >> 1) as f64;
        let nr = (idx & 1) as f64;
        h[(idx, idx)] = C64::new(-mu * (left_weight * (nl - 0.5) + right_weight * (nr - 0.5)), 0.0);
    }
    h[(1, 2)] = C64::new(-w, 0.0);
    h[(2, 1)] = C64::new(-w, 0.0);
    h[(0, 3)] = -delta;
    h[(3, 0)] = -delta.conj();
    h
}

/// SVD of `m` as `(s, u_col, vh_row)` triples with each pair phase-fixed so
/// the first significant entry of `u` is real positive.
fn svd_triples(m: &DMatrix<C64>) -> Result<Vec<(f64, DVector<C64>, DVector<C64>)>> {
    let svd = crate::linalg::svd_complex(m)?;
    let mut out = Vec::with_capacity(svd.s.len());
    for (i, &s) in svd.s.iter().enumerate() {
        let mut uc = svd.u.column(i).into_owned();
        let mut vr = svd.v.column(i).map(|z| z.conj());
        if let Some(lead) = uc.iter().find(|z| z.norm() > 1e-12).copied() {
            let phase = lead.conj() / lead.norm();
            uc *= phase;
            vr *= phase.conj();
        }
        out.push((s, uc, vr));
    }
    Ok(out)
}

/// Descending singular values; runs of values equal within 1e-14 are ordered
/// by their phase-fixed left vectors, lexicographically descending.
fn order_triples(triples: &mut [Triple]) {
    triples.sort_by(|a, b| b.s.total_cmp(&a.s));
    let lex = |a: &Triple, b: &Triple| {
        for (x, y) in a.u.iter().zip(b.u.iter()) {
            let ord = y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im));
            if ord != std::cmp::Ordering::Equal {
                return ord;
            }
        }
        std::cmp::Ordering::Equal
    };
    let mut start = 0;
    while start < triples.len() {
        let mut end = start + 1;
        while end < triples.len() && (triples[end - 1].s - triples[end].s).abs() <= 1e-14 {
            end += 1;
        }
        triples[start..end].sort_by(lex);
        start = end;
    }
}
