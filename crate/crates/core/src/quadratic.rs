//! Majorana coupling matrix of the Kitaev chain and its canonical block form.
//!
//! In terms of the Majorana operators `γ_{2j} = c_j + c_j†` and
//! `γ_{2j+1} = i(c_j† − c_j)` (0-based, zero pairing phase) the chain
//! Hamiltonian reads `H = (i/4) Σ_kl A_kl γ_k γ_l` with `A` real and
//! antisymmetric. An orthogonal `W` brings `A` to
//! `W A Wᵀ = ⊕_k [[0, ε_k], [−ε_k, 0]]`, after which
//! `H = Σ_k ε_k (f_k† f_k − ½)`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{KitaevError, Result};
use crate::C64;

/// Boundary condition of the chain: `c_{N+1} = 0` or `c_{N+1} = c_1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Physical and boundary parameters of a Kitaev chain.
///
/// The complex pairing amplitude is `pairing_magnitude · e^{i pairing_phase}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KitaevParams {
    pub n_sites: usize,
    pub hopping: f64,
    pub chemical_potential: f64,
    pub pairing_magnitude: f64,
    pub pairing_phase: f64,
    pub boundary: Boundary,
}

impl KitaevParams {
    pub fn new(
        n_sites: usize,
        hopping: f64,
        chemical_potential: f64,
        pairing_magnitude: f64,
        boundary: Boundary,
    ) -> Result<Self> {
        let params = Self {
            n_sites,
            hopping,
            chemical_potential,
            pairing_magnitude,
            pairing_phase: 0.0,
            boundary,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn open(n_sites: usize, hopping: f64, chemical_potential: f64, pairing: f64) -> Result<Self> {
        Self::new(n_sites, hopping, chemical_potential, pairing, Boundary::Open)
    }

    pub fn periodic(n_sites: usize, hopping: f64, chemical_potential: f64, pairing: f64) -> Result<Self> {
        Self::new(n_sites, hopping, chemical_potential, pairing, Boundary::Periodic)
    }

    pub fn with_phase(mut self, phase: f64) -> Result<Self> {
        self.pairing_phase = phase;
        self.validate()?;
        Ok(self)
    }

    pub fn with_sites(mut self, n_sites: usize) -> Result<Self> {
        self.n_sites = n_sites;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(KitaevError::InvalidParams(format!(
                "a chain needs at least 2 sites, got {}",
                self.n_sites
            )));
        }
        let finite = [
            self.hopping,
            self.chemical_potential,
            self.pairing_magnitude,
            self.pairing_phase,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(KitaevError::InvalidParams("parameters must be finite".into()));
        }
        if self.pairing_magnitude < 0.0 {
            return Err(KitaevError::InvalidParams(format!(
                "pairing magnitude must be non-negative, got {}",
                self.pairing_magnitude
            )));
        }
        if !(0.0..TAU).contains(&self.pairing_phase) {
            return Err(KitaevError::InvalidParams(format!(
                "pairing phase must lie in [0, 2π), got {}",
                self.pairing_phase
            )));
        }
        Ok(())
    }

    /// Complex pairing amplitude Δ.
    pub fn pairing(&self) -> C64 {
        C64::from_polar(self.pairing_magnitude, self.pairing_phase)
    }
}

/// Real antisymmetric `2N × 2N` Majorana coupling matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMatrix(DMatrix<f64>);

impl CouplingMatrix {
    /// Wraps a dense matrix after checking it is square, even-sized and
    /// antisymmetric.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(KitaevError::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        if m.nrows() == 0 || !m.nrows().is_multiple_of(2) {
            return Err(KitaevError::InvalidParams(format!(
                "coupling matrix must have a positive even dimension, got {}",
                m.nrows()
            )));
        }
        let scale = m.amax().max(1.0);
        let residual = (&m + m.transpose()).amax();
        if residual > 1e-12 * scale {
            return Err(KitaevError::NotAntisymmetric(residual));
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn n_sites(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }
}

/// Builds the coupling matrix with `H = (i/2) Σ_j [ −μ γ_{2j}γ_{2j+1}
/// + (|Δ|−w) γ_{2j}γ_{2j+3} + (|Δ|+w) γ_{2j+1}γ_{2j+2} ]` (0-based indices,
/// wrapped modulo `2N` for the periodic chain).
pub fn build_coupling_matrix(params: &KitaevParams) -> Result<CouplingMatrix> {
    params.validate()?;
    let n = params.n_sites;
    let dim = 2 * n;
    let w = params.hopping;
    let mu = params.chemical_potential;
    let delta = params.pairing_magnitude;
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    let mut add = |k: usize, l: usize, v: f64| {
        a[(k, l)] += v;
        a[(l, k)] -= v;
    };
    for j in 0..n {
        add(2 * j, 2 * j + 1, -mu);
        if j + 1 < n || params.boundary == Boundary::Periodic {
            add(2 * j, (2 * j + 3) % dim, delta - w);
            add(2 * j + 1, (2 * j + 2) % dim, delta + w);
        }
    }
    Ok(CouplingMatrix(a))
}

/// Orthogonal `W` and single-body energies with `W A Wᵀ = ⊕ [[0, ε_k], [−ε_k, 0]]`.
///
/// Energies are non-negative and non-increasing, so zero modes sit last.
#[derive(Clone, Debug, PartialEq)]
pub struct MajoranaSchur {
    pub w: DMatrix<f64>,
    pub epsilons: Vec<f64>,
}

impl MajoranaSchur {
    pub fn n_sites(&self) -> usize {
        self.epsilons.len()
    }

    /// Canonical block-diagonal matrix the decomposition maps to.
    pub fn block_form(&self) -> DMatrix<f64> {
        let n = self.epsilons.len();
        let mut b = DMatrix::zeros(2 * n, 2 * n);
        for (k, &e) in self.epsilons.iter().enumerate() {
            b[(2 * k, 2 * k + 1)] = e;
            b[(2 * k + 1, 2 * k)] = -e;
        }
        b
    }

    /// Energies below this value count as zero modes for reporting.
    pub fn zero_mode_threshold(&self) -> f64 {
        let norm = self.epsilons.first().copied().unwrap_or(0.0);
        1e-12 * norm.max(1.0)
    }

    pub fn zero_modes(&self) -> usize {
        let tol = self.zero_mode_threshold();
        self.epsilons.iter().filter(|&&e| e < tol).count()
    }

    /// True when the many-body spectrum is degenerate (some ε_k is zero).
    pub fn is_degenerate(&self) -> bool {
        self.zero_modes() > 0
    }

    pub fn ground_energy(&self) -> f64 {
        -0.5 * self.epsilons.iter().sum::<f64>()
    }

    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.w.nrows();
        (&self.w * self.w.transpose() - DMatrix::<f64>::identity(n, n)).amax()
    }

    pub fn block_residual(&self, a: &CouplingMatrix) -> f64 {
        (&self.w * a.as_matrix() * self.w.transpose() - self.block_form()).amax()
    }
}

/// Householder reduction of an antisymmetric matrix, returning `(T, Q)` with
/// `T = Q A Qᵀ` antisymmetric tridiagonal.
fn tridiagonalize(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut t = a.clone();
    let mut q = DMatrix::<f64>::identity(n, n);
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x = t.view((k + 1, k), (len, 1)).column(0).into_owned();
        let xnorm = x.norm();
        if xnorm == 0.0 {
            continue;
        }
        let alpha = if x[0] >= 0.0 { -xnorm } else { xnorm };
        let mut v = DVector::<f64>::zeros(n);
        v.rows_mut(k + 1, len).copy_from(&x);
        v[k + 1] -= alpha;
        let vnorm2 = v.norm_squared();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // (I − βvvᵀ) T (I − βvvᵀ) = T + β(v pᵀ − p vᵀ) since vᵀ T v = 0.
        let p = &t * &v;
        t += (&v * p.transpose() - &p * v.transpose()) * beta;
        let vq = v.transpose() * &q;
        q -= (&v * vq) * beta;
    }
    (t, q)
}

/// Brings an antisymmetric coupling matrix to canonical block form.
///
/// The matrix is first reduced to antisymmetric tridiagonal form. A
/// tridiagonal antisymmetric matrix only couples even to odd positions, so
/// its spectrum is carried by the singular values of an `N × N` bidiagonal
/// matrix, whose left and right singular vectors become the even and odd
/// rows of `W`.
pub fn schur_decompose(a: &CouplingMatrix) -> Result<MajoranaSchur> {
    let dim = a.dim();
    let n = dim / 2;
    let (t, q) = tridiagonalize(a.as_matrix());

    let mut bidiag = DMatrix::<f64>::zeros(n, n);
    for p in 0..n {
        bidiag[(p, p)] = 0.5 * (t[(2 * p, 2 * p + 1)] - t[(2 * p + 1, 2 * p)]);
        if p > 0 {
            bidiag[(p, p - 1)] = 0.5 * (t[(2 * p, 2 * p - 1)] - t[(2 * p - 1, 2 * p)]);
        }
    }
    let svd = crate::linalg::svd_real(&bidiag)?;
    let (u, v, sigma) = (svd.u, svd.v, svd.s);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| sigma[y].total_cmp(&sigma[x]).then(x.cmp(&y)));

    let mut w_tri = DMatrix::<f64>::zeros(dim, dim);
    for (k, &src) in order.iter().enumerate() {
        for p in 0..n {
            w_tri[(2 * k, 2 * p)] = u[(p, src)];
            w_tri[(2 * k + 1, 2 * p + 1)] = v[(p, src)];
        }
    }
    let mut w = w_tri * q;

    let am = a.as_matrix();
    let mut epsilons = Vec::with_capacity(n);
    for k in 0..n {
        // Orientation: first significant entry of the even row positive.
        let lead = (0..dim).map(|c| w[(2 * k, c)]).find(|x| x.abs() > 1e-10).unwrap_or(1.0);
        if lead < 0.0 {
            w.row_mut(2 * k).neg_mut();
            w.row_mut(2 * k + 1).neg_mut();
        }
        let block = (w.row(2 * k) * am * w.row(2 * k + 1).transpose())[(0, 0)];
        if block < 0.0 {
            w.row_mut(2 * k + 1).neg_mut();
        }
        epsilons.push(sigma[order[k]]);
    }

    let schur = MajoranaSchur { w, epsilons };
    let scale = schur.epsilons.first().copied().unwrap_or(0.0).max(1.0);
    let orth = schur.orthogonality_residual();
    if !orth.is_finite() || orth > 1e-9 {
        return Err(KitaevError::Numerical(format!("Schur vectors not orthogonal ({orth:e})")));
    }
    let block = schur.block_residual(a);
    if !block.is_finite() || block > 1e-9 * scale {
        return Err(KitaevError::Numerical(format!("Schur form residual too large ({block:e})")));
    }
    Ok(schur)
}

/// Closed-form single-body energies of the periodic chain.
///
/// Returns `[E_1⁺, E_1⁻, E_2⁺, E_2⁻, …]` with
/// `E_k^± = ±√((2w cos q + μ)² + 4|Δ|² sin² q)`, `q = 2πk/N`, for
/// `1 ≤ k < N/2`. Even `N` appends the two momentum-π/0 values `2w − μ` and
/// `−2w − μ`; odd `N` has no momentum-π mode and appends only `−2w − μ`.
/// The magnitudes form the same multiset as the Schur energies.
pub fn analytic_periodic_energies(params: &KitaevParams) -> Result<Vec<f64>> {
    params.validate()?;
    if params.boundary != Boundary::Periodic {
        return Err(KitaevError::InvalidParams(
            "closed-form energies only exist for the periodic chain".into(),
        ));
    }
    let n = params.n_sites;
    let w = params.hopping;
    let mu = params.chemical_potential;
    let delta = params.pairing_magnitude;
    let mut energies = Vec::with_capacity(n);
    for k in (1..).take_while(|&k| 2 * k < n) {
        let q = 2.0 * PI * k as f64 / n as f64;
        let e = ((2.0 * w * q.cos() + mu).powi(2) + 4.0 * delta * delta * q.sin().powi(2)).sqrt();
        energies.push(e);
        energies.push(-e);
    }
    if n.is_multiple_of(2) {
        energies.push(2.0 * w - mu);
    }
    energies.push(-2.0 * w - mu);
    Ok(energies)
}

/// Occupation numbers `n_k ∈ {0, 1}` of the diagonal modes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OccupationPattern(Vec<u8>);

impl OccupationPattern {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(KitaevError::InvalidParams(format!("occupation must be 0 or 1, got {b}")));
        }
        Ok(Self(bits))
    }

    /// All modes empty.
    pub fn ground(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// Ground pattern with the listed modes occupied.
    pub fn excited(n: usize, modes: &[usize]) -> Result<Self> {
        let mut bits = vec![0; n];
        for &m in modes {
            if m >= n {
                return Err(KitaevError::SiteOutOfRange { site: m, n_sites: n });
            }
            bits[m] = 1;
        }
        Ok(Self(bits))
    }

    /// Pattern whose bits are those of `index`, mode 0 as the most significant bit.
    pub fn from_index(n: usize, index: usize) -> Self {
        Self((0..n).map(|k| ((index >> (n - 1 - k)) & 1) as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }
}

/// `E = Σ_k ε_k (n_k − ½)`.
pub fn eigenenergy(epsilons: &[f64], occupation: &OccupationPattern) -> Result<f64> {
    if epsilons.len() != occupation.len() {
        return Err(KitaevError::DimensionMismatch {
            expected: epsilons.len(),
            got: occupation.len(),
        });
    }
    Ok(epsilons
        .iter()
        .zip(occupation.bits())
        .map(|(&e, &b)| e * (f64::from(b) - 0.5))
        .sum())
}
