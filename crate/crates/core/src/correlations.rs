//! End-to-end correlations and the `Z` measure.
//!
//! The end-pair operators act on the reduced `(site 1, site N)` space in the
//! basis `|00⟩, |01⟩, |10⟩, |11⟩`. Moving a fermion between the two ends
//! crosses every bulk site, so the sign string reduces to a factor
//! `s = (−1)^P` fixed by the total parity `P` of the state. With `γ_0 … γ_{2N−1}`
//! the bare Majorana modes:
//!
//! ```text
//!   QR = i γ_0 γ_{2N−1}       = s · [[0,0,0,−1],[0,0,−1,0],[0,−1,0,0],[−1,0,0,0]]
//!   QL = i γ_1 γ_{2N−2}       = s · [[0,0,0,−1],[0,0, 1,0],[0, 1,0,0],[−1,0,0,0]]
//!   Q  = 2(c_1 c_N† + c_N c_1†) = QL − QR
//! ```
//!
//! `QL + QR` is the anomalous end-pairing combination `2(c_1 c_N − c_1† c_N†)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{KitaevError, Result};
use crate::folding::{reconstruct_compact, FoldingPlan};
use crate::quadratic::{
    build_coupling_matrix, eigenenergy, schur_decompose, Boundary, KitaevParams, MajoranaSchur,
    OccupationPattern,
};
use crate::tensor_state::{TensorChain, TruncationConfig};
use crate::C64;

pub use crate::tensor_state::Parity;

/// Which end-pair operator to realize.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeOperatorKind {
    Q,
    QL,
    QR,
}

/// 4×4 Hermitian matrix of an end-pair operator for a state of parity `parity`.
pub fn edge_operator_matrix(kind: EdgeOperatorKind, parity: Parity) -> DMatrix<C64> {
    let s = parity.sign();
    let entries: [f64; 4] = match kind {
        // (00,11), (01,10), (10,01), (11,00)
        EdgeOperatorKind::Q => [0.0, 2.0, 2.0, 0.0],
        EdgeOperatorKind::QR => [-1.0, -1.0, -1.0, -1.0],
        EdgeOperatorKind::QL => [-1.0, 1.0, 1.0, -1.0],
    };
    let mut m = DMatrix::<C64>::zeros(4, 4);
    for (row, v) in entries.iter().enumerate() {
        m[(row, 3 - row)] = C64::new(s * v, 0.0);
    }
    m
}

/// Parity of the reference product state (and hence of the reconstructed
/// eigenstate).
pub fn parity(occupation: &OccupationPattern, particle_hole: bool) -> Parity {
    Parity::from_count(occupation.count() + usize::from(particle_hole))
}

fn state_parity(state: &TensorChain) -> Result<Parity> {
    if let Some(p) = state.parity() {
        return Ok(p);
    }
    let v = state.parity_expectation();
    if (v.abs() - 1.0).abs() > 1e-8 {
        return Err(KitaevError::Numerical(format!(
            "state is not a parity eigenstate (⟨Π⟩ = {v})"
        )));
    }
    Ok(if v > 0.0 { Parity::Even } else { Parity::Odd })
}

/// `|Tr(ρ_{1N} Q(p))|`.
pub fn z_value(state: &TensorChain, parity: Parity) -> Result<f64> {
    let rho = state.rdm_ends()?;
    Ok(rho.expectation(&edge_operator_matrix(EdgeOperatorKind::Q, parity)).norm())
}

/// `⟨c_1 c_N⟩` of a parity eigenstate.
pub fn anomalous_end_correlation(state: &TensorChain) -> Result<C64> {
    let s = state_parity(state)?.sign();
    let rho = state.rdm_ends()?;
    Ok(rho.matrix()[(3, 0)] * -s)
}

/// `Σ_j ⟨n_j⟩`.
pub fn mean_particle_number(state: &TensorChain) -> Result<f64> {
    (0..state.n_sites())
        .map(|site| Ok(state.rdm_site(site)?.matrix()[(1, 1)].re))
        .sum()
}

/// Closed-form saturated `Z`; zero hopping gives the trivial-phase limit 0.
pub fn z_analytic(params: &KitaevParams) -> f64 {
    let w = params.hopping;
    if w == 0.0 {
        return 0.0;
    }
    let d = params.pairing_magnitude.abs();
    let amp = 4.0 * (w * d).abs() / (d + w.abs()).powi(2);
    let ratio = params.chemical_potential / (2.0 * w);
    (amp * (1.0 - ratio * ratio)).max(0.0)
}

/// `x` truncated (not rounded) to `decimals` places. A guard of `1e-4` in the
/// last place keeps values like `0.75`, or a saturated Z a few `1e-8` short of
/// its limit, from dropping below their printed form.
pub fn truncate_decimals(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    let t = (x.abs() * scale + 1e-4).floor() / scale;
    t.copysign(x)
}

/// Which eigenstate to build.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenTarget {
    /// All diagonal modes empty.
    #[default]
    Ground,
    /// Only the lowest-energy mode occupied.
    FirstExcited,
}

impl EigenTarget {
    pub fn occupation(self, n_sites: usize) -> OccupationPattern {
        match self {
            EigenTarget::Ground => OccupationPattern::ground(n_sites),
            EigenTarget::FirstExcited => OccupationPattern::excited(n_sites, &[n_sites - 1])
                .unwrap_or_else(|_| OccupationPattern::ground(n_sites)),
        }
    }
}

/// An eigenstate together with the data it was built from.
#[derive(Clone, Debug)]
pub struct SolvedState {
    pub params: KitaevParams,
    pub schur: MajoranaSchur,
    /// Plan of the compact basis, in which every mode is empty.
    pub plan: FoldingPlan,
    pub occupation: OccupationPattern,
    pub parity: Parity,
    /// `Σ ε_k (n_k − ½)`.
    pub energy: f64,
    /// Some single-body energy is numerically zero.
    pub degenerate: bool,
    pub state: TensorChain,
}

/// Refuses a nonzero pairing phase, which the gate set does not cover.
pub fn require_real_pairing(params: &KitaevParams) -> Result<()> {
    if params.pairing_phase != 0.0 {
        return Err(KitaevError::Unsupported(format!(
            "eigenstate reconstruction supports pairing phase 0 only, got {}",
            params.pairing_phase
        )));
    }
    Ok(())
}

/// Decomposes, folds and reconstructs one eigenstate.
pub fn solve_eigenstate(
    params: &KitaevParams,
    target: EigenTarget,
    config: &TruncationConfig,
) -> Result<SolvedState> {
    params.validate()?;
    require_real_pairing(params)?;
    let schur = schur_decompose(&build_coupling_matrix(params)?)?;
    let occupation = target.occupation(params.n_sites);
    let (plan, state) = reconstruct_compact(&schur.w, &occupation, config)?;
    let energy = eigenenergy(&schur.epsilons, &occupation)?;
    Ok(SolvedState {
        params: *params,
        degenerate: schur.is_degenerate(),
        parity: parity(&OccupationPattern::ground(params.n_sites), plan.particle_hole()),
        schur,
        plan,
        occupation,
        energy,
        state,
    })
}

/// Chain lengths and stopping tolerance for the saturation sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaturationConfig {
    pub schedule: Vec<usize>,
    pub tol: f64,
    pub target: EigenTarget,
    pub truncation: TruncationConfig,
}

impl Default for SaturationConfig {
    fn default() -> Self {
        Self {
            schedule: (1..=12).map(|i| 8 * i).collect(),
            tol: 1e-3,
            target: EigenTarget::Ground,
            truncation: TruncationConfig::default(),
        }
    }
}

impl SaturationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schedule.len() < 2 {
            return Err(KitaevError::InvalidParams("schedule needs at least two lengths".into()));
        }
        if self.schedule[0] < 3 {
            return Err(KitaevError::InvalidParams("chain lengths must be at least 3".into()));
        }
        if self.schedule.windows(2).any(|p| p[1] <= p[0]) {
            return Err(KitaevError::InvalidParams("schedule must be strictly increasing".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(KitaevError::InvalidParams(format!("tolerance must be positive, got {}", self.tol)));
        }
        self.truncation.validate()
    }
}

/// Outcome of a saturation sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZResult {
    /// Value at the last length evaluated.
    pub z: f64,
    pub n_used: usize,
    /// `(N, Z(N))` for every length evaluated.
    pub history: Vec<(usize, f64)>,
    pub converged: bool,
    /// Any evaluated chain had a numerically zero single-body energy.
    pub degenerate: bool,
}

/// Differences below this are roundoff and count as converged outright.
const NOISE_FLOOR: f64 = 1e-12;

/// Stopping rule on the history so far.
///
/// The last step must be below `tol`, and either be at roundoff level or,
/// reading the last two steps as a geometric tail, the remaining drift
/// `|Δ_i| r / (1 − r)` must also be below `tol`. A slowly decaying sequence
/// (steps shrinking like a power of N) therefore never counts as converged
/// just because one step happens to be small.
pub fn is_saturated(values: &[f64], tol: f64) -> bool {
    let k = values.len();
    if k < 2 {
        return false;
    }
    let last = (values[k - 1] - values[k - 2]).abs();
    if last >= tol {
        return false;
    }
    if last <= NOISE_FLOOR {
        return true;
    }
    if k < 3 {
        return false;
    }
    let prev = (values[k - 2] - values[k - 3]).abs();
    if prev == 0.0 {
        return false;
    }
    let r = last / prev;
    r < 1.0 && last * r / (1.0 - r) < tol
}

/// Sweeps the chain length until `Z` saturates. The template's `n_sites` is
/// ignored; the boundary must be open.
pub fn z_saturated(template: &KitaevParams, config: &SaturationConfig) -> Result<ZResult> {
    config.validate()?;
    if template.boundary != Boundary::Open {
        return Err(KitaevError::Unsupported("Z saturation needs an open chain".into()));
    }
    let mut history = Vec::with_capacity(config.schedule.len());
    let mut values = Vec::with_capacity(config.schedule.len());
    let mut degenerate = false;
    for &n in &config.schedule {
        let params = (*template).with_sites(n)?;
        let solved = solve_eigenstate(&params, config.target, &config.truncation)?;
        degenerate |= solved.degenerate;
        let z = z_value(&solved.state, solved.parity)?;
        history.push((n, z));
        values.push(z);
        if is_saturated(&values, config.tol) {
            return Ok(ZResult { z, n_used: n, history, converged: true, degenerate });
        }
    }
    let &(n_used, z) = history.last().expect("schedule is non-empty");
    Ok(ZResult { z, n_used, history, converged: false, degenerate })
}
