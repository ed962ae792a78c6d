//! Folding of the diagonal Majorana modes onto bare modes.
//!
//! Row `k` of `W` expresses diagonal mode `ζ_k` in terms of the bare
//! Majorana operators. Rotating neighbouring columns `(j − 1, j)` from the
//! right end inwards zeroes the row one entry at a time until only the
//! diagonal survives; doing this row by row reduces `W` to the identity, up to
//! the sign of the very last entry.
//!
//! Every rotation of columns `(j − 1, j)` is generated by `γ_{j−1} γ_j`. For
//! `j` odd both operators live on one site and the generator is diagonal in
//! the occupation basis; for `j` even they sit on neighbouring sites and the
//! generator is the two-site hop/pair term. Replaying the rotations in reverse
//! on an occupation state produces the eigenstate with the same occupations
//! of the diagonal modes.
//!
//! The gate matrices are real-pairing only: reconstructed states are exact
//! eigenstates for a real pairing amplitude (phase zero).

use nalgebra::{DMatrix, Matrix2, Matrix4};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{KitaevError, Result};
use crate::quadratic::{MajoranaSchur, OccupationPattern};
use crate::tensor_state::{TensorChain, TruncationConfig};
use crate::C64;

/// Entries of `W` smaller than this are treated as exact zeros when choosing
/// an angle.
const ANGLE_SNAP: f64 = 1e-14;

const ORTHOGONALITY_TOL: f64 = 1e-8;

/// One rotation of columns `(col − 1, col)` chosen while folding `row`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub row: usize,
    pub col: usize,
    pub angle: f64,
}

/// Ordered rotations that reduce `W` to the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldingPlan {
    n_sites: usize,
    rotations: Vec<Rotation>,
    particle_hole: bool,
}

/// Rotates columns `j − 1` and `j` of every row.
fn rotate_columns(w: &mut DMatrix<f64>, j: usize, angle: f64) {
    let (s, c) = angle.sin_cos();
    for r in 0..w.nrows() {
        let a = w[(r, j - 1)];
        let b = w[(r, j)];
        w[(r, j - 1)] = a * c + b * s;
        w[(r, j)] = b * c - a * s;
    }
}

/// Angle with `sin θ` signed like `w_j` and `cos θ` like `w_prev`, in `(−π, π]`.
fn fold_angle(w_prev: f64, w_j: f64) -> f64 {
    let w_j = if w_j.abs() <= ANGLE_SNAP { 0.0 } else { w_j };
    if w_j == 0.0 {
        return if w_prev < 0.0 { PI } else { 0.0 };
    }
    let theta = w_j.atan2(w_prev);
    if theta <= -PI {
        PI
    } else {
        theta
    }
}

/// Plans the folding of `W`, rejecting matrices that are not orthogonal.
pub fn compute_folding_plan(schur: &MajoranaSchur) -> Result<FoldingPlan> {
    fold_matrix(&schur.w)
}

fn check_shape(w: &DMatrix<f64>) -> Result<()> {
    let dim = w.nrows();
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(KitaevError::DimensionMismatch { expected: dim + 1, got: dim });
    }
    if w.ncols() != dim {
        return Err(KitaevError::DimensionMismatch { expected: dim, got: w.ncols() });
    }
    Ok(())
}

/// Plans the folding of any orthogonal `2N × 2N` matrix.
pub fn fold_matrix(w: &DMatrix<f64>) -> Result<FoldingPlan> {
    let dim = w.nrows();
    check_shape(w)?;
    let res = (w * w.transpose() - DMatrix::<f64>::identity(dim, dim)).amax();
    if !(res <= ORTHOGONALITY_TOL) {
        return Err(KitaevError::NotOrthogonal(res));
    }
    let mut w = w.clone();
    let mut rotations = Vec::with_capacity(dim * (dim - 1) / 2);
    for row in 0..dim - 1 {
        for col in (row + 1..dim).rev() {
            let angle = fold_angle(w[(row, col - 1)], w[(row, col)]);
            if angle != 0.0 {
                rotate_columns(&mut w, col, angle);
            }
            rotations.push(Rotation { row, col, angle });
        }
    }
    Ok(FoldingPlan {
        n_sites: dim / 2,
        rotations,
        particle_hole: w[(dim - 1, dim - 1)] < 0.0,
    })
}

/// Another basis of the same eigenstate, in which every mode has a compact
/// support ending as far left as possible.
///
/// The eigenstate only depends on the span of its annihilators
/// `(ζ_{2k} ± iζ_{2k+1})`, so any unitary mixing of the mode pairs leaves it
/// unchanged. Occupied modes are first turned into annihilators by flipping
/// the sign of their odd row; the returned matrix then describes the same
/// state with every mode empty. Mode pair `k` vanishes beyond column
/// `N + k`, so its folding ladder is short and the intermediate states stay
/// close to the final one in entanglement.
pub fn compact_basis(w: &DMatrix<f64>, occupation: &OccupationPattern) -> Result<DMatrix<f64>> {
    let dim = w.nrows();
    let n = dim / 2;
    check_shape(w)?;
    if occupation.len() != n {
        return Err(KitaevError::DimensionMismatch { expected: n, got: occupation.len() });
    }
    let bits = occupation.bits();
    // Columns reversed, so that the triangular factor is zero towards the right.
    let modes = DMatrix::from_fn(n, dim, |k, j| {
        let odd = if bits[k] == 1 { -w[(2 * k + 1, dim - 1 - j)] } else { w[(2 * k + 1, dim - 1 - j)] };
        C64::new(w[(2 * k, dim - 1 - j)], odd)
    });
    let r = modes.qr().r();
    let mut out = DMatrix::zeros(dim, dim);
    for k in 0..n {
        let src = n - 1 - k;
        for j in src..dim {
            let z = r[(src, j)];
            out[(2 * k, dim - 1 - j)] = z.re;
            out[(2 * k + 1, dim - 1 - j)] = z.im;
        }
    }
    Ok(out)
}

impl FoldingPlan {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn rotations(&self) -> &[Rotation] {
        &self.rotations
    }

    /// True when the last diagonal mode folds onto `−γ`, which swaps the
    /// roles of `c_N` and `c_N†` in the reference state.
    pub fn particle_hole(&self) -> bool {
        self.particle_hole
    }

    /// Number of rotations with a nonzero angle.
    pub fn active_rotations(&self) -> usize {
        self.rotations.iter().filter(|r| r.angle != 0.0).count()
    }

    /// Applies every rotation, in plan order, to a copy of `w`.
    pub fn replay(&self, w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if w.nrows() != 2 * self.n_sites || w.ncols() != 2 * self.n_sites {
            return Err(KitaevError::DimensionMismatch { expected: 2 * self.n_sites, got: w.nrows() });
        }
        let mut out = w.clone();
        for r in &self.rotations {
            if r.angle != 0.0 {
                rotate_columns(&mut out, r.col, r.angle);
            }
        }
        Ok(out)
    }

    /// Largest deviation of the replayed `w` from the identity with the
    /// flagged sign on the last entry.
    pub fn replay_residual(&self, w: &DMatrix<f64>) -> Result<f64> {
        let mut target = DMatrix::<f64>::identity(w.nrows(), w.ncols());
        if self.particle_hole {
            let last = w.nrows() - 1;
            target[(last, last)] = -1.0;
        }
        Ok((self.replay(w)? - target).amax())
    }
}

/// Single-site gate for rotating the two Majorana modes of one site.
pub fn gate_matrix_even(theta: f64) -> Matrix2<C64> {
    Matrix2::new(
        C64::from_polar(1.0, theta / 2.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::from_polar(1.0, -theta / 2.0),
    )
}

/// Two-site gate `cos(θ/2) 1 + i sin(θ/2) X⊗X` for rotating Majorana modes on
/// neighbouring sites; it only mixes states of equal parity.
pub fn gate_matrix_odd(theta: f64) -> Matrix4<C64> {
    let c = C64::new((theta / 2.0).cos(), 0.0);
    let s = C64::new(0.0, (theta / 2.0).sin());
    let z = C64::new(0.0, 0.0);
    Matrix4::new(
        c, z, z, s, //
        z, c, s, z, //
        z, s, c, z, //
        s, z, z, c,
    )
}

/// Product state for the given mode occupations; with `particle_hole` the
/// last site is flipped.
pub fn reference_state(
    n_sites: usize,
    occupation: &OccupationPattern,
    particle_hole: bool,
) -> Result<TensorChain> {
    if occupation.len() != n_sites {
        return Err(KitaevError::DimensionMismatch { expected: n_sites, got: occupation.len() });
    }
    let mut bits = occupation.bits().to_vec();
    if particle_hole {
        if let Some(last) = bits.last_mut() {
            *last ^= 1;
        }
    }
    TensorChain::product(&bits)
}

/// Eigenstate with the given mode occupations, using the default truncation.
pub fn reconstruct_eigenstate(plan: &FoldingPlan, occupation: &OccupationPattern) -> Result<TensorChain> {
    reconstruct_eigenstate_with(plan, occupation, &TruncationConfig::default())
}

/// Replays the plan in reverse: rows from last to first, and within a row the
/// columns from left to right.
pub fn reconstruct_eigenstate_with(
    plan: &FoldingPlan,
    occupation: &OccupationPattern,
    config: &TruncationConfig,
) -> Result<TensorChain> {
    let mut state = reference_state(plan.n_sites, occupation, plan.particle_hole)?;
    for r in plan.rotations.iter().rev() {
        if r.angle == 0.0 {
            continue;
        }
        if r.col % 2 == 1 {
            state.apply_single_site_gate((r.col - 1) / 2, &gate_matrix_even(r.angle))?;
        } else {
            state.apply_two_site_gate(r.col / 2 - 1, &gate_matrix_odd(r.angle), config)?;
        }
    }
    Ok(state)
}

/// Builds the eigenstate of `w` with the given occupations by folding its
/// [`compact_basis`]. The returned plan belongs to the compact basis, whose
/// modes are all empty.
pub fn reconstruct_compact(
    w: &DMatrix<f64>,
    occupation: &OccupationPattern,
    config: &TruncationConfig,
) -> Result<(FoldingPlan, TensorChain)> {
    let basis = compact_basis(w, occupation)?;
    let plan = fold_matrix(&basis)?;
    let state = reconstruct_eigenstate_with(&plan, &OccupationPattern::ground(plan.n_sites), config)?;
    Ok((plan, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::quadratic::{build_coupling_matrix, eigenenergy, schur_decompose, KitaevParams};
    use proptest::prelude::*;

    fn solve(p: &KitaevParams) -> (MajoranaSchur, FoldingPlan) {
        let schur = schur_decompose(&build_coupling_matrix(p).unwrap()).unwrap();
        let plan = compute_folding_plan(&schur).unwrap();
        (schur, plan)
    }

    fn overlap(a: &[C64], b: &nalgebra::DVector<C64>) -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum::<C64>().norm()
    }

    #[test]
    fn identity_needs_no_rotation() {
        let schur = MajoranaSchur { w: DMatrix::identity(6, 6), epsilons: vec![1.0; 3] };
        let plan = compute_folding_plan(&schur).unwrap();
        assert!(plan.rotations().iter().all(|r| r.angle == 0.0));
        assert_eq!(plan.rotations().len(), 15);
        assert!(!plan.particle_hole());
        let state = reconstruct_eigenstate(&plan, &OccupationPattern::ground(3)).unwrap();
        assert_eq!(state, TensorChain::vacuum(3).unwrap());
    }

    #[test]
    fn two_by_two_rotation() {
        let w = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let schur = MajoranaSchur { w: w.clone(), epsilons: vec![1.0] };
        let plan = compute_folding_plan(&schur).unwrap();
        assert_eq!(plan.rotations().len(), 1);
        assert!((plan.rotations()[0].angle - PI / 2.0).abs() < 1e-15);
        let replayed = plan.replay(&w).unwrap();
        assert!((replayed[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((replayed[(1, 1)].abs() - 1.0).abs() < 1e-15);
        assert_eq!(plan.particle_hole(), replayed[(1, 1)] < 0.0);
        assert!(plan.replay_residual(&w).unwrap() < 1e-15);
    }

    #[test]
    fn angle_conventions() {
        assert_eq!(fold_angle(0.0, 0.0), 0.0);
        assert_eq!(fold_angle(0.0, 2.0), PI / 2.0);
        assert_eq!(fold_angle(0.0, -2.0), -PI / 2.0);
        assert_eq!(fold_angle(-1.0, 0.0), PI);
        assert_eq!(fold_angle(-1.0, -0.0), PI);
        let t = fold_angle(0.6, -0.8);
        assert!((t.sin() + 0.8).abs() < 1e-15 && (t.cos() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn non_orthogonal_input_is_rejected() {
        let mut w = DMatrix::identity(4, 4);
        w[(0, 1)] = 0.1;
        let schur = MajoranaSchur { w, epsilons: vec![1.0, 1.0] };
        assert!(matches!(compute_folding_plan(&schur), Err(KitaevError::NotOrthogonal(_))));
    }

    #[test]
    fn gate_matrices() {
        assert_eq!(gate_matrix_even(0.0), Matrix2::identity());
        assert!((gate_matrix_even(2.0 * PI) + Matrix2::identity()).camax() < 1e-15);
        let g = gate_matrix_even(PI / 2.0);
        assert!((g[(0, 0)] - C64::from_polar(1.0, PI / 4.0)).norm() < 1e-15);
        assert!((g[(1, 1)] - C64::from_polar(1.0, -PI / 4.0)).norm() < 1e-15);
        assert_eq!(gate_matrix_odd(0.0), Matrix4::identity());
        let g = gate_matrix_odd(PI);
        for i in 0..4 {
            assert!(g[(i, i)].norm() < 1e-15);
            assert!((g[(i, 3 - i)] - C64::new(0.0, 1.0)).norm() < 1e-15);
        }
        for theta in [0.3, -1.7, 2.9] {
            let u = gate_matrix_odd(theta);
            assert!((u * u.adjoint() - Matrix4::identity()).camax() < 1e-15);
        }
    }

    #[test]
    fn reference_states() {
        let chain = reference_state(3, &OccupationPattern::ground(3), false).unwrap();
        assert_eq!(chain.fock_coefficients().unwrap()[0b000], C64::new(1.0, 0.0));
        let chain = reference_state(3, &OccupationPattern::ground(3), true).unwrap();
        assert_eq!(chain.fock_coefficients().unwrap()[0b001], C64::new(1.0, 0.0));
        let occ = OccupationPattern::new(vec![1, 1]).unwrap();
        let chain = reference_state(2, &occ, true).unwrap();
        assert_eq!(chain.fock_coefficients().unwrap()[0b10], C64::new(1.0, 0.0));
        assert!(reference_state(3, &occ, false).is_err());
    }

    #[test]
    fn two_site_ground_state_matches_ed() {
        // w = Δ = 1, μ = 0: degenerate ground pair, so check the energy and
        // that the state lies in the ED ground space.
        let p = KitaevParams::open(2, 1.0, 0.0, 1.0).unwrap();
        let (schur, plan) = solve(&p);
        let state = reconstruct_eigenstate(&plan, &OccupationPattern::ground(2)).unwrap();
        let h = oracle::dense_hamiltonian(&p).unwrap();
        let (vals, vecs) = oracle::ed_eigensystem(&h).unwrap();
        let amps = state.fock_coefficients().unwrap();
        let weight: f64 = (0..4)
            .filter(|&i| (vals[i] - vals[0]).abs() < 1e-9)
            .map(|i| overlap(&amps, &vecs.column(i).into_owned()).powi(2))
            .sum();
        assert!(weight > 1.0 - 1e-10);
        let e = state.energy_expectation(&p).unwrap();
        assert!((e - schur.ground_energy()).abs() < 1e-12);
    }

    #[test]
    fn reconstructed_energies_six_sites() {
        let p = KitaevParams::open(6, 1.0, 0.3, 1.0).unwrap();
        let (schur, plan) = solve(&p);
        for occ in [OccupationPattern::ground(6), OccupationPattern::excited(6, &[1]).unwrap()] {
            let state = reconstruct_eigenstate(&plan, &occ).unwrap();
            let e = state.energy_expectation(&p).unwrap();
            let exact = eigenenergy(&schur.epsilons, &occ).unwrap();
            assert!((e - exact).abs() < 1e-8, "{e} vs {exact}");
            assert!((state.norm_squared() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn every_level_of_a_small_chain_matches_ed() {
        let p = KitaevParams::open(4, 0.8, 0.45, 1.0).unwrap();
        let (schur, plan) = solve(&p);
        let h = oracle::dense_hamiltonian(&p).unwrap();
        let (vals, vecs) = oracle::ed_eigensystem(&h).unwrap();
        for idx in 0..16 {
            let occ = OccupationPattern::from_index(4, idx);
            let e = eigenenergy(&schur.epsilons, &occ).unwrap();
            let state = reconstruct_eigenstate(&plan, &occ).unwrap();
            let amps = state.fock_coefficients().unwrap();
            let level = (0..16).find(|&i| (vals[i] - e).abs() < 1e-9).expect("energy in spectrum");
            let ov = overlap(&amps, &vecs.column(level).into_owned());
            assert!(ov > 1.0 - 1e-9, "occupation {idx}: overlap {ov}");
        }
    }

    #[test]
    fn compact_basis_gives_the_same_levels() {
        let p = KitaevParams::open(4, 0.8, 0.45, 1.0).unwrap();
        let (schur, plan) = solve(&p);
        let h = oracle::dense_hamiltonian(&p).unwrap();
        let (vals, vecs) = oracle::ed_eigensystem(&h).unwrap();
        let cfg = TruncationConfig::default();
        for idx in 0..16 {
            let occ = OccupationPattern::from_index(4, idx);
            let e = eigenenergy(&schur.epsilons, &occ).unwrap();
            let (compact, state) = reconstruct_compact(&schur.w, &occ, &cfg).unwrap();
            let direct = reconstruct_eigenstate(&plan, &occ).unwrap();
            assert_eq!(state.parity().unwrap(), direct.parity().unwrap());
            assert_eq!(compact.rotations().len(), plan.rotations().len());
            let amps = state.fock_coefficients().unwrap();
            let level = (0..16).find(|&i| (vals[i] - e).abs() < 1e-9).unwrap();
            let ov = overlap(&amps, &vecs.column(level).into_owned());
            assert!(ov > 1.0 - 1e-9, "occupation {idx}: overlap {ov}");
        }
    }

    #[test]
    fn compact_basis_is_orthogonal_and_banded() {
        let p = KitaevParams::open(7, 1.0, 2.0, 1.0).unwrap();
        let (schur, _) = solve(&p);
        let occ = OccupationPattern::excited(7, &[2, 6]).unwrap();
        let b = compact_basis(&schur.w, &occ).unwrap();
        assert!((&b * b.transpose() - DMatrix::<f64>::identity(14, 14)).amax() < 1e-12);
        for k in 0..7 {
            for j in 7 + k + 1..14 {
                assert_eq!(b[(2 * k, j)], 0.0);
                assert_eq!(b[(2 * k + 1, j)], 0.0);
            }
        }
        assert!(compact_basis(&schur.w, &OccupationPattern::ground(6)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn replay_reduces_w_to_identity(
            n in 2usize..7,
            w in -2.0f64..2.0,
            mu in -4.0f64..4.0,
            delta in 0.1f64..2.0,
            periodic in any::<bool>(),
        ) {
            let p = if periodic {
                KitaevParams::periodic(n, w, mu, delta).unwrap()
            } else {
                KitaevParams::open(n, w, mu, delta).unwrap()
            };
            let (schur, plan) = solve(&p);
            prop_assert!(plan.replay_residual(&schur.w).unwrap() < 1e-9);
            prop_assert!(plan.rotations().iter().all(|r| r.angle > -PI && r.angle <= PI));
            let occ = OccupationPattern::ground(n);
            let state = reconstruct_eigenstate(&plan, &occ).unwrap();
            let reference = reference_state(n, &occ, plan.particle_hole()).unwrap();
            prop_assert_eq!(state.parity(), reference.parity());
            prop_assert!((state.norm_squared() - 1.0).abs() < 1e-10);
        }
    }
}
