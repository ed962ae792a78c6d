//! Dense exact-diagonalization reference for short chains.
//!
//! Everything here works directly with fermionic matrix elements in the Fock
//! basis (sign strings over lower-index sites included), with no tensor or
//! Majorana machinery in between. It is deliberately simple and slow and is
//! the ground truth for sign conventions elsewhere in the crate.

use nalgebra::{DMatrix, DVector};

use crate::error::{KitaevError, Result};
use crate::quadratic::{Boundary, KitaevParams};
use crate::C64;

/// Largest chain the dense routines accept.
pub const MAX_DENSE_SITES: usize = 10;

/// Operator on the full `2^N` Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    n_sites: usize,
    matrix: DMatrix<C64>,
}

impl DenseOperator {
    pub fn from_matrix(n_sites: usize, matrix: DMatrix<C64>) -> Result<Self> {
        let dim = 1usize << n_sites;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(KitaevError::DimensionMismatch { expected: dim, got: matrix.nrows() });
        }
        Ok(Self { n_sites, matrix })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn hermiticity_residual(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn commutator_residual(&self, other: &DenseOperator) -> f64 {
        let c = &self.matrix * &other.matrix - &other.matrix * &self.matrix;
        c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn check_budget(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DENSE_SITES {
        return Err(KitaevError::BudgetExceeded { n_sites: n, max: MAX_DENSE_SITES });
    }
    Ok(())
}

#[inline]
fn site_bit(n: usize, j: usize) -> usize {
    1 << (n - 1 - j)
}

/// Sign of the string over sites `< j`.
#[inline]
fn string_sign(state: usize, n: usize, j: usize) -> f64 {
    let higher = !((site_bit(n, j) << 1) - 1) & ((1 << n) - 1);
    if (state & higher).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn annihilate(state: usize, n: usize, j: usize) -> Option<(usize, f64)> {
    let b = site_bit(n, j);
    (state & b != 0).then(|| (state ^ b, string_sign(state, n, j)))
}

fn create(state: usize, n: usize, j: usize) -> Option<(usize, f64)> {
    let b = site_bit(n, j);
    (state & b == 0).then(|| (state ^ b, string_sign(state, n, j)))
}

#[derive(Clone, Copy)]
enum Ladder {
    Create(usize),
    Annihilate(usize),
}

/// Applies a product of ladder operators, rightmost first.
fn apply_string(state: usize, n: usize, ops: &[Ladder]) -> Option<(usize, f64)> {
    let mut s = state;
    let mut sign = 1.0;
    for op in ops.iter().rev() {
        let (next, sg) = match *op {
            Ladder::Create(j) => create(s, n, j)?,
            Ladder::Annihilate(j) => annihilate(s, n, j)?,
        };
        s = next;
        sign *= sg;
    }
    Some((s, sign))
}

fn operator_from_terms(n: usize, terms: &[(C64, Vec<Ladder>)]) -> DMatrix<C64> {
    let dim = 1usize << n;
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for s in 0..dim {
        for (coef, ops) in terms {
            if let Some((t, sign)) = apply_string(s, n, ops) {
                m[(t, s)] += *coef * sign;
            }
        }
    }
    m
}

/// Annihilation operator `c_j` (0-based site) on `n` sites.
pub fn annihilation_operator(n: usize, j: usize) -> Result<DenseOperator> {
    check_budget(n)?;
    if j >= n {
        return Err(KitaevError::SiteOutOfRange { site: j, n_sites: n });
    }
    let m = operator_from_terms(n, &[(C64::new(1.0, 0.0), vec![Ladder::Annihilate(j)])]);
    DenseOperator::from_matrix(n, m)
}

pub(crate) fn chain_hamiltonian(n: usize, w: f64, mu: f64, delta: C64, periodic: bool) -> DMatrix<C64> {
    let one = C64::new(1.0, 0.0);
    let dim = 1usize << n;
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for s in 0..dim {
        let diag: f64 = (0..n)
            .map(|j| {
                let occ = if s & site_bit(n, j) != 0 { 1.0 } else { 0.0 };
                -mu * (occ - 0.5)
            })
            .sum();
        h[(s, s)] += C64::new(diag, 0.0);
    }
    let mut terms = Vec::new();
    let bonds = if periodic { n } else { n - 1 };
    for j in 0..bonds {
        let k = (j + 1) % n;
        use Ladder::*;
        terms.push((-w * one, vec![Create(j), Annihilate(k)]));
        terms.push((-w * one, vec![Create(k), Annihilate(j)]));
        terms.push((delta, vec![Annihilate(j), Annihilate(k)]));
        terms.push((delta.conj(), vec![Create(k), Create(j)]));
    }
    h + operator_from_terms(n, &terms)
}

/// Full Fock-space matrix of
/// `H = Σ_j −w(c_j†c_{j+1} + h.c.) − μ(n_j − ½) + Δ c_j c_{j+1} + Δ* c_{j+1}† c_j†`.
pub fn dense_hamiltonian(params: &KitaevParams) -> Result<DenseOperator> {
    params.validate()?;
    check_budget(params.n_sites)?;
    let m = chain_hamiltonian(
        params.n_sites,
        params.hopping,
        params.chemical_potential,
        params.pairing(),
        params.boundary == Boundary::Periodic,
    );
    DenseOperator::from_matrix(params.n_sites, m)
}

/// Fermion-number parity `e^{iπ Σ n_j}`.
pub fn dense_parity(n: usize) -> Result<DenseOperator> {
    check_budget(n)?;
    let dim = 1usize << n;
    let m = DMatrix::from_fn(dim, dim, |r, c| {
        if r != c {
            C64::new(0.0, 0.0)
        } else if r.count_ones() % 2 == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        }
    });
    DenseOperator::from_matrix(n, m)
}

/// Majorana operator `γ_k` (0-based): `γ_{2j} = e^{iφ/2}c_j + e^{−iφ/2}c_j†`,
/// `γ_{2j+1} = −i e^{iφ/2}c_j + i e^{−iφ/2}c_j†`.
pub fn majorana(n: usize, k: usize, phase: f64) -> Result<DenseOperator> {
    check_budget(n)?;
    if k >= 2 * n {
        return Err(KitaevError::SiteOutOfRange { site: k / 2, n_sites: n });
    }
    let j = k / 2;
    let e = C64::from_polar(1.0, phase / 2.0);
    let (a, b) = if k.is_multiple_of(2) {
        (e, e.conj())
    } else {
        (C64::new(0.0, -1.0) * e, C64::new(0.0, 1.0) * e.conj())
    };
    let m = operator_from_terms(n, &[(a, vec![Ladder::Annihilate(j)]), (b, vec![Ladder::Create(j)])]);
    DenseOperator::from_matrix(n, m)
}

/// `i γ_k γ_l` at zero pairing phase.
pub fn majorana_bilinear(n: usize, k: usize, l: usize) -> Result<DenseOperator> {
    let gk = majorana(n, k, 0.0)?;
    let gl = majorana(n, l, 0.0)?;
    let m = (gk.matrix() * gl.matrix()) * C64::new(0.0, 1.0);
    DenseOperator::from_matrix(n, m)
}

/// End-to-end hopping `2(c_1 c_N† + c_N c_1†)`.
pub fn end_hopping(n: usize) -> Result<DenseOperator> {
    check_budget(n)?;
    use Ladder::*;
    let two = C64::new(2.0, 0.0);
    let m = operator_from_terms(
        n,
        &[(two, vec![Annihilate(0), Create(n - 1)]), (two, vec![Annihilate(n - 1), Create(0)])],
    );
    DenseOperator::from_matrix(n, m)
}

/// End-to-end anomalous term `2(c_1 c_N − c_1† c_N†)`.
pub fn end_pairing(n: usize) -> Result<DenseOperator> {
    check_budget(n)?;
    use Ladder::*;
    let m = operator_from_terms(
        n,
        &[
            (C64::new(2.0, 0.0), vec![Annihilate(0), Annihilate(n - 1)]),
            (C64::new(-2.0, 0.0), vec![Create(0), Create(n - 1)]),
        ],
    );
    DenseOperator::from_matrix(n, m)
}

/// Lowest eigenpair of a dense Hermitian operator.
#[derive(Clone, Debug)]
pub struct EdGroundState {
    pub energy: f64,
    /// Phase fixed so that the first non-negligible amplitude is real positive.
    pub vector: DVector<C64>,
    /// Distance to the next eigenvalue.
    pub gap: f64,
}

impl EdGroundState {
    pub fn is_degenerate(&self) -> bool {
        self.gap < 1e-9 * self.energy.abs().max(1.0)
    }
}

/// Full eigen-decomposition, eigenvalues ascending.
pub fn ed_eigensystem(h: &DenseOperator) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let herm = h.hermiticity_residual();
    if herm > 1e-10 {
        return Err(KitaevError::Numerical(format!("operator is not Hermitian ({herm:e})")));
    }
    let m = h.matrix();
    let real = m.iter().all(|z| z.im == 0.0);
    let (values, vectors) = if real {
        let eig = nalgebra::SymmetricEigen::try_new(m.map(|z| z.re), f64::EPSILON, 0)
            .ok_or_else(|| KitaevError::Numerical("dense eigensolver failed".into()))?;
        (eig.eigenvalues, eig.eigenvectors.map(|x| C64::new(x, 0.0)))
    } else {
        let eig = nalgebra::SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0)
            .ok_or_else(|| KitaevError::Numerical("dense eigensolver failed".into()))?;
        (eig.eigenvalues, eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = DMatrix::from_fn(vectors.nrows(), order.len(), |r, c| vectors[(r, order[c])]);
    Ok((sorted_values, sorted_vectors))
}

pub fn ed_spectrum(h: &DenseOperator) -> Result<Vec<f64>> {
    Ok(ed_eigensystem(h)?.0)
}

/// Multiplies by a global phase so the first amplitude above 1e-12 is real positive.
pub fn fix_phase(v: &mut DVector<C64>) {
    if let Some(lead) = v.iter().find(|z| z.norm() > 1e-12).copied() {
        let phase = lead.conj() / lead.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
}

pub fn ed_ground_state(h: &DenseOperator) -> Result<EdGroundState> {
    let (values, vectors) = ed_eigensystem(h)?;
    let mut vector = vectors.column(0).into_owned();
    fix_phase(&mut vector);
    let gap = values.get(1).map_or(f64::INFINITY, |e1| e1 - values[0]);
    Ok(EdGroundState { energy: values[0], vector, gap })
}

/// `⟨v|O|v⟩`.
pub fn ed_expectation(op: &DenseOperator, v: &DVector<C64>) -> Result<C64> {
    if v.len() != op.dim() {
        return Err(KitaevError::DimensionMismatch { expected: op.dim(), got: v.len() });
    }
    Ok(v.dotc(&(op.matrix() * v)))
}

/// Reduced density matrix of the listed sites, in the order given (first
/// listed site is the most significant bit of the reduced basis).
pub fn reduced_density(v: &DVector<C64>, n: usize, sites: &[usize]) -> Result<DMatrix<C64>> {
    check_budget(n)?;
    if v.len() != 1 << n {
        return Err(KitaevError::DimensionMismatch { expected: 1 << n, got: v.len() });
    }
    if let Some(&s) = sites.iter().find(|&&s| s >= n) {
        return Err(KitaevError::SiteOutOfRange { site: s, n_sites: n });
    }
    let k = sites.len();
    let local = |s: usize| -> usize {
        sites.iter().fold(0, |acc, &j| (acc << 1) | usize::from(s & site_bit(n, j) != 0))
    };
    let kept_mask: usize = sites.iter().map(|&j| site_bit(n, j)).sum();
    let mut rho = DMatrix::<C64>::zeros(1 << k, 1 << k);
    for s in 0..v.len() {
        if v[s].norm_sqr() == 0.0 {
            continue;
        }
        let env = s & !kept_mask;
        for t in 0..v.len() {
            if t & !kept_mask == env {
                rho[(local(s), local(t))] += v[s] * v[t].conj();
            }
        }
    }
    Ok(rho)
}

/// 4×4 reduced density matrix of the first and last site.
pub fn partial_trace_ends(v: &DVector<C64>, n: usize) -> Result<DMatrix<C64>> {
    reduced_density(v, n, &[0, n - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::{build_coupling_matrix, schur_decompose};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn single_site_is_diagonal() {
        let h = chain_hamiltonian(1, 0.0, 2.0, c(0.0), false);
        assert_eq!(h, DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]));
        let op = DenseOperator::from_matrix(1, h).unwrap();
        let gs = ed_ground_state(&op).unwrap();
        assert!((gs.energy + 1.0).abs() < 1e-14);
        assert!((gs.vector[1] - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn two_site_hopping_matrix() {
        let p = KitaevParams::open(2, 1.0, 0.0, 0.0).unwrap();
        let h = dense_hamiltonian(&p).unwrap();
        // |01⟩ = index 1, |10⟩ = index 2.
        let m = h.matrix();
        assert_eq!(m[(1, 2)], c(-1.0));
        assert_eq!(m[(2, 1)], c(-1.0));
        assert_eq!(m.iter().filter(|z| z.norm() > 0.0).count(), 2);
    }

    #[test]
    fn anticommutation_relations() {
        let n = 3;
        let ops: Vec<_> = (0..n).map(|j| annihilation_operator(n, j).unwrap()).collect();
        let id = DMatrix::<C64>::identity(8, 8);
        for a in 0..n {
            for b in 0..n {
                let ca = ops[a].matrix();
                let cb = ops[b].matrix();
                let anti = ca * cb.adjoint() + cb.adjoint() * ca;
                let expected = if a == b { id.clone() } else { DMatrix::zeros(8, 8) };
                assert!((anti - expected).camax() < 1e-15);
                assert!((ca * cb + cb * ca).camax() < 1e-15);
            }
        }
    }

    #[test]
    fn majoranas_square_to_one() {
        let n = 3;
        let id = DMatrix::<C64>::identity(8, 8);
        for k in 0..2 * n {
            let g = majorana(n, k, 0.4).unwrap();
            assert!(g.hermiticity_residual() < 1e-15);
            assert!((g.matrix() * g.matrix() - &id).camax() < 1e-14);
        }
    }

    #[test]
    fn hamiltonian_commutes_with_parity() {
        let par = dense_parity(5).unwrap();
        for boundary in [Boundary::Open, Boundary::Periodic] {
            let p = KitaevParams::new(5, 0.7, -1.3, 0.9, boundary).unwrap().with_phase(1.1).unwrap();
            let h = dense_hamiltonian(&p).unwrap();
            assert!(h.hermiticity_residual() < 1e-12);
            assert!(h.commutator_residual(&par) < 1e-12);
        }
    }

    #[test]
    fn majorana_form_reproduces_hamiltonian() {
        // (i/4) Σ A_kl γ_k γ_l built from dense Majoranas equals the Fock-space H.
        for boundary in [Boundary::Open, Boundary::Periodic] {
            let p = KitaevParams::new(3, 1.0, 0.0, 0.0, boundary).unwrap();
            let p2 = KitaevParams::new(4, 0.6, 0.8, 1.3, boundary).unwrap();
            for p in [p, p2] {
                let n = p.n_sites;
                let a = build_coupling_matrix(&p).unwrap();
                let gs: Vec<_> = (0..2 * n).map(|k| majorana(n, k, 0.0).unwrap()).collect();
                let dim = 1 << n;
                let mut h = DMatrix::<C64>::zeros(dim, dim);
                for k in 0..2 * n {
                    for l in 0..2 * n {
                        let v = a.as_matrix()[(k, l)];
                        if v != 0.0 {
                            h += (gs[k].matrix() * gs[l].matrix()) * C64::new(0.0, v / 4.0);
                        }
                    }
                }
                let dense = dense_hamiltonian(&p).unwrap();
                assert!((h - dense.matrix()).camax() < 1e-13, "{p:?}");
                for s in 0..dim {
                    let fock = DVector::from_fn(dim, |i, _| c(if i == s { 1.0 } else { 0.0 }));
                    let _ = ed_expectation(&dense, &fock).unwrap();
                }
            }
        }
    }

    #[test]
    fn sweet_spot_two_sites_is_degenerate() {
        let p = KitaevParams::open(2, 1.0, 0.0, 1.0).unwrap();
        let gs = ed_ground_state(&dense_hamiltonian(&p).unwrap()).unwrap();
        assert!((gs.energy + 1.0).abs() < 1e-12);
        assert!(gs.is_degenerate());
    }

    #[test]
    fn expectation_basics() {
        let n = 3;
        let id = DenseOperator::from_matrix(n, DMatrix::identity(8, 8)).unwrap();
        let mut v = DVector::from_fn(8, |i, _| C64::new(i as f64, 1.0));
        v /= C64::new(v.norm(), 0.0);
        assert!((ed_expectation(&id, &v).unwrap() - c(1.0)).norm() < 1e-14);
        let vac = DVector::from_fn(8, |i, _| c(if i == 0 { 1.0 } else { 0.0 }));
        assert_eq!(ed_expectation(&end_hopping(n).unwrap(), &vac).unwrap(), c(0.0));
        assert!(ed_expectation(&id, &DVector::zeros(4)).is_err());
    }

    #[test]
    fn spectrum_matches_single_body_energies() {
        let p = KitaevParams::open(6, 1.0, 0.5, 1.0).unwrap();
        let s = schur_decompose(&build_coupling_matrix(&p).unwrap()).unwrap();
        let mut many: Vec<f64> = (0..64usize)
            .map(|idx| {
                (0..6)
                    .map(|k| s.epsilons[k] * (if idx >> k & 1 == 1 { 0.5 } else { -0.5 }))
                    .sum()
            })
            .collect();
        many.sort_by(f64::total_cmp);
        let ed = ed_spectrum(&dense_hamiltonian(&p).unwrap()).unwrap();
        for (a, b) in many.iter().zip(&ed) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn mu_sign_maps_spectrum() {
        // μ → −μ at w → −w is a particle-hole image: the spectrum is unchanged.
        let p = KitaevParams::open(5, 0.8, 1.2, 1.0).unwrap();
        let q = KitaevParams::open(5, -0.8, -1.2, 1.0).unwrap();
        let a = ed_spectrum(&dense_hamiltonian(&p).unwrap()).unwrap();
        let b = ed_spectrum(&dense_hamiltonian(&q).unwrap()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn reduced_density_of_product_and_bell() {
        let n = 3;
        // (|000⟩ + |101⟩)/√2: sites 0 and 2 maximally correlated.
        let mut v = DVector::<C64>::zeros(8);
        v[0] = c(std::f64::consts::FRAC_1_SQRT_2);
        v[5] = c(std::f64::consts::FRAC_1_SQRT_2);
        let rho = partial_trace_ends(&v, n).unwrap();
        assert!((rho[(0, 0)] - c(0.5)).norm() < 1e-15);
        assert!((rho[(0, 3)] - c(0.5)).norm() < 1e-15);
        assert!((rho[(3, 3)] - c(0.5)).norm() < 1e-15);
        let mid = reduced_density(&v, n, &[1]).unwrap();
        assert!((mid[(0, 0)] - c(1.0)).norm() < 1e-15);
        assert!(dense_hamiltonian(&KitaevParams::open(11, 1.0, 0.0, 1.0).unwrap()).is_err());
    }
}
