//! Eigenstates and end-to-end correlations of the Kitaev chain.
//!
//! The pipeline is:
//!
//! 1. [`quadratic`]: build the real antisymmetric Majorana coupling matrix of
//!    the chain and bring it to canonical 2×2 block form with an orthogonal
//!    matrix `W`.
//! 2. [`folding`]: reduce `W` to the identity with nearest-neighbour Majorana
//!    rotations, then replay the rotations in reverse as one- and two-site
//!    gates on an occupation state.
//! 3. [`tensor_state`]: the gates act on a canonical tensor chain (Γ tensors
//!    and Schmidt vectors λ), from which site, pair and end-pair reduced
//!    density matrices follow.
//! 4. [`correlations`]: the end-to-end hopping measure `Z`, its saturation in
//!    the chain length, the closed-form fit and particle numbers.
//!
//! [`oracle`] is a dense exact-diagonalization reference used to cross-check
//! everything above on small chains.
//!
//! Conventions used throughout: Majorana modes and sites are 0-based in code.
//! Fock basis index bit for site `j` is `1 << (n - 1 - j)` (site 0 is the most
//! significant bit), fermionic operators carry a sign string over sites with a
//! smaller index, and two-site matrices are ordered `|00⟩, |01⟩, |10⟩, |11⟩`
//! with the left (lower-index) site first.

pub mod correlations;
pub mod error;
pub mod folding;
mod linalg;
pub mod oracle;
pub mod quadratic;
pub mod tensor_state;

pub use error::{KitaevError, Result};
pub use num_complex::Complex64 as C64;
