//! Extended phase space (N = 2) supersymmetric quantum mechanics.
//!
//! The crate is organised around the superpotentials `W(q)` and `V(p)` of the
//! two sectors of the extended Hamiltonian `H_ext = H_q − H_p`:
//!
//! * [`potentials`]: superpotentials, partner potentials `W² ∓ W'`, vacua, actions.
//! * [`extended`]: classical dynamics with a nilpotent grading sector.
//! * [`groundstate`]: the iterative groundstate scheme and breaking measures.
//! * [`oracle`]: finite-difference partner Hamiltonians and their spectra.
//! * [`shape`]: shape invariance, remainders and Riccati chains.
//! * [`algebra`]: deformed spectrum generating algebras and self-similar spectra.
//! * [`instanton`]: instanton trajectories and tunneling matrix elements.
//!
//! Units are geometrized throughout (`ħ = 1`).

// `!(x > 0.0)` deliberately rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod error;
pub mod extended;
pub mod grid;
pub mod groundstate;
pub mod instanton;
pub mod nilpotent;
pub mod ode;
pub mod oracle;
pub mod potentials;
pub mod quadrature;
pub mod shape;
pub mod spline;
pub mod tridiag;

pub use error::{Result, SusyError};
pub use grid::Grid;
pub use nilpotent::NilpotentScalar;
pub use potentials::{Family, PartnerSign, SuperPotential, Vacuum, VacuumPair};
