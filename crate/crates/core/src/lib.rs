//! Exact computer algebra for polynomial deformations of so(4), so(3,1)
//! and e(3) that leave the so(3) subalgebra undeformed.
//!
//! The crate is organised bottom-up:
//!
//! * [`exactnum`] — rationals and the ring of rational combinations of
//!   square roots of squarefree positive integers, the number system in
//!   which every coupling coefficient lives;
//! * [`angmom`] — exact Clebsch-Gordan and unitary Racah coefficients;
//! * [`tensoralg`] — canonical-form calculus of so(3) irreducible tensor
//!   operators built from the angular momentum `L` and one tensor `T`;
//! * [`vectordef`] — the deformed vector-case algebra: associativity
//!   checks, the recursion tables, and the deformed Casimir solver;
//! * [`quaddef`] — the quadrupole case and its first-order
//!   non-associativity obstruction.
//!
//! Everything here is exact; floating-point only enters through the
//! explicit `to_f64` conversions. Matrix realizations of the unitary
//! irreducible representations live in the companion `defangmom` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod angmom;
pub mod exactnum;
pub(crate) mod linalg;
pub mod quaddef;
pub mod tensoralg;
pub mod vectordef;

pub use exactnum::{RadicalNumber, Rational};
