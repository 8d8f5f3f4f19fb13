//! Exact scalars: reduced rationals, cyclotomic integers, float-to-rational
//! reconstruction.

mod cyclotomic;
mod lattice;
mod rational;
mod reconstruct;

pub use cyclotomic::{cyc_mul, cyclotomic_poly, euler_phi, unit_root, CyclotomicInt};
pub(crate) use cyclotomic::bigint_from_json;
pub use lattice::{lattice_supported, round_to_ring, round_vector_dyadic};
pub use rational::{is_algebraic_integer, Rational};
pub use reconstruct::rational_reconstruct;
