//! Factoring instances as QUBO polynomials and Ising Hamiltonians.
//!
//! `N = p q` is written as a binary multiplication table whose columns are
//! grouped into blocks of width `W`. Each block contributes the square of
//! its balance (products plus incoming carries minus outgoing carries minus
//! the matching bits of `N`), the order-four result is quadratized with one
//! auxiliary per free `p_m q_n` pair, and the spin form follows from
//! `x = (1 - s) / 2`.

mod class;
mod cost;
mod export;
mod ising;
mod layout;
mod poly;
mod reduce;
mod registry;

pub use class::{
    build_size_class, build_size_class_with, canonical_split, encode_instance, is_semiprime, Instance, MemberFilter,
    SizeClass, DEFAULT_BLOCK_WIDTH,
};
pub use cost::{assignment_for_factors, block_expressions, build_cost_function};
pub use export::{flat_couplers, instance_file_name, ClassManifest, InstanceExport, ManifestEntry};
pub use ising::{
    brute_force_ground, decode_solution, ground_from_diagonal, to_ising, GroundState, IsingHamiltonian,
    MAX_BRUTE_FORCE_QUBITS,
};
pub use layout::{build_block_layout, enumerate_bit_splits, BitSplit, BlockLayout};
pub use poly::QuboPolynomial;
pub use reduce::{cubic_gadget, reduce_to_quadratic, substitution_penalty};
pub use registry::{Role, VariableRegistry};
