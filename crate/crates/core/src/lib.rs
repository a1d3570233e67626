//! Numerical laboratory for compact adjoint simple Lie groups.
//!
//! The crate builds root systems and irreducible characters, realizes the
//! adjoint group as Killing-orthogonal matrices, and implements the orbit-sum,
//! conjugacy-class power and character disk constructions on top of them.

pub mod algebra;
pub mod character;
pub mod chevalley;
pub mod class_power;
pub mod disk;
pub mod least_squares;
pub mod linalg;
pub mod orbit;
pub mod root_system;
pub mod simplex;

pub use root_system::{
    build_root_system, enumerate_adjoint_dominant_weights, generate_weyl_group, is_in_root_lattice,
    CartanType, RootSystemError, RootSystemSpec, Weight, WeylElement,
};
