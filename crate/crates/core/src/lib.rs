//! Entanglement-bootstrap axiom checks and commuting parent Hamiltonians.

pub mod axioms;
pub mod error;
pub mod gf2;
pub mod hamiltonian;
pub mod lattice;
pub mod markov;
pub mod pauli;
pub mod stabilizer;
pub mod tensor;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
