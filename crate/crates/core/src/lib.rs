//! Lagrangian tetragons, Hamiltonian chords and the `pb4+` Poisson bracket
//! invariant on low-dimensional model phase spaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`phase`]: flat symplectic charts, Hamiltonians, `sgrad`, Poisson
//!   brackets, autonomization and the deformed-volume identity.
//! - [`contact`] and [`tetragon`]: the circle, unit cotangent torus and
//!   contact sphere models, their Reeb flows, and the four tetragon regions.
//! - [`integrate`], [`separation`] and [`chord`]: adaptive integration,
//!   separation constants and chord search with time budgets.
//! - [`pb4`]: gridded estimation of `pb4+` and the wall witness.
//! - [`scenarios`]: the four turn-key applications.
//! - [`cli`]: configuration-driven runner and report emitter.
//!
//! See `examples/` for one runnable program per capability.

pub mod chord;
pub mod cli;
pub mod contact;
pub mod fd;
pub mod integrate;
pub mod pb4;
pub mod phase;
pub mod profile;
pub mod scenarios;
pub mod search;
pub mod separation;
pub mod tetragon;

pub use phase::{
    autonomize, poisson_bracket, sgrad, volume_factor, FnHamiltonian, Hamiltonian, HamiltonianRef,
    PhaseChart, PhasePoint, TimeDependence,
};
