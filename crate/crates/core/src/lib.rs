//! Exact-statevector adaptive variational eigensolver engine.
//!
//! Layers, bottom up:
//! - [`pauli`]: symplectic Pauli strings and canonical Pauli sums.
//! - [`fermion`]: Jordan-Wigner ladder operators, excitation generators, pools.
//! - [`state`]: statevectors, exact generator exponentials, derivatives.
//! - [`eigen`]: dense and Lanczos reference ground states.
//! - [`geometry`]: pool gradient/metric, natural gradient, ansatz metric.
//! - [`adapt`]: Geo-ADAPT, ADAPT, their positional variants, fixed-ansatz VQE
//!   and the runtime descent checks.
//! - [`dense`]: Kronecker-product reference matrices used as test oracles.

pub mod adapt;
pub mod dense;
pub mod eigen;
pub mod error;
pub mod fermion;
pub mod geometry;
pub mod pauli;
pub mod state;

pub use error::{Error, Result};
