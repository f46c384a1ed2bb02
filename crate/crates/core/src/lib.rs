//! Bound states of the N-dimensional Schrödinger equation with Mie-type
//! potentials `V(r) = A/r² + B/r + C`.
//!
//! The crate provides closed-form energies and normalized radial
//! eigenfunctions, the SU(1,1) ladder structure connecting neighbouring
//! radial levels, and two independent numerical checks: a finite-difference
//! eigenvalue oracle for the hyperradial equation and Gauss-Laguerre
//! quadrature for normalization and overlap integrals.
//!
//! ```
//! use mie_spectra::potential::coulomb;
//! use mie_spectra::spectrum::{BoundState, QuantumNumbers};
//!
//! let hydrogen = coulomb(-1.0, 1.0, 1.0);
//! let ground = BoundState::new(hydrogen, QuantumNumbers::new(0, 0, 3)).unwrap();
//! assert!((ground.energy + 0.5).abs() < 1e-15);
//! ```
//!
//! With the default `parallel` feature, batch work (channel sweeps,
//! per-eigenvalue bisection, grid sampling) runs on rayon; disabling it
//! gives an identical sequential build.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod ladder;
pub mod oracle;
pub mod par;
pub mod potential;
pub mod special_fn;
pub mod spectrum;
pub mod wavefunction;

pub use error::{Error, Result};
