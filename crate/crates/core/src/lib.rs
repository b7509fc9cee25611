//! Numerical search for Weyl-Heisenberg covariant SIC fiducial vectors.
//!
//! The crate is organised bottom-up:
//!
//! - [`zmod`]: integer arithmetic modulo `d` / `d̄` and the (extended)
//!   symplectic groups `SL2` / `ESL2` over those rings.
//! - [`heisenberg`]: displacement operators `D_p`, the phases `τ`, `ω` and the
//!   symplectic form.
//! - [`clifford`]: extended Clifford group elements `[F|p]`, their realization as
//!   (anti-)unitary operators and enumeration of `PEC(d)` for small `d`.
//! - [`symmetry`]: the known symmetry series (`Fz`, `Fa`, ..., `Fe'`) and the
//!   conjugacy identities relating them.
//! - [`objective`]: the Welch-bound functional, its gradient and a direct
//!   equiangularity check.
//! - [`subspace`]: eigenspaces of unitary symmetries and coneigenvector spaces of
//!   anti-unitary ones.
//! - [`search`]: multi-start L-BFGS minimization with Haar-random starts.
//! - [`classify`]: extended-Clifford orbits and stabilisers.
//! - [`io`] and [`cli`]: the solution file format and the `sic` command line.

pub mod classify;
pub mod cli;
pub mod clifford;
mod error;
pub mod heisenberg;
pub mod io;
pub mod objective;
pub mod search;
pub mod subspace;
pub mod symmetry;
pub mod zmod;

pub use error::{Result, SicError};
pub use num_complex::Complex64 as C64;
pub use zmod::Dim;
