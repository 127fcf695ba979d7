//! Finite-dimensional frame multipliers.
//!
//! A multiplier `M_{m,Φ,Ψ} f = Σ m_n ⟨f, ψ_n⟩ φ_n` is built from two finite
//! frames of `C^d` and a complex symbol `m`. This crate assembles such
//! operators (for generic and Gabor frames), checks the norm, adjoint and
//! Schatten-class inequalities they obey, inverts them with three
//! Neumann-type series that carry a-priori error bounds, and extracts the
//! dual frames induced by an invertible multiplier.
//!
//! All inner products are conjugate-linear in the second argument.
//! Matrices are dense [`faer::Mat`]s of [`c64`]; frames are stored as their
//! `d × N` synthesis matrix.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod duality;
pub mod error;
pub mod frames;
pub mod gabor;
pub mod inversion;
pub mod io;
pub mod linalg;
pub mod multiplier;
pub mod par;
pub mod symbol;

pub use faer::{c64, Mat, MatRef};

pub use error::{Error, Result};
pub use frames::{FiniteFrame, FrameBounds, DEFAULT_FRAME_TOL};
pub use gabor::{GaborLattice, GaborSystem};
pub use inversion::{InversionReport, Method};
pub use multiplier::MultiplierOp;
pub use par::ExecPolicy;
pub use symbol::{SignPattern, Symbol, SymbolStats};
