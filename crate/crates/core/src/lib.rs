//! State-vector quantum circuit simulation on a block intermediate representation.
//!
//! Circuits are trees (DAGs, when nodes are shared) of [`Block`]s that can be
//! applied to a [`Register`], converted into format-specialized matrices,
//! daggered, and differentiated in reverse mode or with the parameter-shift
//! rule. Qubit indices are 1-based throughout and qubit 1 is the least
//! significant bit of a basis index.

pub mod bitstr;
pub mod autodiff;
pub mod block;
pub mod circuits;
pub mod error;
pub mod gates;
pub mod krylov;
pub mod matrix;
pub mod register;
pub mod script;

pub use bitstr::BitStr;
pub use block::Block;
pub use error::{Error, Result, Span};
pub use matrix::{Format, MatrixRepr, OpProps};
pub use register::{MeasureOutcome, Register};

/// Complex double used for all amplitudes and matrix entries.
pub type C64 = num_complex::Complex64;
