//! Numerical toolkit for mixed-norm Herz spaces and the Besov and
//! Triebel-Lizorkin scales built on them.
//!
//! Modules, bottom-up:
//!
//! * [`grid`]: periodic dyadic grids, masks, the unitary DFT and field snapshots.
//! * [`herz`]: axis-wise Lebesgue/Herz reductions and the iterated mixed Herz norm.
//! * [`lpdecomp`]: the smooth resolution of unity, the Frazier-Jawerth pair and
//!   Littlewood-Paley blocks.
//! * [`spaces`]: function-side Besov and Triebel-Lizorkin norms.
//! * [`frames`]: the φ-transform (analysis) and its inverse (synthesis).
//! * [`seqspace`]: exact sequence-space norms, the λ* majorant and rearrangements.
//! * [`maximal`]: axis-wise and iterated Hardy-Littlewood maximal operators.
//! * [`embedlab`]: ratio sweeps and exponent fits for the embedding inequalities.
//!
//! Axes are indexed from zero; axis 0 is the innermost one in every iterated norm.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod embedlab;
pub mod error;
pub mod frames;
pub mod grid;
pub mod herz;
pub mod lpdecomp;
pub mod maximal;
pub mod seqspace;
pub mod spaces;

pub use error::{Error, Result};
pub use frames::CoeffSeq;
pub use grid::{Domain, Grid, SampledField};
pub use herz::{Exponent, HerzParams};
pub use lpdecomp::SpectralSystem;
pub use spaces::{Family, SpaceParams};

pub use num_complex::Complex64;
