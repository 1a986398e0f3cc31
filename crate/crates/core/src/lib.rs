//! Necessary conditions for fermion N-representability of 2-particle
//! reduced density matrices.
//!
//! The crate works on finite antisymmetric spaces `∧^p H¹` with `dim H¹ = n`,
//! always expressed in the lexicographically ordered Slater basis with
//! 0-based orbital labels. The main entry points are:
//!
//! * [`basis`] – Slater label enumeration, ranking and sign bookkeeping.
//! * [`operators`] – wavefunctions, Hermitian/density operators, the Grassmann
//!   lift `b ∧ I^{∧(N-2)}` and the trace-preserving contraction.
//! * [`canonical`] – pairing (canonical) form of a geminal.
//! * [`spectral3`] – closed-form spectrum of `3 P_g ∧ I¹` and `Λ_max`.
//! * [`conditions`] – P, dual-P, B, C, strengthened-B, eigenvalue and
//!   one-particle conditions evaluated into [`conditions::ConditionReport`]s.
//! * [`sampling`] – seeded representable density matrices and witnesses.
//! * [`io`] – JSON matrix files and JSON-lines reports.

pub mod basis;
pub mod canonical;
pub mod conditions;
pub mod dense;
pub mod eigen;
mod error;
pub mod io;
pub mod operators;
pub mod sampling;
pub mod spectral3;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use operators::{DensityOperator, HermitianOperator, WaveFunction};

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
