//! Verification toolkit for operator quantizations of Poisson algebras.
//!
//! The crate has two halves that meet in the middle:
//!
//! * **Finite category kernel** ([`fincat`]): explicit finite categories given
//!   by composition tables, with validation, functor checking, limits by
//!   exhaustive cone enumeration, and a decision procedure for categorical
//!   equivalence on small inputs.
//! * **Quantization backends**: four concrete models that produce quantization
//!   maps `Q : A → M` from a commutative Poisson algebra `A` into operator
//!   algebras `M`, each tagged with its deformation parameter ħ:
//!   - [`matreg`] — Berezin–Toeplitz matrix regularization of the unit sphere
//!     (ħ ∝ 1/dim), with compressions connecting successive matrix sizes;
//!   - [`nctorus`] — Weyl (clock/shift) quantization of the 2-torus at
//!     rational deformation parameter θ = 1/q, ħ = 2πθ;
//!   - [`prequant`] — geometric prequantization of the symplectic plane by
//!     first-order differential operators, exact in rational arithmetic;
//!   - [`envelope`] — the commutation representation of a Poisson algebra
//!     inside a Weyl algebra of polynomial differential operators.
//!
//! The glue layer [`qcat`] assigns to a family of quantization maps an index
//! category and a diagram in the ambient category of algebras, measures the
//! noncommutative character χ(M) = max |ħ| of each object, and runs the
//! quantitative checks (residual decay rates, block-diagonal structure of
//! compressions, chain consistency, multiplicativity and bracket conditions at
//! limit objects). [`propsuite`] packages the categorical fixtures — worked
//! equivalences, non-equivalences, a seven-morphism composition-table example,
//! and a fixture whose mediating morphism fails to be unique — behind stable
//! ids, and [`report`] renders results as JSON, CSV, or Markdown.
//!
//! Numerical checks use [`numerics`] (dense complex matrices, operator norms
//! via SVD or power iteration); exact checks use [`diffop`] (normal-ordered
//! polynomial differential operators over Gaussian rationals).

pub mod diffop;
pub mod envelope;
pub mod fincat;
pub mod matreg;
pub mod nctorus;
pub mod numerics;
pub mod prequant;
pub mod propsuite;
pub mod qcat;
pub mod report;

use thiserror::Error;

/// Failure taxonomy shared by every module in the crate.
///
/// * `Domain` — the input is outside the operation's domain (bad exponent,
///   unknown identifier, malformed file, dimension mismatch).
/// * `Tolerance` — a numerical check exceeded its tolerance.
/// * `Capacity` — the input is structurally valid but larger than the
///   implemented exhaustive-search or dense-linear-algebra budget.
/// * `Consistency` — declared data contradicts itself (a composition table
///   that breaks associativity, a declared inverse that is not one, a
///   factorization that does not hold).
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical tolerance was violated.
    #[error("tolerance violation: {0}")]
    Tolerance(String),
    /// Input exceeds an implemented exhaustive-search budget.
    #[error("capacity error: {0}")]
    Capacity(String),
    /// Declared data contradicts itself.
    #[error("consistency error: {0}")]
    Consistency(String),
    /// Underlying I/O failure while reading or writing fixture files.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    /// Underlying JSON failure while reading or writing fixture files.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// CSV serialization failure.
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
