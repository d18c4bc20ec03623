//! Exact computation of Frobenius numbers and Sylvester statistics.
//!
//! Given a tuple A = (a₁, …, aₙ) of relatively prime integers ≥ 2, this crate
//! computes the Frobenius number g(A), the Sylvester number n(A) and sum s(A),
//! power sums s_μ(A), binomial moments ŝ_μ(A), and weighted power sums
//! s_μ^(λ)(A) — all in exact arithmetic, through four independent routes:
//!
//! - [`oracle`]: brute-force enumeration of the gap set (the ground truth);
//! - [`nr`]: the residue table N_r (smallest representable value in each class
//!   mod a₁) computed by shortest paths, then aggregated by the
//!   Bernoulli-weighted summation formulas;
//! - [`families`]: closed formulas for specific parametric families, guarded
//!   by their stated hypotheses and cross-checked against the other engines;
//! - [`ct`] + [`fx`]: a constant-term engine that evaluates rational-sum
//!   representations of f(x) = Σ x^{N_r} and its derivatives at x = 1 (or at
//!   a weight λ) via truncated exact power series in x = e^t.
//!
//! The [`ob`] module hosts the minimization O_B(M) = min Σxᵢ subject to
//! Σbᵢxᵢ = M that links the residue table of (a, ha+dB) to per-family
//! closed forms.

pub mod ct;
pub mod error;
pub mod families;
pub mod fx;
pub mod nr;
pub mod numeric;
pub mod ob;
pub mod oracle;
pub mod series;
pub mod stats;
pub mod tuple;

pub use error::{Error, Result};
pub use stats::{Engine, LambdaSums, StatBundle};
pub use tuple::Tuple;
