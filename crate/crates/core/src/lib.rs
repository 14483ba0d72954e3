//! Coarse-grained entropic uncertainty relations for position and momentum.
//!
//! The crate evaluates three families of lower bounds on
//! `H_α[q^Δ] + H_β[p^δ]`, where `q^Δ` and `p^δ` are the probabilities of a
//! state's position and momentum falling into bins of widths `Δ` and `δ`.
//! Every bound depends on `γ = Δδ` only (with `ħ = 1`).
//!
//! * [`prolate`] computes `λ₀(c)`, the largest eigenvalue of the time and
//!   band limiting operator, which everything else is built on.
//! * [`majorization`] builds the vectors `W⁽ⁿ⁾(γ)` that majorize every
//!   coarse-grained `q ⊕ p`.
//! * [`bounds`] turns those into entropic bounds and compares families.
//! * [`coarsegrain`] bins concrete states and checks the bounds on them.
//! * [`sweep`] tabulates the bounds over a grid of `γ`.
//!
//! ```
//! use coarse_eur::{bound_b, bound_majorization, Truncation};
//!
//! let b = bound_b(7.0, 1.0).unwrap();
//! let maj = bound_majorization(7.0, 1.0, Truncation::Finite(3)).unwrap();
//! assert!(maj > b);
//! ```

pub mod bounds;
pub mod coarsegrain;
pub mod error;
pub mod exec;
pub mod majorization;
pub mod prolate;
pub mod quadrature;
pub mod sweep;

pub use bounds::{
    best_bound, bound_b, bound_majorization, bound_r, find_crossing, renyi_entropy, BoundRequest,
    BoundResult, Curve, Family, FamilySelector,
};
pub use coarsegrain::{
    momentum_probs, position_probs, random_hermite_states, verify_direct_sum_majorization,
    verify_eur, CoarseDistribution, EurReport, SampledState, StateSpec, Verifier,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use majorization::{build_w, check_chain, majorizes, MajorizationVector, Truncation};
pub use prolate::{lambda0, lambda0_by, Method, ProlateEvaluation};
pub use sweep::{sweep, Scale, SweepConfig, SweepRow};
