//! Fast, accurate evaluation of Bessel functions J_nu(x) at large order
//! and/or argument via asymptotic expansions, with automatic regime
//! selection, an arbitrary-precision oracle for validation, and an evaluator
//! for the pulsar gravitational-wave Fourier-transform signal built on top.

pub mod debye;
pub mod evaluator;
pub mod gw;
pub mod hp;
pub mod meissel;
pub mod oracle;
pub mod transition;
pub mod types;

pub use evaluator::{classify, eval_j, eval_j_method, DispatchPolicy};
pub use types::{BesselQuery, Error, ExpansionResult, Method, PrecisionConfig, Regime, RegimeTag};
