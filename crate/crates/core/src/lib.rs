//! Exact least common multiples of arithmetic progressions `u_k = u0 + k r`
//! and instance-level checks of lower bounds on them.
//!
//! All verdicts are decided with unbounded integers and reduced fractions;
//! logarithms are only used for the reported sharpness gap.

pub mod bounds;
pub mod error;
pub mod lcm_engine;
pub mod numeric;
pub mod progression;
pub mod report;
pub mod verifier;

pub use bounds::{bound_value, check, hypothesis, BoundParams, BoundReport, Family};
pub use error::{Error, Result};
pub use lcm_engine::{cofactor, lcm_prefix, lcm_suffix, record, IncrementalState, LcmRecord};
pub use numeric::{Factorization, Nat, Rat};
pub use progression::{PrefixWindow, Progression};
pub use verifier::{
    sweep, sweep_with_jobs, IntRange, LemmaId, LemmaVerdict, Status, SweepConfig, SweepOutcome,
};
