//! Continuous-time Metropolis dynamics, simulated without rejections.
//!
//! From ξ every single-flip neighbour ζ is reached at rate
//! `exp(−β[ℋ(ζ) − ℋ(ξ)]₊)`. The chain holds for an exponential time with
//! the total rate, then flips a vertex chosen proportionally to its rate, so
//! the continuous-time law is exact however small the rates get.

mod chain;
mod estimate;

pub use chain::{flip_rate, simulate_hitting, ConfigSet, GlauberChain, HittingSample, SimCaps};
pub use estimate::{
    arrhenius_fit, estimate_mean_hitting, exponential_law_test, exponential_law_test_with,
    gate_passage_probability, hitting_grid, prefactor_estimate, ArrheniusFit, ExpLawTest,
    GatePassage, MeanEstimate, Prefactor,
};
