//! Closed-form barrier bounds and reference formulas.

pub mod closed_form;
pub mod gamma;
pub mod idelta;
pub mod powerlaw;
pub mod zeta;

pub use closed_form::{closed_form_reference, ClosedForm, ClosedFormFamily};
pub use gamma::{
    bounds_report, gamma_lower, gamma_upper, gamma_upper_with_slack, h_condition_strict,
    h_condition_weak, BoundsReport, LowerBound, UpperBound, DEFAULT_SLACK_CONSTANT,
};
pub use idelta::{i_delta, i_delta_upper, i_delta_value};
pub use powerlaw::{power_law_quantities, PowerLawQuantities, Reading};
pub use zeta::zeta_tail;
