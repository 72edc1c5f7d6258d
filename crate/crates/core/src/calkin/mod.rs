//! Calkin-space machinery: counting profiles, principal-space membership
//! and stability deciders for singly generated spaces.

mod examples;
mod profile;
mod stability;

pub use examples::{
    counterexample_table, l2p_not_lp_demo, power_band_envelope, CounterexampleRow, L2pDemo,
    PowerEnvelope,
};
pub use profile::{
    band_counts, principal_membership, profile, shift_criterion, shift_domination_constant,
    CalkinProfile, Membership,
};
pub(crate) use profile::check_omega;
pub use stability::{
    diverging, ratio_tables, remc_sufficient, stability_condition3, RatioTable, RemcVerdict,
    StabilityCertificate, StabilityDecision, StabilityVerdict,
};
