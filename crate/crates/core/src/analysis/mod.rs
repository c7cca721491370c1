//! Certificates, structural reports and the shared test corpus.

pub mod certificate;
pub mod corpus;
pub mod fixtures;
pub mod structure;
pub mod suite;

pub use fixtures::{non_commuting_pair, run_fixtures, table1_fixtures, Expectation, Fixture, FixtureOutcome};
pub use certificate::{build_certificate, verify_kkt, verify_kkt_with_dual, CertificateReport, CertificateTolerances, Model};
pub use structure::{
    boundary_plateau, fid_structure, jump_estimates_report, large_gradient_plateau, max_principle, monotone_run_profile,
    tv_bound_check,
};
pub use suite::{check_case, CaseChecks, PropertyTally};
