//! Exploration, oracles, random programs and fixtures.

pub mod explore;
pub mod fixtures;
pub mod fuzz;
pub mod generate;
pub mod oracles;

pub use explore::{
    explore_all, explore_machine, Exploration, ExploreLimits, ExploreVerdict, Terminal,
};
pub use fuzz::{
    fuzz_campaign, fuzz_program, program_seeds, FuzzParams, FuzzReport, FuzzTotals, ProgramResult,
};
pub use generate::{random_cfg, random_store, GenParams};
pub use oracles::{
    audit_machine, audit_run, check_confluence, check_equivalence, check_equivalence_with,
    lemma_audit, AuditCheck, AuditReport, ConfluenceReport, ConfluenceVerdict, EquivalenceReport,
    Leg,
};
