//! The alternating-block construction: two square patches of different
//! densities are combined into two larger ones whose bottom strip alternates
//! between blocks of both kinds, and the step is iterated.

mod build;
mod chain;
mod config;
mod constants;

pub use build::{
    alternating_arrangements, build_delone_spec, build_new_patches, initial_corners, initial_squares, level_densities,
    BuildMode, LSchedule, NonrectBuild, RigorousPlan, StagePlan, StepParams, StepRecord, SymbolicStep, ToyParams,
};
pub use chain::{expansion_chain_report, ChainLink, ChainReport};
pub use config::BuildConfig;
pub use constants::{
    bundle_for_gap, constant_p0, constants_remark1, constants_remark2, density_epsilon, ell_min, n_min, thirds,
    ConstantBundle, PowerCheck,
};
