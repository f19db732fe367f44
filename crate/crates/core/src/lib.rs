//! Capacity regions and constructive finite-blocklength codes for
//! classical-classical-quantum multiple access channels whose encoders
//! either hold a common message or hold a rate-limited conference.
//!
//! The crate is `no_std` (with `alloc`) when built without the default
//! `std` feature. The `parallel` feature distributes optimizer directions and
//! success-probability terms over a rayon pool; results are merged in fixed
//! index order, so output does not depend on the worker count.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod channel;
pub mod coding;
pub mod conferencing;
pub mod error;
pub mod info;
pub mod linalg;
mod par;
pub mod region;
pub mod rng;

pub use channel::{averaged_cq_channel, tensor_power_output, Budget, CcqMac, CqChannel};
pub use error::{ChannelInput, Error, Result};
pub use info::{conditional_holevo, holevo, holevo_terms, subadditivity_gap, Conditioning, Distribution, HolevoTerms, InputLaw};
pub use coding::{
    assemble_common_code, build_pgm_decoder, compose_two_stage, default_delta, joint_pgm_decoder, permute_operator,
    sample_common_codebook, sample_private_codebooks, success_probability_common, typical_projector, typical_set,
    AssembledCode, CodeParams, CommonCodebook, CommonMessageCode, PrivateCodebooks, ResidualPolicy, TypicalSetSpec,
};
pub use conferencing::{
    assemble_conferencing_code, conferencing_code_from_common, run_conference, success_probability_conf,
    verify_rate_constraints, willems_one_step, AssembledConferencingCode, CellPartition, ConferenceProtocol,
    ConferenceStep, ConferencingCode, ConferencingParams, RateReport, StepRule,
};
pub use region::{
    common_message_bounds, compare_regions, conferencing_bounds, membership, region_frontier, region_grid, support_maximize,
    support_maximize_from, BoundSet, CompareReport, FrontierSettings, OptimizerSettings, RatePoint, RegionApprox, RegionMode,
    SupportResult, Verdict,
};
pub use linalg::{
    hermitian_eigensystem, tensor_product, trace_pair, von_neumann_entropy, ComplexMatrix, DensityMatrix, Eigensystem,
    HermitianOperator, Povm, C64,
};
