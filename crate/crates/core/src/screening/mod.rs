//! Design-space screening: value-count allocation, grid construction,
//! streaming enumeration, top-K / threshold selection and the candidate
//! database with validation merge.

pub mod candidates;
pub mod enumerate;
pub mod grid;
pub mod select;

pub use candidates::{merge_validated, CandidateDb, CandidateDbHeader, ValidationRecord, CANDIDATE_SCHEMA_VERSION};
pub use enumerate::{enumerate_grid, GridIter};
pub use grid::{allocate_value_counts, build_grid, weight_importance, AllocationConfig, GridSpec, REFERENCE_COUNTS};
pub use select::{attach_hlc, check_capacity, merge_ranked, rank_order, scan_range, screen, Candidate, Criterion, Scorer, DEFAULT_ENUMERATION_CAP};
