//! Tournament solution concepts: k-kings, the top cycle, dominating sets,
//! single-elimination brackets, random tournament models and the Monte
//! Carlo experiments built on them.

mod bits;

pub mod bracket;
pub mod experiments;
pub mod fixtures;
pub mod models;
pub mod solutions;
pub mod tournament;

pub use bracket::{
    is_superking, playout, se_winners_exhaustive, superking_bracket, validate_bracket,
    winning_bracket, Bracket, BracketError, SeOracle, WinningBracket,
};
pub use models::{probability_matrix, sample, ModelError, ModelSpec, ProbabilityMatrix, RngStream};
pub use solutions::{
    dominating_set_greedy, is_r_dominating, k_kings, middle_vertex, r_dominating_set, reach_within,
    top_cycle, DominatingSet, KBound, KingSet, SolutionError,
};
pub use tournament::{AlternativeId, Restriction, Tournament, TournamentError};
