//! Positional scoring rules that do not depend on the utility distribution,
//! together with exact and Monte Carlo machinery for expected distortion and
//! expected social welfare, and generators for adversarial instances.

pub mod binomial;
pub mod constructions;
pub mod distributions;
pub mod engine;
pub mod error;
pub mod model;
pub mod rng;
pub mod rules;
pub mod verify;

pub use distributions::{DistributionSpec, FiniteDiscrete, OrderStatQuery, QuantileList};
pub use engine::{DistortionReport, EstimationConfig, Method};
pub use error::{Error, Result};
pub use model::{
    Alternative, Electorate, GroupedProfile, PreferenceProfile, RankHistogram, Ranking,
    UtilityProfile,
};
pub use rng::RandomStream;
pub use rules::{RuleSpec, ScoreVector, VotingRule};
