//! Small-noise linear diffusions conditioned to cross a potential wall.
//!
//! The crate provides closed-form oracles for hitting probabilities and
//! exit-time limit laws, exact samplers for the statistics those laws are
//! built from, trajectory simulation on the Brownian clock, the
//! two-dimensional saddle exit experiment and the statistics used to compare
//! samples against limits.

pub mod analytic;
pub mod error;
pub mod model;
pub mod parallel;
pub mod path;
pub mod rng;
pub mod saddle;
pub mod samplers;
pub mod stats;

pub use analytic::{LimitKind, LimitLaw, SaddleMixture, Theorem};
pub use error::{Error, Result};
pub use model::{BrownianClock, Time, WallModel1D};
pub use parallel::{RunPlan, BATCH_SIZE};
pub use path::{
    ConditioningMethod, EquivalenceEstimate, EventFlags, EventPair, ExitSide, GridSpec, PathOutcome,
};
pub use rng::SimRng;
pub use saddle::{Regime, SaddleModel2D};
pub use samplers::XiSampler;
pub use stats::EmpiricalSample;
