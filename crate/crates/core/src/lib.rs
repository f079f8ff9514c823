//! Unit-commitment simulation engine: market-dispatch MILP assembly under
//! three commitment formulations, a deterministic reference
//! branch-and-bound solver, rolling-horizon decomposition, constraint
//! clipping, prosumer sub-problems, and synthetic case generation.

pub mod clipping;
pub mod dispatch;
pub mod fixtures;
pub mod io;
pub mod formulation;
pub mod metrics;
pub mod milp;
pub mod model;
pub mod rolling;
