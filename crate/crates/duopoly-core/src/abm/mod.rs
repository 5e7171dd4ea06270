//! Agent-based duopoly adoption on a small-world network.
//!
//! Agents occupy one of three states (brand 1, brand 2, non-adoption) on a
//! Watts-Strogatz graph. Each tick a fixed number of non-adopters per brand
//! is seeded (the microscopic analog of external influence), then every
//! remaining non-adopter samples its next state from the zero-temperature
//! three-option rule evaluated against a synchronous snapshot. Adoption is
//! absorbing: no readoption, no switching.

mod decision;
mod network;
mod sim;

pub use decision::{effective_delta, local_shares, state_probabilities, AgentState};
pub use network::{build_watts_strogatz, Network};
pub use sim::{ensemble, run, AbmConfig, AbmTrajectory, EnsembleSample, EnsembleTrajectory, SimRng, Simulation};
