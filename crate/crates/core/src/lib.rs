//! Evolution of cooperation on growing networks.
//!
//! Individuals sit on the nodes of an undirected graph and play a one-shot
//! prisoner's dilemma against every neighbour (benefit `r`, cost 1). Once per
//! generation every node picks a random neighbour and copies its strategy with
//! the Fermi probability `1 / (1 + exp(-beta * (P_j - P_i)))`. Between two
//! generations the population grows by a constant fraction `n`, new nodes
//! attaching `L` links either preferentially (scale-free) or uniformly at
//! random.
//!
//! The crate provides the model ([`network`], [`game`], [`growth`],
//! [`simulation`]), the ensemble protocols ([`experiments`]), degree
//! statistics ([`stats`]) and the batch front-end used by the `coopgrow`
//! binary ([`config`], [`cli`]).

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod game;
pub mod growth;
pub mod network;
pub mod output;
pub mod seeding;
pub mod simulation;
pub mod stats;

pub use error::{Error, Result};
pub use game::{fermi, payoff, synchronous_generation, GameParams, Strategy};
pub use growth::GrowthSchedule;
pub use network::{GrowthMechanism, Network, NodeId};
pub use simulation::{run_realization, SimParams, Trajectory};

/// Random stream used throughout the crate. ChaCha8 is portable across
/// platforms and releases, which keeps seeded outputs byte-identical.
pub type SimRng = rand_chacha::ChaCha8Rng;
