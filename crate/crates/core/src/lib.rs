//! Shapley value computation with order-of-addition designs.
//!
//! Permutations of the players are sampled from component orthogonal arrays
//! (COAs) or Latin squares instead of uniformly at random. Both designs keep
//! the estimator unbiased and efficient, and the COA design removes the
//! variance entirely for several structured games.
//!
//! ```
//! use shapley_oofa::estimators::estimate_coa;
//! use shapley_oofa::games::VotingGame;
//!
//! let game = VotingGame::new(8).unwrap();
//! let est = estimate_coa(&game, 1, 7).unwrap();
//! assert!(est.values.iter().all(|v| (v - 0.125).abs() < 1e-12));
//! ```
//!
//! Players are 0-based inside the library; files and reports use 1-based labels.

pub mod analysis;
pub mod designs;
pub mod error;
pub mod estimators;
pub mod exec;
pub mod galois;
pub mod games;
pub mod seed;

pub use error::{Error, Result};
