//! Random walks in random scenery at the critical exponent `α = d`.
//!
//! A random walk `S` on `Z^d` (`d ∈ {1, 2}`) in the domain of attraction of
//! an `α`-stable law with `α = d` visits sites carrying i.i.d. values `ξ_y`
//! in the domain of attraction of a `β`-stable law. The crate simulates
//! `Z_n = Σ_{k<n} ξ_{S_k}`, provides the stable limit laws of `Z_n / b_n`
//! with `b_n = n^{1/β} (ln n)^{(β-1)/β}`, and the statistics used to test
//! functional and local limit theorems against them.

pub mod error;
pub mod process;
pub mod quadrature;
pub mod rng;
pub mod scenery;
pub mod stable_law;
pub mod statistics;
pub mod walk;

pub use error::{Error, Result};
pub use process::{bn, stream_trial, TrajectorySample};
pub use scenery::{builtin_scenery, SceneryField, SceneryModel};
pub use stable_law::{LimitLaw, StableParams};
pub use walk::{builtin_model, simulate, Dim, Point, WalkModel};
