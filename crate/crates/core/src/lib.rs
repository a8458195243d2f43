//! Rank correlation coefficients and independence tests.
//!
//! The crate computes Chatterjee's `ξₙ`, the Dette–Siburg–Stoimenov
//! `ξ*ₙ`, Hoeffding's `Dₙ`, Blum–Kiefer–Rosenblatt's `Rₙ` and
//! Bergsma–Dassios–Yanagimoto's `τ*ₙ`; calibrates tests of independence with
//! their limiting, Monte Carlo or permutation null distributions; samples the
//! rotation and mixture alternatives used in local power studies; and runs
//! seeded power and timing studies.

pub mod alternatives;
pub mod coefficients;
pub mod error;
pub mod independence;
pub mod null;
pub mod ranks;
pub mod sample;
pub mod seed;
pub mod study;

pub use coefficients::{CoefficientEstimate, CoefficientKind, KernelSpec, Triweight};
pub use error::{RankError, Result};
pub use independence::TestResult;
pub use null::{NullKind, NullModel};
pub use ranks::{compute_rank_artifacts, midranks, RankArtifacts};
pub use sample::PairedSample;
