//! Scattering engine for generalized unified Cantor potentials (UCP-ρ_N).
//!
//! A potential of stage `S` on `[0, L]` consists of `N^S` equal rectangular
//! barriers of height `V`. Transmission is computed two ways: the O(S²)
//! super-periodic closed form in [`spp`] and the O(N^S) brute-force
//! transfer-matrix product in [`scattering`]. The two must agree, and the
//! test suites hold them to it.
//!
//! Units: ħ = 1 and 2m = 1, so `E = k²` and the in-barrier wavenumber is
//! `k̃ = √(k² − V)`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod fractal;
pub mod geometry;
pub mod scattering;
pub mod spp;

pub use error::{Error, Result};
pub use geometry::{PotentialSpec, SegmentLayout, StageMetrics};
pub use scattering::{TransferMatrix, WaveContext};
pub use spp::BlochArgs;
