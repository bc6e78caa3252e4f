//! Simulation and verification of Heckman-Opdam, Dunkl and related
//! jump-diffusion processes on Weyl chambers of crystallographic root systems.
//!
//! The crate is organized around the pipeline used by the verification CLI:
//!
//! | Module     | Contents                                                              |
//! |------------|-----------------------------------------------------------------------|
//! | [`roots`]  | Root systems, Weyl groups, chamber geometry, the Dunkl rescaling      |
//! | [`fields`] | Drift vector fields and jump-rate functions of the generators         |
//! | [`sde`]    | Wall-safe Euler-Maruyama integration of the continuous radial parts   |
//! | [`jump`]   | Skew-product simulation of the full jump processes and their          |
//! |            | martingale decomposition                                              |
//! | [`limits`] | Normalizations and samplers for the limit-theorem checks              |
//! | [`stats`]  | KS / chi-square / energy-distance tests and moment estimation        |
//! | [`verify`] | The check registry executed by `hoproc verify` and the acceptance     |
//! |            | suite                                                                 |
//! | [`export`] | CSV / text emission of paths, events and root-system dumps           |
//!
//! Everything is deterministic given a master seed: each path derives its own
//! counter-based ChaCha stream (see [`rng`]), and aggregations reduce in path
//! order, so results do not depend on the number of worker threads.

pub mod export;
pub mod fields;
pub mod geom;
pub mod jump;
pub mod limits;
pub mod rng;
pub mod roots;
pub mod sde;
pub mod stats;
pub mod verify;

pub use jump::SkewKind;
pub use roots::{Family, Root, RootSystem, WeylElement, WeylGroup};
pub use sde::{RadialKind, SimConfig};
