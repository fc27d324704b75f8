//! Rigged configurations, the Kerov–Kirillov–Reshetikhin bijection to
//! highest-weight paths of `sl_n` symmetric-power crystals, and its
//! reformulation through the combinatorial R matrix, scattering data and
//! normal ordering. A box-ball system engine and an exhaustive cross-checking
//! harness sit on top.

pub mod boxball;
pub mod crystal;
pub mod error;
pub mod kkr;
pub mod rigged;
pub mod scattering;
pub mod tableau;
pub mod verify;

pub use crystal::{
    affine_r, energy, is_highest, r_matrix, unwinding_number, weight, AffineFactor, RImage,
};
pub use error::{Error, Result};
pub use kkr::{kkr_forward, kkr_scattering, KkrTrace};
pub use rigged::{RiggedConfiguration, Row};
pub use scattering::{compose_theorem, normal_order, phi, ScatteringData};
pub use tableau::{Tableau, TensorWord};
