//! Tight frames interpolating between Gabor systems of the Heisenberg group
//! and wavelet systems of the extended affine group.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coherent_states;
pub mod error;
pub mod frames;
pub mod groups;
pub mod io;
pub mod numerics;
pub mod representations;
pub mod signals;

pub use error::{FrameError, Result};
pub use numerics::{Grid, SampledSignal, C64};
