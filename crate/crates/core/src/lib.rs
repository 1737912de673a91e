//! Bottom-up visual saliency for small-target search in a wide-field image,
//! and the cooperative steering of a narrow-field camera toward what it finds.
//!
//! The crate is organised as the processing chain runs:
//!
//! - [`saliency`]: intensity / colour / orientation pyramids, center-surround
//!   feature maps, map normalization and fusion into a single saliency map.
//! - [`localizer`]: salient point and salient region extraction.
//! - [`gimbal`]: 6×6 field-of-view partition, pointing geometry, PWM encoding
//!   and a servo dynamics model.
//! - [`sim`]: a pinhole renderer of a planar scene for both cameras and the
//!   closed detect-and-steer loop.
//! - [`commands`]: the `saliency`, `simulate` and `selftest` entry points used
//!   by the `eagle-eye` binary.
//!
//! [`reference`] holds a deliberately naive, loop-by-loop implementation of
//! the saliency chain used as an oracle by the self test and test suites.

pub mod commands;
pub mod config;
pub mod error;
pub mod filter;
pub mod gimbal;
pub mod image;
pub mod localizer;
pub mod netpbm;
pub mod reference;
pub mod saliency;
pub mod sim;

pub use error::{Error, Result};
