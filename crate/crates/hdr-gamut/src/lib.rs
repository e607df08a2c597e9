//! HDR gamut and tone management.
//!
//! This crate turns HDR images in linear XYZ into display-referred output
//! that is guaranteed to lie inside a target RGB gamut while preserving hue.
//! The stages, each usable on its own:
//!
//! - [`tone`]: luminance compression — the global photographic operator, or
//!   cusp-aligned lightness compression working directly in LCh.
//! - [`gamut`]: per-hue gamut boundary descriptors (triangular cusp model)
//!   for the target display and for image content.
//! - [`chroma`]: content-adaptive chroma compression, either per hue slice
//!   or with a single global cusp-ratio scale.
//! - [`clip`]: final clipping of residual out-of-gamut pixels with a
//!   chroma/lightness trade-off.
//! - [`metrics`]: circular hue-difference measurement in cylindrical IPT.
//! - [`pipeline`]: the full workflow plus diagnostics, as used by the
//!   `hdr-gamut` binary.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod chroma;
pub mod clip;
pub mod codec;
pub mod colorspace;
pub mod error;
pub mod gamut;
pub mod imaging;
pub mod metrics;
pub mod pipeline;
pub mod synth;
pub mod tone;

pub use error::{Error, Result};
