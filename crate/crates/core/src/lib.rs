//! Simulation library for hardware-level video compression with event
//! cameras.
//!
//! Two schemes are modeled over grayscale video. A standalone event camera
//! (SAEC) watches the scene directly: per-pixel events fire whenever log
//! intensity moves by a threshold, and the decoder integrates them back into
//! frames. Optically passive vision compression (OPVC) points the same event
//! camera at the cosine transform of the scene instead; the transform is
//! emulated with an orthonormal 2D DCT plus a positive constant shift
//! standing in for the phase-recovery reference wave. Sweeping the threshold
//! yields rate-distortion curves (events per pixel per frame vs. MS-SSIM and
//! friends) for both schemes at multiple spatial resolutions.
//!
//! Module map:
//! - [`frame`]: frames, videos, downsampling, log-domain conversions
//! - [`y4m`] / [`pgm`]: raw video ingestion and emission
//! - [`transform`]: orthonormal DCT-II pair and the shift constant
//! - [`event`]: the event camera model and stream integration
//! - [`aer`]: bit-exact binary stream format with checksums
//! - [`metrics`]: MSE, PSNR, SSIM, MS-SSIM
//! - [`pipeline`]: end-to-end encode/decode for both schemes
//! - [`rd`]: threshold sweeps, aggregation, CSV/SVG emission
//! - [`fixtures`]: deterministic synthetic videos

pub mod aer;
pub mod error;
pub mod event;
pub mod fixtures;
pub mod frame;
pub mod metrics;
pub mod pgm;
pub mod pipeline;
pub mod rd;
pub mod transform;
pub mod y4m;

pub use error::{Error, Result};
pub use event::{AerStream, EventBatch, EventEntry, EventThreshold};
pub use frame::{Domain, Frame, LogPolicy, LogSource, Video, VideoMeta, INTENSITY_MAX};
pub use metrics::{MetricConfig, MetricKind};
pub use pipeline::Method;
pub use transform::ShiftConstant;
