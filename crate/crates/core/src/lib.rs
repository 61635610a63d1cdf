//! Structured control priors for conditional-diffusion low-light enhancement.
//!
//! The crate extracts four spatially aligned conditioning maps from a
//! low-light RGB image (refined illumination, reflectance, a shadow residual
//! and a color-invariant map), stacks them for a denoiser, and provides the
//! diffusion schedule, forward process, deterministic implicit sampler and
//! training-loss suite around a pluggable [`diffusion::Denoiser`].
//!
//! ```
//! use scem_core::{extract_priors, stack_condition, IllumParams, RgbImage, ShadowParams};
//!
//! let img = RgbImage::filled(16, 16, [0.05, 0.08, 0.04]);
//! let bundle = extract_priors(&img, &IllumParams::default(), &ShadowParams::default()).unwrap();
//! let stack = stack_condition(&bundle).unwrap();
//! assert_eq!(stack.channel_count(), 13);
//! ```

pub mod chroma;
pub mod diffusion;
pub mod error;
pub mod illum;
pub mod imgcore;
pub mod losses;
pub mod scem;
pub mod shadow;

pub use chroma::{color_invariance, ChromaMap};
pub use diffusion::{Denoiser, NoiseSchedule, SamplerConfig};
pub use error::{Result, ScemError};
pub use illum::{extract_illumination, IllumParams};
pub use imgcore::{ComplexPlane, Kernel, Plane, RgbImage};
pub use losses::{LossReport, LossWeights};
pub use scem::{extract_priors, stack_condition, stack_condition_with, ConditionStack, PriorBundle, StackLayout};
pub use shadow::{extract_shadow, ShadowDecomposition, ShadowParams};
