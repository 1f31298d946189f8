//! Recursive camera painting.
//!
//! Each pixel of a frame is rendered by its own camera, and that camera is
//! re-derived from what the previous pass rendered there: colors, depth or
//! normals become displacement vectors for the film point (and optionally the
//! eye). Iterating the process smudges extreme colors into painterly strokes
//! while neutral regions stay put.
//!
//! Two modes share the same buffers:
//!
//! * [`recursion`] re-traces the scene with displaced rays every pass;
//! * [`warp`] keeps the eye fixed and re-samples the rendered image at
//!   displaced coordinates, no ray tracing required.
//!
//! All randomness is counter-based (see [`rng`]), so output is bit-identical
//! across runs and across any number of worker threads.

pub mod displacement;
pub mod error;
pub mod fixtures;
pub mod imaging;
pub mod math;
pub mod recursion;
pub mod rng;
pub mod scene;
pub mod warp;

pub use displacement::DisplacementMapping;
pub use error::RenderError;
pub use imaging::{sample_bilinear, ColorImage, ColorRgb, FrameBuffer, GBufferSample, TexCoord};
pub use math::{Mat3, Vec3};
pub use recursion::{
    reassign_ray, render_pass, render_recursive, render_walkthrough, seed_buffer, RecursionConfig,
    TemporalMode,
};
pub use scene::{
    equirect_lookup, trace, Camera, CameraKeyframe, DirectionalLight, Material, Primitive, Ray,
    Scene, Sphere, TriangleMesh,
};
pub use warp::{boundary_resolve, warp_delta, warp_pass, warp_recursive, EdgeMode, WarpParams};
