//! Displacement mappings: turn the previous pass's sample at (u, v) into a
//! world-space offset for the film point (and optionally the eye).

use crate::imaging::{ColorRgb, GBufferSample, TexCoord};
use crate::math::{Mat3, Vec3};
use crate::rng::hash_unit_box;
use crate::scene::Camera;

/// How a previously rendered sample displaces the per-pixel camera.
///
/// `AffineColor` and `DepthFocus` produce camera-local vectors that are
/// rotated into world space by the camera basis; `NormalTangent` already
/// works in world space because both of its inputs do.
#[derive(Debug, Clone, PartialEq)]
pub enum DisplacementMapping {
    /// General affine map of the color channels: M * (r, g, b) + bias.
    AffineColor { matrix: Mat3, bias: Vec3 },
    /// Color displacement scaled by distance from the in-focus depth z0.
    DepthFocus {
        lambda: f64,
        z0: f64,
        /// Finite stand-in for infinite (environment) depth.
        depth_clamp: f64,
    },
    /// Tangent displacement from the camera-direction x surface-normal cross
    /// product, with optional deterministic noise. `loops` asks the recursion
    /// engine to re-apply the reassign/trace step that many times per pass.
    NormalTangent {
        lambda: f64,
        loops: u32,
        noise_amplitude: f64,
        noise_seed: u64,
    },
    /// No displacement.
    Null,
}

impl DisplacementMapping {
    /// The canonical color map: lambda * (2c - 1) per channel, i.e.
    /// M = 2*lambda*I and bias = (-lambda, -lambda, -lambda). Mid-gray maps
    /// to zero, so average colors do not move the rays.
    pub fn color(lambda: f64) -> DisplacementMapping {
        assert!(lambda > 0.0, "lambda must be positive");
        DisplacementMapping::AffineColor {
            matrix: Mat3::diagonal(2.0 * lambda),
            bias: Vec3::new(-lambda, -lambda, -lambda),
        }
    }

    pub fn depth_focus(lambda: f64, z0: f64, depth_clamp: f64) -> DisplacementMapping {
        assert!(lambda > 0.0, "lambda must be positive");
        assert!(z0 >= 0.0, "z0 must be non-negative");
        assert!(depth_clamp > z0, "depth_clamp must exceed z0");
        DisplacementMapping::DepthFocus { lambda, z0, depth_clamp }
    }

    pub fn normal_tangent(lambda: f64, loops: u32, noise_amplitude: f64, noise_seed: u64) -> DisplacementMapping {
        assert!(lambda > 0.0, "lambda must be positive");
        assert!(loops >= 1, "loops must be at least 1");
        assert!(noise_amplitude >= 0.0, "noise amplitude must be non-negative");
        DisplacementMapping::NormalTangent { lambda, loops, noise_amplitude, noise_seed }
    }

    /// How many reassign/trace applications the recursion engine runs per
    /// pass for this mapping.
    pub fn loops(&self) -> u32 {
        match self {
            DisplacementMapping::NormalTangent { loops, .. } => *loops,
            _ => 1,
        }
    }

    /// In-focus depth to seed buffers with, so the first pass sees zero
    /// displacement.
    pub fn seed_depth(&self) -> f64 {
        match self {
            DisplacementMapping::DepthFocus { z0, .. } => *z0,
            _ => 0.0,
        }
    }

    /// World-space displacement for the sample previously rendered at `uv`.
    pub fn eval(&self, sample: &GBufferSample, camera: &Camera, uv: TexCoord) -> Vec3 {
        match self {
            DisplacementMapping::AffineColor { matrix, bias } => {
                camera.local_to_world(eval_color_affine(*matrix, *bias, sample.color))
            }
            DisplacementMapping::DepthFocus { lambda, z0, depth_clamp } => {
                camera.local_to_world(eval_depth_focus(*lambda, *z0, *depth_clamp, sample))
            }
            DisplacementMapping::NormalTangent { lambda, noise_amplitude, noise_seed, .. } => {
                eval_normal_tangent(*lambda, *noise_amplitude, *noise_seed, camera.forward, sample, uv)
            }
            DisplacementMapping::Null => Vec3::ZERO,
        }
    }
}

/// Camera-local displacement M * (r, g, b) + bias. Under the canonical color
/// map the result lies in (-lambda, lambda)^3 for channels in (0, 1).
pub fn eval_color_affine(matrix: Mat3, bias: Vec3, color: ColorRgb) -> Vec3 {
    let [r, g, b] = color.channels();
    matrix.mul_vec(Vec3::new(r, g, b)) + bias
}

/// Camera-local displacement lambda * |z' - z0| * (2c - 1), where z' is the
/// sample depth clamped to `depth_clamp` so environment hits stay finite.
pub fn eval_depth_focus(lambda: f64, z0: f64, depth_clamp: f64, sample: &GBufferSample) -> Vec3 {
    let z = sample.depth.min(depth_clamp);
    let scale = lambda * (z - z0).abs();
    let [r, g, b] = sample.color.channels();
    Vec3::new(
        scale * (2.0 * r - 1.0),
        scale * (2.0 * g - 1.0),
        scale * (2.0 * b - 1.0),
    )
}

/// World-space tangent displacement lambda * (camera_forward x normal), plus
/// hash noise in [-amplitude, amplitude]^3 when an amplitude is set. Both
/// operands are world vectors, so no basis change is applied.
pub fn eval_normal_tangent(
    lambda: f64,
    noise_amplitude: f64,
    noise_seed: u64,
    camera_forward: Vec3,
    sample: &GBufferSample,
    uv: TexCoord,
) -> Vec3 {
    let base = camera_forward.cross(sample.normal) * lambda;
    if noise_amplitude > 0.0 {
        let (nx, ny, nz) = hash_unit_box(uv.u, uv.v, noise_seed);
        base + Vec3::new(nx, ny, nz) * noise_amplitude
    } else {
        base
    }
}
