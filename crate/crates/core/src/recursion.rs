//! The recursive render driver: seed a neutral buffer, reassign every
//! pixel's ray from the previous pass's data, trace, and iterate.

use rayon::prelude::*;

use crate::displacement::DisplacementMapping;
use crate::error::RenderError;
use crate::imaging::{sample_bilinear, ColorRgb, FrameBuffer, GBufferSample, TexCoord};
use crate::math::Vec3;
use crate::rng::jitter;
use crate::scene::{trace, Camera, Ray, Scene};

/// Rays whose displaced endpoints collapse onto the eye fall back to the
/// undisplaced pinhole ray.
const DEGENERATE_RAY_EPS: f64 = 1e-9;

/// Whether a walk-through reseeds the recursion each frame or feeds the
/// previous frame's final buffer into the next frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemporalMode {
    Restart,
    Carry,
}

/// Parameters of the recursive render.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionConfig {
    /// Render passes per displayed frame; at least 1.
    pub iterations: u32,
    /// Jittered sub-pixel samples per pixel; the first is always the center.
    pub samples_per_pixel: u32,
    pub rng_seed: u64,
    /// Drives the film-point displacement V_p.
    pub pixel_mapping: DisplacementMapping,
    /// Drives the eye displacement V_e; Null keeps the eye fixed.
    pub eye_mapping: DisplacementMapping,
    pub temporal_mode: TemporalMode,
}

impl RecursionConfig {
    /// Single-sample recursion with a fixed eye, the common configuration.
    pub fn with_pixel_mapping(iterations: u32, rng_seed: u64, pixel_mapping: DisplacementMapping) -> RecursionConfig {
        RecursionConfig {
            iterations,
            samples_per_pixel: 1,
            rng_seed,
            pixel_mapping,
            eye_mapping: DisplacementMapping::Null,
            temporal_mode: TemporalMode::Restart,
        }
    }
}

/// The neutral start buffer I_0: mid-gray color, the mapping's in-focus
/// depth, and the camera forward as normal. Every built-in mapping displaces
/// this by exactly zero, so the first pass is a conventional render.
pub fn seed_buffer(
    width: usize,
    height: usize,
    mapping: &DisplacementMapping,
    camera: &Camera,
) -> Result<FrameBuffer, RenderError> {
    if width < 1 || height < 1 {
        return Err(RenderError::InvalidDimensions { width, height });
    }
    let fill = GBufferSample::new(
        ColorRgb::GRAY,
        mapping.seed_depth(),
        camera.forward,
        0,
        Vec3::ZERO,
    );
    Ok(FrameBuffer::filled(width, height, fill))
}

/// Build the per-pixel camera ray for `uv` from the previous sample there:
/// the eye and the film point each move by their mapping's displacement.
pub fn reassign_ray(
    camera: &Camera,
    uv: TexCoord,
    prev: &GBufferSample,
    pixel_mapping: &DisplacementMapping,
    eye_mapping: &DisplacementMapping,
) -> Ray {
    let eye = camera.eye + eye_mapping.eval(prev, camera, uv);
    let film = camera.film_point(uv) + pixel_mapping.eval(prev, camera, uv);
    let dir = film - eye;
    let len = dir.length();
    if len < DEGENERATE_RAY_EPS {
        return camera.primary_ray(uv);
    }
    Ray::new(eye, dir / len)
}

fn render_pixel(
    scene: &Scene,
    camera: &Camera,
    prev: &FrameBuffer,
    cfg: &RecursionConfig,
    pass_index: u32,
    px: usize,
    py: usize,
) -> GBufferSample {
    let (w, h) = (prev.width(), prev.height());
    let loops = cfg.pixel_mapping.loops();
    let mut acc = [0.0f64; 3];
    let mut first: Option<GBufferSample> = None;

    for s in 0..cfg.samples_per_pixel {
        let (xi_u, xi_v) = if s == 0 {
            (0.5, 0.5)
        } else {
            jitter(cfg.rng_seed, pass_index, px, py, s)
        };
        let uv = TexCoord::new((px as f64 + xi_u) / w as f64, (py as f64 + xi_v) / h as f64);

        let mut sample = sample_bilinear(prev, uv);
        for _ in 0..loops {
            let ray = reassign_ray(camera, uv, &sample, &cfg.pixel_mapping, &cfg.eye_mapping);
            sample = trace(scene, &ray);
        }

        let ch = sample.color.channels();
        acc[0] += ch[0];
        acc[1] += ch[1];
        acc[2] += ch[2];
        if s == 0 {
            first = Some(sample);
        }
    }

    let n = cfg.samples_per_pixel as f64;
    let first = first.expect("samples_per_pixel >= 1");
    GBufferSample {
        color: ColorRgb::new(acc[0] / n, acc[1] / n, acc[2] / n),
        ..first
    }
}

/// One full pass: every pixel's ray is reassigned from `prev` and traced.
/// Output dimensions equal `prev`'s; the camera film must match their aspect.
pub fn render_pass(
    scene: &Scene,
    camera: &Camera,
    prev: &FrameBuffer,
    cfg: &RecursionConfig,
    pass_index: u32,
) -> Result<FrameBuffer, RenderError> {
    assert!(cfg.samples_per_pixel >= 1, "samples_per_pixel must be at least 1");
    let (w, h) = (prev.width(), prev.height());
    let buffer_aspect = w as f64 / h as f64;
    if (camera.aspect() - buffer_aspect).abs() > 1e-6 {
        return Err(RenderError::DimensionMismatch(format!(
            "camera film aspect {:.6} does not match buffer aspect {:.6} ({}x{})",
            camera.aspect(),
            buffer_aspect,
            w,
            h
        )));
    }

    let placeholder = GBufferSample::new(ColorRgb::BLACK, 0.0, camera.forward, 0, Vec3::ZERO);
    let mut samples = vec![placeholder; w * h];
    samples
        .par_chunks_mut(w)
        .enumerate()
        .for_each(|(py, row)| {
            for (px, out) in row.iter_mut().enumerate() {
                *out = render_pixel(scene, camera, prev, cfg, pass_index, px, py);
            }
        });

    Ok(FrameBuffer::from_samples(w, h, samples))
}

/// Run the full recursion for one frame and keep every intermediate buffer:
/// returns [I_0, I_1, ..., I_iterations].
pub fn render_recursive(
    scene: &Scene,
    camera: &Camera,
    width: usize,
    height: usize,
    cfg: &RecursionConfig,
) -> Result<Vec<FrameBuffer>, RenderError> {
    assert!(cfg.iterations >= 1, "iterations must be at least 1");
    let mut buffers = Vec::with_capacity(cfg.iterations as usize + 1);
    buffers.push(seed_buffer(width, height, &cfg.pixel_mapping, camera)?);
    for n in 1..=cfg.iterations {
        let next = render_pass(scene, camera, buffers.last().unwrap(), cfg, n)?;
        buffers.push(next);
    }
    Ok(buffers)
}

/// Render a camera walk-through, returning each frame's final buffer.
///
/// In `Restart` mode every frame reseeds the recursion; in `Carry` mode each
/// frame starts from the previous frame's final buffer (the first frame in
/// the range is seeded normally).
pub fn render_walkthrough(
    scene: &Scene,
    width: usize,
    height: usize,
    cfg: &RecursionConfig,
    frames: &[u32],
) -> Result<Vec<FrameBuffer>, RenderError> {
    assert!(cfg.iterations >= 1, "iterations must be at least 1");
    if scene.camera_path.is_empty() {
        return Err(RenderError::InvalidScene("camera path is empty".into()));
    }

    let mut finals = Vec::with_capacity(frames.len());
    let mut carried: Option<FrameBuffer> = None;
    for &frame in frames {
        let camera = scene.camera_at(frame as f64)?;
        let mut current = match (cfg.temporal_mode, carried.take()) {
            (TemporalMode::Carry, Some(prev_final)) => prev_final,
            _ => seed_buffer(width, height, &cfg.pixel_mapping, &camera)?,
        };
        for n in 1..=cfg.iterations {
            current = render_pass(scene, &camera, &current, cfg, n)?;
        }
        if cfg.temporal_mode == TemporalMode::Carry {
            carried = Some(current.clone());
        }
        finals.push(current);
    }
    Ok(finals)
}
