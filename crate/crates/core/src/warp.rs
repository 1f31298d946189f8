//! Screen-space warp mode: with a fixed eye the recursion reduces to
//! re-sampling the image at color-displaced coordinates. Off-screen
//! coordinates are folded back by a boundary strategy so every fetch stays
//! inside the image.

use rayon::prelude::*;

use crate::imaging::{sample_bilinear, FrameBuffer, GBufferSample, TexCoord};

/// What happens to a displaced coordinate that leaves [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeMode {
    /// Pin to the nearest edge; cheap but smears bars of edge color.
    Clamp,
    /// Wrap to the opposite edge; visible border when edges differ.
    Wrap,
    /// Reflect back inside; keeps fetches near their origin.
    Mirror,
}

/// Screen-space warp parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpParams {
    /// Largest displacement, in pixels, that an extreme channel produces.
    pub max_smudge_px: f64,
    pub edge_mode: EdgeMode,
    /// Scale the displacement by |depth - z0| as in the depth-focus mapping.
    pub use_depth: bool,
    pub z0: f64,
    pub depth_clamp: f64,
    pub iterations: u32,
}

impl WarpParams {
    pub fn new(max_smudge_px: f64, edge_mode: EdgeMode, iterations: u32) -> WarpParams {
        assert!(max_smudge_px >= 0.0, "max_smudge_px must be non-negative");
        assert!(iterations >= 1, "iterations must be at least 1");
        WarpParams {
            max_smudge_px,
            edge_mode,
            use_depth: false,
            z0: 0.0,
            depth_clamp: f64::INFINITY,
            iterations,
        }
    }

    pub fn with_depth(mut self, z0: f64, depth_clamp: f64) -> WarpParams {
        assert!(depth_clamp > z0, "depth_clamp must exceed z0");
        self.use_depth = true;
        self.z0 = z0;
        self.depth_clamp = depth_clamp;
        self
    }
}

/// Fold an arbitrary finite coordinate into [0, 1] with the given strategy.
pub fn boundary_resolve(x: f64, mode: EdgeMode) -> f64 {
    match mode {
        EdgeMode::Clamp => x.clamp(0.0, 1.0),
        EdgeMode::Wrap => {
            let f = x - x.floor();
            // x - floor(x) can round up to exactly 1.0 for tiny negatives.
            if f == 1.0 {
                0.0
            } else {
                f
            }
        }
        EdgeMode::Mirror => {
            let p = x - 2.0 * (x / 2.0).floor();
            if p <= 1.0 {
                p
            } else {
                2.0 - p
            }
        }
    }
}

/// Displacement in texture coordinates for one sample: red and green are
/// centered so mid-gray is motionless, green is negated so G = 1 pulls
/// content from above (moves it upward on screen), and blue is ignored.
pub fn warp_delta(sample: &GBufferSample, params: &WarpParams, width: usize, height: usize) -> (f64, f64) {
    let [r, g, _] = sample.color.channels();
    let base = (2.0 * r - 1.0, -(2.0 * g - 1.0));
    let mut scale = params.max_smudge_px;
    if params.use_depth {
        scale *= (sample.depth.min(params.depth_clamp) - params.z0).abs();
    }
    (base.0 * scale / width as f64, base.1 * scale / height as f64)
}

/// The coordinate a pixel fetches from: its own center pushed by the sample's
/// delta and folded back on screen. Always lands in [0, 1]^2.
pub fn fetch_coord(
    sample: &GBufferSample,
    params: &WarpParams,
    width: usize,
    height: usize,
    uv: TexCoord,
) -> TexCoord {
    let (du, dv) = warp_delta(sample, params, width, height);
    TexCoord::new(
        boundary_resolve(uv.u + du, params.edge_mode),
        boundary_resolve(uv.v + dv, params.edge_mode),
    )
}

/// One warp pass: every output pixel bilinearly fetches the input at its
/// displaced coordinate; auxiliary channels come from the nearest fetched
/// pixel.
pub fn warp_pass(input: &FrameBuffer, params: &WarpParams) -> FrameBuffer {
    let (w, h) = (input.width(), input.height());
    let placeholder = *input.get(0, 0);
    let mut samples = vec![placeholder; w * h];
    samples
        .par_chunks_mut(w)
        .enumerate()
        .for_each(|(py, row)| {
            for (px, out) in row.iter_mut().enumerate() {
                let uv = input.pixel_center(px, py);
                let here = input.get(px, py);
                let fetched = fetch_coord(here, params, w, h, uv);
                *out = sample_bilinear(input, fetched);
            }
        });
    FrameBuffer::from_samples(w, h, samples)
}

/// Apply the warp `params.iterations` times, keeping every stage:
/// returns [J_0 = input, J_1, ..., J_iterations].
pub fn warp_recursive(input: &FrameBuffer, params: &WarpParams) -> Vec<FrameBuffer> {
    assert!(params.iterations >= 1, "iterations must be at least 1");
    let mut buffers = Vec::with_capacity(params.iterations as usize + 1);
    buffers.push(input.clone());
    for _ in 0..params.iterations {
        buffers.push(warp_pass(buffers.last().unwrap(), params));
    }
    buffers
}
