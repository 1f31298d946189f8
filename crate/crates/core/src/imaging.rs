//! Image buffers, per-sample render records, and sub-pixel sampling.
//!
//! Both render modes read and write the same buffer type: every pixel stores
//! color plus the auxiliary data (depth, normal, object id, hit position) that
//! the displacement mappings consume on the next pass.

use crate::math::Vec3;

/// Low-dynamic-range color. Channels are clamped to [0, 1] at construction,
/// so a stored color can never leave the unit cube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorRgb {
    r: f64,
    g: f64,
    b: f64,
}

impl ColorRgb {
    pub const BLACK: ColorRgb = ColorRgb { r: 0.0, g: 0.0, b: 0.0 };
    pub const WHITE: ColorRgb = ColorRgb { r: 1.0, g: 1.0, b: 1.0 };
    /// Mid-gray, the neutral color under the color displacement mapping.
    pub const GRAY: ColorRgb = ColorRgb { r: 0.5, g: 0.5, b: 0.5 };

    /// Clamp-on-store: out-of-range channels are clipped to [0, 1].
    pub fn new(r: f64, g: f64, b: f64) -> ColorRgb {
        ColorRgb {
            r: r.clamp(0.0, 1.0),
            g: g.clamp(0.0, 1.0),
            b: b.clamp(0.0, 1.0),
        }
    }

    pub fn r(self) -> f64 {
        self.r
    }

    pub fn g(self) -> f64 {
        self.g
    }

    pub fn b(self) -> f64 {
        self.b
    }

    pub fn channels(self) -> [f64; 3] {
        [self.r, self.g, self.b]
    }

    /// Per-channel modulation (e.g. albedo times irradiance).
    pub fn modulate(self, other: ColorRgb) -> ColorRgb {
        ColorRgb::new(self.r * other.r, self.g * other.g, self.b * other.b)
    }

    pub fn scaled(self, s: f64) -> ColorRgb {
        ColorRgb::new(self.r * s, self.g * s, self.b * s)
    }
}

/// Continuous texture coordinates over the image, both components in [0, 1].
/// v grows downward: v = 0 is the top row of the image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TexCoord {
    pub u: f64,
    pub v: f64,
}

impl TexCoord {
    /// Out-of-range coordinates are a caller bug; they must be run through a
    /// boundary strategy (see the warp module) before reaching a sampler.
    pub fn new(u: f64, v: f64) -> TexCoord {
        assert!(
            (0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v),
            "texture coordinate ({u}, {v}) outside [0,1]^2"
        );
        TexCoord { u, v }
    }
}

/// Everything one render sample records: color plus the data later passes
/// derive cameras from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GBufferSample {
    pub color: ColorRgb,
    /// Euclidean distance from the ray origin; +infinity for environment hits.
    pub depth: f64,
    /// World-space unit normal (the negated ray direction on environment hits).
    pub normal: Vec3,
    /// 0 is reserved for the environment; primitives count from 1.
    pub object_id: u32,
    /// World-space hit point; meaningless when depth is infinite.
    pub position: Vec3,
}

impl GBufferSample {
    pub fn new(color: ColorRgb, depth: f64, normal: Vec3, object_id: u32, position: Vec3) -> GBufferSample {
        debug_assert!(depth >= 0.0, "negative depth");
        debug_assert!(
            !depth.is_finite() || normal.is_unit(1e-6),
            "non-unit normal on a finite-depth sample"
        );
        GBufferSample { color, depth, normal, object_id, position }
    }
}

/// Row-major W x H grid of samples; one buffer per recursion iteration.
/// Immutable once a pass completes, so workers may read it concurrently.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameBuffer {
    width: usize,
    height: usize,
    samples: Vec<GBufferSample>,
}

impl FrameBuffer {
    /// Buffer of `width * height` copies of `fill`. Zero dimensions are a bug.
    pub fn filled(width: usize, height: usize, fill: GBufferSample) -> FrameBuffer {
        assert!(width >= 1 && height >= 1, "frame buffer dimensions must be >= 1");
        FrameBuffer {
            width,
            height,
            samples: vec![fill; width * height],
        }
    }

    /// Wrap an existing row-major sample grid.
    pub fn from_samples(width: usize, height: usize, samples: Vec<GBufferSample>) -> FrameBuffer {
        assert!(width >= 1 && height >= 1, "frame buffer dimensions must be >= 1");
        assert_eq!(samples.len(), width * height, "sample grid size mismatch");
        FrameBuffer { width, height, samples }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> &GBufferSample {
        &self.samples[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, sample: GBufferSample) {
        self.samples[y * self.width + x] = sample;
    }

    pub fn samples(&self) -> &[GBufferSample] {
        &self.samples
    }

    pub fn rows_mut(&mut self) -> std::slice::ChunksMut<'_, GBufferSample> {
        let w = self.width;
        self.samples.chunks_mut(w)
    }

    /// Canonical continuous coordinate of pixel (x, y)'s center.
    pub fn pixel_center(&self, x: usize, y: usize) -> TexCoord {
        debug_assert!(x < self.width && y < self.height);
        TexCoord {
            u: pixel_center_coord(x, self.width),
            v: pixel_center_coord(y, self.height),
        }
    }

    /// Mean absolute per-channel color difference against another buffer of
    /// the same dimensions.
    pub fn mean_abs_color_diff(&self, other: &FrameBuffer) -> f64 {
        assert_eq!((self.width, self.height), (other.width, other.height));
        let mut acc = 0.0;
        for (a, b) in self.samples.iter().zip(&other.samples) {
            let ca = a.color.channels();
            let cb = b.color.channels();
            acc += (ca[0] - cb[0]).abs() + (ca[1] - cb[1]).abs() + (ca[2] - cb[2]).abs();
        }
        acc / (3 * self.samples.len()) as f64
    }
}

/// Center of pixel `i` along an axis of `n` pixels, as a [0,1] coordinate.
pub fn pixel_center_coord(i: usize, n: usize) -> f64 {
    (i as f64 + 0.5) / n as f64
}

/// One axis of a bilinear tap: the two neighbor indices and the blend weight
/// toward the second one.
#[derive(Debug, Clone, Copy)]
pub(crate) struct AxisTap {
    pub lo: usize,
    pub hi: usize,
    /// Blend weight of `hi`; `lo` gets 1 - frac.
    pub frac: f64,
}

/// Neighbor pixels of continuous coordinate `t` in [0,1], clamping at the
/// border (used by frame buffers and the vertical axis of environment maps).
pub(crate) fn axis_tap_clamped(t: f64, n: usize) -> AxisTap {
    let x = t * n as f64 - 0.5;
    let floor = x.floor();
    let lo = (floor.max(0.0) as usize).min(n - 1);
    let hi = ((floor + 1.0).max(0.0) as usize).min(n - 1);
    AxisTap { lo, hi, frac: x - floor }
}

/// Neighbor pixels of continuous coordinate `t`, wrapping around (used by the
/// horizontal axis of equirectangular environment maps).
pub(crate) fn axis_tap_wrapped(t: f64, n: usize) -> AxisTap {
    let x = t * n as f64 - 0.5;
    let floor = x.floor();
    let wrap = |i: i64| i.rem_euclid(n as i64) as usize;
    AxisTap {
        lo: wrap(floor as i64),
        hi: wrap(floor as i64 + 1),
        frac: x - floor,
    }
}

fn blend_color(c00: ColorRgb, c10: ColorRgb, c01: ColorRgb, c11: ColorRgb, fx: f64, fy: f64) -> ColorRgb {
    let lerp = |a: f64, b: f64, t: f64| (1.0 - t) * a + t * b;
    // Interpolation introduces no new extrema: the blend is clamped into the
    // neighbor range, which also makes constant regions exact bit for bit.
    let ch = |sel: fn(ColorRgb) -> f64| {
        let (a, b, c, d) = (sel(c00), sel(c10), sel(c01), sel(c11));
        let blended = lerp(lerp(a, b, fx), lerp(c, d, fx), fy);
        blended.clamp(a.min(b).min(c).min(d), a.max(b).max(c).max(d))
    };
    ColorRgb::new(ch(ColorRgb::r), ch(ColorRgb::g), ch(ColorRgb::b))
}

/// Continuous lookup into a frame buffer.
///
/// Color is bilinearly interpolated between the four nearest pixel centers;
/// depth, normal, object id and position come from the single nearest center
/// (ties break toward the lower index). A coordinate that is exactly a pixel
/// center returns that pixel's sample unchanged, bit for bit.
pub fn sample_bilinear(fb: &FrameBuffer, uv: TexCoord) -> GBufferSample {
    assert!(
        (0.0..=1.0).contains(&uv.u) && (0.0..=1.0).contains(&uv.v),
        "sample_bilinear called with out-of-range uv ({}, {})",
        uv.u,
        uv.v
    );
    let (w, h) = (fb.width, fb.height);

    // Exact pixel centers bypass interpolation entirely. The candidate index
    // is recomputed through the same expression that produced the center, so
    // the comparison is exact rather than epsilon-based.
    let cx = (uv.u * w as f64 - 0.5).round();
    let cy = (uv.v * h as f64 - 0.5).round();
    if (0.0..w as f64).contains(&cx) && (0.0..h as f64).contains(&cy) {
        let (ix, iy) = (cx as usize, cy as usize);
        if pixel_center_coord(ix, w) == uv.u && pixel_center_coord(iy, h) == uv.v {
            return *fb.get(ix, iy);
        }
    }

    let tx = axis_tap_clamped(uv.u, w);
    let ty = axis_tap_clamped(uv.v, h);

    let color = blend_color(
        fb.get(tx.lo, ty.lo).color,
        fb.get(tx.hi, ty.lo).color,
        fb.get(tx.lo, ty.hi).color,
        fb.get(tx.hi, ty.hi).color,
        tx.frac,
        ty.frac,
    );

    // Nearest center for the auxiliary channels; a frac of exactly 0.5 is a
    // tie and goes to the lower index.
    let nx = if tx.frac <= 0.5 { tx.lo } else { tx.hi };
    let ny = if ty.frac <= 0.5 { ty.lo } else { ty.hi };
    let near = fb.get(nx, ny);

    GBufferSample {
        color,
        depth: near.depth,
        normal: near.normal,
        object_id: near.object_id,
        position: near.position,
    }
}

/// Plain color image (environment maps, sphere textures, decoded input files).
#[derive(Debug, Clone, PartialEq)]
pub struct ColorImage {
    width: usize,
    height: usize,
    texels: Vec<ColorRgb>,
}

impl ColorImage {
    pub fn new(width: usize, height: usize, texels: Vec<ColorRgb>) -> ColorImage {
        assert!(width >= 1 && height >= 1, "image dimensions must be >= 1");
        assert_eq!(texels.len(), width * height, "texel grid size mismatch");
        ColorImage { width, height, texels }
    }

    pub fn constant(width: usize, height: usize, color: ColorRgb) -> ColorImage {
        ColorImage::new(width, height, vec![color; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> ColorRgb) -> ColorImage {
        let mut texels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                texels.push(f(x, y));
            }
        }
        ColorImage::new(width, height, texels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> ColorRgb {
        self.texels[y * self.width + x]
    }

    /// Bilinear lookup with horizontal wrap and vertical clamp, the
    /// addressing an equirectangular sphere texture needs.
    pub fn sample_wrapped(&self, u: f64, v: f64) -> ColorRgb {
        let tx = axis_tap_wrapped(u, self.width);
        let ty = axis_tap_clamped(v.clamp(0.0, 1.0), self.height);
        blend_color(
            self.get(tx.lo, ty.lo),
            self.get(tx.hi, ty.lo),
            self.get(tx.lo, ty.hi),
            self.get(tx.hi, ty.hi),
            tx.frac,
            ty.frac,
        )
    }
}
