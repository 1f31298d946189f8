//! Image file I/O: 8-bit sRGB PNG for color, 32-bit float PFM for the
//! depth and normal channels.

use std::fs;
use std::io::Write;
use std::path::Path;

use camerapaint::{ColorImage, ColorRgb, FrameBuffer};

use crate::error::CliError;

/// Linear [0,1] to the sRGB transfer curve.
pub fn srgb_encode(c: f64) -> f64 {
    if c <= 0.003_130_8 {
        12.92 * c
    } else {
        1.055 * c.powf(1.0 / 2.4) - 0.055
    }
}

/// sRGB to linear [0,1].
pub fn srgb_decode(c: f64) -> f64 {
    if c <= 0.040_45 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

fn quantize(c: f64) -> u8 {
    (srgb_encode(c) * 255.0).round().clamp(0.0, 255.0) as u8
}

/// Write a frame buffer's color plane as an 8-bit sRGB PNG.
pub fn write_png(path: &Path, fb: &FrameBuffer) -> Result<(), CliError> {
    let (w, h) = (fb.width(), fb.height());
    let mut img = image::RgbImage::new(w as u32, h as u32);
    for y in 0..h {
        for x in 0..w {
            let [r, g, b] = fb.get(x, y).color.channels();
            img.put_pixel(x as u32, y as u32, image::Rgb([quantize(r), quantize(g), quantize(b)]));
        }
    }
    img.save(path).map_err(|e| png_error(path, e))
}

/// Write a bare color image (e.g. the example environment texture) as PNG.
pub fn write_color_image_png(path: &Path, img: &ColorImage) -> Result<(), CliError> {
    let mut out = image::RgbImage::new(img.width() as u32, img.height() as u32);
    for y in 0..img.height() {
        for x in 0..img.width() {
            let [r, g, b] = img.get(x, y).channels();
            out.put_pixel(x as u32, y as u32, image::Rgb([quantize(r), quantize(g), quantize(b)]));
        }
    }
    out.save(path).map_err(|e| png_error(path, e))
}

fn png_error(path: &Path, e: image::ImageError) -> CliError {
    match e {
        image::ImageError::IoError(io) => CliError::io(path, io),
        other => CliError::io(path, std::io::Error::other(other.to_string())),
    }
}

/// Read a PNG (or any format the image crate recognizes) into linear color.
pub fn read_png(path: &Path) -> Result<ColorImage, CliError> {
    let img = image::open(path).map_err(|e| png_error(path, e))?.into_rgb8();
    let (w, h) = img.dimensions();
    let mut texels = Vec::with_capacity((w * h) as usize);
    for y in 0..h {
        for x in 0..w {
            let p = img.get_pixel(x, y).0;
            texels.push(ColorRgb::new(
                srgb_decode(p[0] as f64 / 255.0),
                srgb_decode(p[1] as f64 / 255.0),
                srgb_decode(p[2] as f64 / 255.0),
            ));
        }
    }
    Ok(ColorImage::new(w as usize, h as usize, texels))
}

/// PFM scanlines run bottom to top; a negative scale marks little-endian.
fn write_pfm(path: &Path, header: &str, w: usize, h: usize, rows: impl Fn(usize, &mut Vec<f32>)) -> Result<(), CliError> {
    let mut data: Vec<u8> = format!("{header}\n{w} {h}\n-1.0\n").into_bytes();
    let mut row = Vec::new();
    for y in (0..h).rev() {
        row.clear();
        rows(y, &mut row);
        for v in &row {
            data.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    file.write_all(&data).map_err(|e| CliError::io(path, e))
}

/// Write the depth plane as a grayscale PFM (`Pf`). Environment hits carry
/// +infinity, which PFM's raw IEEE floats represent directly.
pub fn write_depth_pfm(path: &Path, fb: &FrameBuffer) -> Result<(), CliError> {
    write_pfm(path, "Pf", fb.width(), fb.height(), |y, row| {
        for x in 0..fb.width() {
            row.push(fb.get(x, y).depth as f32);
        }
    })
}

/// Write the world-space normals as a color PFM (`PF`).
pub fn write_normal_pfm(path: &Path, fb: &FrameBuffer) -> Result<(), CliError> {
    write_pfm(path, "PF", fb.width(), fb.height(), |y, row| {
        for x in 0..fb.width() {
            let n = fb.get(x, y).normal;
            row.push(n.x as f32);
            row.push(n.y as f32);
            row.push(n.z as f32);
        }
    })
}
