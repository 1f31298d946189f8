//! Flag definitions and their translation into a validated run
//! configuration.

use std::path::PathBuf;

use camerapaint::{
    DisplacementMapping, EdgeMode, Mat3, RecursionConfig, TemporalMode, Vec3, WarpParams,
};
use clap::{Parser, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Re-trace the scene with displaced rays every iteration.
    Ray,
    /// Re-sample the image at displaced coordinates (no tracing).
    Warp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MappingArg {
    /// lambda * (2c - 1) from the previous pass's color.
    Color,
    /// Color displacement scaled by |depth - z0|.
    Depth,
    /// Tangent displacement from camera direction x surface normal.
    Normal,
    /// No displacement.
    Null,
    /// General affine color map; supply --affine.
    Affine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EdgeModeArg {
    Clamp,
    Wrap,
    Mirror,
}

impl From<EdgeModeArg> for EdgeMode {
    fn from(a: EdgeModeArg) -> EdgeMode {
        match a {
            EdgeModeArg::Clamp => EdgeMode::Clamp,
            EdgeModeArg::Wrap => EdgeMode::Wrap,
            EdgeModeArg::Mirror => EdgeMode::Mirror,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TemporalArg {
    /// Reseed the recursion every frame.
    Restart,
    /// Feed each frame's final buffer into the next frame.
    Carry,
}

/// Recursive camera painting renderer.
#[derive(Parser, Debug)]
#[command(
    name = "render",
    version,
    about = "Paint scenes by recursively feeding rendered frames back into per-pixel cameras"
)]
pub struct Args {
    /// Scene description file (required in ray mode).
    #[arg(long)]
    pub scene: Option<PathBuf>,

    /// Input image to warp (warp mode without a scene).
    #[arg(long)]
    pub input: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = ModeArg::Ray)]
    pub mode: ModeArg,

    /// Output directory for frames.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,

    /// Render size as WIDTHxHEIGHT (warp-from-image defaults to the image size).
    #[arg(long)]
    pub size: Option<String>,

    /// Render passes per frame.
    #[arg(long, default_value_t = 6)]
    pub iterations: u32,

    /// Jittered samples per pixel (the first is always the pixel center).
    #[arg(long, default_value_t = 1)]
    pub spp: u32,

    /// Seed for the jitter streams.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Displacement of the per-pixel film point.
    #[arg(long, value_enum, default_value_t = MappingArg::Color)]
    pub mapping: MappingArg,

    /// Displacement of the eye point.
    #[arg(long = "eye-mapping", value_enum, default_value_t = MappingArg::Null)]
    pub eye_mapping: MappingArg,

    /// Displacement magnitude in world units.
    #[arg(long, default_value_t = 0.3)]
    pub lambda: f64,

    /// General affine color map: 12 comma-separated reals, the row-major 3x3
    /// matrix followed by the bias vector.
    #[arg(long)]
    pub affine: Option<String>,

    /// In-focus depth for the depth mapping (world units).
    #[arg(long, default_value_t = 5.0)]
    pub z0: f64,

    /// Finite stand-in for infinite (environment) depth.
    #[arg(long = "depth-clamp", default_value_t = 100.0)]
    pub depth_clamp: f64,

    /// Re-apply the reassign/trace step this many times per pass (normal mapping).
    #[arg(long, default_value_t = 1)]
    pub loops: u32,

    /// Amplitude of the deterministic hash noise (normal mapping).
    #[arg(long = "noise-amplitude", default_value_t = 0.0)]
    pub noise_amplitude: f64,

    #[arg(long = "noise-seed", default_value_t = 0)]
    pub noise_seed: u64,

    /// What happens to warp fetches that leave the screen.
    #[arg(long = "edge-mode", value_enum, default_value_t = EdgeModeArg::Mirror)]
    pub edge_mode: EdgeModeArg,

    /// Maximum warp displacement in pixels (default: lambda * min(w, h) / 10).
    #[arg(long = "max-smudge-px")]
    pub max_smudge_px: Option<f64>,

    /// Scale the warp displacement by |depth - z0|.
    #[arg(long = "use-depth")]
    pub use_depth: bool,

    #[arg(long, value_enum, default_value_t = TemporalArg::Restart)]
    pub temporal: TemporalArg,

    /// Frame range: a single frame `N` or a half-open range `A..B`.
    #[arg(long, default_value = "0")]
    pub frames: String,

    /// Also write depth and normal planes as PFM files.
    #[arg(long = "dump-aux")]
    pub dump_aux: bool,

    /// Write every iteration of every frame, not just the final one.
    #[arg(long = "dump-iterations")]
    pub dump_iterations: bool,

    /// Write an example scene and its environment texture into DIR, then exit.
    #[arg(long = "emit-example", value_name = "DIR")]
    pub emit_example: Option<PathBuf>,
}

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: ModeArg,
    pub scene_path: Option<PathBuf>,
    pub input_image_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub width: usize,
    pub height: usize,
    pub size_was_explicit: bool,
    pub recursion: RecursionConfig,
    pub warp: WarpParams,
    pub frames: Vec<u32>,
    pub dump_aux: bool,
    pub dump_iterations: bool,
}

fn parse_size(text: &str) -> Result<(usize, usize), CliError> {
    let (w, h) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| CliError::parse(format!("--size expects WIDTHxHEIGHT, got `{text}`")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| CliError::parse(format!("--size component `{s}` is not an integer")))
    };
    let (w, h) = (parse(w)?, parse(h)?);
    if w < 1 || h < 1 {
        return Err(CliError::config(format!("size {w}x{h} is invalid: both dimensions must be at least 1")));
    }
    Ok((w, h))
}

fn parse_frames(text: &str) -> Result<Vec<u32>, CliError> {
    if let Some((a, b)) = text.split_once("..") {
        let parse = |s: &str| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| CliError::parse(format!("--frames bound `{s}` is not a non-negative integer")))
        };
        let (a, b) = (parse(a)?, parse(b)?);
        if a >= b {
            return Err(CliError::config(format!("frame range {a}..{b} is empty")));
        }
        Ok((a..b).collect())
    } else {
        let f = text
            .trim()
            .parse::<u32>()
            .map_err(|_| CliError::parse(format!("--frames expects N or A..B, got `{text}`")))?;
        Ok(vec![f])
    }
}

fn parse_affine(text: &str) -> Result<(Mat3, Vec3), CliError> {
    let values: Result<Vec<f64>, CliError> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::parse(format!("--affine component `{s}` is not a number")))
        })
        .collect();
    let v = values?;
    if v.len() != 12 {
        return Err(CliError::parse(format!(
            "--affine needs 12 comma-separated reals (row-major matrix, then bias), got {}",
            v.len()
        )));
    }
    Ok((
        Mat3::new([[v[0], v[1], v[2]], [v[3], v[4], v[5]], [v[6], v[7], v[8]]]),
        Vec3::new(v[9], v[10], v[11]),
    ))
}

fn build_mapping(kind: MappingArg, args: &Args, role: &str) -> Result<DisplacementMapping, CliError> {
    let need_lambda = || {
        if args.lambda > 0.0 {
            Ok(args.lambda)
        } else {
            Err(CliError::config(format!("--lambda must be positive for the {role} mapping, got {}", args.lambda)))
        }
    };
    match kind {
        MappingArg::Null => Ok(DisplacementMapping::Null),
        MappingArg::Color => Ok(DisplacementMapping::color(need_lambda()?)),
        MappingArg::Depth => {
            let lambda = need_lambda()?;
            if args.z0 < 0.0 {
                return Err(CliError::config(format!("--z0 must be non-negative, got {}", args.z0)));
            }
            if args.depth_clamp <= args.z0 {
                return Err(CliError::config(format!(
                    "--depth-clamp ({}) must exceed --z0 ({})",
                    args.depth_clamp, args.z0
                )));
            }
            Ok(DisplacementMapping::depth_focus(lambda, args.z0, args.depth_clamp))
        }
        MappingArg::Normal => {
            let lambda = need_lambda()?;
            if args.loops < 1 {
                return Err(CliError::config("--loops must be at least 1".to_string()));
            }
            if args.noise_amplitude < 0.0 {
                return Err(CliError::config("--noise-amplitude must be non-negative".to_string()));
            }
            Ok(DisplacementMapping::normal_tangent(
                lambda,
                args.loops,
                args.noise_amplitude,
                args.noise_seed,
            ))
        }
        MappingArg::Affine => {
            let text = args.affine.as_deref().ok_or_else(|| {
                CliError::parse(format!("--mapping affine ({role}) requires --affine with 12 values"))
            })?;
            let (matrix, bias) = parse_affine(text)?;
            Ok(DisplacementMapping::AffineColor { matrix, bias })
        }
    }
}

impl RunConfig {
    pub fn from_args(args: &Args) -> Result<RunConfig, CliError> {
        let (width, height) = match &args.size {
            Some(text) => parse_size(text)?,
            None => (256, 256),
        };

        if args.iterations < 1 {
            return Err(CliError::config("--iterations must be at least 1".to_string()));
        }
        if args.spp < 1 {
            return Err(CliError::config("--spp must be at least 1".to_string()));
        }

        match args.mode {
            ModeArg::Ray => {
                if args.scene.is_none() {
                    return Err(CliError::parse("ray mode requires --scene".to_string()));
                }
                if args.input.is_some() {
                    return Err(CliError::parse("--input is only meaningful in warp mode".to_string()));
                }
            }
            ModeArg::Warp => {
                if args.scene.is_none() && args.input.is_none() {
                    return Err(CliError::parse("warp mode requires --input or --scene".to_string()));
                }
                if args.scene.is_some() && args.input.is_some() {
                    return Err(CliError::parse("pass either --scene or --input, not both".to_string()));
                }
            }
        }

        let output_dir = args
            .output
            .clone()
            .ok_or_else(|| CliError::parse("missing required --output directory".to_string()))?;

        let recursion = RecursionConfig {
            iterations: args.iterations,
            samples_per_pixel: args.spp,
            rng_seed: args.seed,
            pixel_mapping: build_mapping(args.mapping, args, "pixel")?,
            eye_mapping: build_mapping(args.eye_mapping, args, "eye")?,
            temporal_mode: match args.temporal {
                TemporalArg::Restart => TemporalMode::Restart,
                TemporalArg::Carry => TemporalMode::Carry,
            },
        };

        let max_smudge_px = match args.max_smudge_px {
            Some(px) if px < 0.0 => {
                return Err(CliError::config(format!("--max-smudge-px must be non-negative, got {px}")));
            }
            Some(px) => px,
            None => args.lambda.max(0.0) * width.min(height) as f64 / 10.0,
        };
        let mut warp = WarpParams::new(max_smudge_px, args.edge_mode.into(), args.iterations);
        if args.use_depth {
            if args.depth_clamp <= args.z0 {
                return Err(CliError::config(format!(
                    "--depth-clamp ({}) must exceed --z0 ({})",
                    args.depth_clamp, args.z0
                )));
            }
            warp = warp.with_depth(args.z0, args.depth_clamp);
        }

        Ok(RunConfig {
            mode: args.mode,
            scene_path: args.scene.clone(),
            input_image_path: args.input.clone(),
            output_dir,
            width,
            height,
            size_was_explicit: args.size.is_some(),
            recursion,
            warp,
            frames: parse_frames(&args.frames)?,
            dump_aux: args.dump_aux,
            dump_iterations: args.dump_iterations,
        })
    }
}
