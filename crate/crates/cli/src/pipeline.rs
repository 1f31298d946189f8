//! Orchestration: load inputs, run the selected pipeline per frame, write
//! `frame_%04d_iter_%02d` outputs and a one-line summary per frame.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use camerapaint::{
    render_pass, seed_buffer, warp_recursive, ColorRgb, FrameBuffer, GBufferSample,
    RecursionConfig, Scene, TemporalMode, Vec3,
};

use crate::config::{ModeArg, RunConfig};
use crate::error::CliError;
use crate::imgio;
use crate::scenefile;

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    fs::create_dir_all(&cfg.output_dir).map_err(|e| CliError::io(&cfg.output_dir, e))?;
    match cfg.mode {
        ModeArg::Ray => run_ray(cfg),
        ModeArg::Warp => run_warp(cfg),
    }
}

fn load_scene(cfg: &RunConfig) -> Result<Scene, CliError> {
    let path = cfg.scene_path.as_ref().expect("scene path validated by config");
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let desc = scenefile::parse(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    scenefile::load(&desc, base, cfg.width as f64 / cfg.height as f64)
}

fn out_path(cfg: &RunConfig, frame: u32, iter: u32, suffix: &str, ext: &str) -> PathBuf {
    cfg.output_dir.join(format!("frame_{frame:04}_iter_{iter:02}{suffix}.{ext}"))
}

fn write_outputs(cfg: &RunConfig, frame: u32, iter: u32, buffer: &FrameBuffer) -> Result<(), CliError> {
    imgio::write_png(&out_path(cfg, frame, iter, "", "png"), buffer)?;
    if cfg.dump_aux {
        imgio::write_depth_pfm(&out_path(cfg, frame, iter, "_depth", "pfm"), buffer)?;
        imgio::write_normal_pfm(&out_path(cfg, frame, iter, "_normal", "pfm"), buffer)?;
    }
    Ok(())
}

/// Single-frame runs dump the whole iteration stack by default; walk-throughs
/// only do so when asked.
fn dump_all_iterations(cfg: &RunConfig) -> bool {
    cfg.dump_iterations || cfg.frames.len() == 1
}

fn summary(frame: u32, iterations: u32, started: Instant) {
    println!(
        "frame {frame:04}: {iterations} iterations, {:.3} s",
        started.elapsed().as_secs_f64()
    );
}

fn run_ray(cfg: &RunConfig) -> Result<(), CliError> {
    let scene = load_scene(cfg)?;
    let dump_all = dump_all_iterations(cfg);
    let iterations = cfg.recursion.iterations;

    // The walk-through loop: restart mode reseeds every frame, carry mode
    // feeds each frame's final buffer into the next frame's first pass.
    let mut carried: Option<FrameBuffer> = None;
    for &frame in &cfg.frames {
        let started = Instant::now();
        let camera = scene.camera_at(frame as f64)?;
        let mut current = match (cfg.recursion.temporal_mode, carried.take()) {
            (TemporalMode::Carry, Some(prev_final)) => prev_final,
            _ => seed_buffer(cfg.width, cfg.height, &cfg.recursion.pixel_mapping, &camera)?,
        };
        if dump_all {
            write_outputs(cfg, frame, 0, &current)?;
        }
        for n in 1..=iterations {
            current = render_pass(&scene, &camera, &current, &cfg.recursion, n)?;
            if dump_all || n == iterations {
                write_outputs(cfg, frame, n, &current)?;
            }
        }
        if cfg.recursion.temporal_mode == TemporalMode::Carry {
            carried = Some(current);
        }
        summary(frame, iterations, started);
    }
    Ok(())
}

/// First buffer of the warp stack: either the decoded input image or a plain
/// ray-traced first frame of the scene.
fn warp_source(cfg: &RunConfig, scene: Option<&Scene>, frame: u32) -> Result<FrameBuffer, CliError> {
    if let Some(path) = &cfg.input_image_path {
        let img = imgio::read_png(path)?;
        if cfg.size_was_explicit && (img.width(), img.height()) != (cfg.width, cfg.height) {
            return Err(CliError::config(format!(
                "--size {}x{} does not match input image {}x{}",
                cfg.width,
                cfg.height,
                img.width(),
                img.height()
            )));
        }
        let mut fb = FrameBuffer::filled(
            img.width(),
            img.height(),
            GBufferSample::new(ColorRgb::BLACK, 0.0, Vec3::Z, 0, Vec3::ZERO),
        );
        for y in 0..img.height() {
            for x in 0..img.width() {
                fb.set(x, y, GBufferSample::new(img.get(x, y), 0.0, Vec3::Z, 0, Vec3::ZERO));
            }
        }
        Ok(fb)
    } else {
        let scene = scene.expect("warp without --input has a scene (validated by config)");
        let camera = scene.camera_at(frame as f64)?;
        let plain = RecursionConfig {
            iterations: 1,
            pixel_mapping: camerapaint::DisplacementMapping::Null,
            ..cfg.recursion.clone()
        };
        let seed = seed_buffer(cfg.width, cfg.height, &plain.pixel_mapping, &camera)?;
        Ok(render_pass(scene, &camera, &seed, &plain, 1)?)
    }
}

fn run_warp(cfg: &RunConfig) -> Result<(), CliError> {
    let scene = match cfg.scene_path {
        Some(_) => Some(load_scene(cfg)?),
        None => None,
    };
    if scene.is_none() && cfg.frames.len() > 1 {
        return Err(CliError::config(
            "warping a single input image over multiple frames would repeat the same output; \
             pass a scene or a single frame"
                .to_string(),
        ));
    }

    let dump_all = dump_all_iterations(cfg);
    for &frame in &cfg.frames {
        let started = Instant::now();
        let source = warp_source(cfg, scene.as_ref(), frame)?;
        let buffers = warp_recursive(&source, &cfg.warp);
        for (n, buffer) in buffers.iter().enumerate() {
            if dump_all || n == buffers.len() - 1 {
                write_outputs(cfg, frame, n as u32, buffer)?;
            }
        }
        summary(frame, cfg.warp.iterations, started);
    }
    Ok(())
}
