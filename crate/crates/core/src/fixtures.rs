//! Procedural scenes and textures shared by tests, benchmarks and the CLI's
//! example generator. Everything here is deterministic.

use std::f64::consts::TAU;

use crate::imaging::{ColorImage, ColorRgb};
use crate::math::Vec3;
use crate::scene::{Camera, CameraKeyframe, DirectionalLight, Material, Primitive, Scene, Sphere};

/// Smooth periodic color field; rich enough that displaced rays keep finding
/// new colors at every recursion depth.
pub fn band_texture(width: usize, height: usize) -> ColorImage {
    ColorImage::from_fn(width, height, |x, y| {
        let u = (x as f64 + 0.5) / width as f64;
        let v = (y as f64 + 0.5) / height as f64;
        let s = (TAU * (3.0 * u + 0.2 * (TAU * v).sin())).sin();
        let t = (TAU * (2.0 * v + 0.3 * (TAU * u).cos())).cos();
        ColorRgb::new(0.5 + 0.45 * s, 0.5 + 0.45 * t, 0.5 + 0.45 * s * t)
    })
}

fn default_camera(aspect: f64) -> Camera {
    Camera::look_at(Vec3::ZERO, Vec3::Z, Vec3::Y, 60.0, aspect)
}

/// Environment-only scene wrapped in the band texture.
pub fn textured_environment_scene(aspect: f64) -> Scene {
    Scene::environment_only(band_texture(128, 64), default_camera(aspect))
}

/// Camera at the exact center of a textured sphere: every primary ray hits
/// at a depth of exactly `radius`.
pub fn uniform_depth_scene(radius: f64, aspect: f64) -> Scene {
    let camera = default_camera(aspect);
    Scene {
        environment: ColorImage::constant(4, 2, ColorRgb::BLACK),
        primitives: vec![Primitive::Sphere(Sphere {
            center: camera.eye,
            radius,
            material: Material::Texture(band_texture(64, 32)),
        })],
        light: DirectionalLight {
            direction: Vec3::new(0.0, -1.0, 0.0),
            intensity: 0.8,
        },
        ambient: 0.2,
        camera_path: vec![CameraKeyframe { frame: 0, camera }],
    }
}

/// Environment plus three spheres under a tilted directional light; the
/// desk-scale benchmark scene and the CLI example.
pub fn demo_scene(aspect: f64) -> Scene {
    let camera = default_camera(aspect);
    let sphere = |center: Vec3, radius: f64, material: Material| {
        Primitive::Sphere(Sphere { center, radius, material })
    };
    Scene {
        environment: band_texture(256, 128),
        primitives: vec![
            sphere(
                Vec3::new(-1.4, 0.0, 5.0),
                1.0,
                Material::Albedo(ColorRgb::new(0.9, 0.25, 0.2)),
            ),
            sphere(
                Vec3::new(1.2, -0.3, 6.5),
                1.2,
                Material::Albedo(ColorRgb::new(0.2, 0.5, 0.9)),
            ),
            sphere(
                Vec3::new(0.2, 1.1, 8.0),
                1.5,
                Material::Texture(band_texture(64, 32)),
            ),
        ],
        light: DirectionalLight {
            direction: Vec3::new(-0.4, -1.0, -0.3).normalized(),
            intensity: 0.9,
        },
        ambient: 0.15,
        camera_path: vec![CameraKeyframe { frame: 0, camera }],
    }
}
