//! Property tests for the sampling, displacement and warp invariants, plus
//! the schedule-independence guarantee of the parallel render loop.

use proptest::prelude::*;

use camerapaint::displacement::{eval_color_affine, eval_normal_tangent};
use camerapaint::fixtures;
use camerapaint::imaging::{pixel_center_coord, sample_bilinear};
use camerapaint::{
    boundary_resolve, render_recursive, warp_pass, Camera, ColorRgb, DisplacementMapping, EdgeMode,
    FrameBuffer, GBufferSample, Mat3, RecursionConfig, TexCoord, Vec3, WarpParams,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn color_strategy() -> impl Strategy<Value = ColorRgb> {
    (0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(r, g, b)| ColorRgb::new(r, g, b))
}

fn buffer_strategy(max_dim: usize) -> impl Strategy<Value = FrameBuffer> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(w, h)| {
        proptest::collection::vec((color_strategy(), 0.0..50.0f64), w * h).prop_map(move |cells| {
            let samples = cells
                .into_iter()
                .enumerate()
                .map(|(i, (color, depth))| {
                    GBufferSample::new(color, depth, Vec3::Z, (i % 7) as u32, Vec3::ZERO)
                })
                .collect();
            FrameBuffer::from_samples(w, h, samples)
        })
    })
}

proptest! {
    #[test]
    fn bilinear_color_is_bounded_by_its_neighbors(
        fb in buffer_strategy(6),
        u in 0.0..=1.0f64,
        v in 0.0..=1.0f64,
    ) {
        let got = sample_bilinear(&fb, TexCoord::new(u, v)).color;
        let (mut lo, mut hi) = ([1.0f64; 3], [0.0f64; 3]);
        for s in fb.samples() {
            for (k, c) in s.color.channels().iter().enumerate() {
                lo[k] = lo[k].min(*c);
                hi[k] = hi[k].max(*c);
            }
        }
        for (k, c) in got.channels().iter().enumerate() {
            prop_assert!(lo[k] <= *c && *c <= hi[k], "channel {k}: {c} outside [{}, {}]", lo[k], hi[k]);
        }
    }

    #[test]
    fn bilinear_is_exact_at_every_pixel_center(fb in buffer_strategy(5)) {
        for y in 0..fb.height() {
            for x in 0..fb.width() {
                let got = sample_bilinear(&fb, fb.pixel_center(x, y));
                prop_assert_eq!(&got, fb.get(x, y));
            }
        }
    }

    #[test]
    fn stored_colors_stay_in_unit_range(r in -5.0..5.0f64, g in -5.0..5.0f64, b in -5.0..5.0f64) {
        let c = ColorRgb::new(r, g, b);
        for ch in c.channels() {
            prop_assert!((0.0..=1.0).contains(&ch));
        }
    }

    #[test]
    fn boundary_resolve_is_total(x in -1e6..1e6f64) {
        for mode in [EdgeMode::Clamp, EdgeMode::Wrap, EdgeMode::Mirror] {
            let y = boundary_resolve(x, mode);
            prop_assert!((0.0..=1.0).contains(&y), "{mode:?} on {x} gave {y}");
        }
    }

    #[test]
    fn mirror_is_symmetric_everywhere(x in -100.0..100.0f64) {
        let m = boundary_resolve(x, EdgeMode::Mirror);
        prop_assert!((m - boundary_resolve(-x, EdgeMode::Mirror)).abs() < 1e-12);
        prop_assert!((m - boundary_resolve(2.0 - x, EdgeMode::Mirror)).abs() < 1e-12);
    }

    #[test]
    fn affine_color_map_is_homogeneous(
        color in color_strategy(),
        alpha in -4.0..4.0f64,
        m in proptest::array::uniform9(-2.0..2.0f64),
        b in proptest::array::uniform3(-2.0..2.0f64),
    ) {
        let matrix = Mat3::new([[m[0], m[1], m[2]], [m[3], m[4], m[5]], [m[6], m[7], m[8]]]);
        let bias = Vec3::new(b[0], b[1], b[2]);
        let scaled = eval_color_affine(matrix.scaled(alpha), bias * alpha, color);
        let reference = eval_color_affine(matrix, bias, color) * alpha;
        prop_assert!((scaled - reference).length() < 1e-12);
    }

    #[test]
    fn canonical_color_map_stays_in_the_lambda_box(
        color in color_strategy(),
        lambda in 0.01..10.0f64,
    ) {
        let mapping = DisplacementMapping::color(lambda);
        let (matrix, bias) = match mapping {
            DisplacementMapping::AffineColor { matrix, bias } => (matrix, bias),
            _ => unreachable!(),
        };
        let v = eval_color_affine(matrix, bias, color);
        for c in [v.x, v.y, v.z] {
            prop_assert!(c.abs() <= lambda, "{c} outside [-{lambda}, {lambda}]");
        }
    }

    #[test]
    fn warp_output_colors_stay_within_input_extrema(
        fb in buffer_strategy(6),
        smudge in 0.0..12.0f64,
    ) {
        for mode in [EdgeMode::Clamp, EdgeMode::Wrap, EdgeMode::Mirror] {
            let out = warp_pass(&fb, &WarpParams::new(smudge, mode, 1));
            let (mut lo, mut hi) = ([1.0f64; 3], [0.0f64; 3]);
            for s in fb.samples() {
                for (k, c) in s.color.channels().iter().enumerate() {
                    lo[k] = lo[k].min(*c);
                    hi[k] = hi[k].max(*c);
                }
            }
            for s in out.samples() {
                for (k, c) in s.color.channels().iter().enumerate() {
                    prop_assert!(lo[k] <= *c && *c <= hi[k]);
                }
            }
        }
    }
}

#[test]
fn normal_tangent_is_orthogonal_to_both_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let unit = |rng: &mut ChaCha8Rng| loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let len = v.length();
        if len > 0.1 && len <= 1.0 {
            return v / len;
        }
    };
    let uv = TexCoord::new(0.5, 0.5);
    for _ in 0..10_000 {
        let forward = unit(&mut rng);
        let normal = unit(&mut rng);
        let sample = GBufferSample::new(ColorRgb::GRAY, 1.0, normal, 1, Vec3::ZERO);
        let tangent = eval_normal_tangent(1.0, 0.0, 0, forward, &sample, uv);
        assert!(tangent.dot(forward).abs() < 1e-9);
        assert!(tangent.dot(normal).abs() < 1e-9);
    }
}

#[test]
fn render_is_schedule_independent() {
    let scene = fixtures::demo_scene(1.0);
    let camera = scene.camera_at(0.0).unwrap();
    let cfg = RecursionConfig {
        samples_per_pixel: 2,
        ..RecursionConfig::with_pixel_mapping(3, 99, DisplacementMapping::color(0.3))
    };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| render_recursive(&scene, &camera, 24, 24, &cfg).unwrap())
    };
    let serial = run(1);
    let parallel = run(4);
    assert_eq!(serial, parallel);
    // And across repeated runs.
    assert_eq!(serial, run(1));
}

#[test]
fn film_point_affinity_over_random_cameras() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let eye = Vec3::new(
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
        );
        let look = eye + Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(1.0..2.0),
        );
        let camera = Camera::look_at(eye, look, Vec3::Y, rng.gen_range(20.0..120.0), 1.0);
        let a = TexCoord::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let b = TexCoord::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let mid = TexCoord::new((a.u + b.u) / 2.0, (a.v + b.v) / 2.0);
        let residual = camera.film_point(a) + camera.film_point(b) - camera.film_point(mid) * 2.0;
        assert!(residual.length() < 1e-9);
    }
}

#[test]
fn pixel_centers_round_trip_through_the_sampler_shortcut() {
    // The canonical center expression must agree with itself across the
    // sampler's reconstruction for awkward (non power of two) sizes.
    for n in [1usize, 3, 7, 640, 1001] {
        for i in [0, n / 2, n - 1] {
            let u = pixel_center_coord(i, n);
            let x = (u * n as f64 - 0.5).round();
            assert_eq!(x as usize, i);
            assert_eq!(pixel_center_coord(x as usize, n), u);
        }
    }
}
