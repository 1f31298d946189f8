//! Scene description, camera model, ray construction and shading.

use crate::error::RenderError;
use crate::imaging::{ColorImage, ColorRgb, GBufferSample, TexCoord};
use crate::math::Vec3;

use std::f64::consts::PI;

/// Rays closer than this to their origin do not count as hits, which keeps a
/// displaced ray from re-hitting the surface it started on.
pub const T_MIN: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    /// Unit length.
    pub direction: Vec3,
}

impl Ray {
    pub fn new(origin: Vec3, direction: Vec3) -> Ray {
        debug_assert!(direction.is_unit(1e-9), "ray direction must be unit length");
        Ray { origin, direction }
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }
}

/// Pinhole camera: eye point, orthonormal frame and a film rectangle at
/// `film_distance` along `forward`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    pub eye: Vec3,
    pub right: Vec3,
    pub up: Vec3,
    pub forward: Vec3,
    pub film_distance: f64,
    pub film_half_width: f64,
    pub film_half_height: f64,
}

impl Camera {
    pub fn new(
        eye: Vec3,
        right: Vec3,
        up: Vec3,
        forward: Vec3,
        film_distance: f64,
        film_half_width: f64,
        film_half_height: f64,
    ) -> Camera {
        let cam = Camera {
            eye,
            right,
            up,
            forward,
            film_distance,
            film_half_width,
            film_half_height,
        };
        assert!(cam.basis_is_orthonormal(1e-6), "camera basis must be orthonormal");
        assert!(
            film_distance > 0.0 && film_half_width > 0.0 && film_half_height > 0.0,
            "film extents must be positive"
        );
        cam
    }

    /// Camera looking from `eye` toward `look`, with a vertical field of view
    /// in degrees and the film aspect ratio width/height. Film sits at
    /// distance 1.
    pub fn look_at(eye: Vec3, look: Vec3, up_hint: Vec3, fov_y_deg: f64, aspect: f64) -> Camera {
        let gaze = look - eye;
        assert!(gaze.length() > 1e-9, "camera look point coincides with the eye");
        let forward = gaze.normalized();
        let right_raw = up_hint.cross(forward);
        assert!(right_raw.length() > 1e-9, "camera up is parallel to the view direction");
        let right = right_raw.normalized();
        let up = forward.cross(right);
        let half_h = (fov_y_deg.to_radians() / 2.0).tan();
        assert!(half_h > 0.0, "field of view must be in (0, 180)");
        Camera::new(eye, right, up, forward, 1.0, half_h * aspect, half_h)
    }

    pub fn basis_is_orthonormal(&self, tol: f64) -> bool {
        self.right.is_unit(tol)
            && self.up.is_unit(tol)
            && self.forward.is_unit(tol)
            && self.right.dot(self.up).abs() <= tol
            && self.right.dot(self.forward).abs() <= tol
            && self.up.dot(self.forward).abs() <= tol
    }

    pub fn aspect(&self) -> f64 {
        self.film_half_width / self.film_half_height
    }

    /// World position of the film point under texture coordinate `uv`.
    /// Image v grows downward, camera up points up, hence the minus sign.
    pub fn film_point(&self, uv: TexCoord) -> Vec3 {
        self.eye
            + self.forward * self.film_distance
            + self.right * ((2.0 * uv.u - 1.0) * self.film_half_width)
            - self.up * ((2.0 * uv.v - 1.0) * self.film_half_height)
    }

    /// Express a camera-local vector in world space. Linear, so the zero
    /// vector always maps to the zero vector.
    pub fn local_to_world(&self, v_local: Vec3) -> Vec3 {
        self.right * v_local.x + self.up * v_local.y + self.forward * v_local.z
    }

    /// The undisplaced ray through the film point at `uv`.
    pub fn primary_ray(&self, uv: TexCoord) -> Ray {
        let p = self.film_point(uv);
        Ray::new(self.eye, (p - self.eye).normalized())
    }
}

/// Surface color: either a constant albedo or an equirectangular texture
/// (spheres only; parameterized by the outward surface direction).
#[derive(Debug, Clone, PartialEq)]
pub enum Material {
    Albedo(ColorRgb),
    Texture(ColorImage),
}

impl Material {
    fn albedo_at(&self, outward: Vec3) -> ColorRgb {
        match self {
            Material::Albedo(c) => *c,
            Material::Texture(img) => {
                let (u, v) = equirect_uv(outward);
                img.sample_wrapped(u, v)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
    pub material: Material,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
    pub material: Material,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    Sphere(Sphere),
    Mesh(TriangleMesh),
}

/// Geometric intersection record, before shading.
#[derive(Debug, Clone, Copy)]
pub struct Hit {
    pub t: f64,
    pub position: Vec3,
    /// Outward surface normal (not yet oriented toward the ray).
    pub outward_normal: Vec3,
}

impl Primitive {
    /// Nearest intersection with t > T_MIN, if any.
    pub fn intersect(&self, ray: &Ray) -> Option<Hit> {
        match self {
            Primitive::Sphere(s) => intersect_sphere(s, ray),
            Primitive::Mesh(m) => intersect_mesh(m, ray),
        }
    }

    fn material(&self) -> &Material {
        match self {
            Primitive::Sphere(s) => &s.material,
            Primitive::Mesh(m) => &m.material,
        }
    }
}

fn intersect_sphere(s: &Sphere, ray: &Ray) -> Option<Hit> {
    let oc = ray.origin - s.center;
    let b = oc.dot(ray.direction);
    let c = oc.dot(oc) - s.radius * s.radius;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let sqrt_d = disc.sqrt();
    let mut t = -b - sqrt_d;
    if t <= T_MIN {
        t = -b + sqrt_d;
    }
    if t <= T_MIN {
        return None;
    }
    let position = ray.at(t);
    Some(Hit {
        t,
        position,
        outward_normal: (position - s.center) / s.radius,
    })
}

fn intersect_triangle(v0: Vec3, v1: Vec3, v2: Vec3, ray: &Ray) -> Option<f64> {
    // Moeller-Trumbore.
    let e1 = v1 - v0;
    let e2 = v2 - v0;
    let pvec = ray.direction.cross(e2);
    let det = e1.dot(pvec);
    if det.abs() < 1e-12 {
        return None;
    }
    let inv_det = 1.0 / det;
    let tvec = ray.origin - v0;
    let u = tvec.dot(pvec) * inv_det;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let qvec = tvec.cross(e1);
    let v = ray.direction.dot(qvec) * inv_det;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = e2.dot(qvec) * inv_det;
    (t > T_MIN).then_some(t)
}

fn intersect_mesh(m: &TriangleMesh, ray: &Ray) -> Option<Hit> {
    let mut best: Option<(f64, Vec3)> = None;
    for tri in &m.triangles {
        let v0 = m.vertices[tri[0] as usize];
        let v1 = m.vertices[tri[1] as usize];
        let v2 = m.vertices[tri[2] as usize];
        if let Some(t) = intersect_triangle(v0, v1, v2, ray) {
            if best.map_or(true, |(bt, _)| t < bt) {
                let n = (v1 - v0).cross(v2 - v0).normalized();
                best = Some((t, n));
            }
        }
    }
    best.map(|(t, n)| Hit {
        t,
        position: ray.at(t),
        outward_normal: n,
    })
}

/// Single directional light.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalLight {
    /// Unit vector pointing in the direction the light travels.
    pub direction: Vec3,
    pub intensity: f64,
}

/// A camera bound to a frame index of the walk-through.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraKeyframe {
    pub frame: u32,
    pub camera: Camera,
}

/// Everything a pass needs: environment sphere, primitives, light and the
/// keyframed camera path. Immutable while rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub environment: ColorImage,
    pub primitives: Vec<Primitive>,
    pub light: DirectionalLight,
    pub ambient: f64,
    pub camera_path: Vec<CameraKeyframe>,
}

impl Scene {
    /// Scene with only an environment sphere and a single camera keyframe.
    pub fn environment_only(environment: ColorImage, camera: Camera) -> Scene {
        Scene {
            environment,
            primitives: Vec::new(),
            light: DirectionalLight {
                direction: Vec3::new(0.0, -1.0, 0.0),
                intensity: 1.0,
            },
            ambient: 0.1,
            camera_path: vec![CameraKeyframe { frame: 0, camera }],
        }
    }

    /// Camera for a (possibly fractional) frame index: linear interpolation
    /// of the eye and film, spherical-linear interpolation of the basis,
    /// clamped outside the keyframe range.
    pub fn camera_at(&self, frame: f64) -> Result<Camera, RenderError> {
        if self.camera_path.is_empty() {
            return Err(RenderError::InvalidScene("camera path is empty".into()));
        }
        let mut keys: Vec<&CameraKeyframe> = self.camera_path.iter().collect();
        keys.sort_by_key(|k| k.frame);

        let first = keys[0];
        let last = keys[keys.len() - 1];
        if frame <= first.frame as f64 {
            return Ok(first.camera);
        }
        if frame >= last.frame as f64 {
            return Ok(last.camera);
        }
        let idx = keys.partition_point(|k| (k.frame as f64) <= frame);
        let k0 = keys[idx - 1];
        let k1 = keys[idx];
        if (k0.frame as f64) == frame {
            return Ok(k0.camera);
        }
        let t = (frame - k0.frame as f64) / (k1.frame as f64 - k0.frame as f64);
        Ok(interpolate_camera(&k0.camera, &k1.camera, t))
    }
}

/// Equirectangular parameterization of a unit direction.
pub fn equirect_uv(direction: Vec3) -> (f64, f64) {
    let u = 0.5 + direction.x.atan2(direction.z) / (2.0 * PI);
    let v = 0.5 - direction.y.clamp(-1.0, 1.0).asin() / PI;
    (u, v)
}

/// Environment color along a unit direction: bilinear lookup with horizontal
/// wrap and vertical clamp.
pub fn equirect_lookup(direction: Vec3, environment: &ColorImage) -> ColorRgb {
    debug_assert!(direction.is_unit(1e-6));
    let (u, v) = equirect_uv(direction);
    environment.sample_wrapped(u, v)
}

/// Trace one ray: nearest primitive wins, Lambert shading with one
/// directional light plus ambient; misses sample the environment sphere.
pub fn trace(scene: &Scene, ray: &Ray) -> GBufferSample {
    let mut best: Option<(f64, Hit, u32, &Primitive)> = None;
    for (i, prim) in scene.primitives.iter().enumerate() {
        if let Some(hit) = prim.intersect(ray) {
            if best.as_ref().map_or(true, |(bt, ..)| hit.t < *bt) {
                best = Some((hit.t, hit, i as u32 + 1, prim));
            }
        }
    }

    match best {
        Some((t, hit, object_id, prim)) => {
            // Orient the normal toward the ray so interiors shade sensibly;
            // texture lookup keeps the outward direction.
            let normal = if hit.outward_normal.dot(ray.direction) > 0.0 {
                -hit.outward_normal
            } else {
                hit.outward_normal
            };
            let albedo = prim.material().albedo_at(hit.outward_normal);
            let n_dot_l = normal.dot(-scene.light.direction).max(0.0);
            let irradiance = scene.ambient + scene.light.intensity * n_dot_l;
            GBufferSample::new(albedo.scaled(irradiance), t, normal, object_id, hit.position)
        }
        None => GBufferSample::new(
            equirect_lookup(ray.direction, &scene.environment),
            f64::INFINITY,
            -ray.direction,
            0,
            Vec3::ZERO,
        ),
    }
}

// --- camera path interpolation -------------------------------------------

#[derive(Debug, Clone, Copy)]
struct Quat {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl Quat {
    /// Rotation whose columns are the camera basis vectors.
    fn from_basis(right: Vec3, up: Vec3, forward: Vec3) -> Quat {
        // Shepperd's method over the rotation matrix [right | up | forward].
        let (m00, m01, m02) = (right.x, up.x, forward.x);
        let (m10, m11, m12) = (right.y, up.y, forward.y);
        let (m20, m21, m22) = (right.z, up.z, forward.z);
        let trace = m00 + m11 + m22;
        if trace > 0.0 {
            let s = (trace + 1.0).sqrt() * 2.0;
            Quat {
                w: 0.25 * s,
                x: (m21 - m12) / s,
                y: (m02 - m20) / s,
                z: (m10 - m01) / s,
            }
        } else if m00 > m11 && m00 > m22 {
            let s = (1.0 + m00 - m11 - m22).sqrt() * 2.0;
            Quat {
                w: (m21 - m12) / s,
                x: 0.25 * s,
                y: (m01 + m10) / s,
                z: (m02 + m20) / s,
            }
        } else if m11 > m22 {
            let s = (1.0 + m11 - m00 - m22).sqrt() * 2.0;
            Quat {
                w: (m02 - m20) / s,
                x: (m01 + m10) / s,
                y: 0.25 * s,
                z: (m12 + m21) / s,
            }
        } else {
            let s = (1.0 + m22 - m00 - m11).sqrt() * 2.0;
            Quat {
                w: (m10 - m01) / s,
                x: (m02 + m20) / s,
                y: (m12 + m21) / s,
                z: 0.25 * s,
            }
        }
    }

    fn dot(self, o: Quat) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    fn scaled(self, s: f64) -> Quat {
        Quat {
            w: self.w * s,
            x: self.x * s,
            y: self.y * s,
            z: self.z * s,
        }
    }

    fn add(self, o: Quat) -> Quat {
        Quat {
            w: self.w + o.w,
            x: self.x + o.x,
            y: self.y + o.y,
            z: self.z + o.z,
        }
    }

    fn normalized(self) -> Quat {
        let n = self.dot(self).sqrt();
        self.scaled(1.0 / n)
    }

    fn slerp(self, mut other: Quat, t: f64) -> Quat {
        let mut cos = self.dot(other);
        if cos < 0.0 {
            other = other.scaled(-1.0);
            cos = -cos;
        }
        if cos > 1.0 - 1e-10 {
            // Nearly identical orientations: fall back to a normalized lerp.
            return self.scaled(1.0 - t).add(other.scaled(t)).normalized();
        }
        let theta = cos.acos();
        let sin = theta.sin();
        let a = ((1.0 - t) * theta).sin() / sin;
        let b = (t * theta).sin() / sin;
        self.scaled(a).add(other.scaled(b))
    }

    fn rotate(self, v: Vec3) -> Vec3 {
        // v' = v + 2 q_vec x (q_vec x v + w v)
        let qv = Vec3::new(self.x, self.y, self.z);
        let t = qv.cross(v) * 2.0;
        v + t * self.w + qv.cross(t)
    }
}

fn interpolate_camera(a: &Camera, b: &Camera, t: f64) -> Camera {
    let lerp = |x: f64, y: f64| x + (y - x) * t;
    let qa = Quat::from_basis(a.right, a.up, a.forward);
    let qb = Quat::from_basis(b.right, b.up, b.forward);
    let q = qa.slerp(qb, t).normalized();

    // Re-orthonormalize to wash out accumulated rounding.
    let forward = q.rotate(Vec3::Z).normalized();
    let right_raw = q.rotate(Vec3::X);
    let right = (right_raw - forward * right_raw.dot(forward)).normalized();
    let up = forward.cross(right);

    Camera::new(
        a.eye + (b.eye - a.eye) * t,
        right,
        up,
        forward,
        lerp(a.film_distance, b.film_distance),
        lerp(a.film_half_width, b.film_half_width),
        lerp(a.film_half_height, b.film_half_height),
    )
}
