//! The line-oriented scene grammar:
//!
//! ```text
//! # comment
//! env <image-path>
//! sphere <cx> <cy> <cz> <r> [albedo <r> <g> <b> | tex <image-path>]
//! mesh <obj-path> [albedo <r> <g> <b>]
//! light <dx> <dy> <dz> <intensity>
//! ambient <a>
//! camera frame=<n> eye=<x,y,z> look=<x,y,z> up=<x,y,z> fov=<deg>
//! ```
//!
//! Parsing is purely syntactic (paths stay unresolved strings); `load`
//! resolves files relative to the scene file and builds the render scene.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use camerapaint::{
    Camera, CameraKeyframe, ColorImage, ColorRgb, DirectionalLight, Material, Primitive, Scene,
    Sphere, TriangleMesh, Vec3,
};

use crate::error::CliError;
use crate::imgio;

pub const DEFAULT_ALBEDO: [f64; 3] = [0.8, 0.8, 0.8];

#[derive(Debug, Clone, PartialEq)]
pub enum MaterialDesc {
    Default,
    Albedo([f64; 3]),
    Texture(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereDesc {
    pub center: [f64; 3],
    pub radius: f64,
    pub material: MaterialDesc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshDesc {
    pub obj_path: String,
    pub albedo: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraDesc {
    pub frame: u32,
    pub eye: [f64; 3],
    pub look: [f64; 3],
    pub up: [f64; 3],
    pub fov_deg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PrimitiveDesc {
    Sphere(SphereDesc),
    Mesh(MeshDesc),
}

/// Parsed scene file, paths unresolved. Primitives keep their declaration
/// order, which fixes their object ids as 1..K (0 is the environment).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SceneDesc {
    pub env_path: Option<String>,
    pub primitives: Vec<PrimitiveDesc>,
    pub light: Option<[f64; 4]>,
    pub ambient: Option<f64>,
    pub cameras: Vec<CameraDesc>,
}

fn bad(line_no: usize, msg: impl AsRef<str>) -> CliError {
    CliError::parse(format!("scene parse error at line {line_no}: {}", msg.as_ref()))
}

fn parse_num(tok: &str, line_no: usize, what: &str) -> Result<f64, CliError> {
    tok.parse::<f64>()
        .map_err(|_| bad(line_no, format!("{what}: `{tok}` is not a number")))
}

fn parse_vec3_csv(tok: &str, line_no: usize, what: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<&str> = tok.split(',').collect();
    if parts.len() != 3 {
        return Err(bad(line_no, format!("{what} needs three comma-separated numbers, got `{tok}`")));
    }
    Ok([
        parse_num(parts[0], line_no, what)?,
        parse_num(parts[1], line_no, what)?,
        parse_num(parts[2], line_no, what)?,
    ])
}

fn v3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

/// Parse scene text. Errors name the offending 1-based line.
pub fn parse(text: &str) -> Result<SceneDesc, CliError> {
    let mut desc = SceneDesc::default();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "env" => {
                if tokens.len() != 2 {
                    return Err(bad(line_no, "env takes exactly one path"));
                }
                desc.env_path = Some(tokens[1].to_string());
            }
            "sphere" => {
                if tokens.len() < 5 {
                    return Err(bad(line_no, "sphere needs `cx cy cz r`"));
                }
                let center = [
                    parse_num(tokens[1], line_no, "sphere center")?,
                    parse_num(tokens[2], line_no, "sphere center")?,
                    parse_num(tokens[3], line_no, "sphere center")?,
                ];
                let radius = parse_num(tokens[4], line_no, "sphere radius")?;
                if radius <= 0.0 {
                    return Err(bad(line_no, "sphere radius must be positive"));
                }
                let material = match tokens.get(5) {
                    None => MaterialDesc::Default,
                    Some(&"albedo") => {
                        if tokens.len() != 9 {
                            return Err(bad(line_no, "albedo needs three numbers"));
                        }
                        MaterialDesc::Albedo([
                            parse_num(tokens[6], line_no, "albedo")?,
                            parse_num(tokens[7], line_no, "albedo")?,
                            parse_num(tokens[8], line_no, "albedo")?,
                        ])
                    }
                    Some(&"tex") => {
                        if tokens.len() != 7 {
                            return Err(bad(line_no, "tex takes exactly one path"));
                        }
                        MaterialDesc::Texture(tokens[6].to_string())
                    }
                    Some(other) => {
                        return Err(bad(line_no, format!("unknown sphere material `{other}`")));
                    }
                };
                desc.primitives.push(PrimitiveDesc::Sphere(SphereDesc { center, radius, material }));
            }
            "mesh" => {
                if tokens.len() != 2 && tokens.len() != 6 {
                    return Err(bad(line_no, "mesh needs `<obj-path>` optionally followed by `albedo r g b`"));
                }
                let albedo = if tokens.len() == 6 {
                    if tokens[2] != "albedo" {
                        return Err(bad(line_no, format!("unknown mesh material `{}`", tokens[2])));
                    }
                    Some([
                        parse_num(tokens[3], line_no, "albedo")?,
                        parse_num(tokens[4], line_no, "albedo")?,
                        parse_num(tokens[5], line_no, "albedo")?,
                    ])
                } else {
                    None
                };
                desc.primitives.push(PrimitiveDesc::Mesh(MeshDesc {
                    obj_path: tokens[1].to_string(),
                    albedo,
                }));
            }
            "light" => {
                if tokens.len() != 5 {
                    return Err(bad(line_no, "light needs `dx dy dz intensity`"));
                }
                let l = [
                    parse_num(tokens[1], line_no, "light direction")?,
                    parse_num(tokens[2], line_no, "light direction")?,
                    parse_num(tokens[3], line_no, "light direction")?,
                    parse_num(tokens[4], line_no, "light intensity")?,
                ];
                if l[3] < 0.0 {
                    return Err(bad(line_no, "light intensity must be non-negative"));
                }
                if v3([l[0], l[1], l[2]]).length() < 1e-9 {
                    return Err(bad(line_no, "light direction must be nonzero"));
                }
                desc.light = Some(l);
            }
            "ambient" => {
                if tokens.len() != 2 {
                    return Err(bad(line_no, "ambient takes exactly one number"));
                }
                let a = parse_num(tokens[1], line_no, "ambient")?;
                if !(0.0..=1.0).contains(&a) {
                    return Err(bad(line_no, "ambient must be in [0, 1]"));
                }
                desc.ambient = Some(a);
            }
            "camera" => {
                let mut frame = None;
                let mut eye = None;
                let mut look = None;
                let mut up = None;
                let mut fov = None;
                for tok in &tokens[1..] {
                    let (key, value) = tok
                        .split_once('=')
                        .ok_or_else(|| bad(line_no, format!("camera expects key=value, got `{tok}`")))?;
                    match key {
                        "frame" => {
                            frame = Some(value.parse::<u32>().map_err(|_| {
                                bad(line_no, format!("camera frame: `{value}` is not a non-negative integer"))
                            })?);
                        }
                        "eye" => eye = Some(parse_vec3_csv(value, line_no, "camera eye")?),
                        "look" => look = Some(parse_vec3_csv(value, line_no, "camera look")?),
                        "up" => up = Some(parse_vec3_csv(value, line_no, "camera up")?),
                        "fov" => fov = Some(parse_num(value, line_no, "camera fov")?),
                        other => return Err(bad(line_no, format!("unknown camera key `{other}`"))),
                    }
                }
                let frame = frame.ok_or_else(|| bad(line_no, "camera is missing frame=<n>"))?;
                let eye = eye.ok_or_else(|| bad(line_no, "camera is missing eye=<x,y,z>"))?;
                let look = look.ok_or_else(|| bad(line_no, "camera is missing look=<x,y,z>"))?;
                let up = up.unwrap_or([0.0, 1.0, 0.0]);
                let fov_deg = fov.ok_or_else(|| bad(line_no, "camera is missing fov=<deg>"))?;
                if !(0.0 < fov_deg && fov_deg < 180.0) {
                    return Err(bad(line_no, "camera fov must be in (0, 180) degrees"));
                }
                let gaze = v3(look) - v3(eye);
                if gaze.length() < 1e-9 {
                    return Err(bad(line_no, "camera look point coincides with the eye"));
                }
                if v3(up).cross(gaze).length() < 1e-9 {
                    return Err(bad(line_no, "camera up is parallel to the view direction"));
                }
                if desc.cameras.iter().any(|c| c.frame == frame) {
                    return Err(bad(line_no, format!("duplicate camera keyframe for frame {frame}")));
                }
                desc.cameras.push(CameraDesc { frame, eye, look, up, fov_deg });
            }
            other => return Err(bad(line_no, format!("unknown directive `{other}`"))),
        }
    }

    Ok(desc)
}

/// Serialize a description back into the grammar. `parse(emit(d)) == d`.
pub fn emit(desc: &SceneDesc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# camerapaint scene");
    if let Some(env) = &desc.env_path {
        let _ = writeln!(out, "env {env}");
    }
    for prim in &desc.primitives {
        match prim {
            PrimitiveDesc::Sphere(s) => {
                let _ = write!(out, "sphere {} {} {} {}", s.center[0], s.center[1], s.center[2], s.radius);
                match &s.material {
                    MaterialDesc::Default => {}
                    MaterialDesc::Albedo([r, g, b]) => {
                        let _ = write!(out, " albedo {r} {g} {b}");
                    }
                    MaterialDesc::Texture(path) => {
                        let _ = write!(out, " tex {path}");
                    }
                }
                out.push('\n');
            }
            PrimitiveDesc::Mesh(m) => {
                let _ = write!(out, "mesh {}", m.obj_path);
                if let Some([r, g, b]) = m.albedo {
                    let _ = write!(out, " albedo {r} {g} {b}");
                }
                out.push('\n');
            }
        }
    }
    if let Some([dx, dy, dz, i]) = desc.light {
        let _ = writeln!(out, "light {dx} {dy} {dz} {i}");
    }
    if let Some(a) = desc.ambient {
        let _ = writeln!(out, "ambient {a}");
    }
    for c in &desc.cameras {
        let _ = writeln!(
            out,
            "camera frame={} eye={},{},{} look={},{},{} up={},{},{} fov={}",
            c.frame,
            c.eye[0], c.eye[1], c.eye[2],
            c.look[0], c.look[1], c.look[2],
            c.up[0], c.up[1], c.up[2],
            c.fov_deg
        );
    }
    out
}

fn material_from_desc(desc: &MaterialDesc, base: &Path) -> Result<Material, CliError> {
    Ok(match desc {
        MaterialDesc::Default => Material::Albedo(ColorRgb::new(
            DEFAULT_ALBEDO[0],
            DEFAULT_ALBEDO[1],
            DEFAULT_ALBEDO[2],
        )),
        MaterialDesc::Albedo([r, g, b]) => Material::Albedo(ColorRgb::new(*r, *g, *b)),
        MaterialDesc::Texture(path) => Material::Texture(imgio::read_png(&base.join(path))?),
    })
}

/// Resolve paths and build the renderable scene. `aspect` shapes the camera
/// film (width / height of the render target); vertical fov, film at
/// distance 1.
pub fn load(desc: &SceneDesc, base: &Path, aspect: f64) -> Result<Scene, CliError> {
    let environment = match &desc.env_path {
        Some(path) => imgio::read_png(&base.join(path))?,
        None => ColorImage::constant(1, 1, ColorRgb::BLACK),
    };

    let mut primitives = Vec::new();
    for s in &desc.spheres {
        primitives.push(Primitive::Sphere(Sphere {
            center: v3(s.center),
            radius: s.radius,
            material: material_from_desc(&s.material, base)?,
        }));
    }
    for m in &desc.meshes {
        let material = match m.albedo {
            Some([r, g, b]) => Material::Albedo(ColorRgb::new(r, g, b)),
            None => material_from_desc(&MaterialDesc::Default, base)?,
        };
        primitives.push(Primitive::Mesh(load_obj(&base.join(&m.obj_path), material)?));
    }

    let light = match desc.light {
        Some([dx, dy, dz, intensity]) => DirectionalLight {
            direction: v3([dx, dy, dz]).normalized(),
            intensity,
        },
        None => DirectionalLight {
            direction: Vec3::new(0.0, -1.0, 0.0),
            intensity: 1.0,
        },
    };

    let camera_path = desc
        .cameras
        .iter()
        .map(|c| CameraKeyframe {
            frame: c.frame,
            camera: Camera::look_at(v3(c.eye), v3(c.look), v3(c.up), c.fov_deg, aspect),
        })
        .collect();

    Ok(Scene {
        environment,
        primitives,
        light,
        ambient: desc.ambient.unwrap_or(0.1),
        camera_path,
    })
}

/// Minimal Wavefront OBJ loader: `v` positions and `f` faces (fan
/// triangulated, `v/vt/vn` references keep only the position index,
/// negative indices count from the end). Everything else is ignored.
pub fn load_obj(path: &Path, material: Material) -> Result<TriangleMesh, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();

    let obj_bad = |line_no: usize, msg: String| {
        CliError::parse(format!("{} parse error at line {line_no}: {msg}", path.display()))
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.first() {
            Some(&"v") => {
                if tokens.len() < 4 {
                    return Err(obj_bad(line_no, "vertex needs three coordinates".into()));
                }
                let mut coords = [0.0; 3];
                for (i, c) in coords.iter_mut().enumerate() {
                    *c = tokens[i + 1]
                        .parse::<f64>()
                        .map_err(|_| obj_bad(line_no, format!("`{}` is not a number", tokens[i + 1])))?;
                }
                vertices.push(v3(coords));
            }
            Some(&"f") => {
                if tokens.len() < 4 {
                    return Err(obj_bad(line_no, "face needs at least three vertices".into()));
                }
                let mut indices = Vec::with_capacity(tokens.len() - 1);
                for tok in &tokens[1..] {
                    let first = tok.split('/').next().unwrap_or("");
                    let raw_idx = first
                        .parse::<i64>()
                        .map_err(|_| obj_bad(line_no, format!("`{tok}` is not a vertex reference")))?;
                    let resolved = if raw_idx > 0 {
                        raw_idx - 1
                    } else if raw_idx < 0 {
                        vertices.len() as i64 + raw_idx
                    } else {
                        return Err(obj_bad(line_no, "vertex indices are 1-based; 0 is invalid".into()));
                    };
                    if resolved < 0 || resolved as usize >= vertices.len() {
                        return Err(obj_bad(line_no, format!("vertex index {raw_idx} out of range")));
                    }
                    indices.push(resolved as u32);
                }
                for i in 1..indices.len() - 1 {
                    let tri = [indices[0], indices[i], indices[i + 1]];
                    let e1 = vertices[tri[1] as usize] - vertices[tri[0] as usize];
                    let e2 = vertices[tri[2] as usize] - vertices[tri[0] as usize];
                    if e1.cross(e2).length() < 1e-12 {
                        return Err(obj_bad(line_no, "degenerate (zero-area) triangle".into()));
                    }
                    triangles.push(tri);
                }
            }
            _ => {}
        }
    }

    if triangles.is_empty() {
        return Err(CliError::parse(format!("{}: no faces found", path.display())));
    }
    Ok(TriangleMesh { vertices, triangles, material })
}

/// The built-in example: an environment texture, three spheres (one textured
/// with the same image), a tilted light and a single camera keyframe.
pub fn example_desc() -> SceneDesc {
    SceneDesc {
        env_path: Some("example_env.png".to_string()),
        spheres: vec![
            SphereDesc {
                center: [-1.4, 0.0, 5.0],
                radius: 1.0,
                material: MaterialDesc::Albedo([0.9, 0.25, 0.2]),
            },
            SphereDesc {
                center: [1.2, -0.3, 6.5],
                radius: 1.2,
                material: MaterialDesc::Albedo([0.2, 0.5, 0.9]),
            },
            SphereDesc {
                center: [0.2, 1.1, 8.0],
                radius: 1.5,
                material: MaterialDesc::Texture("example_env.png".to_string()),
            },
        ],
        meshes: vec![],
        light: Some([-0.4, -1.0, -0.3, 0.9]),
        ambient: Some(0.15),
        cameras: vec![CameraDesc {
            frame: 0,
            eye: [0.0, 0.0, 0.0],
            look: [0.0, 0.0, 1.0],
            up: [0.0, 1.0, 0.0],
            fov_deg: 60.0,
        }],
    }
}

/// Write `example.scn` plus its environment texture into `dir`; returns the
/// scene path.
pub fn write_example(dir: &Path) -> Result<std::path::PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let env = camerapaint::fixtures::band_texture(256, 128);
    imgio::write_color_image_png(&dir.join("example_env.png"), &env)?;
    let scene_path = dir.join("example.scn");
    fs::write(&scene_path, emit(&example_desc())).map_err(|e| CliError::io(&scene_path, e))?;
    Ok(scene_path)
}
