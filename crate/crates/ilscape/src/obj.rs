//! Wavefront OBJ meshes: `v` and `f` records only. Normals are recomputed.

use std::fmt::Write as _;
use std::path::Path;

use ilscape_core::geometry::Mesh;
use ilscape_core::Vec3;

use crate::error::{read, write, Context, Error, Result};

/// Mesh plus the optional per-vertex colors (`v x y z r g b`).
#[derive(Clone, Debug)]
pub struct ObjMesh {
    pub mesh: Mesh,
    pub colors: Option<Vec<[f64; 3]>>,
}

pub fn load_mesh(path: &Path) -> Result<Mesh> {
    Ok(load_obj(path)?.mesh)
}

pub fn load_obj(path: &Path) -> Result<ObjMesh> {
    parse_obj(&read(path)?, path)
}

pub fn parse_obj(text: &str, path: &Path) -> Result<ObjMesh> {
    let mut vertices = Vec::new();
    let mut colors = Vec::new();
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let bad = |msg: String| Error::parse(path, format!("line {}", n + 1), msg);
        let line = line.split('#').next().unwrap_or("");
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let nums = it
                    .map(|s| s.parse::<f64>().map_err(|_| bad(format!("bad number `{s}`"))))
                    .collect::<Result<Vec<f64>>>()?;
                match nums.len() {
                    3 | 4 => {}
                    6 | 7 => colors.push([nums[3], nums[4], nums[5]]),
                    k => return Err(bad(format!("vertex record has {k} numbers"))),
                }
                vertices.push(Vec3::new(nums[0], nums[1], nums[2]));
            }
            Some("f") => {
                let mut face = Vec::new();
                for tok in it {
                    let first = tok.split('/').next().unwrap_or("");
                    let i: i64 = first.parse().map_err(|_| bad(format!("bad face index `{tok}`")))?;
                    let idx = match i {
                        i if i > 0 => i - 1,
                        i if i < 0 => vertices.len() as i64 + i,
                        _ => return Err(bad("face index 0".into())),
                    };
                    if idx < 0 {
                        return Err(bad(format!("face index {i} before the first vertex")));
                    }
                    face.push(idx as usize);
                }
                if face.len() < 3 {
                    return Err(bad("face with fewer than three vertices".into()));
                }
                faces.push(face);
            }
            _ => {}
        }
    }
    let colors = match colors.len() {
        0 => None,
        c if c == vertices.len() => Some(colors),
        _ => return Err(Error::parse(path, "vertices", "only some vertices carry colors")),
    };
    let mesh = Mesh::from_polygons(vertices, &faces).context(|| format!("mesh {}", path.display()))?;
    Ok(ObjMesh { mesh, colors })
}

pub fn obj_string(mesh: &Mesh, colors: Option<&[[f64; 3]]>) -> String {
    let mut s = String::new();
    for (i, v) in mesh.vertices().iter().enumerate() {
        match colors {
            Some(c) => {
                let [r, g, b] = c[i];
                let _ = writeln!(s, "v {} {} {} {r:.6} {g:.6} {b:.6}", v.x, v.y, v.z);
            }
            None => {
                let _ = writeln!(s, "v {} {} {}", v.x, v.y, v.z);
            }
        }
    }
    for [a, b, c] in mesh.triangles() {
        let _ = writeln!(s, "f {} {} {}", a + 1, b + 1, c + 1);
    }
    s
}

pub fn save_mesh(path: &Path, mesh: &Mesh, colors: Option<&[[f64; 3]]>) -> Result<()> {
    write(path, obj_string(mesh, colors))
}

/// Blue (0) through white (0.5) to red (1).
pub fn heat_color(s: f64) -> [f64; 3] {
    let s = s.clamp(0.0, 1.0);
    if s < 0.5 {
        let t = s * 2.0;
        [t, t, 1.0]
    } else {
        let t = (1.0 - s) * 2.0;
        [1.0, t, t]
    }
}
