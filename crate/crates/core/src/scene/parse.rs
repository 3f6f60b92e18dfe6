//! Line-oriented scene format.
//!
//! ```text
//! camera px py pz lx ly lz ux uy uz fov_y width height
//! material <name> lambert r g b
//! material <name> phong r g b exponent
//! sphere cx cy cz radius <material> [bump amp freq]
//! quad ax ay az bx by bz cx cy cz dx dy dz <material> [smoothnormals n0x .. n3z]
//! light <shape-index> Lr Lg Lb
//! option rr_depth|rr_q|max_depth|merge_radius|random_connect <value>
//! ```

use std::collections::HashMap;
use std::fmt::Write;

use super::{Bump, Camera, Geometry, Material, MaterialKind, Scene, SceneOptions, Shape};
use crate::color::Rgb;
use crate::error::{Error, Result};
use crate::vecmath::Vec3;

struct Line<'a> {
    number: usize,
    tokens: Vec<&'a str>,
    pos: usize,
}

impl<'a> Line<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: self.number, message: message.into() })
    }

    fn word(&mut self, what: &str) -> Result<&'a str> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t)
            }
            None => self.err(format!("missing {what}")),
        }
    }

    fn real(&mut self, what: &str) -> Result<f64> {
        let t = self.word(what)?;
        match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => self.err(format!("expected a number for {what}, got '{t}'")),
        }
    }

    fn int(&mut self, what: &str) -> Result<usize> {
        let t = self.word(what)?;
        t.parse::<usize>().or_else(|_| self.err(format!("expected a non-negative integer for {what}, got '{t}'")))
    }

    fn vec3(&mut self, what: &str) -> Result<Vec3> {
        Ok(Vec3::new(self.real(what)?, self.real(what)?, self.real(what)?))
    }

    fn rgb(&mut self, what: &str) -> Result<Rgb> {
        Ok(Rgb::new(self.real(what)?, self.real(what)?, self.real(what)?))
    }

    fn at_end(&self) -> bool {
        self.pos == self.tokens.len()
    }

    fn finish(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.err(format!("unexpected trailing token '{}'", self.tokens[self.pos]))
        }
    }
}

pub fn parse_scene(text: &str) -> Result<Scene> {
    let mut camera = None;
    let mut materials: Vec<Material> = Vec::new();
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut shapes = Vec::new();
    let mut lights = Vec::new();
    let mut options = SceneOptions::default();

    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let mut l = Line { number: idx + 1, tokens, pos: 0 };
        let directive = l.word("directive")?;
        match directive {
            "camera" => {
                if camera.is_some() {
                    return l.err("duplicate camera");
                }
                let p = l.vec3("camera position")?;
                let at = l.vec3("camera look_at")?;
                let up = l.vec3("camera up")?;
                let fov = l.real("fov_y")?;
                let w = l.int("width")?;
                let h = l.int("height")?;
                l.finish()?;
                camera = Some(Camera::new(p, at, up, fov, w, h).map_err(|e| Error::Parse { line: l.number, message: e.to_string() })?);
            }
            "material" => {
                let name = l.word("material name")?.to_string();
                if names.contains_key(&name) {
                    return l.err(format!("duplicate material '{name}'"));
                }
                let kind = l.word("material kind")?;
                let albedo = l.rgb("albedo")?;
                for c in albedo.to_array() {
                    if c >= 1.0 {
                        return l.err("albedo must be < 1");
                    }
                    if c < 0.0 {
                        return l.err("albedo must be >= 0");
                    }
                }
                let kind = match kind {
                    "lambert" => MaterialKind::Lambert,
                    "phong" => {
                        let exponent = l.real("phong exponent")?;
                        if exponent < 0.0 {
                            return l.err("phong exponent must be >= 0");
                        }
                        MaterialKind::Phong { exponent }
                    }
                    other => return l.err(format!("unknown material kind '{other}'")),
                };
                l.finish()?;
                names.insert(name.clone(), materials.len());
                materials.push(Material { name, kind, albedo });
            }
            "sphere" => {
                let center = l.vec3("sphere center")?;
                let radius = l.real("radius")?;
                let material = material_ref(&mut l, &names)?;
                let bump = if l.at_end() {
                    None
                } else {
                    match l.word("modifier")? {
                        "bump" => Some(Bump { amplitude: l.real("bump amplitude")?, frequency: l.real("bump frequency")? }),
                        other => return l.err(format!("unknown sphere modifier '{other}'")),
                    }
                };
                l.finish()?;
                shapes.push(Shape { geometry: Geometry::Sphere { center, radius, bump }, material });
            }
            "quad" => {
                let corners = [l.vec3("corner a")?, l.vec3("corner b")?, l.vec3("corner c")?, l.vec3("corner d")?];
                let material = material_ref(&mut l, &names)?;
                let normals = if l.at_end() {
                    None
                } else {
                    match l.word("modifier")? {
                        "smoothnormals" => Some([l.vec3("normal")?, l.vec3("normal")?, l.vec3("normal")?, l.vec3("normal")?]),
                        other => return l.err(format!("unknown quad modifier '{other}'")),
                    }
                };
                l.finish()?;
                if let Some(ns) = normals {
                    let ng = super::quad_normal(&corners);
                    if ns.iter().any(|n| n.dot(ng) <= 0.0) {
                        return l.err("shading normal flipped against the geometric normal");
                    }
                }
                shapes.push(Shape { geometry: Geometry::Quad { corners, normals }, material });
            }
            "light" => {
                let shape = l.int("shape index")?;
                let radiance = l.rgb("radiance")?;
                l.finish()?;
                if shape >= shapes.len() {
                    return l.err(format!("light references shape {shape}, which is not defined above"));
                }
                lights.push((shape, radiance));
            }
            "option" => {
                let key = l.word("option name")?;
                match key {
                    "rr_depth" => options.rr_depth = l.int("rr_depth")?,
                    "rr_q" => {
                        let q = l.real("rr_q")?;
                        if !(q > 0.0 && q <= 1.0) {
                            return l.err("rr_q must lie in (0, 1]");
                        }
                        options.rr_q = q;
                    }
                    "max_depth" => {
                        let d = l.int("max_depth")?;
                        if d < 2 {
                            return l.err("max_depth must be >= 2");
                        }
                        options.max_depth = d;
                    }
                    "merge_radius" => {
                        let r = l.real("merge_radius")?;
                        if r <= 0.0 {
                            return l.err("merge_radius must be > 0");
                        }
                        options.merge_radius = Some(r);
                    }
                    "random_connect" => {
                        options.random_connect = match l.word("on|off")? {
                            "on" => true,
                            "off" => false,
                            other => return l.err(format!("random_connect expects on|off, got '{other}'")),
                        }
                    }
                    other => return l.err(format!("unknown option '{other}'")),
                }
                l.finish()?;
            }
            other => return l.err(format!("unknown directive '{other}'")),
        }
    }
    let camera = camera.ok_or_else(|| Error::InvalidScene("missing camera".into()))?;
    Scene::new(camera, materials, shapes, lights, options)
}

fn material_ref(l: &mut Line<'_>, names: &HashMap<String, usize>) -> Result<usize> {
    let name = l.word("material name")?;
    match names.get(name) {
        Some(&i) => Ok(i),
        None => l.err(format!("unknown material '{name}'")),
    }
}

fn v(out: &mut String, p: Vec3) {
    write!(out, " {:?} {:?} {:?}", p.x, p.y, p.z).unwrap();
}

/// Inverse of [`parse_scene`]; floats are written in shortest round-trip form.
pub fn serialize_scene(scene: &Scene) -> String {
    let mut out = String::new();
    let c = &scene.camera;
    out.push_str("camera");
    v(&mut out, c.position);
    v(&mut out, c.look_at);
    v(&mut out, c.up);
    writeln!(out, " {:?} {} {}", c.fov_y, c.width, c.height).unwrap();
    for m in &scene.materials {
        let a = m.albedo;
        match m.kind {
            MaterialKind::Lambert => writeln!(out, "material {} lambert {:?} {:?} {:?}", m.name, a.r, a.g, a.b),
            MaterialKind::Phong { exponent } => {
                writeln!(out, "material {} phong {:?} {:?} {:?} {:?}", m.name, a.r, a.g, a.b, exponent)
            }
        }
        .unwrap();
    }
    for s in &scene.shapes {
        let name = &scene.materials[s.material].name;
        match &s.geometry {
            Geometry::Sphere { center, radius, bump } => {
                out.push_str("sphere");
                v(&mut out, *center);
                write!(out, " {:?} {}", radius, name).unwrap();
                if let Some(b) = bump {
                    write!(out, " bump {:?} {:?}", b.amplitude, b.frequency).unwrap();
                }
            }
            Geometry::Quad { corners, normals } => {
                out.push_str("quad");
                for p in corners {
                    v(&mut out, *p);
                }
                write!(out, " {name}").unwrap();
                if let Some(ns) = normals {
                    out.push_str(" smoothnormals");
                    for n in ns {
                        v(&mut out, *n);
                    }
                }
            }
        }
        out.push('\n');
    }
    for e in &scene.emitters {
        writeln!(out, "light {} {:?} {:?} {:?}", e.shape, e.radiance.r, e.radiance.g, e.radiance.b).unwrap();
    }
    let o = &scene.options;
    writeln!(out, "option rr_depth {}", o.rr_depth).unwrap();
    writeln!(out, "option rr_q {:?}", o.rr_q).unwrap();
    writeln!(out, "option max_depth {}", o.max_depth).unwrap();
    if let Some(r) = o.merge_radius {
        writeln!(out, "option merge_radius {r:?}").unwrap();
    }
    writeln!(out, "option random_connect {}", if o.random_connect { "on" } else { "off" }).unwrap();
    out
}
