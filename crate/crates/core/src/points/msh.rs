//! Node import from ASCII Gmsh MSH version 2 files.
//!
//! Nodes referenced by a triangle (type 2) or quadrangle (type 3) element are
//! boundary nodes; every other node is interior. Tetrahedra (type 4) and the
//! point and line elements Gmsh always emits (types 15 and 1) are accepted and
//! only checked for valid node references.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use super::{BoundaryNode, PointSet};
use crate::{Error, Result, Vec3};

const LINE: u32 = 1;
const TRIANGLE: u32 = 2;
const QUAD: u32 = 3;
const TETRAHEDRON: u32 = 4;
const POINT: u32 = 15;

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    path: PathBuf,
}

impl<'a> Lines<'a> {
    fn next_in(&mut self, section: &str) -> Result<(usize, &'a str)> {
        match self.inner.next() {
            Some((i, l)) => Ok((i + 1, l.trim())),
            None => Err(self.err(format!("unexpected end of file in {section} section"))),
        }
    }

    fn err(&self, message: String) -> Error {
        Error::Msh {
            path: self.path.clone(),
            message,
        }
    }
}

pub fn import_msh_nodes(path: impl AsRef<Path>) -> Result<PointSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_msh(&text, path, label)
}

pub(crate) fn parse_msh(text: &str, path: &Path, label: String) -> Result<PointSet> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        path: path.to_path_buf(),
    };
    let mut version_ok = false;
    let mut nodes: Option<(Vec<usize>, Vec<Vec3>)> = None;
    let mut surfaces: Option<Vec<Vec<usize>>> = None;
    // Elements may precede nothing but must reference known nodes; keep raw
    // references until both sections are read.
    let mut element_refs: Vec<(usize, usize)> = Vec::new();

    while let Some((_, raw)) = lines.inner.next() {
        let line = raw.trim();
        match line {
            "$MeshFormat" => {
                let (n, l) = lines.next_in("$MeshFormat")?;
                let mut f = l.split_whitespace();
                let version = f.next().unwrap_or("");
                let file_type = f.next().unwrap_or("");
                if !version.starts_with("2.") && version != "2" {
                    return Err(lines.err(format!(
                        "line {n}: unsupported MSH version `{version}` (only ASCII v2)"
                    )));
                }
                if file_type != "0" {
                    return Err(lines.err(format!("line {n}: binary MSH files are not supported")));
                }
                version_ok = true;
                expect_end(&mut lines, "$MeshFormat")?;
            }
            "$Nodes" => {
                let count = read_count(&mut lines, "$Nodes")?;
                let mut ids = Vec::with_capacity(count);
                let mut pos = Vec::with_capacity(count);
                for _ in 0..count {
                    let (n, l) = lines.next_in("$Nodes")?;
                    let bad = || lines.err(format!("line {n}: malformed node in $Nodes section"));
                    let f: Vec<&str> = l.split_whitespace().collect();
                    if f.len() != 4 {
                        return Err(bad());
                    }
                    let id: usize = f[0].parse().map_err(|_| bad())?;
                    let xyz = f[1..]
                        .iter()
                        .map(|s| s.parse::<f64>().map_err(|_| bad()))
                        .collect::<Result<Vec<_>>>()?;
                    ids.push(id);
                    pos.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
                }
                expect_end(&mut lines, "$Nodes")?;
                nodes = Some((ids, pos));
            }
            "$Elements" => {
                let count = read_count(&mut lines, "$Elements")?;
                let mut faces = Vec::new();
                for _ in 0..count {
                    let (n, l) = lines.next_in("$Elements")?;
                    let bad =
                        || lines.err(format!("line {n}: malformed element in $Elements section"));
                    let f = l
                        .split_whitespace()
                        .map(|s| s.parse::<usize>().map_err(|_| bad()))
                        .collect::<Result<Vec<_>>>()?;
                    if f.len() < 3 || f.len() < 3 + f[2] + 1 {
                        return Err(bad());
                    }
                    let kind = f[1] as u32;
                    let refs = &f[3 + f[2]..];
                    match kind {
                        TRIANGLE | QUAD => faces.push(refs.to_vec()),
                        LINE | TETRAHEDRON | POINT => {}
                        other => {
                            return Err(lines.err(format!(
                                "line {n}: unsupported element type {other}"
                            )))
                        }
                    }
                    element_refs.extend(refs.iter().map(|&r| (n, r)));
                }
                expect_end(&mut lines, "$Elements")?;
                surfaces = Some(faces);
            }
            _ => {}
        }
    }

    if !version_ok {
        return Err(lines.err("missing $MeshFormat section".into()));
    }
    let (ids, pos) = nodes.ok_or_else(|| lines.err("missing $Nodes section".into()))?;
    let surfaces = surfaces.ok_or_else(|| lines.err("missing $Elements section".into()))?;

    let index: HashMap<usize, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    for &(line, r) in &element_refs {
        if !index.contains_key(&r) {
            return Err(lines.err(format!("line {line}: element references unknown node {r}")));
        }
    }

    let centroid = pos.iter().fold(Vec3::zeros(), |a, p| a + p) / pos.len().max(1) as f64;
    let mut accum = vec![Vec3::zeros(); pos.len()];
    let mut on_surface = vec![false; pos.len()];
    for face in &surfaces {
        let verts: Vec<usize> = face.iter().map(|id| index[id]).collect();
        let normal = newell_normal(&verts, &pos);
        let face_center = verts.iter().fold(Vec3::zeros(), |a, &v| a + pos[v]) / verts.len() as f64;
        let outward = if normal.dot(&(face_center - centroid)) < 0.0 {
            -normal
        } else {
            normal
        };
        let unit = outward.try_normalize(0.0).unwrap_or_else(Vec3::zeros);
        for &v in &verts {
            on_surface[v] = true;
            accum[v] += unit;
        }
    }

    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    for (i, p) in pos.into_iter().enumerate() {
        if on_surface[i] {
            let normal = accum[i]
                .try_normalize(1e-14)
                .or_else(|| (p - centroid).try_normalize(0.0))
                .ok_or_else(|| {
                    lines.err(format!("cannot orient normal at node {}", ids[i]))
                })?;
            boundary.push(BoundaryNode {
                position: p,
                normal,
            });
        } else {
            interior.push(p);
        }
    }
    PointSet::new(interior, boundary, label)
}

/// Polygon normal by Newell's method; its length is twice the polygon area.
fn newell_normal(verts: &[usize], pos: &[Vec3]) -> Vec3 {
    let mut n = Vec3::zeros();
    for (i, &a) in verts.iter().enumerate() {
        let b = verts[(i + 1) % verts.len()];
        n += pos[a].cross(&pos[b]);
    }
    n
}

fn read_count(lines: &mut Lines<'_>, section: &str) -> Result<usize> {
    let (n, l) = lines.next_in(section)?;
    l.parse()
        .map_err(|_| lines.err(format!("line {n}: expected entry count in {section} section")))
}

fn expect_end(lines: &mut Lines<'_>, section: &str) -> Result<()> {
    let end = format!("$End{}", &section[1..]);
    let (n, l) = lines.next_in(section)?;
    if l == end {
        Ok(())
    } else {
        Err(lines.err(format!("line {n}: expected `{end}` closing {section} section")))
    }
}
