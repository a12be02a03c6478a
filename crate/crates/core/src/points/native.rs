//! The native point-cloud text format.
//!
//! ```text
//! pointset v1
//! # comment
//! I x y z
//! B x y z nx ny nz
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{BoundaryNode, PointSet, NORMAL_TOLERANCE};
use crate::{Error, Result, Vec3};

const HEADER: &str = "pointset v1";

/// Normals further than this from unit length are rejected rather than
/// renormalized.
const NORMAL_REPAIR_LIMIT: f64 = 0.1;

pub fn import_point_cloud(path: impl AsRef<Path>) -> Result<PointSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_point_cloud(&text, path, label)
}

pub fn parse_point_cloud(text: &str, path: &Path, label: impl Into<String>) -> Result<PointSet> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    let mut seen_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            if line != HEADER {
                return Err(err(line_no, format!("expected header `{HEADER}`")));
            }
            seen_header = true;
            continue;
        }
        let mut fields = line.split_whitespace();
        let tag = fields.next().unwrap();
        let values = fields
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| err(line_no, format!("invalid number `{f}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        match (tag, values.len()) {
            ("I", 3) => interior.push(Vec3::new(values[0], values[1], values[2])),
            ("B", 6) => {
                let mut normal = Vec3::new(values[3], values[4], values[5]);
                let norm = normal.norm();
                if (norm - 1.0).abs() > NORMAL_TOLERANCE {
                    if (norm - 1.0).abs() > NORMAL_REPAIR_LIMIT {
                        return Err(err(line_no, format!("normal has norm {norm}, not unit")));
                    }
                    log::warn!(
                        "{}:{line_no}: normal with norm {norm} renormalized",
                        path.display()
                    );
                    normal /= norm;
                }
                boundary.push(BoundaryNode {
                    position: Vec3::new(values[0], values[1], values[2]),
                    normal,
                });
            }
            ("I", n) => return Err(err(line_no, format!("interior line needs 3 values, got {n}"))),
            ("B", n) => return Err(err(line_no, format!("boundary line needs 6 values, got {n}"))),
            (t, _) => return Err(err(line_no, format!("unknown record tag `{t}`"))),
        }
    }
    if !seen_header {
        return Err(err(0, format!("missing header `{HEADER}`")));
    }
    PointSet::new(interior, boundary, label)
}

pub fn write_point_cloud(points: &PointSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(
        out,
        "# {} N_I={} N_B={}",
        points.label(),
        points.n_interior(),
        points.n_boundary()
    );
    for p in points.interior() {
        let _ = writeln!(out, "I {} {} {}", p.x, p.y, p.z);
    }
    for b in points.boundary() {
        let (p, n) = (b.position, b.normal);
        let _ = writeln!(out, "B {} {} {} {} {} {}", p.x, p.y, p.z, n.x, n.y, n.z);
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
