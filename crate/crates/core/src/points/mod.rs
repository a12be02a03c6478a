//! Collocation node sets: interior nodes where the PDE is enforced and
//! boundary nodes (with outward unit normals) where the boundary condition is
//! imposed.

mod generate;
mod halton;
mod msh;
mod native;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

pub use generate::{generate_cube, generate_sphere, Face};
pub use halton::{halton, HaltonPoints};
pub use msh::import_msh_nodes;
pub use native::{import_point_cloud, parse_point_cloud, write_point_cloud};

/// Tolerance on `‖n‖₂ − 1` for boundary normals.
pub const NORMAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    pub position: Vec3,
    pub normal: Vec3,
}

/// How generated nodes are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Distribution {
    Random { seed: u64 },
    Uniform,
    Halton { start_index: u64 },
}

impl Distribution {
    pub fn name(&self) -> &'static str {
        match self {
            Distribution::Random { .. } => "random",
            Distribution::Uniform => "uniform",
            Distribution::Halton { .. } => "halton",
        }
    }
}

impl std::str::FromStr for Distribution {
    type Err = Error;

    /// Parses `random[:seed]`, `uniform` or `halton[:start_index]`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let bad = || Error::InvalidParameter(format!("unrecognised distribution `{s}`"));
        let num = |a: Option<&str>, default: u64| -> Result<u64> {
            a.map_or(Ok(default), |a| a.parse().map_err(|_| bad()))
        };
        match kind {
            "random" => Ok(Distribution::Random { seed: num(arg, 0)? }),
            "uniform" if arg.is_none() => Ok(Distribution::Uniform),
            "halton" => {
                let start_index = num(arg, 1)?;
                if start_index == 0 {
                    return Err(bad());
                }
                Ok(Distribution::Halton { start_index })
            }
            _ => Err(bad()),
        }
    }
}

/// A validated set of collocation nodes. Immutable once constructed.
///
/// Centers are indexed interior first, then boundary; the same order is used
/// for the columns of the collocation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    interior: Vec<Vec3>,
    boundary: Vec<BoundaryNode>,
    label: String,
}

impl PointSet {
    pub fn new(
        interior: Vec<Vec3>,
        boundary: Vec<BoundaryNode>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if interior.is_empty() {
            return Err(Error::InvalidPointSet("N_I ≥ 1 required".into()));
        }
        if boundary.is_empty() {
            return Err(Error::InvalidPointSet("N_B ≥ 1 required".into()));
        }
        for (i, b) in boundary.iter().enumerate() {
            if (b.normal.norm() - 1.0).abs() > NORMAL_TOLERANCE {
                return Err(Error::InvalidPointSet(format!(
                    "boundary node {i} has non-unit normal (norm {})",
                    b.normal.norm()
                )));
            }
        }
        let mut seen = HashSet::with_capacity(interior.len() + boundary.len());
        let all = interior.iter().chain(boundary.iter().map(|b| &b.position));
        for (i, p) in all.enumerate() {
            if !p.iter().all(|c| c.is_finite()) {
                return Err(Error::InvalidPointSet(format!("node {i} is not finite")));
            }
            // +0.0 folds -0.0 onto the same bit pattern.
            let key = [
                (p.x + 0.0).to_bits(),
                (p.y + 0.0).to_bits(),
                (p.z + 0.0).to_bits(),
            ];
            if !seen.insert(key) {
                return Err(Error::InvalidPointSet(format!(
                    "duplicate point ({}, {}, {}) at node {i}",
                    p.x, p.y, p.z
                )));
            }
        }
        Ok(Self {
            interior,
            boundary,
            label: label.into(),
        })
    }

    pub fn interior(&self) -> &[Vec3] {
        &self.interior
    }

    pub fn boundary(&self) -> &[BoundaryNode] {
        &self.boundary
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n_interior(&self) -> usize {
        self.interior.len()
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary.len()
    }

    pub fn len(&self) -> usize {
        self.interior.len() + self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All centers, interior first.
    pub fn centers(&self) -> impl Iterator<Item = &Vec3> + '_ {
        self.interior
            .iter()
            .chain(self.boundary.iter().map(|b| &b.position))
    }

    pub fn centers_vec(&self) -> Vec<Vec3> {
        self.centers().copied().collect()
    }

    /// Smallest distance between any two nodes. O(N²).
    pub fn min_pairwise_distance(&self) -> f64 {
        let c = self.centers_vec();
        let mut best = f64::INFINITY;
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                best = best.min((c[i] - c[j]).norm());
            }
        }
        best
    }
}
