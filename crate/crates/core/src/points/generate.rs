//! Node generators for the unit cube `[0,1]³` and the unit ball.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BoundaryNode, Distribution, HaltonPoints, PointSet};
use crate::{Error, Result, Vec3};

/// Faces of the unit cube in tie-breaking order: an edge or corner node takes
/// the normal of the lowest-index face it lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    XMin,
    XMax,
    YMin,
    YMax,
    ZMin,
    ZMax,
}

impl Face {
    pub const ALL: [Face; 6] = [
        Face::XMin,
        Face::XMax,
        Face::YMin,
        Face::YMax,
        Face::ZMin,
        Face::ZMax,
    ];

    pub fn normal(self) -> Vec3 {
        match self {
            Face::XMin => -Vec3::x(),
            Face::XMax => Vec3::x(),
            Face::YMin => -Vec3::y(),
            Face::YMax => Vec3::y(),
            Face::ZMin => -Vec3::z(),
            Face::ZMax => Vec3::z(),
        }
    }

    fn contains(self, p: &Vec3) -> bool {
        match self {
            Face::XMin => p.x == 0.0,
            Face::XMax => p.x == 1.0,
            Face::YMin => p.y == 0.0,
            Face::YMax => p.y == 1.0,
            Face::ZMin => p.z == 0.0,
            Face::ZMax => p.z == 1.0,
        }
    }

    /// Lowest-index face containing `p`, if `p` is on the cube surface.
    pub fn of_point(p: &Vec3) -> Option<Face> {
        Face::ALL.into_iter().find(|f| f.contains(p))
    }
}

/// Number of surface nodes of an `q×q×q` grid.
fn grid_surface_count(q: usize) -> usize {
    q * q * q - (q - 2).pow(3)
}

/// Boundary size for generators whose boundary layer is independent of the
/// interior: the surface share of a grid with about `n` nodes.
fn boundary_share(n: usize) -> usize {
    let mut q = ((n as f64).cbrt().round() as usize).max(3);
    while q > 3 && grid_surface_count(q) >= n {
        q -= 1;
    }
    grid_surface_count(q)
}

fn smallest_cube_side(n: usize) -> usize {
    let mut m = 1;
    while m * m * m < n {
        m += 1;
    }
    m
}

/// Surface nodes of the `q×q×q` grid on `[0,1]³`, in lexicographic order.
fn cube_surface_grid(q: usize) -> Vec<BoundaryNode> {
    let h = 1.0 / (q - 1) as f64;
    let coord = |i: usize| if i == q - 1 { 1.0 } else { i as f64 * h };
    let mut out = Vec::with_capacity(grid_surface_count(q));
    for i in 0..q {
        for j in 0..q {
            for k in 0..q {
                let p = Vec3::new(coord(i), coord(j), coord(k));
                if let Some(face) = Face::of_point(&p) {
                    out.push(BoundaryNode {
                        position: p,
                        normal: face.normal(),
                    });
                }
            }
        }
    }
    out
}

fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Nodes on the unit cube.
///
/// `Uniform` places an `m×m×m` grid with `m³ ≥ n_target` minimal. `Random` and
/// `Halton` fill the open cube with interior nodes and add a structured
/// boundary layer (the surface of a grid of comparable density), so that
/// `N = n_target` exactly.
pub fn generate_cube(n_target: usize, dist: Distribution) -> Result<PointSet> {
    if n_target < 27 {
        return Err(Error::InvalidParameter(format!(
            "cube generator needs n_target ≥ 27, got {n_target}"
        )));
    }
    let label = format!("cube-{}-{n_target}", dist.name());
    match dist {
        Distribution::Uniform => {
            let m = smallest_cube_side(n_target);
            let h = 1.0 / (m - 1) as f64;
            let coord = |i: usize| if i == m - 1 { 1.0 } else { i as f64 * h };
            let mut interior = Vec::new();
            let mut boundary = Vec::new();
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        let p = Vec3::new(coord(i), coord(j), coord(k));
                        match Face::of_point(&p) {
                            Some(face) => boundary.push(BoundaryNode {
                                position: p,
                                normal: face.normal(),
                            }),
                            None => interior.push(p),
                        }
                    }
                }
            }
            PointSet::new(interior, boundary, label)
        }
        Distribution::Random { seed } => {
            let n_b = boundary_share(n_target);
            let q = (3..).find(|&q| grid_surface_count(q) == n_b).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let interior = (0..n_target - n_b)
                .map(|_| {
                    let x = open_unit(&mut rng);
                    let y = open_unit(&mut rng);
                    let z = open_unit(&mut rng);
                    Vec3::new(x, y, z)
                })
                .collect();
            PointSet::new(interior, cube_surface_grid(q), label)
        }
        Distribution::Halton { start_index } => {
            let n_b = boundary_share(n_target);
            let q = (3..).find(|&q| grid_surface_count(q) == n_b).unwrap();
            let interior = HaltonPoints::new(start_index)
                .take(n_target - n_b)
                .collect();
            PointSet::new(interior, cube_surface_grid(q), label)
        }
    }
}

/// Fibonacci lattice with `n` nodes on the unit sphere. Each node is its own
/// outward normal.
fn fibonacci_sphere(n: usize) -> Vec<BoundaryNode> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let theta = golden_angle * i as f64;
            let q = Vec3::new(rho * theta.cos(), rho * theta.sin(), z).normalize();
            BoundaryNode {
                position: q,
                normal: q,
            }
        })
        .collect()
}

/// Nodes in the unit ball with a Fibonacci-lattice boundary.
///
/// `Random` and `Halton` interiors are rejection-sampled from `[−1,1]³` and
/// give `N = n_target` exactly; `Uniform` keeps the nodes of a cell-centred
/// cube grid lying at least half a spacing inside the sphere, so `N` is only
/// approximately `n_target`.
pub fn generate_sphere(n_target: usize, dist: Distribution) -> Result<PointSet> {
    if n_target < 30 {
        return Err(Error::InvalidParameter(format!(
            "sphere generator needs n_target ≥ 30, got {n_target}"
        )));
    }
    let label = format!("sphere-{}-{n_target}", dist.name());
    let n_b = boundary_share(n_target);
    let n_i = n_target - n_b;
    let inside = |p: &Vec3| p.norm_squared() < 1.0;
    let interior: Vec<Vec3> = match dist {
        Distribution::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pts = Vec::with_capacity(n_i);
            while pts.len() < n_i {
                let p = Vec3::new(
                    2.0 * rng.random::<f64>() - 1.0,
                    2.0 * rng.random::<f64>() - 1.0,
                    2.0 * rng.random::<f64>() - 1.0,
                );
                if inside(&p) {
                    pts.push(p);
                }
            }
            pts
        }
        Distribution::Halton { start_index } => HaltonPoints::new(start_index)
            .map(|h| h * 2.0 - Vec3::repeat(1.0))
            .filter(inside)
            .take(n_i)
            .collect(),
        Distribution::Uniform => {
            let grid = |m: usize| -> Vec<Vec3> {
                let h = 2.0 / m as f64;
                let c = |i: usize| -1.0 + (i as f64 + 0.5) * h;
                let mut pts = Vec::new();
                for i in 0..m {
                    for j in 0..m {
                        for k in 0..m {
                            let p = Vec3::new(c(i), c(j), c(k));
                            if p.norm() <= 1.0 - 0.5 * h {
                                pts.push(p);
                            }
                        }
                    }
                }
                pts
            };
            (1..)
                .map(grid)
                .find(|pts| pts.len() >= n_i)
                .expect("grid count grows without bound")
        }
    };
    PointSet::new(interior, fibonacci_sphere(n_b), label)
}
