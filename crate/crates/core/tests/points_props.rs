use std::io::Write;

use mq_helmholtz::points::{
    generate_cube, generate_sphere, import_msh_nodes, import_point_cloud, write_point_cloud,
    Distribution, HaltonPoints, PointSet,
};
use mq_helmholtz::{Error, Vec3};

fn distributions() -> [Distribution; 3] {
    [
        Distribution::Random { seed: 11 },
        Distribution::Uniform,
        Distribution::Halton { start_index: 1 },
    ]
}

fn on_cube_surface(p: &Vec3) -> bool {
    p.iter().any(|&c| c == 0.0 || c == 1.0)
}

#[test]
fn generators_are_deterministic() {
    for d in distributions() {
        assert_eq!(generate_cube(200, d).unwrap(), generate_cube(200, d).unwrap());
        assert_eq!(generate_sphere(200, d).unwrap(), generate_sphere(200, d).unwrap());
    }
}

#[test]
fn cube_labels_match_membership_oracle() {
    for d in distributions() {
        for n in [27, 125, 359, 1000] {
            let s = generate_cube(n, d).unwrap();
            for p in s.interior() {
                assert!(!on_cube_surface(p) && p.iter().all(|&c| c > 0.0 && c < 1.0));
            }
            for b in s.boundary() {
                assert!(on_cube_surface(&b.position));
                assert!(b.position.iter().all(|&c| (0.0..=1.0).contains(&c)));
                // Outward: stepping along the normal leaves the cube.
                let out = b.position + b.normal * 1e-3;
                assert!(out.iter().any(|&c| !(0.0..=1.0).contains(&c)));
            }
            assert!(s.min_pairwise_distance() > 0.0);
        }
    }
}

#[test]
fn sphere_labels_match_membership_oracle() {
    for d in distributions() {
        for n in [30, 359, 800] {
            let s = generate_sphere(n, d).unwrap();
            assert!(s.interior().iter().all(|p| p.norm() < 1.0));
            for b in s.boundary() {
                assert!((b.position.norm() - 1.0).abs() < 1e-12);
                assert!((b.normal - b.position).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn paper_sized_sets() {
    let c = generate_cube(359, Distribution::Random { seed: 42 }).unwrap();
    assert_eq!(c.len(), 359);
    let s = generate_sphere(359, Distribution::Halton { start_index: 1 }).unwrap();
    assert_eq!(s.len(), 359);
    assert_eq!(s, generate_sphere(359, Distribution::Halton { start_index: 1 }).unwrap());
    assert!(generate_sphere(29, Distribution::Uniform).is_err());
    assert!(generate_cube(26, Distribution::Uniform).is_err());
}

#[test]
fn halton_projections_are_open_and_distinct() {
    let pts: Vec<_> = HaltonPoints::new(1).take(100).collect();
    for (i, p) in pts.iter().enumerate() {
        assert!(p.iter().all(|&c| c > 0.0 && c < 1.0));
        for q in &pts[..i] {
            assert_ne!(p, q);
        }
    }
}

#[test]
fn native_format_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cloud.txt");
    for d in distributions() {
        let s = generate_sphere(150, d).unwrap();
        write_point_cloud(&s, &path).unwrap();
        let back = import_point_cloud(&path).unwrap();
        assert_eq!(back.interior(), s.interior());
        assert_eq!(back.boundary(), s.boundary());
    }
}

#[test]
fn missing_file_names_the_path() {
    let err = import_point_cloud("/nonexistent/cloud.txt").unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains("/nonexistent/cloud.txt"));
}

/// Unit cube: 8 corners, 6 face centres, one centre node; each face split
/// into 4 triangles around its centre.
fn cube_msh() -> String {
    let mut nodes = Vec::new();
    for i in 0..8 {
        nodes.push([(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]);
    }
    let faces: [(usize, f64); 6] = [(0, 0.0), (0, 1.0), (1, 0.0), (1, 1.0), (2, 0.0), (2, 1.0)];
    let mut tris = Vec::new();
    for (axis, val) in faces {
        let mut c = [0.5; 3];
        c[axis] = val;
        nodes.push(c);
        let centre = nodes.len();
        let mut ring: Vec<usize> = (0..8).filter(|&i| nodes[i][axis] == val).collect();
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        ring.sort_by(|&a, &b| {
            let ang = |i: usize| (nodes[i][v] - 0.5).atan2(nodes[i][u] - 0.5);
            ang(a).total_cmp(&ang(b))
        });
        for k in 0..4 {
            tris.push([centre, ring[k] + 1, ring[(k + 1) % 4] + 1]);
        }
    }
    nodes.push([0.5, 0.5, 0.5]);
    let mut s = String::from("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n");
    s.push_str(&format!("{}\n", nodes.len()));
    for (i, n) in nodes.iter().enumerate() {
        s.push_str(&format!("{} {} {} {}\n", i + 1, n[0], n[1], n[2]));
    }
    s.push_str("$EndNodes\n$Elements\n");
    s.push_str(&format!("{}\n", tris.len() + 1));
    for (i, t) in tris.iter().enumerate() {
        s.push_str(&format!("{} 2 2 1 1 {} {} {}\n", i + 1, t[0], t[1], t[2]));
    }
    s.push_str(&format!("{} 4 2 1 1 1 2 3 {}\n", tris.len() + 1, nodes.len()));
    s.push_str("$EndElements\n");
    s
}

fn write_temp(text: &str) -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mesh.msh");
    std::fs::File::create(&path)
        .unwrap()
        .write_all(text.as_bytes())
        .unwrap();
    (dir, path)
}

#[test]
fn msh_hull_nodes_are_boundary() {
    let (_dir, path) = write_temp(&cube_msh());
    let s: PointSet = import_msh_nodes(&path).unwrap();
    assert_eq!(s.n_interior(), 1);
    assert_eq!(s.n_boundary(), 14);
    assert_eq!(s.interior()[0], Vec3::new(0.5, 0.5, 0.5));
    for b in s.boundary() {
        assert!(on_cube_surface(&b.position));
        // Oriented away from the node centroid.
        assert!(b.normal.dot(&(b.position - Vec3::repeat(0.5))) > 0.0);
    }
}

#[test]
fn truncated_msh_names_the_section() {
    let text = cube_msh();
    let cut = text.find("$EndNodes").unwrap() - 20;
    let (_dir, path) = write_temp(&text[..cut]);
    let err = import_msh_nodes(&path).unwrap_err().to_string();
    assert!(err.contains("Nodes"), "{err}");
}
