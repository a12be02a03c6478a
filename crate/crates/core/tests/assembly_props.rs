use std::sync::Arc;

use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mq_helmholtz::assembly::{
    assemble, condition_number, constant_field, interpolation_matrix, BoundarySpec, ProblemSpec,
};
use mq_helmholtz::evaluate::{exact_u, reconstruct, ManufacturedCase};
use mq_helmholtz::kernel::{mq_helmholtz, mq_value, KernelParams};
use mq_helmholtz::points::{generate_cube, generate_sphere, Distribution, PointSet};
use mq_helmholtz::regularize::{tikh_rg_solve, LambdaGrid, ParameterRule};
use mq_helmholtz::Vec3;

#[test]
fn interpolation_matrix_is_exactly_symmetric() {
    let s = generate_sphere(120, Distribution::Random { seed: 1 }).unwrap();
    let b = interpolation_matrix(&s, KernelParams::new(1.3).unwrap());
    assert_eq!(b, b.transpose());
}

#[test]
fn rows_follow_the_kernel_closed_forms() {
    let s = generate_cube(125, Distribution::Halton { start_index: 1 }).unwrap();
    let p = KernelParams::new(2.0).unwrap();
    let case = ManufacturedCase::cube(3.0);
    let sys = assemble(&s, &case.problem(p).unwrap()).unwrap();
    let c = s.centers_vec();
    assert_eq!(sys.matrix.shape(), (s.len(), s.len()));
    for (i, x) in c.iter().enumerate() {
        for (j, y) in c.iter().enumerate() {
            let expect = if i < s.n_interior() {
                mq_helmholtz((x - y).norm(), p, 3.0)
            } else {
                mq_value((x - y).norm(), p)
            };
            assert_eq!(sys.matrix[(i, j)], expect);
        }
    }
    for (i, b) in s.boundary().iter().enumerate() {
        assert_eq!(sys.rhs[s.n_interior() + i], exact_u(&case, &b.position));
    }
}

fn shuffled(s: &PointSet, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut interior = s.interior().to_vec();
    let mut boundary = s.boundary().to_vec();
    interior.shuffle(&mut rng);
    boundary.shuffle(&mut rng);
    PointSet::new(interior, boundary, s.label()).unwrap()
}

#[test]
fn center_order_does_not_change_the_solution() {
    let s = generate_cube(64, Distribution::Uniform).unwrap();
    let t = shuffled(&s, 5);
    let p = KernelParams::new(3.0).unwrap();
    let spec = ManufacturedCase::cube(3.0).problem(p).unwrap();
    let targets: Vec<Vec3> = (0..20)
        .map(|i| Vec3::new(0.05 * i as f64, 0.3, 0.7 - 0.02 * i as f64))
        .collect();
    let mut vals = Vec::new();
    for pts in [&s, &t] {
        let sys = assemble(pts, &spec).unwrap();
        let alpha = sys.matrix.clone().lu().solve(&sys.rhs).unwrap();
        vals.push(reconstruct(&alpha, pts, p, &targets).unwrap());
    }
    for (a, b) in vals[0].iter().zip(&vals[1]) {
        assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn constant_harmonic_solution() {
    let s = generate_cube(125, Distribution::Uniform).unwrap();
    let p = KernelParams::new(1.0).unwrap();
    let spec = ProblemSpec::new(
        0.0,
        p,
        BoundarySpec::dirichlet(),
        constant_field(0.0),
        constant_field(1.0),
    )
    .unwrap();
    let sys = assemble(&s, &spec).unwrap();
    let r = tikh_rg_solve(&sys.matrix, &sys.rhs, ParameterRule::Gcv, &LambdaGrid::default()).unwrap();
    let bnodes: Vec<Vec3> = s.boundary().iter().map(|b| b.position).collect();
    let u = reconstruct(&r.alpha, &s, p, &bnodes).unwrap();
    assert!(u.iter().all(|v| (v - 1.0).abs() <= 1e-2));
}

#[test]
fn robin_rows_use_normal_derivative() {
    let s = generate_sphere(60, Distribution::Halton { start_index: 1 }).unwrap();
    let p = KernelParams::new(1.0).unwrap();
    let spec = ProblemSpec::new(
        1.0,
        p,
        BoundarySpec::robin(constant_field(2.0), Arc::new(|x: &Vec3| 1.0 + x.z)),
        constant_field(0.0),
        constant_field(0.0),
    )
    .unwrap();
    let sys = assemble(&s, &spec).unwrap();
    let c = s.centers_vec();
    let ni = s.n_interior();
    for (ib, b) in s.boundary().iter().enumerate() {
        for (j, y) in c.iter().enumerate() {
            let d = b.position - y;
            let r = d.norm();
            let dphi = if r == 0.0 { 0.0 } else { d.dot(&b.normal) / (1.0 + r * r).sqrt() };
            let expect = 2.0 * mq_value(r, p) + (1.0 + b.position.z) * dphi;
            assert!((sys.matrix[(ni + ib, j)] - expect).abs() < 1e-14);
        }
    }
}

#[test]
fn cube_system_is_severely_ill_conditioned() {
    let s = generate_cube(359, Distribution::Random { seed: 42 }).unwrap();
    let p = KernelParams::new(0.5).unwrap();
    let sys = assemble(&s, &ManufacturedCase::cube(3.0).problem(p).unwrap()).unwrap();
    let k = condition_number(&sys.matrix).unwrap();
    assert!(k >= 1e12, "{k:e}");
    assert!(sys.interior_residual(&DVector::zeros(s.len())) > 0.0);
}
