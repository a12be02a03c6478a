use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, Geometry};
use crate::assembly::{assemble, condition_number, CollocationSystem};
use crate::evaluate::{exact_u, reconstruct, relative_error, ManufacturedCase};
use crate::kernel::KernelParams;
use crate::linop::{write_matrix, write_vector};
use crate::points::{generate_cube, generate_sphere, import_msh_nodes, import_point_cloud, PointSet};
use crate::regularize::{
    hkt_solve, ine_tsvd, reg_gmres, svd, tikh_rg_solve, tsvd_solve, Method, Param,
    ParameterRule, SolveReport,
};
use crate::{Error, Result, Vec3};

pub const CSV_HEADER: &str =
    "geometry,distribution,N,epsilon,kappa_A,method,param,Re_nodes,Re_offnodes,rho,eta,iterations,cpu_seconds";

/// One results row. Failed solves carry NaN in every numeric field after
/// `method`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub geometry: String,
    pub distribution: String,
    pub n: usize,
    pub epsilon: f64,
    pub kappa: f64,
    pub method: Method,
    /// λ* or the truncation rank.
    pub param: Option<Param>,
    pub re_nodes: f64,
    pub re_offnodes: f64,
    pub rho: f64,
    pub eta: f64,
    pub iterations: usize,
    pub cpu_seconds: f64,
    /// `‖Hα − f_I‖_∞`; logged, not written to the CSV.
    pub interior_residual: f64,
}

impl RunRow {
    pub fn to_csv(&self) -> String {
        let param = match self.param {
            Some(Param::Lambda(l)) => format!("{l:e}"),
            Some(Param::Rank(k)) => k.to_string(),
            None => "NaN".into(),
        };
        format!(
            "{},{},{},{},{:e},{},{},{:e},{:e},{:e},{:e},{},{:.6}",
            self.geometry,
            self.distribution,
            self.n,
            self.epsilon,
            self.kappa,
            self.method.name(),
            param,
            self.re_nodes,
            self.re_offnodes,
            self.rho,
            self.eta,
            self.iterations,
            self.cpu_seconds
        )
    }
}

#[derive(Debug)]
pub struct ExperimentOutput {
    pub rows: Vec<RunRow>,
    pub csv_path: PathBuf,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DumpFlags {
    pub matrix: bool,
    pub gcv: bool,
}

#[derive(Debug)]
pub struct SolveOutput {
    pub report: SolveReport,
    pub row: RunRow,
    pub files: Vec<PathBuf>,
}

pub fn build_points(cfg: &ExperimentConfig) -> Result<PointSet> {
    match &cfg.geometry {
        Geometry::Cube => generate_cube(cfg.n_target.unwrap_or(0), cfg.distribution),
        Geometry::Sphere => generate_sphere(cfg.n_target.unwrap_or(0), cfg.distribution),
        Geometry::Imported(p) => {
            if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("msh")) {
                import_msh_nodes(p)
            } else {
                import_point_cloud(p)
            }
        }
    }
}

/// Evaluation points away from the nodes: uniform random in the open cube or
/// ball; for imported geometry, random points on the segments joining random
/// interior nodes to their nearest neighbours.
pub fn offnode_targets(geometry: &Geometry, points: &PointSet, n: usize, seed: u64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6f66_666e_6f64_6573);
    let mut out = Vec::with_capacity(n);
    match geometry {
        Geometry::Cube => {
            while out.len() < n {
                let p = Vec3::new(rng.random(), rng.random(), rng.random());
                if p.iter().all(|&c| c > 0.0) {
                    out.push(p);
                }
            }
        }
        Geometry::Sphere => {
            while out.len() < n {
                let p = Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                if p.norm() < 1.0 {
                    out.push(p);
                }
            }
        }
        Geometry::Imported(_) => {
            let nodes = points.interior();
            if nodes.len() < 2 {
                return nodes.to_vec();
            }
            for _ in 0..n {
                let i = rng.random_range(0..nodes.len());
                let p = nodes[i];
                let q = nodes
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .min_by(|a, b| (a.1 - p).norm_squared().total_cmp(&(b.1 - p).norm_squared()))
                    .map(|(_, q)| *q)
                    .unwrap();
                let t: f64 = rng.random_range(0.25..0.75);
                out.push(p + (q - p) * t);
            }
        }
    }
    out
}

/// Adds a perturbation of relative 2-norm `level` to `f`.
fn add_noise(f: &mut DVector<f64>, level: f64, seed: u64) {
    if level == 0.0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6e6f_6973_65);
    let e = DVector::from_fn(f.len(), |_, _| rng.random_range(-1.0..1.0));
    let scale = level * f.norm() / e.norm();
    f.axpy(scale, &e, 1.0);
}

struct Prepared<'a> {
    cfg: &'a ExperimentConfig,
    case: ManufacturedCase,
    points: PointSet,
    nodes: Vec<Vec3>,
    targets: Vec<Vec3>,
    exact_nodes: Vec<f64>,
    exact_targets: Vec<f64>,
}

impl<'a> Prepared<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        let case = cfg.manufactured_case()?;
        let points = build_points(cfg)?;
        let nodes = points.centers_vec();
        let targets = offnode_targets(&cfg.geometry, &points, cfg.n_offnodes, cfg.seed);
        let exact_nodes = nodes.iter().map(|x| exact_u(&case, x)).collect();
        let exact_targets = targets.iter().map(|x| exact_u(&case, x)).collect();
        Ok(Self {
            cfg,
            case,
            points,
            nodes,
            targets,
            exact_nodes,
            exact_targets,
        })
    }

    fn system(&self, eps: f64) -> Result<(CollocationSystem, f64)> {
        let start = Instant::now();
        let p = KernelParams::new(eps)?;
        let mut sys = assemble(&self.points, &self.case.problem(p)?)?;
        add_noise(&mut sys.rhs, self.cfg.rhs_noise, self.cfg.seed);
        Ok((sys, start.elapsed().as_secs_f64()))
    }

    fn solve(&self, sys: &CollocationSystem, method: Method) -> Result<SolveReport> {
        let cfg = self.cfg;
        let ell = cfg.subspace().unwrap_or(0);
        let (a, f) = (&sys.matrix, &sys.rhs);
        match method {
            Method::TikhRg => tikh_rg_solve(a, f, cfg.rule, &cfg.lambda_grid),
            Method::Tsvd => match cfg.k_trunc {
                super::KTrunc::Fixed(k) => tsvd_solve(&svd(a)?, f, k),
                super::KTrunc::Auto => Err(Error::Config(vec!["tsvd needs a fixed k_trunc".into()])),
            },
            Method::IneTsvd => ine_tsvd(a, f, ell, cfg.k_trunc.truncation()),
            Method::Hkt => hkt_solve(a, f, ell, cfg.rule, &cfg.lambda_grid),
            Method::RegGmres => reg_gmres(a, f, ell, &cfg.lambda_grid, None),
        }
    }

    fn blank_row(&self, eps: f64, kappa: f64, method: Method) -> RunRow {
        RunRow {
            geometry: self.cfg.geometry.name(),
            distribution: self.cfg.distribution.name().into(),
            n: self.points.len(),
            epsilon: eps,
            kappa,
            method,
            param: None,
            re_nodes: f64::NAN,
            re_offnodes: f64::NAN,
            rho: f64::NAN,
            eta: f64::NAN,
            iterations: 0,
            cpu_seconds: f64::NAN,
            interior_residual: f64::NAN,
        }
    }

    fn fill_row(
        &self,
        row: &mut RunRow,
        sys: &CollocationSystem,
        report: &SolveReport,
        cpu: f64,
    ) -> Result<()> {
        let p = KernelParams::new(row.epsilon)?;
        let at_nodes = reconstruct(&report.alpha, &self.points, p, &self.nodes)?;
        let at_targets = reconstruct(&report.alpha, &self.points, p, &self.targets)?;
        row.param = Some(report.param);
        row.re_nodes = relative_error(&self.exact_nodes, &at_nodes)?;
        row.re_offnodes = relative_error(&self.exact_targets, &at_targets)?;
        row.rho = report.rho;
        row.eta = report.eta;
        row.iterations = report.iterations;
        row.cpu_seconds = cpu;
        row.interior_residual = sys.interior_residual(&report.alpha);
        log::info!(
            "{} ε={} {}: Re_nodes={:e} Re_offnodes={:e} interior residual={:e}",
            row.geometry,
            row.epsilon,
            row.method.name(),
            row.re_nodes,
            row.re_offnodes,
            row.interior_residual
        );
        Ok(())
    }

    fn kappa(&self, sys: &CollocationSystem) -> f64 {
        if !self.cfg.compute_kappa {
            return f64::NAN;
        }
        condition_number(&sys.matrix).unwrap_or_else(|e| {
            log::warn!("condition number unavailable: {e}");
            f64::NAN
        })
    }

    /// All methods at one ε. Failures are logged and leave NaN rows.
    fn sweep_row(&self, eps: f64) -> Vec<(RunRow, Option<SolveReport>)> {
        let (sys, t_asm) = match self.system(eps) {
            Ok(s) => s,
            Err(e) => {
                log::error!("ε={eps}: assembly failed: {e}");
                return self
                    .cfg
                    .methods
                    .iter()
                    .map(|&m| (self.blank_row(eps, f64::NAN, m), None))
                    .collect();
            }
        };
        let kappa = self.kappa(&sys);
        self.cfg
            .methods
            .iter()
            .map(|&m| {
                let mut row = self.blank_row(eps, kappa, m);
                let outcome = self.solve(&sys, m).and_then(|rep| {
                    let cpu = t_asm + rep.wall_time.as_secs_f64();
                    self.fill_row(&mut row, &sys, &rep, cpu)?;
                    Ok(rep)
                });
                match outcome {
                    Ok(rep) => (row, Some(rep)),
                    Err(e) => {
                        log::error!("ε={eps} {}: {e}", m.name());
                        (self.blank_row(eps, kappa, m), None)
                    }
                }
            })
            .collect()
    }
}

pub fn write_results_csv(rows: &[RunRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut s = String::with_capacity(128 * (rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{}", r.to_csv());
    }
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Runs every (ε, method) pair and writes `results.csv` plus one
/// `gcv_<method>_eps<ε>.csv` per Tikhonov-type run under GCV.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let prep = Prepared::new(cfg)?;
    create_dir(&cfg.output_dir)?;
    let per_eps: Vec<_> = cfg.epsilons().par_iter().map(|&e| prep.sweep_row(e)).collect();
    let mut rows = Vec::new();
    for (row, report) in per_eps.into_iter().flatten() {
        if let (ParameterRule::Gcv, Some(rep)) = (cfg.rule, &report) {
            if rep.gcv_trace.is_some() {
                let name = format!("gcv_{}_eps{}.csv", row.method.name(), row.epsilon);
                rep.write_gcv_csv(cfg.output_dir.join(name))?;
            }
        }
        rows.push(row);
    }
    let csv_path = cfg.output_dir.join("results.csv");
    write_results_csv(&rows, &csv_path)?;
    Ok(ExperimentOutput { rows, csv_path })
}

/// One assemble/solve/evaluate pass for a single method and ε. Dumps go to
/// `output_dir`: `A.txt`, `f.txt`, `alpha.txt` and `gcv.csv`.
pub fn solve_once(cfg: &ExperimentConfig, dump: DumpFlags) -> Result<SolveOutput> {
    cfg.validate()?;
    let eps = cfg.epsilons();
    let mut errs = Vec::new();
    if eps.len() != 1 {
        errs.push(format!("solve needs a single epsilon, got {}", eps.len()));
    }
    if cfg.methods.len() != 1 {
        errs.push(format!("solve needs a single method, got {}", cfg.methods.len()));
    }
    if !errs.is_empty() {
        return Err(Error::Config(errs));
    }
    let (eps, method) = (eps[0], cfg.methods[0]);
    let prep = Prepared::new(cfg)?;
    let (sys, t_asm) = prep.system(eps)?;
    let kappa = prep.kappa(&sys);
    let report = prep.solve(&sys, method)?;
    let mut row = prep.blank_row(eps, kappa, method);
    prep.fill_row(&mut row, &sys, &report, t_asm + report.wall_time.as_secs_f64())?;

    let mut files = Vec::new();
    if dump.matrix || dump.gcv {
        create_dir(&cfg.output_dir)?;
    }
    if dump.matrix {
        for (name, res) in [
            ("A.txt", write_matrix(&sys.matrix, cfg.output_dir.join("A.txt"))),
            ("f.txt", write_vector(&sys.rhs, cfg.output_dir.join("f.txt"))),
            ("alpha.txt", write_vector(&report.alpha, cfg.output_dir.join("alpha.txt"))),
        ] {
            res?;
            files.push(cfg.output_dir.join(name));
        }
    }
    if dump.gcv {
        let path = cfg.output_dir.join("gcv.csv");
        report.write_gcv_csv(&path)?;
        files.push(path);
    }
    Ok(SolveOutput { report, row, files })
}
