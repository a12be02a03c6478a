use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use crate::evaluate::ManufacturedCase;
use crate::points::Distribution;
use crate::regularize::{LambdaGrid, Method, ParameterRule, Truncation};
use crate::{Error, Result};

/// `"cube"`, `"sphere"` or `{"imported": "path/to/file"}`. Files ending in
/// `.msh` are read as Gmsh ASCII v2, anything else as a native point cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Cube,
    Sphere,
    Imported(PathBuf),
}

impl Geometry {
    pub fn name(&self) -> String {
        match self {
            Geometry::Cube => "cube".into(),
            Geometry::Sphere => "sphere".into(),
            Geometry::Imported(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "imported".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsilonSpec {
    Single(f64),
    Sweep(Vec<f64>),
}

impl EpsilonSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            EpsilonSpec::Single(e) => vec![*e],
            EpsilonSpec::Sweep(v) => v.clone(),
        }
    }
}

/// Truncation rank: an integer or `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KTrunc {
    Fixed(usize),
    #[default]
    Auto,
}

impl KTrunc {
    pub fn truncation(self) -> Truncation {
        match self {
            KTrunc::Fixed(k) => Truncation::Fixed(k),
            KTrunc::Auto => Truncation::Auto,
        }
    }
}

impl Serialize for KTrunc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            KTrunc::Fixed(k) => s.serialize_u64(*k as u64),
            KTrunc::Auto => s.serialize_str("auto"),
        }
    }
}

impl<'de> Deserialize<'de> for KTrunc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(k) => Ok(KTrunc::Fixed(k)),
            Raw::Text(s) if s == "auto" => Ok(KTrunc::Auto),
            Raw::Text(s) => Err(serde::de::Error::custom(format!(
                "k_trunc must be an integer or \"auto\", got \"{s}\""
            ))),
        }
    }
}

/// Either the tagged object form or a short string such as `"random:7"`.
fn distribution<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Distribution, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Text(String),
        Tagged(Distribution),
    }
    match Raw::deserialize(d)? {
        Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        Raw::Tagged(t) => Ok(t),
    }
}

fn default_wavenumber() -> f64 {
    3.0
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

fn default_offnodes() -> usize {
    500
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub geometry: Geometry,
    #[serde(deserialize_with = "distribution")]
    pub distribution: Distribution,
    /// Requested node count; ignored for imported geometry.
    #[serde(default)]
    pub n_target: Option<usize>,
    pub epsilon: EpsilonSpec,
    #[serde(default = "default_wavenumber")]
    pub wavenumber: f64,
    pub methods: Vec<Method>,
    /// Krylov subspace size for ine_tsvd, hkt and reg_gmres. Defaults to
    /// `3·k_trunc` when the truncation rank is fixed.
    #[serde(default)]
    pub ell: Option<usize>,
    #[serde(default)]
    pub k_trunc: KTrunc,
    #[serde(default)]
    pub rule: ParameterRule,
    #[serde(default)]
    pub lambda_grid: LambdaGrid,
    /// Seeds the off-node targets and the right-hand side noise.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Relative 2-norm of the perturbation added to the right-hand side.
    #[serde(default)]
    pub rhs_noise: f64,
    /// Manufactured solution: `cube`, `sphere` or `pump`. Defaults by geometry.
    #[serde(default)]
    pub case: Option<String>,
    /// Off-node evaluation points.
    #[serde(default = "default_offnodes")]
    pub n_offnodes: usize,
    /// Fill kappa_A (one SVD per ε); NaN when off.
    #[serde(default = "default_true")]
    pub compute_kappa: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))
    }

    /// Reads and validates a config file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg = Self::from_json(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn epsilons(&self) -> Vec<f64> {
        self.epsilon.values()
    }

    /// Subspace size, resolved from `ell` or `3·k_trunc`.
    pub fn subspace(&self) -> Option<usize> {
        match (self.ell, self.k_trunc) {
            (Some(l), _) => Some(l),
            (None, KTrunc::Fixed(k)) => Some(3 * k),
            (None, KTrunc::Auto) => None,
        }
    }

    pub fn manufactured_case(&self) -> Result<ManufacturedCase> {
        let name = match (&self.case, &self.geometry) {
            (Some(c), _) => c.as_str(),
            (None, Geometry::Cube) => "cube",
            (None, Geometry::Sphere) => "sphere",
            (None, Geometry::Imported(_)) => "pump",
        };
        match name {
            "cube" => Ok(ManufacturedCase::cube(self.wavenumber)),
            "sphere" => Ok(ManufacturedCase::sphere(self.wavenumber)),
            "pump" => Ok(ManufacturedCase::pump(self.wavenumber)),
            other => Err(Error::Config(vec![format!("unknown case `{other}`")])),
        }
    }

    fn needs_subspace(&self) -> bool {
        self.methods
            .iter()
            .any(|m| matches!(m, Method::IneTsvd | Method::Hkt | Method::RegGmres))
    }

    /// Checks every field and reports all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let generated = !matches!(self.geometry, Geometry::Imported(_));
        match self.n_target {
            Some(n) if n < 27 => errs.push(format!("n_target must be ≥ 27, got {n}")),
            None if generated => errs.push("n_target is required for generated geometry".into()),
            _ => {}
        }
        let eps = self.epsilons();
        if eps.is_empty() {
            errs.push("epsilon sweep is empty".into());
        }
        for e in &eps {
            if !(*e > 0.0 && e.is_finite()) {
                errs.push(format!("epsilon entries must be positive, got {e}"));
            }
        }
        if !(self.wavenumber >= 0.0 && self.wavenumber.is_finite()) {
            errs.push(format!("wavenumber must be ≥ 0, got {}", self.wavenumber));
        }
        if self.methods.is_empty() {
            errs.push("methods list is empty".into());
        }
        match self.subspace() {
            Some(0) => errs.push("ell must be ≥ 1".into()),
            Some(l) => {
                if let Some(n) = self.n_target.filter(|_| generated) {
                    if l > n {
                        errs.push(format!("ell = {l} exceeds n_target = {n}"));
                    }
                }
                if let KTrunc::Fixed(k) = self.k_trunc {
                    if self.methods.contains(&Method::IneTsvd) && k > l {
                        errs.push(format!("k_trunc = {k} exceeds ell = {l}"));
                    }
                }
            }
            None if self.needs_subspace() => {
                errs.push("ell is required when k_trunc is \"auto\"".into())
            }
            None => {}
        }
        if self.k_trunc == KTrunc::Fixed(0) {
            errs.push("k_trunc must be ≥ 1".into());
        }
        if self.methods.contains(&Method::Tsvd) && self.k_trunc == KTrunc::Auto {
            errs.push("tsvd needs a fixed k_trunc".into());
        }
        if let Err(e) = self.lambda_grid.validate() {
            errs.push(e.to_string());
        }
        if !(self.rhs_noise >= 0.0 && self.rhs_noise.is_finite()) {
            errs.push(format!("rhs_noise must be ≥ 0, got {}", self.rhs_noise));
        }
        if self.n_offnodes == 0 {
            errs.push("n_offnodes must be ≥ 1".into());
        }
        if let Err(Error::Config(mut e)) = self.manufactured_case() {
            errs.append(&mut e);
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}
