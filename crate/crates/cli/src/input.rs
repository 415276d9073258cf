//! Matrix files and state specifications.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use renyi_core::divergences::{DensityOperator, ReferenceOperator};
use renyi_core::hermitian::{CMatrix, HermitianOperator, ZERO_CUTOFF};
use renyi_core::testkit::{
    commuting_pair, example1_pair, random_density, random_reference, support_pair, GeneratorSeed, SupportBranch,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

/// Hermiticity defects above this are reported when symmetrizing.
pub const SYMMETRIZE_WARN: f64 = 1e-12;

/// Environment variable overriding the zero-eigenvalue cutoff.
pub const EPS_VAR: &str = "RENYI_EPS";

/// `{"dim": n, "entries": [[[re, im], ...], ...]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        Self { dim: m.dim(), entries: m.rows().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect() }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.entries.len() != self.dim {
            return Err(CliError::Input(format!("dim is {} but {} rows given", self.dim, self.entries.len())));
        }
        let rows = self.entries.iter().map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect()).collect();
        Ok(CMatrix::from_rows(rows)?)
    }

    /// Hermitian operator, symmetrized. Defects above [`SYMMETRIZE_WARN`]
    /// are reported on stderr under `label`.
    pub fn to_operator(&self, label: &str) -> Result<HermitianOperator> {
        let m = self.to_matrix()?;
        let defect = m.hermiticity_defect();
        let op = HermitianOperator::new(m)?;
        if defect > SYMMETRIZE_WARN {
            eprintln!("warning: {label}: symmetrized matrix with Hermiticity defect {defect:e}");
        }
        Ok(op)
    }
}

/// Which member of a pair a specification is asked for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Rho,
    Sigma,
}

impl Role {
    fn as_str(self) -> &'static str {
        match self {
            Role::Rho => "rho",
            Role::Sigma => "sigma",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileSpec {
    pub file: PathBuf,
}

/// Seeded generator request. `density` and `reference` ignore the role;
/// `commuting` and `support` describe a pair and yield the member matching
/// the role.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub generator: String,
    pub seed: u64,
    pub dim: usize,
    #[serde(default)]
    pub full_rank: Option<bool>,
    #[serde(default)]
    pub rank: Option<usize>,
    #[serde(default)]
    pub branch: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example1Params {
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example1Spec {
    pub example1: Example1Params,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    File(FileSpec),
    Generator(GeneratorSpec),
    Example1(Example1Spec),
}

impl StateSpec {
    pub fn from_value(v: Value) -> Result<Self> {
        let keys = ["file", "generator", "example1"];
        let present: Vec<&str> = keys.iter().copied().filter(|k| v.get(k).is_some()).collect();
        match present.as_slice() {
            ["file"] => Ok(StateSpec::File(from_value(v, "file spec")?)),
            ["generator"] => Ok(StateSpec::Generator(from_value(v, "generator spec")?)),
            ["example1"] => Ok(StateSpec::Example1(from_value(v, "example1 spec")?)),
            [] => Err(CliError::Input("state spec needs one of \"file\", \"generator\", \"example1\"".into())),
            _ => Err(CliError::Input(format!("state spec has more than one variant: {}", present.join(", ")))),
        }
    }

    pub fn operator(&self, role: Role) -> Result<HermitianOperator> {
        match self {
            StateSpec::File(f) => match read_json(&f.file)? {
                Input::Matrix(m) => m.to_operator(&f.file.display().to_string()),
                Input::Spec(_) => Err(CliError::Input(format!("{}: expected a matrix file", f.file.display()))),
            },
            StateSpec::Generator(g) => g.operator(role),
            StateSpec::Example1(e) => {
                let (rho, sigma) = example1_pair(e.example1.p)?;
                Ok(match role {
                    Role::Rho => rho.op().clone(),
                    Role::Sigma => sigma.op().clone(),
                })
            }
        }
    }
}

impl GeneratorSpec {
    fn operator(&self, role: Role) -> Result<HermitianOperator> {
        let gs = GeneratorSeed::new(self.seed, self.dim)?;
        let pick = |rho: DensityOperator, sigma: ReferenceOperator| match role {
            Role::Rho => rho.op().clone(),
            Role::Sigma => sigma.op().clone(),
        };
        match self.generator.as_str() {
            "density" | "wishart" => Ok(random_density(gs)?.op().clone()),
            "reference" => {
                let full = self.full_rank.unwrap_or(self.rank.is_none());
                Ok(random_reference(gs, full, self.rank)?.op().clone())
            }
            "commuting" => {
                let (rho, sigma, _, _) = commuting_pair(gs)?;
                Ok(pick(rho, sigma))
            }
            "support" => {
                let rank = self.rank.ok_or_else(|| CliError::Input("support generator needs \"rank\"".into()))?;
                let branch = match self.branch.as_deref() {
                    Some("dominating") => SupportBranch::Dominating,
                    Some("violating") => SupportBranch::Violating,
                    Some("orthogonal") => SupportBranch::Orthogonal,
                    other => {
                        return Err(CliError::Input(format!(
                            "support generator needs \"branch\": dominating, violating or orthogonal (got {other:?})"
                        )))
                    }
                };
                let (rho, sigma) = support_pair(gs, rank, branch)?;
                Ok(pick(rho, sigma))
            }
            other => Err(CliError::Input(format!(
                "unknown generator {other:?} (density, reference, commuting, support) for {}",
                role.as_str()
            ))),
        }
    }
}

fn from_value<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|source| CliError::Json { what: what.into(), source })
}

/// Contents of a JSON input document.
#[derive(Clone, Debug, PartialEq)]
pub enum Input {
    Matrix(MatrixFile),
    Spec(StateSpec),
}

impl Input {
    pub fn parse(text: &str, what: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|source| CliError::Json { what: what.into(), source })?;
        if v.get("entries").is_some() {
            Ok(Input::Matrix(from_value(v, what)?))
        } else {
            Ok(Input::Spec(StateSpec::from_value(v)?))
        }
    }
}

pub fn read_json(path: &Path) -> Result<Input> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    Input::parse(&text, &path.display().to_string())
}

/// A `--rho`/`--sigma` argument: inline JSON when it starts with `{`,
/// otherwise a path to a matrix file or a state spec.
pub fn resolve(arg: &str, role: Role) -> Result<HermitianOperator> {
    let input = if arg.trim_start().starts_with('{') {
        Input::parse(arg, &format!("--{}", role.as_str()))?
    } else {
        read_json(Path::new(arg))?
    };
    match input {
        Input::Matrix(m) => m.to_operator(arg),
        Input::Spec(s) => s.operator(role),
    }
}

/// Zero-eigenvalue cutoff, from [`EPS_VAR`] when set.
pub fn cutoff() -> Result<f64> {
    match std::env::var(EPS_VAR) {
        Err(std::env::VarError::NotPresent) => Ok(ZERO_CUTOFF),
        Err(e) => Err(CliError::Input(format!("{EPS_VAR}: {e}"))),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(x) if x > 0.0 && x < 1.0 => Ok(x),
            _ => Err(CliError::Input(format!("{EPS_VAR}={s:?} must be a number in (0, 1)"))),
        },
    }
}

pub fn load_pair(rho: &str, sigma: &str) -> Result<(DensityOperator, ReferenceOperator)> {
    let eps = cutoff()?;
    let rho = DensityOperator::with_cutoff(resolve(rho, Role::Rho)?, eps)?;
    let sigma = ReferenceOperator::with_cutoff(resolve(sigma, Role::Sigma)?, eps)?;
    if rho.dim() != sigma.dim() {
        return Err(renyi_core::Error::DimensionMismatch(rho.dim(), sigma.dim()).into());
    }
    Ok((rho, sigma))
}

/// Parses `p=0.25` or `0.25`.
pub fn example1_p(arg: &str) -> Result<f64> {
    let v = arg.trim().strip_prefix("p=").unwrap_or(arg.trim());
    v.parse().map_err(|_| CliError::Input(format!("--example1 expects p=<number>, got {arg:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_file_round_trip() {
        let text = r#"{"dim": 2, "entries": [[[0.5, 0], [0.1, -0.2]], [[0.1, 0.2], [0.5, 0]]]}"#;
        let Input::Matrix(m) = Input::parse(text, "t").unwrap() else { panic!("not a matrix") };
        let op = m.to_operator("t").unwrap();
        assert_eq!(op.get(0, 1), Complex64::new(0.1, -0.2));
        let back = MatrixFile::from_matrix(op.matrix());
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_ragged_and_mislabelled() {
        for text in [r#"{"dim": 2, "entries": [[[1, 0]]]}"#, r#"{"dim": 1, "entries": [[[1, 0], [0, 0]]]}"#] {
            let Input::Matrix(m) = Input::parse(text, "t").unwrap() else { panic!("not a matrix") };
            assert!(m.to_operator("t").is_err(), "{text}");
        }
        let skew = r#"{"dim": 2, "entries": [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]}"#;
        let Input::Matrix(m) = Input::parse(skew, "t").unwrap() else { panic!("not a matrix") };
        assert!(m.to_operator("t").is_err());
    }

    #[test]
    fn spec_variants_are_exclusive() {
        assert!(matches!(
            Input::parse(r#"{"example1": {"p": 0.25}}"#, "t").unwrap(),
            Input::Spec(StateSpec::Example1(_))
        ));
        assert!(matches!(
            Input::parse(r#"{"generator": "density", "seed": 3, "dim": 4}"#, "t").unwrap(),
            Input::Spec(StateSpec::Generator(_))
        ));
        assert!(Input::parse(r#"{"file": "a.json", "example1": {"p": 0.25}}"#, "t").is_err());
        assert!(Input::parse(r#"{"seed": 3}"#, "t").is_err());
        assert!(Input::parse(r#"{"generator": "density", "seed": 3, "dim": 4, "colour": 1}"#, "t").is_err());
    }

    #[test]
    fn pair_generators_follow_role() {
        let spec = StateSpec::from_value(serde_json::json!({"generator": "commuting", "seed": 9, "dim": 3})).unwrap();
        let rho = spec.operator(Role::Rho).unwrap();
        let sigma = spec.operator(Role::Sigma).unwrap();
        assert_ne!(rho, sigma);
        let (r, s, _, _) = commuting_pair(GeneratorSeed::new(9, 3).unwrap()).unwrap();
        assert_eq!(&rho, r.op());
        assert_eq!(&sigma, s.op());
    }

    #[test]
    fn example1_argument() {
        assert_eq!(example1_p("p=0.25").unwrap(), 0.25);
        assert_eq!(example1_p("0.4").unwrap(), 0.4);
        assert!(example1_p("q=1").is_err());
    }
}
