//! Seeded verification suites aggregating the `verify_*` reports.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::fd::FdScheme;
use super::tolerances as tol;
use super::verify::{
    dyadic_alphas, power_alphas, verify_curve_limit, verify_derivative_at_one, verify_dz_trace_vanishes,
    verify_second_derivative_example1, verify_z_monotonicity, DerivativeFamily,
};
use super::{example1_grid, Check, CurveSpec, Example1Pair, Report, TraceFunctional};
use crate::divergences::{
    alpha_z_divergence, classical_kl, classical_renyi, mosonyi_ogawa_divergence, relative_entropy, DensityOperator,
    DivergenceValue, InfinityReason, ParamPoint, ReferenceOperator,
};
use crate::error::{Error, Result};
use crate::hermitian::pinch;
use crate::testkit::{
    commuting_pair, seeded_pairs, seeded_unitary, support_pair, GeneratorSeed, SupportBranch, TestPair,
    PINNED_BASE_SEED,
};

/// Z values of the z-monotonicity certification.
pub const MONOTONICITY_ZS: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];
pub const MONOTONICITY_ALPHAS: [f64; 5] = [0.3, 0.6, 1.5, 2.0, 4.0];
pub const DZ_Z0S: [f64; 3] = [0.5, 1.0, 2.0];
pub const EXAMPLE1_PS: [f64; 3] = [0.1, 0.25, 0.4];
pub const DPI_ALPHAS: [f64; 4] = [0.3, 0.7, 1.5, 2.0];
pub const CLASSICAL_ALPHAS: [f64; 5] = [0.3, 0.7, 1.5, 2.0, 3.0];
/// `(α, z)` samples of the structural checks; `z = 0` stands for `z = α`.
const STRUCTURAL_POINTS: [(f64, f64); 7] =
    [(0.5, 1.0), (0.7, 0.0), (1.0, 1.0), (1.5, 1.0), (2.0, 0.0), (2.0, 0.5), (3.0, 5.0)];
const SCALINGS: [f64; 2] = [0.5, 3.0];

/// A group of related checks; each maps to one certification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Limits,
    SlopeAtOne,
    DzTrace,
    Example1,
    ZMonotonicity,
    Classical,
    Structural,
    Dpi,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::Limits => "limits",
            Group::SlopeAtOne => "slope_at_one",
            Group::DzTrace => "dz_trace",
            Group::Example1 => "example1",
            Group::ZMonotonicity => "z_monotonicity",
            Group::Classical => "classical",
            Group::Structural => "structural",
            Group::Dpi => "dpi",
        }
    }
}

/// Suite names accepted on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Limits,
    Derivatives,
    Monotonicity,
    Example1,
    Dpi,
    Classical,
    Structural,
}

impl Suite {
    pub const NAMES: [&'static str; 8] =
        ["all", "limits", "derivatives", "monotonicity", "example1", "dpi", "classical", "structural"];

    pub fn groups(self) -> Vec<Group> {
        match self {
            Suite::All => vec![
                Group::Limits,
                Group::SlopeAtOne,
                Group::DzTrace,
                Group::Example1,
                Group::ZMonotonicity,
                Group::Classical,
                Group::Structural,
                Group::Dpi,
            ],
            Suite::Limits => vec![Group::Limits],
            Suite::Derivatives => vec![Group::SlopeAtOne, Group::DzTrace],
            Suite::Monotonicity => vec![Group::ZMonotonicity],
            Suite::Example1 => vec![Group::Example1],
            Suite::Dpi => vec![Group::Dpi],
            Suite::Classical => vec![Group::Classical],
            Suite::Structural => vec![Group::Structural],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = [
            Suite::All,
            Suite::Limits,
            Suite::Derivatives,
            Suite::Monotonicity,
            Suite::Example1,
            Suite::Dpi,
            Suite::Classical,
            Suite::Structural,
        ]
        .iter()
        .position(|s| s == self)
        .expect("listed");
        f.write_str(Self::NAMES[i])
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "limits" => Suite::Limits,
            "derivatives" => Suite::Derivatives,
            "monotonicity" => Suite::Monotonicity,
            "example1" => Suite::Example1,
            "dpi" => Suite::Dpi,
            "classical" => Suite::Classical,
            "structural" => Suite::Structural,
            _ => return Err(Error::InvalidParameter(format!("unknown suite {s:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuiteOptions {
    /// Number of seeded random pairs; the classical group uses twice as many.
    pub seeds: usize,
    pub base_seed: u64,
    /// Added to every residual. A positive value makes the suite fail,
    /// which exercises the failure path.
    pub perturbation: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seeds: 10, base_seed: PINNED_BASE_SEED, perturbation: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub group: Group,
    pub subject: String,
    #[serde(flatten)]
    pub check: Check,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupSummary {
    pub group: Group,
    pub checks: usize,
    pub failed: usize,
    /// Largest `residual / tolerance`, or the largest residual for
    /// zero-tolerance checks when that is positive.
    pub worst_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub options: SuiteOptions,
    pub passed: bool,
    pub groups: Vec<GroupSummary>,
    pub records: Vec<Record>,
}

impl SuiteOutcome {
    pub fn first_failure(&self) -> Option<&Record> {
        self.records.iter().find(|r| !r.check.passed)
    }

    pub fn records_of(&self, group: Group) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(move |r| r.group == group)
    }
}

fn ratio(c: &Check) -> f64 {
    if c.tolerance > 0.0 {
        c.residual / c.tolerance
    } else if c.residual > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

fn pair_subject(p: &TestPair) -> String {
    format!("seed {} dim {}", p.seed, p.rho.dim())
}

fn push_report(out: &mut Vec<Record>, group: Group, subject: String, report: &impl Report) {
    out.extend(report.checks().iter().map(|c| Record { group, subject: subject.clone(), check: c.clone() }));
}

fn tf_of(p: &TestPair) -> Result<TraceFunctional> {
    TraceFunctional::new(p.rho.clone(), p.sigma.clone())
}

fn limits(pairs: &[TestPair]) -> Result<Vec<Record>> {
    per_pair(pairs, |p, out| {
        let tf = tf_of(p)?;
        for c in CurveSpec::standard_set() {
            let r = verify_curve_limit(&tf, c, &dyadic_alphas())?;
            push_report(out, Group::Limits, format!("{} curve {c}", pair_subject(p)), &r);
        }
        Ok(())
    })
}

fn slope_at_one(pairs: &[TestPair]) -> Result<Vec<Record>> {
    per_pair(pairs, |p, out| {
        let tf = tf_of(p)?;
        for family in [DerivativeFamily::ZEqualsOne, DerivativeFamily::ZEqualsAlpha] {
            let r = verify_derivative_at_one(&tf, family, FdScheme::first_derivative_default())?;
            push_report(out, Group::SlopeAtOne, format!("{} {family:?}", pair_subject(p)), &r);
        }
        Ok(())
    })
}

fn dz_trace(pairs: &[TestPair]) -> Result<Vec<Record>> {
    per_pair(pairs, |p, out| {
        let tf = tf_of(p)?;
        for z0 in DZ_Z0S {
            let r = verify_dz_trace_vanishes(&tf, z0, &power_alphas(4), FdScheme::first_derivative_default())?;
            push_report(out, Group::DzTrace, format!("{} z0 {z0}", pair_subject(p)), &r);
        }
        Ok(())
    })
}

fn z_monotonicity(pairs: &[TestPair]) -> Result<Vec<Record>> {
    per_pair(pairs, |p, out| {
        let tf = tf_of(p)?;
        for alpha in MONOTONICITY_ALPHAS {
            let r = verify_z_monotonicity(&tf, alpha, &MONOTONICITY_ZS)?;
            push_report(out, Group::ZMonotonicity, format!("{} alpha {alpha}", pair_subject(p)), &r);
        }
        Ok(())
    })
}

fn example1() -> Result<Vec<Record>> {
    let (alphas, curves) = example1_grid();
    let per_p = EXAMPLE1_PS
        .par_iter()
        .map(|&p| {
            let mut out = Vec::new();
            let r = verify_second_derivative_example1(p, FdScheme::second_derivative_default())?;
            push_report(&mut out, Group::Example1, format!("p {p}"), &r);
            let gap = Example1Pair::new(p)?.max_pipeline_gap(&alphas, &curves)?;
            out.push(Record {
                group: Group::Example1,
                subject: format!("p {p}"),
                check: Check::new("closed_form_grid_agreement", gap, tol::CLOSED_FORM),
            });
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_p.into_iter().flatten().collect())
}

fn finite(v: DivergenceValue) -> Result<f64> {
    v.finite().ok_or(Error::SupportViolation)
}

fn classical(opts: &SuiteOptions) -> Result<Vec<Record>> {
    let zs = [-2.0, -0.5, 0.5, 1.0, 0.0, 2.0, 10.0];
    let per_seed = (0..2 * opts.seeds)
        .into_par_iter()
        .map(|i| {
            let gs = GeneratorSeed::new(opts.base_seed + i as u64, 2 + i % 7)?;
            let (rho, sigma, p, q) = commuting_pair(gs)?;
            let mut worst = 0.0f64;
            for alpha in CLASSICAL_ALPHAS {
                let expected = finite(classical_renyi(&p, &q, alpha)?)?;
                for z in zs {
                    let z = if z == 0.0 { alpha } else { z };
                    let d = finite(alpha_z_divergence(&rho, &sigma, ParamPoint::new(alpha, z)?)?)?;
                    worst = worst.max((d - expected).abs());
                }
            }
            let kl = (finite(relative_entropy(&rho, &sigma)?)? - finite(classical_kl(&p, &q)?)?).abs();
            let subject = format!("seed {} dim {}", gs.seed, gs.dim);
            Ok(vec![
                Record {
                    group: Group::Classical,
                    subject: subject.clone(),
                    check: Check::new("renyi_sum", worst, tol::CLASSICAL),
                },
                Record {
                    group: Group::Classical,
                    subject,
                    check: Check::new("kullback_leibler", kl, tol::KULLBACK_LEIBLER),
                },
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_seed.into_iter().flatten().collect())
}

fn structural_point(alpha: f64, z: f64) -> Result<ParamPoint> {
    ParamPoint::new(alpha, if z == 0.0 { alpha } else { z })
}

fn divergence_at(rho: &DensityOperator, sigma: &ReferenceOperator, pt: ParamPoint) -> Result<f64> {
    finite(alpha_z_divergence(rho, sigma, pt)?)
}

fn structural(pairs: &[TestPair]) -> Result<Vec<Record>> {
    let mut records = per_pair(pairs, |p, out| {
        let u = seeded_unitary(GeneratorSeed::new(p.seed, p.rho.dim())?)?;
        let (rho_u, sigma_u) = (p.rho.conjugated(&u)?, p.sigma.conjugated(&u)?);
        let copy = ReferenceOperator::new(p.rho.spectrum().reconstruct())?;
        let scaled = SCALINGS.iter().map(|&c| Ok((c, p.sigma.scaled(c)?))).collect::<Result<Vec<_>>>()?;
        let (mut unitary, mut scaling, mut selfdiv) = (0.0f64, 0.0f64, 0.0f64);
        for (a, z) in STRUCTURAL_POINTS {
            let pt = structural_point(a, z)?;
            let d = divergence_at(&p.rho, &p.sigma, pt)?;
            unitary = unitary.max((divergence_at(&rho_u, &sigma_u, pt)? - d).abs());
            for (c, s) in &scaled {
                scaling = scaling.max((divergence_at(&p.rho, s, pt)? - (d - c.ln())).abs());
            }
            selfdiv = selfdiv.max(divergence_at(&p.rho, &copy, pt)?.abs());
        }
        let subject = pair_subject(p);
        for (name, residual, tolerance) in [
            ("unitary_invariance", unitary, tol::UNITARY),
            ("reference_scaling", scaling, tol::SCALING),
            ("self_divergence", selfdiv, tol::SELF_DIVERGENCE),
        ] {
            out.push(Record {
                group: Group::Structural,
                subject: subject.clone(),
                check: Check::new(name, residual, tolerance),
            });
        }
        Ok(())
    })?;
    records.extend(infinity_semantics(pairs)?);
    Ok(records)
}

/// Exact `+∞` with the expected reason on constructed support pairs.
fn infinity_semantics(pairs: &[TestPair]) -> Result<Vec<Record>> {
    let cases = [
        (SupportBranch::Violating, 2.0, InfinityReason::SupportViolation),
        (SupportBranch::Violating, 1.0, InfinityReason::SupportViolation),
        (SupportBranch::Orthogonal, 2.0, InfinityReason::SupportViolation),
        (SupportBranch::Orthogonal, 0.5, InfinityReason::OrthogonalStates),
    ];
    per_pair(pairs, |p, out| {
        let dim = p.rho.dim().max(3);
        let gs = GeneratorSeed::new(p.seed, dim)?;
        let mut mismatches = 0usize;
        for (branch, alpha, reason) in cases {
            let rank = if branch == SupportBranch::Orthogonal { dim / 2 } else { dim - 1 };
            let (rho, sigma) = support_pair(gs, rank, branch)?;
            for z in [1.0, alpha] {
                let v = alpha_z_divergence(&rho, &sigma, ParamPoint::new(alpha, z)?)?;
                if v != DivergenceValue::Infinite(reason) {
                    mismatches += 1;
                }
            }
        }
        out.push(Record {
            group: Group::Structural,
            subject: format!("seed {} dim {dim}", p.seed),
            check: Check::new("infinity_semantics", mismatches as f64, 0.0),
        });
        Ok(())
    })
}

fn dpi(pairs: &[TestPair]) -> Result<Vec<Record>> {
    per_pair(pairs, |p, out| {
        let rho_p = DensityOperator::new(pinch(p.rho.op(), p.sigma.op())?)?;
        let sigma_p = ReferenceOperator::new(pinch(p.sigma.op(), p.sigma.op())?)?;
        let mut worst = 0.0f64;
        for alpha in DPI_ALPHAS {
            let before = finite(mosonyi_ogawa_divergence(&p.rho, &p.sigma, alpha)?)?;
            let after = finite(mosonyi_ogawa_divergence(&rho_p, &sigma_p, alpha)?)?;
            worst = worst.max(after - before);
        }
        out.push(Record {
            group: Group::Dpi,
            subject: pair_subject(p),
            check: Check::new("pinching_dpi", worst.max(0.0), tol::DPI),
        });
        Ok(())
    })
}

/// Runs `f` for every pair in parallel, keeping the pair order.
fn per_pair(pairs: &[TestPair], f: impl Fn(&TestPair, &mut Vec<Record>) -> Result<()> + Sync) -> Result<Vec<Record>> {
    let chunks = pairs
        .par_iter()
        .map(|p| {
            let mut out = Vec::new();
            f(p, &mut out)?;
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Records of a single group.
pub fn run_group(group: Group, opts: &SuiteOptions) -> Result<Vec<Record>> {
    let pairs = seeded_pairs(opts.seeds, opts.base_seed)?;
    let mut records = match group {
        Group::Limits => limits(&pairs)?,
        Group::SlopeAtOne => slope_at_one(&pairs)?,
        Group::DzTrace => dz_trace(&pairs)?,
        Group::Example1 => example1()?,
        Group::ZMonotonicity => z_monotonicity(&pairs)?,
        Group::Classical => classical(opts)?,
        Group::Structural => structural(&pairs)?,
        Group::Dpi => dpi(&pairs)?,
    };
    if opts.perturbation != 0.0 {
        for r in &mut records {
            r.check = r.check.shifted(opts.perturbation);
        }
    }
    Ok(records)
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<SuiteOutcome> {
    if opts.seeds == 0 {
        return Err(Error::InvalidParameter("at least one seed is required".into()));
    }
    let mut records = Vec::new();
    let mut groups = Vec::new();
    for group in suite.groups() {
        let recs = run_group(group, opts)?;
        groups.push(GroupSummary {
            group,
            checks: recs.len(),
            failed: recs.iter().filter(|r| !r.check.passed).count(),
            worst_ratio: recs.iter().map(|r| ratio(&r.check)).fold(0.0, f64::max),
        });
        records.extend(recs);
    }
    let passed = records.iter().all(|r| r.check.passed);
    Ok(SuiteOutcome { suite, options: *opts, passed, groups, records })
}
