//! Seeded generators for test states.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64`, so a given
//! `(seed, dim, flags)` triple always yields the same operators.
//! Gaussian samples use `rand_distr::StandardNormal`; a standard complex
//! normal entry is `(x + i y) / √2`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::divergences::{DensityOperator, ProbVector, ReferenceOperator};
use crate::error::{Error, Result};
use crate::hermitian::{CMatrix, HermitianOperator};

pub const MAX_DIM: usize = 16;

/// Seed and dimension for a generated operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorSeed {
    pub seed: u64,
    pub dim: usize,
}

impl GeneratorSeed {
    pub fn new(seed: u64, dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidGenerator(format!("dimension {dim} outside 1..={MAX_DIM}")));
        }
        Ok(Self { seed, dim })
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

// Independent ChaCha streams per generator so that, e.g., the density and the
// reference drawn from one seed are not correlated.
const STREAM_DENSITY: u64 = 1;
const STREAM_REFERENCE: u64 = 2;
const STREAM_COMMUTING: u64 = 3;
const STREAM_PAIR: u64 = 4;
const STREAM_UNITARY: u64 = 5;

fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn ginibre(rng: &mut impl Rng, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, |_, _| complex_normal(rng))
}

/// `G G† / Tr(G G†)`
fn wishart_density(rng: &mut impl Rng, dim: usize) -> HermitianOperator {
    let g = ginibre(rng, dim);
    let w = HermitianOperator::symmetrize(&g.matmul(&g.adjoint()));
    let tr = w.trace();
    w.scale(1.0 / tr)
}

/// Unitary taken from the eigenvectors of a random Hermitian matrix.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> Result<CMatrix> {
    let g = ginibre(rng, dim);
    let h = HermitianOperator::symmetrize(&g.add(&g.adjoint()));
    Ok(h.eigensystem()?.eigenvectors().clone())
}

/// Seeded unitary of dimension `seed.dim`.
pub fn seeded_unitary(seed: GeneratorSeed) -> Result<CMatrix> {
    random_unitary(&mut seed.rng(STREAM_UNITARY), seed.dim)
}

/// Block operator `U (A ⊕ 0) U†` with `A` placed at offset `at`.
fn embed(u: &CMatrix, block: &HermitianOperator, at: usize) -> Result<HermitianOperator> {
    let n = u.dim();
    let k = block.dim();
    let m = CMatrix::from_fn(n, |i, j| {
        if (at..at + k).contains(&i) && (at..at + k).contains(&j) {
            block.get(i - at, j - at)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    HermitianOperator::symmetrize(&m).conjugate_by(u)
}

/// Ginibre-Wishart density operator; full rank with probability one.
pub fn random_density(seed: GeneratorSeed) -> Result<DensityOperator> {
    let mut rng = seed.rng(STREAM_DENSITY);
    DensityOperator::new(wishart_density(&mut rng, seed.dim))
}

/// Wishart reference operator (unit trace). With `full_rank = false`, a
/// `rank`-dimensional Wishart block rotated into a random subspace.
pub fn random_reference(seed: GeneratorSeed, full_rank: bool, rank: Option<usize>) -> Result<ReferenceOperator> {
    let dim = seed.dim;
    let rank = match (full_rank, rank) {
        (true, None) => dim,
        (true, Some(r)) if r == dim => dim,
        (true, Some(r)) => {
            return Err(Error::InvalidGenerator(format!("full_rank requested with rank {r} < dim {dim}")));
        }
        (false, None) => return Err(Error::InvalidGenerator("rank-deficient reference needs a rank".into())),
        (false, Some(r)) if r == 0 || r >= dim => {
            return Err(Error::InvalidGenerator(format!(
                "rank {r} must lie in 1..{dim} for a rank-deficient reference"
            )));
        }
        (false, Some(r)) => r,
    };
    let mut rng = seed.rng(STREAM_REFERENCE);
    if rank == dim {
        return ReferenceOperator::new(wishart_density(&mut rng, dim));
    }
    let u = random_unitary(&mut rng, dim)?;
    let block = wishart_density(&mut rng, rank);
    ReferenceOperator::new(embed(&u, &block, 0)?)
}

/// How the support of the generated state relates to the reference's.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportBranch {
    /// `ker σ ⊆ ker ρ`
    Dominating,
    /// Overlapping supports, `σ` does not dominate `ρ`.
    Violating,
    /// `ρ ⊥ σ`
    Orthogonal,
}

/// State and rank-deficient reference with the requested support relation.
pub fn support_pair(
    seed: GeneratorSeed,
    rank: usize,
    branch: SupportBranch,
) -> Result<(DensityOperator, ReferenceOperator)> {
    let dim = seed.dim;
    if rank == 0 || rank >= dim {
        return Err(Error::InvalidGenerator(format!("reference rank {rank} must lie in 1..{dim}")));
    }
    let mut rng = seed.rng(STREAM_PAIR);
    let u = random_unitary(&mut rng, dim)?;
    let sigma = embed(&u, &wishart_density(&mut rng, rank), 0)?;
    let rho = match branch {
        SupportBranch::Dominating => embed(&u, &wishart_density(&mut rng, rank), 0)?,
        SupportBranch::Violating => wishart_density(&mut rng, dim),
        SupportBranch::Orthogonal => embed(&u, &wishart_density(&mut rng, dim - rank), rank)?,
    };
    Ok((DensityOperator::new(rho)?, ReferenceOperator::new(sigma)?))
}

/// Commuting pair `(U diag(p) U†, U diag(q) U†, p, q)`.
///
/// Entries of `p` and `q` are uniform on `[0.1, 1]` before normalization,
/// which keeps both operators comfortably full rank.
pub fn commuting_pair(seed: GeneratorSeed) -> Result<(DensityOperator, ReferenceOperator, ProbVector, ProbVector)> {
    let dim = seed.dim;
    let mut rng = seed.rng(STREAM_COMMUTING);
    let u = random_unitary(&mut rng, dim)?;
    let mut weights = || -> Vec<f64> { (0..dim).map(|_| rng.random_range(0.1..1.0)).collect() };
    let pw = weights();
    let qw = weights();
    let p = ProbVector::normalized(&pw)?;
    let q = ProbVector::normalized(&qw)?;
    let rho = HermitianOperator::diagonal(p.probs()).conjugate_by(&u)?;
    let sigma = HermitianOperator::diagonal(q.probs()).conjugate_by(&u)?;
    Ok((DensityOperator::new(rho)?, ReferenceOperator::new(sigma)?, p, q))
}

/// The pair `ρ = |+⟩⟨+|`, `σ = diag(p, 1 − p)` with `p ∈ (0, 1) \ {1/2}`.
pub fn example1_pair(p: f64) -> Result<(DensityOperator, ReferenceOperator)> {
    if !(p > 0.0 && p < 1.0) || p == 0.5 {
        return Err(Error::InvalidParameter(format!("p = {p} must lie in (0, 1) and differ from 1/2")));
    }
    let rho = HermitianOperator::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]])?;
    let sigma = HermitianOperator::diagonal(&[p, 1.0 - p]);
    Ok((DensityOperator::new(rho)?, ReferenceOperator::new(sigma)?))
}

/// A seeded state/reference pair with full-rank reference.
#[derive(Clone, Debug)]
pub struct TestPair {
    pub seed: u64,
    pub rho: DensityOperator,
    pub sigma: ReferenceOperator,
}

/// First seed of the pinned verification pairs.
pub const PINNED_BASE_SEED: u64 = 20_140_101;

/// `count` pairs with dimensions cycling through 2..=6 and seeds
/// `base_seed + i`.
pub fn seeded_pairs(count: usize, base_seed: u64) -> Result<Vec<TestPair>> {
    (0..count)
        .map(|i| {
            let seed = base_seed + i as u64;
            let gs = GeneratorSeed::new(seed, 2 + i % 5)?;
            Ok(TestPair { seed, rho: random_density(gs)?, sigma: random_reference(gs, true, None)? })
        })
        .collect()
}
