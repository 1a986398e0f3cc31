//! Seeded generators for states, representable density operators and probe
//! families.
//!
//! Every random draw goes through [`rng_for`]: a ChaCha20 generator seeded
//! from the 64-bit seed, with the ChaCha stream number set to the sample
//! index. Independent samples in a batch therefore use disjoint streams of
//! the same seed and can be generated in any order.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::basis::enumerate_basis;
use crate::conditions::{self, Condition, ConditionReport};
use crate::error::domain;
use crate::operators::{contract, projector, DensityOperator, HermitianOperator, WaveFunction};
use crate::{binomial, Result};

/// Identifies the random source in output metadata.
pub const GENERATOR: &str =
    "rand_chacha-0.9 ChaCha20Rng, seed_from_u64(seed), stream = sample index; rand_distr-0.5 StandardNormal";

/// Margin required on both sides of a strictness witness.
pub const WITNESS_MARGIN: f64 = 1e-6;

pub fn rng_for(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn complex_normal(rng: &mut ChaCha20Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Normalized state with complex Gaussian coefficients.
pub fn random_pure_state(n: usize, p: usize, seed: u64) -> WaveFunction {
    random_pure_state_from(n, p, &mut rng_for(seed, 0))
}

pub fn random_pure_state_from(n: usize, p: usize, rng: &mut ChaCha20Rng) -> WaveFunction {
    let basis = Arc::new(enumerate_basis(n, p).expect("p <= n"));
    let coeffs = DVector::from_fn(basis.len(), |_, _| complex_normal(rng));
    let norm = coeffs.norm();
    WaveFunction::new(basis, coeffs / Complex64::new(norm, 0.0)).expect("matching length")
}

/// Random Hermitian operator with Gaussian entries.
pub fn random_hermitian(n: usize, p: usize, seed: u64) -> HermitianOperator {
    let mut rng = rng_for(seed, 0);
    let basis = Arc::new(enumerate_basis(n, p).expect("p <= n"));
    let dim = basis.len();
    let m = DMatrix::from_fn(dim, dim, |_, _| complex_normal(&mut rng));
    HermitianOperator::new(basis, (&m + m.adjoint()) * Complex64::new(0.5, 0.0)).expect("symmetrized")
}

/// Haar-distributed one-particle unitary (QR of a complex Ginibre matrix
/// with the phases of `R` absorbed).
pub fn random_unitary(n: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = rng_for(seed, 0);
    let g = DMatrix::from_fn(n, n, |_, _| complex_normal(&mut rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// `D² = L²_N Σ_j w_j |f_j⟩⟨f_j|` for explicit `N`-particle states.
pub fn contracted_mixture(states: &[(f64, WaveFunction)]) -> Result<DensityOperator> {
    let big = DensityOperator::mixture(states)?;
    if big.p() < 2 {
        return domain("need at least two particles to contract to a 2-density");
    }
    if big.p() == 2 {
        return Ok(big);
    }
    contract(&big, 2)
}

/// A 2-density guaranteed `N`-representable: the contraction of a random
/// mixture of `mix_rank` random `N`-particle pure states with random simplex
/// weights.
pub fn representable_density(
    n: usize,
    particles: usize,
    mix_rank: usize,
    seed: u64,
) -> Result<DensityOperator> {
    representable_density_from(n, particles, mix_rank, &mut rng_for(seed, 0))
}

pub fn representable_density_from(
    n: usize,
    particles: usize,
    mix_rank: usize,
    rng: &mut ChaCha20Rng,
) -> Result<DensityOperator> {
    if particles < 2 || particles > n {
        return domain(format!("N = {particles} outside 2..={n}"));
    }
    if mix_rank == 0 {
        return domain("mix_rank must be positive");
    }
    let raw: Vec<f64> = (0..mix_rank).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    let mut states = Vec::with_capacity(mix_rank);
    for w in raw {
        states.push((w / total, random_pure_state_from(n, particles, rng)));
    }
    // exact renormalization so the weights sum to one in floating point
    let sum: f64 = states.iter().map(|(w, _)| w).sum();
    states[0].0 += 1.0 - sum;
    contracted_mixture(&states)
}

/// `N = 3` specialization of [`representable_density`].
pub fn representable_d2(n: usize, mix_rank: usize, seed: u64) -> Result<DensityOperator> {
    if n < 3 {
        return domain("3-representable densities need n >= 3");
    }
    representable_density(n, 3, mix_rank, seed)
}

/// `Σ_{i<n/2} √(2/n) |2i, 2i+1⟩`.
pub fn extreme_geminal(n: usize) -> Result<WaveFunction> {
    if !n.is_multiple_of(2) || n < 4 {
        return domain(format!("extreme geminal needs even n >= 4, got {n}"));
    }
    let c = Complex64::new((2.0 / n as f64).sqrt(), 0.0);
    let pairs: Vec<[usize; 2]> = (0..n / 2).map(|i| [2 * i, 2 * i + 1]).collect();
    let terms: Vec<(&[usize], Complex64)> = pairs.iter().map(|p| (&p[..], c)).collect();
    WaveFunction::from_terms(n, 2, &terms)
}

/// `λ P_g + (1-λ)(I - P_g)/(C(n,2) - 1)`.
pub fn interpolated_family(g: &WaveFunction, lambda: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&lambda) {
        return domain(format!("lambda = {lambda} outside [0, 1]"));
    }
    if g.p() != 2 {
        return domain("interpolated family needs a geminal");
    }
    let pg = projector(g)?;
    let identity = HermitianOperator::identity(g.basis().clone());
    let dim = binomial(g.n(), 2) as f64;
    if dim < 2.0 {
        return domain("need at least two 2-particle states");
    }
    let complement = &identity - &pg;
    let op = &(lambda * &pg) + &((1.0 - lambda) / (dim - 1.0) * &complement);
    Ok(DensityOperator::trusted(op))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    PureContracted,
    MixedContracted,
    MaximallyMixed,
    GeminalProjector,
    Interpolated,
}

/// Which geminal the projector-based kinds use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ProbeGeminal {
    #[default]
    Extreme,
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub n: usize,
    #[serde(rename = "N")]
    pub particles: usize,
    pub kind: SampleKind,
    pub mix_rank: usize,
    pub lambda: f64,
    pub seed: u64,
    #[serde(default)]
    pub geminal: ProbeGeminal,
}

impl SampleSpec {
    pub fn interpolated(n: usize, lambda: f64) -> Self {
        Self {
            n,
            particles: 3,
            kind: SampleKind::Interpolated,
            mix_rank: 1,
            lambda,
            seed: 0,
            geminal: ProbeGeminal::Extreme,
        }
    }

    fn geminal(&self) -> Result<WaveFunction> {
        match self.geminal {
            ProbeGeminal::Extreme => extreme_geminal(self.n),
            ProbeGeminal::Random => Ok(random_pure_state(self.n, 2, self.seed)),
        }
    }

    /// Deterministic realization of the spec.
    pub fn generate(&self) -> Result<DensityOperator> {
        match self.kind {
            SampleKind::PureContracted => representable_density(self.n, self.particles, 1, self.seed),
            SampleKind::MixedContracted => {
                representable_density(self.n, self.particles, self.mix_rank, self.seed)
            }
            SampleKind::MaximallyMixed => Ok(DensityOperator::maximally_mixed(Arc::new(enumerate_basis(
                self.n, 2,
            )?))),
            SampleKind::GeminalProjector => DensityOperator::pure(&self.geminal()?),
            SampleKind::Interpolated => interpolated_family(&self.geminal()?, self.lambda),
        }
    }
}

/// `{0.05 k : k = 1..=20}`.
pub fn default_lambda_grid() -> Vec<f64> {
    (1..=20).map(|k| 0.05 * k as f64).collect()
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub spec: SampleSpec,
    pub reports: Vec<ConditionReport>,
}

/// Scan `interpolated_family(g_extr, λ)` for densities that satisfy the B-
/// and C-conditions with room to spare but violate the dual P-condition.
pub fn witness_search(n: usize, particles: usize, grid: &[f64]) -> Result<Vec<Witness>> {
    if !n.is_multiple_of(2) {
        return domain("witness search uses the extreme geminal and needs even n");
    }
    if particles != 3 {
        return domain("witness search is defined for N = 3");
    }
    let g = extreme_geminal(n)?;
    let mut found = Vec::new();
    for &lambda in grid {
        let spec = SampleSpec::interpolated(n, lambda);
        let d = spec.generate()?;
        let tol = conditions::DEFAULT_TOL;
        let reports = vec![
            conditions::b_condition(&d, &g, particles, tol)?,
            conditions::c_condition(&d, &g, particles, tol)?,
            conditions::dual_p_condition(&d, &g, particles, conditions::LambdaMode::Analytic, tol)?,
        ];
        let margin = |c: Condition| {
            reports
                .iter()
                .find(|r| r.condition == c)
                .map(|r| r.margin)
                .unwrap_or(f64::NAN)
        };
        if margin(Condition::B) >= WITNESS_MARGIN
            && margin(Condition::C) >= WITNESS_MARGIN
            && margin(Condition::DualP) <= -WITNESS_MARGIN
        {
            found.push(Witness { spec, reports });
        }
    }
    Ok(found)
}
