//! N-representability conditions evaluated on a trial 2-density.
//!
//! Every condition is a dual-cone element `b²` with `Tr(b² D²) ≥ 0` for all
//! N-representable `D²`. Reports are normalized so that `margin ≥ -tol`
//! always means "satisfied": for upper-bound conditions the margin is
//! `bound - value`, for nonnegativity conditions it is `value`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::canonical::{canonical_decompose, DEFAULT_RANK_TOLERANCE};
use crate::error::domain;
use crate::operators::{
    contract, contract_operator, expectation, lift, lift_two_body, projector, same_space, trace_product,
    DensityOperator, HermitianOperator, WaveFunction,
};
use crate::sampling::{extreme_geminal, random_pure_state_from, rng_for};
use crate::spectral3::{lambda_max3, lambda_max_numeric, MAX_NUMERIC_N, MAX_NUMERIC_PARTICLES};
use crate::{binomial, Error, Result};

/// Default pass tolerance on margins.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Maximum disagreement tolerated between the operator-trace and
/// inequality-form evaluations of the B and C conditions.
pub const ROUTE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Condition {
    P,
    DualP,
    B,
    C,
    StrengthenedB,
    EigenBound,
    OneParticleBound,
}

impl Condition {
    pub const ALL: [Condition; 7] = [
        Condition::P,
        Condition::DualP,
        Condition::B,
        Condition::C,
        Condition::StrengthenedB,
        Condition::EigenBound,
        Condition::OneParticleBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::P => "P",
            Condition::DualP => "DualP",
            Condition::B => "B",
            Condition::C => "C",
            Condition::StrengthenedB => "StrengthenedB",
            Condition::EigenBound => "EigenBound",
            Condition::OneParticleBound => "OneParticleBound",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub passed: bool,
    pub tol: f64,
    /// Which probe geminal (or eigenvalue group) produced the report.
    pub probe: String,
}

impl ConditionReport {
    /// `value ≤ bound`.
    pub fn upper(condition: Condition, value: f64, bound: f64, tol: f64, probe: impl Into<String>) -> Self {
        let margin = bound - value;
        Self {
            condition,
            value,
            bound,
            margin,
            passed: margin >= -tol,
            tol,
            probe: probe.into(),
        }
    }

    /// `value ≥ 0`.
    pub fn nonnegative(condition: Condition, value: f64, tol: f64, probe: impl Into<String>) -> Self {
        Self {
            condition,
            value,
            bound: 0.0,
            margin: value,
            passed: value >= -tol,
            tol,
            probe: probe.into(),
        }
    }
}

/// How `Λ_max` is obtained for the dual P-condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaMode {
    /// Closed form, `N = 3` only.
    Analytic,
    /// Diagonalize `C(N,2) P_g ∧ I^{∧(N-2)}`.
    Numeric,
}

/// A named probe geminal.
#[derive(Clone, Debug)]
pub struct Probe {
    pub name: String,
    pub geminal: WaveFunction,
}

impl Probe {
    pub fn new(name: impl Into<String>, geminal: WaveFunction) -> Self {
        Self {
            name: name.into(),
            geminal,
        }
    }
}

fn check_pair(d: &DensityOperator, g: &WaveFunction) -> Result<()> {
    if d.p() != 2 {
        return domain(format!("expected a 2-density, got p = {}", d.p()));
    }
    same_space(d.basis(), g.basis())
}

fn check_particles(n: usize, particles: usize) -> Result<()> {
    if particles < 2 || particles > n {
        return domain(format!("N = {particles} outside 2..={n}"));
    }
    Ok(())
}

fn describe(g: &WaveFunction) -> String {
    format!("geminal(n={})", g.n())
}

/// `Tr(D P_g) ≥ 0`.
pub fn p_condition(d: &DensityOperator, g: &WaveFunction, tol: f64) -> Result<ConditionReport> {
    check_pair(d, g)?;
    let value = expectation(d, &projector(g)?)?;
    Ok(ConditionReport::nonnegative(
        Condition::P,
        value,
        tol,
        describe(g),
    ))
}

/// `Λ_max(g)` of `C(N,2) P_g ∧ I^{∧(N-2)}`.
pub fn lambda_max(g: &WaveFunction, particles: usize, mode: LambdaMode) -> Result<f64> {
    match mode {
        LambdaMode::Analytic => {
            if particles != 3 {
                return domain(format!(
                    "closed-form Λ_max is only available for N = 3, got {particles}"
                ));
            }
            let form = canonical_decompose(g, DEFAULT_RANK_TOLERANCE)?;
            lambda_max3(&form, g.n())
        }
        LambdaMode::Numeric => lambda_max_numeric(g, particles),
    }
}

/// `Tr(D P_g) ≤ Λ_max(g) / C(N,2)`.
pub fn dual_p_condition(
    d: &DensityOperator,
    g: &WaveFunction,
    particles: usize,
    mode: LambdaMode,
    tol: f64,
) -> Result<ConditionReport> {
    check_pair(d, g)?;
    check_particles(g.n(), particles)?;
    let bound = lambda_max(g, particles, mode)? / binomial(particles, 2) as f64;
    let value = expectation(d, &projector(g)?)?;
    Ok(ConditionReport::upper(
        Condition::DualP,
        value,
        bound,
        tol,
        describe(g),
    ))
}

/// The dual-cone element `Λ_max/C(N,2) · I − P_g`.
pub fn dual_p_operator(g: &WaveFunction, particles: usize, mode: LambdaMode) -> Result<HermitianOperator> {
    let scale = lambda_max(g, particles, mode)? / binomial(particles, 2) as f64;
    let identity = HermitianOperator::identity(g.basis().clone());
    Ok(&(scale * &identity) - &projector(g)?)
}

/// Check every eigenpair `(λ_i, g_i)` of `D` against `λ_i ≤ Λ_max(g_i)/3`.
///
/// Degenerate eigenvalues are grouped (within `1e-9 ‖D‖_F`) and each group
/// reports the worst margin over the eigenvectors returned by the solver.
pub fn eigen_bound_check(d: &DensityOperator, particles: usize, tol: f64) -> Result<Vec<ConditionReport>> {
    if particles != 3 {
        return domain("the eigenvalue bound uses the closed-form Λ_max and needs N = 3");
    }
    if d.p() != 2 {
        return domain("expected a 2-density");
    }
    let eig = d.operator().eig()?;
    let scale = crate::eigen::frobenius(d.matrix());
    let mut reports = Vec::new();
    for group in eig.groups(1e-9 * scale) {
        let mut worst: Option<ConditionReport> = None;
        for i in group.clone() {
            let lambda = eig.values[i];
            if lambda <= tol {
                continue;
            }
            let g = WaveFunction::new(d.basis().clone(), eig.vector(i))?.normalized()?;
            let form = canonical_decompose(&g, DEFAULT_RANK_TOLERANCE)?;
            let bound = lambda_max3(&form, d.n())? / 3.0;
            let report = ConditionReport::upper(
                Condition::EigenBound,
                lambda,
                bound,
                tol,
                format!("eigen[{}..{}] r={}", group.start, group.end, form.one_rank),
            );
            if worst.as_ref().is_none_or(|w| report.margin < w.margin) {
                worst = Some(report);
            }
        }
        reports.extend(worst);
    }
    Ok(reports)
}

/// `x¹ = L¹₂ P_g` as a one-particle operator.
fn one_body_marginal(g: &WaveFunction) -> Result<HermitianOperator> {
    contract_operator(&projector(g)?, 1)
}

/// `B_N(g) = I − (N−2) L¹₂P_g ∧ I¹ − (N−1) P_g`.
pub fn b_operator(g: &WaveFunction, particles: usize) -> Result<HermitianOperator> {
    check_particles(g.n(), particles)?;
    let wedge = lift(&one_body_marginal(g)?, 2)?;
    let identity = HermitianOperator::identity(g.basis().clone());
    let pg = projector(g)?;
    Ok(&(&identity - &((particles as f64 - 2.0) * &wedge)) - &((particles as f64 - 1.0) * &pg))
}

/// `C_N(g) = (n−N+2) L¹₂P_g ∧ I¹ − (N−1) P_g`.
pub fn c_operator(g: &WaveFunction, particles: usize) -> Result<HermitianOperator> {
    check_particles(g.n(), particles)?;
    let n = g.n() as f64;
    let wedge = lift(&one_body_marginal(g)?, 2)?;
    let pg = projector(g)?;
    Ok(&((n - particles as f64 + 2.0) * &wedge) - &((particles as f64 - 1.0) * &pg))
}

/// Shared pieces of the B/C inequality forms: `(Tr(D P_g), Tr(L¹₂D · L¹₂P_g))`.
fn pair_and_marginal_overlap(d: &DensityOperator, g: &WaveFunction) -> Result<(f64, f64)> {
    let value = expectation(d, &projector(g)?)?;
    let d1 = contract(d, 1)?;
    let overlap = expectation(&d1, &one_body_marginal(g)?)?;
    Ok((value, overlap))
}

fn route_check(name: Condition, operator_route: f64, inequality_route: f64) -> Result<()> {
    let gap = (operator_route - inequality_route).abs();
    if gap > ROUTE_TOLERANCE {
        return Err(Error::Consistency(format!(
            "{name}: operator trace {operator_route} vs inequality form {inequality_route} (gap {gap:e})"
        )));
    }
    Ok(())
}

/// `Tr(B_N(g) D) ≥ 0`; for `N = 3` reported as
/// `Tr(D P_g) ≤ ½ [1 − Tr(L¹₂D L¹₂P_g)]`.
pub fn b_condition(
    d: &DensityOperator,
    g: &WaveFunction,
    particles: usize,
    tol: f64,
) -> Result<ConditionReport> {
    check_pair(d, g)?;
    let raw = expectation(d, &b_operator(g, particles)?)?;
    if particles != 3 {
        return Ok(ConditionReport::nonnegative(Condition::B, raw, tol, describe(g)));
    }
    let (value, overlap) = pair_and_marginal_overlap(d, g)?;
    let report = ConditionReport::upper(Condition::B, value, 0.5 * (1.0 - overlap), tol, describe(g));
    route_check(Condition::B, raw, 2.0 * report.margin)?;
    Ok(report)
}

/// `Tr(C_N(g) D) ≥ 0`; for `N = 3` reported as
/// `Tr(D P_g) ≤ (n−1)/2 · Tr(L¹₂D L¹₂P_g)`.
pub fn c_condition(
    d: &DensityOperator,
    g: &WaveFunction,
    particles: usize,
    tol: f64,
) -> Result<ConditionReport> {
    check_pair(d, g)?;
    let raw = expectation(d, &c_operator(g, particles)?)?;
    if particles != 3 {
        return Ok(ConditionReport::nonnegative(Condition::C, raw, tol, describe(g)));
    }
    let (value, overlap) = pair_and_marginal_overlap(d, g)?;
    let n = g.n() as f64;
    let report = ConditionReport::upper(Condition::C, value, 0.5 * (n - 1.0) * overlap, tol, describe(g));
    route_check(Condition::C, raw, 2.0 * report.margin)?;
    Ok(report)
}

/// `Λ_min` of `C(N,2) B_N(g) ∧ I^{∧(N−2)}`.
pub fn lambda_min_b(g: &WaveFunction, particles: usize) -> Result<f64> {
    let n = g.n();
    check_particles(n, particles)?;
    if n > MAX_NUMERIC_N || particles > MAX_NUMERIC_PARTICLES {
        return Err(Error::Resource(format!(
            "strengthened B limited to n <= {MAX_NUMERIC_N}, N <= {MAX_NUMERIC_PARTICLES}"
        )));
    }
    let lifted = binomial(particles, 2) as f64 * &lift_two_body(&b_operator(g, particles)?, particles)?;
    Ok(*lifted.eigenvalues()?.last().expect("nonempty space"))
}

/// The dual-cone element `C(N,2) B_N(g) − Λ_min I`.
pub fn strengthened_b_operator(g: &WaveFunction, particles: usize) -> Result<HermitianOperator> {
    let lambda = lambda_min_b(g, particles)?;
    let b = binomial(particles, 2) as f64 * &b_operator(g, particles)?;
    Ok(&b - &(lambda * &HermitianOperator::identity(g.basis().clone())))
}

/// `Tr[(C(N,2) B_N(g) − Λ_min I) D] ≥ 0`, reported as the induced upper bound
/// `Tr(D P_g) ≤ [1 − (N−2) Tr(L¹₂D L¹₂P_g) − Λ_min/C(N,2)] / (N−1)`.
pub fn strengthened_b_condition(
    d: &DensityOperator,
    g: &WaveFunction,
    particles: usize,
    tol: f64,
) -> Result<ConditionReport> {
    check_pair(d, g)?;
    let lambda = lambda_min_b(g, particles)?;
    strengthened_b_with(d, g, particles, lambda, tol)
}

fn strengthened_b_with(
    d: &DensityOperator,
    g: &WaveFunction,
    particles: usize,
    lambda: f64,
    tol: f64,
) -> Result<ConditionReport> {
    let pairs = binomial(particles, 2) as f64;
    let n_minus = particles as f64;
    let (value, overlap) = pair_and_marginal_overlap(d, g)?;
    let bound = (1.0 - (n_minus - 2.0) * overlap - lambda / pairs) / (n_minus - 1.0);
    let report = ConditionReport::upper(Condition::StrengthenedB, value, bound, tol, describe(g));
    let b = pairs * &b_operator(g, particles)?;
    let shifted = &b - &(lambda * &HermitianOperator::identity(g.basis().clone()));
    let raw = trace_product(d.operator(), &shifted)?;
    route_check(
        Condition::StrengthenedB,
        raw,
        pairs * (n_minus - 1.0) * report.margin,
    )?;
    Ok(report)
}

/// Largest eigenvalue of `D¹` against `1/N`.
pub fn one_particle_bound(d1: &DensityOperator, particles: usize, tol: f64) -> Result<ConditionReport> {
    if d1.p() != 1 {
        return domain("expected a one-particle density");
    }
    if particles == 0 {
        return domain("N must be positive");
    }
    let value = d1.operator().eigenvalues()?[0];
    Ok(ConditionReport::upper(
        Condition::OneParticleBound,
        value,
        1.0 / particles as f64,
        tol,
        "D1",
    ))
}

/// Which probe geminals [`default_probes`] assembles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeSet {
    /// Eigenvectors of `D`.
    Eigen,
    /// The extreme geminal (even `n` only).
    Extreme,
    /// `k` seeded random geminals.
    Random(usize),
    /// Eigenvectors, extreme geminal and `k` random geminals.
    All(usize),
}

impl FromStr for ProbeSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eigen" => Ok(ProbeSet::Eigen),
            "extreme" => Ok(ProbeSet::Extreme),
            "all" => Ok(ProbeSet::All(4)),
            other => {
                let parse = |tail: &str| {
                    tail.parse::<usize>()
                        .map_err(|_| Error::Domain(format!("bad probe count in {other:?}")))
                };
                if let Some(k) = other.strip_prefix("random:") {
                    Ok(ProbeSet::Random(parse(k)?))
                } else if let Some(k) = other.strip_prefix("all:") {
                    Ok(ProbeSet::All(parse(k)?))
                } else {
                    Err(Error::Domain(format!(
                        "unknown probe set {other:?} (eigen, extreme, random:k, all)"
                    )))
                }
            }
        }
    }
}

/// Assemble probe geminals for `D` in a fixed order: eigenvectors (descending
/// eigenvalue), extreme geminal, random geminals.
pub fn default_probes(d: &DensityOperator, set: ProbeSet, seed: u64) -> Result<Vec<Probe>> {
    let n = d.n();
    let mut probes = Vec::new();
    let (eigen, extreme, random) = match set {
        ProbeSet::Eigen => (true, false, 0),
        ProbeSet::Extreme => (false, true, 0),
        ProbeSet::Random(k) => (false, false, k),
        ProbeSet::All(k) => (true, true, k),
    };
    if eigen {
        let eig = d.operator().eig()?;
        for i in 0..eig.values.len() {
            let g = WaveFunction::new(d.basis().clone(), eig.vector(i))?.normalized()?;
            probes.push(Probe::new(format!("eigen[{i}] λ={:.6}", eig.values[i]), g));
        }
    }
    if extreme && n.is_multiple_of(2) && n >= 4 {
        probes.push(Probe::new("extreme", extreme_geminal(n)?));
    }
    let mut rng = rng_for(seed, 0);
    for j in 0..random {
        probes.push(Probe::new(
            format!("random[{j}] seed={seed}"),
            random_pure_state_from(n, 2, &mut rng),
        ));
    }
    Ok(probes)
}

/// Evaluate every applicable condition for each probe, then the eigenvalue
/// and one-particle conditions. Output order: probe index, then condition.
pub fn run_all(
    d: &DensityOperator,
    particles: usize,
    probes: &[Probe],
    tol: f64,
) -> Result<Vec<ConditionReport>> {
    if probes.is_empty() {
        return domain("run_all needs at least one probe geminal");
    }
    if d.p() != 2 {
        return domain("run_all expects a 2-density");
    }
    check_particles(d.n(), particles)?;
    let mode = if particles == 3 {
        LambdaMode::Analytic
    } else {
        LambdaMode::Numeric
    };
    let numeric_ok = d.n() <= MAX_NUMERIC_N && particles <= MAX_NUMERIC_PARTICLES;
    let mut reports = Vec::new();
    for probe in probes {
        let g = &probe.geminal;
        let mut push = |mut r: ConditionReport| {
            r.probe = probe.name.clone();
            reports.push(r);
        };
        push(p_condition(d, g, tol)?);
        if mode == LambdaMode::Analytic || numeric_ok {
            push(dual_p_condition(d, g, particles, mode, tol)?);
        }
        push(b_condition(d, g, particles, tol)?);
        push(c_condition(d, g, particles, tol)?);
        if numeric_ok {
            push(strengthened_b_condition(d, g, particles, tol)?);
        }
    }
    if particles == 3 {
        reports.extend(eigen_bound_check(d, particles, tol)?);
    }
    reports.push(one_particle_bound(&contract(d, 1)?, particles, tol)?);
    Ok(reports)
}

/// Closed-form and numerically evaluated N = 3 bounds on `Tr(D P_g)` for the
/// extreme geminal at even `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundComparison {
    pub n: usize,
    pub dual_p: f64,
    pub b: f64,
    pub c: f64,
    pub strengthened_b: f64,
    pub lambda_min_b: f64,
}

impl BoundComparison {
    pub fn dual_p_closed(&self) -> f64 {
        (1.0 - 2.0 / self.n as f64) / 3.0
    }

    pub fn bc_closed(&self) -> f64 {
        0.5 * (1.0 - 1.0 / self.n as f64)
    }

    pub fn lambda_min_closed(&self) -> f64 {
        1.0 + 1.0 / self.n as f64
    }

    /// Largest gap between a numeric route and its closed form.
    pub fn max_route_gap(&self) -> f64 {
        [
            self.dual_p - self.dual_p_closed(),
            self.b - self.bc_closed(),
            self.c - self.bc_closed(),
            self.strengthened_b - self.dual_p_closed(),
            self.lambda_min_b - self.lambda_min_closed(),
        ]
        .iter()
        .fold(0.0, |acc, x| acc.max(x.abs()))
    }
}

/// Evaluate every bound through the condition routes. For `g_extr` the
/// marginal `L¹₂P_g = I/n` makes the bounds independent of `D`, so the
/// maximally mixed density is used as the carrier.
pub fn compare_bounds(n: usize) -> Result<BoundComparison> {
    if !n.is_multiple_of(2) || n < 4 {
        return domain(format!("bound comparison needs even n >= 4, got {n}"));
    }
    let g = extreme_geminal(n)?;
    let d = DensityOperator::maximally_mixed(g.basis().clone());
    let tol = DEFAULT_TOL;
    let lambda = lambda_min_b(&g, 3)?;
    Ok(BoundComparison {
        n,
        dual_p: dual_p_condition(&d, &g, 3, LambdaMode::Analytic, tol)?.bound,
        b: b_condition(&d, &g, 3, tol)?.bound,
        c: c_condition(&d, &g, 3, tol)?.bound,
        strengthened_b: strengthened_b_with(&d, &g, 3, lambda, tol)?.bound,
        lambda_min_b: lambda,
    })
}
