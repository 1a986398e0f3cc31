//! Closed-form spectrum of the three-particle operator `3 P_g ∧ I¹`.
//!
//! With `g = Σ_k ξ_k |2k, 2k+1⟩` in canonical orbitals and 1-rank `r = 2s`:
//!
//! * for every pair `k`, the states `g ∧ |2k⟩` and `g ∧ |2k+1⟩` are
//!   eigenvectors with eigenvalue `1 - ξ_k²`;
//! * for every unoccupied orbital `l ≥ r`, `g ∧ |l⟩` is an eigenvector with
//!   eigenvalue `1`;
//! * everything orthogonal to those is annihilated.
//!
//! The eigenvectors are built in the canonical frame and rotated back with
//! the exterior cube of the canonical unitary.

use crate::basis::enumerate_basis;
use crate::canonical::{canonical_decompose, xi_min_sq, CanonicalForm};
use crate::eigen::frobenius;
use crate::error::domain;
use crate::operators::{exterior_power, lift_two_body, projector, wedge_with_orbital, WaveFunction};
use crate::{binomial, Error, Result};

/// Eigenvalues below this are treated as zero when counting the kernel.
pub const ZERO_EIGENVALUE: f64 = 1e-10;

/// Size guards for the numeric `Λ` routines.
pub const MAX_NUMERIC_N: usize = 12;
pub const MAX_NUMERIC_PARTICLES: usize = 4;

#[derive(Clone, Debug)]
pub struct PairEigen {
    /// Pair index `k` (0-based) in the canonical form.
    pub pair: usize,
    /// `1 - ξ_k²`.
    pub value: f64,
    pub first: WaveFunction,
    pub second: WaveFunction,
}

#[derive(Clone, Debug)]
pub struct TailEigen {
    /// Canonical orbital index `l ≥ r`.
    pub orbital: usize,
    pub function: WaveFunction,
}

#[derive(Clone, Debug)]
pub struct Spectrum3 {
    pub n: usize,
    pub pair_eigs: Vec<PairEigen>,
    /// All with eigenvalue one.
    pub tail_eigs: Vec<TailEigen>,
    /// `C(n,3)` minus the number of listed eigenvectors.
    pub kernel_dim: usize,
}

impl Spectrum3 {
    /// `C(n,3) - n`, the kernel size when every listed eigenvalue is nonzero.
    pub fn generic_kernel_dim(&self) -> usize {
        binomial(self.n, 3).saturating_sub(self.n)
    }

    /// False when some `ξ_k = 1` folded its pair into the kernel.
    pub fn kernel_is_generic(&self) -> bool {
        self.kernel_dim == self.generic_kernel_dim()
    }

    /// `(eigenvalue, eigenvector)` for every listed eigenvector.
    pub fn eigenpairs(&self) -> Vec<(f64, &WaveFunction)> {
        let mut out = Vec::with_capacity(self.n);
        for p in &self.pair_eigs {
            out.push((p.value, &p.first));
            out.push((p.value, &p.second));
        }
        for t in &self.tail_eigs {
            out.push((1.0, &t.function));
        }
        out
    }

    /// Full spectrum including kernel zeros, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self.eigenpairs().iter().map(|(v, _)| *v).collect();
        values.extend(std::iter::repeat_n(0.0, self.kernel_dim));
        values.sort_by(|a, b| b.total_cmp(a));
        values
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }
}

/// Build the closed-form spectral decomposition of `3 P_g ∧ I¹`.
pub fn analytic_spectrum3(form: &CanonicalForm, g: &WaveFunction) -> Result<Spectrum3> {
    g.require_normalized("geminal")?;
    let n = form.n();
    if g.n() != n || g.p() != 2 {
        return domain("canonical form and geminal disagree on the space");
    }
    if form.pairs() == 0 {
        return domain("geminal has 1-rank zero");
    }
    if n < 3 {
        return domain("three-particle space needs n >= 3");
    }
    let canonical = form.canonical_geminal()?;
    let triple = enumerate_basis(n, 3)?;
    let rotation = exterior_power(&form.pair_orbitals, &triple)?;
    let to_input_frame = |w: WaveFunction| -> Result<WaveFunction> {
        let norm = w.norm();
        if norm == 0.0 {
            return Err(Error::Numeric("vanishing eigenfunction".into()));
        }
        let coeffs = &rotation * w.coeffs() / num_complex::Complex64::new(norm, 0.0);
        WaveFunction::new(w.basis().clone(), coeffs)
    };

    let mut pair_eigs = Vec::new();
    for (k, &x) in form.xi.iter().enumerate() {
        let value = 1.0 - x * x;
        if value <= ZERO_EIGENVALUE {
            continue;
        }
        pair_eigs.push(PairEigen {
            pair: k,
            value,
            first: to_input_frame(wedge_with_orbital(&canonical, 2 * k)?)?,
            second: to_input_frame(wedge_with_orbital(&canonical, 2 * k + 1)?)?,
        });
    }
    let mut tail_eigs = Vec::new();
    for l in form.one_rank..n {
        tail_eigs.push(TailEigen {
            orbital: l,
            function: to_input_frame(wedge_with_orbital(&canonical, l)?)?,
        });
    }
    let listed = 2 * pair_eigs.len() + tail_eigs.len();
    Ok(Spectrum3 {
        n,
        pair_eigs,
        tail_eigs,
        kernel_dim: binomial(n, 3) - listed,
    })
}

/// `Λ_max` of `3 P_g ∧ I¹`: `1 - ξ_min²` when the 1-rank equals `n`, else `1`.
pub fn lambda_max3(form: &CanonicalForm, n: usize) -> Result<f64> {
    if form.one_rank == n {
        Ok(1.0 - xi_min_sq(form)?)
    } else {
        Ok(1.0)
    }
}

fn numeric_guard(n: usize, particles: usize) -> Result<()> {
    if particles < 2 || particles > n {
        return domain(format!("N = {particles} outside 2..={n}"));
    }
    if n > MAX_NUMERIC_N || particles > MAX_NUMERIC_PARTICLES {
        return Err(Error::Resource(format!(
            "numeric lift limited to n <= {MAX_NUMERIC_N}, N <= {MAX_NUMERIC_PARTICLES}"
        )));
    }
    Ok(())
}

/// Largest eigenvalue of `C(N,2) P_g ∧ I^{∧(N-2)}` by direct diagonalization.
pub fn lambda_max_numeric(g: &WaveFunction, particles: usize) -> Result<f64> {
    numeric_guard(g.n(), particles)?;
    let op = binomial(particles, 2) as f64 * &lift_two_body(&projector(g)?, particles)?;
    Ok(op.eigenvalues()?[0])
}

/// Outcome of checking the closed form against the lifted operator.
#[derive(Clone, Debug)]
pub struct SpectralCheck {
    pub analytic: Vec<f64>,
    pub numeric: Vec<f64>,
    /// Largest difference between the sorted eigenvalue lists.
    pub eigenvalue_deviation: f64,
    /// Largest `‖3Γ(P_g) v − λ v‖` over the analytic eigenvectors.
    pub max_residual: f64,
    /// Largest `|⟨v_i, v_j⟩ − δ_ij|` over the analytic eigenvectors.
    pub orthonormality_defect: f64,
    pub kernel_dim: usize,
    pub numeric_kernel_dim: usize,
    pub generic_kernel: bool,
}

impl SpectralCheck {
    pub fn max_deviation(&self) -> f64 {
        self.eigenvalue_deviation.max(self.max_residual)
    }
}

/// Compare [`analytic_spectrum3`] with a direct eigendecomposition of
/// `3 P_g ∧ I¹`.
pub fn verify_against_lift(g: &WaveFunction, rank_tol: f64) -> Result<SpectralCheck> {
    let form = canonical_decompose(g, rank_tol)?;
    let spectrum = analytic_spectrum3(&form, g)?;
    let op = 3.0 * &lift_two_body(&projector(g)?, 3)?;
    let numeric = op.eigenvalues()?;
    let analytic = spectrum.eigenvalues();
    let eigenvalue_deviation = analytic
        .iter()
        .zip(&numeric)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let pairs = spectrum.eigenpairs();
    let mut max_residual: f64 = 0.0;
    for (value, v) in &pairs {
        let image = op.apply(v)?;
        let r = image.coeffs() - v.coeffs() * num_complex::Complex64::new(*value, 0.0);
        max_residual = max_residual.max(r.norm());
    }
    let mut orthonormality_defect: f64 = 0.0;
    for (i, (_, a)) in pairs.iter().enumerate() {
        for (j, (_, b)) in pairs.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            orthonormality_defect = orthonormality_defect.max((a.inner(b).norm() - target).abs());
        }
    }
    let scale = frobenius(op.matrix()).max(1.0);
    let numeric_kernel_dim = numeric
        .iter()
        .filter(|v| v.abs() <= ZERO_EIGENVALUE * scale)
        .count();
    Ok(SpectralCheck {
        analytic,
        numeric,
        eigenvalue_deviation,
        max_residual,
        orthonormality_defect,
        kernel_dim: spectrum.kernel_dim,
        numeric_kernel_dim,
        generic_kernel: spectrum.kernel_is_generic(),
    })
}
