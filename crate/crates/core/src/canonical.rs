//! Canonical (pairing) form of a geminal.
//!
//! Every `g ∈ ∧²H¹` can be written as `Σ_k ξ_k |φ_{2k}, φ_{2k+1}⟩` for some
//! orthonormal orbitals `φ` and real `ξ_1 ≥ ξ_2 ≥ … > 0`. In matrix terms the
//! antisymmetric coefficient matrix factors as `M = U Σ Uᵀ` with `Σ` made of
//! `[[0, ξ_k], [-ξ_k, 0]]` blocks.
//!
//! The orbitals come from the Hermitian problem `M M† u = ξ² u`. For such a
//! `u` the pairing partner is `u' = -M ū / ξ`; the map `u ↦ u'` is
//! antiunitary on each eigenspace and squares to `-1`, so a Gram–Schmidt pass
//! that always adds `u` together with `u'` yields the block structure even
//! when several `ξ_k` coincide.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::eigen::{self, frobenius};
use crate::error::domain;
use crate::operators::WaveFunction;
use crate::Result;

/// Default relative rank tolerance: a pair is kept if `ξ > 1e-9 · ξ_max`.
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct CanonicalForm {
    /// Pairing coefficients, descending; only the retained (nonzero) pairs.
    pub xi: Vec<f64>,
    /// Columns `2k`, `2k+1` carry the orbitals paired by `xi[k]`; the
    /// remaining columns span the unoccupied complement.
    pub pair_orbitals: DMatrix<Complex64>,
    /// `r = 2s` where `s = xi.len()`.
    pub one_rank: usize,
    /// Absolute cutoff used for the rank decision.
    pub rank_tolerance: f64,
}

impl CanonicalForm {
    pub fn n(&self) -> usize {
        self.pair_orbitals.nrows()
    }

    pub fn pairs(&self) -> usize {
        self.xi.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.one_rank == self.n()
    }

    /// `U Σ Uᵀ`.
    pub fn antisymmetric_matrix(&self) -> DMatrix<Complex64> {
        let n = self.n();
        let mut out = DMatrix::zeros(n, n);
        for (k, &x) in self.xi.iter().enumerate() {
            let a = self.pair_orbitals.column(2 * k);
            let b = self.pair_orbitals.column(2 * k + 1);
            out += (a * b.transpose() - b * a.transpose()) * Complex64::new(x, 0.0);
        }
        out
    }

    /// The geminal in its own canonical orbital frame:
    /// `Σ_k ξ_k |2k, 2k+1⟩`.
    pub fn canonical_geminal(&self) -> Result<WaveFunction> {
        let terms: Vec<([usize; 2], Complex64)> = self
            .xi
            .iter()
            .enumerate()
            .map(|(k, &x)| ([2 * k, 2 * k + 1], Complex64::new(x, 0.0)))
            .collect();
        let refs: Vec<(&[usize], Complex64)> = terms.iter().map(|(o, c)| (&o[..], *c)).collect();
        WaveFunction::from_terms(self.n(), 2, &refs)
    }

    /// Rebuild the geminal coefficients in the input frame.
    pub fn reconstruct(&self) -> Result<WaveFunction> {
        from_antisymmetric_matrix(&self.antisymmetric_matrix())
    }
}

/// `M_ij = c_ij` for `i < j`, `M_ji = -c_ij`, zero diagonal.
pub fn to_antisymmetric_matrix(g: &WaveFunction) -> Result<DMatrix<Complex64>> {
    if g.p() != 2 {
        return domain(format!("expected a geminal, got a {}-particle state", g.p()));
    }
    let n = g.n();
    let mut m = DMatrix::zeros(n, n);
    for (label, &c) in g.basis().labels().iter().zip(g.coeffs().iter()) {
        let (i, j) = (label.orbitals()[0], label.orbitals()[1]);
        m[(i, j)] = c;
        m[(j, i)] = -c;
    }
    Ok(m)
}

/// Inverse of [`to_antisymmetric_matrix`]; reads the strict upper triangle.
pub fn from_antisymmetric_matrix(m: &DMatrix<Complex64>) -> Result<WaveFunction> {
    let n = m.nrows();
    if m.ncols() != n {
        return domain("antisymmetric matrix must be square");
    }
    let basis = std::sync::Arc::new(crate::basis::enumerate_basis(n, 2)?);
    let coeffs = DVector::from_iterator(
        basis.len(),
        basis
            .labels()
            .iter()
            .map(|l| m[(l.orbitals()[0], l.orbitals()[1])]),
    );
    WaveFunction::new(basis, coeffs)
}

/// Canonical decomposition with a relative rank tolerance.
pub fn canonical_decompose(g: &WaveFunction, rel_tol: f64) -> Result<CanonicalForm> {
    g.require_normalized("geminal")?;
    decompose_matrix(&to_antisymmetric_matrix(g)?, rel_tol)
}

pub(crate) fn decompose_matrix(m: &DMatrix<Complex64>, rel_tol: f64) -> Result<CanonicalForm> {
    let n = m.nrows();
    let gram = m * m.adjoint();
    let eig = eigen::eigh(&gram)?;
    let xi_max = eig.values.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    if xi_max == 0.0 {
        return domain("zero geminal has no canonical form");
    }
    let cutoff = rel_tol * xi_max;

    let mut chosen: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    let mut xi = Vec::new();
    let mut nullspace: Vec<DVector<Complex64>> = Vec::new();
    for i in 0..n {
        let Some(u) = orthonormalize(eig.vector(i), &chosen) else {
            continue;
        };
        let image = m * u.conjugate();
        let x = image.norm();
        if x <= cutoff {
            nullspace.push(eig.vector(i));
            continue;
        }
        let partner = image / Complex64::new(-x, 0.0);
        let Some(partner) = orthonormalize(partner, &chosen) else {
            return Err(crate::Error::Numeric(
                "pairing partner fell inside the already paired subspace".into(),
            ));
        };
        chosen.push(u);
        chosen.push(partner);
        xi.push(x);
    }
    let one_rank = chosen.len();
    for v in nullspace {
        if let Some(v) = orthonormalize(v, &chosen) {
            chosen.push(v);
        }
    }
    if chosen.len() != n {
        return Err(crate::Error::Numeric(format!(
            "canonical orbitals span {} of {n} dimensions",
            chosen.len()
        )));
    }

    // order pairs by descending ξ
    let mut order: Vec<usize> = (0..xi.len()).collect();
    order.sort_by(|&a, &b| xi[b].total_cmp(&xi[a]));
    let mut columns = Vec::with_capacity(n);
    for &k in &order {
        columns.push(chosen[2 * k].clone());
        columns.push(chosen[2 * k + 1].clone());
    }
    columns.extend(chosen[one_rank..].iter().cloned());
    let xi = order.iter().map(|&k| xi[k]).collect();

    Ok(CanonicalForm {
        xi,
        pair_orbitals: DMatrix::from_columns(&columns),
        one_rank,
        rank_tolerance: cutoff,
    })
}

/// Modified Gram–Schmidt against `basis`; `None` if almost nothing is left.
fn orthonormalize(mut v: DVector<Complex64>, basis: &[DVector<Complex64>]) -> Option<DVector<Complex64>> {
    for _ in 0..2 {
        for b in basis {
            let overlap = b.dotc(&v);
            v -= b * overlap;
        }
    }
    let norm = v.norm();
    (norm > 0.5).then(|| v / Complex64::new(norm, 0.0))
}

/// `min_k ξ_k²` over the retained pairs.
pub fn xi_min_sq(form: &CanonicalForm) -> Result<f64> {
    match form.xi.last() {
        Some(&x) => Ok(x * x),
        None => domain("geminal has 1-rank zero"),
    }
}

/// `‖M − U Σ Uᵀ‖_F`.
pub fn reconstruction_residual(g: &WaveFunction, form: &CanonicalForm) -> Result<f64> {
    let m = to_antisymmetric_matrix(g)?;
    Ok(frobenius(&(m - form.antisymmetric_matrix())))
}
