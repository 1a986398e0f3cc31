//! Wavefunctions and Hermitian operators on `∧^p H¹`.
//!
//! Wedge convention: `b^q ∧ I^{∧(p-q)} := A^p (b^q ⊗ I^{⊗(p-q)}) A^p` with no
//! combinatorial factor. In the Slater basis this is
//!
//! ```text
//! ⟨K| b ∧ I |L⟩ = C(p,q)^{-1} Σ_R  b_{IJ} · s(I,R) s(J,R),   K = I ∪ R, L = J ∪ R
//! ```
//!
//! where `s(I,R)` is the sign of sorting the concatenation `(I, R)`. The
//! contraction is the adjoint map with the same `C(p,q)^{-1}` factor, which
//! makes it trace preserving:
//! `Tr((b ∧ I) D) = Tr(b · contract(D, q))`.

use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::basis::{
    concat_sign, enumerate_basis, insert_orbital, merge_sorted, splits, Insertion, SlaterBasis,
};
use crate::eigen::{self, Eigen};
use crate::error::domain;
use crate::{binomial, Error, Result};

/// Tolerance on `‖g‖ = 1` for operations that require normalized input.
pub const NORM_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coefficient vector over a Slater basis.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    basis: Arc<SlaterBasis>,
    coeffs: DVector<Complex64>,
}

impl WaveFunction {
    pub fn new(basis: Arc<SlaterBasis>, coeffs: DVector<Complex64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return domain(format!(
                "{} coefficients for a basis of size {}",
                coeffs.len(),
                basis.len()
            ));
        }
        Ok(Self { basis, coeffs })
    }

    pub fn zeros(basis: Arc<SlaterBasis>) -> Self {
        let len = basis.len();
        Self {
            basis,
            coeffs: DVector::zeros(len),
        }
    }

    /// Build from `(orbitals, coefficient)` terms; orbitals must be increasing.
    pub fn from_terms(n: usize, p: usize, terms: &[(&[usize], Complex64)]) -> Result<Self> {
        let basis = Arc::new(enumerate_basis(n, p)?);
        let mut coeffs = DVector::zeros(basis.len());
        for (orbitals, c) in terms {
            coeffs[basis.rank_of_orbitals(orbitals)?] += *c;
        }
        Ok(Self { basis, coeffs })
    }

    /// A single Slater determinant.
    pub fn slater(n: usize, orbitals: &[usize]) -> Result<Self> {
        Self::from_terms(n, orbitals.len(), &[(orbitals, Complex64::new(1.0, 0.0))])
    }

    pub fn basis(&self) -> &Arc<SlaterBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &DVector<Complex64> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> DVector<Complex64> {
        self.coeffs
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn p(&self) -> usize {
        self.basis.p()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return domain("cannot normalize a zero wavefunction");
        }
        Ok(Self {
            basis: self.basis.clone(),
            coeffs: &self.coeffs / Complex64::new(norm, 0.0),
        })
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.coeffs.dotc(&other.coeffs)
    }

    /// Apply the one-particle unitary `u` (columns are the new orbitals in
    /// the old basis) through its `p`-fold exterior power.
    pub fn rotate(&self, u: &DMatrix<Complex64>) -> Result<Self> {
        let power = exterior_power(u, &self.basis)?;
        Ok(Self {
            basis: self.basis.clone(),
            coeffs: power * &self.coeffs,
        })
    }

    pub(crate) fn require_normalized(&self, what: &str) -> Result<()> {
        if !self.is_normalized() {
            return domain(format!("{what} must be normalized (norm {})", self.norm()));
        }
        Ok(())
    }
}

/// Dense Hermitian matrix over a Slater basis.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    basis: Arc<SlaterBasis>,
    matrix: DMatrix<Complex64>,
}

impl HermitianOperator {
    pub fn new(basis: Arc<SlaterBasis>, matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::with_tolerance(basis, matrix, 1e-12)
    }

    /// Accept `M` if `‖M − M†‖_max ≤ tol · ‖M‖_max`, storing `(M + M†)/2`.
    pub fn with_tolerance(basis: Arc<SlaterBasis>, matrix: DMatrix<Complex64>, tol: f64) -> Result<Self> {
        if matrix.nrows() != basis.len() || matrix.ncols() != basis.len() {
            return domain(format!(
                "{}x{} matrix for a basis of size {}",
                matrix.nrows(),
                matrix.ncols(),
                basis.len()
            ));
        }
        eigen::check_hermitian_within(&matrix, tol)?;
        Ok(Self::hermitized(basis, matrix))
    }

    /// Store `(M + M†)/2`; callers guarantee `M` is Hermitian up to rounding.
    pub(crate) fn hermitized(basis: Arc<SlaterBasis>, matrix: DMatrix<Complex64>) -> Self {
        let matrix = (&matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
        Self { basis, matrix }
    }

    pub fn identity(basis: Arc<SlaterBasis>) -> Self {
        let dim = basis.len();
        Self {
            basis,
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn basis(&self) -> &Arc<SlaterBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn p(&self) -> usize {
        self.basis.p()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn apply(&self, v: &WaveFunction) -> Result<WaveFunction> {
        same_space(&self.basis, v.basis())?;
        WaveFunction::new(self.basis.clone(), &self.matrix * v.coeffs())
    }

    pub fn eig(&self) -> Result<Eigen> {
        eigen::eigh(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigen::eigvalsh(&self.matrix)
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;

    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        assert_eq!(self.basis, rhs.basis, "operator bases differ");
        HermitianOperator {
            basis: self.basis.clone(),
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;

    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        assert_eq!(self.basis, rhs.basis, "operator bases differ");
        HermitianOperator {
            basis: self.basis.clone(),
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul<&HermitianOperator> for f64 {
    type Output = HermitianOperator;

    fn mul(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            basis: rhs.basis.clone(),
            matrix: &rhs.matrix * Complex64::new(self, 0.0),
        }
    }
}

/// PSD unit-trace Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator(HermitianOperator);

/// Tolerance used when validating density operators.
#[derive(Clone, Copy, Debug)]
pub struct DensityTolerance {
    /// Smallest eigenvalue must be `≥ -psd · trace`.
    pub psd: f64,
    pub trace: f64,
}

impl Default for DensityTolerance {
    fn default() -> Self {
        Self {
            psd: 1e-10,
            trace: 1e-10,
        }
    }
}

impl DensityOperator {
    pub fn new(op: HermitianOperator, tol: DensityTolerance) -> Result<Self> {
        let trace = op.trace();
        if (trace - 1.0).abs() > tol.trace {
            return domain(format!("density operator has trace {trace}, expected 1"));
        }
        let min = op.eigenvalues()?.last().copied().unwrap_or(0.0);
        if min < -tol.psd * trace.abs().max(1.0) {
            return domain(format!("density operator is not PSD (min eigenvalue {min:e})"));
        }
        Ok(Self(op))
    }

    /// Wrap an operator already known to be PSD with unit trace.
    pub(crate) fn trusted(op: HermitianOperator) -> Self {
        Self(op)
    }

    /// `I / dim`.
    pub fn maximally_mixed(basis: Arc<SlaterBasis>) -> Self {
        let dim = basis.len() as f64;
        Self(1.0 / dim * &HermitianOperator::identity(basis))
    }

    /// `|g⟩⟨g|` for a normalized `g`.
    pub fn pure(g: &WaveFunction) -> Result<Self> {
        projector(g).map(Self)
    }

    /// `Σ w_j |f_j⟩⟨f_j|` with nonnegative weights summing to one.
    pub fn mixture(states: &[(f64, WaveFunction)]) -> Result<Self> {
        let Some((_, first)) = states.first() else {
            return domain("empty mixture");
        };
        let basis = first.basis().clone();
        let total: f64 = states.iter().map(|(w, _)| w).sum();
        if states.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return domain("mixture weights must be nonnegative and sum to 1");
        }
        let mut matrix = DMatrix::zeros(basis.len(), basis.len());
        for (w, f) in states {
            same_space(&basis, f.basis())?;
            f.require_normalized("mixture component")?;
            matrix += f.coeffs() * f.coeffs().adjoint() * Complex64::new(*w, 0.0);
        }
        Ok(Self(HermitianOperator::hermitized(basis, matrix)))
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.0
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0.matrix
    }

    pub fn basis(&self) -> &Arc<SlaterBasis> {
        &self.0.basis
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn p(&self) -> usize {
        self.0.p()
    }
}

pub(crate) fn same_space(a: &SlaterBasis, b: &SlaterBasis) -> Result<()> {
    if a.n() != b.n() || a.p() != b.p() {
        return domain(format!(
            "basis mismatch: (n={}, p={}) vs (n={}, p={})",
            a.n(),
            a.p(),
            b.n(),
            b.p()
        ));
    }
    Ok(())
}

/// Rank-one projector `g g†`.
pub fn projector(g: &WaveFunction) -> Result<HermitianOperator> {
    g.require_normalized("projector argument")?;
    let matrix = g.coeffs() * g.coeffs().adjoint();
    Ok(HermitianOperator::hermitized(g.basis().clone(), matrix))
}

/// Coefficient-level `Σ_K c_K · sign(K, m) |K ∪ m⟩`, i.e. `√(p+1) g ∧ |m⟩`.
/// Terms with `m ∈ K` vanish; the result is returned unnormalized.
pub fn wedge_with_orbital(g: &WaveFunction, m: usize) -> Result<WaveFunction> {
    let n = g.n();
    if m >= n {
        return domain(format!("orbital {m} out of range for n = {n}"));
    }
    if g.p() >= n {
        return domain("no room for another orbital");
    }
    let target = Arc::new(enumerate_basis(n, g.p() + 1)?);
    let mut out = DVector::zeros(target.len());
    for (label, &c) in g.basis().labels().iter().zip(g.coeffs().iter()) {
        if c == ZERO {
            continue;
        }
        if let Insertion::Merged { sign, label } = insert_orbital(label, m) {
            out[target.rank_unchecked(label.orbitals())] += c * f64::from(sign);
        }
    }
    WaveFunction::new(target, out)
}

/// `Σ_m φ_m · wedge_with_orbital(g, m)` for an arbitrary orbital vector `φ`.
pub fn wedge_with_vector(g: &WaveFunction, phi: &DVector<Complex64>) -> Result<WaveFunction> {
    if phi.len() != g.n() {
        return domain("orbital vector length differs from n");
    }
    let target = Arc::new(enumerate_basis(g.n(), g.p() + 1)?);
    let mut out = DVector::zeros(target.len());
    for (label, &c) in g.basis().labels().iter().zip(g.coeffs().iter()) {
        for (m, &w) in phi.iter().enumerate() {
            if let Insertion::Merged { sign, label } = insert_orbital(label, m) {
                out[target.rank_unchecked(label.orbitals())] += c * w * f64::from(sign);
            }
        }
    }
    WaveFunction::new(target, out)
}

/// Visit every `(K, L, I, J, sign)` with `K = I ∪ R`, `L = J ∪ R`, `|I| = |J| = q`.
fn for_each_reduction(
    big: &SlaterBasis,
    small: &SlaterBasis,
    mut visit: impl FnMut(usize, usize, usize, usize, f64),
) {
    let q = small.p();
    for (k, label) in big.labels().iter().enumerate() {
        for (chosen, rest) in splits(label.orbitals(), q) {
            let i = small.rank_unchecked(&chosen);
            let sign_k = concat_sign(&chosen, &rest);
            for (j, other) in small.labels().iter().enumerate() {
                let other = other.orbitals();
                if other.iter().any(|o| rest.binary_search(o).is_ok()) {
                    continue;
                }
                let merged = merge_sorted(other, &rest);
                let l = big.rank_unchecked(&merged);
                visit(k, l, i, j, sign_k * concat_sign(other, &rest));
            }
        }
    }
}

/// `b^q ∧ I^{∧(p-q)}` on `∧^p`, without any binomial prefactor.
pub fn lift(b: &HermitianOperator, p: usize) -> Result<HermitianOperator> {
    let n = b.n();
    let q = b.p();
    if p < q || p > n {
        return domain(format!("cannot lift a {q}-body operator to p = {p} with n = {n}"));
    }
    let big = Arc::new(enumerate_basis(n, p)?);
    let mut out = DMatrix::zeros(big.len(), big.len());
    let scale = 1.0 / binomial(p, q) as f64;
    let src = b.matrix();
    for_each_reduction(&big, b.basis(), |k, l, i, j, sign| {
        out[(k, l)] += src[(i, j)] * (sign * scale);
    });
    Ok(HermitianOperator::hermitized(big, out))
}

/// Grassmann lift of a 2-particle operator: `b² ∧ I^{∧(N-2)}`.
pub fn lift_two_body(b: &HermitianOperator, particles: usize) -> Result<HermitianOperator> {
    if b.p() != 2 {
        return domain(format!("expected a 2-particle operator, got p = {}", b.p()));
    }
    if particles < 2 {
        return domain("N must be at least 2");
    }
    lift(b, particles)
}

/// Trace-preserving partial trace of an operator on `∧^p` down to `∧^q`.
pub fn contract_operator(h: &HermitianOperator, q: usize) -> Result<HermitianOperator> {
    let p = h.p();
    if q >= p {
        return domain(format!("contraction requires q < p (q = {q}, p = {p})"));
    }
    let small = Arc::new(enumerate_basis(h.n(), q)?);
    let mut out = DMatrix::zeros(small.len(), small.len());
    let scale = 1.0 / binomial(p, q) as f64;
    let src = h.matrix();
    for_each_reduction(h.basis(), &small, |k, l, i, j, sign| {
        out[(i, j)] += src[(k, l)] * (sign * scale);
    });
    Ok(HermitianOperator::hermitized(small, out))
}

/// `L^q_p D`: the reduced `q`-particle density operator.
pub fn contract(d: &DensityOperator, q: usize) -> Result<DensityOperator> {
    contract_operator(d.operator(), q).map(DensityOperator::trusted)
}

/// `Tr(D H)`; fails if the imaginary part exceeds `1e-12`.
pub fn expectation(d: &DensityOperator, h: &HermitianOperator) -> Result<f64> {
    trace_product(d.operator(), h)
}

pub fn trace_product(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    same_space(a.basis(), b.basis())?;
    // Tr(AB) = Σ_ij A_ij B_ji
    let mut acc = ZERO;
    for j in 0..a.dim() {
        for i in 0..a.dim() {
            acc += a.matrix[(i, j)] * b.matrix[(j, i)];
        }
    }
    if acc.im.abs() > 1e-12 * acc.re.abs().max(1.0) {
        return Err(Error::Numeric(format!("trace has imaginary part {:e}", acc.im)));
    }
    Ok(acc.re)
}

/// Eigendecomposition of a Hermitian operator, eigenvalues descending.
pub fn hermitian_eig(h: &HermitianOperator) -> Result<Eigen> {
    h.eig()
}

/// Matrix of the `p`-fold exterior power of a one-particle matrix `u` in the
/// Slater basis: entries are the `p×p` minors `det u[K, L]`.
pub fn exterior_power(u: &DMatrix<Complex64>, basis: &SlaterBasis) -> Result<DMatrix<Complex64>> {
    let n = basis.n();
    if u.nrows() != n || u.ncols() != n {
        return domain(format!("one-particle matrix must be {n}x{n}"));
    }
    let p = basis.p();
    let dim = basis.len();
    let mut out = DMatrix::zeros(dim, dim);
    let mut minor = DMatrix::zeros(p, p);
    for (r, row) in basis.labels().iter().enumerate() {
        for (c, col) in basis.labels().iter().enumerate() {
            for (a, &i) in row.orbitals().iter().enumerate() {
                for (b, &j) in col.orbitals().iter().enumerate() {
                    minor[(a, b)] = u[(i, j)];
                }
            }
            out[(r, c)] = if p == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                minor.clone().determinant()
            };
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{antisymmetrizer_oracle, tensor_contract_oracle};
    use crate::sampling::{extreme_geminal, random_hermitian, random_pure_state};

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn max_dev(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        eigen::max_abs(&(a - b))
    }

    #[test]
    fn projector_of_slater_is_diagonal_unit() {
        let g = WaveFunction::slater(4, &[1, 3]).unwrap();
        let p = projector(&g).unwrap();
        let k = g.basis().rank_of_orbitals(&[1, 3]).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let expect = if i == k && j == k { 1.0 } else { 0.0 };
                assert_eq!(p.matrix()[(i, j)], re(expect));
            }
        }
    }

    #[test]
    fn projector_is_idempotent() {
        let g = random_pure_state(6, 2, 5);
        let p = projector(&g).unwrap();
        assert!((p.trace() - 1.0).abs() < 1e-12);
        assert!(max_dev(&(p.matrix() * p.matrix()), p.matrix()) < 1e-12);
    }

    #[test]
    fn projector_rejects_unnormalized() {
        let g = WaveFunction::from_terms(4, 2, &[(&[0, 1], re(2.0))]).unwrap();
        assert!(matches!(projector(&g), Err(Error::Domain(_))));
    }

    #[test]
    fn projector_of_extreme_geminal() {
        let g = extreme_geminal(4).unwrap();
        let p = projector(&g).unwrap();
        let a = g.basis().rank_of_orbitals(&[0, 1]).unwrap();
        let b = g.basis().rank_of_orbitals(&[2, 3]).unwrap();
        // outer product of (√½, √½) by hand
        assert!((p.matrix()[(a, b)] - re(0.5)).norm() < 1e-15);
        assert!((p.matrix()[(b, a)] - re(0.5)).norm() < 1e-15);
        assert!((p.matrix()[(a, a)] - re(0.5)).norm() < 1e-15);
    }

    #[test]
    fn wedge_examples() {
        let g = WaveFunction::slater(4, &[0, 1]).unwrap();
        let w = wedge_with_orbital(&g, 2).unwrap();
        assert_eq!(w, WaveFunction::slater(4, &[0, 1, 2]).unwrap());
        let w = wedge_with_orbital(&g, 0).unwrap();
        assert_eq!(w.norm(), 0.0);

        let g = extreme_geminal(4).unwrap();
        let w = wedge_with_orbital(&g, 0).unwrap();
        // only ξ₂|2,3⟩ survives; sorting (2,3,0) needs two transpositions
        let expect = WaveFunction::from_terms(4, 3, &[(&[0, 2, 3], re(0.5f64.sqrt()))]).unwrap();
        assert!((w.coeffs() - expect.coeffs()).norm() < 1e-15);
        assert!((w.norm().powi(2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn wedge_with_basis_vector_matches_orbital() {
        let g = random_pure_state(5, 2, 3);
        let mut e = DVector::zeros(5);
        e[3] = re(1.0);
        let a = wedge_with_vector(&g, &e).unwrap();
        let b = wedge_with_orbital(&g, 3).unwrap();
        assert!((a.coeffs() - b.coeffs()).norm() < 1e-15);
    }

    #[test]
    fn lift_of_identity_is_identity() {
        let basis = Arc::new(enumerate_basis(4, 2).unwrap());
        let lifted = lift_two_body(&HermitianOperator::identity(basis), 3).unwrap();
        assert!(max_dev(lifted.matrix(), &DMatrix::identity(4, 4)) < 1e-15);
    }

    #[test]
    fn lift_of_slater_projector() {
        let g = WaveFunction::slater(4, &[0, 1]).unwrap();
        let lifted = 3.0 * &lift_two_body(&projector(&g).unwrap(), 3).unwrap();
        let oracle = 3.0 * &antisymmetrizer_oracle(&projector(&g).unwrap(), 3).unwrap();
        assert!(max_dev(lifted.matrix(), oracle.matrix()) < 1e-12);
        let vals = lifted.eigenvalues().unwrap();
        let expect = [1.0, 1.0, 0.0, 0.0];
        for (v, e) in vals.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12);
        }
        let b3 = lifted.basis();
        for (orbitals, e) in [
            (&[0, 1, 2], 1.0),
            (&[0, 1, 3], 1.0),
            (&[0, 2, 3], 0.0),
            (&[1, 2, 3], 0.0),
        ] {
            let k = b3.rank_of_orbitals(orbitals).unwrap();
            assert!((lifted.matrix()[(k, k)] - re(e)).norm() < 1e-15);
        }
    }

    #[test]
    fn lift_trace_identity() {
        for n in [4, 6] {
            let g = random_pure_state(n, 2, 17);
            let lifted = lift_two_body(&projector(&g).unwrap(), 3).unwrap();
            assert!((3.0 * lifted.trace() - (n as f64 - 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn lift_rejects_mismatched_inputs() {
        let basis = Arc::new(enumerate_basis(4, 3).unwrap());
        let op = HermitianOperator::identity(basis);
        assert!(lift_two_body(&op, 3).is_err());
        let basis = Arc::new(enumerate_basis(4, 2).unwrap());
        let op = HermitianOperator::identity(basis);
        assert!(lift_two_body(&op, 5).is_err());
    }

    #[test]
    fn lift_matches_oracle_on_random_operator() {
        let b = random_hermitian(5, 2, 9);
        let lifted = lift_two_body(&b, 3).unwrap();
        let oracle = antisymmetrizer_oracle(&b, 3).unwrap();
        assert!(max_dev(lifted.matrix(), oracle.matrix()) < 1e-12);
    }

    #[test]
    fn contraction_examples() {
        // extreme geminal has uniform one-particle marginal
        for n in [4, 6, 8] {
            let d = DensityOperator::pure(&extreme_geminal(n).unwrap()).unwrap();
            let d1 = contract(&d, 1).unwrap();
            let expect = DMatrix::identity(n, n) * re(1.0 / n as f64);
            assert!(max_dev(d1.matrix(), &expect) < 1e-15);
        }
        let f = WaveFunction::slater(4, &[0, 1, 2]).unwrap();
        let d2 = contract(&DensityOperator::pure(&f).unwrap(), 2).unwrap();
        let b2 = d2.basis().clone();
        let mut expect = DMatrix::zeros(6, 6);
        for pair in [[0, 1], [0, 2], [1, 2]] {
            let k = b2.rank_of_orbitals(&pair).unwrap();
            expect[(k, k)] = re(1.0 / 3.0);
        }
        assert!(max_dev(d2.matrix(), &expect) < 1e-15);

        let g = WaveFunction::slater(4, &[0, 1]).unwrap();
        let d1 = contract(&DensityOperator::pure(&g).unwrap(), 1).unwrap();
        let expect = DMatrix::from_diagonal(&DVector::from_vec(vec![re(0.5), re(0.5), re(0.0), re(0.0)]));
        assert!(max_dev(d1.matrix(), &expect) < 1e-15);
    }

    #[test]
    fn contraction_rejects_bad_target() {
        let g = WaveFunction::slater(4, &[0, 1]).unwrap();
        let d = DensityOperator::pure(&g).unwrap();
        assert!(matches!(contract(&d, 2), Err(Error::Domain(_))));
        assert!(contract(&d, 3).is_err());
    }

    #[test]
    fn contraction_matches_tensor_oracle() {
        let f = random_pure_state(6, 3, 21);
        let d3 = DensityOperator::pure(&f).unwrap();
        let fast = contract(&d3, 2).unwrap();
        let slow = tensor_contract_oracle(d3.operator(), 2).unwrap();
        assert!(max_dev(fast.matrix(), slow.matrix()) < 1e-13);
        let fast1 = contract(&d3, 1).unwrap();
        let slow1 = tensor_contract_oracle(d3.operator(), 1).unwrap();
        assert!(max_dev(fast1.matrix(), slow1.matrix()) < 1e-13);
    }

    #[test]
    fn one_particle_marginal_is_half_m_m_dagger() {
        let g = random_pure_state(5, 2, 4);
        let m = crate::canonical::to_antisymmetric_matrix(&g).unwrap();
        let closed = &m * m.adjoint() * re(0.5);
        let d1 = contract(&DensityOperator::pure(&g).unwrap(), 1).unwrap();
        assert!(max_dev(d1.matrix(), &closed) < 1e-15);
    }

    #[test]
    fn expectation_examples() {
        let g = random_pure_state(5, 2, 8);
        let pg = projector(&g).unwrap();
        let d = DensityOperator::pure(&g).unwrap();
        assert!((expectation(&d, &pg).unwrap() - 1.0).abs() < 1e-14);
        let mixed = DensityOperator::maximally_mixed(g.basis().clone());
        assert!((expectation(&mixed, &pg).unwrap() - 0.1).abs() < 1e-15);

        let f = WaveFunction::slater(4, &[0, 1, 2]).unwrap();
        let d2 = contract(&DensityOperator::pure(&f).unwrap(), 2).unwrap();
        let p01 = projector(&WaveFunction::slater(4, &[0, 1]).unwrap()).unwrap();
        assert!((expectation(&d2, &p01).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn eig_of_lifted_extreme_projector() {
        let g = extreme_geminal(4).unwrap();
        let op = 3.0 * &lift_two_body(&projector(&g).unwrap(), 3).unwrap();
        let e = hermitian_eig(&op).unwrap();
        for v in e.values {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn density_validation() {
        let basis = Arc::new(enumerate_basis(4, 2).unwrap());
        let half = 0.9 / 6.0 * &HermitianOperator::identity(basis.clone());
        assert!(DensityOperator::new(half, DensityTolerance::default()).is_err());
        let mut m = DMatrix::<Complex64>::identity(6, 6) * re(0.5);
        m[(0, 0)] = re(-1.5);
        let op = HermitianOperator::new(basis.clone(), m).unwrap();
        assert!(DensityOperator::new(op, DensityTolerance::default()).is_err());
        let ok = 1.0 / 6.0 * &HermitianOperator::identity(basis);
        assert!(DensityOperator::new(ok, DensityTolerance::default()).is_ok());
    }

    #[test]
    fn exterior_power_of_identity_and_composition() {
        let basis = enumerate_basis(5, 3).unwrap();
        let id = exterior_power(&DMatrix::identity(5, 5), &basis).unwrap();
        assert!(max_dev(&id, &DMatrix::identity(10, 10)) < 1e-15);
        let u = crate::sampling::random_unitary(5, 3);
        let v = crate::sampling::random_unitary(5, 4);
        let lhs = exterior_power(&(&u * &v), &basis).unwrap();
        let rhs = exterior_power(&u, &basis).unwrap() * exterior_power(&v, &basis).unwrap();
        assert!(max_dev(&lhs, &rhs) < 1e-13);
    }
}
