//! Literal tensor-space realizations used as independent oracles.
//!
//! Everything here works on the full `n^p`-dimensional product space with an
//! explicit antisymmetrizer `A = (1/p!) Σ_π sgn(π) π`, and reaches the Slater
//! basis only through the isometry `|K⟩ ↦ √(p!) A (e_{k1} ⊗ … ⊗ e_{kp})`.
//! No code is shared with the combinatorial routines in [`crate::operators`].

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::basis::{enumerate_basis, SlaterBasis};
use crate::error::domain;
use crate::operators::HermitianOperator;
use crate::{Error, Result};

/// Largest product-space dimension the oracles accept.
pub const MAX_TENSOR_DIM: usize = 1_000_000;

fn tensor_dim(n: usize, p: usize) -> Result<usize> {
    let mut dim: usize = 1;
    for _ in 0..p {
        dim = dim
            .checked_mul(n)
            .filter(|&d| d <= MAX_TENSOR_DIM)
            .ok_or_else(|| Error::Resource(format!("tensor space n^p = {n}^{p} exceeds {MAX_TENSOR_DIM}")))?;
    }
    Ok(dim)
}

/// All permutations of `0..p` with their signs.
fn permutations(p: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut perms = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; p], &mut perms);
    perms
        .into_iter()
        .map(|perm| {
            let mut inversions = 0;
            for i in 0..p {
                for j in i + 1..p {
                    if perm[i] > perm[j] {
                        inversions += 1;
                    }
                }
            }
            (perm, if inversions % 2 == 0 { 1.0 } else { -1.0 })
        })
        .collect()
}

fn digits(mut idx: usize, n: usize, p: usize) -> Vec<usize> {
    let mut d = vec![0; p];
    for slot in (0..p).rev() {
        d[slot] = idx % n;
        idx /= n;
    }
    d
}

fn flat(d: &[usize], n: usize) -> usize {
    d.iter().fold(0, |acc, &x| acc * n + x)
}

struct Antisymmetrizer {
    n: usize,
    p: usize,
    perms: Vec<(Vec<usize>, f64)>,
}

impl Antisymmetrizer {
    fn new(n: usize, p: usize) -> Self {
        Self {
            n,
            p,
            perms: permutations(p),
        }
    }

    fn factorial(&self) -> f64 {
        self.perms.len() as f64
    }

    /// `(Aψ)(x₁…x_p) = (1/p!) Σ_π sgn(π) ψ(x_{π(1)}…x_{π(p)})`.
    fn apply(&self, psi: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = DVector::zeros(psi.len());
        let mut permuted = vec![0; self.p];
        for idx in 0..psi.len() {
            let d = digits(idx, self.n, self.p);
            let mut acc = Complex64::new(0.0, 0.0);
            for (perm, sign) in &self.perms {
                for (slot, &src) in perm.iter().enumerate() {
                    permuted[slot] = d[src];
                }
                acc += psi[flat(&permuted, self.n)] * *sign;
            }
            out[idx] = acc / self.factorial();
        }
        out
    }

    /// Image of a Slater label under the isometry into the product space.
    fn embed(&self, orbitals: &[usize], dim: usize) -> DVector<Complex64> {
        let mut e = DVector::zeros(dim);
        e[flat(orbitals, self.n)] = Complex64::new(1.0, 0.0);
        self.apply(&e) * Complex64::new(self.factorial().sqrt(), 0.0)
    }
}

/// `A^N (b ⊗ I^{⊗(N-2)}) A^N` built literally on the product space and read
/// back in the Slater basis of `∧^N`.
pub fn antisymmetrizer_oracle(b: &HermitianOperator, particles: usize) -> Result<HermitianOperator> {
    if b.p() != 2 {
        return domain("antisymmetrizer oracle expects a 2-particle operator");
    }
    let n = b.n();
    if particles < 2 || particles > n {
        return domain(format!("N = {particles} outside 2..={n}"));
    }
    let dim = tensor_dim(n, particles)?;
    let pair_basis = b.basis();
    let pair_anti = Antisymmetrizer::new(n, 2);
    // b as an n²×n² matrix on H¹⊗H¹
    let pair_vectors: Vec<DVector<Complex64>> = pair_basis
        .labels()
        .iter()
        .map(|l| pair_anti.embed(l.orbitals(), n * n))
        .collect();
    let mut b_tensor = DMatrix::<Complex64>::zeros(n * n, n * n);
    for (i, vi) in pair_vectors.iter().enumerate() {
        for (j, vj) in pair_vectors.iter().enumerate() {
            let bij = b.matrix()[(i, j)];
            if bij != Complex64::new(0.0, 0.0) {
                b_tensor += vi * vj.adjoint() * bij;
            }
        }
    }

    let anti = Antisymmetrizer::new(n, particles);
    let big = Arc::new(enumerate_basis(n, particles)?);
    let embedded: Vec<DVector<Complex64>> = big
        .labels()
        .iter()
        .map(|l| anti.embed(l.orbitals(), dim))
        .collect();
    let rest = dim / (n * n);
    let mut out = DMatrix::zeros(big.len(), big.len());
    for (l, vl) in embedded.iter().enumerate() {
        // (b ⊗ I) acts on the first two slots
        let mut y = DVector::zeros(dim);
        for pair_out in 0..n * n {
            for pair_in in 0..n * n {
                let w = b_tensor[(pair_out, pair_in)];
                if w == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for r in 0..rest {
                    y[pair_out * rest + r] += w * vl[pair_in * rest + r];
                }
            }
        }
        let z = anti.apply(&y);
        for (k, vk) in embedded.iter().enumerate() {
            out[(k, l)] = vk.dotc(&z);
        }
    }
    HermitianOperator::new(big, out)
}

/// Partial trace over the last `p - q` tensor slots, read back on `∧^q`.
pub fn tensor_contract_oracle(h: &HermitianOperator, q: usize) -> Result<HermitianOperator> {
    let (n, p) = (h.n(), h.p());
    if q >= p {
        return domain("oracle contraction requires q < p");
    }
    let dim = tensor_dim(n, p)?;
    let small_dim = tensor_dim(n, q)?;
    let rest = dim / small_dim;
    let anti = Antisymmetrizer::new(n, p);
    let big: &SlaterBasis = h.basis();
    let v = DMatrix::from_columns(
        &big.labels()
            .iter()
            .map(|l| anti.embed(l.orbitals(), dim))
            .collect::<Vec<_>>(),
    );
    // ρ = V h V†, ρ_q[a,b] = Σ_r ρ[(a,r),(b,r)]
    let x = &v * h.matrix();
    let mut reduced = DMatrix::<Complex64>::zeros(small_dim, small_dim);
    for a in 0..small_dim {
        for b in 0..small_dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..rest {
                let row_a = x.row(a * rest + r);
                let row_b = v.row(b * rest + r);
                acc += row_a
                    .iter()
                    .zip(row_b.iter())
                    .map(|(s, t)| s * t.conj())
                    .sum::<Complex64>();
            }
            reduced[(a, b)] = acc;
        }
    }
    let small = Arc::new(enumerate_basis(n, q)?);
    let small_anti = Antisymmetrizer::new(n, q);
    let w = DMatrix::from_columns(
        &small
            .labels()
            .iter()
            .map(|l| small_anti.embed(l.orbitals(), small_dim))
            .collect::<Vec<_>>(),
    );
    HermitianOperator::new(small, w.adjoint() * reduced * w)
}
