//! Slater determinant bases of `∧^p H¹`.
//!
//! Labels are strictly increasing tuples of 0-based orbital indices. The
//! canonical order of a basis is lexicographic; every matrix in the crate is
//! expressed in that order. A 1-based pair written `|2i-1, 2i⟩` is the
//! label `(2i-2, 2i-1)` here.

use std::fmt;

use crate::error::domain;
use crate::{binomial, Result};

/// A strictly increasing tuple of orbital indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlaterLabel(Vec<usize>);

impl SlaterLabel {
    pub fn new(orbitals: Vec<usize>) -> Result<Self> {
        if orbitals.windows(2).any(|w| w[0] >= w[1]) {
            return domain(format!("label {orbitals:?} is not strictly increasing"));
        }
        Ok(Self(orbitals))
    }

    pub fn orbitals(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, orbital: usize) -> bool {
        self.0.binary_search(&orbital).is_ok()
    }
}

impl fmt::Display for SlaterLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, o) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{o}")?;
        }
        write!(f, "⟩")
    }
}

/// Result of sorting an extra orbital into a label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insertion {
    /// The orbital was free; `sign` is the parity of the sorting permutation
    /// of `(label..., m)`.
    Merged {
        sign: i8,
        label: SlaterLabel,
    },
    Occupied,
}

/// Sort orbital `m` into `label`, tracking the fermionic sign.
///
/// Moving `m` from the last slot to its sorted position passes every orbital
/// of `label` larger than `m`, one transposition each.
pub fn insert_orbital(label: &SlaterLabel, m: usize) -> Insertion {
    match label.0.binary_search(&m) {
        Ok(_) => Insertion::Occupied,
        Err(pos) => {
            let passed = label.0.len() - pos;
            let mut merged = Vec::with_capacity(label.0.len() + 1);
            merged.extend_from_slice(&label.0[..pos]);
            merged.push(m);
            merged.extend_from_slice(&label.0[pos..]);
            Insertion::Merged {
                sign: if passed.is_multiple_of(2) { 1 } else { -1 },
                label: SlaterLabel(merged),
            }
        }
    }
}

/// Parity of the permutation sorting the concatenation `(front, back)` of two
/// disjoint increasing tuples: `(-1)^{#{(f, b) : f > b}}`.
pub(crate) fn concat_sign(front: &[usize], back: &[usize]) -> f64 {
    let mut inversions = 0usize;
    let mut j = 0;
    for &f in front {
        while j < back.len() && back[j] < f {
            j += 1;
        }
        inversions += j;
    }
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// All `C(n, p)` labels of `∧^p` over `n` orbitals in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlaterBasis {
    n: usize,
    p: usize,
    labels: Vec<SlaterLabel>,
}

impl SlaterBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[SlaterLabel] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &SlaterLabel {
        &self.labels[index]
    }

    /// Lexicographic rank of `label`, computed in `O(p)` through the
    /// combinatorial number system.
    pub fn rank_of(&self, label: &SlaterLabel) -> Result<usize> {
        self.rank_of_orbitals(label.orbitals())
    }

    pub fn rank_of_orbitals(&self, orbitals: &[usize]) -> Result<usize> {
        if orbitals.len() != self.p {
            return domain(format!(
                "label of length {} in a {}-particle basis",
                orbitals.len(),
                self.p
            ));
        }
        if orbitals.windows(2).any(|w| w[0] >= w[1]) {
            return domain(format!("label {orbitals:?} is not strictly increasing"));
        }
        if orbitals.last().is_some_and(|&o| o >= self.n) {
            return domain(format!("label {orbitals:?} exceeds n = {}", self.n));
        }
        Ok(self.rank_unchecked(orbitals))
    }

    /// Rank of the complement-counted tuple: the number of labels after
    /// `orbitals` is `Σ_i C(n-1-c_i, p-i)`.
    pub(crate) fn rank_unchecked(&self, orbitals: &[usize]) -> usize {
        let after: usize = orbitals
            .iter()
            .enumerate()
            .map(|(i, &c)| binomial(self.n - 1 - c, self.p - i))
            .sum();
        self.labels.len() - 1 - after
    }

    pub fn unrank(&self, index: usize) -> Result<&SlaterLabel> {
        self.labels
            .get(index)
            .ok_or_else(|| crate::Error::Domain(format!("rank {index} out of range 0..{}", self.len())))
    }
}

/// Enumerate the `p`-particle Slater basis over `n` orbitals.
pub fn enumerate_basis(n: usize, p: usize) -> Result<SlaterBasis> {
    if p > n {
        return domain(format!("p = {p} exceeds n = {n}"));
    }
    let mut labels = Vec::with_capacity(binomial(n, p));
    let mut current: Vec<usize> = (0..p).collect();
    loop {
        labels.push(SlaterLabel(current.clone()));
        // advance to the lexicographic successor
        let mut i = p;
        loop {
            if i == 0 {
                return Ok(SlaterBasis { n, p, labels });
            }
            i -= 1;
            if current[i] < n - p + i {
                current[i] += 1;
                for j in i + 1..p {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// All `q`-subsets of `label`, each paired with the remainder.
pub(crate) fn splits(label: &[usize], q: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let p = label.len();
    let mut out = Vec::with_capacity(binomial(p, q));
    for mask in 0u32..(1u32 << p) {
        if mask.count_ones() as usize != q {
            continue;
        }
        let mut chosen = Vec::with_capacity(q);
        let mut rest = Vec::with_capacity(p - q);
        for (bit, &o) in label.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                chosen.push(o);
            } else {
                rest.push(o);
            }
        }
        out.push((chosen, rest));
    }
    out
}

/// Merge two disjoint increasing tuples into one increasing tuple.
pub(crate) fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
