//! Linear algebra over `F_p` and the basis-plus-disjoint-supports
//! decomposition of extremal sequences over `C_p^r` with full weights.

use crate::error::{Error, Result};
use crate::group::{ElementIndex, FiniteAbelianGroup};
use crate::sequence::Sequence;

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Row-reduces `rows` in place over `F_p` and returns the pivot columns.
fn row_reduce(rows: &mut [Vec<u64>], p: u64) -> Vec<usize> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(sel) = (r..rows.len()).find(|&i| !rows[i][c].is_multiple_of(p)) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = inv_mod(rows[r][c], p);
        for v in rows[r].iter_mut() {
            *v = *v * inv % p;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + p * p - f * y) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// Rank over `F_p` of the given vectors.
pub fn fp_rank(vectors: &[Vec<u64>], p: u64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let mut rows: Vec<Vec<u64>> = vectors.iter().map(|v| v.iter().map(|x| x % p).collect()).collect();
    row_reduce(&mut rows, p).len()
}

/// Solves `Σ c_i · basis[i] = target` over `F_p`.
///
/// Returns the unique coefficient vector when the basis vectors are linearly
/// independent and the target lies in their span, `None` otherwise.
pub fn fp_solve(basis: &[Vec<u64>], target: &[u64], p: u64) -> Option<Vec<u64>> {
    let n = basis.len();
    let dim = target.len();
    if basis.iter().any(|b| b.len() != dim) {
        return None;
    }
    // Augmented system: one row per coordinate, one column per basis vector.
    let mut rows: Vec<Vec<u64>> = (0..dim)
        .map(|k| {
            let mut row: Vec<u64> = basis.iter().map(|b| b[k] % p).collect();
            row.push(target[k] % p);
            row
        })
        .collect();
    let pivots = row_reduce(&mut rows, p);
    if pivots.contains(&n) || pivots.len() != n {
        return None;
    }
    let mut coeffs = vec![0u64; n];
    for (r, &c) in pivots.iter().enumerate() {
        coeffs[c] = rows[r][n];
    }
    Some(coeffs)
}

/// One non-basis term `h = Σ_{i∈support} a_i g_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtraTerm {
    pub element: ElementIndex,
    /// Position of the term in the input sequence.
    pub position: usize,
    /// Indices into the basis (0-based) with nonzero coefficient.
    pub support: Vec<usize>,
    /// Coefficients on `support`, each in `[1, p-1]`.
    pub coefficients: Vec<u64>,
}

/// `S = Π g_i · Π h_j` with `{g_i}` a basis and the supports of the `h_j`
/// pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureDecomposition {
    pub basis: Vec<ElementIndex>,
    pub basis_positions: Vec<usize>,
    pub extras: Vec<ExtraTerm>,
}

impl StructureDecomposition {
    pub fn supports_disjoint(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.extras.iter().flat_map(|e| &e.support).all(|i| seen.insert(*i))
    }
}

/// Next `r`-combination of `[0, n)` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let r = c.len();
    for i in (0..r).rev() {
        if c[i] < n - r + i {
            c[i] += 1;
            for j in i + 1..r {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Searches `r`-subsets of the terms of `S` (in lexicographic position order)
/// for a basis of `C_p^r` in which every other term has a support disjoint
/// from the others. Returns the first such decomposition.
pub fn decompose_theorem11(group: &FiniteAbelianGroup, s: &Sequence) -> Result<Option<StructureDecomposition>> {
    let p = group
        .elementary_prime()
        .ok_or_else(|| Error::Precondition(format!("{group} is not elementary abelian")))?;
    let r = group.rank();
    if s.contains(ElementIndex::ZERO) {
        return Err(Error::Precondition("sequence contains 0".into()));
    }
    let vectors: Vec<Vec<u64>> = s
        .terms()
        .iter()
        .map(|&t| group.deindex(t).map(|e| e.coords().to_vec()))
        .collect::<Result<_>>()?;
    let m = vectors.len();
    if m < r {
        return Ok(None);
    }
    let mut combo: Vec<usize> = (0..r).collect();
    loop {
        let basis: Vec<Vec<u64>> = combo.iter().map(|&i| vectors[i].clone()).collect();
        if fp_rank(&basis, p) == r {
            if let Some(found) = try_basis(s, &vectors, &combo, &basis, p) {
                return Ok(Some(found));
            }
        }
        if !next_combination(&mut combo, m) {
            return Ok(None);
        }
    }
}

fn try_basis(
    s: &Sequence,
    vectors: &[Vec<u64>],
    combo: &[usize],
    basis: &[Vec<u64>],
    p: u64,
) -> Option<StructureDecomposition> {
    let mut used = vec![false; basis.len()];
    let mut extras = Vec::new();
    for (pos, v) in vectors.iter().enumerate() {
        if combo.contains(&pos) {
            continue;
        }
        let coeffs = fp_solve(basis, v, p)?;
        let support: Vec<usize> = (0..coeffs.len()).filter(|&i| coeffs[i] != 0).collect();
        for &i in &support {
            if used[i] {
                return None;
            }
            used[i] = true;
        }
        extras.push(ExtraTerm {
            element: s.terms()[pos],
            position: pos,
            coefficients: support.iter().map(|&i| coeffs[i]).collect(),
            support,
        });
    }
    Some(StructureDecomposition {
        basis: combo.iter().map(|&i| s.terms()[i]).collect(),
        basis_positions: combo.to_vec(),
        extras,
    })
}

/// Builds `Π g_i · Π h_j` from a basis and, per extra term, its
/// `(basis index, coefficient)` pairs.
pub fn theorem11_form(
    group: &FiniteAbelianGroup,
    basis: &[ElementIndex],
    extras: &[Vec<(usize, u64)>],
) -> Result<Sequence> {
    let mut terms = basis.to_vec();
    for extra in extras {
        let mut h = group.zero();
        for &(i, a) in extra {
            let g = group.deindex(basis[i])?;
            h = group.add(&h, &group.scalar_mul(a as i64, &g));
        }
        terms.push(group.index(&h)?);
    }
    Ok(Sequence::from_indices(terms))
}
