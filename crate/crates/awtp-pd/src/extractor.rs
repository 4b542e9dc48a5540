//! Deterministic extraction of uniform field elements from symbol-fixing
//! sources, built on polynomial interpolation.
//!
//! The input `x ∈ F_q^n` is interpreted as evaluations of a polynomial `f`
//! of degree at most `n − 1` at the abscissae `0, …, n−1`; the output is
//! `(f(n), …, f(n+m−1))`. When the input is a symbol-fixing source — some
//! coordinates uniform and independent, the rest constant — the output is
//! exactly uniform on `F_q^m` for any `m` up to the number of free
//! coordinates, provided `q ≥ n + m`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::field::{FieldElement, PrimeModulus};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtractorError {
    /// Interpolation needs pairwise distinct abscissae.
    #[error("repeated abscissa {0}")]
    RepeatedAbscissa(u64),
    /// The evaluation points `n, …, n+m−1` must stay inside the field and
    /// clear of the input points, which needs `q ≥ n + m`.
    #[error("modulus {q} too small for input length {n} and output length {m} (need q >= n+m)")]
    ModulusTooSmall { q: u64, n: usize, m: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("modulus mismatch inside extractor input")]
    MixedModuli,
    /// Free and fixed positions must partition the source coordinates.
    #[error("free and fixed positions do not partition 0..{0}")]
    BadPartition(usize),
    /// A uniformity sweep found a non-uniform output distribution.
    #[error("extraction output not uniform for n={n}, m={m}")]
    NotUniform { n: usize, m: usize },
}

/// Validated `(n, m, q)` tuple for one extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractorParams {
    n: usize,
    m: usize,
    q: PrimeModulus,
}

impl ExtractorParams {
    pub fn new(n: usize, m: usize, q: PrimeModulus) -> Result<ExtractorParams, ExtractorError> {
        if n == 0 {
            return Err(ExtractorError::EmptyInput);
        }
        if (n + m) as u64 > q.get() {
            return Err(ExtractorError::ModulusTooSmall { q: q.get(), n, m });
        }
        Ok(ExtractorParams { n, m, q })
    }

    pub fn input_len(self) -> usize {
        self.n
    }

    pub fn output_len(self) -> usize {
        self.m
    }
}

/// Coefficients (constant term first) of the unique polynomial of degree
/// `< points.len()` through the given points, by Lagrange interpolation in
/// `O(n²)`.
pub fn interpolate(
    points: &[(FieldElement, FieldElement)],
) -> Result<Vec<FieldElement>, ExtractorError> {
    let (first, _) = points.first().ok_or(ExtractorError::EmptyInput)?;
    let q = first.modulus();
    if points.iter().any(|(x, y)| x.modulus() != q || y.modulus() != q) {
        return Err(ExtractorError::MixedModuli);
    }
    let mut seen = BTreeSet::new();
    for (x, _) in points {
        if !seen.insert(x.value()) {
            return Err(ExtractorError::RepeatedAbscissa(x.value()));
        }
    }

    let n = points.len();
    // master(X) = Π (X − x_i), degree n, computed once
    let mut master = vec![q.zero(); n + 1];
    master[0] = q.one();
    let mut degree = 0usize;
    for (x, _) in points {
        master[degree + 1] = master[degree];
        for k in (1..=degree).rev() {
            master[k] = master[k - 1] - master[k] * *x;
        }
        master[0] = -(master[0] * *x);
        degree += 1;
    }

    let mut coeffs = vec![q.zero(); n];
    let mut basis = vec![q.zero(); n];
    for (x_j, y_j) in points {
        // basis = master / (X − x_j) by synthetic division
        let mut carry = master[n];
        for k in (0..n).rev() {
            basis[k] = carry;
            carry = master[k] + carry * *x_j;
        }
        let denom = evaluate(&basis, *x_j);
        let scale = *y_j * denom.inv().expect("distinct abscissae give nonzero denominator");
        for k in 0..n {
            coeffs[k] = coeffs[k] + basis[k] * scale;
        }
    }
    Ok(coeffs)
}

/// Horner evaluation of a coefficient vector (constant term first).
pub fn evaluate(coeffs: &[FieldElement], x: FieldElement) -> FieldElement {
    let mut acc = x.modulus().zero();
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Extracts `m` elements from `x`: interpolate on abscissae `0..n−1`, then
/// evaluate at `n, …, n+m−1`.
pub fn extract(x: &[FieldElement], m: usize) -> Result<Vec<FieldElement>, ExtractorError> {
    let first = x.first().ok_or(ExtractorError::EmptyInput)?;
    let q = first.modulus();
    let params = ExtractorParams::new(x.len(), m, q)?;
    let points: Vec<(FieldElement, FieldElement)> = x
        .iter()
        .enumerate()
        .map(|(i, &xi)| (q.element(i as u64), xi))
        .collect();
    let coeffs = interpolate(&points)?;
    Ok((0..params.m)
        .map(|j| evaluate(&coeffs, q.element((params.n + j) as u64)))
        .collect())
}

/// An `(n, m)` symbol-fixing source: `m = |free positions|` coordinates are
/// uniform and independent, the rest are pinned to fixed values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolFixingSource {
    len: usize,
    free: BTreeSet<usize>,
    fixed: BTreeMap<usize, FieldElement>,
}

impl SymbolFixingSource {
    pub fn new(
        len: usize,
        free: BTreeSet<usize>,
        fixed: BTreeMap<usize, FieldElement>,
    ) -> Result<SymbolFixingSource, ExtractorError> {
        let disjoint = free.iter().all(|p| !fixed.contains_key(p));
        let covers = free.len() + fixed.len() == len
            && free.iter().chain(fixed.keys()).all(|&p| p < len);
        if !disjoint || !covers {
            return Err(ExtractorError::BadPartition(len));
        }
        Ok(SymbolFixingSource { len, free, fixed })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of uniformly random coordinates; the source min-entropy is
    /// this count times `log₂ q`.
    pub fn free_len(&self) -> usize {
        self.free.len()
    }

    pub fn free_positions(&self) -> &BTreeSet<usize> {
        &self.free
    }

    /// All `q^{free}` realizations of the source, free coordinates counted
    /// up lexicographically by ascending position.
    pub fn realizations(&self, q: PrimeModulus) -> Vec<Vec<FieldElement>> {
        let free: Vec<usize> = self.free.iter().copied().collect();
        let total = (q.get() as usize).pow(free.len() as u32);
        let mut out = Vec::with_capacity(total);
        let mut counters = vec![0u64; free.len()];
        loop {
            let mut v = vec![q.zero(); self.len];
            for (&pos, &val) in &self.fixed {
                v[pos] = val;
            }
            for (slot, &pos) in free.iter().enumerate() {
                v[pos] = q.element(counters[slot]);
            }
            out.push(v);
            let mut i = free.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                counters[i] += 1;
                if counters[i] < q.get() {
                    break;
                }
                counters[i] = 0;
            }
        }
    }
}

/// Exhaustively verifies zero-error extraction at one modulus: for every
/// input length up to `max_n`, every symbol-fixing pattern, every fixed
/// assignment and every feasible output length, each output vector in
/// `F_q^m` is hit by exactly `q^{free−m}` realizations. Returns the number
/// of (pattern, assignment, m) cases verified.
pub fn uniformity_sweep(q: PrimeModulus, max_n: usize) -> Result<u64, ExtractorError> {
    let mut cases = 0u64;
    for n in 1..=max_n {
        for mask in 1u32..(1 << n) {
            let free: BTreeSet<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let fixed_positions: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
            for fixed_vals in crate::hash::enumerate_vectors(q, fixed_positions.len()) {
                let fixed: BTreeMap<usize, FieldElement> = fixed_positions
                    .iter()
                    .copied()
                    .zip(fixed_vals.iter().copied())
                    .collect();
                let source = SymbolFixingSource::new(n, free.clone(), fixed)?;
                for m in 1..=source.free_len() {
                    if ExtractorParams::new(n, m, q).is_err() {
                        continue;
                    }
                    check_uniform(q, &source, m)?;
                    cases += 1;
                }
            }
        }
    }
    Ok(cases)
}

fn check_uniform(
    q: PrimeModulus,
    source: &SymbolFixingSource,
    m: usize,
) -> Result<(), ExtractorError> {
    let mut counts: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    for x in source.realizations(q) {
        let out = extract(&x, m)?;
        *counts
            .entry(out.iter().map(|e| e.value()).collect())
            .or_insert(0) += 1;
    }
    let expected_support = (q.get() as usize).pow(m as u32);
    let expected_multiplicity = q.get().pow((source.free_len() - m) as u32);
    let uniform = counts.len() == expected_support
        && counts.values().all(|&c| c == expected_multiplicity);
    if uniform {
        Ok(())
    } else {
        Err(ExtractorError::NotUniform {
            n: source.len(),
            m,
        })
    }
}
