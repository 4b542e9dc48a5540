//! Polynomial-evaluation hash family over `F_q`.
//!
//! For a key `α` and an input `x = (x_1, …, x_w)` the hash value is
//! `x_1·α + x_2·α² + … + x_w·α^w mod q` — note there is no constant term.
//! For any two distinct inputs of length `w` and any target difference `t`,
//! at most `w` of the `q` keys satisfy `hash_α(x_1) − hash_α(x_2) = t`, so
//! keyed verification of a `w`-element payload forges with probability at
//! most `w/q` plus whatever a masking term adds.

use thiserror::Error;

use crate::field::{FieldElement, PrimeModulus};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HashError {
    /// Inputs must have between 1 and `q − 1` elements.
    #[error("input length {len} outside 1..={max} for modulus {q}")]
    LengthViolation { len: usize, max: u64, q: u64 },
    /// All elements of one input must share a modulus.
    #[error("modulus mismatch inside hash input")]
    MixedModuli,
    /// Collision counting needs two distinct inputs of equal length.
    #[error("collision count requires two distinct inputs of equal length")]
    DegenerateInputPair,
}

/// A hash key `α ∈ F_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashKey {
    alpha: FieldElement,
}

impl HashKey {
    pub fn new(alpha: FieldElement) -> HashKey {
        HashKey { alpha }
    }

    pub fn alpha(self) -> FieldElement {
        self.alpha
    }
}

/// A validated hash input: `1 ≤ len ≤ q − 1` elements sharing one modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashInput {
    elements: Vec<FieldElement>,
}

impl HashInput {
    pub fn new(elements: Vec<FieldElement>) -> Result<HashInput, HashError> {
        let first = elements.first().ok_or(HashError::LengthViolation {
            len: 0,
            max: 0,
            q: 0,
        })?;
        let q = first.modulus();
        if elements.iter().any(|e| e.modulus() != q) {
            return Err(HashError::MixedModuli);
        }
        let max = q.get() - 1;
        if elements.len() as u64 > max {
            return Err(HashError::LengthViolation {
                len: elements.len(),
                max,
                q: q.get(),
            });
        }
        Ok(HashInput { elements })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least one element
    }

    pub fn elements(&self) -> &[FieldElement] {
        &self.elements
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.elements[0].modulus()
    }
}

/// Evaluates `hash_α(x) = Σ_i x_i·α^i` with the index starting at 1.
///
/// Horner form with `α` factored out once:
/// `α·(x_1 + α·(x_2 + … + α·x_w))`, so `w` multiplications plus one.
pub fn hash(key: HashKey, input: &HashInput) -> FieldElement {
    let alpha = key.alpha;
    let mut acc = alpha.modulus().zero();
    for &x in input.elements.iter().rev() {
        acc = acc * alpha + x;
    }
    acc * alpha
}

/// Counts the keys `α ∈ F_q` with `hash_α(x1) − hash_α(x2) = t`.
///
/// The count never exceeds the input length: the difference is a nonzero
/// polynomial in `α` of that degree.
pub fn collision_count(
    x1: &HashInput,
    x2: &HashInput,
    t: FieldElement,
) -> Result<usize, HashError> {
    if x1 == x2 || x1.len() != x2.len() {
        return Err(HashError::DegenerateInputPair);
    }
    let q = x1.modulus();
    let count = q
        .elements()
        .filter(|&alpha| {
            let key = HashKey::new(alpha);
            hash(key, x1) - hash(key, x2) == t
        })
        .count();
    Ok(count)
}

/// Exhaustive Δ-universality sweep at one modulus and input length: the
/// maximum collision count over all distinct input pairs and all targets,
/// plus whether the maximum equals the input length somewhere.
///
/// One key sweep per pair buckets the hash differences by value, which
/// covers every target at once.
pub fn max_collision_count(q: PrimeModulus, len: usize) -> (usize, bool) {
    let inputs: Vec<Vec<FieldElement>> = enumerate_vectors(q, len);
    let mut max = 0usize;
    let mut saturated = false;
    let mut buckets = vec![0usize; q.get() as usize];
    for (i, a) in inputs.iter().enumerate() {
        let x1 = HashInput::new(a.clone()).expect("valid input");
        for b in inputs.iter().skip(i + 1) {
            let x2 = HashInput::new(b.clone()).expect("valid input");
            buckets.fill(0);
            for alpha in q.elements() {
                let key = HashKey::new(alpha);
                buckets[(hash(key, &x1) - hash(key, &x2)).value() as usize] += 1;
            }
            for &count in &buckets {
                max = max.max(count);
                if count == len {
                    saturated = true;
                }
            }
        }
    }
    (max, saturated)
}

/// All `q^len` vectors over `F_q` in lexicographic order.
pub(crate) fn enumerate_vectors(q: PrimeModulus, len: usize) -> Vec<Vec<FieldElement>> {
    let mut out = Vec::with_capacity((q.get() as usize).pow(len as u32));
    let mut current = vec![0u64; len];
    loop {
        out.push(current.iter().map(|&v| q.element(v)).collect());
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            current[i] += 1;
            if current[i] < q.get() {
                break;
            }
            current[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: naive power summation, no Horner.
    fn hash_oracle(alpha: FieldElement, xs: &[FieldElement]) -> FieldElement {
        let mut acc = alpha.modulus().zero();
        for (i, &x) in xs.iter().enumerate() {
            acc = acc + x * alpha.pow(i as u64 + 1);
        }
        acc
    }

    fn input(q: PrimeModulus, vals: &[u64]) -> HashInput {
        HashInput::new(vals.iter().map(|&v| q.element(v)).collect()).unwrap()
    }

    #[test]
    fn hash_matches_power_sum_oracle() {
        let q7 = PrimeModulus::new(7).unwrap();
        let x = input(q7, &[3, 5]);
        let key = HashKey::new(q7.element(2));
        // 3·2 + 5·4 = 26 ≡ 5 (mod 7)
        assert_eq!(hash(key, &x).value(), 5);
        assert_eq!(hash(key, &x), hash_oracle(key.alpha(), x.elements()));

        let q5 = PrimeModulus::new(5).unwrap();
        let x = input(q5, &[2, 3]);
        let key = HashKey::new(q5.element(1));
        assert_eq!(hash(key, &x).value(), 0);
        assert_eq!(hash(key, &x), hash_oracle(key.alpha(), x.elements()));
    }

    #[test]
    fn zero_key_maps_everything_to_zero() {
        let q7 = PrimeModulus::new(7).unwrap();
        let key = HashKey::new(q7.zero());
        for vals in [[0u64, 0], [1, 2], [6, 6], [3, 0]] {
            assert!(hash(key, &input(q7, &vals)).is_zero());
        }
    }

    #[test]
    fn hash_agrees_with_oracle_everywhere_small() {
        for qv in [5u64, 7, 11] {
            let q = PrimeModulus::new(qv).unwrap();
            for len in 1..=3usize {
                for xs in enumerate_vectors(q, len) {
                    let inp = HashInput::new(xs.clone()).unwrap();
                    for alpha in q.elements() {
                        assert_eq!(
                            hash(HashKey::new(alpha), &inp),
                            hash_oracle(alpha, &xs),
                            "q={qv} len={len}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn collision_count_examples() {
        let q5 = PrimeModulus::new(5).unwrap();
        // Difference polynomial α has the single root 0.
        assert_eq!(
            collision_count(&input(q5, &[1, 0]), &input(q5, &[0, 0]), q5.zero()).unwrap(),
            1
        );
        // α² = 0 only at α = 0.
        assert_eq!(
            collision_count(&input(q5, &[0, 1]), &input(q5, &[0, 0]), q5.zero()).unwrap(),
            1
        );
        let q7 = PrimeModulus::new(7).unwrap();
        // α + α² ≡ 0 at α ∈ {0, 6}.
        assert_eq!(
            collision_count(&input(q7, &[1, 1]), &input(q7, &[0, 0]), q7.zero()).unwrap(),
            2
        );
    }

    #[test]
    fn collision_count_rejects_equal_inputs() {
        let q5 = PrimeModulus::new(5).unwrap();
        let x = input(q5, &[1, 2]);
        assert_eq!(
            collision_count(&x, &x.clone(), q5.zero()),
            Err(HashError::DegenerateInputPair)
        );
    }

    #[test]
    fn input_length_capped_at_q_minus_one() {
        let q5 = PrimeModulus::new(5).unwrap();
        let long: Vec<_> = (0..5).map(|v| q5.element(v)).collect();
        assert!(matches!(
            HashInput::new(long),
            Err(HashError::LengthViolation { len: 5, max: 4, .. })
        ));
        assert!(HashInput::new(vec![]).is_err());
    }

    #[test]
    fn linearity_in_the_input() {
        let q11 = PrimeModulus::new(11).unwrap();
        for alpha in q11.elements() {
            let key = HashKey::new(alpha);
            for a in 0..11u64 {
                for b in 0..11u64 {
                    let x = input(q11, &[a, b]);
                    let y = input(q11, &[b, a]);
                    let sum = input(q11, &[(a + b) % 11, (a + b) % 11]);
                    assert_eq!(hash(key, &sum), hash(key, &x) + hash(key, &y));
                }
            }
        }
    }

    #[test]
    fn delta_universality_sweep_small() {
        let q5 = PrimeModulus::new(5).unwrap();
        let (max, saturated) = max_collision_count(q5, 2);
        assert_eq!(max, 2);
        assert!(saturated);
        let (max, _) = max_collision_count(q5, 1);
        assert!(max <= 1);
    }
}
