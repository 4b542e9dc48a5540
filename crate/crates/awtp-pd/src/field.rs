//! Exact arithmetic in the prime field `F_q` and selection of the protocol
//! prime.
//!
//! Every value is kept as its least non-negative residue so that transcripts
//! serialize and hash identically across runs. Multiplication goes through a
//! 128-bit intermediate; the protocol constraint `q > 2uN²` keeps all
//! desk-scale moduli far below `2^63`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Errors from field construction and arithmetic.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    /// The requested modulus is not a prime number.
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    /// Two elements from different fields were combined.
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    /// Zero has no multiplicative inverse.
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
}

/// A verified prime modulus `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    /// Creates a modulus, verifying primality.
    pub fn new(q: u64) -> Result<Self, FieldError> {
        if is_prime(q) {
            Ok(PrimeModulus(q))
        } else {
            Err(FieldError::NotPrime(q))
        }
    }

    /// Returns the smallest prime strictly greater than `2·u·n²`, the
    /// threshold the transmission protocol requires of its modulus.
    ///
    /// Always picking the smallest such prime keeps runs reproducible.
    pub fn select(u: u64, n: u64) -> PrimeModulus {
        let threshold = 2 * u * n * n;
        let mut candidate = threshold + 1;
        while !is_prime(candidate) {
            candidate += 1;
        }
        PrimeModulus(candidate)
    }

    /// The numeric value of `q`.
    pub fn get(self) -> u64 {
        self.0
    }

    /// Reduces `value` into the field.
    pub fn element(self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.0,
            modulus: self,
        }
    }

    /// The additive identity.
    pub fn zero(self) -> FieldElement {
        self.element(0)
    }

    /// The multiplicative identity.
    pub fn one(self) -> FieldElement {
        self.element(1)
    }

    /// Iterates over all `q` field elements in ascending value order.
    pub fn elements(self) -> impl Iterator<Item = FieldElement> {
        (0..self.0).map(move |v| FieldElement {
            value: v,
            modulus: self,
        })
    }

    /// Number of bits needed to store one element: `⌈log₂ q⌉`.
    pub fn bit_width(self) -> usize {
        (64 - (self.0 - 1).leading_zeros()).max(1) as usize
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of `F_q`, stored as its least non-negative residue together
/// with its modulus. Combining elements of different fields panics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: PrimeModulus,
}

impl FieldElement {
    /// The canonical representative in `[0, q)`.
    pub fn value(self) -> u64 {
        self.value
    }

    /// The modulus this element lives under.
    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(self) -> Result<FieldElement, FieldError> {
        if self.value == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(self.modulus.0 - 2))
    }

    /// Raises the element to the power `e` by square-and-multiply.
    pub fn pow(self, mut e: u64) -> FieldElement {
        let mut base = self;
        let mut acc = self.modulus.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    fn require_same_modulus(self, rhs: FieldElement) {
        assert_eq!(
            self.modulus, rhs.modulus,
            "{}",
            FieldError::ModulusMismatch(self.modulus.0, rhs.modulus.0)
        );
    }
}

impl Add for FieldElement {
    type Output = FieldElement;

    fn add(self, rhs: FieldElement) -> FieldElement {
        self.require_same_modulus(rhs);
        let q = self.modulus.0;
        let mut v = self.value + rhs.value;
        if v >= q {
            v -= q;
        }
        FieldElement {
            value: v,
            modulus: self.modulus,
        }
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;

    fn sub(self, rhs: FieldElement) -> FieldElement {
        self.require_same_modulus(rhs);
        let q = self.modulus.0;
        let v = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            q - (rhs.value - self.value)
        };
        FieldElement {
            value: v,
            modulus: self.modulus,
        }
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;

    fn mul(self, rhs: FieldElement) -> FieldElement {
        self.require_same_modulus(rhs);
        let v = (self.value as u128 * rhs.value as u128) % self.modulus.0 as u128;
        FieldElement {
            value: v as u64,
            modulus: self.modulus,
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;

    fn neg(self) -> FieldElement {
        if self.value == 0 {
            self
        } else {
            FieldElement {
                value: self.modulus.0 - self.value,
                modulus: self.modulus,
            }
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Deterministic primality test: trial division below `2^32`, otherwise
/// Miller–Rabin with a witness set that is exact for all 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    if n < (1 << 32) {
        let mut d = 17u64;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 2;
        }
        return true;
    }
    miller_rabin(n)
}

fn miller_rabin(n: u64) -> bool {
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // Deterministic for all n < 2^64 (Sinclair's witness set).
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_prime_naive(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn add_wraps_around() {
        let q7 = PrimeModulus::new(7).unwrap();
        assert_eq!((q7.element(3) + q7.element(5)).value(), 1);
        let q67 = PrimeModulus::new(67).unwrap();
        assert_eq!((q67.element(66) + q67.element(1)).value(), 0);
    }

    #[test]
    fn zero_absorbs_multiplication() {
        let q7 = PrimeModulus::new(7).unwrap();
        for x in q7.elements() {
            assert!((q7.zero() * x).is_zero());
        }
    }

    #[test]
    fn inverse_matches_exhaustive_search() {
        // Oracle: scan for b with a*b = 1.
        let q7 = PrimeModulus::new(7).unwrap();
        let expected = (1..7).find(|&b| (3 * b) % 7 == 1).unwrap();
        assert_eq!(expected, 5);
        assert_eq!(q7.element(3).inv().unwrap().value(), 5);
        assert_eq!(q7.element(1).inv().unwrap().value(), 1);

        let q5 = PrimeModulus::new(5).unwrap();
        let expected = (1..5).find(|&b| (4 * b) % 5 == 1).unwrap();
        assert_eq!(expected, 4);
        assert_eq!(q5.element(4).inv().unwrap().value(), 4);
    }

    #[test]
    fn inverse_of_zero_is_an_error() {
        let q7 = PrimeModulus::new(7).unwrap();
        assert_eq!(q7.zero().inv(), Err(FieldError::ZeroInverse));
    }

    #[test]
    #[should_panic(expected = "modulus mismatch")]
    fn mixing_moduli_panics() {
        let q5 = PrimeModulus::new(5).unwrap();
        let q7 = PrimeModulus::new(7).unwrap();
        let _ = q5.element(1) + q7.element(1);
    }

    #[test]
    fn non_prime_moduli_rejected() {
        for n in [0u64, 1, 4, 6, 9, 15, 64] {
            assert_eq!(PrimeModulus::new(n), Err(FieldError::NotPrime(n)));
        }
    }

    #[test]
    fn select_prime_examples() {
        assert_eq!(PrimeModulus::select(2, 4).get(), 67);
        assert_eq!(PrimeModulus::select(2, 1).get(), 5);
        assert_eq!(PrimeModulus::select(3, 10).get(), 601);
    }

    #[test]
    fn select_prime_is_smallest_above_threshold() {
        for u in 2..6u64 {
            for n in 1..9u64 {
                let threshold = 2 * u * n * n;
                let p = PrimeModulus::select(u, n).get();
                assert!(is_prime_naive(p), "{p} not prime");
                assert!(p > threshold);
                for x in threshold + 1..p {
                    assert!(!is_prime_naive(x), "prime {x} skipped below {p}");
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small_q() {
        for q in [2u64, 3, 5, 7, 11, 13] {
            let modulus = PrimeModulus::new(q).unwrap();
            for a in modulus.elements() {
                if !a.is_zero() {
                    assert_eq!((a * a.inv().unwrap()).value(), 1);
                }
                for b in modulus.elements() {
                    assert_eq!(a + b, b + a);
                    assert_eq!(a * b, b * a);
                    assert_eq!((a - b) + b, a);
                    assert_eq!(a + (-a), modulus.zero());
                    for c in modulus.elements() {
                        assert_eq!((a + b) + c, a + (b + c));
                        assert_eq!((a * b) * c, a * (b * c));
                        assert_eq!(a * (b + c), a * b + a * c);
                    }
                }
            }
        }
    }

    #[test]
    fn bit_width_examples() {
        assert_eq!(PrimeModulus::new(2).unwrap().bit_width(), 1);
        assert_eq!(PrimeModulus::new(5).unwrap().bit_width(), 3);
        assert_eq!(PrimeModulus::new(67).unwrap().bit_width(), 7);
        assert_eq!(PrimeModulus::new(601).unwrap().bit_width(), 10);
    }

    #[test]
    fn primality_agrees_with_naive_oracle() {
        for n in 0..2000u64 {
            assert_eq!(is_prime(n), is_prime_naive(n), "disagree at {n}");
        }
    }

    proptest::proptest! {
        #[test]
        fn axioms_on_random_triples(a in 0u64..1_000_000_007, b in 0u64..1_000_000_007, c in 0u64..1_000_000_007) {
            let modulus = PrimeModulus::new(1_000_000_007).unwrap();
            let (a, b, c) = (modulus.element(a), modulus.element(b), modulus.element(c));
            proptest::prop_assert_eq!((a + b) + c, a + (b + c));
            proptest::prop_assert_eq!((a * b) * c, a * (b * c));
            proptest::prop_assert_eq!(a * (b + c), a * b + a * c);
            if !a.is_zero() {
                proptest::prop_assert_eq!(a * a.inv().unwrap(), modulus.one());
            }
        }
    }
}
