//! Count scalars.
//!
//! Every counting routine is generic over the integer type used to hold
//! `N_{A,g}` values. [`BigUint`] is always exact; the fixed-width types are
//! faster and are accepted only when the sequence is short enough that no
//! count can exceed their range (`N <= 2^len`).

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Unsigned, Zero};

/// A non-negative integer type able to hold subsequence counts.
pub trait Count:
    Unsigned + Clone + Ord + Hash + Debug + Display + Send + Sync + for<'a> std::ops::AddAssign<&'a Self>
{
    /// Largest `n` such that `2^n` is representable.
    const MAX_POW2: u32;

    fn from_u64(v: u64) -> Self;

    fn to_biguint(&self) -> BigUint;

    fn pow2(n: u32) -> Self {
        assert!(n <= Self::MAX_POW2, "2^{n} does not fit in the count type");
        let mut acc = Self::one();
        let two = Self::from_u64(2);
        for _ in 0..n {
            acc = acc * two.clone();
        }
        acc
    }
}

impl Count for u64 {
    const MAX_POW2: u32 = 63;

    fn from_u64(v: u64) -> Self {
        v
    }

    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }

    fn pow2(n: u32) -> Self {
        1u64.checked_shl(n).expect("2^n does not fit in u64")
    }
}

impl Count for u128 {
    const MAX_POW2: u32 = 127;

    fn from_u64(v: u64) -> Self {
        v as u128
    }

    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }

    fn pow2(n: u32) -> Self {
        1u128.checked_shl(n).expect("2^n does not fit in u128")
    }
}

impl Count for BigUint {
    const MAX_POW2: u32 = u32::MAX;

    fn from_u64(v: u64) -> Self {
        BigUint::from(v)
    }

    fn to_biguint(&self) -> BigUint {
        self.clone()
    }

    fn pow2(n: u32) -> Self {
        BigUint::one() << n
    }
}

/// Binomial coefficient `C(n, k)` in the requested count type.
///
/// Uses the multiplicative formula with an exact division at every step,
/// carried out in `BigUint` so intermediate products never overflow.
pub fn binomial<C: Count>(n: u64, k: u64) -> C {
    if k > n {
        return C::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    from_biguint(&acc)
}

/// Converts back from `BigUint`, panicking if the value does not fit.
pub fn from_biguint<C: Count>(v: &BigUint) -> C {
    let mut out = C::zero();
    // Horner over 32-bit digits keeps this generic without a FromBigUint bound.
    let base = C::from_u64(1u64 << 32);
    for digit in v.to_u32_digits().iter().rev() {
        out = out * base.clone() + C::from_u64(*digit as u64);
    }
    if v.is_zero() {
        return C::zero();
    }
    debug_assert_eq!(out.to_biguint(), *v);
    out
}

/// Lossless conversion to `u64` when possible.
pub fn count_to_u64<C: Count>(c: &C) -> Option<u64> {
    c.to_biguint().to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials_match_pascal() {
        let mut row = vec![1u64];
        for n in 0..=40u64 {
            for (k, v) in row.iter().enumerate() {
                assert_eq!(binomial::<u64>(n, k as u64), *v);
                assert_eq!(binomial::<BigUint>(n, k as u64), BigUint::from(*v));
            }
            let mut next = vec![1u64; row.len() + 1];
            for k in 1..row.len() {
                next[k] = row[k - 1] + row[k];
            }
            row = next;
        }
        assert_eq!(binomial::<u64>(3, 5), 0);
    }

    #[test]
    fn pow2_agrees_across_types() {
        for n in [0u32, 1, 17, 63] {
            assert_eq!(u64::pow2(n).to_biguint(), BigUint::pow2(n));
            assert_eq!(u128::pow2(n).to_biguint(), BigUint::pow2(n));
        }
        assert_eq!(BigUint::pow2(100).bits(), 101);
    }

    #[test]
    fn from_biguint_round_trips() {
        let v = BigUint::pow2(70) + BigUint::from(12345u32);
        let w: u128 = from_biguint(&v);
        assert_eq!(w.to_biguint(), v);
        assert_eq!(from_biguint::<u64>(&BigUint::zero()), 0);
    }
}
