//! Exact permanents and determinants of sign matrices.
//!
//! Three independent permanent routes are provided: the defining sum over
//! permutations ([`permanent_naive`]), Ryser's inclusion-exclusion formula with
//! Gray-code column updates ([`permanent_ryser`]) and, in the `lattice`
//! module, the cofactor recursion over all leading minors. Determinants are
//! computed by fraction-free (Bareiss) elimination with the signed defining sum
//! as an oracle.
//!
//! Values are returned as [`ExactInt`] (`i128`). `|Per(M)| <= n!` fits for
//! every `n <= 33`; intermediate quantities that may not fit are computed with
//! checked arithmetic and recomputed with big integers on overflow.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::SignMatrix;

/// Exact integer value of a permanent or determinant.
pub type ExactInt = i128;

/// Largest `n` accepted by [`permanent_naive`] and [`determinant_naive`].
pub const NAIVE_MAX_N: usize = 10;
/// Default largest `n` accepted by [`permanent_ryser`] (2^n work).
pub const RYSER_MAX_N: usize = 30;
/// Largest `n` accepted by [`permanent_mod`]; one above the exact cap so the
/// `n + 1 = 32` case of the power-of-two residue property is reachable.
pub const RYSER_MOD_MAX_N: usize = 31;

/// Ring operations with overflow reporting, shared by the fixed-width and
/// big-integer code paths.
pub(crate) trait ExactRing: Clone {
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn checked_add(&self, o: &Self) -> Option<Self>;
    fn checked_sub(&self, o: &Self) -> Option<Self>;
    fn checked_mul(&self, o: &Self) -> Option<Self>;
    fn checked_neg(&self) -> Option<Self>;
    /// Division known to be exact.
    fn exact_div(&self, o: &Self) -> Self;
    fn to_i128(&self) -> Option<i128>;
}

macro_rules! exact_ring_prim {
    ($t:ty) => {
        impl ExactRing for $t {
            #[inline]
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            #[inline]
            fn is_zero(&self) -> bool {
                *self == 0
            }
            #[inline]
            fn checked_add(&self, o: &Self) -> Option<Self> {
                <$t>::checked_add(*self, *o)
            }
            #[inline]
            fn checked_sub(&self, o: &Self) -> Option<Self> {
                <$t>::checked_sub(*self, *o)
            }
            #[inline]
            fn checked_mul(&self, o: &Self) -> Option<Self> {
                <$t>::checked_mul(*self, *o)
            }
            #[inline]
            fn checked_neg(&self) -> Option<Self> {
                <$t>::checked_neg(*self)
            }
            #[inline]
            fn exact_div(&self, o: &Self) -> Self {
                debug_assert_eq!(*self % *o, 0);
                *self / *o
            }
            #[inline]
            fn to_i128(&self) -> Option<i128> {
                Some(*self as i128)
            }
        }
    };
}

exact_ring_prim!(i64);
exact_ring_prim!(i128);

impl ExactRing for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn checked_add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn checked_sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn checked_mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn checked_neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn exact_div(&self, o: &Self) -> Self {
        self / o
    }
    fn to_i128(&self) -> Option<i128> {
        ToPrimitive::to_i128(self)
    }
}

/// Permanent by the defining sum over all permutations.
///
/// Permutations are enumerated depth-first by row, each partial product
/// shared by its extensions; there is no memoization across column subsets.
pub fn permanent_naive(m: &SignMatrix) -> Result<ExactInt> {
    let n = m.n();
    if n > NAIVE_MAX_N {
        return Err(Error::TooLarge { what: "factorial enumeration", n, cap: NAIVE_MAX_N });
    }
    fn walk(m: &SignMatrix, row: usize, used: u64) -> i64 {
        let n = m.n();
        if row == n {
            return 1;
        }
        let mut total = 0;
        for j in 0..n {
            if used >> j & 1 == 0 {
                total += m.get(row, j) as i64 * walk(m, row + 1, used | 1 << j);
            }
        }
        total
    }
    Ok(walk(m, 0, 0) as ExactInt)
}

/// Determinant by the signed defining sum (oracle for [`determinant_exact`]).
pub fn determinant_naive(m: &SignMatrix) -> Result<ExactInt> {
    let n = m.n();
    if n > NAIVE_MAX_N {
        return Err(Error::TooLarge { what: "factorial enumeration", n, cap: NAIVE_MAX_N });
    }
    // The inversion count of a permutation is the sum, over rows, of how many
    // still-unused columns lie to the left of the chosen one.
    fn walk(m: &SignMatrix, row: usize, used: u64) -> i64 {
        let n = m.n();
        if row == n {
            return 1;
        }
        let mut total = 0;
        let mut free_left = 0u32;
        for j in 0..n {
            if used >> j & 1 == 0 {
                let sign = if free_left % 2 == 0 { 1 } else { -1 };
                total += sign * m.get(row, j) as i64 * walk(m, row + 1, used | 1 << j);
                free_left += 1;
            }
        }
        total
    }
    Ok(walk(m, 0, 0) as ExactInt)
}

fn bareiss<R: ExactRing>(m: &SignMatrix) -> Option<R> {
    let n = m.n();
    if n == 0 {
        return Some(R::from_i64(1));
    }
    let mut a: Vec<Vec<R>> = m.rows().map(|r| r.iter().map(|&v| R::from_i64(v as i64)).collect()).collect();
    let mut negate = false;
    let mut prev = R::from_i64(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return Some(R::from_i64(0));
            };
            a.swap(k, r);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let lhs = a[i][j].checked_mul(&a[k][k])?;
                let rhs = a[i][k].checked_mul(&a[k][j])?;
                a[i][j] = lhs.checked_sub(&rhs)?.exact_div(&prev);
            }
            a[i][k] = R::from_i64(0);
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        det.checked_neg()
    } else {
        Some(det)
    }
}

/// Exact determinant by fraction-free Gaussian elimination.
pub fn determinant_exact(m: &SignMatrix) -> Result<ExactInt> {
    if let Some(d) = bareiss::<i128>(m) {
        return Ok(d);
    }
    bareiss::<BigInt>(m)
        .and_then(|d| ExactRing::to_i128(&d))
        .ok_or(Error::Overflow("determinant"))
}

/// Ryser's formula, `Per(M) = sum_S (-1)^(n-|S|) prod_i sum_{j in S} a_ij`,
/// walking the nonempty column subsets in Gray-code order so each step updates
/// the row sums by a single column. Returns `None` on overflow of `R`.
pub(crate) fn ryser_with<R: ExactRing>(m: &SignMatrix) -> Option<R> {
    let n = m.n();
    if n == 0 {
        return Some(R::from_i64(1));
    }
    let cols: Vec<Vec<i64>> = (0..n).map(|j| (0..n).map(|i| m.get(i, j) as i64).collect()).collect();
    let mut row_sums = vec![0i64; n];
    let mut total = R::from_i64(0);
    let mut gray = 0u64;
    for step in 1u64..(1u64 << n) {
        let j = step.trailing_zeros() as usize;
        gray ^= 1 << j;
        if gray >> j & 1 == 1 {
            row_sums.iter_mut().zip(&cols[j]).for_each(|(s, &a)| *s += a);
        } else {
            row_sums.iter_mut().zip(&cols[j]).for_each(|(s, &a)| *s -= a);
        }
        if row_sums.contains(&0) {
            continue;
        }
        let mut prod = R::from_i64(row_sums[0]);
        for &s in &row_sums[1..] {
            prod = prod.checked_mul(&R::from_i64(s))?;
        }
        let size = gray.count_ones() as usize;
        total = if (n - size) % 2 == 0 {
            total.checked_add(&prod)?
        } else {
            total.checked_sub(&prod)?
        };
    }
    Some(total)
}

/// Exact permanent by Ryser's formula, `O(2^n n)`.
pub fn permanent_ryser(m: &SignMatrix) -> Result<ExactInt> {
    permanent_ryser_capped(m, RYSER_MAX_N)
}

/// [`permanent_ryser`] with an explicit size cap.
pub fn permanent_ryser_capped(m: &SignMatrix, max_n: usize) -> Result<ExactInt> {
    let n = m.n();
    if n > max_n || n > RYSER_MOD_MAX_N {
        return Err(Error::TooLarge { what: "Ryser permanent", n, cap: max_n.min(RYSER_MOD_MAX_N) });
    }
    if let Some(p) = ryser_with::<i128>(m) {
        return Ok(p);
    }
    ryser_with::<BigInt>(m)
        .and_then(|p| ExactRing::to_i128(&p))
        .ok_or(Error::Overflow("Ryser permanent"))
}

/// Permanent modulo `modulus`, by Ryser's formula in modular arithmetic.
pub fn permanent_mod(m: &SignMatrix, modulus: u64) -> Result<u64> {
    if modulus < 2 {
        return Err(Error::InvalidModulus(modulus));
    }
    let n = m.n();
    if n > RYSER_MOD_MAX_N {
        return Err(Error::TooLarge { what: "modular Ryser permanent", n, cap: RYSER_MOD_MAX_N });
    }
    let q = modulus as u128;
    if n == 0 {
        return Ok((1 % q) as u64);
    }
    let cols: Vec<Vec<i64>> = (0..n).map(|j| (0..n).map(|i| m.get(i, j) as i64).collect()).collect();
    let mut row_sums = vec![0i64; n];
    let mut total: u128 = 0;
    let mut gray = 0u64;
    for step in 1u64..(1u64 << n) {
        let j = step.trailing_zeros() as usize;
        gray ^= 1 << j;
        let added = gray >> j & 1 == 1;
        for (s, &a) in row_sums.iter_mut().zip(&cols[j]) {
            *s += if added { a } else { -a };
        }
        let mut prod: u128 = 1;
        for &s in &row_sums {
            prod = prod * (s.rem_euclid(modulus as i64) as u128) % q;
            if prod == 0 {
                break;
            }
        }
        let size = gray.count_ones() as usize;
        total = if (n - size) % 2 == 0 { (total + prod) % q } else { (total + q - prod) % q };
    }
    Ok(total as u64)
}

/// Big-integer permanent, for callers that need values beyond `i128`.
pub fn permanent_ryser_big(m: &SignMatrix) -> Result<BigInt> {
    let n = m.n();
    if n > RYSER_MOD_MAX_N {
        return Err(Error::TooLarge { what: "Ryser permanent", n, cap: RYSER_MOD_MAX_N });
    }
    Ok(ryser_with::<BigInt>(m).expect("big integers do not overflow"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{enumerate_all_sign_matrices, sample_sign_matrix};
    use crate::rng::RngStream;
    use crate::subset::factorial;

    fn mat(text: &str) -> SignMatrix {
        text.parse().unwrap()
    }

    #[test]
    fn naive_hand_values() {
        assert_eq!(permanent_naive(&SignMatrix::all_ones(2).unwrap()).unwrap(), 2);
        assert_eq!(permanent_naive(&mat("2\n1 1\n1 -1\n")).unwrap(), 0);
        assert_eq!(permanent_naive(&SignMatrix::constant(3, -1).unwrap()).unwrap(), -6);
        assert!(matches!(
            permanent_naive(&SignMatrix::all_ones(11).unwrap()),
            Err(Error::TooLarge { cap: 10, .. })
        ));
    }

    #[test]
    fn empty_matrix_conventions() {
        let empty = SignMatrix::from_rows(vec![]).unwrap();
        assert_eq!(permanent_naive(&empty).unwrap(), 1);
        assert_eq!(permanent_ryser(&empty).unwrap(), 1);
        assert_eq!(determinant_exact(&empty).unwrap(), 1);
        assert_eq!(determinant_naive(&empty).unwrap(), 1);
    }

    #[test]
    fn determinant_hand_values() {
        assert_eq!(determinant_exact(&mat("2\n1 1\n1 -1\n")).unwrap(), -2);
        assert_eq!(determinant_exact(&SignMatrix::all_ones(3).unwrap()).unwrap(), 0);
        // Sylvester Hadamard matrix of order 4 has |det| = 4^2.
        let h = mat("4\n1 1 1 1\n1 -1 1 -1\n1 1 -1 -1\n1 -1 -1 1\n");
        assert_eq!(determinant_exact(&h).unwrap(), determinant_naive(&h).unwrap());
        assert_eq!(determinant_exact(&h).unwrap().abs(), 16);
    }

    #[test]
    fn determinant_matches_signed_sum() {
        for n in 1..=8 {
            for t in 0..20 {
                let m = sample_sign_matrix(n, &mut RngStream::new(8, t)).unwrap();
                assert_eq!(determinant_exact(&m).unwrap(), determinant_naive(&m).unwrap(), "n={n} t={t}");
            }
        }
        // Pivoting path: zero leading entry after the first elimination step.
        for m in enumerate_all_sign_matrices(3).unwrap() {
            assert_eq!(determinant_exact(&m).unwrap(), determinant_naive(&m).unwrap());
        }
    }

    #[test]
    fn ryser_matches_naive_exhaustively_at_three() {
        for m in enumerate_all_sign_matrices(3).unwrap() {
            assert_eq!(permanent_ryser(&m).unwrap(), permanent_naive(&m).unwrap());
        }
    }

    #[test]
    fn ryser_matches_naive_at_ten() {
        let m = sample_sign_matrix(10, &mut RngStream::new(10, 0)).unwrap();
        assert_eq!(permanent_ryser(&m).unwrap(), permanent_naive(&m).unwrap());
        assert_eq!(permanent_ryser(&SignMatrix::all_ones(2).unwrap()).unwrap(), 2);
    }

    #[test]
    fn ryser_cap_is_enforced() {
        let m = SignMatrix::all_ones(12).unwrap();
        assert!(matches!(permanent_ryser_capped(&m, 11), Err(Error::TooLarge { cap: 11, .. })));
    }

    #[test]
    fn fixed_width_overflow_is_detected_not_wrapped() {
        // Row sums of the all-ones 20x20 reach 20, and 20^20 > i64::MAX.
        let m = SignMatrix::all_ones(20).unwrap();
        assert!(ryser_with::<i64>(&m).is_none());
        let exact = permanent_ryser(&m).unwrap();
        assert_eq!(exact as u128, factorial(20).unwrap());
    }

    #[test]
    fn big_integer_route_agrees() {
        for t in 0..5 {
            let m = sample_sign_matrix(12, &mut RngStream::new(12, t)).unwrap();
            let big = ryser_with::<BigInt>(&m).unwrap();
            assert_eq!(BigInt::from(permanent_ryser(&m).unwrap()), big);
            assert_eq!(permanent_ryser_big(&m).unwrap(), big);
        }
    }

    #[test]
    fn modular_residues() {
        assert_eq!(permanent_mod(&SignMatrix::all_ones(2).unwrap(), 5).unwrap(), 2);
        assert!(matches!(permanent_mod(&SignMatrix::all_ones(2).unwrap(), 1), Err(Error::InvalidModulus(1))));
        for t in 0..30 {
            let m = sample_sign_matrix(9, &mut RngStream::new(9, t)).unwrap();
            let p = permanent_ryser(&m).unwrap();
            for q in [2u64, 3, 7, 10, 1_000_003] {
                assert_eq!(permanent_mod(&m, q).unwrap() as i128, p.rem_euclid(q as i128));
            }
        }
    }

    #[test]
    fn power_of_two_residue_property() {
        // n = 2^k - 1: Per = 2^(n-k) * odd. At n = 3 this reads Per = 2 mod 4.
        for m in enumerate_all_sign_matrices(3).unwrap() {
            assert_eq!(permanent_mod(&m, 4).unwrap(), 2);
        }
        for t in 0..50 {
            let m = sample_sign_matrix(7, &mut RngStream::new(77, t)).unwrap();
            assert_eq!(permanent_mod(&m, 32).unwrap(), 16);
            assert_eq!(permanent_mod(&m, 8).unwrap(), 0);
        }
        assert_eq!(permanent_mod(&SignMatrix::all_ones(7).unwrap(), 8).unwrap(), 0);
    }
}
