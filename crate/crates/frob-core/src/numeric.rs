//! Exact combinatorial number sequences shared by every engine.
//!
//! Everything here is arbitrary-precision: integers are [`BigInt`], rationals
//! are [`BigRational`], and no operation ever rounds.
//!
//! # Bernoulli sign convention
//!
//! `bernoulli(1)` returns **−1/2**. This is the convention fixed by the
//! series t/(1−e^t) = Σ −𝓑ₙ tⁿ/n!, whose first coefficients are
//! −1, 1/2, −1/12, 0, 1/720. The alternative convention (𝓑₁ = +1/2)
//! silently flips the power-sum formulas, so callers must not "fix" signs.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Indices at or below this are cached; larger ones are recomputed per call.
const MEMO_LIMIT: usize = 64;

static BERNOULLI: Mutex<Vec<BigRational>> = Mutex::new(Vec::new());
static STIRLING2: Mutex<Vec<Vec<BigInt>>> = Mutex::new(Vec::new());

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// n-th Bernoulli number 𝓑ₙ with 𝓑₁ = −1/2 (see the module docs).
///
/// Computed from the recurrence Σ_{k=0}^{n} C(n+1,k)·𝓑ₖ = 0 and memoized
/// through index 64.
pub fn bernoulli(n: usize) -> BigRational {
    let mut cache = BERNOULLI.lock().unwrap();
    if n < cache.len() {
        return cache[n].clone();
    }
    // Fill the cached prefix first, then keep going locally if n > MEMO_LIMIT.
    let mut local: Vec<BigRational> = cache.clone();
    while local.len() <= n {
        let m = local.len();
        let value = if m == 0 {
            BigRational::one()
        } else {
            // B_m = -1/(m+1) * sum_{k<m} C(m+1,k) B_k
            let mut acc = BigRational::zero();
            for (k, b) in local.iter().enumerate() {
                acc += BigRational::from(binomial_usize(m + 1, k)) * b;
            }
            -acc / BigRational::from(big(m as i64 + 1))
        };
        local.push(value);
        if local.len() <= MEMO_LIMIT + 1 && local.len() > cache.len() {
            cache.push(local.last().unwrap().clone());
        }
    }
    local[n].clone()
}

/// Stirling number of the second kind S(p,k): partitions of a p-set into k
/// nonempty blocks, via S(p,k) = k·S(p−1,k) + S(p−1,k−1).
pub fn stirling2(p: usize, k: usize) -> BigInt {
    if k > p {
        return BigInt::zero();
    }
    let mut cache = STIRLING2.lock().unwrap();
    let mut local: Vec<Vec<BigInt>> = cache.clone();
    while local.len() <= p {
        let m = local.len();
        let mut row = vec![BigInt::zero(); m + 1];
        if m == 0 {
            row[0] = BigInt::one();
        } else {
            let prev = &local[m - 1];
            for j in 1..=m {
                let mut v = big(j as i64) * prev.get(j).cloned().unwrap_or_else(BigInt::zero);
                v += &prev[j - 1];
                row[j] = v;
            }
        }
        local.push(row);
        if local.len() <= MEMO_LIMIT + 1 && local.len() > cache.len() {
            cache.push(local.last().unwrap().clone());
        }
    }
    local[p][k].clone()
}

/// Signed Stirling number of the first kind s(p,k), satisfying
/// (n)_p = Σ_k s(p,k)·n^k. Only needed to round-trip the second-kind
/// conversion; the engines themselves use [`stirling2`].
pub fn stirling1(p: usize, k: usize) -> BigInt {
    if k > p {
        return BigInt::zero();
    }
    // s(p+1,k) = s(p,k-1) - p*s(p,k); small p only, no memoization.
    let mut row = vec![BigInt::one()];
    for m in 0..p {
        let mut next = vec![BigInt::zero(); m + 2];
        for j in 0..=m {
            next[j + 1] += &row[j];
            next[j] -= big(m as i64) * &row[j];
        }
        row = next;
    }
    row[k].clone()
}

/// Falling factorial (n)_p = n(n−1)···(n−p+1); the empty product is 1.
pub fn falling_factorial(n: &BigInt, p: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..p {
        acc *= n - big(i as i64);
    }
    acc
}

/// p! as a big integer.
pub fn factorial(p: usize) -> BigInt {
    falling_factorial(&big(p as i64), p)
}

/// Binomial coefficient C(n,k) for machine-sized arguments.
pub fn binomial_usize(n: usize, k: usize) -> BigInt {
    binomial(&big(n as i64), k)
}

/// Binomial coefficient C(n,k) = (n)_k / k! for arbitrary integer n ≥ 0 or
/// even negative n (the usual polynomial extension).
pub fn binomial(n: &BigInt, k: usize) -> BigInt {
    let num = falling_factorial(n, k);
    let den = factorial(k);
    // (n)_k is always divisible by k!.
    let (q, r) = num_integer::Integer::div_rem(&num, &den);
    debug_assert!(r.is_zero());
    q
}

/// Power sum Σ_{r=1}^{m} r^p, by direct accumulation.
pub fn power_sum(m: u64, p: u32) -> BigInt {
    let mut acc = BigInt::zero();
    for r in 1..=m {
        acc += BigInt::from(r).pow(p);
    }
    acc
}

/// Embed an integer into the rationals.
pub fn rat(n: &BigInt) -> BigRational {
    BigRational::from(n.clone())
}

/// Rational with the given numerator and denominator.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(big(num), big(den))
}

/// Demand that an exactly-computed rational is an integer.
///
/// The aggregation formulas divide by a, 2a, 12, μ+1, ...; every such
/// division must come out exact. A remainder here is an internal bug
/// (never bad input), so it surfaces as [`Error::Internal`].
pub fn expect_integer(v: &BigRational, context: &str) -> Result<BigInt> {
    if v.is_integer() {
        Ok(v.to_integer())
    } else {
        Err(Error::Internal(format!(
            "{context}: expected an integer, got {v}"
        )))
    }
}

/// λ^e for a (possibly negative) integer exponent.
pub fn rational_pow(base: &BigRational, exp: &BigInt) -> Result<BigRational> {
    if base.is_zero() && !exp.is_positive() {
        return Err(Error::Domain(
            "0 cannot be raised to a nonpositive power".into(),
        ));
    }
    let e = exp
        .to_i32()
        .ok_or_else(|| Error::ResourceCap(format!("exponent {exp} too large for exact power")))?;
    Ok(num_traits::Pow::pow(base.clone(), e))
}
