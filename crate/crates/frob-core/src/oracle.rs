//! Ground-truth engine: brute-force denumerants and gap sets.
//!
//! Everything here enumerates directly, so it is only meant for desk-scale
//! instances; the faster engines are validated against it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeric::{binomial, rat, rational_pow};
use crate::stats::{Engine, LambdaSums, StatBundle};
use crate::tuple::Tuple;

/// Default bound on the enumeration range (and hence on any frobenius number
/// the oracle will resolve).
pub const DEFAULT_CAP: u64 = 10_000_000;

/// The finite set of non-representable integers of a tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapSet {
    members: Vec<u64>,
    frobenius: u64,
}

impl GapSet {
    /// Sorted non-representable integers.
    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn frobenius(&self) -> u64 {
        self.frobenius
    }

    pub fn count(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn sum(&self) -> BigInt {
        self.members.iter().map(|&m| BigInt::from(m)).sum()
    }
}

/// Number of representations d(a₀; A) of a₀ as Σ aᵢxᵢ with xᵢ ≥ 0, by
/// dynamic programming over prefix sums.
pub fn denumerant(a0: &BigInt, tuple: &Tuple) -> Result<BigInt> {
    if a0.is_negative() {
        return Err(Error::Domain(format!("denumerant needs a0 >= 0, got {a0}")));
    }
    let n = a0
        .to_usize()
        .ok_or_else(|| Error::ResourceCap(format!("a0 = {a0} too large to enumerate")))?;
    let mut dp = vec![BigInt::zero(); n + 1];
    dp[0] = BigInt::one();
    for e in tuple.elements() {
        let Some(step) = e.to_usize() else { continue }; // elements beyond a0 never contribute
        if step > n {
            continue;
        }
        for i in step..=n {
            let add = dp[i - step].clone();
            dp[i] += add;
        }
    }
    Ok(dp[n].clone())
}

/// All non-representable integers of the tuple, found by sieving
/// representability upward until a₁ consecutive representable integers
/// appear (after which every larger integer is representable by adding a₁).
pub fn gap_set(tuple: &Tuple) -> Result<GapSet> {
    gap_set_capped(tuple, DEFAULT_CAP)
}

/// Like [`gap_set`], with an explicit enumeration cap. The scan refuses the
/// instance (rather than running away) if it has not terminated by `cap`.
pub fn gap_set_capped(tuple: &Tuple, cap: u64) -> Result<GapSet> {
    let cap_usize = cap
        .to_usize()
        .ok_or_else(|| Error::ResourceCap(format!("cap {cap} exceeds the address space")))?;
    let run_needed = tuple.modulus().to_usize().filter(|&a| a <= cap_usize).ok_or_else(|| {
        Error::ResourceCap(format!(
            "modulus {} exceeds the enumeration cap {cap}",
            tuple.modulus()
        ))
    })?;

    let steps: Vec<usize> = tuple
        .elements()
        .iter()
        .filter_map(|e| e.to_usize())
        .filter(|&e| e <= cap_usize)
        .collect();

    let mut repr: Vec<bool> = Vec::with_capacity(run_needed * 2);
    let mut gaps: Vec<u64> = Vec::new();
    let mut run = 0usize;
    let mut i = 0usize;
    loop {
        let is_repr = if i == 0 {
            true
        } else {
            steps
                .iter()
                .any(|&s| s <= i && repr[i - s])
        };
        repr.push(is_repr);
        if is_repr {
            run += 1;
            if run >= run_needed {
                break;
            }
        } else {
            run = 0;
            gaps.push(i as u64);
        }
        i += 1;
        if i > cap_usize {
            return Err(Error::ResourceCap(format!(
                "tuple {tuple}: no terminating run found below cap {cap}"
            )));
        }
    }
    // Elements are >= 2, so 1 is always a gap.
    let frobenius = *gaps.last().expect("gap set of a valid tuple is nonempty");
    Ok(GapSet {
        members: gaps,
        frobenius,
    })
}

/// Every statistic, by direct summation over the gap set.
///
/// `lambdas` must avoid 0 and 1; each entry yields the weighted power sums
/// s_μ^(λ) = Σ λⁿ nᵘ for 1 ≤ μ ≤ `max_mu`.
pub fn oracle_stats(tuple: &Tuple, max_mu: u32, lambdas: &[BigRational]) -> Result<StatBundle> {
    oracle_stats_capped(tuple, max_mu, lambdas, DEFAULT_CAP)
}

pub fn oracle_stats_capped(
    tuple: &Tuple,
    max_mu: u32,
    lambdas: &[BigRational],
    cap: u64,
) -> Result<StatBundle> {
    for l in lambdas {
        if l.is_zero() || l.is_one() {
            return Err(Error::Domain(format!(
                "weight λ = {l} is excluded (λ must avoid 0 and 1)"
            )));
        }
    }
    let gaps = gap_set_capped(tuple, cap)?;
    Ok(stats_from_gaps(&gaps, max_mu, lambdas)?)
}

/// Aggregate a gap set into a [`StatBundle`] (shared with tests that already
/// hold a [`GapSet`]).
pub fn stats_from_gaps(
    gaps: &GapSet,
    max_mu: u32,
    lambdas: &[BigRational],
) -> Result<StatBundle> {
    let mut bundle = StatBundle::new(Engine::Oracle);
    bundle.g = Some(BigInt::from(gaps.frobenius()));
    bundle.n = Some(BigInt::from(gaps.count()));
    bundle.s = Some(gaps.sum());
    for mu in 1..=max_mu {
        let mut pow_sum = BigInt::zero();
        let mut binom_sum = BigInt::zero();
        for &m in gaps.members() {
            let n = BigInt::from(m);
            pow_sum += n.pow(mu);
            binom_sum += binomial(&n, mu as usize);
        }
        bundle.s_mu.insert(mu, pow_sum);
        bundle.shat_mu.insert(mu, binom_sum);
    }
    for lambda in lambdas {
        let mut sums = std::collections::BTreeMap::new();
        // Walk the members once per λ, carrying λ^n incrementally.
        let mut weights: Vec<BigRational> = Vec::with_capacity(gaps.members().len());
        let mut prev: u64 = 0;
        let mut w = BigRational::one();
        for &m in gaps.members() {
            w *= rational_pow(lambda, &BigInt::from(m - prev))?;
            prev = m;
            weights.push(w.clone());
        }
        for mu in 1..=max_mu {
            let mut acc = BigRational::zero();
            for (&m, w) in gaps.members().iter().zip(&weights) {
                acc += w * rat(&BigInt::from(m).pow(mu));
            }
            sums.insert(mu, acc);
        }
        bundle.s_mu_lambda.push(LambdaSums {
            lambda: lambda.clone(),
            sums,
        });
    }
    Ok(bundle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ratio;

    fn t(elems: &[u64]) -> Tuple {
        Tuple::from_u64s(elems).unwrap()
    }

    #[test]
    fn denumerant_examples() {
        let a = t(&[5, 16, 19, 22]);
        assert_eq!(denumerant(&BigInt::from(32), &a).unwrap(), BigInt::from(2));
        assert_eq!(denumerant(&BigInt::from(33), &a).unwrap(), BigInt::zero());
        assert_eq!(denumerant(&BigInt::zero(), &a).unwrap(), BigInt::one());
        assert!(denumerant(&BigInt::from(-1), &a).is_err());
    }

    #[test]
    fn gap_set_small_pairs() {
        let g = gap_set(&t(&[3, 5])).unwrap();
        assert_eq!(g.members(), &[1, 2, 4, 7]);
        assert_eq!(g.frobenius(), 7);

        let g = gap_set(&t(&[2, 3])).unwrap();
        assert_eq!(g.members(), &[1]);
        assert_eq!(g.frobenius(), 1);
    }

    #[test]
    fn gap_set_paper_instance() {
        let g = gap_set(&t(&[5, 16, 19, 22])).unwrap();
        assert_eq!(g.frobenius(), 33);
        assert_eq!(g.count(), 17);
        assert_eq!(g.sum(), BigInt::from(209));
    }

    #[test]
    fn gap_members_have_zero_denumerant() {
        for elems in [&[5u64, 16, 19, 22][..], &[7, 9, 10], &[6, 10, 15]] {
            let tuple = t(elems);
            let g = gap_set(&tuple).unwrap();
            for &m in g.members() {
                assert_eq!(
                    denumerant(&BigInt::from(m), &tuple).unwrap(),
                    BigInt::zero(),
                    "{m} listed as gap of {tuple}"
                );
            }
            // Everything not listed in [0, frobenius] is representable.
            let members: std::collections::HashSet<u64> = g.members().iter().copied().collect();
            for v in 0..=g.frobenius() {
                if !members.contains(&v) {
                    assert!(
                        denumerant(&BigInt::from(v), &tuple).unwrap() > BigInt::zero(),
                        "{v} missing from gaps of {tuple} but not representable"
                    );
                }
            }
        }
    }

    #[test]
    fn two_generator_laws() {
        // g = ab - a - b and n = (a-1)(b-1)/2 for coprime pairs.
        for a in 3u64..=40 {
            for b in (a + 1)..=40 {
                if num_integer::gcd(a, b) != 1 {
                    continue;
                }
                let g = gap_set(&t(&[a, b])).unwrap();
                assert_eq!(g.frobenius(), a * b - a - b, "g({a},{b})");
                assert_eq!(g.count(), (a - 1) * (b - 1) / 2, "n({a},{b})");
            }
        }
    }

    #[test]
    fn stats_examples() {
        let bundle = oracle_stats(&t(&[5, 16, 19, 22]), 1, &[]).unwrap();
        assert_eq!(bundle.g, Some(BigInt::from(33)));
        assert_eq!(bundle.n, Some(BigInt::from(17)));
        assert_eq!(bundle.s, Some(BigInt::from(209)));
        assert_eq!(bundle.s_mu[&1], BigInt::from(209));
        assert_eq!(bundle.shat_mu[&1], BigInt::from(209));

        let bundle = oracle_stats(&t(&[2, 3]), 2, &[]).unwrap();
        assert_eq!(bundle.g, Some(BigInt::one()));
        assert_eq!(bundle.n, Some(BigInt::one()));
        assert_eq!(bundle.s, Some(BigInt::one()));
        assert_eq!(bundle.s_mu[&2], BigInt::one());
    }

    #[test]
    fn weighted_sum_example() {
        // Gaps of (3,5) are {1,2,4,7}; s_1^(-1) = -1 + 2 + 4 - 7 = -2.
        let bundle = oracle_stats(&t(&[3, 5]), 1, &[ratio(-1, 1)]).unwrap();
        assert_eq!(bundle.s_mu_lambda[0].sums[&1], ratio(-2, 1));
    }

    #[test]
    fn rejects_bad_lambda() {
        assert!(oracle_stats(&t(&[3, 5]), 1, &[ratio(0, 1)]).is_err());
        assert!(oracle_stats(&t(&[3, 5]), 1, &[ratio(1, 1)]).is_err());
    }

    #[test]
    fn cap_refusal() {
        let err = gap_set_capped(&t(&[101, 30000]), 1000).unwrap_err();
        assert!(matches!(err, Error::ResourceCap(_)));
    }
}
