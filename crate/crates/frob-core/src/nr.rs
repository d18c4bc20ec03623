//! The residue table N_r and its aggregation into statistics.
//!
//! N_r is the smallest integer congruent to r mod a₁ that is representable by
//! the remaining generators. The table determines every statistic:
//! g = max N_r − a, and n, s, s_μ come out of Bernoulli-weighted sums of the
//! N_r powers. All divisions in those formulas must be exact; the engine
//! asserts this rather than rounding.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeric::{bernoulli, binomial_usize, expect_integer, rat, ratio};
use crate::stats::{Engine, StatBundle};
use crate::tuple::Tuple;

/// The table of minimal representable values, one per residue class mod a₁.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NrTable {
    modulus: u64,
    values: Vec<BigInt>,
}

impl NrTable {
    /// Wrap an externally produced table, checking only shape (length and the
    /// zero entry); full congruence validation is [`NrTable::validate`].
    pub fn from_values(modulus: u64, values: Vec<BigInt>) -> Result<Self> {
        if modulus < 2 || values.len() != modulus as usize {
            return Err(Error::Domain(format!(
                "table length {} does not match modulus {modulus}",
                values.len()
            )));
        }
        Ok(NrTable { modulus, values })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    /// max N_r − a₁.
    pub fn frobenius(&self) -> BigInt {
        self.values.iter().max().unwrap() - BigInt::from(self.modulus)
    }

    /// Check the defining invariants: values[0] = 0 and values[r] ≡ r (mod a).
    pub fn validate(&self) -> Result<()> {
        if !self.values[0].is_zero() {
            return Err(Error::Internal(format!(
                "N_0 = {}, expected 0",
                self.values[0]
            )));
        }
        let a = BigInt::from(self.modulus);
        for (r, v) in self.values.iter().enumerate() {
            if v.is_negative() || v.mod_floor(&a) != BigInt::from(r as u64) {
                return Err(Error::Internal(format!(
                    "N_{r} = {v} is not congruent to {r} mod {a}"
                )));
            }
        }
        Ok(())
    }

    /// Serialize as `{"modulus": a, "values": [...]}` with exact integers.
    pub fn to_json(&self) -> serde_json::Value {
        let values: Vec<serde_json::Value> = self.values.iter().map(bigint_to_json).collect();
        serde_json::json!({ "modulus": self.modulus, "values": values })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let modulus = v
            .get("modulus")
            .and_then(|m| m.as_u64())
            .ok_or_else(|| Error::Domain("missing or invalid \"modulus\"".into()))?;
        let values = v
            .get("values")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Domain("missing \"values\" array".into()))?
            .iter()
            .map(json_to_bigint)
            .collect::<Result<Vec<_>>>()?;
        let table = NrTable::from_values(modulus, values)?;
        table.validate()?;
        Ok(table)
    }
}

/// Exact JSON number for an arbitrary-precision integer.
pub fn bigint_to_json(n: &BigInt) -> serde_json::Value {
    serde_json::Value::Number(
        serde_json::Number::from_string_unchecked(n.to_string()),
    )
}

pub fn json_to_bigint(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::Number(n) => n
            .as_str()
            .parse()
            .map_err(|_| Error::Domain(format!("not an integer: {n}"))),
        other => Err(Error::Domain(format!("expected a number, got {other}"))),
    }
}

/// Compute the residue table of `tuple` modulo its first element, by a
/// single-source shortest path on the cyclic residue graph: node r has an
/// edge to (r + aᵢ) mod a₁ of weight aᵢ for every other generator aᵢ.
pub fn compute_nr(tuple: &Tuple) -> Result<NrTable> {
    let a = tuple
        .modulus()
        .to_u64()
        .filter(|&a| a <= u32::MAX as u64)
        .ok_or_else(|| {
            Error::ResourceCap(format!(
                "modulus {} too large for a residue table",
                tuple.modulus()
            ))
        })?;
    let a_usize = a as usize;
    let a_big = BigInt::from(a);

    let fits_u64 = tuple.elements()[1..].iter().all(|e| e.to_u64().is_some());
    let values = if fits_u64 {
        let steps: Vec<(usize, u128)> = tuple.elements()[1..]
            .iter()
            .filter_map(|e| {
                let w = e.to_u64().unwrap();
                let delta = (w % a) as usize;
                (delta != 0).then_some((delta, w as u128))
            })
            .collect();
        dijkstra_u128(a_usize, &steps)
            .into_iter()
            .map(BigInt::from)
            .collect()
    } else {
        let steps: Vec<(usize, BigInt)> = tuple.elements()[1..]
            .iter()
            .filter_map(|e| {
                let delta = e.mod_floor(&a_big).to_usize().unwrap();
                (delta != 0).then(|| (delta, e.clone()))
            })
            .collect();
        dijkstra_big(a_usize, &steps)?
    };
    NrTable::from_values(a, values)
}

/// Residue table modulo the smallest element (usually the fastest choice);
/// the tuple is rotated so that element leads before reducing.
pub fn compute_nr_min_modulus(tuple: &Tuple) -> Result<NrTable> {
    compute_nr(&tuple.with_min_first())
}

fn dijkstra_u128(a: usize, steps: &[(usize, u128)]) -> Vec<u128> {
    let mut dist = vec![u128::MAX; a];
    dist[0] = 0;
    let mut heap: BinaryHeap<Reverse<(u128, u32)>> = BinaryHeap::new();
    heap.push(Reverse((0, 0)));
    while let Some(Reverse((d, r))) = heap.pop() {
        let r = r as usize;
        if d > dist[r] {
            continue;
        }
        for &(delta, w) in steps {
            let mut nr = r + delta;
            if nr >= a {
                nr -= a;
            }
            let nd = d + w;
            if nd < dist[nr] {
                dist[nr] = nd;
                heap.push(Reverse((nd, nr as u32)));
            }
        }
    }
    // gcd(A) = 1 makes the graph strongly connected from 0.
    debug_assert!(dist.iter().all(|&d| d != u128::MAX));
    dist
}

fn dijkstra_big(a: usize, steps: &[(usize, BigInt)]) -> Result<Vec<BigInt>> {
    let mut dist: Vec<Option<BigInt>> = vec![None; a];
    dist[0] = Some(BigInt::zero());
    let mut heap: BinaryHeap<Reverse<(BigInt, u32)>> = BinaryHeap::new();
    heap.push(Reverse((BigInt::zero(), 0)));
    while let Some(Reverse((d, r))) = heap.pop() {
        let r = r as usize;
        if dist[r].as_ref().is_some_and(|best| &d > best) {
            continue;
        }
        for (delta, w) in steps {
            let mut nr = r + delta;
            if nr >= a {
                nr -= a;
            }
            let nd = &d + w;
            if dist[nr].as_ref().map_or(true, |best| &nd < best) {
                dist[nr] = Some(nd.clone());
                heap.push(Reverse((nd, nr as u32)));
            }
        }
    }
    dist.into_iter()
        .enumerate()
        .map(|(r, d)| {
            d.ok_or_else(|| Error::Internal(format!("residue {r} unreachable despite gcd 1")))
        })
        .collect()
}

/// Aggregate a residue table into g, n, s, and s_μ for 1 ≤ μ ≤ `max_mu`:
///
/// - g = max N_r − a
/// - n = (Σ N_r)/a − (a−1)/2
/// - s = (Σ N_r²)/(2a) − (Σ N_r)/2 + (a²−1)/12
/// - s_μ = 1/(μ+1) Σ_κ C(μ+1,κ) 𝓑_κ a^{κ−1} Σ_r N_r^{μ+1−κ}
///         + 𝓑_{μ+1}/(μ+1) (a^{μ+1}−1)
pub fn stats_from_nr(table: &NrTable, max_mu: u32) -> Result<StatBundle> {
    let a = BigInt::from(table.modulus());
    let max_power = std::cmp::max(2, max_mu as usize + 1);

    // power_sums[p] = sum over r of N_r^p (N_0 = 0 contributes nothing).
    let mut power_sums = vec![BigInt::zero(); max_power + 1];
    for v in table.values() {
        let mut p = BigInt::one();
        for sum in power_sums.iter_mut() {
            *sum += &p;
            p *= v;
        }
    }

    let mut bundle = StatBundle::new(Engine::Nr);
    bundle.g = Some(table.frobenius());

    let n = rat(&power_sums[1]) / rat(&a) - (rat(&a) - BigRational::one()) / ratio(2, 1);
    bundle.n = Some(expect_integer(&n, "n(A) from the residue table")?);

    let s = rat(&power_sums[2]) / (ratio(2, 1) * rat(&a)) - rat(&power_sums[1]) / ratio(2, 1)
        + (rat(&(&a * &a)) - BigRational::one()) / ratio(12, 1);
    bundle.s = Some(expect_integer(&s, "s(A) from the residue table")?);

    for mu in 1..=max_mu {
        let m = mu as usize;
        let mut acc = BigRational::zero();
        for kappa in 0..=m {
            let term = rat(&binomial_usize(m + 1, kappa))
                * bernoulli(kappa)
                * rat(&a).pow(kappa as i32 - 1)
                * rat(&power_sums[m + 1 - kappa]);
            acc += term;
        }
        acc /= rat(&BigInt::from(m as u64 + 1));
        acc += bernoulli(m + 1) / rat(&BigInt::from(m as u64 + 1))
            * (rat(&a).pow(m as i32 + 1) - BigRational::one());
        bundle
            .s_mu
            .insert(mu, expect_integer(&acc, &format!("s_{mu}(A) from the residue table"))?);
    }
    Ok(bundle)
}

/// Present the table in the order N_{d·0}, N_{d·1}, …, N_{d·(a−1)}.
///
/// Requires gcd(d, a) = 1, so the multiset of values is unchanged; the
/// reindexed table satisfies values[r] ≡ d·r (mod a) rather than the plain
/// congruence, which is why [`NrTable::validate`] is not re-run here.
pub fn residue_permute(table: &NrTable, d: &BigInt) -> Result<NrTable> {
    let a = BigInt::from(table.modulus());
    if !d.gcd(&a).is_one() {
        return Err(Error::Domain(format!(
            "gcd({d}, {a}) must be 1 to permute residues"
        )));
    }
    let d_mod = d.mod_floor(&a).to_u64().unwrap();
    let a = table.modulus();
    let values = (0..a)
        .map(|r| table.values()[((d_mod as u128 * r as u128) % a as u128) as usize].clone())
        .collect();
    NrTable::from_values(a, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn t(elems: &[u64]) -> Tuple {
        Tuple::from_u64s(elems).unwrap()
    }

    fn ints(vals: &[i64]) -> Vec<BigInt> {
        vals.iter().map(|&v| BigInt::from(v)).collect()
    }

    #[test]
    fn table_examples() {
        assert_eq!(compute_nr(&t(&[5, 9, 11])).unwrap().values(), &ints(&[0, 11, 22, 18, 9])[..]);
        assert_eq!(compute_nr(&t(&[2, 3])).unwrap().values(), &ints(&[0, 3])[..]);
        assert_eq!(
            compute_nr(&t(&[7, 8, 9])).unwrap().values(),
            &ints(&[0, 8, 9, 17, 18, 26, 27])[..]
        );
    }

    #[test]
    fn table_invariants() {
        for elems in [&[5u64, 9, 11][..], &[5, 16, 19, 22], &[6, 10, 15], &[7, 9, 10]] {
            let table = compute_nr(&t(elems)).unwrap();
            table.validate().unwrap();
            let max = table.values().iter().max().unwrap().clone();
            assert_eq!(table.frobenius(), max - BigInt::from(table.modulus()));
        }
    }

    #[test]
    fn redundant_generator_is_ignored() {
        let base = t(&[7, 9, 10]);
        let table = compute_nr(&base).unwrap();
        // 19 = 9 + 10 is representable, so appending it changes nothing.
        let padded = base.with_extra(BigInt::from(19)).unwrap();
        assert_eq!(compute_nr(&padded).unwrap(), table);
    }

    #[test]
    fn stats_examples() {
        let b = stats_from_nr(&compute_nr(&t(&[5, 9, 11])).unwrap(), 2).unwrap();
        assert_eq!(b.g, Some(BigInt::from(17)));
        assert_eq!(b.n, Some(BigInt::from(10)));
        assert_eq!(b.s, Some(BigInt::from(73)));
        assert_eq!(b.s_mu[&2], BigInt::from(781));

        let b = stats_from_nr(&compute_nr(&t(&[5, 16, 19, 22])).unwrap(), 1).unwrap();
        assert_eq!(b.g, Some(BigInt::from(33)));
        assert_eq!(b.n, Some(BigInt::from(17)));
        assert_eq!(b.s, Some(BigInt::from(209)));

        let b = stats_from_nr(&compute_nr(&t(&[2, 3])).unwrap(), 1).unwrap();
        assert_eq!(b.g, Some(BigInt::one()));
        assert_eq!(b.n, Some(BigInt::one()));
        assert_eq!(b.s, Some(BigInt::one()));
    }

    #[test]
    fn agrees_with_oracle_on_random_tuples() {
        // Deterministic pseudo-random sweep; the heavier randomized sweep
        // lives in the integration suite.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move |range: u64| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) % range
        };
        let mut done = 0;
        while done < 40 {
            let n = 2 + next(3) as usize;
            let elems: Vec<u64> = (0..=n).map(|_| 2 + next(290)).collect();
            let Ok(tuple) = Tuple::from_u64s(&elems) else { continue };
            let nr = stats_from_nr(&compute_nr(&tuple).unwrap(), 4).unwrap();
            let or = oracle::oracle_stats(&tuple, 4, &[]).unwrap();
            assert!(
                nr.disagreements(&or).is_empty(),
                "mismatch on {tuple}: {:?}",
                nr.disagreements(&or)
            );
            done += 1;
        }
    }

    #[test]
    fn min_modulus_wrapper() {
        let tuple = t(&[9, 4, 11]);
        let table = compute_nr_min_modulus(&tuple).unwrap();
        assert_eq!(table.modulus(), 4);
        let direct = stats_from_nr(&compute_nr(&tuple).unwrap(), 1).unwrap();
        let rotated = stats_from_nr(&table, 1).unwrap();
        assert!(direct.disagreements(&rotated).is_empty());
    }

    #[test]
    fn huge_generator_path() {
        // Forces the BigInt fallback: generators far beyond u64.
        let big1: BigInt = BigInt::from(10).pow(30) + 1; // ≡ 1 mod 5
        let big3: BigInt = BigInt::from(10).pow(30) + 3; // ≡ 3 mod 5
        let tuple = Tuple::new(vec![BigInt::from(5), big1.clone(), big3.clone()]).unwrap();
        let table = compute_nr(&tuple).unwrap();
        table.validate().unwrap();
        assert_eq!(table.values()[1], big1);
        assert_eq!(table.values()[3], big3);
        assert_eq!(table.values()[2], &big1 + &big1);
        assert_eq!(table.values()[4], &big1 + &big3);
    }

    #[test]
    fn permute_preserves_multiset() {
        for a in [5u64, 7, 9] {
            let tuple = match a {
                5 => t(&[5, 9, 11]),
                7 => t(&[7, 8, 9]),
                _ => t(&[9, 10, 12]),
            };
            let table = compute_nr(&tuple).unwrap();
            for d in 1..(2 * a) {
                let d_big = BigInt::from(d);
                if num_integer::gcd(d, a) != 1 {
                    assert!(residue_permute(&table, &d_big).is_err());
                    continue;
                }
                let p = residue_permute(&table, &d_big).unwrap();
                let mut original: Vec<_> = table.values().to_vec();
                let mut permuted: Vec<_> = p.values().to_vec();
                original.sort();
                permuted.sort();
                assert_eq!(original, permuted, "a={a}, d={d}");
            }
        }
    }

    #[test]
    fn permute_identity() {
        let table = compute_nr(&t(&[7, 8, 9])).unwrap();
        assert_eq!(residue_permute(&table, &BigInt::one()).unwrap(), table);
        // d = 3: position r holds N_{3r mod 7}.
        let p = residue_permute(&table, &BigInt::from(3)).unwrap();
        assert_eq!(p.values()[1], table.values()[3]);
        assert_eq!(p.values()[2], table.values()[6]);
    }

    #[test]
    fn json_round_trip() {
        let table = compute_nr(&t(&[5, 9, 11])).unwrap();
        let json = table.to_json();
        assert_eq!(json["modulus"], serde_json::json!(5));
        let back = NrTable::from_json(&json).unwrap();
        assert_eq!(back, table);

        // Corrupted congruence is rejected on parse.
        let bad = serde_json::json!({"modulus": 3, "values": [0, 5, 2]});
        assert!(NrTable::from_json(&bad).is_err());
    }
}
