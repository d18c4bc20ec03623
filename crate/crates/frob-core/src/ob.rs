//! The minimization O_B(M) = min { Σxᵢ : Σbᵢxᵢ = M, xᵢ ≥ 0 } and the
//! reduction that turns it into residue-table entries for tuples of the
//! form (a, ha+db₁, …, ha+db_k):
//!
//!   N_{dr} = min over m of  O_B(ma+r)·ha + (ma+r)·d.
//!
//! A general dynamic program solves any unsigned instance; per-family closed
//! forms (with constructive witnesses) cover the shapes of B the formulas
//! need, and must agree with the DP everywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An O_B instance: the positive, strictly increasing list B, or the signed
/// variant min { x₁+x₂ : x₂−x₁ = M } over all integers M.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObProblem {
    b: Vec<BigInt>,
    signed: bool,
}

impl ObProblem {
    pub fn new(b: Vec<BigInt>) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::Domain("B must be nonempty".into()));
        }
        for (i, v) in b.iter().enumerate() {
            if !v.is_positive() {
                return Err(Error::Domain(format!("B must be positive, got {v}")));
            }
            if i > 0 && b[i - 1] >= *v {
                return Err(Error::Domain("B must be strictly increasing".into()));
            }
        }
        Ok(ObProblem { b, signed: false })
    }

    pub fn from_u64s(b: &[u64]) -> Result<Self> {
        Self::new(b.iter().map(|&v| BigInt::from(v)).collect())
    }

    /// The signed two-variable problem min { x₁+x₂ : x₂−x₁ = M }.
    pub fn signed_difference() -> Self {
        ObProblem {
            b: vec![BigInt::from(-1), BigInt::one()],
            signed: true,
        }
    }

    pub fn b(&self) -> &[BigInt] {
        &self.b
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Outcome of one minimization: the optimum with a witness, or infeasible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObSolution {
    Feasible { value: BigInt, witness: Vec<BigInt> },
    Infeasible,
}

impl ObSolution {
    pub fn value(&self) -> Option<&BigInt> {
        match self {
            ObSolution::Feasible { value, .. } => Some(value),
            ObSolution::Infeasible => None,
        }
    }

    pub fn witness(&self) -> Option<&[BigInt]> {
        match self {
            ObSolution::Feasible { witness, .. } => Some(witness),
            ObSolution::Infeasible => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, ObSolution::Feasible { .. })
    }

    /// Check the witness against its two defining equations.
    pub fn verify(&self, problem: &ObProblem, m: &BigInt) -> Result<()> {
        let ObSolution::Feasible { value, witness } = self else {
            return Ok(());
        };
        if witness.len() != problem.b().len() {
            return Err(Error::Internal(format!(
                "witness length {} vs k = {}",
                witness.len(),
                problem.b().len()
            )));
        }
        let mut weighted = BigInt::zero();
        let mut total = BigInt::zero();
        for (x, b) in witness.iter().zip(problem.b()) {
            if x.is_negative() {
                return Err(Error::Internal(format!("negative witness entry {x}")));
            }
            weighted += x * b;
            total += x;
        }
        if &weighted != m || &total != value {
            return Err(Error::Internal(format!(
                "witness sums to ({weighted}, {total}), expected ({m}, {value})"
            )));
        }
        Ok(())
    }
}

fn feasible(value: impl Into<BigInt>, witness: Vec<BigInt>) -> ObSolution {
    ObSolution::Feasible {
        value: value.into(),
        witness,
    }
}

/// Exact minimum by unbounded-knapsack dynamic programming over 0..=M, with
/// the witness reconstructed from parent pointers. Unsigned problems only.
pub fn ob_general(problem: &ObProblem, m: &BigInt) -> Result<ObSolution> {
    if problem.is_signed() {
        return Err(Error::Domain(
            "the signed problem is solved by its closed form, not the DP".into(),
        ));
    }
    if m.is_negative() {
        return Err(Error::Domain(format!("M must be >= 0, got {m}")));
    }
    let target = m
        .to_usize()
        .ok_or_else(|| Error::ResourceCap(format!("M = {m} too large for the DP table")))?;

    let coins: Vec<(usize, usize)> = problem
        .b()
        .iter()
        .enumerate()
        .filter_map(|(i, b)| b.to_usize().filter(|&v| v <= target).map(|v| (i, v)))
        .collect();

    const INF: u64 = u64::MAX;
    let mut best = vec![INF; target + 1];
    let mut parent: Vec<u32> = vec![u32::MAX; target + 1];
    best[0] = 0;
    for &(idx, coin) in &coins {
        for v in coin..=target {
            if best[v - coin] != INF && best[v - coin] + 1 < best[v] {
                best[v] = best[v - coin] + 1;
                parent[v] = idx as u32;
            }
        }
    }
    if best[target] == INF {
        return Ok(ObSolution::Infeasible);
    }
    let mut witness = vec![BigInt::zero(); problem.len()];
    let mut v = target;
    while v > 0 {
        let idx = parent[v] as usize;
        witness[idx] += 1;
        v -= problem.b()[idx].to_usize().unwrap();
    }
    Ok(feasible(best[target], witness))
}

/// The B shapes with closed-form optima.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObFamily {
    /// B = (1, j), j > 2.
    OneJ { j: u64 },
    /// B = (1, 2, j), j ≥ 4.
    OneTwoJ { j: u64 },
    /// B = (1, a, a+1), a ≥ 2.
    OneAPlusOne { a: u64 },
    /// B = (1, 2, …, k), k ≥ 1.
    OneToK { k: u64 },
    /// B = (K+1, K+2, …, k) with 1 ≤ K ≤ (k−1)/2.
    TruncatedRange { kk: u64, k: u64 },
    /// B = (1, 3, 5, …, 2k+1), k ≥ 1.
    OddSteps { k: u64 },
    /// B = (1, 2, 4, …, 2k), k ≥ 1.
    EvenSteps { k: u64 },
    /// min { x₁+x₂ : x₂−x₁ = M } over signed M.
    SignedDifference,
}

impl ObFamily {
    pub fn problem(&self) -> Result<ObProblem> {
        self.check()?;
        match *self {
            ObFamily::OneJ { j } => ObProblem::from_u64s(&[1, j]),
            ObFamily::OneTwoJ { j } => ObProblem::from_u64s(&[1, 2, j]),
            ObFamily::OneAPlusOne { a } => ObProblem::from_u64s(&[1, a, a + 1]),
            ObFamily::OneToK { k } => ObProblem::new((1..=k).map(BigInt::from).collect()),
            ObFamily::TruncatedRange { kk, k } => {
                ObProblem::new((kk + 1..=k).map(BigInt::from).collect())
            }
            ObFamily::OddSteps { k } => {
                ObProblem::new((0..=k).map(|i| BigInt::from(2 * i + 1)).collect())
            }
            ObFamily::EvenSteps { k } => {
                let mut b = vec![BigInt::one()];
                b.extend((1..=k).map(|i| BigInt::from(2 * i)));
                ObProblem::new(b)
            }
            ObFamily::SignedDifference => Ok(ObProblem::signed_difference()),
        }
    }

    fn check(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Precondition(msg));
        match *self {
            ObFamily::OneJ { j } if j <= 2 => fail(format!("B=(1,j) needs j > 2, got j={j}")),
            ObFamily::OneTwoJ { j } if j < 4 => fail(format!("B=(1,2,j) needs j >= 4, got j={j}")),
            ObFamily::OneAPlusOne { a } if a < 2 => {
                fail(format!("B=(1,a,a+1) needs a >= 2, got a={a}"))
            }
            ObFamily::OneToK { k } if k < 1 => fail("B=(1..k) needs k >= 1".into()),
            ObFamily::TruncatedRange { kk, k } if kk < 1 || 2 * kk > k.saturating_sub(1) => fail(
                format!("B=(K+1..k) needs 1 <= K <= (k-1)/2, got K={kk}, k={k}"),
            ),
            ObFamily::OddSteps { k } if k < 1 => fail("B=(1,3,..,2k+1) needs k >= 1".into()),
            ObFamily::EvenSteps { k } if k < 1 => fail("B=(1,2,4,..,2k) needs k >= 1".into()),
            _ => Ok(()),
        }
    }
}

/// Closed-form optimum for one of the supported families, witness included.
/// Must agree with [`ob_general`] on every feasible unsigned input.
pub fn ob_closed_form(family: &ObFamily, m: &BigInt) -> Result<ObSolution> {
    family.check()?;
    if *family != ObFamily::SignedDifference {
        if m.is_negative() {
            return Err(Error::Domain(format!("M must be >= 0, got {m}")));
        }
        if m.is_zero() {
            let k = family.problem()?.len();
            return Ok(feasible(0u32, vec![BigInt::zero(); k]));
        }
    }
    Ok(match *family {
        ObFamily::OneJ { j } => {
            // M = sj + r1: take s copies of j, r1 copies of 1.
            let (s, r1) = m.div_rem(&BigInt::from(j));
            feasible(&r1 + &s, vec![r1, s])
        }
        ObFamily::OneTwoJ { j } => {
            // M = sj + r1: s copies of j, then cover r1 by 2s and at most one 1.
            let (s, r1) = m.div_rem(&BigInt::from(j));
            let (half, odd) = r1.div_rem(&BigInt::from(2));
            let value = &s + &half + &odd;
            feasible(value, vec![odd, half, s])
        }
        ObFamily::OneAPlusOne { a } => {
            let a_big = BigInt::from(a);
            let (s, r1) = m.div_rem(&(&a_big + 1));
            if !r1.is_zero() && *m >= &a_big * (&s + 1) {
                // M = (s - a + r1)(a+1) + (a - r1 + 1)a
                let x2 = &a_big - &r1 + 1;
                let x3 = &s - &a_big + &r1;
                feasible(&s + 1, vec![BigInt::zero(), x2, x3])
            } else {
                feasible(&s + &r1, vec![r1, BigInt::zero(), s])
            }
        }
        ObFamily::OneToK { k } => {
            // M = sk + t with 1 <= t <= k gives O = s + 1.
            let (s, t) = div_rem_shifted(m, k);
            let mut witness = vec![BigInt::zero(); k as usize];
            witness[k as usize - 1] = s.clone();
            witness[t as usize - 1] += 1;
            feasible(&s + 1, witness)
        }
        ObFamily::TruncatedRange { kk, k } => {
            let (s, t) = div_rem_shifted(m, k);
            let width = (k - kk) as usize;
            let mut witness = vec![BigInt::zero(); width];
            if t > kk {
                // One piece of size t plus s pieces of size k.
                witness[width - 1] = s.clone();
                witness[(t - kk) as usize - 1] += 1;
                feasible(&s + 1, witness)
            } else if s.is_zero() {
                ObSolution::Infeasible
            } else {
                // M = (s-1)k + (K+1) + (k+t-K-1); the second piece has
                // zero-based slot (k+t-K-1) - (K+1) = k+t-2K-2.
                witness[width - 1] = &s - 1;
                witness[0] += 1;
                witness[(k + t - 2 * kk) as usize - 2] += 1;
                feasible(&s + 1, witness)
            }
        }
        ObFamily::OddSteps { k } => {
            // M = (2k+1)s + t with 1 <= t <= 2k+1.
            let (s, t) = div_rem_shifted(m, 2 * k + 1);
            let mut witness = vec![BigInt::zero(); k as usize + 1];
            witness[k as usize] = s.clone();
            if t % 2 == 1 {
                witness[((t - 1) / 2) as usize] += 1;
                feasible(&s + 1, witness)
            } else {
                witness[((t - 2) / 2) as usize] += 1;
                witness[0] += 1;
                feasible(&s + 2, witness)
            }
        }
        ObFamily::EvenSteps { k } => {
            // M = 2ks + t with 1 <= t <= 2k; slots are (1, 2, 4, ..., 2k).
            let (s, t) = div_rem_shifted(m, 2 * k);
            let mut witness = vec![BigInt::zero(); k as usize + 1];
            witness[k as usize] = s.clone();
            if t % 2 == 0 {
                witness[(t / 2) as usize] += 1;
                feasible(&s + 1, witness)
            } else if t == 1 {
                witness[0] += 1;
                feasible(&s + 1, witness)
            } else {
                witness[((t - 1) / 2) as usize] += 1;
                witness[0] += 1;
                feasible(&s + 2, witness)
            }
        }
        ObFamily::SignedDifference => {
            // x1 + x2 = |M|, at x1 = 0 for M >= 0 and x2 = 0 for M < 0.
            if m.is_negative() {
                feasible(-m, vec![-m, BigInt::zero()])
            } else {
                feasible(m.clone(), vec![BigInt::zero(), m.clone()])
            }
        }
    })
}

/// Write M ≥ 1 as q·k + t with 1 ≤ t ≤ k (the shifted Euclidean split the
/// proofs use).
fn div_rem_shifted(m: &BigInt, k: u64) -> (BigInt, u64) {
    let (mut q, mut t) = m.div_rem(&BigInt::from(k));
    if t.is_zero() {
        q -= 1;
        t = BigInt::from(k);
    }
    (q, t.to_u64().unwrap())
}

/// Result of scanning the reduction over m.
#[derive(Clone, Debug)]
pub struct NdrOutcome {
    /// min over scanned m of N(m) = O_B(ma+r)·ha + (ma+r)d.
    pub value: BigInt,
    /// The m attaining the minimum.
    pub argmin: i64,
    /// Whether N(m) was non-decreasing across the scanned feasible m ≥ 0
    /// (the monotonicity the closed-form proofs rely on).
    pub monotone_observed: bool,
}

/// Default scan bound: generous for every family the formulas cover.
pub fn default_m_cap(problem: &ObProblem, a: u64) -> usize {
    let max_b = problem
        .b()
        .iter()
        .map(|b| b.magnitude().to_u64().unwrap_or(u64::MAX))
        .max()
        .unwrap_or(1);
    (2 + max_b.div_ceil(a.max(1)) as usize * problem.len()).max(4)
}

/// Evaluate N_{dr} through the reduction: scan m (0..=cap unsigned;
/// −cap..=cap signed), solve O_B(ma+r) for each, and minimize
/// O_B(ma+r)·ha + (ma+r)d over the feasible ones.
pub fn ndr_via_reduction(
    a: u64,
    h: &BigInt,
    d: &BigInt,
    problem: &ObProblem,
    r: u64,
    m_cap: usize,
) -> Result<NdrOutcome> {
    if r >= a {
        return Err(Error::Domain(format!(
            "residue {r} out of range for a = {a}"
        )));
    }
    if !h.is_positive() {
        return Err(Error::Domain(format!("h must be >= 1, got {h}")));
    }
    let ha = h * BigInt::from(a);
    let ms: Vec<i64> = if problem.is_signed() {
        (-(m_cap as i64)..=m_cap as i64).collect()
    } else {
        (0..=m_cap as i64).collect()
    };

    let mut best: Option<(BigInt, i64)> = None;
    let mut monotone = true;
    let mut last_nonneg: Option<BigInt> = None;
    for m in ms {
        let big_m = BigInt::from(m) * BigInt::from(a) + BigInt::from(r);
        let solution = if problem.is_signed() {
            ob_closed_form(&ObFamily::SignedDifference, &big_m)?
        } else {
            ob_general(problem, &big_m)?
        };
        let Some(value) = solution.value() else {
            continue;
        };
        let n_m = value * &ha + &big_m * d;
        if m >= 0 {
            if let Some(prev) = &last_nonneg {
                if &n_m < prev {
                    monotone = false;
                }
            }
            last_nonneg = Some(n_m.clone());
        }
        if best.as_ref().map_or(true, |(b, _)| &n_m < b) {
            best = Some((n_m, m));
        }
    }
    let (value, argmin) = best.ok_or(Error::Unresolved(m_cap))?;
    Ok(NdrOutcome {
        value,
        argmin,
        monotone_observed: monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nr::compute_nr;
    use crate::tuple::Tuple;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn general_dp_examples() {
        let p = ObProblem::from_u64s(&[1, 4]).unwrap();
        let sol = ob_general(&p, &big(10)).unwrap();
        assert_eq!(sol.value(), Some(&big(4)));
        assert_eq!(sol.witness(), Some(&[big(2), big(2)][..]));
        sol.verify(&p, &big(10)).unwrap();

        let p = ObProblem::from_u64s(&[1, 4, 5]).unwrap();
        let sol = ob_general(&p, &big(8)).unwrap();
        assert_eq!(sol.value(), Some(&big(2)));
        assert_eq!(sol.witness(), Some(&[big(0), big(2), big(0)][..]));

        let sol = ob_general(&p, &BigInt::zero()).unwrap();
        assert_eq!(sol.value(), Some(&BigInt::zero()));
        assert_eq!(sol.witness(), Some(&[big(0), big(0), big(0)][..]));
    }

    #[test]
    fn general_dp_infeasible() {
        let p = ObProblem::from_u64s(&[3, 5]).unwrap();
        assert_eq!(ob_general(&p, &big(4)).unwrap(), ObSolution::Infeasible);
        assert_eq!(ob_general(&p, &big(7)).unwrap(), ObSolution::Infeasible);
        assert!(ob_general(&p, &big(8)).unwrap().is_feasible());
    }

    #[test]
    fn rejects_bad_problems() {
        assert!(ObProblem::from_u64s(&[]).is_err());
        assert!(ObProblem::from_u64s(&[2, 2]).is_err());
        assert!(ObProblem::from_u64s(&[3, 2]).is_err());
        assert!(ob_general(&ObProblem::signed_difference(), &big(3)).is_err());
        let p = ObProblem::from_u64s(&[1, 2]).unwrap();
        assert!(ob_general(&p, &big(-1)).is_err());
    }

    #[test]
    fn closed_form_examples() {
        // B=(1,2,j), j=5, M=13: floor(13/5) + ceil(3/2) = 4.
        let sol = ob_closed_form(&ObFamily::OneTwoJ { j: 5 }, &big(13)).unwrap();
        assert_eq!(sol.value(), Some(&big(4)));

        // B=(1..k), k=3, M=7: ceil(7/3) = 3.
        let sol = ob_closed_form(&ObFamily::OneToK { k: 3 }, &big(7)).unwrap();
        assert_eq!(sol.value(), Some(&big(3)));

        // B=(1,a,a+1), a=4, M=8: (a+1) does not divide 8 and
        // 8 >= 4*(floor(8/5)+1) = 8, so O = 1 + floor(8/5) = 2.
        let sol = ob_closed_form(&ObFamily::OneAPlusOne { a: 4 }, &big(8)).unwrap();
        assert_eq!(sol.value(), Some(&big(2)));
    }

    #[test]
    fn closed_form_rejects_bad_params() {
        assert!(ob_closed_form(&ObFamily::OneJ { j: 2 }, &big(5)).is_err());
        assert!(ob_closed_form(&ObFamily::OneTwoJ { j: 3 }, &big(5)).is_err());
        assert!(ob_closed_form(&ObFamily::TruncatedRange { kk: 2, k: 4 }, &big(5)).is_err());
    }

    #[test]
    fn signed_closed_form() {
        let sol = ob_closed_form(&ObFamily::SignedDifference, &big(7)).unwrap();
        assert_eq!(sol.value(), Some(&big(7)));
        assert_eq!(sol.witness(), Some(&[big(0), big(7)][..]));
        let sol = ob_closed_form(&ObFamily::SignedDifference, &big(-4)).unwrap();
        assert_eq!(sol.value(), Some(&big(4)));
        assert_eq!(sol.witness(), Some(&[big(4), big(0)][..]));
    }

    /// Every closed form equals the DP (value for value), and every witness
    /// checks out, across small parameter grids and all M <= 500.
    #[test]
    fn closed_forms_match_dp() {
        let mut families: Vec<ObFamily> = Vec::new();
        families.extend((3..=9).map(|j| ObFamily::OneJ { j }));
        families.extend((4..=9).map(|j| ObFamily::OneTwoJ { j }));
        families.extend((2..=8).map(|a| ObFamily::OneAPlusOne { a }));
        families.extend((1..=8).map(|k| ObFamily::OneToK { k }));
        for k in 3..=9 {
            for kk in 1..=(k - 1) / 2 {
                families.push(ObFamily::TruncatedRange { kk, k });
            }
        }
        families.extend((1..=4).map(|k| ObFamily::OddSteps { k }));
        families.extend((1..=4).map(|k| ObFamily::EvenSteps { k }));

        for family in families {
            let problem = family.problem().unwrap();
            for m in 0..=500i64 {
                let m_big = big(m);
                let closed = ob_closed_form(&family, &m_big).unwrap();
                let general = ob_general(&problem, &m_big).unwrap();
                assert_eq!(
                    closed.value(),
                    general.value(),
                    "{family:?}, M={m}: closed {closed:?} vs dp {general:?}"
                );
                closed.verify(&problem, &m_big).unwrap();
                general.verify(&problem, &m_big).unwrap();
            }
        }
    }

    #[test]
    fn ndr_examples() {
        // (7,8,9): B=(1,2), h=d=1. The formula ha*ceil(r/k)+dr gives
        // 7*3+5 = 26 for r=5, matching the brute-force table.
        let p = ObProblem::from_u64s(&[1, 2]).unwrap();
        let out = ndr_via_reduction(7, &big(1), &big(1), &p, 5, 3).unwrap();
        assert_eq!(out.value, big(26));
        assert!(out.monotone_observed);

        // (5,11) pair: B=(1), h=2, d=1, r=2 -> O=2, N = 2*10 + 2 = 22.
        let p = ObProblem::from_u64s(&[1]).unwrap();
        let out = ndr_via_reduction(5, &big(2), &big(1), &p, 2, 3).unwrap();
        assert_eq!(out.value, big(22));

        // r = 0 always gives 0.
        let out = ndr_via_reduction(5, &big(2), &big(1), &p, 0, 3).unwrap();
        assert_eq!(out.value, BigInt::zero());
    }

    #[test]
    fn ndr_unresolved_when_all_infeasible() {
        // B=(5,6), a=6, r=1: M = 1, 7, 13, 19 are all infeasible; the first
        // feasible value is M = 25 = 5*5 at m = 4. A cap of 3 must fail.
        let p = ObProblem::from_u64s(&[5, 6]).unwrap();
        let err = ndr_via_reduction(6, &big(1), &big(1), &p, 1, 3).unwrap_err();
        assert!(matches!(err, Error::Unresolved(_)));
        let out = ndr_via_reduction(6, &big(1), &big(1), &p, 1, 4).unwrap();
        assert_eq!(out.argmin, 4);
    }

    /// Lemma-style end-to-end check: the reduction reproduces the residue
    /// table computed directly, for arithmetic-family instances.
    #[test]
    fn ndr_matches_residue_table() {
        for (a, h, d, k) in [(7u64, 1i64, 1i64, 2u64), (9, 2, 1, 3), (10, 1, 3, 4), (11, 3, 2, 2)]
        {
            let problem = ObProblem::new((1..=k).map(BigInt::from).collect()).unwrap();
            let elements: Vec<BigInt> = std::iter::once(BigInt::from(a))
                .chain((1..=k).map(|i| big(h) * a + big(d) * i as i64))
                .collect();
            let tuple = Tuple::new(elements).unwrap();
            let table = compute_nr(&tuple).unwrap();
            let cap = default_m_cap(&problem, a);
            for r in 0..a {
                let out = ndr_via_reduction(a, &big(h), &big(d), &problem, r, cap).unwrap();
                let dr = ((big(d) * r) % a).to_u64().unwrap();
                assert_eq!(
                    out.value,
                    table.values()[dr as usize],
                    "a={a}, h={h}, d={d}, k={k}, r={r}"
                );
                assert!(out.monotone_observed, "a={a}, h={h}, d={d}, k={k}, r={r}");
            }
        }
    }

    /// The signed reduction covers (a, ha−d, ha+d).
    #[test]
    fn signed_reduction_matches_residue_table() {
        for (a, h, d) in [(5u64, 2i64, 1i64), (7, 1, 2), (9, 2, 5), (8, 3, 1)] {
            if num_integer::gcd(a as i64, d) != 1 || big(h) * a as i64 - d <= big(1) {
                continue;
            }
            let tuple = Tuple::new(vec![
                BigInt::from(a),
                big(h) * a as i64 - d,
                big(h) * a as i64 + d,
            ])
            .unwrap();
            let table = compute_nr(&tuple).unwrap();
            let problem = ObProblem::signed_difference();
            for r in 0..a {
                let out = ndr_via_reduction(a, &big(h), &big(d), &problem, r, 3).unwrap();
                let dr = ((big(d) * r) % a).to_u64().unwrap();
                assert_eq!(
                    out.value,
                    table.values()[dr as usize],
                    "a={a} h={h} d={d} r={r}"
                );
            }
        }
    }
}
