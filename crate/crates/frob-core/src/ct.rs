//! Constant-term evaluation of sums of simple rational functions.
//!
//! A [`RationalTerm`] denotes L(x)/∏ⱼ(1−x^{bⱼ}) with a Laurent-polynomial
//! numerator. Substituting x = λ·e^t turns each term into a Laurent series
//! in t whose pole order is the number of factors with λ^{bⱼ} = 1; each such
//! factor contributes the exact series of t/(1−e^{bⱼt}) and each regular
//! factor the series of 1/(1−λ^{bⱼ}e^{bⱼt}). Multiplying out to the pole
//! order and reading one coefficient gives the exact value of the sum at λ
//! (for λ = 1: the value the polynomial it denotes takes there), provided
//! the negative orders of the *total* cancel — which is asserted, not
//! assumed.
//!
//! Differentiation is closed over this representation: d/dx (1−x^b)^{−1} =
//! b·x^{b−1}(1−x^b)^{−2}, so denominators stay factor multisets forever.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::{expect_integer, factorial, rat, rational_pow, stirling2};
use crate::series::{series_regular_factor, series_t_over_one_minus_exp, TruncatedSeries};
use crate::stats::{Engine, LambdaSums, StatBundle};

/// A Laurent polynomial: finitely many exponents (possibly negative, of
/// arbitrary size) with nonzero rational coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<BigInt, BigRational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(BigInt::zero(), BigRational::one())
    }

    pub fn monomial(exponent: BigInt, coeff: BigRational) -> Self {
        let mut p = LaurentPoly::default();
        p.add_term(exponent, coeff);
        p
    }

    /// x^e with coefficient 1.
    pub fn power(exponent: impl Into<BigInt>) -> Self {
        LaurentPoly::monomial(exponent.into(), BigRational::one())
    }

    /// 1 − x^e. For e = 0 this is the zero polynomial, which several family
    /// constructions rely on to drop empty geometric blocks.
    pub fn one_minus_power(exponent: impl Into<BigInt>) -> Self {
        let mut p = LaurentPoly::one();
        p.add_term(exponent.into(), -BigRational::one());
        p
    }

    pub fn add_term(&mut self, exponent: BigInt, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exponent) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigInt, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exponent(&self) -> Option<&BigInt> {
        self.terms.keys().next()
    }

    pub fn max_exponent(&self) -> Option<&BigInt> {
        self.terms.keys().last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = LaurentPoly::default();
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c * factor))
                .collect(),
        }
    }

    /// Formal derivative: Σ c·e·x^{e−1}.
    pub fn derivative(&self) -> Self {
        let mut out = LaurentPoly::default();
        for (e, c) in self.terms() {
            out.add_term(e - BigInt::one(), c * rat(e));
        }
        out
    }

    /// Exact evaluation at a nonzero rational point.
    pub fn eval(&self, x: &BigRational) -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for (e, c) in self.terms() {
            acc += c * rational_pow(x, e)?;
        }
        Ok(acc)
    }
}

/// One summand L(x)/∏ⱼ(1−x^{bⱼ}). The denominator is a multiset of
/// exponents; repetition encodes powers of a factor.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalTerm {
    numerator: LaurentPoly,
    denominators: Vec<BigInt>,
}

impl RationalTerm {
    pub fn new(numerator: LaurentPoly, mut denominators: Vec<BigInt>) -> Result<Self> {
        if denominators.iter().any(|b| b.is_zero()) {
            return Err(Error::Domain("denominator exponent b = 0".into()));
        }
        denominators.sort();
        Ok(RationalTerm {
            numerator,
            denominators,
        })
    }

    /// A plain (Laurent-)polynomial term.
    pub fn polynomial(numerator: LaurentPoly) -> Self {
        RationalTerm {
            numerator,
            denominators: Vec::new(),
        }
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.numerator
    }

    pub fn denominators(&self) -> &[BigInt] {
        &self.denominators
    }

    /// Worst-case pole order at x = 1.
    pub fn pole_order(&self) -> usize {
        self.denominators.len()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut denominators = self.denominators.clone();
        denominators.extend_from_slice(&other.denominators);
        denominators.sort();
        RationalTerm {
            numerator: self.numerator.mul(&other.numerator),
            denominators,
        }
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        RationalTerm {
            numerator: self.numerator.scale(factor),
            denominators: self.denominators.clone(),
        }
    }

    /// d/dx of this term, as the sum of one term per product factor.
    pub fn derivative(&self) -> Vec<RationalTerm> {
        let mut out = Vec::new();
        let d_num = self.numerator.derivative();
        if !d_num.is_zero() {
            out.push(RationalTerm {
                numerator: d_num,
                denominators: self.denominators.clone(),
            });
        }
        // Group repeated factors: c copies of (1-x^b) differentiate to
        // c * b x^{b-1} times one extra copy of the factor.
        let mut i = 0;
        while i < self.denominators.len() {
            let b = &self.denominators[i];
            let mut count = 0usize;
            while i + count < self.denominators.len() && &self.denominators[i + count] == b {
                count += 1;
            }
            let factor = LaurentPoly::monomial(b - BigInt::one(), rat(b) * rat(&BigInt::from(count)));
            let numerator = self.numerator.mul(&factor);
            if !numerator.is_zero() {
                let mut denominators = self.denominators.clone();
                denominators.push(b.clone());
                denominators.sort();
                out.push(RationalTerm {
                    numerator,
                    denominators,
                });
            }
            i += count;
        }
        out
    }
}

/// A finite sum of rational terms — the working representation of f(x),
/// g(x), and their x-derivatives.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RationalTermSum {
    terms: Vec<RationalTerm>,
}

impl RationalTermSum {
    pub fn new(terms: Vec<RationalTerm>) -> Self {
        RationalTermSum { terms }
    }

    pub fn from_term(term: RationalTerm) -> Self {
        RationalTermSum { terms: vec![term] }
    }

    pub fn terms(&self) -> &[RationalTerm] {
        &self.terms
    }

    pub fn push(&mut self, term: RationalTerm) {
        self.terms.push(term);
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        RationalTermSum { terms }
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        RationalTermSum {
            terms: self.terms.iter().map(|t| t.scale(factor)).collect(),
        }
    }

    /// Distribute a product of sums termwise.
    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.mul(b));
            }
        }
        RationalTermSum { terms }.compacted()
    }

    /// Merge terms that share a denominator multiset and drop zero
    /// numerators. Purely a size optimization; the denoted function is
    /// unchanged.
    pub fn compacted(&self) -> Self {
        let mut grouped: BTreeMap<Vec<BigInt>, LaurentPoly> = BTreeMap::new();
        for t in &self.terms {
            match grouped.entry(t.denominators().to_vec()) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(t.numerator().clone());
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let merged = e.get().add(t.numerator());
                    *e.get_mut() = merged;
                }
            }
        }
        let terms = grouped
            .into_iter()
            .filter(|(_, num)| !num.is_zero())
            .map(|(denominators, numerator)| RationalTerm {
                numerator,
                denominators,
            })
            .collect();
        RationalTermSum { terms }
    }
}

/// The x-derivative of a sum, term by term.
pub fn differentiate(sum: &RationalTermSum) -> RationalTermSum {
    let mut terms = Vec::new();
    for t in sum.terms() {
        terms.extend(t.derivative());
    }
    RationalTermSum::new(terms).compacted()
}

/// Per-λ cache of factor data: within one evaluation (or one statistics
/// pipeline) the same factors and factor products recur across many terms.
#[derive(Default)]
struct SeriesCache {
    factor: std::collections::HashMap<(BigInt, usize), TruncatedSeries>,
    product: std::collections::HashMap<(Vec<BigInt>, usize), TruncatedSeries>,
    powers: std::collections::HashMap<BigInt, BigRational>,
}

impl SeriesCache {
    /// λ^b, memoized.
    fn lambda_power(&mut self, lambda: &BigRational, b: &BigInt) -> Result<BigRational> {
        if let Some(q) = self.powers.get(b) {
            return Ok(q.clone());
        }
        let q = rational_pow(lambda, b)?;
        self.powers.insert(b.clone(), q.clone());
        Ok(q)
    }

    /// Series of the single factor for exponent b: t/(1−e^{bt}) at a pole,
    /// 1/(1−λ^b e^{bt}) otherwise.
    fn factor_series(
        &mut self,
        lambda: &BigRational,
        b: &BigInt,
        order: usize,
    ) -> Result<TruncatedSeries> {
        if let Some(s) = self.factor.get(&(b.clone(), order)) {
            return Ok(s.clone());
        }
        let q = self.lambda_power(lambda, b)?;
        let s = if q.is_one() {
            series_t_over_one_minus_exp(b, order)?
        } else {
            series_regular_factor(&q, b, order)?
        };
        self.factor.insert((b.clone(), order), s.clone());
        Ok(s)
    }

    /// Product of all factor series of a denominator multiset, to `order`.
    fn denominator_product(
        &mut self,
        lambda: &BigRational,
        dens: &[BigInt],
        order: usize,
    ) -> Result<TruncatedSeries> {
        let key = (dens.to_vec(), order);
        if let Some(s) = self.product.get(&key) {
            return Ok(s.clone());
        }
        let mut p = TruncatedSeries::one(order);
        for b in dens {
            p = p.mul(&self.factor_series(lambda, b, order)?);
        }
        self.product.insert(key, p.clone());
        Ok(p)
    }
}

/// Laurent coefficients of term(λ·e^t) for orders −m … extra, where m is the
/// number of denominator factors with λ^b = 1. Returned as (m, coefficients)
/// with coefficients[i] = coefficient of t^(i−m).
fn laurent_tail(
    term: &RationalTerm,
    lambda: &BigRational,
    extra: usize,
    cache: &mut SeriesCache,
) -> Result<(usize, Vec<BigRational>)> {
    if lambda.is_zero() {
        return Err(Error::Domain("evaluation at λ = 0 is excluded".into()));
    }
    let mut m = 0usize;
    for b in term.denominators() {
        if cache.lambda_power(lambda, b)?.is_one() {
            m += 1;
        }
    }
    let order = m + extra;
    let p = cache.denominator_product(lambda, term.denominators(), order)?;
    let d = numerator_series(term.numerator(), lambda, order)?;
    let product = d.mul(&p);
    let coeffs = (0..=order as i64).map(|n| product.coeff(n)).collect();
    Ok((m, coeffs))
}

/// D(t) = L(λ e^t) to the given order: d_n = (1/n!) Σ_e c_e λ^e eⁿ.
///
/// For λ = ±1 with integral coefficients (the common case: every family
/// construction and every derivative of one) the inner sums are accumulated
/// in plain big integers; rational reduction happens once per order.
fn numerator_series(
    num: &LaurentPoly,
    lambda: &BigRational,
    order: usize,
) -> Result<TruncatedSeries> {
    let plus_one = lambda.is_one();
    let minus_one = !plus_one && (lambda + BigRational::one()).is_zero();
    let all_integer = (plus_one || minus_one) && num.terms().all(|(_, c)| c.is_integer());

    if all_integer {
        let mut d_raw = vec![BigInt::zero(); order + 1];
        for (e, c) in num.terms() {
            let mut scale = c.to_integer();
            if minus_one && e.is_odd() {
                scale = -scale;
            }
            let mut epow = BigInt::one();
            for (n, slot) in d_raw.iter_mut().enumerate() {
                *slot += &scale * &epow;
                if n < order {
                    epow *= e;
                }
            }
        }
        return Ok(TruncatedSeries::new(
            0,
            d_raw
                .into_iter()
                .enumerate()
                .map(|(n, v)| BigRational::new(v, factorial(n)))
                .collect(),
        ));
    }

    let mut d_raw = vec![BigRational::zero(); order + 1];
    for (e, c) in num.terms() {
        let scale = c * rational_pow(lambda, e)?;
        if scale.is_zero() {
            continue;
        }
        let e_rat = rat(e);
        let mut epow = BigRational::one();
        for (n, slot) in d_raw.iter_mut().enumerate() {
            *slot += &scale * &epow;
            if n < order {
                epow *= &e_rat;
            }
        }
    }
    Ok(TruncatedSeries::new(
        0,
        d_raw
            .into_iter()
            .enumerate()
            .map(|(n, v)| v / rat(&factorial(n)))
            .collect(),
    ))
}

/// Constant term of the Laurent expansion of term(e^t), computed at exactly
/// the truncation order the pole structure demands.
pub fn ct_term(term: &RationalTerm) -> Result<BigRational> {
    ct_term_with_extra_order(term, 0)
}

/// Same constant term, computed with `extra` additional series orders; the
/// result must not depend on `extra` (used by the truncation-sufficiency
/// tests).
pub fn ct_term_with_extra_order(term: &RationalTerm, extra: usize) -> Result<BigRational> {
    let mut cache = SeriesCache::default();
    let (m, coeffs) = laurent_tail(term, &BigRational::one(), extra, &mut cache)?;
    Ok(coeffs[m].clone())
}

/// Value of the sum at x = 1 (equivalently CT_t of the sum at x = e^t).
///
/// Individual terms may have poles; the totals of every negative order must
/// cancel across terms, and this is checked before the order-0 total is
/// returned.
pub fn value_at_one(sum: &RationalTermSum) -> Result<BigRational> {
    value_at(sum, &BigRational::one())
}

/// Value of the sum at x = λ ≠ 0. For λ = 1 (or λ = −1 with even exponents
/// present) individual factors are singular and the same pole bookkeeping
/// applies; elsewhere this reduces to exact rational evaluation.
pub fn value_at(sum: &RationalTermSum, lambda: &BigRational) -> Result<BigRational> {
    let mut cache = SeriesCache::default();
    value_at_with_cache(sum, lambda, &mut cache)
}

fn value_at_with_cache(
    sum: &RationalTermSum,
    lambda: &BigRational,
    cache: &mut SeriesCache,
) -> Result<BigRational> {
    let mut tails = Vec::with_capacity(sum.terms().len());
    let mut m_max = 0usize;
    for term in sum.terms() {
        let (m, coeffs) = laurent_tail(term, lambda, 0, cache)?;
        m_max = m_max.max(m);
        tails.push((m, coeffs));
    }
    let mut acc = vec![BigRational::zero(); m_max + 1];
    for (m, coeffs) in tails {
        for (i, c) in coeffs.into_iter().enumerate() {
            acc[m_max - m + i] += c;
        }
    }
    for (i, c) in acc.iter().enumerate().take(m_max) {
        if !c.is_zero() {
            return Err(Error::Internal(format!(
                "sum has a pole at {lambda}: order -{} coefficient {c} does not cancel",
                m_max - i
            )));
        }
    }
    Ok(acc[m_max].clone())
}

/// Serialize a sum as `[{"num": [[exp, "p/q"], …], "den": [b₁, …]}, …]`.
pub fn sum_to_json(sum: &RationalTermSum) -> serde_json::Value {
    let terms: Vec<serde_json::Value> = sum
        .terms()
        .iter()
        .map(|t| {
            let num: Vec<serde_json::Value> = t
                .numerator()
                .terms()
                .map(|(e, c)| {
                    serde_json::Value::Array(vec![
                        crate::nr::bigint_to_json(e),
                        serde_json::Value::String(c.to_string()),
                    ])
                })
                .collect();
            let den: Vec<serde_json::Value> =
                t.denominators().iter().map(crate::nr::bigint_to_json).collect();
            serde_json::json!({ "num": num, "den": den })
        })
        .collect();
    serde_json::Value::Array(terms)
}

pub fn sum_from_json(v: &serde_json::Value) -> Result<RationalTermSum> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Domain("expected a JSON array of terms".into()))?;
    let mut terms = Vec::with_capacity(arr.len());
    for t in arr {
        let num_json = t
            .get("num")
            .and_then(|n| n.as_array())
            .ok_or_else(|| Error::Domain("term missing \"num\"".into()))?;
        let mut numerator = LaurentPoly::zero();
        for pair in num_json {
            let pair = pair
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::Domain("numerator entries are [exp, coeff] pairs".into()))?;
            let e = crate::nr::json_to_bigint(&pair[0])?;
            let c: BigRational = pair[1]
                .as_str()
                .ok_or_else(|| Error::Domain("coefficient must be a \"p/q\" string".into()))?
                .parse()
                .map_err(|_| Error::Domain(format!("bad coefficient {}", pair[1])))?;
            numerator.add_term(e, c);
        }
        let den = t
            .get("den")
            .and_then(|d| d.as_array())
            .ok_or_else(|| Error::Domain("term missing \"den\"".into()))?
            .iter()
            .map(crate::nr::json_to_bigint)
            .collect::<Result<Vec<_>>>()?;
        terms.push(RationalTerm::new(numerator, den)?);
    }
    Ok(RationalTermSum::new(terms))
}

/// Statistics from a rational-sum representation of f(x) = Σ_r x^{N_r}.
///
/// n and s come from f′(1) and f″(1); power sums, binomial moments, and
/// weighted power sums come from the derivatives of
/// g(x) = 1/(1−x) − f(x)/(1−x^a), assembled by the binomial Leibniz rule
/// with the derivatives of (1−x^a)^{−1} produced by repeated symbolic
/// differentiation. g(A) is *not* extracted here: the degree of a rational
/// sum is not read off its terms; it comes from the residue-table engine.
pub fn stats_via_ct(
    f: &RationalTermSum,
    a: u64,
    max_mu: u32,
    lambdas: &[BigRational],
) -> Result<StatBundle> {
    for l in lambdas {
        if l.is_zero() || l.is_one() {
            return Err(Error::Domain(format!(
                "weight λ = {l} is excluded (λ must avoid 0 and 1)"
            )));
        }
    }
    let a_rat = rat(&BigInt::from(a));
    let depth = max_mu.max(2) as usize;

    // f, f', f'', ..., up to the deepest derivative the Leibniz sums need.
    let mut f_derivs: Vec<RationalTermSum> = vec![f.clone()];
    for _ in 0..depth {
        f_derivs.push(differentiate(f_derivs.last().unwrap()));
    }

    let mut bundle = StatBundle::new(Engine::Ct);
    let one = BigRational::one();
    let mut cache_at_one = SeriesCache::default();
    let fp1 = value_at_with_cache(&f_derivs[1], &one, &mut cache_at_one)?;
    let fp2 = value_at_with_cache(&f_derivs[2], &one, &mut cache_at_one)?;

    let n = &fp1 / &a_rat - (&a_rat - BigRational::one()) / rat(&BigInt::from(2));
    bundle.n = Some(expect_integer(&n, "ct: n(A)")?);
    let s = &fp2 / (rat(&BigInt::from(2)) * &a_rat)
        - (&a_rat - BigRational::one()) / (rat(&BigInt::from(2)) * &a_rat) * &fp1
        + (&a_rat * &a_rat - BigRational::one()) / rat(&BigInt::from(12));
    bundle.s = Some(expect_integer(&s, "ct: s(A)")?);

    if max_mu == 0 && lambdas.is_empty() {
        return Ok(bundle);
    }

    // Derivatives of 1/(1-x^a), by repeated differentiation of the one-term
    // sum rather than a hand-derived formula.
    let inv_a = RationalTermSum::from_term(RationalTerm::new(
        LaurentPoly::one(),
        vec![BigInt::from(a)],
    )?);
    let mut inv_derivs: Vec<RationalTermSum> = vec![inv_a];
    for _ in 0..depth {
        inv_derivs.push(differentiate(inv_derivs.last().unwrap()));
    }

    // g^(k) = k!/(1-x)^{k+1} - sum_i C(k,i) (1/(1-x^a))^(i) f^(k-i).
    let mu_top = max_mu.max(1) as usize;
    let mut g_derivs: Vec<RationalTermSum> = Vec::with_capacity(mu_top + 1);
    for k in 0..=mu_top {
        let lead = RationalTerm::new(
            LaurentPoly::monomial(BigInt::zero(), rat(&factorial(k))),
            vec![BigInt::one(); k + 1],
        )?;
        let mut g_k = RationalTermSum::from_term(lead);
        for i in 0..=k {
            let c = rat(&crate::numeric::binomial_usize(k, i));
            let part = inv_derivs[i].mul(&f_derivs[k - i]).scale(&-c);
            g_k = g_k.add(&part);
        }
        g_derivs.push(g_k);
    }

    let mut g_at_one: Vec<BigRational> = Vec::with_capacity(mu_top + 1);
    for g_k in g_derivs.iter() {
        g_at_one.push(value_at_with_cache(g_k, &one, &mut cache_at_one)?);
    }
    // Route consistency: g(1) and g'(1) must reproduce n and s.
    if rat(bundle.n.as_ref().unwrap()) != g_at_one[0] {
        return Err(Error::Internal(format!(
            "g(1) = {} disagrees with n = {}",
            g_at_one[0],
            bundle.n.as_ref().unwrap()
        )));
    }
    if mu_top >= 1 && rat(bundle.s.as_ref().unwrap()) != g_at_one[1] {
        return Err(Error::Internal(format!(
            "g'(1) = {} disagrees with s = {}",
            g_at_one[1],
            bundle.s.as_ref().unwrap()
        )));
    }

    for mu in 1..=max_mu {
        let m = mu as usize;
        let mut acc = BigRational::zero();
        for k in 0..=m {
            acc += rat(&stirling2(m, k)) * &g_at_one[k];
        }
        bundle.s_mu.insert(mu, expect_integer(&acc, &format!("ct: s_{mu}(A)"))?);
        let shat = &g_at_one[m] / rat(&factorial(m));
        bundle
            .shat_mu
            .insert(mu, expect_integer(&shat, &format!("ct: shat_{mu}(A)"))?);
    }

    for lambda in lambdas {
        let mut cache = SeriesCache::default();
        let mut g_at_l: Vec<BigRational> = Vec::with_capacity(mu_top + 1);
        for g_k in g_derivs.iter().take(mu_top + 1) {
            g_at_l.push(value_at_with_cache(g_k, lambda, &mut cache)?);
        }
        let mut sums = BTreeMap::new();
        for mu in 1..=max_mu {
            let m = mu as usize;
            // Σ λ^n n^μ = Σ_k S(μ,k) λ^k g^(k)(λ): the chain rule puts a
            // λ^k next to each derivative, since Σ λ^n (n)_k x^{n-k} is the
            // k-th derivative of g(λx) in x, which is λ^k g^(k)(λx).
            let mut acc = BigRational::zero();
            let mut lpow = BigRational::one();
            for k in 0..=m {
                acc += rat(&stirling2(m, k)) * &lpow * &g_at_l[k];
                lpow *= lambda;
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
    use crate::fx;
    use crate::nr::compute_nr;
    use crate::numeric::ratio;
    use crate::oracle;
    use crate::tuple::Tuple;

    fn bigr(n: i64) -> BigRational {
        ratio(n, 1)
    }

    fn geo_term(top: i64, bottom: i64) -> RationalTerm {
        // (1 - x^top)/(1 - x^bottom)
        RationalTerm::new(
            LaurentPoly::one_minus_power(top),
            vec![BigInt::from(bottom)],
        )
        .unwrap()
    }

    #[test]
    fn ct_of_geometric_blocks() {
        // (1-x^6)/(1-x^2) = 1 + x^2 + x^4 -> 3 at x=1.
        assert_eq!(ct_term(&geo_term(6, 2)).unwrap(), bigr(3));
        // (1-x^7)/(1-x) -> 7.
        assert_eq!(ct_term(&geo_term(7, 1)).unwrap(), bigr(7));
        for k in 1..=20i64 {
            for b in 1..=20i64 {
                assert_eq!(ct_term(&geo_term(k * b, b)).unwrap(), bigr(k), "k={k}, b={b}");
            }
        }
    }

    #[test]
    fn ct_matches_worked_first_term() {
        // The first summand of the differentiated arithmetic-family f(x):
        //   -dk x^{dk+ah+d-1} (1-x^{(ah+dk)s}) / ((1-x^d)(1-x^{ah+dk}))
        // has constant term (ks/2)(ahs+dks+ah+dk+d-2).
        let check = |a: i64, h: i64, d: i64, k: i64, s: i64| {
            let num = LaurentPoly::one_minus_power((a * h + d * k) * s)
                .mul(&LaurentPoly::monomial(
                    BigInt::from(d * k + a * h + d - 1),
                    -bigr(d * k),
                ));
            let term =
                RationalTerm::new(num, vec![BigInt::from(d), BigInt::from(a * h + d * k)]).unwrap();
            let got = ct_term(&term).unwrap();
            let want = ratio(k * s, 2) * bigr(a * h * s + d * k * s + a * h + d * k + d - 2);
            assert_eq!(got, want, "a={a} h={h} d={d} k={k} s={s}");
        };
        check(7, 1, 1, 2, 3);
        check(5, 2, 3, 4, 1);
        check(9, 1, 2, 3, 2);
        check(11, 3, 1, 5, 4);
        check(4, 2, 1, 2, 5);
    }

    #[test]
    fn truncation_order_is_sufficient() {
        let terms = [geo_term(42, 7), geo_term(12, 3), geo_term(30, 2)];
        for t in &terms {
            let base = ct_term(t).unwrap();
            for extra in 1..=3 {
                assert_eq!(ct_term_with_extra_order(t, extra).unwrap(), base);
            }
        }
    }

    #[test]
    fn differentiate_monomial_and_block() {
        // x^5 -> 5x^4.
        let sum = RationalTermSum::from_term(RationalTerm::polynomial(LaurentPoly::power(5)));
        let d = differentiate(&sum);
        assert_eq!(d.terms().len(), 1);
        let got: Vec<_> = d.terms()[0].numerator().terms().collect();
        assert_eq!(got, vec![(&BigInt::from(4), &bigr(5))]);

        // 1/(1-x^2) -> 2x/(1-x^2)^2.
        let sum = RationalTermSum::from_term(
            RationalTerm::new(LaurentPoly::one(), vec![BigInt::from(2)]).unwrap(),
        );
        let d = differentiate(&sum);
        assert_eq!(d.terms().len(), 1);
        let t = &d.terms()[0];
        assert_eq!(t.denominators(), &[BigInt::from(2), BigInt::from(2)]);
        let got: Vec<_> = t.numerator().terms().collect();
        assert_eq!(got, vec![(&BigInt::from(1), &bigr(2))]);
    }

    #[test]
    fn derivatives_of_residue_polynomial() {
        // f for (5,9,11) is 1 + x^9 + x^11 + x^18 + x^22.
        let table = compute_nr(&Tuple::from_u64s(&[5, 9, 11]).unwrap()).unwrap();
        let f = fx::fx_from_table(&table);
        assert_eq!(value_at_one(&f).unwrap(), bigr(5));
        let f1 = differentiate(&f);
        assert_eq!(value_at_one(&f1).unwrap(), bigr(60));
        let f2 = differentiate(&f1);
        assert_eq!(value_at_one(&f2).unwrap(), bigr(950));
    }

    #[test]
    fn derivative_matches_coefficientwise_for_blocks() {
        // Expandable sums: compare d/dx against the coefficientwise
        // derivative of the expansion. (1-x^{12})/(1-x^3) has expansion
        // 1 + x^3 + x^6 + x^9.
        let block = RationalTermSum::from_term(geo_term(12, 3));
        let d = differentiate(&block);
        // Evaluate both routes at a handful of rational points.
        for x in [ratio(1, 2), ratio(-2, 3), ratio(3, 1)] {
            let direct: BigRational = [3i64, 6, 9]
                .iter()
                .map(|&e| bigr(e) * rational_pow(&x, &BigInt::from(e - 1)).unwrap())
                .sum();
            assert_eq!(value_at(&d, &x).unwrap(), direct, "x = {x}");
        }
    }

    #[test]
    fn pole_diagnostics() {
        // 1/(1-x) alone has a genuine pole at 1.
        let pole = RationalTermSum::from_term(
            RationalTerm::new(LaurentPoly::one(), vec![BigInt::one()]).unwrap(),
        );
        assert!(matches!(value_at_one(&pole), Err(Error::Internal(_))));

        // 1/(1-x) - x/(1-x) = 1: poles cancel across terms.
        let mut sum = pole.clone();
        sum.push(
            RationalTerm::new(LaurentPoly::power(1).neg(), vec![BigInt::one()]).unwrap(),
        );
        assert_eq!(value_at_one(&sum).unwrap(), bigr(1));

        // Evaluation at -1 hits the even-exponent factor.
        let even = RationalTermSum::from_term(
            RationalTerm::new(LaurentPoly::one(), vec![BigInt::from(2)]).unwrap(),
        );
        assert!(value_at(&even, &ratio(-1, 1)).is_err());
        // ... but (1-x^4)/(1-x^2) = 1 + x^2 is fine there.
        let block = RationalTermSum::from_term(geo_term(4, 2));
        assert_eq!(value_at(&block, &ratio(-1, 1)).unwrap(), bigr(2));
    }

    #[test]
    fn value_at_regular_points_is_plain_evaluation() {
        // (1-x^6)/(1-x^2) at x = 1/2 equals (1 - 1/64)/(1 - 1/4) = 21/16.
        let block = RationalTermSum::from_term(geo_term(6, 2));
        assert_eq!(value_at(&block, &ratio(1, 2)).unwrap(), ratio(21, 16));
    }

    #[test]
    fn stats_examples() {
        let paper = compute_nr(&Tuple::from_u64s(&[5, 16, 19, 22]).unwrap()).unwrap();
        let f = fx::fx_from_table(&paper);
        let b = stats_via_ct(&f, 5, 1, &[]).unwrap();
        assert_eq!(b.n, Some(BigInt::from(17)));
        assert_eq!(b.s, Some(BigInt::from(209)));
        assert!(b.g.is_none());

        let tiny = compute_nr(&Tuple::from_u64s(&[2, 3]).unwrap()).unwrap();
        let b = stats_via_ct(&fx::fx_from_table(&tiny), 2, 0, &[]).unwrap();
        assert_eq!(b.n, Some(BigInt::one()));
        assert_eq!(b.s, Some(BigInt::one()));

        let t511 = compute_nr(&Tuple::from_u64s(&[5, 9, 11]).unwrap()).unwrap();
        let b = stats_via_ct(&fx::fx_from_table(&t511), 5, 2, &[]).unwrap();
        assert_eq!(b.s_mu[&2], BigInt::from(781));
    }

    #[test]
    fn stats_match_oracle_with_weights() {
        for elems in [&[3u64, 5][..], &[5, 9, 11], &[7, 9, 10], &[6, 10, 15], &[8, 9, 10, 12]] {
            let tuple = Tuple::from_u64s(elems).unwrap();
            let table = compute_nr(&tuple).unwrap();
            let f = fx::fx_from_table(&table);
            let lambdas = [ratio(-1, 1), ratio(1, 2)];
            let ct = stats_via_ct(&f, table.modulus(), 3, &lambdas).unwrap();
            let or = oracle::oracle_stats(&tuple, 3, &lambdas).unwrap();
            let diffs = ct.disagreements(&or);
            assert!(diffs.is_empty(), "{tuple}: {diffs:?}");
        }
    }

    #[test]
    fn rejects_forbidden_weights() {
        let table = compute_nr(&Tuple::from_u64s(&[3, 5]).unwrap()).unwrap();
        let f = fx::fx_from_table(&table);
        assert!(stats_via_ct(&f, 3, 1, &[ratio(0, 1)]).is_err());
        assert!(stats_via_ct(&f, 3, 1, &[ratio(1, 1)]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let table = compute_nr(&Tuple::from_u64s(&[5, 9, 11]).unwrap()).unwrap();
        let mut sum = fx::fx_from_table(&table);
        sum.push(geo_term(6, 2));
        let json = sum_to_json(&sum);
        let back = sum_from_json(&json).unwrap();
        assert_eq!(back, sum);
        assert_eq!(value_at_one(&back).unwrap(), value_at_one(&sum).unwrap());
    }

    #[test]
    fn linearity_of_value_at_one() {
        let s1 = RationalTermSum::from_term(geo_term(12, 3));
        let s2 = RationalTermSum::from_term(geo_term(10, 2));
        let total = s1.add(&s2);
        assert_eq!(
            value_at_one(&total).unwrap(),
            value_at_one(&s1).unwrap() + value_at_one(&s2).unwrap()
        );
    }
}
