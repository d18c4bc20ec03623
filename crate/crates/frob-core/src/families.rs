//! Closed formulas for g, n, s (and sometimes s_μ) of parametric families.
//!
//! Every formula is guarded by the hypotheses it was derived under and is
//! refused (with the failed constraint named) outside them — several are
//! provably wrong there. Empirical equality with the residue-table engine is
//! the acceptance authority for these fast paths; the `verify` machinery
//! surfaces any mismatch as a diagnostic with the instance attached.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::{bernoulli, binomial_usize, expect_integer, power_sum, rat, ratio};
use crate::nr;
use crate::stats::{Engine, StatBundle};
use crate::tuple::Tuple;

/// The supported family shapes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FamilyTag {
    /// (a, d·b₁, …, d·b_k): the scaling law for g.
    Scale,
    /// (a, ha+d, ha+jd).
    Aj,
    /// (a, ha+d, ha+2d, ha+jd).
    A2j,
    /// (a², ha²+d, ha²+ad, ha²+(a+1)d).
    Square,
    /// (a, ha−d, ha+d).
    Pm,
    /// (a, ha+d, ha+2d, …, ha+kd).
    Arith,
    /// (a, ha+(K+1)d, …, ha+kd).
    TruncArith,
    /// (a, ha+d, ha+3d, …, ha+(2k+1)d).
    OddSteps,
    /// (a, ha+d, ha+2d, ha+4d, …, ha+2kd).
    EvenSteps,
}

impl FamilyTag {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyTag::Scale => "scale",
            FamilyTag::Aj => "aj",
            FamilyTag::A2j => "a2j",
            FamilyTag::Square => "square",
            FamilyTag::Pm => "pm",
            FamilyTag::Arith => "arith",
            FamilyTag::TruncArith => "trunc-arith",
            FamilyTag::OddSteps => "odd-steps",
            FamilyTag::EvenSteps => "even-steps",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        registry()
            .iter()
            .find(|info| info.tag.name() == name)
            .map(|info| info.tag)
            .ok_or_else(|| Error::Domain(format!("unknown family {name:?}")))
    }
}

/// One registry row: the family, its parameter names (in canonical order),
/// and the statistics its closed forms produce.
pub struct FamilyInfo {
    pub tag: FamilyTag,
    pub params: &'static [&'static str],
    pub stats: &'static [&'static str],
}

/// Enumerable registry, e.g. for a CLI to list families and their schemas.
pub fn registry() -> &'static [FamilyInfo] {
    &[
        FamilyInfo { tag: FamilyTag::Scale, params: &["a", "d", "b1", "b2"], stats: &["g"] },
        FamilyInfo { tag: FamilyTag::Aj, params: &["a", "h", "d", "j"], stats: &["g", "n", "s"] },
        FamilyInfo { tag: FamilyTag::A2j, params: &["a", "h", "d", "j"], stats: &["g", "n", "s"] },
        FamilyInfo { tag: FamilyTag::Square, params: &["a", "h", "d"], stats: &["g", "n", "s"] },
        FamilyInfo {
            tag: FamilyTag::Pm,
            params: &["a", "h", "d"],
            stats: &["g", "n", "s", "s_mu"],
        },
        FamilyInfo {
            tag: FamilyTag::Arith,
            params: &["a", "h", "d", "k"],
            stats: &["g", "n", "s", "s_mu"],
        },
        FamilyInfo {
            tag: FamilyTag::TruncArith,
            params: &["a", "h", "d", "K", "k"],
            stats: &["g", "n"],
        },
        FamilyInfo { tag: FamilyTag::OddSteps, params: &["a", "h", "d", "k"], stats: &["g", "n"] },
        FamilyInfo { tag: FamilyTag::EvenSteps, params: &["a", "h", "d", "k"], stats: &["g", "n"] },
    ]
}

/// A family with concrete parameter values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub tag: FamilyTag,
    params: BTreeMap<&'static str, i64>,
}

impl FamilySpec {
    /// Bind parameters by name; every parameter in the registry schema must
    /// be present, and no others.
    pub fn new(tag: FamilyTag, values: &[(&str, i64)]) -> Result<Self> {
        let info = registry().iter().find(|i| i.tag == tag).unwrap();
        let mut params = BTreeMap::new();
        for (name, value) in values {
            let canonical = info
                .params
                .iter()
                .find(|p| *p == name)
                .ok_or_else(|| {
                    Error::Precondition(format!(
                        "family {} has no parameter {name:?} (expected {:?})",
                        tag.name(),
                        info.params
                    ))
                })?;
            params.insert(*canonical, *value);
        }
        for p in info.params {
            if !params.contains_key(p) {
                return Err(Error::Precondition(format!(
                    "family {} is missing parameter {p:?}",
                    tag.name()
                )));
            }
        }
        Ok(FamilySpec { tag, params })
    }

    pub fn param(&self, name: &str) -> i64 {
        self.params[name]
    }

    pub fn params(&self) -> impl Iterator<Item = (&'static str, i64)> + '_ {
        let info = registry().iter().find(|i| i.tag == self.tag).unwrap();
        info.params.iter().map(|p| (*p, self.params[p]))
    }

    /// Check every stated hypothesis of the family; the error names the first
    /// failed constraint.
    pub fn check_guards(&self) -> Result<()> {
        self.stats_dispatch(0, true).map(|_| ())
    }

    /// The tuple this parameter point induces.
    pub fn tuple(&self) -> Result<Tuple> {
        let p = |n: &str| self.param(n);
        let elems: Vec<i64> = match self.tag {
            FamilyTag::Scale => vec![p("a"), p("d") * p("b1"), p("d") * p("b2")],
            FamilyTag::Aj => {
                let (a, h, d, j) = (p("a"), p("h"), p("d"), p("j"));
                vec![a, h * a + d, h * a + j * d]
            }
            FamilyTag::A2j => {
                let (a, h, d, j) = (p("a"), p("h"), p("d"), p("j"));
                vec![a, h * a + d, h * a + 2 * d, h * a + j * d]
            }
            FamilyTag::Square => {
                let (a, h, d) = (p("a"), p("h"), p("d"));
                let a2 = a * a;
                vec![a2, h * a2 + d, h * a2 + a * d, h * a2 + (a + 1) * d]
            }
            FamilyTag::Pm => {
                let (a, h, d) = (p("a"), p("h"), p("d"));
                vec![a, h * a - d, h * a + d]
            }
            FamilyTag::Arith => {
                let (a, h, d, k) = (p("a"), p("h"), p("d"), p("k"));
                std::iter::once(a).chain((1..=k).map(|i| h * a + i * d)).collect()
            }
            FamilyTag::TruncArith => {
                let (a, h, d, kk, k) = (p("a"), p("h"), p("d"), p("K"), p("k"));
                std::iter::once(a).chain((kk + 1..=k).map(|i| h * a + i * d)).collect()
            }
            FamilyTag::OddSteps => {
                let (a, h, d, k) = (p("a"), p("h"), p("d"), p("k"));
                std::iter::once(a).chain((0..=k).map(|i| h * a + (2 * i + 1) * d)).collect()
            }
            FamilyTag::EvenSteps => {
                let (a, h, d, k) = (p("a"), p("h"), p("d"), p("k"));
                std::iter::once(a)
                    .chain(std::iter::once(h * a + d))
                    .chain((1..=k).map(|i| h * a + 2 * i * d))
                    .collect()
            }
        };
        Tuple::new(elems.into_iter().map(BigInt::from).collect())
    }

    /// Evaluate the family's closed forms. `max_mu` is honored by the
    /// families that have a power-sum formula (pm, arith).
    pub fn stats(&self, max_mu: u32) -> Result<StatBundle> {
        self.stats_dispatch(max_mu, false)
    }

    fn stats_dispatch(&self, max_mu: u32, guards_only: bool) -> Result<StatBundle> {
        let p = |n: &str| self.param(n);
        match self.tag {
            FamilyTag::Scale => {
                let (a, d, b1, b2) = (p("a"), p("d"), p("b1"), p("b2"));
                let mut bundle = StatBundle::new(Engine::ClosedForm("scale"));
                if guards_only {
                    scale_guards(a, d, &[BigInt::from(b1), BigInt::from(b2)])?;
                } else {
                    bundle.g = Some(scale_g(
                        &BigInt::from(a),
                        &BigInt::from(d),
                        &[BigInt::from(b1), BigInt::from(b2)],
                    )?);
                }
                Ok(bundle)
            }
            FamilyTag::Aj => family_aj(p("a"), p("h"), p("d"), p("j"), guards_only),
            FamilyTag::A2j => family_a2j(p("a"), p("h"), p("d"), p("j"), guards_only),
            FamilyTag::Square => family_square(p("a"), p("h"), p("d"), guards_only),
            FamilyTag::Pm => family_pm(p("a"), p("h"), p("d"), max_mu, guards_only),
            FamilyTag::Arith => family_arith(p("a"), p("h"), p("d"), p("k"), max_mu, guards_only),
            FamilyTag::TruncArith => {
                family_trunc_arith(p("a"), p("h"), p("d"), p("K"), p("k"), guards_only)
            }
            FamilyTag::OddSteps => family_odd_steps(p("a"), p("h"), p("d"), p("k"), guards_only),
            FamilyTag::EvenSteps => family_even_steps(p("a"), p("h"), p("d"), p("k"), guards_only),
        }
    }
}

fn guard(cond: bool, family: &str, constraint: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(format!("family {family}: {constraint}")))
    }
}

fn bi(x: i64) -> BigInt {
    BigInt::from(x)
}

/// ⌈x/y⌉ for y > 0.
fn ceil_div(x: i64, y: i64) -> i64 {
    (x + y - 1).div_euclid(y)
}

fn coprime(a: i64, d: i64) -> bool {
    num_integer::gcd(a, d) == 1
}

fn scale_guards(a: i64, d: i64, b: &[BigInt]) -> Result<()> {
    guard(a >= 2, "scale", "a >= 2")?;
    guard(d >= 1, "scale", "d >= 1")?;
    guard(b.iter().all(|x| x >= &bi(2)), "scale", "every b_i >= 2")?;
    let mut g = bi(a);
    for x in b {
        g = g.gcd(&(x * d));
    }
    guard(g.is_one(), "scale", "gcd(a, dB) = 1")
}

/// The scaling law: g(a, db₁, …, db_k) = d·g(a, b₁, …, b_k) + (d−1)a, with
/// the inner Frobenius number computed by the residue-table engine.
pub fn scale_g(a: &BigInt, d: &BigInt, b: &[BigInt]) -> Result<BigInt> {
    let mut g = a.clone();
    for x in b {
        g = g.gcd(&(x * d));
    }
    if !g.is_one() {
        return Err(Error::Precondition(format!(
            "family scale: gcd(a, dB) = {g}, expected 1"
        )));
    }
    let mut elements = vec![a.clone()];
    elements.extend_from_slice(b);
    let base = Tuple::new(elements)?;
    let g_base = nr::compute_nr(&base)?.frobenius();
    Ok(d * g_base + (d - BigInt::one()) * a)
}

/// Split a = kj − t with k ≥ 1 and 0 ≤ t ≤ j−1, i.e. k = ⌈a/j⌉.
fn ceil_split(a: i64, j: i64) -> (i64, i64) {
    let k = ceil_div(a, j);
    (k, k * j - a)
}

/// (a, ha+d, ha+jd): three-case g selected by t = kj − a, plus n and s.
pub fn family_aj(a: i64, h: i64, d: i64, j: i64, guards_only: bool) -> Result<StatBundle> {
    let f = "aj";
    guard(a > 2, f, "a > 2")?;
    guard(j > 2, f, "j > 2")?;
    guard(d >= 1, f, "d >= 1")?;
    guard(h >= d, f, "h >= d")?;
    guard(coprime(a, d), f, "gcd(a, d) = 1")?;
    let (k, t) = ceil_split(a, j);
    guard(h * k + d - h * t >= 0, f, "hk + d - ht >= 0")?;
    let mut bundle = StatBundle::new(Engine::ClosedForm("aj"));
    if guards_only {
        return Ok(bundle);
    }
    bundle.notes.push(format!("t = {t} case"));
    if h == d {
        bundle.notes.push("guard h >= d binds (h = d)".into());
    }

    let (ha, jd) = (h * a, j * d);
    let g = match t {
        // Exact divisions: t = 0 forces j | a; t = 1 forces j | a+1.
        0 => h * a * a / j + (j - 2) * ha + (a - 1) * d - a,
        1 => h * a * (a + 1) / j + (j - 3) * ha + (a - 1) * d - a,
        _ => (a / j) * (ha + jd) + (j - 2) * ha - d - a,
    };
    bundle.g = Some(bi(g));

    // n = (a-1)(ha+d-1)/2 - h(j-1)(a-t)(k-1)/2
    let n = ratio((a - 1) * (ha + d - 1), 2) - ratio(h * (j - 1) * (a - t) * (k - 1), 2);
    bundle.n = Some(expect_integer(&n, "aj: n(A)")?);

    // The displayed s(A), with (a+t)/j - 1 = k - 1.
    let had = rat(&bi(ha + d));
    let s = had.clone() * had.clone() * ratio(2 * a * a - 3 * a + 1, 12)
        + ratio(h * h * a * (j - 1) * (j - 1) * (k - 1), 6)
            * (ratio(j * k * k, 1) - ratio(j * k, 2) - ratio(3 * t * k, 1) + ratio(3 * t, 1))
        - ratio(h * (j - 1) * (k - 1), 6)
            * had
            * (ratio(2 * j * j, 1) * (ratio(k * k, 1) + ratio(k, 4))
                - ratio(2 * k * j, 1) * (ratio(3 * t, 1) + ratio(3, 4))
                + ratio(3 * t * (t + 1), 1))
        - ratio(a * (ha + d) * (a - 1), 4)
        + ratio(h * a * (j - 1) * (a - t) * (k - 1), 4)
        + ratio(a * a - 1, 12);
    bundle.s = Some(expect_integer(&s, "aj: s(A)")?);
    Ok(bundle)
}

/// (a, ha+d, ha+2d, ha+jd): g as a max of two candidates, n by the parity
/// table, s by the 1/(24a) polynomial with its parity-selected tail.
pub fn family_a2j(a: i64, h: i64, d: i64, j: i64, guards_only: bool) -> Result<StatBundle> {
    let f = "a2j";
    guard(a >= 2, f, "a >= 2")?;
    guard(j >= 4, f, "j >= 4")?;
    guard(d >= 1, f, "d >= 1")?;
    guard(h >= d, f, "h >= d")?;
    guard(coprime(a, d), f, "gcd(a, d) = 1")?;
    let (k, t) = ceil_split(a, j);
    // Monotonicity of N_{dr}(m) needs the worst-case increment
    // (k - ceil(t/2))ha + ad to be nonnegative. For h = d this is the
    // familiar k + 1 - ceil(t/2) >= 0; for h > d that version is too weak.
    guard(h * k + d - h * ((t + 1) / 2) >= 0, f, "hk + d - h*ceil(t/2) >= 0")?;
    let mut bundle = StatBundle::new(Engine::ClosedForm("a2j"));
    if guards_only {
        return Ok(bundle);
    }
    if h * k + d - h * ((t + 1) / 2) == 0 {
        bundle.notes.push("guard hk + d - h*ceil(t/2) >= 0 binds (= 0)".into());
    }

    let ha = h * a;
    // g = max over the two extremal residues; s0 = floor((a-1)/j),
    // r0 = a - 1 - j*s0. The second candidate decomposes r = a-r0-2 as
    // (s0-1, j-1) and therefore only exists for s0 >= 1.
    let s0 = (a - 1) / j;
    let r0 = a - 1 - j * s0;
    let cand1 = ha * (s0 + (r0 + 1) / 2) + (a - 1) * d - a;
    let g = if s0 >= 1 {
        // ceil((j-1)/2) = floor(j/2).
        let cand2 = ha * (s0 + j / 2 - 1) + (j * s0 - 1) * d - a;
        bundle.notes.push(if cand1 >= cand2 {
            "g attained at r = a-1".into()
        } else {
            "g attained at r = a-r0-2".into()
        });
        std::cmp::max(cand1, cand2)
    } else {
        bundle.notes.push("a <= j: only the r = a-1 candidate exists".into());
        cand1
    };
    bundle.g = Some(bi(g));

    // n: common part + parity-selected tail.
    let common = ratio((a - 1) * (d - 1), 2) + ratio(h * (k - 1) * (j * k - 2 * t), 2);
    let tail = match ((j - 1) % 2 == 0, t % 2 == 0) {
        (true, true) => ratio(h * (j - 1) * (j + 1) * (k - 1), 4) + ratio(h * (j - t - 1) * (j - t + 1), 4),
        (true, false) => ratio(h * (j - 1) * (j + 1) * (k - 1), 4) + ratio(h * (j - t) * (j - t), 4),
        (false, true) => ratio(h * j * j * (k - 1), 4) + ratio(h * (j - t) * (j - t), 4),
        (false, false) => ratio(h * j * j * (k - 1), 4) + ratio(h * (j - t - 1) * (j - t + 1), 4),
    };
    bundle.n = Some(expect_integer(&(common + tail), "a2j: n(A)")?);

    bundle.s = Some(expect_integer(&a2j_s(a, h, d, j, k, t), "a2j: s(A)")?);
    Ok(bundle)
}

/// The 1/(24a)·(polynomial + tail) form of s(A) for (a, ha+d, ha+2d, ha+jd).
fn a2j_s(a: i64, h: i64, d: i64, j: i64, k: i64, t: i64) -> BigRational {
    let (a, h, d, j, k, t) = (bi(a), bi(h), bi(d), bi(j), bi(k), bi(t));
    let a2 = &a * &a;
    let a3 = &a2 * &a;
    let h2 = &h * &h;
    let d2 = &d * &d;
    let j2 = &j * &j;
    let j3 = &j2 * &j;
    let k2 = &k * &k;
    let k3 = &k2 * &k;
    let t2 = &t * &t;
    let t3 = &t2 * &t;
    let adh = &a * &d * &h;
    let a2h2 = &a2 * &h2;
    let a2h = &a2 * &h;

    let main = &a2h2 * &j3 * &k
        + bi(3) * &a2h2 * &j2 * &k2
        + bi(4) * &a2h2 * &j * &k3
        + bi(3) * &adh * &j3 * &k2
        + bi(8) * &adh * &j2 * &k3
        + bi(4) * &d2 * &j3 * &k3
        - bi(3) * &j2 * &a2h2 * &k
        - bi(3) * &a2h2 * &j2 * &t
        - bi(6) * &a2h2 * &j * &k2
        - bi(12) * &a2h2 * &j * &k * &t
        + bi(3) * &a2h2 * &j * &t2
        - bi(12) * &a2h2 * &k2 * &t
        + bi(6) * &a2h2 * &k * &t2
        - &a2h2 * &t3
        + &adh * &j3 * &k
        - bi(6) * &adh * &j2 * &k2
        - bi(12) * &adh * &j2 * &k * &t
        - bi(24) * &adh * &j * &k2 * &t
        + bi(6) * &adh * &j * &k * &t2
        - bi(12) * &d2 * &j2 * &k2 * &t
        + bi(12) * &a2h2 * &j * &t
        + bi(24) * &a2h2 * &k * &t
        - bi(6) * &a2h2 * &t2
        - bi(3) * &a2h * &j2 * &k
        - bi(6) * &a2h * &j * &k2
        - bi(5) * &adh * &j2 * &k
        + bi(24) * &adh * &j * &k * &t
        + bi(6) * &adh * &j * &t2
        + bi(12) * &adh * &k * &t2
        - bi(4) * &adh * &t3
        - bi(6) * &a * &d * &j2 * &k2
        - bi(6) * &d2 * &j2 * &k2
        + bi(12) * &d2 * &j * &k * &t2
        + bi(6) * &a2h * &j * &k
        + bi(6) * &a2h * &j * &t
        + bi(12) * &a2h * &k * &t
        - bi(3) * &a2h * &t2
        + bi(6) * &adh * &j * &t
        + bi(12) * &adh * &k * &t
        - bi(15) * &adh * &t2
        + bi(12) * &a * &d * &j * &k * &t
        + bi(12) * &d2 * &j * &k * &t
        - bi(4) * &d2 * &t3
        - bi(12) * &a2h * &t
        + bi(6) * &a * &d * &j * &k
        - bi(6) * &a * &d * &t2
        + bi(2) * &d2 * &j * &k
        - bi(6) * &d2 * &t2
        + bi(2) * &a3
        - bi(6) * &a * &d * &t
        - bi(2) * &d2 * &t
        - bi(2) * &a;

    let j1_even = (&j - BigInt::one()).is_even();
    let t_even = t.is_even();
    let tail = match (j1_even, t_even) {
        (true, true) => {
            &j * &a2h2 * &k - bi(3) * &a2h2 * &k2 - bi(9) * &adh * &j * &k2 + bi(3) * &a2h2 * &k
                - bi(11) * &a2h2 * &t
                + bi(5) * &adh * &j * &k
                + bi(3) * &a2h * &k
                + bi(3) * &adh * &k
                - bi(8) * &adh * &t
        }
        (true, false) => {
            &j * &a2h2 * &k - bi(3) * &a2h2 * &k2 - bi(9) * &adh * &j * &k2
                + bi(3) * &a2h2 * &j
                + bi(9) * &a2h2 * &k
                - bi(14) * &a2h2 * &t
                + bi(11) * &adh * &j * &k
                - bi(6) * &a2h2
                + bi(3) * &a2h * &k
                + bi(3) * &adh * &k
                - bi(14) * &adh * &t
                - bi(3) * &a2h
                - bi(3) * &adh
        }
        (false, false) => {
            bi(4) * &j * &a2h2 * &k - bi(6) * &adh * &j * &k2 - bi(3) * &a2h2 * &j
                - bi(6) * &a2h2 * &k
                - bi(11) * &a2h2 * &t
                + bi(2) * &adh * &j * &k
                + bi(6) * &a2h2
                - bi(8) * &adh * &t
                + bi(3) * &a2h
                + bi(3) * &adh
        }
        (false, true) => {
            bi(4) * &j * &a2h2 * &k - bi(6) * &adh * &j * &k2 - bi(14) * &a2h2 * &t
                + bi(8) * &adh * &j * &k
                - bi(14) * &adh * &t
        }
    };
    BigRational::new(main + tail, bi(24) * a)
}

/// (a², ha²+d, ha²+ad, ha²+(a+1)d): fully polynomial g, n, s.
pub fn family_square(a: i64, h: i64, d: i64, guards_only: bool) -> Result<StatBundle> {
    let f = "square";
    guard(a > 1, f, "a > 1")?;
    guard(h >= 1, f, "h >= 1")?;
    guard(d >= 1, f, "d >= 1")?;
    guard(coprime(a, d), f, "gcd(a, d) = 1")?;
    let mut bundle = StatBundle::new(Engine::ClosedForm("square"));
    if guards_only {
        return Ok(bundle);
    }

    let (a, h, d) = (bi(a), bi(h), bi(d));
    let a2 = &a * &a;
    let a3 = &a2 * &a;

    bundle.g = Some(&h * &a3 + (&d - &h - 1) * &a2 - &d);

    let n = ratio(2, 3) * rat(&(&h * &a3)) + ratio(1, 2) * rat(&((&d - &h - 1) * &a2))
        - ratio(1, 6) * rat(&(&h * &a))
        + ratio(1, 2) * rat(&(BigInt::one() - &d));
    bundle.n = Some(expect_integer(&n, "square: n(A)")?);

    let a4 = &a2 * &a2;
    let a5 = &a4 * &a;
    let a6 = &a4 * &a2;
    let (h2, d2, dh) = (&h * &h, &d * &d, &d * &h);
    let s_num = bi(6) * &h2 * &a6
        + (bi(9) * &dh - bi(8) * &h2 - bi(8) * &h) * &a5
        + (bi(4) * &d2 - bi(5) * &dh - bi(6) * &d + bi(6) * &h + bi(2)) * &a4
        + (bi(2) * &h2 - bi(11) * &dh + bi(2) * &h) * &a3
        + (bi(5) * &dh - bi(6) * &d2 + bi(6) * &d) * &a2
        + bi(2) * &dh * &a
        + bi(2) * &d2
        - bi(2);
    bundle.s = Some(expect_integer(&BigRational::new(s_num, bi(24)), "square: s(A)")?);
    Ok(bundle)
}

/// (a, ha−d, ha+d): g, n, s and the Bernoulli-weighted s_μ, all driven by
/// the split point q = ⌊(ha−d)/2h⌋.
pub fn family_pm(a: i64, h: i64, d: i64, max_mu: u32, guards_only: bool) -> Result<StatBundle> {
    let f = "pm";
    guard(a >= 2, f, "a >= 2")?;
    guard(h >= 1, f, "h >= 1")?;
    guard(d >= 1, f, "d >= 1")?;
    guard(coprime(a, d), f, "gcd(a, d) = 1")?;
    guard(h * a - d > 1, f, "ha - d > 1")?;
    let mut bundle = StatBundle::new(Engine::ClosedForm("pm"));
    if guards_only {
        return Ok(bundle);
    }

    let (lo, hi) = (h * a - d, h * a + d); // the two generators
    let q = lo / (2 * h);
    let q_ceil = ceil_div(lo, 2 * h);

    let cand1 = q * hi - a;
    let cand2 = (a - q_ceil) * lo - a;
    bundle.g = Some(bi(std::cmp::max(cand1, cand2)));

    // n and s split the residues at q.
    let up = q * (q + 1); // q(q+1)
    let down = (a - q) * (a - q - 1);
    let n = ratio(hi * up, 2 * a) + ratio(lo * down, 2 * a) - ratio(a - 1, 2);
    bundle.n = Some(expect_integer(&n, "pm: n(A)")?);

    let s = (ratio(hi * hi * (2 * q + 1), 12 * a) - ratio(hi, 4)) * ratio(up, 1)
        + (ratio(lo * lo * (2 * a - 2 * q - 1), 12 * a) - ratio(lo, 4)) * ratio(down, 1)
        + ratio(a * a - 1, 12);
    bundle.s = Some(expect_integer(&s, "pm: s(A)")?);

    for mu in 1..=max_mu {
        let m = mu as usize;
        let mut acc = BigRational::zero();
        for kappa in 0..=m {
            let p = (m + 1 - kappa) as u32;
            let inner = rat(&bi(hi).pow(p)) * rat(&power_sum(q as u64, p))
                + rat(&bi(lo).pow(p)) * rat(&power_sum((a - q - 1) as u64, p));
            acc += rat(&binomial_usize(m + 1, kappa))
                * bernoulli(kappa)
                * rat(&bi(a)).pow(kappa as i32 - 1)
                * inner;
        }
        acc /= ratio(m as i64 + 1, 1);
        acc += bernoulli(m + 1) / ratio(m as i64 + 1, 1) * rat(&(bi(a).pow(m as u32 + 1) - 1));
        bundle.s_mu.insert(mu, expect_integer(&acc, &format!("pm: s_{mu}(A)"))?);
    }
    Ok(bundle)
}

/// (a, ha+d, …, ha+kd): the arithmetic family, with s_μ summed over the
/// explicit table entries ha·⌈r/k⌉ + dr.
pub fn family_arith(
    a: i64,
    h: i64,
    d: i64,
    k: i64,
    max_mu: u32,
    guards_only: bool,
) -> Result<StatBundle> {
    let f = "arith";
    guard(a >= 2, f, "a >= 2")?;
    guard(h >= 1, f, "h >= 1")?;
    guard(d >= 1, f, "d >= 1")?;
    guard(k >= 1 && k <= a - 1, f, "1 <= k <= a - 1")?;
    guard(coprime(a, d), f, "gcd(a, d) = 1")?;
    let mut bundle = StatBundle::new(Engine::ClosedForm("arith"));
    if guards_only {
        return Ok(bundle);
    }

    let ha = h * a;
    bundle.g = Some(bi(ha * ((a - 2) / k + 1) + (d - 1) * (a - 1) - 1));

    let q = (a - 1) / k;
    let n = ratio(h * (q + 1), 1) * (ratio(a - 1, 1) - ratio(k * q, 2)) + ratio((d - 1) * (a - 1), 2);
    bundle.n = Some(expect_integer(&n, "arith: n(A)")?);

    let r1 = a - 1 - q * k;
    let s = ratio(a * (q + 1) * h * h, 6)
        * (ratio(k * q * q, 1) + ratio(k * q, 2) + ratio(3 * q * r1 + 3 * r1, 1))
        + ratio((a - 1) * (d - 1), 6)
            * (ratio(a * d, 1) - ratio(d, 2) - ratio(a, 2) - ratio(1, 2))
        - ratio(h * (q + 1), 4)
            * (ratio(-4 * d * k * k * q * q, 3)
                + (ratio(k * d, 3) + ratio(-4 * d * r1 - d + a, 1)) * ratio(k * q, 1)
                + ratio(2 * r1 * (-r1 * d - d + a), 1));
    bundle.s = Some(expect_integer(&s, "arith: s(A)")?);

    // s_mu from the explicit N_{dr} = ha*ceil(r/k) + dr.
    let max_power = max_mu as usize + 1;
    let mut nr_powers = vec![BigInt::zero(); max_power + 1];
    for r in 1..a {
        let v = bi(ha * ceil_div(r, k) + d * r);
        let mut p = BigInt::one();
        for sum in nr_powers.iter_mut() {
            *sum += &p;
            p *= &v;
        }
    }
    for mu in 1..=max_mu {
        let m = mu as usize;
        let mut acc = BigRational::zero();
        for kappa in 0..=m {
            acc += rat(&binomial_usize(m + 1, kappa))
                * bernoulli(kappa)
                * rat(&bi(a)).pow(kappa as i32 - 1)
                * rat(&nr_powers[m + 1 - kappa]);
        }
        acc /= ratio(m as i64 + 1, 1);
        acc += bernoulli(m + 1) / ratio(m as i64 + 1, 1) * rat(&(bi(a).pow(m as u32 + 1) - 1));
        bundle
            .s_mu
            .insert(mu, expect_integer(&acc, &format!("arith: s_{mu}(A)"))?);
    }
    Ok(bundle)
}

/// (a, ha+(K+1)d, …, ha+kd): the truncated arithmetic family.
pub fn family_trunc_arith(
    a: i64,
    h: i64,
    d: i64,
    kk: i64,
    k: i64,
    guards_only: bool,
) -> Result<StatBundle> {
    let f = "trunc-arith";
    guard(a >= 2, f, "a >= 2")?;
    guard(h >= 1, f, "h >= 1")?;
    guard(d >= 1, f, "d >= 1")?;
    guard(kk >= 1, f, "K >= 1")?;
    guard(2 * kk <= k - 1, f, "K <= (k-1)/2")?;
    // The derivation partitions the residues 1..a-1 at K, so K must be a
    // valid residue; the formulas are wrong for K >= a.
    guard(kk <= a - 1, f, "K <= a - 1")?;
    guard(coprime(a, d), f, "gcd(a, d) = 1")?;
    let mut bundle = StatBundle::new(Engine::ClosedForm("trunc-arith"));
    if guards_only {
        return Ok(bundle);
    }

    let ha = h * a;
    bundle.g = Some(bi(ha * ceil_div(a + kk, k) + d * (a + kk) - a));

    let q = (a + kk) / k;
    let r1 = a + kk - q * k;
    let n = if r1 >= kk + 1 {
        ratio(h, 1) * (ratio(q + 1, 1) * (ratio(q * k, 2) + ratio(r1 - 1, 1)) - ratio(kk, 1))
            + ratio((a - 1) * (d - 1), 2)
            + ratio(kk * d, 1)
    } else {
        ratio(h, 1) * (ratio(q + 1, 1) * (ratio(q * k, 2) + ratio(r1, 1)) - ratio(kk + q, 1))
            + ratio((a - 1) * (d - 1), 2)
            + ratio(kk * d, 1)
    };
    bundle.n = Some(expect_integer(&n, "trunc-arith: n(A)")?);
    bundle.notes.push(if r1 >= kk + 1 {
        format!("r1 = {r1} >= K+1 branch")
    } else {
        format!("r1 = {r1} <= K branch")
    });
    Ok(bundle)
}

/// (a, ha+d, ha+3d, …, ha+(2k+1)d): odd step sizes after the unit.
pub fn family_odd_steps(a: i64, h: i64, d: i64, k: i64, guards_only: bool) -> Result<StatBundle> {
    let f = "odd-steps";
    guard(a > 2, f, "a > 2")?;
    guard(h >= 1, f, "h >= 1")?;
    guard(d >= 1, f, "d >= 1")?;
    guard(k >= 1, f, "k >= 1")?;
    guard(2 * k + 1 <= a - 1, f, "2k + 1 <= a - 1")?;
    guard(coprime(a, d), f, "gcd(a, d) = 1")?;
    let mut bundle = StatBundle::new(Engine::ClosedForm("odd-steps"));
    if guards_only {
        return Ok(bundle);
    }

    let ha = h * a;
    let w = 2 * k + 1;
    // a - 1 = wq + t with 1 <= t <= w.
    let q = (a - 2) / w;
    let t = a - 1 - w * q;
    let g = if t % 2 == 0 {
        ha * ((a - 2) / w + 2) + (a - 1) * d - a
    } else {
        std::cmp::max(
            ha * ((a - 2) / w + 1) + (a - 1) * d - a,
            ha * ((a - 3) / w + 2) + (a - 2) * d - a,
        )
    };
    bundle.g = Some(bi(g));

    let n = ratio(h * q, 1) * (ratio(k * q + t, 1) + ratio(q, 2) - ratio(1, 2))
        + ratio(a - 1, 1) * (ratio(d, 2) + ratio(h, 1) - ratio(1, 2))
        + ratio(h * (t / 2), 1);
    bundle.n = Some(expect_integer(&n, "odd-steps: n(A)")?);
    Ok(bundle)
}

/// (a, ha+d, ha+2d, ha+4d, …, ha+2kd): even step sizes after the unit.
pub fn family_even_steps(a: i64, h: i64, d: i64, k: i64, guards_only: bool) -> Result<StatBundle> {
    let f = "even-steps";
    guard(a > 2, f, "a > 2")?;
    guard(h >= 1, f, "h >= 1")?;
    guard(d >= 1, f, "d >= 1")?;
    guard(k >= 1, f, "k >= 1")?;
    guard(2 * k <= a - 1, f, "2k <= a - 1")?;
    guard(coprime(a, d), f, "gcd(a, d) = 1")?;
    let mut bundle = StatBundle::new(Engine::ClosedForm("even-steps"));
    if guards_only {
        return Ok(bundle);
    }

    let ha = h * a;
    let w = 2 * k;
    let g = if a % 2 == 0 {
        // a - 1 = wq + t, 1 <= t <= w.
        let t = a - 1 - w * ((a - 2) / w);
        if t != 1 {
            ha * ((a - 2) / w + 2) + (a - 1) * d - a
        } else {
            ha * ((a - 2) / w + 1) + (a - 1) * d - a
        }
    } else {
        // a - 2 = wq + t, 1 <= t <= w.
        let t = a - 2 - w * ((a - 3) / w);
        if t != 1 {
            std::cmp::max(
                ha * ((a - 2) / w + 1) + (a - 1) * d - a,
                ha * ((a - 3) / w + 2) + (a - 2) * d - a,
            )
        } else {
            ha * ((a - 2) / w + 1) + (a - 1) * d - a
        }
    };
    bundle.g = Some(bi(g));

    let sigma = (a - 2) / w;
    let tau = a - 1 - w * sigma;
    let n = ratio(h * (sigma * sigma * k + sigma * tau - sigma - 1), 1)
        + ratio(a - 1, 1) * (ratio(h, 1) + ratio(d, 2) - ratio(1, 2))
        + ratio(h * ceil_div(tau, 2), 1);
    bundle.n = Some(expect_integer(&n, "even-steps: n(A)")?);
    Ok(bundle)
}
