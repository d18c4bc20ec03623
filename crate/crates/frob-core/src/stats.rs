//! The statistics record shared by all engines.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Which engine produced a [`StatBundle`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    /// Brute-force enumeration of the gap set.
    Oracle,
    /// Aggregation of the residue table N_r.
    Nr,
    /// Constant-term extraction from a rational-sum representation of f(x).
    Ct,
    /// A theorem-level closed formula; the tag names the family.
    ClosedForm(&'static str),
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Engine::Oracle => write!(f, "oracle"),
            Engine::Nr => write!(f, "nr"),
            Engine::Ct => write!(f, "ct"),
            Engine::ClosedForm(tag) => write!(f, "closed-form:{tag}"),
        }
    }
}

/// Weighted power sums s_μ^(λ) for one weight λ.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaSums {
    pub lambda: BigRational,
    /// μ → Σ_{n∈gaps} λⁿ nᵘ (exact rational).
    pub sums: BTreeMap<u32, BigRational>,
}

/// Computed statistics of one tuple. Engines fill in the subset they can
/// produce; `None` / empty maps mean "not computed", never "zero".
#[derive(Clone, Debug, PartialEq)]
pub struct StatBundle {
    /// Frobenius number g(A).
    pub g: Option<BigInt>,
    /// Sylvester number n(A) (count of gaps).
    pub n: Option<BigInt>,
    /// Sylvester sum s(A) (sum of gaps).
    pub s: Option<BigInt>,
    /// Sylvester power sums μ → s_μ(A).
    pub s_mu: BTreeMap<u32, BigInt>,
    /// Binomial moments μ → ŝ_μ(A) = Σ C(n,μ).
    pub shat_mu: BTreeMap<u32, BigInt>,
    /// Weighted power sums, one entry per requested λ.
    pub s_mu_lambda: Vec<LambdaSums>,
    pub engine: Engine,
    /// Free-form observations (guard boundaries, case selections).
    pub notes: Vec<String>,
}

impl StatBundle {
    pub fn new(engine: Engine) -> Self {
        StatBundle {
            g: None,
            n: None,
            s: None,
            s_mu: BTreeMap::new(),
            shat_mu: BTreeMap::new(),
            s_mu_lambda: Vec::new(),
            engine,
            notes: Vec::new(),
        }
    }

    /// Describe every statistic both bundles computed but disagree on.
    /// An empty result means the bundles are consistent (possibly because
    /// they have nothing in common).
    pub fn disagreements(&self, other: &StatBundle) -> Vec<String> {
        let mut out = Vec::new();
        let pair = |name: &str, a: &Option<BigInt>, b: &Option<BigInt>, out: &mut Vec<String>| {
            if let (Some(x), Some(y)) = (a, b) {
                if x != y {
                    out.push(format!(
                        "{name}: {} says {x}, {} says {y}",
                        self.engine, other.engine
                    ));
                }
            }
        };
        pair("g", &self.g, &other.g, &mut out);
        pair("n", &self.n, &other.n, &mut out);
        pair("s", &self.s, &other.s, &mut out);
        for (mu, x) in &self.s_mu {
            if let Some(y) = other.s_mu.get(mu) {
                if x != y {
                    out.push(format!(
                        "s_{mu}: {} says {x}, {} says {y}",
                        self.engine, other.engine
                    ));
                }
            }
        }
        for (mu, x) in &self.shat_mu {
            if let Some(y) = other.shat_mu.get(mu) {
                if x != y {
                    out.push(format!(
                        "shat_{mu}: {} says {x}, {} says {y}",
                        self.engine, other.engine
                    ));
                }
            }
        }
        for ls in &self.s_mu_lambda {
            if let Some(other_ls) = other
                .s_mu_lambda
                .iter()
                .find(|o| o.lambda == ls.lambda)
            {
                for (mu, x) in &ls.sums {
                    if let Some(y) = other_ls.sums.get(mu) {
                        if x != y {
                            out.push(format!(
                                "s_{mu}^({}): {} says {x}, {} says {y}",
                                ls.lambda, self.engine, other.engine
                            ));
                        }
                    }
                }
            }
        }
        out
    }
}
