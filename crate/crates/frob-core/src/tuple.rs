//! Validated input tuples A = (a₁, …, aₙ).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};

/// A tuple of relatively prime positive integers, each at least 2, with at
/// least two entries. The order matters: the residue-table engine reduces
/// modulo the *first* element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tuple {
    elements: Vec<BigInt>,
}

impl Tuple {
    pub fn new(elements: Vec<BigInt>) -> Result<Self> {
        if elements.len() < 2 {
            return Err(Error::InvalidTuple(format!(
                "need at least 2 elements, got {}",
                elements.len()
            )));
        }
        for e in &elements {
            if e < &BigInt::from(2) {
                return Err(Error::InvalidTuple(format!("element {e} is below 2")));
            }
        }
        let mut g = elements[0].clone();
        for e in &elements[1..] {
            g = g.gcd(e);
        }
        if !g.is_one() {
            return Err(Error::InvalidTuple(format!("gcd is {g}, expected 1")));
        }
        Ok(Tuple { elements })
    }

    pub fn from_u64s(elements: &[u64]) -> Result<Self> {
        Self::new(elements.iter().map(|&e| BigInt::from(e)).collect())
    }

    /// Parse a comma-separated list such as `5,16,19,22`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut elements = Vec::new();
        for part in text.split(',') {
            let part = part.trim();
            let n: BigInt = part
                .parse()
                .map_err(|_| Error::InvalidTuple(format!("cannot parse element {part:?}")))?;
            elements.push(n);
        }
        Self::new(elements)
    }

    pub fn elements(&self) -> &[BigInt] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: at least two elements
    }

    /// The reduction modulus a₁ (the first element).
    pub fn modulus(&self) -> &BigInt {
        &self.elements[0]
    }

    /// Same multiset with a smallest element rotated to the front, so the
    /// residue-table engine gets the cheapest modulus.
    pub fn with_min_first(&self) -> Tuple {
        let (pos, _) = self
            .elements
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.cmp(b.1))
            .unwrap();
        let mut elements = self.elements.clone();
        elements.swap(0, pos);
        Tuple { elements }
    }

    /// A new tuple with one extra generator appended.
    pub fn with_extra(&self, extra: BigInt) -> Result<Tuple> {
        let mut elements = self.elements.clone();
        elements.push(extra);
        Tuple::new(elements)
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}
