//! Truncated power/Laurent series in t over exact rationals.
//!
//! A series carries its lowest exponent and a coefficient vector trusted
//! through a stated order; arithmetic never pretends to know coefficients
//! beyond what its inputs support. Multiplication of two series trusted to
//! orders p and q (with lowest exponents u and v) is trusted only to
//! min(p + v, q + u).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::{bernoulli, factorial, rat};

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    /// Exponent of the first stored coefficient (may be negative).
    min_order: i64,
    /// Coefficients of t^min_order, t^(min_order+1), …; the last entry is
    /// the highest trusted order.
    coeffs: Vec<BigRational>,
}

impl TruncatedSeries {
    pub fn new(min_order: i64, coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one trusted order");
        TruncatedSeries { min_order, coeffs }
    }

    /// The constant series 1, trusted through `order`.
    pub fn one(order: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); order + 1];
        coeffs[0] = BigRational::one();
        TruncatedSeries { min_order: 0, coeffs }
    }

    pub fn min_order(&self) -> i64 {
        self.min_order
    }

    pub fn max_order(&self) -> i64 {
        self.min_order + self.coeffs.len() as i64 - 1
    }

    /// Coefficient of t^order; zero below the lowest stored exponent.
    /// Asking beyond the trusted order is a caller bug.
    pub fn coeff(&self, order: i64) -> BigRational {
        if order < self.min_order {
            return BigRational::zero();
        }
        assert!(
            order <= self.max_order(),
            "coefficient of t^{order} requested, series trusted to t^{}",
            self.max_order()
        );
        self.coeffs[(order - self.min_order) as usize].clone()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Multiply by t^shift (exactly).
    pub fn shifted(&self, shift: i64) -> Self {
        TruncatedSeries {
            min_order: self.min_order + shift,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let min_order = self.min_order.min(other.min_order);
        let max_order = self.max_order().min(other.max_order());
        assert!(max_order >= min_order);
        let mut coeffs = vec![BigRational::zero(); (max_order - min_order + 1) as usize];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let o = min_order + i as i64;
            if o >= self.min_order && o <= self.max_order() {
                *c += self.coeff(o);
            }
            if o >= other.min_order && o <= other.max_order() {
                *c += other.coeff(o);
            }
        }
        TruncatedSeries { min_order, coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let min_order = self.min_order + other.min_order;
        let max_order = (self.max_order() + other.min_order)
            .min(other.max_order() + self.min_order);
        let len = (max_order - min_order + 1) as usize;
        let mut coeffs = vec![BigRational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(len - i).enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        TruncatedSeries { min_order, coeffs }
    }

    pub fn scaled(&self, factor: &BigRational) -> Self {
        TruncatedSeries {
            min_order: self.min_order,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }
}

/// e^t truncated at `order`: coefficients 1/n!.
pub fn series_exp(order: usize) -> TruncatedSeries {
    exp_series(&BigRational::one(), order)
}

/// e^{c·t} truncated at `order`: coefficients cⁿ/n!.
pub fn exp_series(c: &BigRational, order: usize) -> TruncatedSeries {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut num = BigRational::one();
    for n in 0..=order {
        if n > 0 {
            num *= c / rat(&BigInt::from(n as u64));
        }
        coeffs.push(num.clone());
    }
    TruncatedSeries::new(0, coeffs)
}

/// t/(1−e^{bt}) truncated at `order`: coefficients −𝓑ₙ bⁿ⁻¹/n!.
///
/// This is the one place the Bernoulli convention shows: the b = 1 series
/// starts −1 + t/2 − t²/12 + t⁴/720.
pub fn series_t_over_one_minus_exp(b: &BigInt, order: usize) -> Result<TruncatedSeries> {
    if b.is_zero() {
        return Err(Error::Domain("t/(1-e^{bt}) needs b != 0".into()));
    }
    let b = rat(b);
    let mut coeffs = Vec::with_capacity(order + 1);
    // b^{n-1} starting at n = 0, i.e. 1/b.
    let mut bpow = BigRational::one() / &b;
    for n in 0..=order {
        coeffs.push(-bernoulli(n) * &bpow / rat(&factorial(n)));
        bpow *= &b;
    }
    Ok(TruncatedSeries::new(0, coeffs))
}

/// 1/(1−q·e^{bt}) truncated at `order`, for q ≠ 1 (regular at t = 0):
/// series inversion of (1−q) − q·(bt + (bt)²/2! + …).
pub fn series_regular_factor(q: &BigRational, b: &BigInt, order: usize) -> Result<TruncatedSeries> {
    if q.is_one() {
        return Err(Error::Domain(
            "1/(1-q e^{bt}) is singular at q = 1; use the pole series".into(),
        ));
    }
    let e = exp_series(&rat(b), order);
    // p = 1 - q * e^{bt}
    let mut p: Vec<BigRational> = e.coeffs().iter().map(|c| -(q * c)).collect();
    p[0] += BigRational::one();
    // Invert: s0 = 1/p0, s_n = -(sum_{i>=1} p_i s_{n-i}) / p0.
    let mut inv = Vec::with_capacity(order + 1);
    inv.push(BigRational::one() / &p[0]);
    for n in 1..=order {
        let mut acc = BigRational::zero();
        for i in 1..=n {
            if !p[i].is_zero() {
                acc += &p[i] * &inv[n - i];
            }
        }
        inv.push(-acc / &p[0]);
    }
    Ok(TruncatedSeries::new(0, inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ratio;

    #[test]
    fn exp_examples() {
        assert_eq!(series_exp(2).coeffs(), &[ratio(1, 1), ratio(1, 1), ratio(1, 2)]);
        assert_eq!(series_exp(0).coeffs(), &[ratio(1, 1)]);
        assert_eq!(
            series_exp(4).coeffs(),
            &[ratio(1, 1), ratio(1, 1), ratio(1, 2), ratio(1, 6), ratio(1, 24)]
        );
    }

    #[test]
    fn pole_series_examples() {
        let s = series_t_over_one_minus_exp(&BigInt::from(1), 4).unwrap();
        assert_eq!(
            s.coeffs(),
            &[ratio(-1, 1), ratio(1, 2), ratio(-1, 12), ratio(0, 1), ratio(1, 720)]
        );

        let s = series_t_over_one_minus_exp(&BigInt::from(2), 1).unwrap();
        assert_eq!(s.coeffs(), &[ratio(-1, 2), ratio(1, 2)]);

        let s = series_t_over_one_minus_exp(&BigInt::from(-1), 0).unwrap();
        assert_eq!(s.coeffs(), &[ratio(1, 1)]);

        assert!(series_t_over_one_minus_exp(&BigInt::from(0), 3).is_err());
    }

    #[test]
    fn regular_factor_inverts() {
        // (1 - q e^{bt}) * series == 1 through the trusted order.
        for (q, b) in [(ratio(-1, 1), 1i64), (ratio(1, 2), 3), (ratio(-8, 1), -2)] {
            let order = 6;
            let inv = series_regular_factor(&q, &BigInt::from(b), order).unwrap();
            let mut direct = exp_series(&ratio(b, 1), order).scaled(&-q.clone());
            direct = direct.add(&TruncatedSeries::one(order));
            let product = direct.mul(&inv);
            for n in 0..=order as i64 {
                let want = if n == 0 { ratio(1, 1) } else { ratio(0, 1) };
                assert_eq!(product.coeff(n), want, "q={q}, b={b}, order {n}");
            }
        }
        assert!(series_regular_factor(&ratio(1, 1), &BigInt::from(2), 3).is_err());
    }

    #[test]
    fn mul_tracks_trusted_order() {
        // (t^-1 series trusted to t^1) * (series trusted to t^2)
        let a = TruncatedSeries::new(-1, vec![ratio(1, 1), ratio(2, 1), ratio(3, 1)]);
        let b = TruncatedSeries::new(0, vec![ratio(1, 1), ratio(0, 1), ratio(5, 1)]);
        let p = a.mul(&b);
        assert_eq!(p.min_order(), -1);
        assert_eq!(p.max_order(), 1); // min(1+0, 2+(-1))
        assert_eq!(p.coeff(-1), ratio(1, 1));
        assert_eq!(p.coeff(0), ratio(2, 1));
        assert_eq!(p.coeff(1), ratio(8, 1)); // 1*5 + 3*1
    }
}
