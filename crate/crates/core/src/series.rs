//! Exact-rational truncated formal power series.
//!
//! Every binary operation truncates to the smaller operand order; nothing is
//! padded, so a result never claims coefficients that were not computed.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{divisors, is_integer};
use crate::error::{Error, Result};
use crate::json::RationalRepr;

// Below this order the Cauchy product runs sequentially.
const PAR_THRESHOLD: usize = 48;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRational>,
}

impl TruncatedSeries {
    /// Series `c_0 + ... + c_N z^N` with `N = coeffs.len() - 1`.
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition(
                "a truncated series needs at least the constant coefficient".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn from_integers(coeffs: &[i64]) -> Result<Self> {
        Self::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![BigRational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigRational::one();
        s
    }

    /// `c z^k`, truncated at `order`.
    pub fn monomial(c: BigRational, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &BigRational {
        &self.coeffs[k]
    }

    pub fn into_coeffs(self) -> Vec<BigRational> {
        self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self {
            coeffs: self.coeffs[..=order.min(self.order())].to_vec(),
        }
    }

    /// Replaces coefficient `k`; used for fault injection in regression runs.
    pub fn with_coeff(mut self, k: usize, c: BigRational) -> Self {
        if k <= self.order() {
            self.coeffs[k] = c;
        }
        self
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    fn check_unit(&self) -> Result<()> {
        if self.coeffs[0].is_one() {
            Ok(())
        } else {
            Err(Error::ConstantTermNotOne)
        }
    }

    /// `1 / a`; requires `a_0 != 0`.
    pub fn reciprocal(&self) -> Result<Self> {
        Self::one(self.order()).div(self)
    }

    /// `self / other` by forward substitution; requires `other_0 != 0`.
    pub fn div(&self, other: &Self) -> Result<Self> {
        let b0 = &other.coeffs[0];
        if b0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let order = self.order().min(other.order());
        let b0_inv = b0.recip();
        let mut out: Vec<BigRational> = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let mut acc = self.coeffs[n].clone();
            for k in 1..=n {
                if !other.coeffs[k].is_zero() {
                    acc -= &other.coeffs[k] * &out[n - k];
                }
            }
            out.push(acc * &b0_inv);
        }
        Ok(Self { coeffs: out })
    }

    /// `exp(a)` for `a_0 = 0`, from `b' = a' b`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let order = self.order();
        // k * a_k, reused for every n
        let da: Vec<BigRational> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a * BigRational::from_integer(k.into()))
            .collect();
        let mut out = Vec::with_capacity(order + 1);
        out.push(BigRational::one());
        for n in 1..=order {
            let mut acc = BigRational::zero();
            for k in 1..=n {
                if !da[k].is_zero() && !out[n - k].is_zero() {
                    acc += &da[k] * &out[n - k];
                }
            }
            out.push(acc / BigRational::from_integer(n.into()));
        }
        Ok(Self { coeffs: out })
    }

    /// `log(a)` for `a_0 = 1`, from `a' = l' a`.
    pub fn log(&self) -> Result<Self> {
        self.check_unit()?;
        let order = self.order();
        let mut out: Vec<BigRational> = Vec::with_capacity(order + 1);
        out.push(BigRational::zero());
        for n in 1..=order {
            let mut acc = BigRational::zero();
            for k in 1..n {
                if !out[k].is_zero() && !self.coeffs[n - k].is_zero() {
                    acc += &out[k] * &self.coeffs[n - k] * BigRational::from_integer(k.into());
                }
            }
            out.push(&self.coeffs[n] - acc / BigRational::from_integer(n.into()));
        }
        Ok(Self { coeffs: out })
    }

    /// The unique `b` with `b_0 = 1` and `b^v = a`, as `exp(log(a) / v)`.
    pub fn vth_root(&self, v: u64) -> Result<Self> {
        if v == 0 {
            return Err(Error::ZeroRoot);
        }
        self.check_unit()?;
        if v == 1 {
            return Ok(self.clone());
        }
        self.log()?.root_from_log(&BigUint::from(v))
    }

    fn root_from_log(&self, v: &BigUint) -> Result<Self> {
        let inv = BigRational::new(BigInt::one(), BigInt::from(v.clone()));
        self.scale(&inv).exp()
    }

    /// Integer power; negative exponents go through the reciprocal.
    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 {
            self.reciprocal()?
        } else {
            self.clone()
        };
        let mut e = k.unsigned_abs();
        let mut result = Self::one(self.order());
        let mut square = base;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &square;
            }
            e >>= 1;
            if e > 0 {
                square = &square * &square;
            }
        }
        Ok(result)
    }

    /// `a(z^p)`, truncated at the same order.
    pub fn substitute_power(&self, p: usize) -> Self {
        assert!(p >= 1, "substitution exponent must be positive");
        let order = self.order();
        let mut out = Self::zero(order);
        for (k, c) in self.coeffs.iter().enumerate() {
            match k.checked_mul(p) {
                Some(idx) if idx <= order => out.coeffs[idx] = c.clone(),
                _ => break,
            }
        }
        out
    }

    pub fn integrality(&self) -> IntegralityReport {
        let bad = self.coeffs.iter().position(|c| !is_integer(c));
        IntegralityReport {
            integral: bad.is_none(),
            first_bad_index: bad,
            first_bad_coefficient: bad.map(|i| self.coeffs[i].clone()),
            order_checked: self.order(),
        }
    }

    /// Largest `v` with `a^(1/v)` integral through the truncation order.
    ///
    /// If `a_j` is the first nonzero coefficient past the constant term then
    /// `a^(1/v)` has `a_j / v` at `z^j`, so only divisors of `a_j` can pass.
    /// Every divisor is tested; the passing set is reported alongside the
    /// maximum.
    pub fn max_root_exponent(&self) -> Result<RootExponentCertificate> {
        self.check_unit()?;
        let report = self.integrality();
        if let Some(index) = report.first_bad_index {
            return Err(Error::NotIntegral { index });
        }
        let Some(leading_index) = (1..=self.order()).find(|&k| !self.coeffs[k].is_zero()) else {
            return Err(Error::UnboundedExponent {
                order: self.order(),
            });
        };
        let lead = self.coeffs[leading_index].numer().abs().to_biguint().expect("abs");
        let log = self.log()?;
        let candidates = divisors(&lead);
        let passing: Vec<BigUint> = candidates
            .into_par_iter()
            .filter_map(|v| {
                let root = log.root_from_log(&v).expect("log has zero constant term");
                root.integrality().integral.then_some(v)
            })
            .collect();
        let max_exponent = passing.last().cloned().unwrap_or_else(BigUint::one);
        Ok(RootExponentCertificate {
            max_exponent,
            passing,
            leading_index,
            order_checked: self.order(),
        })
    }
}

impl<'a> Add<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;

    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl<'a> Mul<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;

    /// Cauchy product.
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(rhs.order());
        let term = |n: usize| -> BigRational {
            let mut acc = BigRational::zero();
            for k in 0..=n {
                let (a, b) = (&self.coeffs[k], &rhs.coeffs[n - k]);
                if !a.is_zero() && !b.is_zero() {
                    acc += a * b;
                }
            }
            acc
        };
        let coeffs = if order >= PAR_THRESHOLD {
            (0..=order).into_par_iter().map(term).collect()
        } else {
            (0..=order).map(term).collect()
        };
        TruncatedSeries { coeffs }
    }
}

impl Serialize for TruncatedSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs.iter().map(RationalRepr::from))
    }
}

/// First non-integral coefficient of a series, if any.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralityReport {
    pub integral: bool,
    pub first_bad_index: Option<usize>,
    #[serde(serialize_with = "crate::json::rational_opt")]
    pub first_bad_coefficient: Option<BigRational>,
    pub order_checked: usize,
}

/// Order-`N` certificate for root exponents; says nothing about
/// coefficients past the truncation order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootExponentCertificate {
    #[serde(serialize_with = "crate::json::display")]
    pub max_exponent: BigUint,
    #[serde(serialize_with = "crate::json::display_vec")]
    pub passing: Vec<BigUint>,
    pub leading_index: usize,
    pub order_checked: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(cs: &[i64]) -> TruncatedSeries {
        TruncatedSeries::from_integers(cs).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn central_binomials(order: usize) -> TruncatedSeries {
        let mut c = vec![BigRational::one()];
        for n in 1..=order as i64 {
            let prev = c.last().unwrap().clone();
            c.push(prev * rat(2 * (2 * n - 1), n));
        }
        TruncatedSeries::new(c).unwrap()
    }

    #[test]
    fn rejects_empty() {
        assert!(TruncatedSeries::new(vec![]).is_err());
    }

    #[test]
    fn products() {
        assert_eq!(&ints(&[1, 1, 0]) * &ints(&[1, -1, 0]), ints(&[1, 0, -1]));
        let a = ints(&[3, -2, 5, 7]);
        assert_eq!(&a * &TruncatedSeries::one(3), a);
        let c = central_binomials(3);
        assert_eq!(c.coeffs(), ints(&[1, 2, 6, 20]).coeffs());
        // (1 - 4z)^(-1/2) squared is (1 - 4z)^(-1)
        assert_eq!((&c * &c).coeff(3), &BigRational::from_integer(64.into()));
        // minimum order wins
        assert_eq!((&ints(&[1, 1, 1, 1]) * &ints(&[1, 1])).order(), 1);
    }

    #[test]
    fn large_products_match_sequential() {
        let a = central_binomials(60);
        let b = ints(&(0..=60).map(|i| (i * 7 % 11) - 5).collect::<Vec<_>>());
        let par = &a * &b;
        for n in 0..=60 {
            let seq: BigRational = (0..=n).map(|k| a.coeff(k) * b.coeff(n - k)).sum();
            assert_eq!(par.coeff(n), &seq);
        }
    }

    #[test]
    fn reciprocals() {
        assert_eq!(ints(&[1, -1, 0, 0, 0]).reciprocal().unwrap(), ints(&[1, 1, 1, 1, 1]));
        assert_eq!(ints(&[1]).reciprocal().unwrap(), ints(&[1]));
        let f = central_binomials(12);
        assert_eq!(&f * &f.reciprocal().unwrap(), TruncatedSeries::one(12));
        assert_eq!(ints(&[0, 1]).reciprocal(), Err(Error::ZeroConstantTerm));
    }

    #[test]
    fn exponentials() {
        assert_eq!(TruncatedSeries::zero(4).exp().unwrap(), TruncatedSeries::one(4));
        let e = ints(&[0, 1, 0, 0]).exp().unwrap();
        assert_eq!(
            e.coeffs(),
            &[rat(1, 1), rat(1, 1), rat(1, 2), rat(1, 6)]
        );
        assert_eq!(ints(&[1, 1]).exp(), Err(Error::NonzeroConstantTerm));
    }

    #[test]
    fn logarithms() {
        let a = ints(&[1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(a.log().unwrap().exp().unwrap(), a);
        assert_eq!(TruncatedSeries::one(5).log().unwrap(), TruncatedSeries::zero(5));
        assert_eq!(ints(&[2, 1]).log(), Err(Error::ConstantTermNotOne));
    }

    #[test]
    fn roots() {
        let a = ints(&[1, 4, -2, 9]);
        assert_eq!(a.vth_root(1).unwrap(), a);
        let sq = ints(&[1, 2, 1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(sq.vth_root(2).unwrap(), ints(&[1, 1, 0, 0, 0, 0, 0, 0, 0]));
        // (1+z)^(1/2) = 1 + z/2 - z^2/8 + ...
        let half = ints(&[1, 1, 0, 0]).vth_root(2).unwrap();
        assert_eq!(half.coeff(2), &rat(-1, 8));
        assert_eq!(a.vth_root(0), Err(Error::ZeroRoot));
        assert_eq!(ints(&[3, 1]).vth_root(2), Err(Error::ConstantTermNotOne));
    }

    #[test]
    fn powers() {
        let a = ints(&[1, 1, 0, 0, 0]);
        assert_eq!(a.pow(4).unwrap(), ints(&[1, 4, 6, 4, 1]));
        assert_eq!(a.pow(0).unwrap(), TruncatedSeries::one(4));
        assert_eq!(&a.pow(-3).unwrap() * &a.pow(3).unwrap(), TruncatedSeries::one(4));
    }

    #[test]
    fn substitution() {
        assert_eq!(ints(&[1, 1, 0]).substitute_power(2), ints(&[1, 0, 1]));
        let a = ints(&[1, 5, 3]);
        assert_eq!(a.substitute_power(1), a);
        let c = central_binomials(6).substitute_power(3);
        assert_eq!(c.coeff(6), &BigRational::from_integer(6.into()));
        assert!(c.coeff(4).is_zero());
    }

    #[test]
    fn integrality_reports() {
        let r = ints(&[1, 1]).integrality();
        assert!(r.integral && r.first_bad_index.is_none());
        let s = TruncatedSeries::new(vec![rat(1, 1), rat(1, 2)]).unwrap();
        let r = s.integrality();
        assert_eq!(r.first_bad_index, Some(1));
        assert_eq!(r.first_bad_coefficient, Some(rat(1, 2)));
        assert_eq!(r.order_checked, 1);
    }

    #[test]
    fn root_exponent_of_perfect_power() {
        let a = ints(&[1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]).pow(6).unwrap();
        let cert = a.max_root_exponent().unwrap();
        assert_eq!(cert.max_exponent, BigUint::from(6u32));
        let passing: Vec<u32> = cert.passing.iter().map(|v| v.try_into().unwrap()).collect();
        assert_eq!(passing, vec![1, 2, 3, 6]);
        assert_eq!(cert.leading_index, 1);
    }

    #[test]
    fn root_exponent_errors() {
        assert_eq!(
            TruncatedSeries::one(5).max_root_exponent(),
            Err(Error::UnboundedExponent { order: 5 })
        );
        let s = TruncatedSeries::new(vec![rat(1, 1), rat(1, 3)]).unwrap();
        assert_eq!(s.max_root_exponent(), Err(Error::NotIntegral { index: 1 }));
    }

    #[test]
    fn root_exponent_skips_zero_leading_terms() {
        // (1 + z^2)^4: first nonzero coefficient is 4 at index 2
        let a = ints(&[1, 0, 1, 0, 0, 0, 0, 0, 0, 0]).pow(4).unwrap();
        let cert = a.max_root_exponent().unwrap();
        assert_eq!(cert.leading_index, 2);
        assert_eq!(cert.max_exponent, BigUint::from(4u32));
    }
}
