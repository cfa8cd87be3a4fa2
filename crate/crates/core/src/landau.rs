//! Factorial ratios `Q(n) = prod (e_i n)! / prod (f_j n)!` and the Landau
//! step function `Delta(x) = sum floor(e_i x) - sum floor(f_j x)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{lcm_up_to, FactorialCache};
use crate::error::{Error, Result};
use crate::json::RationalRepr;

/// The pair of integer sequences `(e, f)` defining a factorial ratio.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactorialRatioSpec {
    e: Vec<u64>,
    f: Vec<u64>,
}

impl FactorialRatioSpec {
    pub fn new(e: Vec<u64>, f: Vec<u64>) -> Result<Self> {
        if e.is_empty() || f.is_empty() {
            return Err(Error::EmptySequence);
        }
        if e.iter().chain(&f).any(|&c| c == 0) {
            return Err(Error::ZeroEntry);
        }
        Ok(Self { e, f })
    }

    pub fn e(&self) -> &[u64] {
        &self.e
    }

    pub fn f(&self) -> &[u64] {
        &self.f
    }

    /// `M = max(e ∪ f)`.
    pub fn m(&self) -> u64 {
        self.e.iter().chain(&self.f).copied().max().unwrap_or(0)
    }

    pub fn e_sum(&self) -> u64 {
        self.e.iter().sum()
    }

    pub fn f_sum(&self) -> u64 {
        self.f.iter().sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.e_sum() == self.f_sum()
    }

    /// No integer occurs in both `e` and `f`.
    pub fn is_disjoint(&self) -> bool {
        !self.e.iter().any(|c| self.f.contains(c))
    }

    /// Distinct entries of `e` and `f`, ascending.
    pub fn distinct_entries(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.e.iter().chain(&self.f).copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn ensure_balanced(&self) -> Result<()> {
        if self.is_balanced() {
            Ok(())
        } else {
            Err(Error::Unbalanced {
                e_sum: self.e_sum(),
                f_sum: self.f_sum(),
            })
        }
    }

    pub fn ensure_l(&self, l: u64) -> Result<()> {
        if (1..=self.m()).contains(&l) {
            Ok(())
        } else {
            Err(Error::LOutOfRange { l, m: self.m() })
        }
    }

    /// `Q(n)` exactly; an integer for every `n` iff the Landau criterion holds.
    pub fn q_ratio(&self, n: u64) -> BigRational {
        let cache = FactorialCache::global();
        let product = |cs: &[u64]| {
            cs.iter().fold(BigUint::one(), |acc, &c| {
                acc * cache.factorial((c * n) as usize).as_ref()
            })
        };
        let num = product(&self.e);
        let den = product(&self.f);
        let (quot, rem) = num.div_rem(&den);
        if rem.is_zero() {
            BigRational::from_integer(quot.into())
        } else {
            BigRational::new(num.into(), den.into())
        }
    }

    /// `Q(0), ..., Q(max_n)`.
    pub fn q_values(&self, max_n: u64) -> Vec<BigRational> {
        (0..=max_n).map(|n| self.q_ratio(n)).collect()
    }

    /// `Delta(x)` for any rational `x`, with the mathematical floor.
    pub fn delta_at(&self, x: &BigRational) -> BigInt {
        let floor_sum = |cs: &[u64]| -> BigInt {
            cs.iter()
                .map(|&c| (x.numer() * BigInt::from(c)).div_floor(x.denom()))
                .sum()
        };
        floor_sum(&self.e) - floor_sum(&self.f)
    }

    /// `Delta(x)` for `x` in `[0, 1]`, where the value is bounded by the entry sums.
    pub(crate) fn delta_unit(&self, x: &BigRational) -> i64 {
        self.delta_at(x)
            .to_i64()
            .expect("Delta on [0, 1] is bounded by the entry sums")
    }

    /// Candidate breakpoints `i/c` for every entry `c` and `0 <= i < c`, sorted.
    pub fn breakpoints(&self) -> Vec<BigRational> {
        let mut pts: Vec<BigRational> = self
            .distinct_entries()
            .into_iter()
            .flat_map(|c| (0..c).map(move |i| BigRational::new(i.into(), c.into())))
            .collect();
        pts.sort();
        pts.dedup();
        pts
    }

    pub fn profile(&self) -> LandauProfile {
        let breakpoints = self.breakpoints();
        let values: Vec<i64> = breakpoints.iter().map(|b| self.delta_unit(b)).collect();
        let mut jumps = Vec::new();
        // Left limit at 0 is Delta(0^-) = |f| - |e|.
        let at_zero = values[0] - (self.f_sum() as i64 - self.e_sum() as i64);
        if at_zero != 0 {
            jumps.push((breakpoints[0].clone(), at_zero));
        }
        for i in 1..breakpoints.len() {
            let amplitude = values[i] - values[i - 1];
            if amplitude != 0 {
                jumps.push((breakpoints[i].clone(), amplitude));
            }
        }
        LandauProfile {
            breakpoints,
            values,
            jumps,
        }
    }

    pub fn classify(&self) -> Classification {
        let profile = self.profile();
        let m = self.m();
        let lower = BigRational::new(BigInt::one(), BigInt::from(m));
        let one = BigRational::one();
        let mut landau_witnesses = Vec::new();
        let mut case_i_witnesses = Vec::new();
        for (i, (start, &value)) in profile.breakpoints.iter().zip(&profile.values).enumerate() {
            let end = profile.breakpoints.get(i + 1).unwrap_or(&one);
            let mid = (start + end) / BigRational::from_integer(2.into());
            // Both the left endpoint and an interior point of each piece.
            let interior = self.delta_unit(&mid);
            debug_assert_eq!(interior, value);
            let piece_min = value.min(interior);
            if piece_min < 0 {
                landau_witnesses.push(start.clone());
            }
            if start >= &lower && piece_min < 1 {
                case_i_witnesses.push(start.clone());
            }
        }
        if self.delta_unit(&one) < 0 {
            landau_witnesses.push(one);
        }
        Classification {
            landau_integral: landau_witnesses.is_empty(),
            case_i: case_i_witnesses.is_empty(),
            landau_witnesses,
            case_i_witnesses,
        }
    }

    /// Refuses specs outside case (i), returning the first witness.
    pub fn ensure_case_i(&self) -> Result<Classification> {
        let c = self.classify();
        if let Some(w) = c.landau_witnesses.first() {
            return Err(Error::NotLandauIntegral { witness: w.clone() });
        }
        if let Some(w) = c.case_i_witnesses.first() {
            return Err(Error::CaseIFails { witness: w.clone() });
        }
        Ok(c)
    }

    /// `D_L = lcm(1, ..., floor(M / L))`.
    pub fn root_bound_dl(&self, l: u64) -> Result<BigUint> {
        self.ensure_l(l)?;
        Ok(lcm_up_to(self.m() / l))
    }

    /// Rewrites `Q(n)` as `C^n prod (a_i)_n / prod (b_j)_n` with common
    /// parameters cancelled.
    pub fn pochhammer_form(&self) -> Result<PochhammerForm> {
        self.ensure_balanced()?;
        let params = |cs: &[u64]| -> Vec<BigRational> {
            let mut v: Vec<BigRational> = cs
                .iter()
                .flat_map(|&c| (1..=c).map(move |j| BigRational::new(j.into(), c.into())))
                .collect();
            v.sort();
            v
        };
        let num = params(&self.e);
        let den = params(&self.f);
        let (mut numerator, mut denominator) = (Vec::new(), Vec::new());
        let (mut i, mut j) = (0, 0);
        while i < num.len() || j < den.len() {
            match (num.get(i), den.get(j)) {
                (Some(a), Some(b)) if a == b => {
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a < b => {
                    numerator.push(a.clone());
                    i += 1;
                }
                (Some(_), Some(b)) | (None, Some(b)) => {
                    denominator.push(b.clone());
                    j += 1;
                }
                (Some(a), None) => {
                    numerator.push(a.clone());
                    i += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        let power = |cs: &[u64]| {
            cs.iter()
                .fold(BigInt::one(), |acc, &c| acc * Pow::pow(BigInt::from(c), c))
        };
        let constant = BigRational::new(power(&self.e), power(&self.f));
        Ok(PochhammerForm {
            numerator,
            denominator,
            constant,
        })
    }
}

impl FromStr for FactorialRatioSpec {
    type Err = Error;

    /// Parses `"e1,e2,.../f1,f2,..."`, e.g. `"6/3,2,1"`.
    fn from_str(text: &str) -> Result<Self> {
        let malformed = |reason: &str| Error::MalformedSpec {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let (e, f) = text
            .trim()
            .split_once('/')
            .ok_or_else(|| malformed("expected exactly one '/'"))?;
        let parse_list = |part: &str| -> Result<Vec<u64>> {
            part.split(',')
                .map(|tok| {
                    let tok = tok.trim();
                    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
                        return Err(malformed("entries must be nonnegative decimal integers"));
                    }
                    tok.parse::<u64>()
                        .map_err(|_| malformed("entry does not fit in 64 bits"))
                })
                .collect()
        };
        FactorialRatioSpec::new(parse_list(e)?, parse_list(f)?)
    }
}

impl fmt::Display for FactorialRatioSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |cs: &[u64]| {
            cs.iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{}/{}", join(&self.e), join(&self.f))
    }
}

impl Serialize for FactorialRatioSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Piecewise-constant structure of `Delta` on `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LandauProfile {
    pub breakpoints: Vec<BigRational>,
    /// `values[i]` is `Delta` on `[breakpoints[i], breakpoints[i+1])`.
    pub values: Vec<i64>,
    /// Nonzero jumps `(abscissa, amplitude)`.
    pub jumps: Vec<(BigRational, i64)>,
}

impl LandauProfile {
    /// `Delta(x)` for `x` in `[0, 1)`, read off the pieces.
    pub fn value_at(&self, x: &BigRational) -> i64 {
        let idx = match self.breakpoints.binary_search(x) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        self.values[idx]
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }
}

impl Serialize for LandauProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let bps: Vec<RationalRepr> = self.breakpoints.iter().map(RationalRepr::from).collect();
        let jumps: Vec<(RationalRepr, i64)> = self
            .jumps
            .iter()
            .map(|(x, a)| (RationalRepr::from(x), *a))
            .collect();
        let mut st = s.serialize_struct("LandauProfile", 3)?;
        st.serialize_field("breakpoints", &bps)?;
        st.serialize_field("values", &self.values)?;
        st.serialize_field("jumps", &jumps)?;
        st.end()
    }
}

/// Landau criterion and the case (i) / case (ii) dichotomy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    /// `Delta >= 0` on `[0, 1]`.
    pub landau_integral: bool,
    /// `Delta >= 1` on `[1/M, 1)`.
    pub case_i: bool,
    #[serde(serialize_with = "crate::json::rational_vec")]
    pub landau_witnesses: Vec<BigRational>,
    /// Left endpoints of pieces inside `[1/M, 1)` where `Delta < 1`.
    #[serde(serialize_with = "crate::json::rational_vec")]
    pub case_i_witnesses: Vec<BigRational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PochhammerForm {
    pub numerator: Vec<BigRational>,
    pub denominator: Vec<BigRational>,
    pub constant: BigRational,
}

impl PochhammerForm {
    /// `C^n prod (a_i)_n / prod (b_j)_n`.
    pub fn evaluate(&self, n: u64) -> BigRational {
        let rising = |x: &BigRational| -> BigRational {
            (0..n).fold(BigRational::one(), |acc, k| {
                acc * (x + BigRational::from_integer(k.into()))
            })
        };
        let mut value = Pow::pow(&self.constant, n);
        for a in &self.numerator {
            value *= rising(a);
        }
        for b in &self.denominator {
            value /= rising(b);
        }
        value
    }
}
