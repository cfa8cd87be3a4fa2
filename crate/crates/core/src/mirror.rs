//! The series `F`, `G`, `G_L`, the canonical coordinate `q = z exp(G/F)` and
//! the mirror-type maps `q_L = exp(G_L/F)`, plus the root-exponent logic
//! built on them.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{is_integer, primes_up_to, vp_int, HarmonicTable};
use crate::error::{Error, Result};
use crate::landau::FactorialRatioSpec;
use crate::padic::{vp_rational, Valuation};
use crate::series::{IntegralityReport, TruncatedSeries};

/// Known Wolstenholme primes, used by the `Xi_N` / `Omega_N` exponents.
pub const KNOWN_WOLSTENHOLME_PRIMES: [u64; 2] = [16843, 2_124_679];

/// Default truncation order for verification commands.
pub const DEFAULT_ORDER: usize = 40;

/// Shared ingredients for every series attached to one spec: the values
/// `Q(0..=N)` and the harmonic numbers `H_0..=H_{M N}`.
#[derive(Debug, Clone)]
pub struct MirrorMaps {
    spec: FactorialRatioSpec,
    order: usize,
    q_values: Vec<BigRational>,
    harmonic: HarmonicTable,
    f: TruncatedSeries,
}

impl MirrorMaps {
    pub fn new(spec: &FactorialRatioSpec, order: usize) -> Result<Self> {
        spec.ensure_balanced()?;
        if order == 0 {
            return Err(Error::Precondition("truncation order must be >= 1".into()));
        }
        let q_values = spec.q_values(order as u64);
        let harmonic = HarmonicTable::up_to(spec.m() as usize * order);
        let f = TruncatedSeries::new(q_values.clone())?;
        Ok(Self {
            spec: spec.clone(),
            order,
            q_values,
            harmonic,
            f,
        })
    }

    pub fn spec(&self) -> &FactorialRatioSpec {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn q_values(&self) -> &[BigRational] {
        &self.q_values
    }

    pub fn harmonic(&self, n: usize) -> &BigRational {
        self.harmonic.get(n)
    }

    pub fn f(&self) -> &TruncatedSeries {
        &self.f
    }

    /// `G_n = Q(n) (sum e_i H_{e_i n} - sum f_j H_{f_j n})`.
    pub fn g(&self) -> TruncatedSeries {
        let weighted = |cs: &[u64], n: usize| -> BigRational {
            cs.iter()
                .map(|&c| self.harmonic.get(c as usize * n) * BigRational::from_integer(c.into()))
                .sum()
        };
        let coeffs = (0..=self.order)
            .map(|n| {
                if n == 0 {
                    BigRational::zero()
                } else {
                    &self.q_values[n] * (weighted(self.spec.e(), n) - weighted(self.spec.f(), n))
                }
            })
            .collect();
        TruncatedSeries::new(coeffs).expect("order >= 1")
    }

    /// `G_{L,n} = Q(n) H_{L n}`.
    pub fn g_l(&self, l: u64) -> Result<TruncatedSeries> {
        self.spec.ensure_l(l)?;
        let coeffs = (0..=self.order)
            .map(|n| &self.q_values[n] * self.harmonic.get(l as usize * n))
            .collect();
        TruncatedSeries::new(coeffs)
    }

    /// `z^{-1} q(z) = exp(G/F)`.
    pub fn q_reduced(&self) -> TruncatedSeries {
        self.g()
            .div(&self.f)
            .and_then(|s| s.exp())
            .expect("F_0 = 1 and G_0 = 0")
    }

    /// `q_L = exp(G_L/F)`.
    pub fn q_l(&self, l: u64) -> Result<TruncatedSeries> {
        self.g_l(l)?.div(&self.f)?.exp()
    }
}

/// All series attached to a spec at one truncation order.
#[derive(Debug, Clone)]
pub struct MirrorMapBundle {
    pub spec: FactorialRatioSpec,
    pub order: usize,
    pub f: TruncatedSeries,
    pub g: TruncatedSeries,
    pub g_l: BTreeMap<u64, TruncatedSeries>,
    pub q_reduced: TruncatedSeries,
    pub q_l: BTreeMap<u64, TruncatedSeries>,
}

pub fn build_bundle(spec: &FactorialRatioSpec, order: usize) -> Result<MirrorMapBundle> {
    let maps = MirrorMaps::new(spec, order)?;
    let g = maps.g();
    let q_reduced = maps.q_reduced();
    let per_l: Vec<(u64, TruncatedSeries, TruncatedSeries)> = (1..=spec.m())
        .into_par_iter()
        .map(|l| {
            let g_l = maps.g_l(l)?;
            let q_l = g_l.div(maps.f())?.exp()?;
            Ok((l, g_l, q_l))
        })
        .collect::<Result<_>>()?;
    let mut g_l = BTreeMap::new();
    let mut q_l = BTreeMap::new();
    for (l, gs, qs) in per_l {
        g_l.insert(l, gs);
        q_l.insert(l, qs);
    }
    Ok(MirrorMapBundle {
        spec: spec.clone(),
        order,
        f: maps.f().clone(),
        g,
        g_l,
        q_reduced,
        q_l,
    })
}

/// Checks `z^{-1} q = prod q_{e_i}^{e_i} / prod q_{f_j}^{f_j}` coefficientwise.
pub fn product_relation_check(bundle: &MirrorMapBundle) -> bool {
    let mut rhs = TruncatedSeries::one(bundle.order);
    for (&c, sign) in bundle
        .spec
        .e()
        .iter()
        .map(|c| (c, 1i64))
        .chain(bundle.spec.f().iter().map(|c| (c, -1i64)))
    {
        let factor = bundle.q_l[&c]
            .pow(sign * c as i64)
            .expect("q_L has constant term 1");
        rhs = &rhs * &factor;
    }
    rhs == bundle.q_reduced
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootCheck {
    pub l: u64,
    #[serde(serialize_with = "crate::json::display")]
    pub exponent: BigUint,
    pub report: IntegralityReport,
}

/// For each `L` in `1..=M`, the integrality report of `q_L^(1/D_L)`.
///
/// Refuses specs outside case (i): there the conclusion fails for almost all
/// primes and a passing prefix would be misleading.
pub fn verify_root_bounds(spec: &FactorialRatioSpec, order: usize) -> Result<Vec<RootCheck>> {
    spec.ensure_case_i()?;
    let maps = MirrorMaps::new(spec, order)?;
    (1..=spec.m())
        .into_par_iter()
        .map(|l| {
            let exponent = spec.root_bound_dl(l)?;
            let root = maps.q_l(l)?.vth_root(exponent.to_u64().expect("D_L fits in u64"))?;
            Ok(RootCheck {
                l,
                exponent,
                report: root.integrality(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisibilityCheck {
    pub l: u64,
    /// `theta / gcd(L, theta)`
    pub required: u64,
    #[serde(serialize_with = "crate::json::display")]
    pub d_l: BigUint,
    pub divides: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThetaVerdict {
    pub theta: u64,
    pub hypothesis_holds: bool,
    pub failing_l: Option<u64>,
    pub checks: Vec<DivisibilityCheck>,
}

/// Checks whether `theta / gcd(L, theta)` divides `D_L` for every entry `L`
/// of `e` and `f`; when it does, `(z^{-1} q)^(1/theta)` has integer
/// coefficients.
pub fn root_exponent_for_q(spec: &FactorialRatioSpec, theta: u64) -> Result<ThetaVerdict> {
    let m = spec.m();
    if theta == 0 || m % theta != 0 {
        return Err(Error::ThetaNotDivisor { theta, m });
    }
    spec.ensure_case_i()?;
    let checks: Vec<DivisibilityCheck> = spec
        .distinct_entries()
        .into_iter()
        .map(|l| {
            let required = theta / l.gcd(&theta);
            let d_l = spec.root_bound_dl(l).expect("entries lie in 1..=M");
            let divides = (&d_l % BigUint::from(required)).is_zero();
            DivisibilityCheck {
                l,
                required,
                d_l,
                divides,
            }
        })
        .collect();
    let failing_l = checks.iter().find(|c| !c.divides).map(|c| c.l);
    Ok(ThetaVerdict {
        theta,
        hypothesis_holds: failing_l.is_none(),
        failing_l,
        checks,
    })
}

/// Integrality of `(z^{-1} q)^(1/v)` through `order`.
pub fn check_root_of_q(spec: &FactorialRatioSpec, v: u64, order: usize) -> Result<IntegralityReport> {
    let maps = MirrorMaps::new(spec, order)?;
    Ok(maps.q_reduced().vth_root(v)?.integrality())
}

/// Integrality of `q_L^(1/v)` through `order`.
pub fn check_root_of_q_l(
    spec: &FactorialRatioSpec,
    l: u64,
    v: u64,
    order: usize,
) -> Result<IntegralityReport> {
    let maps = MirrorMaps::new(spec, order)?;
    Ok(maps.q_l(l)?.vth_root(v)?.integrality())
}

/// `Theta_L`, the reduced denominator of `H_L`.
pub fn theta_l(l: u64) -> BigUint {
    crate::arith::harmonic(l)
        .denom()
        .to_biguint()
        .expect("denominators are positive")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentEntry {
    pub l: u64,
    #[serde(serialize_with = "crate::json::display")]
    pub d_l: BigUint,
    #[serde(serialize_with = "crate::json::display")]
    pub theta_l: BigUint,
    /// `Q(1) / Theta_L`, reported when `f = (1, ..., 1)`.
    #[serde(serialize_with = "crate::json::display_opt")]
    pub kr_exponent: Option<BigUint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicExponent {
    pub n: u64,
    /// `prod_{p <= N} p^{min(2 + bump(p), v_p(h))}`; may be a proper fraction.
    #[serde(serialize_with = "crate::json::rational")]
    pub factor: BigRational,
    /// The predicted root exponent (always an integer).
    #[serde(serialize_with = "crate::json::rational")]
    pub root_exponent: BigRational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceExponents {
    pub entries: Vec<ExponentEntry>,
    /// `Xi_N` and the exponent `Xi_N Q(1)` for `q_N`.
    pub xi: Option<HarmonicExponent>,
    /// `Omega_N` and the exponent `Omega_N Q(1) q_1 N` for `z^{-1} q`.
    pub omega: Option<HarmonicExponent>,
}

/// `(N, number of copies)` when `e = (N, ..., N)` with `N >= 2` and
/// `f = (1, ..., 1)` balanced.
pub fn uniform_shape(spec: &FactorialRatioSpec) -> Result<(u64, u64)> {
    let n = spec.e()[0];
    let ok = n >= 2
        && spec.e().iter().all(|&c| c == n)
        && spec.f().iter().all(|&c| c == 1)
        && spec.is_balanced();
    if ok {
        Ok((n, spec.e().len() as u64))
    } else {
        Err(Error::ShapeMismatch {
            expected: "e = (N, ..., N) with N >= 2, f = (1, ..., 1), |e| = |f|",
        })
    }
}

fn harmonic_prime_product(n: u64, h: &BigRational, bump: impl Fn(u64) -> bool) -> BigRational {
    let mut factor = BigRational::one();
    for p in primes_up_to(n) {
        let cap = 2 + i64::from(bump(p));
        let v = match vp_rational(h, p).expect("p is prime") {
            Valuation::Finite(v) => v,
            Valuation::Infinite => cap,
        };
        let e = cap.min(v);
        let pp = BigRational::from_integer(BigInt::from(p));
        factor *= num_traits::Pow::pow(&pp, e as i32);
    }
    factor
}

/// `Xi_N`: `xi(p, N) = 1` iff `p` is a Wolstenholme prime or `p | N`.
pub fn xi_factor(n: u64, wolstenholme: &[u64]) -> BigRational {
    let h = crate::arith::harmonic(n);
    harmonic_prime_product(n, &h, |p| wolstenholme.contains(&p) || n % p == 0)
}

/// `Omega_N`: `omega(p, N) = 1` iff `p` is a Wolstenholme prime or `N = ±1 mod p`.
pub fn omega_factor(n: u64, wolstenholme: &[u64]) -> BigRational {
    let h = crate::arith::harmonic(n) - BigRational::one();
    harmonic_prime_product(n, &h, |p| {
        wolstenholme.contains(&p) || n % p == 1 || n % p == p - 1
    })
}

/// Root exponents from earlier results, for empirical comparison only.
pub fn reference_exponents(
    spec: &FactorialRatioSpec,
    wolstenholme: &[u64],
) -> Result<ReferenceExponents> {
    let q1 = spec.q_ratio(1);
    let all_ones = spec.f().iter().all(|&c| c == 1);
    let entries = (1..=spec.m())
        .map(|l| {
            let theta = theta_l(l);
            let kr_exponent = if all_ones && is_integer(&q1) {
                let q1 = q1.numer().to_biguint().expect("Q(1) > 0");
                let (quot, rem) = q1.div_rem(&theta);
                rem.is_zero().then_some(quot)
            } else {
                None
            };
            Ok(ExponentEntry {
                l,
                d_l: spec.root_bound_dl(l)?,
                theta_l: theta,
                kr_exponent,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (xi, omega) = match uniform_shape(spec) {
        Ok((n, copies)) => {
            let xi = xi_factor(n, wolstenholme);
            let omega = omega_factor(n, wolstenholme);
            let scale = BigRational::from_integer(BigInt::from(copies * n));
            (
                Some(HarmonicExponent {
                    n,
                    root_exponent: &xi * &q1,
                    factor: xi,
                }),
                Some(HarmonicExponent {
                    n,
                    root_exponent: &omega * &q1 * scale,
                    factor: omega,
                }),
            )
        }
        Err(_) => (None, None),
    };
    Ok(ReferenceExponents { entries, xi, omega })
}

/// Which series a witness was found in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Target {
    QReduced,
    QL(u64),
}

impl Serialize for Target {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Target::QReduced => s.serialize_str("q"),
            Target::QL(l) => s.collect_str(&format_args!("q_{l}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonIntegralityWitness {
    pub prime: u64,
    pub target: Target,
    pub index: usize,
    pub valuation: i64,
}

fn first_negative_valuation(series: &TruncatedSeries, primes: &[u64]) -> Option<(u64, usize, i64)> {
    for &p in primes {
        for (index, c) in series.coeffs().iter().enumerate() {
            if c.denom().is_one() {
                continue;
            }
            let v = vp_int(c.denom(), p);
            if v > 0 {
                return Some((p, index, -i64::from(v)));
            }
        }
    }
    None
}

/// Searches `z^{-1} q` and then each `q_L` for a coefficient with negative
/// `p`-adic valuation, `p <= prime_bound`.
///
/// Within a series the smallest prime wins, then the smallest index; `q_L`
/// is only built when `z^{-1} q` has no witness.
pub fn nonintegrality_witness(
    spec: &FactorialRatioSpec,
    prime_bound: u64,
    order: usize,
) -> Result<Option<NonIntegralityWitness>> {
    let maps = MirrorMaps::new(spec, order)?;
    let primes = primes_up_to(prime_bound);
    let found = first_negative_valuation(&maps.q_reduced(), &primes)
        .map(|hit| (Target::QReduced, hit))
        .or_else(|| {
            (1..=spec.m()).find_map(|l| {
                let series = maps.q_l(l).expect("l in range");
                first_negative_valuation(&series, &primes).map(|hit| (Target::QL(l), hit))
            })
        });
    Ok(found.map(|(target, (prime, index, valuation))| NonIntegralityWitness {
        prime,
        target,
        index,
        valuation,
    }))
}
