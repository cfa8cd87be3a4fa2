//! p-adic valuations of exact rationals and the membership predicates that
//! reduce integrality of `q_L^(1/D_L)` to congruences on `Q` and harmonic
//! numbers.
//!
//! Every quantity here is a rational number, so membership in `p^k Z_p` is
//! decided exactly by comparing valuations.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{floor_log, fract_rational, harmonic_range, is_prime, vp_int, HarmonicTable};
use crate::error::{Error, Result};
use crate::landau::FactorialRatioSpec;
use crate::series::TruncatedSeries;

/// `v_p(x)`, with `v_p(0) = +inf` ordered above every integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn at_least(self, k: i64) -> bool {
        self >= Valuation::Finite(k)
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// `self - k`, saturating at infinity.
    fn slack(self, k: i64) -> Valuation {
        match self {
            Valuation::Finite(v) => Valuation::Finite(v - k),
            Valuation::Infinite => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("+inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_str("+inf"),
        }
    }
}

pub fn ensure_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

pub fn vp_rational(x: &BigRational, p: u64) -> Result<Valuation> {
    ensure_prime(p)?;
    Ok(vp_unchecked(x, p))
}

fn vp_unchecked(x: &BigRational, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let num = i64::from(vp_int(x.numer(), p));
    let den = i64::from(vp_int(x.denom(), p));
    Valuation::Finite(num - den)
}

/// Verdict "value in `p^k Z_p`".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PadicMembershipReport {
    pub prime: u64,
    pub required_valuation: i64,
    pub value_description: String,
    pub actual_valuation: Valuation,
    pub member: bool,
    /// Grid coordinates of the reported point (first violation, or the
    /// tightest point when everything passes).
    pub witness: Option<Vec<i64>>,
    pub points_checked: usize,
}

impl PadicMembershipReport {
    fn single(
        prime: u64,
        required: i64,
        description: String,
        actual: Valuation,
        witness: Option<Vec<i64>>,
    ) -> Self {
        Self {
            prime,
            required_valuation: required,
            value_description: description,
            actual_valuation: actual,
            member: actual.at_least(required),
            witness,
            points_checked: 1,
        }
    }
}

// One grid point of a scan: coordinates, required and actual valuation.
struct Point {
    coords: Vec<i64>,
    required: i64,
    actual: Valuation,
}

// The first failing point in grid order, else the point with least slack.
fn summarize(prime: u64, description: String, points: Vec<Point>) -> PadicMembershipReport {
    let points_checked = points.len();
    let chosen = points
        .iter()
        .find(|pt| !pt.actual.at_least(pt.required))
        .or_else(|| {
            points
                .iter()
                .enumerate()
                .min_by_key(|(i, pt)| (pt.actual.slack(pt.required), *i))
                .map(|(_, pt)| pt)
        });
    match chosen {
        Some(pt) => PadicMembershipReport {
            prime,
            required_valuation: pt.required,
            value_description: description,
            actual_valuation: pt.actual,
            member: points.iter().all(|q| q.actual.at_least(q.required)),
            witness: Some(pt.coords.clone()),
            points_checked,
        },
        None => PadicMembershipReport {
            prime,
            required_valuation: 0,
            value_description: description,
            actual_valuation: Valuation::Infinite,
            member: true,
            witness: None,
            points_checked: 0,
        },
    }
}

/// `Q(n)` for `0 <= n <= max`, and `Q(n) = 0` for negative `n`.
#[derive(Debug, Clone)]
struct QTable {
    values: Vec<BigRational>,
    zero: BigRational,
}

impl QTable {
    fn new(spec: &FactorialRatioSpec, max: u64) -> Self {
        Self {
            values: spec.q_values(max),
            zero: BigRational::zero(),
        }
    }

    fn get(&self, n: i64) -> &BigRational {
        if n < 0 {
            &self.zero
        } else {
            &self.values[n as usize]
        }
    }
}

/// Tables shared by the predicates for one spec.
#[derive(Debug, Clone)]
pub struct PadicContext {
    spec: FactorialRatioSpec,
    q: QTable,
    h: HarmonicTable,
}

impl PadicContext {
    /// Tables for `Q(0..=max_q)` and `H_0..=H_{max_h}`.
    pub fn new(spec: &FactorialRatioSpec, max_q: u64, max_h: u64) -> Self {
        Self {
            spec: spec.clone(),
            q: QTable::new(spec, max_q),
            h: HarmonicTable::up_to(max_h as usize),
        }
    }

    /// Sized for every argument reached with `a < p`, `K <= k_max`, `L <= M`.
    pub fn for_grid(spec: &FactorialRatioSpec, p: u64, k_max: u64) -> Self {
        let max_q = (p - 1) + k_max * p;
        Self::new(spec, max_q, spec.m() * max_q)
    }

    fn q(&self, n: i64) -> &BigRational {
        self.q.get(n)
    }

    fn h(&self, n: u64) -> BigRational {
        if (n as usize) < self.h.len() {
            self.h.get(n as usize).clone()
        } else {
            harmonic_range(0, n)
        }
    }

    // Q(a+jp) Q(K-j) - Q(j) Q(a+(K-j)p)
    fn antisymmetric_term(&self, a: u64, k: u64, p: u64, j: u64) -> BigRational {
        let (a, k, p, j) = (a as i64, k as i64, p as i64, j as i64);
        self.q(a + j * p) * self.q(k - j) - self.q(j) * self.q(a + (k - j) * p)
    }

    /// `Phi_{L,p}(a+Kp) = sum_{j=0}^K Q(K-j) Q(a+jp) (H_{L(K-j)} - p H_{L(a+jp)})`,
    /// the coefficient of `z^{a+Kp}` in `F(z) G_L(z^p) - p F(z^p) G_L(z)`.
    pub fn phi(&self, l: u64, p: u64, a: u64, k: u64) -> BigRational {
        let pr = BigRational::from_integer(p.into());
        (0..=k)
            .map(|j| {
                let prod = self.q((k - j) as i64) * self.q((a + j * p) as i64);
                if prod.is_zero() {
                    return BigRational::zero();
                }
                prod * (self.h(l * (k - j)) - &pr * self.h(l * (a + j * p)))
            })
            .sum()
    }

    /// `S(a,K,s,p,m) = sum_{j=mp^s}^{(m+1)p^s-1} (Q(a+jp)Q(K-j) - Q(j)Q(a+(K-j)p))`.
    pub fn s_sum(&self, a: u64, k: u64, s: u32, p: u64, m: u64) -> BigRational {
        let block = p.pow(s);
        let lo = m * block;
        // Every term with j > K contains a negative argument on both sides.
        let hi = ((m + 1) * block).min(k + 1);
        (lo..hi).map(|j| self.antisymmetric_term(a, k, p, j)).sum()
    }

    /// `H_{L m p^s} - H_{L floor(m/p) p^{s+1}}`.
    pub fn harmonic_block_difference(&self, l: u64, s: u32, p: u64, m: u64) -> BigRational {
        let hi = l * m * p.pow(s);
        let lo = l * (m / p) * p.pow(s + 1);
        harmonic_range(lo, hi)
    }

    /// `W_L(a,K,s,p,m) = (H_{Lmp^s} - H_{L floor(m/p) p^{s+1}}) S(a,K,s,p,m)`.
    pub fn w_term(&self, l: u64, a: u64, k: u64, s: u32, p: u64, m: u64) -> BigRational {
        let s_value = self.s_sum(a, k, s, p, m);
        if s_value.is_zero() {
            return s_value;
        }
        self.harmonic_block_difference(l, s, p, m) * s_value
    }

    /// `sum_{j=0}^K H_{Lj} (Q(a+jp)Q(K-j) - Q(j)Q(a+(K-j)p))`.
    pub fn weighted_antisymmetric_sum(&self, l: u64, a: u64, k: u64, p: u64) -> BigRational {
        (0..=k)
            .map(|j| {
                let t = self.antisymmetric_term(a, k, p, j);
                if t.is_zero() {
                    t
                } else {
                    self.h(l * j) * t
                }
            })
            .sum()
    }

    /// Both sides of Dwork's block decomposition
    /// `sum_j H_{Lj} T_j = sum_{s=0}^r sum_{m=0}^{p^{r+1-s}-1} W_L(a,K,s,p,m)`
    /// with `r` the least integer such that `K < p^r`.
    pub fn decomposition_sides(&self, l: u64, a: u64, k: u64, p: u64) -> (BigRational, BigRational) {
        let lhs = self.weighted_antisymmetric_sum(l, a, k, p);
        let mut r = 0u32;
        while p.pow(r) <= k {
            r += 1;
        }
        let mut rhs = BigRational::zero();
        for s in 0..=r {
            let block = p.pow(s);
            for m in 0..p.pow(r + 1 - s) {
                // S vanishes once the block starts past K.
                if m * block > k {
                    break;
                }
                rhs += self.w_term(l, a, k, s, p, m);
            }
        }
        (lhs, rhs)
    }

    /// `Phi + sum_j H_{Lj} T_j`, which lies in `p D_L Z_p` in case (i).
    pub fn phi_correction_residual(&self, l: u64, p: u64, a: u64, k: u64) -> BigRational {
        self.phi(l, p, a, k) + self.weighted_antisymmetric_sum(l, a, k, p)
    }

    /// `p H_{L(a+jp)} - H_{Lj} - sum_{i=1}^{floor(La/p)} 1/(Lj+i)`.
    pub fn harmonic_shift_residual(&self, l: u64, p: u64, a: u64, j: u64) -> BigRational {
        let lhs = BigRational::from_integer(p.into()) * self.h(l * (a + j * p));
        let tail = harmonic_range(l * j, l * j + l * a / p);
        lhs - self.h(l * j) - tail
    }

    fn m(&self) -> u64 {
        self.spec.m()
    }
}

fn check_args(spec: &FactorialRatioSpec, l: u64, p: u64, a: u64) -> Result<()> {
    ensure_prime(p)?;
    spec.ensure_l(l)?;
    if a >= p {
        return Err(Error::Precondition(format!("a = {a} must be < p = {p}")));
    }
    Ok(())
}

fn vp_dl(spec: &FactorialRatioSpec, l: u64, p: u64) -> i64 {
    let d = spec.root_bound_dl(l).expect("l validated");
    i64::from(vp_int(&BigInt::from(d), p))
}

/// `v_p(Q(n)) = sum_{l >= 1} Delta({n / p^l})`; terms vanish once `p^l > nM`.
pub fn vp_q_ratio_via_delta(spec: &FactorialRatioSpec, n: u64, p: u64) -> Result<i64> {
    ensure_prime(p)?;
    spec.ensure_balanced()?;
    let bound = BigUint::from(n) * spec.m();
    let mut pow = BigUint::from(p);
    let mut total = 0i64;
    while pow <= bound {
        let x = BigRational::new(BigInt::from(n), BigInt::from(pow.clone()));
        total += spec.delta_unit(&fract_rational(&x));
        pow *= p;
    }
    Ok(total)
}

/// Dieudonne-Dwork: `F in 1 + z Z_p[[z]]` iff `F(z^p)/F(z)^p in 1 + p z Z_p[[z]]`.
///
/// The report carries the least valuation among non-constant coefficients of
/// the quotient and the index where it occurs.
pub fn dwork_quotient_test(series: &TruncatedSeries, p: u64) -> Result<PadicMembershipReport> {
    ensure_prime(p)?;
    if !series.coeff(0).is_one() {
        return Err(Error::ConstantTermNotOne);
    }
    let quotient = series
        .substitute_power(p as usize)
        .div(&series.pow(p as i64)?)?;
    let points = quotient.coeffs()[1..]
        .iter()
        .enumerate()
        .map(|(i, c)| Point {
            coords: vec![i as i64 + 1],
            required: 1,
            actual: vp_unchecked(c, p),
        })
        .collect();
    Ok(summarize(
        p,
        format!("F(z^{p})/F(z)^{p} - 1 through order {}", series.order()),
        points,
    ))
}

/// `e^f in 1 + z Z_p[[z]]` iff `f(z^p) - p f(z) in p z Z_p[[z]]`.
pub fn dwork_exp_test(f: &TruncatedSeries, p: u64) -> Result<PadicMembershipReport> {
    ensure_prime(p)?;
    if !f.coeff(0).is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    let pr = BigRational::from_integer(p.into());
    let diff = &f.substitute_power(p as usize) - &f.scale(&pr);
    let points = diff
        .coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| Point {
            coords: vec![i as i64],
            required: 1,
            actual: vp_unchecked(c, p),
        })
        .collect();
    Ok(summarize(
        p,
        format!("f(z^{p}) - {p} f(z) through order {}", f.order()),
        points,
    ))
}

pub fn phi(spec: &FactorialRatioSpec, l: u64, p: u64, a: u64, k: u64) -> Result<BigRational> {
    check_args(spec, l, p, a)?;
    Ok(PadicContext::for_grid(spec, p, k).phi(l, p, a, k))
}

/// Membership of `Phi_{L,p}(a+Kp)` in `p D_L Z_p`.
pub fn phi_membership(
    spec: &FactorialRatioSpec,
    l: u64,
    p: u64,
    a: u64,
    k: u64,
) -> Result<PadicMembershipReport> {
    let value = phi(spec, l, p, a, k)?;
    Ok(PadicMembershipReport::single(
        p,
        1 + vp_dl(spec, l, p),
        format!("Phi_{{{l},{p}}}({a}+{k}*{p})"),
        vp_unchecked(&value, p),
        Some(vec![a as i64, k as i64]),
    ))
}

/// Grid bounds for the scans. `a` always ranges over `0..p` capped by `a_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScanBounds {
    pub a_max: Option<u64>,
    pub k_max: u64,
    pub s_max: u32,
    pub m_max: u64,
    pub j_max: u64,
}

impl Default for ScanBounds {
    fn default() -> Self {
        Self {
            a_max: None,
            k_max: 10,
            s_max: 2,
            m_max: 10,
            j_max: 15,
        }
    }
}

impl ScanBounds {
    fn a_range(&self, p: u64) -> std::ops::Range<u64> {
        0..self.a_max.map_or(p, |a| (a + 1).min(p))
    }
}

/// `Phi_{L,p}(a+Kp) in p D_L Z_p` over `a < p`, `K <= k_max`.
pub fn phi_membership_scan(
    spec: &FactorialRatioSpec,
    l: u64,
    p: u64,
    bounds: &ScanBounds,
) -> Result<PadicMembershipReport> {
    check_args(spec, l, p, 0)?;
    let ctx = PadicContext::for_grid(spec, p, bounds.k_max);
    let required = 1 + vp_dl(spec, l, p);
    let grid: Vec<(u64, u64)> = bounds
        .a_range(p)
        .flat_map(|a| (0..=bounds.k_max).map(move |k| (a, k)))
        .collect();
    let points = grid
        .into_par_iter()
        .map(|(a, k)| Point {
            coords: vec![a as i64, k as i64],
            required,
            actual: vp_unchecked(&ctx.phi(l, p, a, k), p),
        })
        .collect();
    Ok(summarize(
        p,
        format!("Phi_{{{l},{p}}}(a+Kp) in p D_{l} Z_p; witness [a, K]"),
        points,
    ))
}

pub fn s_sum(spec: &FactorialRatioSpec, a: u64, k: u64, s: u32, p: u64, m: u64) -> Result<BigRational> {
    ensure_prime(p)?;
    if a >= p {
        return Err(Error::Precondition(format!("a = {a} must be < p = {p}")));
    }
    Ok(PadicContext::for_grid(spec, p, k).s_sum(a, k, s, p, m))
}

/// `mu_p(m)`, the number of `l >= 1` with `{m/p^l}` in `[1/M, 1)`.
pub fn mu(big_m: u64, p: u64, m: u64) -> u32 {
    let bound = BigUint::from(m) * big_m;
    let mut pow = BigUint::from(p);
    let mut count = 0;
    while pow <= bound {
        if frac_at_least(&BigUint::from(m), &pow, big_m) {
            count += 1;
        }
        pow *= p;
    }
    count
}

/// `(mu_p(m), g_p(m) = p^{mu_p(m)})`.
pub fn mu_and_g(spec: &FactorialRatioSpec, p: u64, m: u64) -> Result<(u32, BigUint)> {
    ensure_prime(p)?;
    let mu = mu(spec.m(), p, m);
    Ok((mu, BigUint::from(p).pow(mu)))
}

// {x / d} >= 1/M  <=>  M (x mod d) >= d
fn frac_at_least(x: &BigUint, d: &BigUint, big_m: u64) -> bool {
    (x % d) * big_m >= *d
}

pub fn w_term(
    spec: &FactorialRatioSpec,
    l: u64,
    a: u64,
    k: u64,
    s: u32,
    p: u64,
    m: u64,
) -> Result<BigRational> {
    check_args(spec, l, p, a)?;
    Ok(PadicContext::for_grid(spec, p, k).w_term(l, a, k, s, p, m))
}

/// Evaluates both sides of Dwork's decomposition and compares them.
pub fn dwork_decomposition_check(
    spec: &FactorialRatioSpec,
    l: u64,
    a: u64,
    k: u64,
    p: u64,
) -> Result<bool> {
    check_args(spec, l, p, a)?;
    let (lhs, rhs) = PadicContext::for_grid(spec, p, k).decomposition_sides(l, a, k, p);
    Ok(lhs == rhs)
}

/// For `l` in `v_p(m)+1 ..= v_p(m)+beta`, `beta = floor(log_p M)`:
/// `{m / p^l} >= 1/M`.
pub fn valuation_run_holds(big_m: u64, p: u64, m: u64) -> bool {
    assert!(m >= 1 && big_m >= 1);
    let beta = floor_log(p, &BigRational::from_integer(big_m.into()));
    let v = vp_int(&BigInt::from(m), p);
    let m = BigUint::from(m);
    (v + 1..=v + beta).all(|l| frac_at_least(&m, &BigUint::from(p).pow(l), big_m))
}

pub fn valuation_run_check(spec: &FactorialRatioSpec, p: u64, m: u64) -> Result<bool> {
    ensure_prime(p)?;
    if m == 0 {
        return Err(Error::Precondition("m must be >= 1".into()));
    }
    Ok(valuation_run_holds(spec.m(), p, m))
}

/// How many consecutive `l` starting at `s` satisfy
/// `{(a + m p^s)/p^l} >= 1/M`, against the `v_p(Lm+u) + alpha + 1` the bound
/// requires.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FractionRunOutcome {
    pub required: u32,
    pub satisfied: u32,
}

impl FractionRunOutcome {
    pub fn holds(&self) -> bool {
        self.satisfied >= self.required
    }
}

fn fraction_run_outcome(p: u64, s: u32, a: u64, big_m: u64, m: u64, l: u64, u: u64) -> FractionRunOutcome {
    let alpha = floor_log(p, &BigRational::new(big_m.into(), l.into()));
    let v = vp_int(&BigInt::from(l * m + u), p);
    let required = v + alpha + 1;
    let x = BigUint::from(a) + BigUint::from(m) * BigUint::from(p).pow(s);
    let satisfied = (s..s + required)
        .take_while(|&ell| frac_at_least(&x, &BigUint::from(p).pow(ell), big_m))
        .count() as u32;
    FractionRunOutcome {
        required,
        satisfied,
    }
}

/// For `u` in `1..=floor(La/p^s)` and `l` in `s..=s+v_p(Lm+u)+alpha`,
/// `alpha = floor(log_p(M/L))`: `{(a + m p^s)/p^l} >= 1/M`.
///
/// Vacuously true when `floor(La/p^s) = 0`.
pub fn fraction_run_check(p: u64, s: u32, a: u64, big_m: u64, m: u64, l: u64, u: u64) -> Result<bool> {
    ensure_prime(p)?;
    let ps = p.pow(s);
    if s == 0 || a >= ps || big_m == 0 || !(1..=big_m).contains(&l) {
        return Err(Error::Precondition(format!(
            "need s >= 1, a < p^s, 1 <= L <= M (p={p}, s={s}, a={a}, M={big_m}, L={l})"
        )));
    }
    let u_max = l * a / ps;
    if u_max == 0 {
        return Ok(true);
    }
    if !(1..=u_max).contains(&u) {
        return Err(Error::Precondition(format!("u = {u} outside 1..={u_max}")));
    }
    Ok(fraction_run_outcome(p, s, a, big_m, m, l, u).holds())
}

/// `p^{s+1} g_p(m) (H_{Lmp^s} - H_{L floor(m/p) p^{s+1}}) in p D_L Z_p`.
pub fn harmonic_block_check(
    spec: &FactorialRatioSpec,
    l: u64,
    p: u64,
    s: u32,
    m: u64,
) -> Result<PadicMembershipReport> {
    check_args(spec, l, p, 0)?;
    let ctx = PadicContext::new(spec, 0, 0);
    let (actual, required) = harmonic_point(&ctx, l, p, s, m);
    Ok(PadicMembershipReport::single(
        p,
        required,
        format!("p^(s+1) g_p(m) (H_(L m p^s) - H_(L floor(m/p) p^(s+1))), L={l}, s={s}, m={m}"),
        actual,
        Some(vec![s as i64, m as i64]),
    ))
}

fn harmonic_point(ctx: &PadicContext, l: u64, p: u64, s: u32, m: u64) -> (Valuation, i64) {
    let diff = ctx.harmonic_block_difference(l, s, p, m);
    let shift = i64::from(s) + 1 + i64::from(mu(ctx.m(), p, m));
    let actual = match vp_unchecked(&diff, p) {
        Valuation::Finite(v) => Valuation::Finite(v + shift),
        Valuation::Infinite => Valuation::Infinite,
    };
    (actual, 1 + vp_dl(&ctx.spec, l, p))
}

/// [`harmonic_block_check`] over `s <= s_max`, `m <= m_max`.
pub fn harmonic_block_scan(
    spec: &FactorialRatioSpec,
    l: u64,
    p: u64,
    bounds: &ScanBounds,
) -> Result<PadicMembershipReport> {
    check_args(spec, l, p, 0)?;
    let ctx = PadicContext::new(spec, 0, 0);
    let grid: Vec<(u32, u64)> = (0..=bounds.s_max)
        .flat_map(|s| (0..=bounds.m_max).map(move |m| (s, m)))
        .collect();
    let points = grid
        .into_par_iter()
        .map(|(s, m)| {
            let (actual, required) = harmonic_point(&ctx, l, p, s, m);
            Point {
                coords: vec![s as i64, m as i64],
                required,
                actual,
            }
        })
        .collect();
    Ok(summarize(
        p,
        format!("p^(s+1) g_p(m) (H_(L m p^s) - H_(L floor(m/p) p^(s+1))) in p D_{l} Z_p; witness [s, m]"),
        points,
    ))
}

/// `p H_{L(a+jp)} = H_{Lj} + sum_{i <= floor(La/p)} 1/(Lj+i) mod p Z_p`.
pub fn harmonic_shift_check(spec: &FactorialRatioSpec, l: u64, p: u64, a: u64, j: u64) -> Result<bool> {
    check_args(spec, l, p, a)?;
    let ctx = PadicContext::new(spec, 0, l * (a + j * p));
    Ok(vp_unchecked(&ctx.harmonic_shift_residual(l, p, a, j), p).at_least(1))
}

/// Congruence over `a < p`, `j <= j_max`.
pub fn harmonic_shift_scan(
    spec: &FactorialRatioSpec,
    l: u64,
    p: u64,
    bounds: &ScanBounds,
) -> Result<PadicMembershipReport> {
    check_args(spec, l, p, 0)?;
    let ctx = PadicContext::new(spec, 0, l * ((p - 1) + bounds.j_max * p));
    let grid: Vec<(u64, u64)> = bounds
        .a_range(p)
        .flat_map(|a| (0..=bounds.j_max).map(move |j| (a, j)))
        .collect();
    let points = grid
        .into_par_iter()
        .map(|(a, j)| Point {
            coords: vec![a as i64, j as i64],
            required: 1,
            actual: vp_unchecked(&ctx.harmonic_shift_residual(l, p, a, j), p),
        })
        .collect();
    Ok(summarize(
        p,
        format!("p H_(L(a+jp)) - H_(Lj) - sum 1/(Lj+i), L={l}; witness [a, j]"),
        points,
    ))
}

/// `Phi_{L,p}(a+Kp) + sum_j H_{Lj} T_j in p D_L Z_p` over `a < p`, `K <= k_max`.
pub fn phi_correction_scan(
    spec: &FactorialRatioSpec,
    l: u64,
    p: u64,
    bounds: &ScanBounds,
) -> Result<PadicMembershipReport> {
    check_args(spec, l, p, 0)?;
    let ctx = PadicContext::for_grid(spec, p, bounds.k_max);
    let required = 1 + vp_dl(spec, l, p);
    let grid: Vec<(u64, u64)> = bounds
        .a_range(p)
        .flat_map(|a| (0..=bounds.k_max).map(move |k| (a, k)))
        .collect();
    let points = grid
        .into_par_iter()
        .map(|(a, k)| Point {
            coords: vec![a as i64, k as i64],
            required,
            actual: vp_unchecked(&ctx.phi_correction_residual(l, p, a, k), p),
        })
        .collect();
    Ok(summarize(
        p,
        format!("Phi_{{{l},{p}}}(a+Kp) + sum_j H_(Lj) T_j in p D_{l} Z_p; witness [a, K]"),
        points,
    ))
}

/// `S(a,K,s,p,m) in p^{s+1} g_p(m) Z_p` over `a < p`, `K <= k_max`,
/// `s <= s_max`, `m <= m_max`.
pub fn s_membership_scan(
    spec: &FactorialRatioSpec,
    p: u64,
    bounds: &ScanBounds,
) -> Result<PadicMembershipReport> {
    ensure_prime(p)?;
    let ctx = PadicContext::for_grid(spec, p, bounds.k_max);
    let big_m = spec.m();
    let mut grid = Vec::new();
    for a in bounds.a_range(p) {
        for k in 0..=bounds.k_max {
            for s in 0..=bounds.s_max {
                for m in 0..=bounds.m_max {
                    grid.push((a, k, s, m));
                }
            }
        }
    }
    let points = grid
        .into_par_iter()
        .map(|(a, k, s, m)| Point {
            coords: vec![a as i64, k as i64, s as i64, m as i64],
            required: i64::from(s) + 1 + i64::from(mu(big_m, p, m)),
            actual: vp_unchecked(&ctx.s_sum(a, k, s, p, m), p),
        })
        .collect();
    Ok(summarize(
        p,
        "S(a,K,s,p,m) in p^(s+1) g_p(m) Z_p; witness [a, K, s, m]".to_string(),
        points,
    ))
}

/// [`fraction_run_check`] over `s in 1..=s_max`, `m <= m_max`, and every valid `(a, L, u)`,
/// for the given `M`. Valuations count the consecutive indices `l` that
/// satisfy the inequality against the number the bound requires.
pub fn fraction_run_scan(big_m: u64, p: u64, s_max: u32, m_max: u64) -> Result<PadicMembershipReport> {
    ensure_prime(p)?;
    let mut grid = Vec::new();
    for s in 1..=s_max {
        let ps = p.pow(s);
        for a in 0..ps {
            for l in 1..=big_m {
                for u in 1..=(l * a / ps) {
                    for m in 0..=m_max {
                        grid.push((s, a, l, u, m));
                    }
                }
            }
        }
    }
    let points = grid
        .into_par_iter()
        .map(|(s, a, l, u, m)| {
            let out = fraction_run_outcome(p, s, a, big_m, m, l, u);
            Point {
                coords: vec![s as i64, a as i64, l as i64, u as i64, m as i64],
                required: i64::from(out.required),
                actual: Valuation::Finite(i64::from(out.satisfied)),
            }
        })
        .collect();
    Ok(summarize(
        p,
        format!("indices l with {{(a+m p^s)/p^l}} >= 1/{big_m}; witness [s, a, L, u, m]"),
        points,
    ))
}

/// Outcome of checking Dwork's decomposition on a grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionScan {
    pub prime: u64,
    pub l: u64,
    pub points_checked: usize,
    pub all_equal: bool,
    /// `[a, K]` of the first mismatch.
    pub first_mismatch: Option<Vec<u64>>,
}

pub fn decomposition_scan(
    spec: &FactorialRatioSpec,
    l: u64,
    p: u64,
    bounds: &ScanBounds,
) -> Result<DecompositionScan> {
    check_args(spec, l, p, 0)?;
    let ctx = PadicContext::for_grid(spec, p, bounds.k_max);
    let grid: Vec<(u64, u64)> = bounds
        .a_range(p)
        .flat_map(|a| (0..=bounds.k_max).map(move |k| (a, k)))
        .collect();
    let equal: Vec<bool> = grid
        .par_iter()
        .map(|&(a, k)| {
            let (lhs, rhs) = ctx.decomposition_sides(l, a, k, p);
            lhs == rhs
        })
        .collect();
    let first_mismatch = grid
        .iter()
        .zip(&equal)
        .find(|(_, &eq)| !eq)
        .map(|(&(a, k), _)| vec![a, k]);
    Ok(DecompositionScan {
        prime: p,
        l,
        points_checked: grid.len(),
        all_equal: first_mismatch.is_none(),
        first_mismatch,
    })
}

/// `v_p(D_L)`.
pub fn vp_root_bound(spec: &FactorialRatioSpec, l: u64, p: u64) -> Result<i64> {
    ensure_prime(p)?;
    spec.ensure_l(l)?;
    Ok(vp_dl(spec, l, p))
}

/// Exact `p^k` as a rational, `k` possibly negative.
pub fn prime_power(p: u64, k: i64) -> BigRational {
    let base = BigRational::from_integer(p.into());
    let k32 = k.to_i32().expect("exponent fits in i32");
    Pow::pow(&base, k32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> FactorialRatioSpec {
        s.parse().unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn valuations() {
        assert_eq!(vp_rational(&int(70), 7), Ok(Valuation::Finite(1)));
        assert_eq!(vp_rational(&int(1), 5), Ok(Valuation::Finite(0)));
        assert_eq!(vp_rational(&rat(3, 4), 2), Ok(Valuation::Finite(-2)));
        assert_eq!(vp_rational(&int(0), 3), Ok(Valuation::Infinite));
        assert_eq!(vp_rational(&int(12), 4), Err(Error::NotPrime(4)));
        assert!(Valuation::Infinite > Valuation::Finite(i64::MAX));
        assert_eq!(Valuation::Infinite.to_string(), "+inf");
    }

    #[test]
    fn valuation_via_delta() {
        assert_eq!(vp_q_ratio_via_delta(&spec("2/1,1"), 4, 7), Ok(1));
        assert_eq!(vp_q_ratio_via_delta(&spec("2/1,1"), 0, 7), Ok(0));
        assert_eq!(vp_q_ratio_via_delta(&spec("6/3,2,1"), 1, 5), Ok(1));
        assert!(matches!(
            vp_q_ratio_via_delta(&spec("3/1"), 1, 5),
            Err(Error::Unbalanced { .. })
        ));
    }

    #[test]
    fn quotient_test_examples() {
        let f = crate::mirror::MirrorMaps::new(&spec("2/1,1"), 27).unwrap().f().clone();
        let r = dwork_quotient_test(&f, 3).unwrap();
        assert!(r.member);
        let one = TruncatedSeries::one(10);
        let r = dwork_quotient_test(&one, 3).unwrap();
        assert!(r.member);
        assert_eq!(r.actual_valuation, Valuation::Infinite);
        let bad = TruncatedSeries::new(vec![int(1), rat(1, 3), int(0), int(0), int(0)]).unwrap();
        let r = dwork_quotient_test(&bad, 3).unwrap();
        assert!(!r.member);
        assert_eq!(r.witness, Some(vec![1]));
        assert_eq!(
            dwork_quotient_test(&TruncatedSeries::from_integers(&[2, 1]).unwrap(), 3),
            Err(Error::ConstantTermNotOne)
        );
    }

    #[test]
    fn exp_test_examples() {
        let z = TruncatedSeries::from_integers(&[0, 1, 0, 0, 0, 0, 0, 0]).unwrap();
        for p in [2, 3, 5, 7] {
            let r = dwork_exp_test(&z, p).unwrap();
            assert!(!r.member);
            assert_eq!(r.witness, Some(vec![p as i64]));
        }
        let pz = TruncatedSeries::from_integers(&[0, 5, 0, 0, 0]).unwrap();
        assert!(dwork_exp_test(&pz, 5).unwrap().member);
        assert_eq!(
            dwork_exp_test(&TruncatedSeries::one(3), 5),
            Err(Error::NonzeroConstantTerm)
        );
        let maps = crate::mirror::MirrorMaps::new(&spec("6/3,2,1"), 30).unwrap();
        let g_over_f = maps.g().div(maps.f()).unwrap();
        assert!(dwork_exp_test(&g_over_f, 5).unwrap().member);
    }

    #[test]
    fn phi_values() {
        let s = spec("6/3,2,1");
        assert_eq!(phi(&s, 1, 5, 0, 0).unwrap(), int(0));
        assert_eq!(phi(&s, 1, 5, 1, 0).unwrap(), int(-300));
        let r = phi_membership(&s, 1, 5, 1, 0).unwrap();
        assert_eq!(r.required_valuation, 2);
        assert_eq!(r.actual_valuation, Valuation::Finite(2));
        assert!(r.member);
        assert!(phi(&s, 1, 5, 5, 0).is_err());
        assert!(phi(&s, 7, 5, 1, 0).is_err());
    }

    #[test]
    fn phi_matches_series_coefficient() {
        // Phi is the coefficient of z^{a+Kp} in F(z) G_L(z^p) - p F(z^p) G_L(z).
        let s = spec("2/1,1");
        let p = 3;
        let maps = crate::mirror::MirrorMaps::new(&s, 20).unwrap();
        for l in 1..=2 {
            let g_l = maps.g_l(l).unwrap();
            let f = maps.f();
            let lhs = f * &g_l.substitute_power(p);
            let rhs = (&f.substitute_power(p) * &g_l).scale(&int(p as i64));
            let series = &lhs - &rhs;
            for a in 0..p as u64 {
                for k in 0..=5u64 {
                    let idx = (a + k * p as u64) as usize;
                    assert_eq!(&phi(&s, l, p as u64, a, k).unwrap(), series.coeff(idx));
                }
            }
        }
    }

    #[test]
    fn s_sum_examples() {
        let s = spec("6/3,2,1");
        // block starts past K
        assert_eq!(s_sum(&s, 1, 2, 1, 3, 1).unwrap(), int(0));
        let q = |n: u64| s.q_ratio(n);
        let single = s_sum(&s, 0, 4, 0, 3, 1).unwrap();
        assert_eq!(single, q(3) * q(3) - q(1) * q(9));
        let c = spec("2/1,1");
        assert_eq!(s_sum(&c, 1, 2, 0, 3, 1).unwrap(), int(0));
    }

    #[test]
    fn mu_and_g_examples() {
        let s = spec("6/3,2,1");
        assert_eq!(mu_and_g(&s, 5, 0).unwrap(), (0, BigUint::one()));
        assert_eq!(mu_and_g(&s, 5, 3).unwrap(), (1, BigUint::from(5u32)));
        // m = 4 = 2^2, M = 6: {4/2} = 0, {4/4} = 0, {4/8} = 1/2, {4/16} = 1/4, {4/32} < 1/6.
        assert_eq!(mu_and_g(&s, 2, 4).unwrap(), (2, BigUint::from(4u32)));
    }

    #[test]
    fn w_term_examples() {
        let s = spec("6/3,2,1");
        assert_eq!(w_term(&s, 2, 1, 3, 1, 3, 0).unwrap(), int(0));
        let c = spec("2/1,1");
        let w = w_term(&c, 1, 1, 3, 0, 3, 1).unwrap();
        // (H_1 - H_0) * S(1,3,0,3,1) with S = Q(4)Q(2) - Q(1)Q(7)
        let expected = c.q_ratio(4) * c.q_ratio(2) - c.q_ratio(1) * c.q_ratio(7);
        assert_eq!(w, expected);
    }

    #[test]
    fn decomposition_examples() {
        assert!(dwork_decomposition_check(&spec("2/1,1"), 2, 0, 0, 3).unwrap());
        assert!(dwork_decomposition_check(&spec("2/1,1"), 2, 2, 4, 3).unwrap());
        assert!(dwork_decomposition_check(&spec("6/3,2,1"), 3, 1, 5, 2).unwrap());
    }

    #[test]
    fn valuation_run_examples() {
        let s = spec("6/3,2,1");
        assert!(valuation_run_check(&s, 2, 1).unwrap());
        assert!(valuation_run_check(&s, 7, 5).unwrap());
        assert!(valuation_run_check(&s, 2, 8).unwrap());
        assert!(valuation_run_check(&s, 2, 0).is_err());
        // M = 6 < p = 7 means beta = 0.
        assert!(valuation_run_holds(6, 7, 3));
    }

    #[test]
    fn fraction_run_examples() {
        // floor(La/p^s) = 0 is vacuous
        assert_eq!(fraction_run_check(3, 1, 0, 6, 4, 2, 1), Ok(true));
        // p=5, s=1, a=3, M=4, L=2: u in 1..=1, alpha = 0; v_5(2m+1) = 0 for m=0
        // so only l = 1: {3/5} >= 1/4.
        assert_eq!(fraction_run_check(5, 1, 3, 4, 0, 2, 1), Ok(true));
        assert!(fraction_run_check(5, 0, 3, 4, 0, 2, 1).is_err());
        assert!(fraction_run_check(5, 1, 5, 4, 0, 2, 1).is_err());
        assert!(fraction_run_check(5, 1, 3, 4, 0, 2, 2).is_err());
        assert!(fraction_run_check(4, 1, 3, 4, 0, 2, 1).is_err());
    }

    #[test]
    fn harmonic_block_examples() {
        let s = spec("6/3,2,1");
        let r = harmonic_block_check(&s, 2, 3, 1, 0).unwrap();
        assert!(r.member);
        assert_eq!(r.actual_valuation, Valuation::Infinite);
        for m in 0..=20 {
            assert!(harmonic_block_check(&s, 2, 3, 1, m).unwrap().member, "m={m}");
        }
        let c = spec("2/1,1");
        for m in 0..=40 {
            assert!(harmonic_block_check(&c, 1, 2, 0, m).unwrap().member, "m={m}");
        }
    }

    #[test]
    fn harmonic_shift_examples() {
        let s = spec("6/3,2,1");
        assert!(harmonic_shift_check(&s, 4, 5, 0, 0).unwrap());
        for j in 0..=15 {
            assert!(harmonic_shift_check(&s, 4, 5, 3, j).unwrap(), "j={j}");
            assert!(harmonic_shift_check(&s, 2, 5, 0, j).unwrap(), "j={j}");
        }
    }

    #[test]
    fn scans_on_trivial_spec() {
        let s = spec("1/1");
        let r = phi_membership_scan(&s, 1, 3, &ScanBounds::default()).unwrap();
        assert!(r.member);
        assert_eq!(r.points_checked, 3 * 11);
    }

    #[test]
    fn summarize_picks_first_violation_in_grid_order() {
        let pts = vec![
            Point { coords: vec![0], required: 1, actual: Valuation::Finite(3) },
            Point { coords: vec![1], required: 1, actual: Valuation::Finite(0) },
            Point { coords: vec![2], required: 1, actual: Valuation::Finite(-1) },
        ];
        let r = summarize(3, "x".into(), pts);
        assert!(!r.member);
        assert_eq!(r.witness, Some(vec![1]));
        let pts = vec![
            Point { coords: vec![0], required: 1, actual: Valuation::Infinite },
            Point { coords: vec![1], required: 2, actual: Valuation::Finite(3) },
            Point { coords: vec![2], required: 1, actual: Valuation::Finite(2) },
        ];
        let r = summarize(3, "x".into(), pts);
        assert!(r.member);
        assert_eq!(r.witness, Some(vec![1]));
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(3, -2), rat(1, 9));
        assert_eq!(prime_power(2, 3), int(8));
    }
}
