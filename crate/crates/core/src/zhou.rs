//! Unit-fraction decompositions `1 = 1/k_1 + ... + 1/k_n` and the root
//! `(z^-1 q)^(1/k)` of the reduced canonical coordinate they induce.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::landau::FactorialRatioSpec;
use crate::mirror::MirrorMaps;
use crate::series::IntegralityReport;

/// Largest `n` accepted by [`enumerate_decompositions`].
pub const ENUMERATION_LIMIT: u64 = 6;
/// Largest `n_max` accepted by [`batch`]; the factorials for `n = 5` reach
/// `(1806 * order)!`.
pub const BATCH_LIMIT: u64 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZhouInstance {
    /// Nondecreasing, with `sum 1/k_i = 1`.
    pub ks: Vec<u64>,
    /// `lcm(ks)`.
    pub k: u64,
    /// `w_i = k / k_i`.
    pub ws: Vec<u64>,
    /// `e = (k)`, `f = ws`.
    pub spec: FactorialRatioSpec,
}

impl ZhouInstance {
    pub fn from_ks(mut ks: Vec<u64>) -> Result<Self> {
        if ks.is_empty() || ks.contains(&0) {
            return Err(Error::Precondition("ks must be nonempty positive integers".into()));
        }
        ks.sort_unstable();
        let total: BigRational = ks
            .iter()
            .map(|&k| BigRational::new(BigInt::one(), BigInt::from(k)))
            .sum();
        if !total.is_one() {
            return Err(Error::Precondition(format!("sum of 1/k over {ks:?} is {total}, not 1")));
        }
        let k = ks.iter().fold(1u64, |acc, &x| acc.lcm(&x));
        let ws: Vec<u64> = ks.iter().map(|&x| k / x).collect();
        let spec = FactorialRatioSpec::new(vec![k], ws.clone())?;
        Ok(Self { ks, k, ws, spec })
    }

    /// `false` when `k` itself occurs in `ws`, which only happens for `n = 1`.
    pub fn disjoint(&self) -> bool {
        self.spec.is_disjoint()
    }
}

/// Every nondecreasing `(k_1, ..., k_n)` with `sum 1/k_i = 1`, in
/// lexicographic order.
pub fn enumerate_decompositions(n: u64) -> Result<Vec<ZhouInstance>> {
    if n == 0 {
        return Err(Error::Precondition("n must be >= 1".into()));
    }
    if n > ENUMERATION_LIMIT {
        return Err(Error::LimitExceeded {
            what: "n",
            value: n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n as usize);
    extend(n as usize, BigRational::one(), 1, &mut prefix, &mut out);
    out.into_iter().map(ZhouInstance::from_ks).collect()
}

fn extend(
    slots: usize,
    remaining: BigRational,
    min_k: u64,
    prefix: &mut Vec<u64>,
    out: &mut Vec<Vec<u64>>,
) {
    if slots == 1 {
        // The last term must be exactly the remainder.
        if remaining.numer().is_one() {
            if let Some(k) = remaining.denom().to_u64() {
                if k >= min_k {
                    prefix.push(k);
                    out.push(prefix.clone());
                    prefix.pop();
                }
            }
        }
        return;
    }
    let recip = remaining.recip();
    let lo = min_k.max(recip.ceil().to_integer().to_u64().expect("bounded"));
    // With k_i nondecreasing, slots/k_i >= remaining.
    let hi = (recip * BigInt::from(slots))
        .floor()
        .to_integer()
        .to_u64()
        .expect("bounded");
    for k in lo..=hi {
        let rest = &remaining - BigRational::new(BigInt::one(), BigInt::from(k));
        if rest <= BigRational::zero() {
            continue;
        }
        prefix.push(k);
        extend(slots - 1, rest, k, prefix, out);
        prefix.pop();
    }
}

/// Integrality of `(z^-1 q)^(1/k)` through `order`.
///
/// Errors with [`Error::ZhouAnomaly`] when the instance does not classify as
/// case (i), which would contradict the lower bound on the Landau function
/// that the conjecture rests on.
pub fn verify_zhou(instance: &ZhouInstance, order: usize) -> Result<IntegralityReport> {
    if !instance.spec.classify().case_i {
        return Err(Error::ZhouAnomaly {
            ks: instance.ks.clone(),
        });
    }
    let maps = MirrorMaps::new(&instance.spec, order)?;
    Ok(maps.q_reduced().vth_root(instance.k)?.integrality())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZhouRow {
    pub ks: Vec<u64>,
    pub k: u64,
    pub ws: Vec<u64>,
    pub disjoint: bool,
    pub case_i: bool,
    pub exponent: u64,
    pub order: usize,
    pub integral: bool,
    pub first_bad_index: Option<usize>,
    /// Set when classification contradicts case (i).
    pub anomaly: Option<String>,
}

impl ZhouRow {
    pub fn passed(&self) -> bool {
        self.anomaly.is_none() && self.integral
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZhouBatch {
    pub n_max: u64,
    pub order: usize,
    pub instances: usize,
    pub passed: usize,
    pub failed: usize,
    pub rows: Vec<ZhouRow>,
}

impl ZhouBatch {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

pub fn row_for(instance: &ZhouInstance, order: usize) -> Result<ZhouRow> {
    let case_i = instance.spec.classify().case_i;
    let (integral, first_bad_index, anomaly) = match verify_zhou(instance, order) {
        Ok(report) => (report.integral, report.first_bad_index, None),
        Err(e @ Error::ZhouAnomaly { .. }) => (false, None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    Ok(ZhouRow {
        ks: instance.ks.clone(),
        k: instance.k,
        ws: instance.ws.clone(),
        disjoint: instance.disjoint(),
        case_i,
        exponent: instance.k,
        order,
        integral,
        first_bad_index,
        anomaly,
    })
}

/// Verifies every instance with `1 <= n <= n_max`, ordered by `n` and then
/// lexicographically.
pub fn batch(n_max: u64, order: usize) -> Result<ZhouBatch> {
    if n_max > BATCH_LIMIT {
        return Err(Error::LimitExceeded {
            what: "n_max",
            value: n_max,
            limit: BATCH_LIMIT,
        });
    }
    if order == 0 {
        return Err(Error::Precondition("order must be >= 1".into()));
    }
    let mut instances = Vec::new();
    for n in 1..=n_max {
        instances.extend(enumerate_decompositions(n)?);
    }
    let rows = instances
        .par_iter()
        .map(|inst| row_for(inst, order))
        .collect::<Result<Vec<_>>>()?;
    let passed = rows.iter().filter(|r| r.passed()).count();
    Ok(ZhouBatch {
        n_max,
        order,
        instances: rows.len(),
        passed,
        failed: rows.len() - passed,
        rows,
    })
}
