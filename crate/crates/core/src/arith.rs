//! Integer and rational helpers shared by every module: factorial and
//! harmonic-number caches, floors of rationals, primes, and factorization.

use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Read-mostly memo table of `n!`.
///
/// Lookups take a shared lock; growth takes the write lock once and extends
/// the table past the requested index, so concurrent readers never observe a
/// partially built entry.
#[derive(Debug)]
pub struct FactorialCache {
    table: RwLock<Vec<Arc<BigUint>>>,
}

impl Default for FactorialCache {
    fn default() -> Self {
        Self::new()
    }
}

impl FactorialCache {
    pub fn new() -> Self {
        Self {
            table: RwLock::new(vec![Arc::new(BigUint::one())]),
        }
    }

    /// Process-wide cache used by [`crate::landau::FactorialRatioSpec::q_ratio`].
    pub fn global() -> &'static FactorialCache {
        static CACHE: OnceLock<FactorialCache> = OnceLock::new();
        CACHE.get_or_init(FactorialCache::new)
    }

    pub fn factorial(&self, n: usize) -> Arc<BigUint> {
        {
            let table = self.table.read().expect("factorial cache poisoned");
            if let Some(v) = table.get(n) {
                return Arc::clone(v);
            }
        }
        let mut table = self.table.write().expect("factorial cache poisoned");
        while table.len() <= n {
            let k = table.len();
            let next = table[k - 1].as_ref() * BigUint::from(k);
            table.push(Arc::new(next));
        }
        Arc::clone(&table[n])
    }

    pub fn len(&self) -> usize {
        self.table.read().expect("factorial cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Prefix table of harmonic numbers `H_0 = 0, H_1, ..., H_n`.
#[derive(Debug, Clone)]
pub struct HarmonicTable {
    values: Vec<BigRational>,
}

impl HarmonicTable {
    pub fn up_to(n: usize) -> Self {
        let mut values = Vec::with_capacity(n + 1);
        values.push(BigRational::zero());
        for i in 1..=n {
            let next = &values[i - 1] + BigRational::new(BigInt::one(), BigInt::from(i));
            values.push(next);
        }
        Self { values }
    }

    pub fn get(&self, n: usize) -> &BigRational {
        &self.values[n]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `sum_{i = lo+1}^{hi} 1/i`, i.e. `H_hi - H_lo`, by binary splitting.
///
/// Returns zero when `hi <= lo`.
pub fn harmonic_range(lo: u64, hi: u64) -> BigRational {
    if hi <= lo {
        return BigRational::zero();
    }
    let (num, den) = split_reciprocals(lo + 1, hi + 1);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `H_n`.
pub fn harmonic(n: u64) -> BigRational {
    harmonic_range(0, n)
}

// Sum of 1/i for i in [a, b) as an unreduced fraction.
fn split_reciprocals(a: u64, b: u64) -> (BigUint, BigUint) {
    if b - a <= 8 {
        let mut num = BigUint::zero();
        let mut den = BigUint::one();
        for i in a..b {
            // num/den + 1/i = (num*i + den) / (den*i)
            num = num * i + &den;
            den *= i;
        }
        return (num, den);
    }
    let mid = a + (b - a) / 2;
    let (n1, d1) = split_reciprocals(a, mid);
    let (n2, d2) = split_reciprocals(mid, b);
    (n1 * &d2 + n2 * &d1, d1 * d2)
}

/// Mathematical floor of a rational.
pub fn floor_rational(x: &BigRational) -> BigInt {
    x.numer().div_floor(x.denom())
}

/// Fractional part `{x} = x - floor(x)`, always in `[0, 1)`.
pub fn fract_rational(x: &BigRational) -> BigRational {
    x - BigRational::from_integer(floor_rational(x))
}

pub fn is_integer(x: &BigRational) -> bool {
    x.denom().is_one()
}

/// `lcm(1, ..., n)`; equals 1 for `n <= 1`.
pub fn lcm_up_to(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc = acc.lcm(&BigUint::from(i));
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    miller_rabin_u64(n)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

// Deterministic for all u64 with these witnesses.
fn miller_rabin_u64(n: u64) -> bool {
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes `<= bound` by sieve, ascending.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &is_p)| is_p.then_some(k as u64))
        .collect()
}

/// Exponent of the prime `p` in the nonzero integer `n`.
pub fn vp_int(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// `floor(log_p(x))` for rational `x >= 1`, in exact arithmetic.
pub fn floor_log(p: u64, x: &BigRational) -> u32 {
    debug_assert!(p >= 2);
    let p = BigRational::from_integer(BigInt::from(p));
    let mut pow = p.clone();
    let mut k = 0;
    while &pow <= x {
        pow *= &p;
        k += 1;
    }
    k
}

/// Prime factorization of `n >= 1` as ascending `(prime, exponent)` pairs.
///
/// Trial division removes small factors; the cofactor is split with
/// Pollard's rho (Brent variant) and certified with Miller-Rabin.
pub fn factorize(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut factors: Vec<BigUint> = Vec::new();
    let mut m = n.clone();
    if m.is_zero() {
        return Vec::new();
    }
    for p in primes_up_to(10_000) {
        let bp = BigUint::from(p);
        if &bp * &bp > m {
            break;
        }
        while (&m % &bp).is_zero() {
            m /= &bp;
            factors.push(bp.clone());
        }
    }
    if !m.is_one() {
        split_large(m, &mut factors);
    }
    factors.sort();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for f in factors {
        match out.last_mut() {
            Some((q, e)) if *q == f => *e += 1,
            _ => out.push((f, 1)),
        }
    }
    out
}

fn split_large(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if is_probable_prime(&n) {
        out.push(n);
        return;
    }
    let root = n.sqrt();
    if &root * &root == n {
        split_large(root.clone(), out);
        split_large(root, out);
        return;
    }
    let d = pollard_brent(&n);
    let q = &n / &d;
    split_large(d, out);
    split_large(q, out);
}

fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    let n_minus_1 = n - &one;
    let mut d = n_minus_1.clone();
    let mut r = 0;
    while d.is_even() {
        d >>= 1;
        r += 1;
    }
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..r {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigUint) -> BigUint {
    const BATCH: u64 = 128;
    let one = BigUint::one();
    let abs_diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut r: u64 = 1;
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..BATCH.min(r - k) {
                    y = f(&y);
                    q = (q * abs_diff(&x, &y)) % n;
                }
                g = q.gcd(n);
                k += BATCH;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                g = abs_diff(&x, &ys).gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: &BigUint) -> Vec<BigUint> {
    let mut divs = vec![BigUint::one()];
    for (p, e) in factorize(n) {
        let current = divs.len();
        let mut pk = BigUint::one();
        for _ in 0..e {
            pk *= &p;
            for i in 0..current {
                divs.push(&divs[i] * &pk);
            }
        }
    }
    divs.sort();
    divs
}
