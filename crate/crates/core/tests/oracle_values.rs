//! Values cross-checked against an independent exact computation.

use mirrorint::landau::FactorialRatioSpec;
use mirrorint::mirror::{self, MirrorMaps};
use mirrorint::series::TruncatedSeries;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

fn spec(s: &str) -> FactorialRatioSpec {
    s.parse().unwrap()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn naturals(xs: &[u64]) -> Vec<BigUint> {
    xs.iter().map(|&x| BigUint::from(x)).collect()
}

#[test]
fn q_ratio_of_twelve() {
    assert_eq!(spec("12/4,3,3,2").q_ratio(1), int(277200));
}

#[test]
fn reduced_coordinate_for_six() {
    let q = MirrorMaps::new(&spec("6/3,2,1"), 4).unwrap().q_reduced();
    let expected: Vec<BigRational> = [1i64, 312, 107604, 39073568, 14645965026]
        .iter()
        .map(|&c| int(c))
        .collect();
    assert_eq!(q.coeffs(), &expected[..]);
}

#[test]
fn largest_root_of_reduced_coordinate() {
    let q = MirrorMaps::new(&spec("6/3,2,1"), 40).unwrap().q_reduced();
    let cert = q.max_root_exponent().unwrap();
    assert_eq!(cert.passing, naturals(&[1, 2, 3, 4, 6, 8, 12, 24]));
    assert_eq!(cert.max_exponent, BigUint::from(24u32));
    assert_eq!(cert.leading_index, 1);
}

#[test]
fn largest_root_of_q1() {
    let q1 = MirrorMaps::new(&spec("6/3,2,1"), 40).unwrap().q_l(1).unwrap();
    assert_eq!(q1.coeff(1), &int(60));
    let cert = q1.max_root_exponent().unwrap();
    assert_eq!(cert.passing, naturals(&[1, 2, 3, 4, 5, 6, 10, 12, 15, 20, 30, 60]));
    assert_eq!(cert.max_exponent, BigUint::from(60u32));
}

#[test]
fn landau_profiles() {
    let p = spec("12/4,3,3,2").profile();
    let bps: Vec<BigRational> = [(0, 1), (1, 12), (1, 6), (1, 4), (1, 3), (5, 12), (1, 2), (7, 12), (2, 3), (3, 4), (5, 6), (11, 12)]
        .iter()
        .map(|&(n, d)| rat(n, d))
        .collect();
    assert_eq!(p.breakpoints, bps);
    assert_eq!(p.values, vec![0, 1, 2, 2, 1, 2, 1, 2, 1, 1, 2, 3]);
    let p = spec("6/3,2,1").profile();
    assert_eq!(p.values, vec![0, 1, 1, 1, 1, 2]);
}

#[test]
fn case_two_classification() {
    let c = spec("30,1/15,10,6").classify();
    assert!(c.landau_integral);
    assert!(!c.case_i);
    let expected: Vec<BigRational> = [
        (1, 5), (1, 3), (2, 5), (1, 2), (8, 15), (3, 5), (2, 3),
        (7, 10), (11, 15), (4, 5), (5, 6), (13, 15), (9, 10), (14, 15),
    ]
    .iter()
    .map(|&(n, d)| rat(n, d))
    .collect();
    assert_eq!(c.case_i_witnesses, expected);
}

#[test]
fn case_two_denominators() {
    let q = MirrorMaps::new(&spec("30,1/15,10,6"), 3).unwrap().q_reduced();
    assert_eq!(q.coeff(2).denom(), &BigInt::from(3));
    assert_eq!(q.coeff(3).denom(), &BigInt::from(91));
}

#[test]
fn witness_search_reports_smallest_prime_first() {
    let w = mirror::nonintegrality_witness(&spec("30,1/15,10,6"), 200, 60)
        .unwrap()
        .unwrap();
    assert_eq!((w.prime, w.index, w.valuation), (2, 7, -2));
    assert_eq!(w.target, mirror::Target::QReduced);
    let w = mirror::nonintegrality_witness(&spec("30,1/15,10,6"), 3, 10)
        .unwrap()
        .unwrap();
    assert_eq!(w.prime, 2);
}

#[test]
fn theta_hypothesis() {
    let v = mirror::root_exponent_for_q(&spec("6/3,2,1"), 6).unwrap();
    assert!(v.hypothesis_holds);
    let v = mirror::root_exponent_for_q(&spec("12/4,3,3,2"), 12).unwrap();
    assert!(v.hypothesis_holds);
    let v = mirror::root_exponent_for_q(&spec("5/1,1,1,2"), 5).unwrap();
    assert!(!v.hypothesis_holds);
    assert_eq!(v.failing_l, Some(2));
    assert!(mirror::root_exponent_for_q(&spec("6/3,2,1"), 4).is_err());
    assert!(mirror::root_exponent_for_q(&spec("30,1/15,10,6"), 30).is_err());
}

#[test]
fn pochhammer_parameters() {
    let s = spec("12/4,3,3,2");
    let form = s.pochhammer_form().unwrap();
    let num: Vec<BigRational> = [(1, 12), (1, 6), (5, 12), (7, 12), (5, 6), (11, 12)]
        .iter()
        .map(|&(n, d)| rat(n, d))
        .collect();
    let den: Vec<BigRational> = [(1, 3), (1, 2), (2, 3), (1, 1), (1, 1), (1, 1)]
        .iter()
        .map(|&(n, d)| rat(n, d))
        .collect();
    let mut got_num = form.numerator.clone();
    got_num.sort();
    let mut got_den = form.denominator.clone();
    got_den.sort();
    assert_eq!(got_num, num);
    assert_eq!(got_den, den);
    let c = BigRational::from_integer(BigInt::from(12).pow(12))
        / BigRational::from_integer(BigInt::from(4).pow(4) * BigInt::from(3).pow(6) * BigInt::from(2).pow(2));
    assert_eq!(form.constant, c);
    for n in 0..8 {
        assert_eq!(form.evaluate(n), s.q_ratio(n), "n={n}");
    }
}

#[test]
fn harmonic_reference_exponents() {
    let r = mirror::reference_exponents(&spec("3/1,1,1"), &mirror::KNOWN_WOLSTENHOLME_PRIMES).unwrap();
    let omega = r.omega.unwrap();
    assert_eq!(omega.factor, rat(1, 6));
    assert_eq!(omega.root_exponent, int(3));
    assert_eq!(r.xi.unwrap().factor, rat(1, 6));
    let r = mirror::reference_exponents(&spec("5/1,1,1,1,1"), &mirror::KNOWN_WOLSTENHOLME_PRIMES).unwrap();
    assert_eq!(r.omega.unwrap().root_exponent, int(10));
    assert!(mirror::reference_exponents(&spec("6/3,2,1"), &[]).unwrap().omega.is_none());
}

#[test]
fn root_bound_table() {
    let s = spec("6/3,2,1");
    let d: Vec<BigUint> = (1..=6).map(|l| s.root_bound_dl(l).unwrap()).collect();
    assert_eq!(d, naturals(&[60, 6, 2, 1, 1, 1]));
}

#[test]
fn all_root_bounds_integral_for_six() {
    let checks = mirror::verify_root_bounds(&spec("6/3,2,1"), 30).unwrap();
    assert_eq!(checks.len(), 6);
    assert!(checks.iter().all(|c| c.report.integral));
    assert!(mirror::verify_root_bounds(&spec("30,1/15,10,6"), 10).is_err());
}

#[test]
fn product_relation_holds() {
    for s in ["6/3,2,1", "12/4,3,3,2", "30,1/15,10,6"] {
        let b = mirror::build_bundle(&spec(s), 12).unwrap();
        assert!(mirror::product_relation_check(&b), "{s}");
    }
}

#[test]
fn central_binomial_series() {
    let maps = MirrorMaps::new(&spec("2/1,1"), 4).unwrap();
    assert_eq!(maps.f(), &TruncatedSeries::from_integers(&[1, 2, 6, 20, 70]).unwrap());
}
