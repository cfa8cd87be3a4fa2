//! Acceptance suite: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use mirrorint::corpus;
use mirrorint::landau::FactorialRatioSpec;
use mirrorint::mirror::{nonintegrality_witness, MirrorMaps};
use mirrorint::padic::{self, ScanBounds};
use mirrorint::series::TruncatedSeries;
use mirrorint::zhou;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn spec(s: &str) -> FactorialRatioSpec {
    s.parse().expect("valid spec")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn root_table() -> Outcome {
    let s = spec("6/3,2,1");
    let maps = MirrorMaps::new(&s, 40).map_err(|e| e.to_string())?;
    let expected = [60u64, 6, 2, 1, 1, 1];
    for (l, &d) in (1..=6).zip(&expected) {
        let d_l = s.root_bound_dl(l).unwrap().to_u64().unwrap();
        ensure(d_l == d, || format!("D_{l} = {d_l}, expected {d}"))?;
        let report = maps.q_l(l).unwrap().vth_root(d).unwrap().integrality();
        ensure(report.integral, || {
            format!("q_{l}^(1/{d}) fails at index {:?}", report.first_bad_index)
        })?;
    }
    let over = maps.q_l(1).unwrap().vth_root(120).unwrap().integrality();
    ensure(!over.integral, || "q_1^(1/120) integral through order 40".into())?;
    Ok(format!(
        "D = (60,6,2,1,1,1) roots integral; q_1^(1/120) fails at index {}",
        over.first_bad_index.unwrap()
    ))
}

fn zhou_desk() -> Outcome {
    let b = zhou::batch(4, 30).map_err(|e| e.to_string())?;
    ensure(b.instances == 19, || format!("{} instances, expected 19", b.instances))?;
    ensure(b.rows.iter().any(|r| r.ks == [3, 4, 4, 6] && r.passed()), || {
        "(3,4,4,6) missing or failing".into()
    })?;
    if let Some(bad) = b.rows.iter().find(|r| !r.passed()) {
        return Err(format!("{:?} fails: {:?}", bad.ks, bad));
    }
    Ok(format!("{} instances with n <= 4 integral at order 30", b.instances))
}

fn lian_yau() -> Outcome {
    for (text, p) in [("3/1,1,1", 3u64), ("5/1,1,1,1,1", 5)] {
        let maps = MirrorMaps::new(&spec(text), 60).map_err(|e| e.to_string())?;
        let r = maps.q_reduced().vth_root(p).unwrap().integrality();
        ensure(r.integral, || format!("{text}: fails at {:?}", r.first_bad_index))?;
    }
    Ok("(z^-1 q)^(1/3) and (z^-1 q)^(1/5) integral through order 60".into())
}

fn valuation_oracle() -> Outcome {
    let primes = mirrorint::arith::primes_up_to(50);
    let mut checked = 0usize;
    for entry in corpus::builtin() {
        let s = &entry.spec;
        for n in 0..=200u64 {
            let q = s.q_ratio(n);
            for &p in &primes {
                let direct = padic::vp_rational(&q, p).unwrap().finite().unwrap();
                let via = padic::vp_q_ratio_via_delta(s, n, p).unwrap();
                ensure(direct == via, || {
                    format!("{s}: n={n}, p={p}: {direct} vs {via}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (spec, n, p) triples agree"))
}

fn membership_scans() -> Outcome {
    let phi_bounds = ScanBounds {
        k_max: 10,
        ..ScanBounds::default()
    };
    let s_bounds = ScanBounds {
        k_max: 10,
        s_max: 2,
        m_max: 10,
        ..ScanBounds::default()
    };
    let h_bounds = ScanBounds {
        s_max: 2,
        m_max: 20,
        ..ScanBounds::default()
    };
    let c_bounds = ScanBounds {
        j_max: 15,
        ..ScanBounds::default()
    };
    let d_bounds = ScanBounds {
        k_max: 12,
        ..ScanBounds::default()
    };
    let mut points = 0usize;
    for text in ["6/3,2,1", "12/4,3,3,2"] {
        let s = spec(text);
        for p in [2u64, 3, 5, 7] {
            let r = padic::s_membership_scan(&s, p, &s_bounds).unwrap();
            ensure(r.member, || format!("{text}: S scan p={p}: {r:?}"))?;
            points += r.points_checked;
            for l in 1..=s.m() {
                for (name, r) in [
                    ("phi", padic::phi_membership_scan(&s, l, p, &phi_bounds).unwrap()),
                    ("harmonic", padic::harmonic_block_scan(&s, l, p, &h_bounds).unwrap()),
                    ("congruence", padic::harmonic_shift_scan(&s, l, p, &c_bounds).unwrap()),
                ] {
                    ensure(r.member, || format!("{text}: {name} L={l} p={p}: {r:?}"))?;
                    points += r.points_checked;
                }
                if p <= 5 {
                    let d = padic::decomposition_scan(&s, l, p, &d_bounds).unwrap();
                    ensure(d.all_equal, || format!("{text}: decomposition L={l} p={p}: {d:?}"))?;
                    points += d.points_checked;
                }
            }
        }
    }
    Ok(format!("{points} grid points, all members; decomposition exact"))
}

fn fraction_grids() -> Outcome {
    let mut points = 0usize;
    for p in [2u64, 3, 5] {
        for big_m in 1..=8 {
            let r = padic::fraction_run_scan(big_m, p, 2, 30).unwrap();
            ensure(r.member, || format!("fraction run p={p} M={big_m}: {r:?}"))?;
            points += r.points_checked;
        }
    }
    let ms: std::collections::BTreeSet<u64> = corpus::builtin().iter().map(|e| e.spec.m()).collect();
    for &big_m in &ms {
        for p in [2u64, 3, 5, 7] {
            for m in 1..=200 {
                ensure(padic::valuation_run_holds(big_m, p, m), || {
                    format!("valuation run fails: M={big_m} p={p} m={m}")
                })?;
                points += 1;
            }
        }
    }
    Ok(format!("{points} grid points hold (M in {ms:?})"))
}

fn case_two() -> Outcome {
    let s = spec("30,1/15,10,6");
    let c = s.classify();
    let fifth = BigRational::new(BigInt::from(1), BigInt::from(5));
    ensure(c.landau_integral && !c.case_i, || format!("classification {c:?}"))?;
    ensure(c.case_i_witnesses.first() == Some(&fifth), || {
        format!("first witness {:?}", c.case_i_witnesses.first())
    })?;
    ensure(s.delta_at(&fifth) == BigInt::from(0), || "Delta(1/5) != 0".into())?;
    let w = match nonintegrality_witness(&s, 200, 60).unwrap() {
        Some(w) => w,
        None => nonintegrality_witness(&s, 500, 120)
            .unwrap()
            .ok_or("no witness even with p <= 500, order <= 120")?,
    };
    ensure(w.valuation < 0, || format!("{w:?}"))?;
    Ok(format!(
        "Delta(1/5) = 0; witness p = {}, index {}, valuation {}",
        w.prime, w.index, w.valuation
    ))
}

fn dwork_property() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let order = 27;
    for trial in 0..50 {
        let mut coeffs = vec![1i64];
        coeffs.extend((0..order).map(|_| rng.gen_range(-50..=50)));
        let f = TruncatedSeries::from_integers(&coeffs).unwrap();
        let idx = rng.gen_range(1..=order);
        for p in [2u64, 3, 5] {
            let r = padic::dwork_quotient_test(&f, p).unwrap();
            ensure(r.member, || format!("trial {trial} p={p}: integral series fails"))?;
            let bad_value = BigRational::new(BigInt::from(coeffs[idx] * p as i64 + 1), BigInt::from(p));
            let bad = f.clone().with_coeff(idx, bad_value);
            let r = padic::dwork_quotient_test(&bad, p).unwrap();
            ensure(!r.member, || {
                format!("trial {trial} p={p}: corruption at {idx} not detected")
            })?;
        }
    }
    Ok("50 series x 3 primes: integral pass, corrupted fail".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 8] = [
        ("root exponents D_L for 6/3,2,1", Duration::from_secs(5), root_table),
        ("unit-fraction roots, n <= 4", Duration::from_secs(30), zhou_desk),
        ("(z^-1 q)^(1/p) for p/1,...,1", Duration::from_secs(10), lian_yau),
        ("v_p(Q(n)) via the Landau function", Duration::from_secs(10), valuation_oracle),
        ("p-adic membership scans", Duration::from_secs(60), membership_scans),
        ("fractional-part bounds", Duration::from_secs(30), fraction_grids),
        ("case (ii) witness for 30,1/15,10,6", Duration::from_secs(60), case_two),
        ("Dieudonne-Dwork quotient test", Duration::from_secs(10), dwork_property),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let timing = format!(
            "{:.2}s, budget {}s{}",
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if elapsed > *budget { ", over budget" } else { "" }
        );
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} ({timing})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail} ({timing})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
