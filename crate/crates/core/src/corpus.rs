//! Built-in regression corpus with expected verdicts per entry.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::landau::FactorialRatioSpec;
use crate::mirror::{nonintegrality_witness, MirrorMaps};
use crate::series::TruncatedSeries;
use crate::zhou::{enumerate_decompositions, ZhouInstance};

/// Largest prime searched for a non-integrality witness in case (ii).
pub const WITNESS_PRIME_BOUND: u64 = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expected {
    pub landau_integral: bool,
    pub case_i: bool,
    /// `v` with `(z^-1 q)^(1/v)` integral.
    pub root_of_q: Option<u64>,
    /// Whether every `q_L^(1/D_L)` should be checked.
    pub roots_of_q_l: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusEntry {
    pub key: String,
    pub spec: FactorialRatioSpec,
    pub expected: Expected,
}

impl CorpusEntry {
    pub fn new(key: impl Into<String>, spec: FactorialRatioSpec, expected: Expected) -> Self {
        Self {
            key: key.into(),
            spec,
            expected,
        }
    }

    fn zhou(inst: ZhouInstance) -> Self {
        let key = format!(
            "zhou:{}",
            inst.ks.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        );
        Self::new(
            key,
            inst.spec,
            Expected {
                landau_integral: true,
                case_i: true,
                root_of_q: Some(inst.k),
                roots_of_q_l: false,
            },
        )
    }
}

fn named(text: &str, expected: Expected) -> CorpusEntry {
    CorpusEntry::new(text, text.parse().expect("built-in spec"), expected)
}

fn case_i(root: u64) -> Expected {
    Expected {
        landau_integral: true,
        case_i: true,
        root_of_q: Some(root),
        roots_of_q_l: true,
    }
}

/// The built-in corpus, sorted by key.
pub fn builtin() -> Vec<CorpusEntry> {
    let mut entries = vec![
        named("6/3,2,1", case_i(6)),
        named("12/4,3,3,2", case_i(12)),
        named("3/1,1,1", case_i(3)),
        named("2/1,1", case_i(2)),
        named(
            "30,1/15,10,6",
            Expected {
                landau_integral: true,
                case_i: false,
                root_of_q: None,
                roots_of_q_l: false,
            },
        ),
    ];
    for n in 1..=4 {
        entries.extend(
            enumerate_decompositions(n)
                .expect("n within limits")
                .into_iter()
                .map(CorpusEntry::zhou),
        );
    }
    entries.sort_by(|a, b| a.key.cmp(&b.key));
    entries
}

/// Overwrites one coefficient of the root series checked for `key`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fault {
    pub key: String,
    pub index: usize,
    pub value: BigRational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Coefficient index or grid point that decided a failure.
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryResult {
    pub key: String,
    pub spec: FactorialRatioSpec,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusSummary {
    pub order: usize,
    pub entries: usize,
    pub passed: usize,
    pub failed: usize,
    pub results: Vec<EntryResult>,
}

impl CorpusSummary {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

fn root_check(
    name: String,
    series: TruncatedSeries,
    v: u64,
    fault: Option<&Fault>,
) -> Result<CheckOutcome> {
    let mut root = series.vth_root(v)?;
    if let Some(f) = fault {
        if f.index <= root.order() {
            root = root.with_coeff(f.index, f.value.clone());
        }
    }
    let report = root.integrality();
    Ok(CheckOutcome {
        name,
        passed: report.integral,
        detail: format!("integral through order {}", report.order_checked),
        witness: report.first_bad_index.map(|i| format!("index {i}")),
    })
}

fn run_entry(entry: &CorpusEntry, order: usize, fault: Option<&Fault>) -> Result<EntryResult> {
    let spec = &entry.spec;
    let exp = &entry.expected;
    let fault = fault.filter(|f| f.key == entry.key);
    let class = spec.classify();
    let mut checks = vec![CheckOutcome {
        name: "classification".into(),
        passed: class.landau_integral == exp.landau_integral && class.case_i == exp.case_i,
        detail: format!(
            "landau_integral={} case_i={}",
            class.landau_integral, class.case_i
        ),
        witness: class.case_i_witnesses.first().map(|w| format!("x = {w}")),
    }];
    let maps = MirrorMaps::new(spec, order)?;
    if let Some(v) = exp.root_of_q {
        checks.push(root_check(format!("(z^-1 q)^(1/{v})"), maps.q_reduced(), v, fault)?);
    }
    if exp.roots_of_q_l {
        for l in 1..=spec.m() {
            let d = spec.root_bound_dl(l)?.to_u64().expect("D_L fits in u64");
            checks.push(root_check(format!("q_{l}^(1/{d})"), maps.q_l(l)?, d, None)?);
        }
    }
    if !exp.case_i {
        let witness = nonintegrality_witness(spec, WITNESS_PRIME_BOUND, order)?;
        checks.push(CheckOutcome {
            name: "nonintegral".into(),
            passed: witness.is_some(),
            detail: format!("negative valuation for some p <= {WITNESS_PRIME_BOUND}"),
            witness: witness.map(|w| {
                format!("p = {}, index {}, valuation {}", w.prime, w.index, w.valuation)
            }),
        });
    }
    Ok(EntryResult {
        key: entry.key.clone(),
        spec: spec.clone(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// Runs `entries` at `order`; results come back sorted by key.
pub fn run(entries: &[CorpusEntry], order: usize, fault: Option<&Fault>) -> Result<CorpusSummary> {
    let mut results = entries
        .par_iter()
        .map(|e| run_entry(e, order, fault))
        .collect::<Result<Vec<_>>>()?;
    results.sort_by(|a, b| a.key.cmp(&b.key));
    let passed = results.iter().filter(|r| r.passed).count();
    Ok(CorpusSummary {
        order,
        entries: results.len(),
        passed,
        failed: results.len() - passed,
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_is_sorted_and_complete() {
        let c = builtin();
        assert_eq!(c.len(), 5 + 19);
        assert!(c.windows(2).all(|w| w[0].key < w[1].key));
        assert!(c.iter().any(|e| e.key == "zhou:3,4,4,6"));
    }

    #[test]
    fn empty_corpus_passes() {
        let s = run(&[], 10, None).unwrap();
        assert!(s.all_passed());
        assert_eq!(s.entries, 0);
    }

    #[test]
    fn small_entries_pass_and_fault_is_caught() {
        let entries: Vec<_> = builtin()
            .into_iter()
            .filter(|e| e.key == "2/1,1" || e.key == "zhou:2,2")
            .collect();
        assert!(run(&entries, 15, None).unwrap().all_passed());
        let fault = Fault {
            key: "2/1,1".into(),
            index: 4,
            value: BigRational::new(1.into(), 2.into()),
        };
        let s = run(&entries, 15, Some(&fault)).unwrap();
        assert_eq!(s.failed, 1);
        let bad = s.results.iter().find(|r| !r.passed).unwrap();
        assert_eq!(bad.key, "2/1,1");
        assert!(bad.checks.iter().any(|c| c.witness.as_deref() == Some("index 4")));
    }
}
