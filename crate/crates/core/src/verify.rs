//! Identity suites run prime by prime, with counterexamples collected per suite.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::curves::{
    frobenius_trace, jacobsthal, l4_trace_identity, trace_decomposition_check, CurveSpec,
    FieldDegree,
};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::ffield::{primes_between, PrimeModulus, ResidueTable};
use crate::graphs::{clique4_paley, goncharova_k4_from, y0_relation_check, GoncharovaInputs};
use crate::patterns::{
    aladov_counts, count_all_words, jacobsthal_l3_counts, weil_pattern_bound_check, PatternWord,
};
use crate::stats::{r4_slack, r4_statistic};
use crate::surfaces::lemma_chain_check;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Aladov,
    JacobsthalL3,
    WeilBound,
    TraceDecomposition,
    L4Identity,
    LemmaChain,
    Goncharova,
    #[serde(rename = "eqK")]
    EqK,
    StatsSupport,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Aladov,
        Suite::JacobsthalL3,
        Suite::WeilBound,
        Suite::TraceDecomposition,
        Suite::L4Identity,
        Suite::LemmaChain,
        Suite::Goncharova,
        Suite::EqK,
        Suite::StatsSupport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Aladov => "aladov",
            Suite::JacobsthalL3 => "jacobsthal-l3",
            Suite::WeilBound => "weil-bound",
            Suite::TraceDecomposition => "trace-decomposition",
            Suite::L4Identity => "l4-identity",
            Suite::LemmaChain => "lemma-chain",
            Suite::Goncharova => "goncharova",
            Suite::EqK => "eqK",
            Suite::StatsSupport => "stats-support",
        }
    }

    pub fn default_range(self) -> (u64, u64) {
        match self {
            Suite::Aladov => (7, 100_000),
            Suite::JacobsthalL3 => (7, 10_000),
            Suite::WeilBound => (3, 5000),
            Suite::TraceDecomposition => (11, 500),
            Suite::L4Identity => (7, 2000),
            Suite::LemmaChain => (5, 300),
            Suite::Goncharova => (13, 1000),
            Suite::EqK => (5, 300),
            Suite::StatsSupport => (5, 100_000),
        }
    }

    /// Largest upper bound accepted without `force`.
    pub fn cap(self) -> u64 {
        match self {
            Suite::Aladov | Suite::StatsSupport => 10_000_000,
            Suite::JacobsthalL3 => 1_000_000,
            Suite::WeilBound | Suite::L4Identity => 100_000,
            Suite::TraceDecomposition | Suite::LemmaChain | Suite::EqK => 500,
            Suite::Goncharova => 2000,
        }
    }

    /// Whether the suite has anything to check at `p`.
    fn applies(self, p: PrimeModulus) -> bool {
        let v = p.get();
        match self {
            Suite::Aladov => true,
            Suite::WeilBound => v > 2,
            Suite::JacobsthalL3 | Suite::L4Identity => v >= 7,
            Suite::TraceDecomposition => v >= 11,
            Suite::LemmaChain | Suite::StatsSupport => v >= 5,
            Suite::Goncharova | Suite::EqK => p.is_one_mod_four(),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

/// Deliberate corruption used to exercise the failure path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Fault {
    /// Flip the sign of the `2k d` term in the 4-clique formula.
    NegateTrace,
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "negate-trace" => Ok(Fault::NegateTrace),
            other => Err(Error::Parse(format!("unknown fault {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub suite: Suite,
    pub identity: String,
    pub p: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub range: (u64, u64),
    pub primes_checked: usize,
    pub failures: Vec<Failure>,
    pub warnings: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Distinct primes with at least one failure.
    pub fn counterexample_primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.failures.iter().map(|f| f.p).collect();
        ps.dedup();
        ps
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    pub range: Option<(u64, u64)>,
    pub force: bool,
    pub fault: Option<Fault>,
}

struct Checker {
    suite: Suite,
    p: u64,
    failures: Vec<Failure>,
}

impl Checker {
    fn check(&mut self, ok: bool, identity: &str, detail: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(Failure {
                suite: self.suite,
                identity: identity.to_string(),
                p: self.p,
                detail: detail(),
            });
        }
    }
}

fn check_prime(suite: Suite, p: PrimeModulus, fault: Option<Fault>) -> Vec<Failure> {
    let mut c = Checker {
        suite,
        p: p.get(),
        failures: Vec::new(),
    };
    if let Err(e) = run_checks(&mut c, p, fault) {
        c.check(false, "computation", || e.to_string());
    }
    c.failures
}

fn run_checks(c: &mut Checker, p: PrimeModulus, fault: Option<Fault>) -> Result<()> {
    let table = ResidueTable::new(p);
    match c.suite {
        Suite::Aladov => {
            let scan = count_all_words(&table, 2)?;
            let formula = aladov_counts(p).as_array();
            c.check(scan == formula, "length-2 word counts", || {
                format!("scan {scan:?} formula {formula:?}")
            });
        }
        Suite::JacobsthalL3 => {
            let pair = if p.is_one_mod_four() {
                Some(jacobsthal(&table)?)
            } else {
                None
            };
            if let Some(pair) = pair {
                let lhs = pair.j * pair.j + pair.b * pair.b;
                c.check(lhs == 4 * p.get() as i64, "J^2 + b^2 = 4p", || {
                    format!("J = {} b = {}", pair.j, pair.b)
                });
            }
            let closed = jacobsthal_l3_counts(p, pair.map_or(0, |q| q.j))?;
            let scan = count_all_words(&table, 3)?;
            for (word, value) in &closed.values {
                let n = scan[word.code()];
                let exact = (*value - Dyadic::from(n as i64)).abs() <= Dyadic::from(1);
                c.check(exact, "length-3 closed form within 1", || {
                    format!("word {word} scan {n} closed {value}")
                });
            }
        }
        Suite::WeilBound => {
            for l in 2..=6usize.min(p.get() as usize - 1) {
                let report = weil_pattern_bound_check(&table, l)?;
                for w in report.words.iter().filter(|w| !w.holds) {
                    c.check(false, "pattern Weil bound", || {
                        format!(
                            "l = {l} word {} count {} margin {}",
                            w.word, w.count, w.margin
                        )
                    });
                }
            }
        }
        Suite::TraceDecomposition => {
            let mut cases = vec![(4, FieldDegree::Base), (4, FieldDegree::Quadratic)];
            if (13..=200).contains(&p.get()) {
                cases.push((5, FieldDegree::Base));
            }
            for (l, ext) in cases {
                let t = trace_decomposition_check(l, &table, ext)?;
                c.check(t.holds(), "trace of C_l = sum of a_T", || {
                    format!(
                        "l = {l} q = p^{} lhs {} rhs {}",
                        ext.degree(),
                        t.lhs,
                        t.rhs()
                    )
                });
            }
        }
        Suite::L4Identity => {
            let id = l4_trace_identity(&table)?;
            c.check(id.correction_bounded(), "|c_p(4)| <= 5", || {
                format!("c_p(4) = {}", id.correction)
            });
            c.check(
                id.supersingular_relations_hold(),
                "a_0 = 0 and a_1 + a_2 = 0",
                || format!("traces {:?}", id.traces),
            );
        }
        Suite::LemmaChain => {
            let report = lemma_chain_check(&table)?;
            for f in report.failures() {
                c.check(false, f.name, || format!("lhs {} rhs {}", f.lhs, f.rhs));
            }
        }
        Suite::Goncharova => {
            let inputs = GoncharovaInputs::new(&table)?;
            let cliques = clique4_paley(&table)?;
            let negate = fault == Some(Fault::NegateTrace);
            let brute = cliques / p.get();
            match goncharova_k4_from(&inputs, negate) {
                Ok(formula) => c.check(
                    formula == brute && cliques % p.get() == 0,
                    "n_p(K4) formula",
                    || {
                        format!(
                            "formula {formula} cliques/p {brute} (k = {} d = {})",
                            inputs.k, inputs.d
                        )
                    },
                ),
                Err(e) => c.check(false, "n_p(K4) formula", || e.to_string()),
            }
        }
        Suite::EqK => {
            for l in [3, 4] {
                let y = y0_relation_check(l, &table)?;
                c.check(y.holds(), "|Y_0| = 2^d l! p n_p(K_l)", || {
                    format!("l = {l} Y0 {} rhs {}", y.y0, y.rhs())
                });
            }
        }
        Suite::StatsSupport => {
            let n = crate::patterns::count_pattern_scan(&table, &PatternWord::residues(4))?;
            let t = r4_statistic(n, p);
            let half = if p.is_one_mod_four() { 0.625 } else { 0.125 };
            let slack = r4_slack(p);
            c.check(t.abs() <= half + slack, "R^4 statistic support", || {
                format!("value {t} outside +-({half} + {slack})")
            });
            if !p.is_one_mod_four() {
                let a0 = frobenius_trace(&CurveSpec::e0(), &table)?.trace;
                c.check(a0 == 0, "a_0 = 0 at p = 3 mod 4", || format!("a_0 = {a0}"));
            }
        }
    }
    Ok(())
}

/// Runs one suite over the primes of `[lo, hi]`.
pub fn run_suite(
    suite: Suite,
    range: (u64, u64),
    force: bool,
    fault: Option<Fault>,
) -> Result<SuiteReport> {
    let (lo, hi) = range;
    if hi > suite.cap() && !force {
        return Err(Error::OutOfRange {
            what: "range upper bound",
            value: hi,
            constraint: "per-suite cap; pass --force to exceed",
        });
    }
    let primes: Vec<PrimeModulus> = primes_between(lo.max(3), hi)
        .into_iter()
        .filter(|&p| suite.applies(p))
        .collect();
    let mut warnings = Vec::new();
    if primes.is_empty() {
        let msg = format!("{suite}: no primes to check in {lo}..{hi}");
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let failures: Vec<Failure> = primes
        .par_iter()
        .map(|&p| check_prime(suite, p, fault))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok(SuiteReport {
        suite,
        range,
        primes_checked: primes.len(),
        failures,
        warnings,
    })
}

/// Runs `suites` (all when empty), each on the given range or its default.
pub fn verify_all(suites: &[Suite], options: VerifyOptions) -> Result<Vec<SuiteReport>> {
    let chosen = if suites.is_empty() {
        &Suite::ALL[..]
    } else {
        suites
    };
    chosen
        .iter()
        .map(|&s| {
            run_suite(
                s,
                options.range.unwrap_or(s.default_range()),
                options.force,
                options.fault,
            )
        })
        .collect()
}
