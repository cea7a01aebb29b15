use rayon::prelude::*;
use serde_json::json;

use qrp_core::curves::{frobenius_trace_over, jacobsthal};
use qrp_core::ffield::primes_between;
use qrp_core::graphs::{gamma_counts, goncharova_k4, CLASS_NAMES};
use qrp_core::patterns::pattern_record;
use qrp_core::stats::{
    collect_traces, histogram, np_r4_statistic, r4_slack, summary, support_violations,
    DEFAULT_GRID_STEP,
};
use qrp_core::surfaces::{lemma_chain_check, surface_record};
use qrp_core::verify::{run_suite, Fault, Suite};
use qrp_core::{
    ClassFilter, CurveSpec, EmpiricalDistribution, Error, FieldDegree, FourGraph, PatternWord,
    PrimeModulus, ReferenceMeasure, ResidueTable, TraceSample,
};

use crate::output::{Cell, FailureRecord, Report, Table};

pub enum CliError {
    /// Bad arguments or a cap exceeded: exit 2.
    Usage(String),
    /// A computation failed outright: exit 1.
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub struct Scope {
    pub range: (u64, u64),
    pub class: ClassFilter,
    pub force: bool,
}

impl Scope {
    fn primes(&self, min: u64) -> Vec<PrimeModulus> {
        primes_between(self.range.0.max(min), self.range.1)
            .into_iter()
            .filter(|&p| self.class.matches(p))
            .collect()
    }

    fn cap(&self, what: &str, cap: u64) -> CliResult<()> {
        if self.range.1 > cap && !self.force {
            return Err(CliError::Usage(format!(
                "{what} is capped at p <= {cap}; pass --force to go further"
            )));
        }
        Ok(())
    }
}

fn failure(source: &str, identity: &str, p: PrimeModulus, detail: String) -> FailureRecord {
    FailureRecord {
        source: source.to_string(),
        identity: identity.to_string(),
        p: p.get(),
        detail,
    }
}

/// Runs `f` at every prime in parallel and keeps results in prime order.
fn per_prime<T: Send>(
    primes: &[PrimeModulus],
    f: impl Fn(PrimeModulus, &ResidueTable) -> qrp_core::Result<T> + Sync,
) -> qrp_core::Result<Vec<(PrimeModulus, T)>> {
    primes
        .par_iter()
        .map(|&p| f(p, &ResidueTable::new(p)).map(|t| (p, t)))
        .collect()
}

pub fn patterns(scope: &Scope, words: &[PatternWord], length: usize) -> CliResult<Report> {
    let words: Vec<PatternWord> = if words.is_empty() {
        if !(1..=12).contains(&length) {
            return Err(CliError::Usage("--length must be in 1..=12".into()));
        }
        PatternWord::all(length)
    } else {
        words.to_vec()
    };
    let longest = words.iter().map(PatternWord::len).max().unwrap_or(1) as u64;
    let rows = per_prime(&scope.primes(longest + 2), |_, t| {
        words
            .iter()
            .map(|w| pattern_record(t, w))
            .collect::<qrp_core::Result<Vec<_>>>()
    })?;
    let mut table = Table::new(&["p", "word", "scan_count", "formula", "diff"]);
    let mut failures = Vec::new();
    for (p, recs) in rows {
        for r in recs {
            if !r.within_boundary_slack() {
                failures.push(failure(
                    "patterns",
                    "scan within boundary slack of formula",
                    p,
                    format!("{r:?}"),
                ));
            }
            table.push(vec![
                p.get().into(),
                r.word.to_string().into(),
                r.scan_count.into(),
                r.formula_value.into(),
                r.diff().into(),
            ]);
        }
    }
    Ok(Report {
        command: "patterns",
        range: Some(scope.range),
        table,
        failures,
        summary: None,
    })
}

pub fn curves(scope: &Scope, curve: &CurveSpec, ext: FieldDegree) -> CliResult<Report> {
    let primes: Vec<_> = scope
        .primes(3)
        .into_iter()
        .filter(|&p| curve.has_good_reduction(p))
        .collect();
    let rows = per_prime(&primes, |_, t| frobenius_trace_over(curve, t, ext))?;
    let mut table = Table::new(&[
        "p",
        "label",
        "field_degree",
        "affine_count",
        "points_at_infinity",
        "trace",
        "genus",
    ]);
    let mut failures = Vec::new();
    for (p, r) in rows {
        if !r.satisfies_weil_bound() {
            failures.push(failure(
                "curves",
                "Weil bound",
                p,
                format!("trace {}", r.trace),
            ));
        }
        table.push(vec![
            p.get().into(),
            r.label.as_str().into(),
            u64::from(r.field_degree).into(),
            r.affine_count.into(),
            r.points_at_infinity.into(),
            r.trace.into(),
            u64::from(r.genus).into(),
        ]);
    }
    Ok(Report {
        command: "curves",
        range: Some(scope.range),
        table,
        failures,
        summary: None,
    })
}

pub fn jacobsthal_pairs(scope: &Scope) -> CliResult<Report> {
    let primes: Vec<_> = scope
        .primes(5)
        .into_iter()
        .filter(|p| p.is_one_mod_four())
        .collect();
    let rows = per_prime(&primes, |_, t| jacobsthal(t))?;
    let mut table = Table::new(&["p", "J", "b", "check"]);
    let mut failures = Vec::new();
    for (p, pair) in rows {
        let check = pair.j * pair.j + pair.b * pair.b - 4 * p.get() as i64;
        if check != 0 {
            failures.push(failure(
                "jacobsthal",
                "J^2 + b^2 = 4p",
                p,
                format!("check {check}"),
            ));
        }
        table.push(vec![
            p.get().into(),
            pair.j.into(),
            pair.b.into(),
            check.into(),
        ]);
    }
    Ok(Report {
        command: "jacobsthal",
        range: Some(scope.range),
        table,
        failures,
        summary: None,
    })
}

pub fn surface(scope: &Scope) -> CliResult<Report> {
    scope.cap("surface", 500)?;
    let rows = per_prime(&scope.primes(5), |_, t| {
        Ok((surface_record(t)?, lemma_chain_check(t)?))
    })?;
    let mut table = Table::new(&["p", "s_proj", "s_torus", "m_p", "xp_affine", "xp0", "n_p"]);
    let mut failures = Vec::new();
    for (p, (r, chain)) in rows {
        for c in chain.failures() {
            failures.push(failure(
                "surface",
                c.name,
                p,
                format!("lhs {} rhs {}", c.lhs, c.rhs),
            ));
        }
        table.push(vec![
            p.get().into(),
            r.s_proj.into(),
            r.s_torus.into(),
            r.m_p.into(),
            r.xp_affine.into(),
            r.xp0.into(),
            r.n_p.into(),
        ]);
    }
    Ok(Report {
        command: "surface",
        range: Some(scope.range),
        table,
        failures,
        summary: None,
    })
}

pub fn graphs(scope: &Scope) -> CliResult<Report> {
    scope.cap("graphs", 2000)?;
    let primes: Vec<_> = scope
        .primes(5)
        .into_iter()
        .filter(|p| p.is_one_mod_four())
        .collect();
    let rows = per_prime(&primes, |_, t| Ok((gamma_counts(t)?, goncharova_k4(t)?)))?;
    let mut table = Table::new(&["p", "class_id", "class", "count", "prime_count"]);
    let mut failures = Vec::new();
    for (p, (rec, formula)) in rows {
        let k4 = rec.count(FourGraph::complete());
        if k4 != formula {
            failures.push(failure(
                "graphs",
                "n_p(K4) formula",
                p,
                format!("count {k4} formula {formula}"),
            ));
        }
        for (id, name) in CLASS_NAMES.iter().enumerate() {
            table.push(vec![
                p.get().into(),
                id.into(),
                (*name).into(),
                rec.counts[id].into(),
                rec.prime_counts[id].into(),
            ]);
        }
    }
    Ok(Report {
        command: "graphs",
        range: Some(scope.range),
        table,
        failures,
        summary: None,
    })
}

pub enum StatsSource {
    Curve(CurveSpec),
    R4,
}

pub fn reference_by_name(name: &str) -> CliResult<ReferenceMeasure> {
    Ok(match name {
        "semicircle" => ReferenceMeasure::Semicircle,
        "arcsine" => ReferenceMeasure::Arcsine,
        "lambda-cm" => ReferenceMeasure::lambda_cm(),
        "dirac0" => ReferenceMeasure::Dirac0,
        "mu3" => ReferenceMeasure::mu3(),
        "mu1" => ReferenceMeasure::mu1(DEFAULT_GRID_STEP)?.into_reference(),
        other => {
            return Err(CliError::Usage(format!(
                "unknown reference measure {other:?}"
            )))
        }
    })
}

pub fn stats(
    scope: &Scope,
    source: &StatsSource,
    reference: Option<&str>,
    bins: usize,
) -> CliResult<Report> {
    let (lo, hi) = scope.range;
    let in_range = |s: &TraceSample| s.p.get() >= lo && s.p.get() <= hi;
    let mut failures = Vec::new();
    let (samples, default_ref, window) = match source {
        StatsSource::Curve(c) => {
            let samples: Vec<_> = collect_traces(c, hi, scope.class)?
                .into_iter()
                .filter(in_range)
                .collect();
            let cm = c.label() == "E0" || c.label() == "x3-x";
            let r = match (cm, scope.class) {
                (true, ClassFilter::OneModFour) => "arcsine",
                (true, ClassFilter::ThreeModFour) => "dirac0",
                (true, ClassFilter::All) => "lambda-cm",
                (false, _) => "semicircle",
            };
            (samples, r, 1.0)
        }
        StatsSource::R4 => {
            let r4 = np_r4_statistic(hi.max(100))?;
            let (samples, r, half, window) = match scope.class {
                ClassFilter::OneModFour => (r4.one_mod_four, "mu1", 0.625, 0.75),
                ClassFilter::ThreeModFour => (r4.three_mod_four, "mu3", 0.125, 0.25),
                ClassFilter::All => {
                    return Err(CliError::Usage("--r4 needs --class 1 or --class 3".into()));
                }
            };
            let samples: Vec<_> = samples.into_iter().filter(in_range).collect();
            for s in support_violations(&samples, -half, half, r4_slack) {
                failures.push(failure(
                    "stats",
                    "R^4 statistic support",
                    s.p,
                    format!("value {}", s.value),
                ));
            }
            (samples, r, window)
        }
    };
    let ref_name = reference.unwrap_or(default_ref);
    let reference = reference_by_name(ref_name)?;
    let dist = EmpiricalDistribution::from_samples(&samples);
    let mut table = Table::new(&["bin_left", "bin_right", "empirical_mass", "reference_mass"]);
    let sum = summary(&dist, &reference);
    if !dist.is_empty() {
        for b in histogram(&dist, &reference, -window, window, bins) {
            table.push(vec![
                Cell::Float(b.bin_left),
                Cell::Float(b.bin_right),
                Cell::Float(b.empirical_mass),
                Cell::Float(b.reference_mass),
            ]);
        }
    } else {
        log::warn!("no samples in {lo}..{hi}");
    }
    log::info!("N = {} KS = {} against {ref_name}", sum.n, sum.ks);
    let mut summary_json = serde_json::to_value(sum).expect("summary serializes");
    summary_json["reference"] = json!(ref_name);
    Ok(Report {
        command: "stats",
        range: Some(scope.range),
        table,
        failures,
        summary: Some(summary_json),
    })
}

pub fn verify(
    suites: &[Suite],
    range: Option<(u64, u64)>,
    force: bool,
    fault: Option<Fault>,
) -> CliResult<Report> {
    let chosen = if suites.is_empty() {
        &Suite::ALL[..]
    } else {
        suites
    };
    let mut table = Table::new(&["suite", "lo", "hi", "primes_checked", "failures", "status"]);
    let mut failures = Vec::new();
    for &s in chosen {
        let r = run_suite(s, range.unwrap_or(s.default_range()), force, fault).map_err(
            |e| match e {
                Error::OutOfRange { .. } => CliError::Usage(format!("{s}: {e} (cap {})", s.cap())),
                other => CliError::Core(other),
            },
        )?;
        log::info!(
            "{s}: {} primes, {}",
            r.primes_checked,
            if r.passed() { "pass" } else { "FAIL" }
        );
        table.push(vec![
            s.name().into(),
            r.range.0.into(),
            r.range.1.into(),
            r.primes_checked.into(),
            r.failures.len().into(),
            if r.passed() { "pass" } else { "fail" }.into(),
        ]);
        failures.extend(r.failures.into_iter().map(|f| FailureRecord {
            source: f.suite.name().to_string(),
            identity: f.identity,
            p: f.p,
            detail: f.detail,
        }));
    }
    Ok(Report {
        command: "verify",
        range,
        table,
        failures,
        summary: None,
    })
}
