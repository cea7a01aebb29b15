//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qrp_core::curves::{jacobsthal, l4_trace_identity};
use qrp_core::ffield::{primes_between, ResidueTable};
use qrp_core::graphs::{clique4_paley, gamma_sample, interpolate_gamma_polynomial};
use qrp_core::stats::{
    e0_r4_sweep, ks_distance, normalized_trace, r4_slack, r4_statistic, support_violations,
    EmpiricalDistribution, SweepRow,
};
use qrp_core::surfaces::{
    count_s_cone, count_xprime_boundary_direct, count_xprime_interior_direct, surface_record,
};
use qrp_core::verify::{run_suite, Suite};
use qrp_core::{FourGraph, ReferenceMeasure, TraceSample};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    // time spent on shared precomputation, charged to this criterion too
    shared: Duration,
}

fn suite(s: Suite, range: (u64, u64)) -> Outcome {
    let r = run_suite(s, range, false, None).map_err(|e| e.to_string())?;
    if r.primes_checked == 0 {
        return Err("no primes checked".into());
    }
    match r.failures.first() {
        None => Ok(format!("{} primes", r.primes_checked)),
        Some(f) => Err(format!(
            "{} failures, first at p = {}: {} ({})",
            r.failures.len(),
            f.p,
            f.identity,
            f.detail
        )),
    }
}

fn j_b_identity() -> Outcome {
    let mut n = 0;
    for p in primes_between(5, 10_000)
        .into_iter()
        .filter(|p| p.is_one_mod_four())
    {
        let pair = jacobsthal(&ResidueTable::new(p)).map_err(|e| e.to_string())?;
        if pair.j * pair.j + pair.b * pair.b != 4 * p.get() as i64 {
            return Err(format!("p = {p}: J = {} b = {}", pair.j, pair.b));
        }
        n += 1;
    }
    Ok(format!("{n} primes"))
}

fn l4_identity() -> Outcome {
    suite(Suite::L4Identity, (7, 2000))?;
    let mut seen = BTreeSet::new();
    for p in primes_between(7, 2000) {
        seen.insert(
            l4_trace_identity(&ResidueTable::new(p))
                .map_err(|e| e.to_string())?
                .correction,
        );
    }
    let shown: Vec<String> = seen.iter().map(ToString::to_string).collect();
    if seen.len() > 8 {
        return Err(format!(
            "{} distinct corrections: {}",
            seen.len(),
            shown.join(" ")
        ));
    }
    Ok(format!("c_p(4) in {{{}}}", shown.join(", ")))
}

fn lemma_chain() -> Outcome {
    let report = suite(Suite::LemmaChain, (5, 300))?;
    for p in primes_between(5, 300) {
        let table = ResidueTable::new(p);
        let rec = surface_record(&table).map_err(|e| e.to_string())?;
        let cone = count_s_cone(&table).map_err(|e| e.to_string())?;
        if cone != rec.s_proj {
            return Err(format!("p = {p}: cone count {cone} != {}", rec.s_proj));
        }
        let direct = count_xprime_boundary_direct(&table) + count_xprime_interior_direct(&table);
        if direct != rec.xp_affine || count_xprime_boundary_direct(&table) != rec.xp0 {
            return Err(format!(
                "p = {p}: direct X' count {direct} != {}",
                rec.xp_affine
            ));
        }
    }
    Ok(report)
}

fn goncharova() -> Outcome {
    let report = suite(Suite::Goncharova, (13, 1000))?;
    for (p, want) in [(13u64, 0u64), (17, 0), (29, 7)] {
        let pm = primes_between(p, p)[0];
        let got = clique4_paley(&ResidueTable::new(pm)).map_err(|e| e.to_string())? / p;
        if got != want {
            return Err(format!("n_{p}(K4) = {got}, expected {want}"));
        }
    }
    Ok(report)
}

fn supersingular(sweep: &[SweepRow]) -> Outcome {
    let three: Vec<_> = sweep.iter().filter(|r| r.p.mod4() == 3).collect();
    match three.iter().find(|r| r.a0 != 0) {
        Some(r) => Err(format!("a_0({}) = {}", r.p, r.a0)),
        None => Ok(format!("{} primes = 3 mod 4", three.len())),
    }
}

fn statistics(sweep: &[SweepRow]) -> Outcome {
    let sample = |one: bool, f: &dyn Fn(&SweepRow) -> f64| -> Vec<TraceSample> {
        sweep
            .iter()
            .filter(|r| r.p.is_one_mod_four() == one)
            .map(|r| TraceSample {
                p: r.p,
                value: f(r),
                class: r.p.mod4(),
            })
            .collect()
    };
    let traces = sample(true, &|r| normalized_trace(r.a0, r.p, 1));
    let ks = ks_distance(
        &EmpiricalDistribution::from_samples(&traces),
        &ReferenceMeasure::Arcsine,
    );
    let r4_one = sample(true, &|r| r4_statistic(r.n_r4, r.p));
    let r4_three = sample(false, &|r| r4_statistic(r.n_r4, r.p));
    let bad_one = support_violations(&r4_one, -0.625, 0.625, r4_slack);
    let bad_three = support_violations(&r4_three, -0.125, 0.125, r4_slack);
    let dist = EmpiricalDistribution::from_samples(&r4_one);
    let (lo, hi) = (dist.min().unwrap(), dist.max().unwrap());
    let summary = format!(
        "KS {ks:.4}, R4 range [{lo:.4}, {hi:.4}] over {} primes = 1 mod 4",
        r4_one.len()
    );
    let mut problems = Vec::new();
    if ks > 0.05 {
        problems.push(format!("KS {ks:.4} > 0.05"));
    }
    if !bad_one.is_empty() || !bad_three.is_empty() {
        problems.push(format!(
            "{} support violations",
            bad_one.len() + bad_three.len()
        ));
    }
    if hi < 0.625 - 0.1 || lo > -0.625 + 0.1 {
        problems.push(format!(
            "tightness probe: range [{lo:.4}, {hi:.4}] misses +-0.525"
        ));
    }
    if problems.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {summary}", problems.join("; ")))
    }
}

fn interpolation() -> Outcome {
    let samples = primes_between(13, 2000)
        .into_iter()
        .filter(|p| p.is_one_mod_four())
        .take(24)
        .map(|p| gamma_sample(&ResidueTable::new(p)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let (training, held_out) = samples.split_at(12);
    let poly = interpolate_gamma_polynomial(FourGraph::complete(), training, held_out)
        .map_err(|e| e.to_string())?;
    let expected = [((1, 0), 4), ((2, 0), -5), ((3, 0), 1), ((1, 1), 2)];
    for (i, j) in qrp_core::graphs::interpolation_basis() {
        let want = expected
            .iter()
            .find(|(m, _)| *m == (i, j))
            .map_or(0, |(_, c)| *c);
        let got = poly.coefficient(i, j);
        if got != num_rational::BigRational::from_integer(want.into()) {
            return Err(format!(
                "coefficient of k^{i} d^{j}: {got}, expected {want}"
            ));
        }
    }
    Ok("24 n(K4) = k^3 - 5k^2 + 4k + 2kd".into())
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |c: Criterion, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed() + c.shared;
        let late = if took > c.budget {
            format!(" [over {:?} budget]", c.budget)
        } else {
            String::new()
        };
        let outcome = match outcome {
            Ok(_) if took > c.budget => Err(format!("ran {:.1}s", took.as_secs_f64())),
            other => other,
        };
        match outcome {
            Ok(msg) => println!(
                "PASS {:>2} {} ({:.1}s{late}): {msg}",
                c.id,
                c.name,
                took.as_secs_f64()
            ),
            Err(msg) => {
                failed += 1;
                println!(
                    "FAIL {:>2} {} ({:.1}s{late}): {msg}",
                    c.id,
                    c.name,
                    took.as_secs_f64()
                );
            }
        }
    };
    let secs = Duration::from_secs;
    report(
        Criterion {
            id: 1,
            name: "aladov exactness",
            budget: secs(30),
            shared: Duration::ZERO,
        },
        &mut || suite(Suite::Aladov, (7, 100_000)),
    );
    report(
        Criterion {
            id: 2,
            name: "length-3 closed forms",
            budget: secs(30),
            shared: Duration::ZERO,
        },
        &mut || suite(Suite::JacobsthalL3, (7, 10_000)),
    );
    report(
        Criterion {
            id: 3,
            name: "J^2 + b^2 = 4p",
            budget: secs(10),
            shared: Duration::ZERO,
        },
        &mut j_b_identity,
    );
    report(
        Criterion {
            id: 4,
            name: "pattern Weil bound",
            budget: secs(120),
            shared: Duration::ZERO,
        },
        &mut || suite(Suite::WeilBound, (3, 5000)),
    );
    report(
        Criterion {
            id: 5,
            name: "trace decomposition",
            budget: secs(120),
            shared: Duration::ZERO,
        },
        &mut || suite(Suite::TraceDecomposition, (11, 500)),
    );
    report(
        Criterion {
            id: 6,
            name: "l = 4 trace identity",
            budget: secs(60),
            shared: Duration::ZERO,
        },
        &mut l4_identity,
    );
    report(
        Criterion {
            id: 7,
            name: "surface lemma chain",
            budget: secs(120),
            shared: Duration::ZERO,
        },
        &mut lemma_chain,
    );
    report(
        Criterion {
            id: 8,
            name: "4-clique formula",
            budget: secs(180),
            shared: Duration::ZERO,
        },
        &mut goncharova,
    );
    report(
        Criterion {
            id: 9,
            name: "Y_0 relation",
            budget: secs(120),
            shared: Duration::ZERO,
        },
        &mut || suite(Suite::EqK, (3, 300)),
    );

    let start = Instant::now();
    let sweep = e0_r4_sweep(1_000_000);
    let sweep_time = start.elapsed();
    println!(
        "     E_0 and R^4 sweep to 10^6 took {:.1}s",
        sweep_time.as_secs_f64()
    );
    let sweep = sweep.map_err(|e| e.to_string());
    report(
        Criterion {
            id: 10,
            name: "supersingular E_0",
            budget: secs(120),
            shared: sweep_time,
        },
        &mut || supersingular(sweep.as_ref()?),
    );
    report(
        Criterion {
            id: 11,
            name: "trace statistics",
            budget: secs(300),
            shared: sweep_time,
        },
        &mut || statistics(sweep.as_ref()?),
    );
    report(
        Criterion {
            id: 12,
            name: "K4 interpolation",
            budget: secs(60),
            shared: Duration::ZERO,
        },
        &mut interpolation,
    );

    if failed == 0 {
        println!("all 12 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failed} of 12 criteria failed");
        ExitCode::FAILURE
    }
}
