//! Normalized Frobenius traces, the normalized `n_p(R^4)` statistic, and the
//! reference measures they are compared against.

use std::f64::consts::PI;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::curves::{frobenius_trace, CurveSpec};
use crate::error::{Error, Result};
use crate::ffield::{sieve_primes, PrimeModulus, ResidueTable};
use crate::patterns::{count_pattern_scan, PatternWord};

/// Default step for gridded convolutions.
pub const DEFAULT_GRID_STEP: f64 = 5e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum ClassFilter {
    #[default]
    All,
    OneModFour,
    ThreeModFour,
}

impl ClassFilter {
    pub fn matches(self, p: PrimeModulus) -> bool {
        match self {
            ClassFilter::All => true,
            ClassFilter::OneModFour => p.mod4() == 1,
            ClassFilter::ThreeModFour => p.mod4() == 3,
        }
    }
}

impl FromStr for ClassFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(ClassFilter::All),
            "1" | "1mod4" => Ok(ClassFilter::OneModFour),
            "3" | "3mod4" => Ok(ClassFilter::ThreeModFour),
            other => Err(Error::Parse(format!("unknown class filter {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceSample {
    pub p: PrimeModulus,
    pub value: f64,
    /// `p mod 4`
    pub class: u8,
}

/// `a / (2 g sqrt(p))`.
pub fn normalized_trace(a: i64, p: PrimeModulus, genus: u32) -> f64 {
    a as f64 / (2.0 * genus.max(1) as f64 * (p.get() as f64).sqrt())
}

/// `n / sqrt(p) - sqrt(p) / 16`.
pub fn r4_statistic(n_r4: u64, p: PrimeModulus) -> f64 {
    let s = (p.get() as f64).sqrt();
    n_r4 as f64 / s - s / 16.0
}

/// Sorted sample with a right-continuous step CDF.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalDistribution {
    values: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        EmpiricalDistribution { values }
    }

    pub fn from_samples(samples: &[TraceSample]) -> Self {
        Self::new(samples.iter().map(|s| s.value).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// `#{v <= t} / N`
    pub fn cdf(&self, t: f64) -> f64 {
        self.values.partition_point(|&v| v <= t) as f64 / self.len() as f64
    }

    /// `#{v < t} / N`
    pub fn cdf_left(&self, t: f64) -> f64 {
        self.values.partition_point(|&v| v < t) as f64 / self.len() as f64
    }
}

fn semicircle_cdf(t: f64) -> f64 {
    if t <= -1.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        0.5 + (t * (1.0 - t * t).sqrt() + t.asin()) / PI
    }
}

fn arcsine_cdf(t: f64) -> f64 {
    if t <= -1.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        0.5 + t.asin() / PI
    }
}

/// Probability measure on `[-1, 1]` given through its CDF.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceMeasure {
    /// Density `(2/pi) sqrt(1 - t^2)`.
    Semicircle,
    /// Density `1 / (pi sqrt(1 - t^2))`.
    Arcsine,
    Dirac0,
    Mixture(Vec<(f64, ReferenceMeasure)>),
    /// Density `c f(c t)`.
    Scaled {
        base: Box<ReferenceMeasure>,
        factor: f64,
    },
    Grid(GridMeasure),
}

impl ReferenceMeasure {
    /// `1/2 delta_0 + 1/2 arcsine`.
    pub fn lambda_cm() -> Self {
        ReferenceMeasure::Mixture(vec![
            (0.5, ReferenceMeasure::Dirac0),
            (0.5, ReferenceMeasure::Arcsine),
        ])
    }

    pub fn scaled(base: ReferenceMeasure, factor: f64) -> Self {
        assert!(factor >= 1.0, "scaling factor must be at least 1");
        ReferenceMeasure::Scaled {
            base: Box::new(base),
            factor,
        }
    }

    /// `8 mu_ST(8t)` on `[-1/8, 1/8]`.
    pub fn mu3() -> Self {
        Self::scaled(ReferenceMeasure::Semicircle, 8.0)
    }

    /// `4 mu_cm(4t) * 4 mu_ST(4t) * 8 mu_ST(8t)` on `[-5/8, 5/8]`.
    pub fn mu1(h: f64) -> Result<ConvolutionResult> {
        convolve_densities(
            &[
                Self::scaled(ReferenceMeasure::Arcsine, 4.0),
                Self::scaled(ReferenceMeasure::Semicircle, 4.0),
                Self::scaled(ReferenceMeasure::Semicircle, 8.0),
            ],
            h,
        )
    }

    pub fn name(&self) -> String {
        match self {
            ReferenceMeasure::Semicircle => "semicircle".into(),
            ReferenceMeasure::Arcsine => "arcsine".into(),
            ReferenceMeasure::Dirac0 => "dirac0".into(),
            ReferenceMeasure::Mixture(parts) => parts
                .iter()
                .map(|(w, m)| format!("{w}*{}", m.name()))
                .collect::<Vec<_>>()
                .join("+"),
            ReferenceMeasure::Scaled { base, factor } => format!("{}[x{factor}]", base.name()),
            ReferenceMeasure::Grid(_) => "grid".into(),
        }
    }

    /// Right-continuous CDF on the whole line.
    pub fn cdf(&self, t: f64) -> f64 {
        match self {
            ReferenceMeasure::Semicircle => semicircle_cdf(t),
            ReferenceMeasure::Arcsine => arcsine_cdf(t),
            ReferenceMeasure::Dirac0 => f64::from(u8::from(t >= 0.0)),
            ReferenceMeasure::Mixture(parts) => parts.iter().map(|(w, m)| w * m.cdf(t)).sum(),
            ReferenceMeasure::Scaled { base, factor } => base.cdf(factor * t),
            ReferenceMeasure::Grid(g) => g.cdf(t),
        }
    }

    /// `P(X < t)`; differs from [`cdf`](Self::cdf) only at atoms.
    pub fn cdf_left(&self, t: f64) -> f64 {
        match self {
            ReferenceMeasure::Dirac0 => f64::from(u8::from(t > 0.0)),
            ReferenceMeasure::Mixture(parts) => parts.iter().map(|(w, m)| w * m.cdf_left(t)).sum(),
            ReferenceMeasure::Scaled { base, factor } => base.cdf_left(factor * t),
            other => other.cdf(t),
        }
    }

    /// CDF for `t` in `[-1, 1]`; out-of-range arguments are clamped and flagged.
    pub fn cdf_checked(&self, t: f64) -> (f64, bool) {
        let clamped = t.clamp(-1.0, 1.0);
        (self.cdf(clamped), clamped != t)
    }

    /// Smallest `t` with `cdf(t) >= u`.
    pub fn quantile(&self, u: f64) -> f64 {
        let (mut lo, mut hi) = self.support();
        if u <= 0.0 {
            return lo;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) >= u {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        hi
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            ReferenceMeasure::Semicircle | ReferenceMeasure::Arcsine => (-1.0, 1.0),
            ReferenceMeasure::Dirac0 => (0.0, 0.0),
            ReferenceMeasure::Mixture(parts) => parts
                .iter()
                .filter(|(w, _)| *w > 0.0)
                .map(|(_, m)| m.support())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (c, d)| {
                    (a.min(c), b.max(d))
                }),
            ReferenceMeasure::Scaled { base, factor } => {
                let (a, b) = base.support();
                (a / factor, b / factor)
            }
            ReferenceMeasure::Grid(g) => g.support(),
        }
    }

    pub fn is_absolutely_continuous(&self) -> bool {
        match self {
            ReferenceMeasure::Dirac0 => false,
            ReferenceMeasure::Mixture(parts) => parts
                .iter()
                .all(|(w, m)| *w == 0.0 || m.is_absolutely_continuous()),
            ReferenceMeasure::Scaled { base, .. } => base.is_absolutely_continuous(),
            _ => true,
        }
    }
}

/// Point masses on the nodes `lo + i h`, each spread uniformly over its cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeasure {
    lo: f64,
    h: f64,
    masses: Vec<f64>,
    /// `cumulative[i]` is the mass of nodes `0..i`.
    cumulative: Vec<f64>,
}

impl GridMeasure {
    fn new(lo: f64, h: f64, masses: Vec<f64>) -> Self {
        let mut cumulative = Vec::with_capacity(masses.len() + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for &m in &masses {
            acc += m;
            cumulative.push(acc);
        }
        GridMeasure {
            lo,
            h,
            masses,
            cumulative,
        }
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.masses
            .iter()
            .enumerate()
            .map(|(i, &m)| (self.lo + i as f64 * self.h, m))
    }

    pub fn total_mass(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Average density over each cell.
    pub fn density(&self, t: f64) -> f64 {
        let x = (t - self.lo) / self.h + 0.5;
        if x < 0.0 || x >= self.masses.len() as f64 {
            return 0.0;
        }
        self.masses[x as usize] / self.h
    }

    pub fn cdf(&self, t: f64) -> f64 {
        let x = (t - self.lo) / self.h + 0.5;
        if x <= 0.0 {
            return 0.0;
        }
        let n = self.masses.len();
        if x >= n as f64 {
            return self.total_mass();
        }
        let i = x.floor() as usize;
        self.cumulative[i] + self.masses[i] * (x - i as f64)
    }

    /// Outer edges of the first and last cells carrying mass.
    pub fn support(&self) -> (f64, f64) {
        let first = self.masses.iter().position(|&m| m > 0.0).unwrap_or(0);
        let last = self.masses.iter().rposition(|&m| m > 0.0).unwrap_or(0);
        (
            self.lo + (first as f64 - 0.5) * self.h,
            self.lo + (last as f64 + 0.5) * self.h,
        )
    }

    /// `max |f(t) - f(-t)|` over the nodes, relative to the grid's own centre.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.masses.len();
        (0..n / 2)
            .map(|i| (self.masses[i] - self.masses[n - 1 - i]).abs() / self.h)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionResult {
    pub measure: GridMeasure,
    pub warning: Option<String>,
}

impl ConvolutionResult {
    pub fn into_reference(self) -> ReferenceMeasure {
        ReferenceMeasure::Grid(self.measure)
    }
}

/// Discretizes a member into node masses `F(x + h/2) - F(x - h/2)` on `x = i h`.
fn node_masses(m: &ReferenceMeasure, h: f64) -> (i64, Vec<f64>) {
    let (a, b) = m.support();
    let first = (a / h).round() as i64;
    let last = (b / h).round() as i64;
    let masses = (first..=last)
        .map(|i| {
            let x = i as f64 * h;
            m.cdf(x + 0.5 * h) - m.cdf(x - 0.5 * h)
        })
        .collect();
    (first, masses)
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (o, &y) in out[i..].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    out
}

/// Density of a sum of independent absolutely continuous members, on a grid of step `h`.
pub fn convolve_densities(members: &[ReferenceMeasure], h: f64) -> Result<ConvolutionResult> {
    if members.is_empty() {
        return Err(Error::InvalidMeasure("nothing to convolve".into()));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidMeasure(format!(
            "grid step {h} must be positive"
        )));
    }
    if let Some(m) = members.iter().find(|m| !m.is_absolutely_continuous()) {
        return Err(Error::InvalidMeasure(format!(
            "{} has an atom and cannot be convolved on a grid",
            m.name()
        )));
    }
    let warning = (h > 1e-3).then(|| {
        let msg = format!("grid step {h} is coarser than 1e-3; CDF accuracy degrades");
        log::warn!("{msg}");
        msg
    });
    let (mut first, mut masses) = node_masses(&members[0], h);
    for m in &members[1..] {
        let (f, ms) = node_masses(m, h);
        masses = convolve(&masses, &ms);
        first += f;
    }
    Ok(ConvolutionResult {
        measure: GridMeasure::new(first as f64 * h, h, masses),
        warning,
    })
}

/// `sup |F_emp - F_ref|` over the sample points, both one-sided limits included.
pub fn ks_distance(empirical: &EmpiricalDistribution, reference: &ReferenceMeasure) -> f64 {
    let v = empirical.values();
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        let below = i as f64 / n;
        let upto = j as f64 / n;
        d = d
            .max((upto - reference.cdf(v[i])).abs())
            .max((below - reference.cdf_left(v[i])).abs());
        i = j;
    }
    d
}

/// Normalized traces of `y^2 = f(x)` at every good prime `p <= limit` passing the filter.
pub fn collect_traces(
    curve: &CurveSpec,
    limit: u64,
    filter: ClassFilter,
) -> Result<Vec<TraceSample>> {
    if limit > 10_000_000 {
        return Err(Error::OutOfRange {
            what: "prime limit",
            value: limit,
            constraint: "limit <= 10^7",
        });
    }
    let primes: Vec<_> = sieve_primes(limit.max(3))?
        .into_iter()
        .filter(|&p| filter.matches(p) && p.get() <= limit && curve.has_good_reduction(p))
        .collect();
    primes
        .par_iter()
        .map(|&p| {
            let rec = frobenius_trace(curve, &ResidueTable::new(p))?;
            Ok(TraceSample {
                p,
                value: normalized_trace(rec.trace, p, rec.genus),
                class: p.mod4(),
            })
        })
        .collect()
}

/// The normalized `n_p(R^4)` statistic split by class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct R4Statistic {
    pub one_mod_four: Vec<TraceSample>,
    pub three_mod_four: Vec<TraceSample>,
}

/// `n_p(R^4)` by scanning `W_p`, for `5 <= p <= limit`.
pub fn np_r4_statistic(limit: u64) -> Result<R4Statistic> {
    if limit < 100 {
        return Err(Error::OutOfRange {
            what: "prime limit",
            value: limit,
            constraint: "limit >= 100",
        });
    }
    let word = PatternWord::residues(4);
    let samples: Vec<TraceSample> = sieve_primes(limit)?
        .into_par_iter()
        .filter(|p| p.get() >= 5)
        .map(|p| {
            let n = count_pattern_scan(&ResidueTable::new(p), &word)?;
            Ok(TraceSample {
                p,
                value: r4_statistic(n, p),
                class: p.mod4(),
            })
        })
        .collect::<Result<_>>()?;
    let (one_mod_four, three_mod_four) = samples.into_iter().partition(|s| s.class == 1);
    Ok(R4Statistic {
        one_mod_four,
        three_mod_four,
    })
}

/// Trace of `E_0` and `n_p(R^4)` from one residue table per prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub p: PrimeModulus,
    pub a0: i64,
    pub n_r4: u64,
}

/// Trace of `y^2 = x(x+1)(x+2)` and the `RRRR` count in one pass over the table.
fn e0_r4_kernel(table: &ResidueTable) -> (i64, u64) {
    let chi = table.as_slice();
    // x = p-2 and x = p-1 both hit chi(0) = 0
    let s = chi
        .iter()
        .zip(&chi[1..])
        .zip(&chi[2..])
        .fold(0i64, |acc, ((a, b), c)| {
            acc.wrapping_add(a.wrapping_mul(*b).wrapping_mul(*c) as i64)
        });
    let w = &chi[1..];
    let n = w
        .iter()
        .zip(&w[1..])
        .zip(&w[2..])
        .zip(&w[3..])
        .fold(0u64, |acc, (((a, b), c), d)| {
            acc.wrapping_add((a.wrapping_add(*b).wrapping_add(*c).wrapping_add(*d) == 4) as u64)
        });
    (-s, n)
}

pub fn e0_r4_sweep(limit: u64) -> Result<Vec<SweepRow>> {
    Ok(sieve_primes(limit.max(3))?
        .into_par_iter()
        .filter(|p| p.get() >= 5 && p.get() <= limit)
        .map(|p| {
            let (a0, n_r4) = e0_r4_kernel(&ResidueTable::new(p));
            SweepRow { p, a0, n_r4 }
        })
        .collect())
}

/// Samples outside `[lo - slack(p), hi + slack(p)]`.
pub fn support_violations(
    samples: &[TraceSample],
    lo: f64,
    hi: f64,
    slack: impl Fn(PrimeModulus) -> f64,
) -> Vec<TraceSample> {
    samples
        .iter()
        .filter(|s| {
            let e = slack(s.p);
            s.value < lo - e || s.value > hi + e
        })
        .copied()
        .collect()
}

/// `5 / sqrt(p)`: the slack allowed by `|c_p(4)| <= 5`.
pub fn r4_slack(p: PrimeModulus) -> f64 {
    5.0 / (p.get() as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub empirical_mass: f64,
    pub reference_mass: f64,
}

/// Equal-width bins over `[lo, hi]`; half-open except the last.
pub fn histogram(
    empirical: &EmpiricalDistribution,
    reference: &ReferenceMeasure,
    lo: f64,
    hi: f64,
    bins: usize,
) -> Vec<HistogramBin> {
    assert!(bins >= 1 && hi > lo);
    let w = (hi - lo) / bins as f64;
    (0..bins)
        .map(|i| {
            let left = lo + i as f64 * w;
            let right = if i + 1 == bins {
                hi
            } else {
                lo + (i + 1) as f64 * w
            };
            let last = i + 1 == bins;
            let emp_hi = if last {
                empirical.cdf(right)
            } else {
                empirical.cdf_left(right)
            };
            let ref_hi = if last {
                reference.cdf(right)
            } else {
                reference.cdf_left(right)
            };
            HistogramBin {
                bin_left: left,
                bin_right: right,
                empirical_mass: emp_hi - empirical.cdf_left(left),
                reference_mass: ref_hi - reference.cdf_left(left),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatsSummary {
    #[serde(rename = "N")]
    pub n: usize,
    pub ks: f64,
    pub support_min: f64,
    pub support_max: f64,
}

pub fn summary(empirical: &EmpiricalDistribution, reference: &ReferenceMeasure) -> StatsSummary {
    StatsSummary {
        n: empirical.len(),
        ks: if empirical.is_empty() {
            0.0
        } else {
            ks_distance(empirical, reference)
        },
        support_min: empirical.min().unwrap_or(f64::NAN),
        support_max: empirical.max().unwrap_or(f64::NAN),
    }
}
