//! Residue words `W_p` and counts of consecutive residue/non-residue
//! patterns, together with the classical closed forms for short words.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::curves::{affine_count, CurveSpec, FieldDegree};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::ffield::{legendre, PrimeModulus, ResidueTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    R,
    N,
}

impl Letter {
    /// `+1` for a residue, `-1` for a non-residue.
    pub fn sign(self) -> i8 {
        match self {
            Letter::R => 1,
            Letter::N => -1,
        }
    }

    fn from_chi(c: i8) -> Letter {
        if c == 1 {
            Letter::R
        } else {
            Letter::N
        }
    }
}

/// A non-empty word over `{R, N}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternWord {
    letters: Vec<Letter>,
}

impl PatternWord {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::Parse("pattern words must be non-empty".into()));
        }
        Ok(PatternWord { letters })
    }

    /// `R^l`.
    pub fn residues(l: usize) -> Self {
        assert!(l >= 1);
        PatternWord {
            letters: vec![Letter::R; l],
        }
    }

    /// All `2^l` words of length `l`, `R` before `N` position by position.
    pub fn all(l: usize) -> Vec<PatternWord> {
        assert!((1..=24).contains(&l));
        (0..1usize << l)
            .map(|code| Self::from_code(code, l))
            .collect()
    }

    /// Inverse of [`PatternWord::code`].
    pub fn from_code(code: usize, l: usize) -> Self {
        let letters = (0..l)
            .map(|i| {
                if code >> (l - 1 - i) & 1 == 1 {
                    Letter::N
                } else {
                    Letter::R
                }
            })
            .collect();
        PatternWord { letters }
    }

    /// Binary code with `N = 1`, first letter most significant.
    pub fn code(&self) -> usize {
        self.letters
            .iter()
            .fold(0, |acc, &l| acc << 1 | usize::from(l == Letter::N))
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn epsilon(&self) -> Vec<i8> {
        self.letters.iter().map(|l| l.sign()).collect()
    }

    pub fn reversed(&self) -> Self {
        let mut letters = self.letters.clone();
        letters.reverse();
        PatternWord { letters }
    }

    pub fn is_all_residues(&self) -> bool {
        self.letters.iter().all(|&l| l == Letter::R)
    }
}

impl fmt::Display for PatternWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            f.write_str(match l {
                Letter::R => "R",
                Letter::N => "N",
            })?;
        }
        Ok(())
    }
}

impl FromStr for PatternWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| match c {
                'R' | 'r' => Ok(Letter::R),
                'N' | 'n' => Ok(Letter::N),
                other => Err(Error::Parse(format!(
                    "invalid letter {other:?} in word {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        PatternWord::new(letters)
    }
}

impl Serialize for PatternWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// The word `W_p` of letters for `1, 2, ..., p - 1`.
pub fn residue_word(table: &ResidueTable) -> PatternWord {
    PatternWord {
        letters: table.as_slice()[1..]
            .iter()
            .map(|&c| Letter::from_chi(c))
            .collect(),
    }
}

fn check_length(table: &ResidueTable, word: &PatternWord) -> Result<()> {
    let p = table.modulus();
    if word.len() as u64 > p - 1 {
        return Err(Error::InvalidLength { len: word.len(), p });
    }
    Ok(())
}

/// Number of positions `j` with `W_p[j..j+l] == word` (non-cyclic).
pub fn count_pattern_scan(table: &ResidueTable, word: &PatternWord) -> Result<u64> {
    check_length(table, word)?;
    let chi = &table.as_slice()[1..];
    let windows = chi.len() - word.len() + 1;
    let mut hit = vec![1u8; windows];
    for (i, eps) in word.epsilon().into_iter().enumerate() {
        for (h, &c) in hit.iter_mut().zip(&chi[i..i + windows]) {
            *h &= u8::from(c == eps);
        }
    }
    Ok(hit.iter().fold(0u64, |acc, &h| acc.wrapping_add(h as u64)))
}

/// Counts of every word of length `l` in one pass; index by [`PatternWord::code`].
pub fn count_all_words(table: &ResidueTable, l: usize) -> Result<Vec<u64>> {
    let p = table.modulus();
    if l == 0 || l as u64 > p - 1 {
        return Err(Error::InvalidLength { len: l, p });
    }
    let mask = (1usize << l) - 1;
    let mut counts = vec![0u64; 1 << l];
    let mut code = 0usize;
    for (pos, &c) in table.as_slice()[1..].iter().enumerate() {
        code = (code << 1 | usize::from(c != 1)) & mask;
        if pos + 1 >= l {
            counts[code] += 1;
        }
    }
    Ok(counts)
}

/// `sum_{j in js} prod_i (1 + eps_i chi(i + j - 1)) / 2`, exactly.
pub fn character_product_sum(
    table: &ResidueTable,
    word: &PatternWord,
    js: std::ops::RangeInclusive<u64>,
) -> Dyadic {
    let eps = word.epsilon();
    let p = table.p();
    let mut numer: i128 = 0;
    for j in js {
        let mut term: i128 = 1;
        for (idx, &e) in eps.iter().enumerate() {
            let i = idx as u64 + 1;
            let c = table.chi(p.reduce((i + j - 1) as i64));
            term *= 1 + (e * c) as i128;
            if term == 0 {
                break;
            }
        }
        numer += term;
    }
    Dyadic::new(numer, word.len() as u32)
}

/// The classical character-product formula over `j = 1..=p-l-1`.
pub fn count_pattern_formula(table: &ResidueTable, word: &PatternWord) -> Result<Dyadic> {
    check_length(table, word)?;
    let l = word.len() as u64;
    let hi = table.modulus() - l - 1;
    if hi < 1 {
        return Ok(Dyadic::ZERO);
    }
    Ok(character_product_sum(table, word, 1..=hi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternCountRecord {
    pub p: PrimeModulus,
    pub word: PatternWord,
    pub scan_count: u64,
    pub formula_value: Dyadic,
}

impl PatternCountRecord {
    pub fn diff(&self) -> Dyadic {
        Dyadic::from(self.scan_count as i64) - self.formula_value
    }

    /// `|scan - formula| <= 1`: the formula sees one window fewer than the scan.
    pub fn within_boundary_slack(&self) -> bool {
        self.diff().abs() <= Dyadic::from(1)
    }
}

pub fn pattern_record(table: &ResidueTable, word: &PatternWord) -> Result<PatternCountRecord> {
    Ok(PatternCountRecord {
        p: table.p(),
        word: word.clone(),
        scan_count: count_pattern_scan(table, word)?,
        formula_value: count_pattern_formula(table, word)?,
    })
}

/// `c_p(l) = n_p(R^l) - 2^-l (p + sum_T N_T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryCorrection {
    pub p: PrimeModulus,
    pub l: usize,
    pub value: Dyadic,
}

impl BoundaryCorrection {
    pub fn within_bound(&self) -> bool {
        self.value.abs() <= Dyadic::from(self.l as i64 + 1)
    }
}

/// `N_T = sum_j chi(f_T(j))` for every non-empty `T` in `[1, l]`, via point counts.
pub fn subset_character_sums(table: &ResidueTable, l: usize) -> Result<Vec<(Vec<usize>, i64)>> {
    let p = table.modulus() as i64;
    let mut out = Vec::with_capacity((1 << l) - 1);
    for mask in 1u32..(1 << l) {
        let subset: Vec<usize> = (1..=l).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        let curve = CurveSpec::f_t(&subset);
        let n = affine_count(&curve, table, FieldDegree::Base)? as i64 - p;
        out.push((subset, n));
    }
    Ok(out)
}

pub fn boundary_correction(table: &ResidueTable, l: usize) -> Result<BoundaryCorrection> {
    let p = table.modulus();
    if l == 0 || l as u64 >= p {
        return Err(Error::OutOfRange {
            what: "pattern length",
            value: l as u64,
            constraint: "1 <= l < p",
        });
    }
    let n = count_pattern_scan(table, &PatternWord::residues(l))?;
    let total: i64 = p as i64
        + subset_character_sums(table, l)?
            .iter()
            .map(|(_, n)| n)
            .sum::<i64>();
    Ok(BoundaryCorrection {
        p: table.p(),
        l,
        value: Dyadic::from(n as i64) - Dyadic::new(total as i128, l as u32),
    })
}

/// Counts of the four length-2 words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AladovCounts {
    pub rr: u64,
    pub rn: u64,
    pub nr: u64,
    pub nn: u64,
}

impl AladovCounts {
    pub fn as_array(&self) -> [u64; 4] {
        [self.rr, self.rn, self.nr, self.nn]
    }
}

/// Per-class closed forms for `l = 2`; valid for every odd prime.
pub fn aladov_counts(p: PrimeModulus) -> AladovCounts {
    let p = p.get();
    if p % 4 == 1 {
        let q = (p - 1) / 4;
        AladovCounts {
            rr: (p - 5) / 4,
            rn: q,
            nr: q,
            nn: q,
        }
    } else {
        let q = (p - 3) / 4;
        AladovCounts {
            rr: q,
            rn: (p + 1) / 4,
            nr: q,
            nn: q,
        }
    }
}

/// The single-display rewrite `(RR, RN, NR, NN)` in terms of `(-1/p)`.
///
/// Kept for reporting only: for `p = 1 mod 4` its `NR`/`NN` entries do not
/// match the scan (e.g. 5/2 against 3 at `p = 13`).
pub fn aladov_unified(p: PrimeModulus) -> [Dyadic; 4] {
    let pi = p.get() as i128;
    let m = legendre(-1, p) as i128;
    let nn = Dyadic::new(pi - 2 - m, 2);
    [Dyadic::new(pi - 4 - m, 2), Dyadic::new(pi - m, 2), nn, nn]
}

/// Closed forms for the eight words of length 3.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobsthalL3 {
    pub p: PrimeModulus,
    pub values: Vec<(PatternWord, Dyadic)>,
}

impl JacobsthalL3 {
    pub fn get(&self, word: &PatternWord) -> Option<Dyadic> {
        self.values.iter().find(|(w, _)| w == word).map(|(_, v)| *v)
    }
}

/// `j` is the Jacobsthal sum `J(k)`; ignored when `p = 3 mod 4`.
pub fn jacobsthal_l3_counts(p: PrimeModulus, j: i64) -> Result<JacobsthalL3> {
    if p.get() < 7 {
        return Err(Error::OutOfRange {
            what: "p",
            value: p.get(),
            constraint: "p >= 7",
        });
    }
    let pi = p.get() as i128;
    let two = legendre(2, p) as i128;
    let a = j as i128;
    let value = |word: &str| -> Dyadic {
        let num = if p.mod4() == 3 {
            match word {
                "RRR" | "NNN" | "NRR" | "NNR" => pi - 3 - 2 * two,
                _ => pi - 1 + 2 * two,
            }
        } else {
            match word {
                "RRN" | "NRR" | "RNR" | "NNN" => pi - 5 - a,
                "RNN" | "NNR" => pi + 1 + a,
                "RRR" => pi - 11 - 4 * two + a,
                _ => pi - 3 + 4 * two + a,
            }
        };
        Dyadic::new(num, 3)
    };
    let values = PatternWord::all(3)
        .into_iter()
        .map(|w| {
            let v = value(&w.to_string());
            (w, v)
        })
        .collect();
    Ok(JacobsthalL3 { p, values })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeilMargin {
    pub word: PatternWord,
    pub count: u64,
    /// `(l - 1) sqrt(p) + l/2 - |n - p/2^l|`
    pub margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeilBoundReport {
    pub p: PrimeModulus,
    pub l: usize,
    pub words: Vec<WeilMargin>,
}

impl WeilBoundReport {
    pub fn holds(&self) -> bool {
        self.words.iter().all(|w| w.holds)
    }
}

/// Exact test of `|n - p/2^l| < (l-1) sqrt(p) + l/2`, non-strict when `l = 1`.
fn weil_bound_holds(n: u64, p: u64, l: usize) -> bool {
    let scale = 1i128 << l;
    let x = (scale * n as i128 - p as i128).abs();
    // multiply through by 2^l: x < 2^l (l-1) sqrt(p) + 2^(l-1) l
    let slack = x - (scale / 2) * l as i128;
    if l == 1 {
        return slack <= 0;
    }
    if slack < 0 {
        return true;
    }
    let rhs = scale * scale * ((l as i128 - 1) * (l as i128 - 1)) * p as i128;
    slack * slack < rhs
}

pub fn weil_pattern_bound_check(table: &ResidueTable, l: usize) -> Result<WeilBoundReport> {
    let p = table.modulus();
    if l == 0 || l as u64 >= p {
        return Err(Error::OutOfRange {
            what: "pattern length",
            value: l as u64,
            constraint: "1 <= l < p",
        });
    }
    let counts = count_all_words(table, l)?;
    let bound = (l as f64 - 1.0) * (p as f64).sqrt() + l as f64 / 2.0;
    let words = PatternWord::all(l)
        .into_iter()
        .map(|word| {
            let count = counts[word.code()];
            WeilMargin {
                margin: bound - (count as f64 - p as f64 / (1u64 << l) as f64).abs(),
                holds: weil_bound_holds(count, p, l),
                word,
                count,
            }
        })
        .collect();
    Ok(WeilBoundReport {
        p: table.p(),
        l,
        words,
    })
}
