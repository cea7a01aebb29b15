//! Residue graphs on four points, Paley 4-cliques and the polynomial shape
//! of `n_p(Γ)` in `(k, d(k))`.
//!
//! A graph on `{0, 1, 2, 3}` is a 6-bit mask over the pairs
//! `(0,1), (0,2), (0,3), (1,2), (1,3), (2,3)`, least significant first.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::curves::jacobsthal;
use crate::error::{Error, Result};
use crate::ffield::{PrimeModulus, ResidueTable};

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub const CLASS_COUNT: usize = 11;

/// Class names in class-id order.
pub const CLASS_NAMES: [&str; CLASS_COUNT] = [
    "empty", "K2", "P3", "claw", "K3+K1", "2K2", "P4", "paw", "C4", "diamond", "K4",
];

fn pair_bit(i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    PAIRS
        .iter()
        .position(|&q| q == (a, b))
        .expect("distinct vertices")
}

fn permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let perm = [a, b, c, d];
                    let mut seen = [false; 4];
                    perm.iter().for_each(|&v| seen[v] = true);
                    if seen.iter().all(|&s| s) {
                        out.push(perm);
                    }
                }
            }
        }
    }
    out
}

fn relabel(mask: u8, perm: &[usize; 4]) -> u8 {
    PAIRS
        .iter()
        .enumerate()
        .filter(|&(bit, _)| mask >> bit & 1 == 1)
        .fold(0u8, |acc, (_, &(i, j))| {
            acc | 1 << pair_bit(perm[i], perm[j])
        })
}

struct ClassTables {
    /// Class id of every labelled mask.
    class_of: [u8; 64],
    /// Canonical mask of each class.
    canonical: [u8; CLASS_COUNT],
    /// `contains[g][h]`: some relabelling of `h` has every edge of `g`.
    contains: [[bool; CLASS_COUNT]; CLASS_COUNT],
}

fn tables() -> &'static ClassTables {
    static TABLES: OnceLock<ClassTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let perms = permutations();
        let canon_of = |mask: u8| perms.iter().map(|p| relabel(mask, p)).min().unwrap();
        let mut canonical: Vec<u8> = (0..64u8).map(canon_of).collect();
        canonical.sort_unstable();
        canonical.dedup();
        assert_eq!(canonical.len(), CLASS_COUNT);
        let mut class_of = [0u8; 64];
        for mask in 0..64u8 {
            let c = canon_of(mask);
            class_of[mask as usize] = canonical.iter().position(|&m| m == c).unwrap() as u8;
        }
        let mut contains = [[false; CLASS_COUNT]; CLASS_COUNT];
        for (g, &gm) in canonical.iter().enumerate() {
            for (h, &hm) in canonical.iter().enumerate() {
                contains[g][h] = perms.iter().any(|p| gm & !relabel(hm, p) == 0);
            }
        }
        ClassTables {
            class_of,
            canonical: canonical.try_into().unwrap(),
            contains,
        }
    })
}

/// Isomorphism class of a simple graph on four vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FourGraph {
    class_id: u8,
}

impl FourGraph {
    pub fn from_mask(mask: u8) -> Self {
        FourGraph {
            class_id: tables().class_of[(mask & 63) as usize],
        }
    }

    pub fn from_class_id(id: usize) -> Result<Self> {
        if id >= CLASS_COUNT {
            return Err(Error::OutOfRange {
                what: "class id",
                value: id as u64,
                constraint: "0..=10",
            });
        }
        Ok(FourGraph { class_id: id as u8 })
    }

    pub fn all() -> impl Iterator<Item = FourGraph> {
        (0..CLASS_COUNT as u8).map(|class_id| FourGraph { class_id })
    }

    pub fn complete() -> Self {
        Self::from_mask(63)
    }

    pub fn empty() -> Self {
        Self::from_mask(0)
    }

    pub fn class_id(self) -> usize {
        self.class_id as usize
    }

    /// Smallest mask over all relabellings.
    pub fn canonical_mask(self) -> u8 {
        tables().canonical[self.class_id()]
    }

    pub fn edge_count(self) -> u32 {
        self.canonical_mask().count_ones()
    }

    pub fn name(self) -> &'static str {
        CLASS_NAMES[self.class_id()]
    }

    pub fn complement(self) -> Self {
        Self::from_mask(!self.canonical_mask() & 63)
    }

    /// `self` is a spanning subgraph of some relabelling of `other`.
    pub fn is_contained_in(self, other: FourGraph) -> bool {
        tables().contains[self.class_id()][other.class_id()]
    }
}

impl fmt::Display for FourGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn require_symmetric(table: &ResidueTable) -> Result<()> {
    if !table.p().is_one_mod_four() {
        return Err(Error::OrientedCaseUnsupported(table.modulus()));
    }
    Ok(())
}

/// Edge `(i, j)` iff `r_i - r_j` is a non-zero residue.
pub fn classify_tuple(table: &ResidueTable, r: [u64; 4]) -> Result<FourGraph> {
    require_symmetric(table)?;
    let p = table.modulus();
    let r = r.map(|x| x % p);
    let mut mask = 0u8;
    for (bit, &(i, j)) in PAIRS.iter().enumerate() {
        if r[i] == r[j] {
            return Err(Error::InvalidTuple);
        }
        if table.chi((r[i] + p - r[j]) % p) == 1 {
            mask |= 1 << bit;
        }
    }
    Ok(FourGraph::from_mask(mask))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphCountRecord {
    pub p: PrimeModulus,
    /// `n_p(Γ)` by class id.
    pub counts: [u64; CLASS_COUNT],
    /// `n'_p(Γ)`: translation classes whose graph contains a copy of `Γ`.
    pub prime_counts: [u64; CLASS_COUNT],
}

impl GraphCountRecord {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn expected_total(p: PrimeModulus) -> u64 {
        let m = p.get();
        (m - 1) * (m - 2) * (m - 3) / 24
    }

    pub fn count(&self, g: FourGraph) -> u64 {
        self.counts[g.class_id()]
    }
}

/// Per-class counts of 4-subsets `{0, a, b, c}` with `0 < a < b < c < p`.
fn zero_subset_class_counts(table: &ResidueTable) -> [u64; CLASS_COUNT] {
    let p = table.modulus() as usize;
    let res: Vec<u8> = table.as_slice().iter().map(|&c| u8::from(c == 1)).collect();
    let class_of = &tables().class_of;
    let mut counts = [0u64; CLASS_COUNT];
    for a in 1..p {
        for b in a + 1..p {
            // vertices (0, a, b, c): pairs (0,a) (0,b) (0,c) (a,b) (a,c) (b,c)
            let base = res[a] | res[b] << 1 | res[b - a] << 3;
            let mut hist = [0u64; 8];
            let cs = b + 1..p;
            for ((&x, &y), &z) in res[cs.clone()]
                .iter()
                .zip(&res[cs.start - a..p - a])
                .zip(&res[cs.start - b..p - b])
            {
                hist[(x | y << 1 | z << 2) as usize] += 1;
            }
            for (idx, &n) in hist.iter().enumerate() {
                if n == 0 {
                    continue;
                }
                let idx = idx as u8;
                let mask = base | (idx & 1) << 2 | (idx >> 1 & 1) << 4 | (idx >> 2 & 1) << 5;
                counts[class_of[mask as usize] as usize] += n;
            }
        }
    }
    counts
}

/// `n'` from `n`: sum over classes containing each `Γ`.
pub fn prime_counts_from_counts(counts: &[u64; CLASS_COUNT]) -> [u64; CLASS_COUNT] {
    let t = tables();
    let mut out = [0u64; CLASS_COUNT];
    for (g, slot) in out.iter_mut().enumerate() {
        *slot = (0..CLASS_COUNT)
            .filter(|&h| t.contains[g][h])
            .map(|h| counts[h])
            .sum();
    }
    out
}

/// Inverse of [`prime_counts_from_counts`], from the densest class down.
pub fn counts_from_prime_counts(prime_counts: &[u64; CLASS_COUNT]) -> [u64; CLASS_COUNT] {
    let t = tables();
    let mut order: Vec<usize> = (0..CLASS_COUNT).collect();
    order.sort_by_key(|&g| std::cmp::Reverse(FourGraph { class_id: g as u8 }.edge_count()));
    let mut counts = [0i64; CLASS_COUNT];
    for &g in &order {
        let above: i64 = (0..CLASS_COUNT)
            .filter(|&h| h != g && t.contains[g][h])
            .map(|h| counts[h])
            .sum();
        counts[g] = prime_counts[g] as i64 - above;
    }
    counts.map(|c| c as u64)
}

pub fn gamma_counts(table: &ResidueTable) -> Result<GraphCountRecord> {
    require_symmetric(table)?;
    let p = table.p();
    if p.get() < 5 {
        return Err(Error::OutOfRange {
            what: "p",
            value: p.get(),
            constraint: "p >= 5",
        });
    }
    let raw = zero_subset_class_counts(table);
    // each translation class has exactly four members containing 0
    if raw.iter().any(|&c| c % 4 != 0) {
        return Err(Error::Inconsistent(format!(
            "class counts {raw:?} at p = {p} are not divisible by 4"
        )));
    }
    let counts = raw.map(|c| c / 4);
    Ok(GraphCountRecord {
        p,
        counts,
        prime_counts: prime_counts_from_counts(&counts),
    })
}

/// `n'_p` by testing every subset containing 0 against every class; `O(p^3)`.
pub fn prime_counts_direct(table: &ResidueTable) -> Result<[u64; CLASS_COUNT]> {
    require_symmetric(table)?;
    let p = table.modulus();
    let perms = permutations();
    let mut raw = [0u64; CLASS_COUNT];
    for a in 1..p {
        for b in a + 1..p {
            for c in b + 1..p {
                let g = classify_tuple(table, [0, a, b, c])?;
                let mask = g.canonical_mask();
                for (h, slot) in raw.iter_mut().enumerate() {
                    let hm = tables().canonical[h];
                    if perms.iter().any(|pm| hm & !relabel(mask, pm) == 0) {
                        *slot += 1;
                    }
                }
            }
        }
    }
    Ok(raw.map(|c| c / 4))
}

/// `k = (p-1)/4`, the Jacobsthal sum `J` and `d(k) = (J^2 - 4)/32`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GoncharovaInputs {
    pub p: PrimeModulus,
    pub k: u64,
    pub j: i64,
    pub d: u64,
}

impl GoncharovaInputs {
    pub fn new(table: &ResidueTable) -> Result<Self> {
        require_symmetric(table)?;
        let p = table.p();
        let j = jacobsthal(table)?.j;
        let num = j * j - 4;
        if num < 0 || num % 32 != 0 {
            return Err(Error::IdentityViolation {
                identity: "d(k) = (J^2 - 4)/32 is a non-negative integer",
                p: p.get(),
                detail: format!("J = {j}"),
            });
        }
        Ok(GoncharovaInputs {
            p,
            k: (p.get() - 1) / 4,
            j,
            d: (num / 32) as u64,
        })
    }

    /// `k(k-1)(k-4) + 2k d`; `negate_trace_term` flips the sign of `2k d`.
    pub fn numerator(&self, negate_trace_term: bool) -> i128 {
        let k = self.k as i128;
        let d = self.d as i128;
        let trace_term = 2 * k * d;
        k * (k - 1) * (k - 4)
            + if negate_trace_term {
                -trace_term
            } else {
                trace_term
            }
    }
}

/// `n_p(K_4) = (k(k-1)(k-4) + 2k d(k)) / 24`.
pub fn goncharova_k4(table: &ResidueTable) -> Result<u64> {
    goncharova_k4_from(&GoncharovaInputs::new(table)?, false)
}

pub fn goncharova_k4_from(inputs: &GoncharovaInputs, negate_trace_term: bool) -> Result<u64> {
    let num = inputs.numerator(negate_trace_term);
    if num < 0 || num % 24 != 0 {
        return Err(Error::IdentityViolation {
            identity: "n_p(K4) formula is a non-negative integer",
            p: inputs.p.get(),
            detail: format!("numerator {num} over 24"),
        });
    }
    Ok((num / 24) as u64)
}

/// Neighbourhoods of the Paley graph as bitsets.
struct PaleyBits {
    words: usize,
    /// Neighbours `w > v` of each `v`.
    above: Vec<Vec<u64>>,
    all: Vec<Vec<u64>>,
}

impl PaleyBits {
    fn new(table: &ResidueTable) -> Self {
        let p = table.modulus() as usize;
        let words = p.div_ceil(64);
        let mut all = vec![vec![0u64; words]; p];
        let mut above = vec![vec![0u64; words]; p];
        for v in 0..p {
            for w in 0..p {
                if w != v && table.chi(((w + p - v) % p) as u64) == 1 {
                    all[v][w / 64] |= 1 << (w % 64);
                    if w > v {
                        above[v][w / 64] |= 1 << (w % 64);
                    }
                }
            }
        }
        PaleyBits { words, above, all }
    }
}

fn and_into(out: &mut [u64], a: &[u64], b: &[u64]) {
    for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
        *o = x & y;
    }
}

fn popcount_and(a: &[u64], b: &[u64]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x & y).count_ones() as u64)
        .sum()
}

fn set_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(i * 64 + b)
        })
    })
}

/// Number of 4-cliques of the Paley graph on `F_p`.
pub fn clique4_paley(table: &ResidueTable) -> Result<u64> {
    require_symmetric(table)?;
    let g = PaleyBits::new(table);
    let mut w_set = vec![0u64; g.words];
    let mut total = 0u64;
    for u in 0..g.above.len() {
        for v in set_bits(&g.above[u]).collect::<Vec<_>>() {
            and_into(&mut w_set, &g.above[u], &g.above[v]);
            for w in set_bits(&w_set) {
                total += popcount_and(&w_set, &g.above[w]);
            }
        }
    }
    Ok(total)
}

/// `|Y_0(F_p)|` against `2^d l! p n_p(K_l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Y0Check {
    pub l: usize,
    pub p: PrimeModulus,
    pub y0: u128,
    pub n_kl: u64,
}

impl Y0Check {
    pub fn rhs(&self) -> u128 {
        let d = self.l * (self.l - 1) / 2;
        let fact: u128 = (1..=self.l as u128).product();
        (1u128 << d) * fact * self.p.get() as u128 * self.n_kl as u128
    }

    pub fn holds(&self) -> bool {
        self.y0 == self.rhs()
    }
}

/// `n_p(K_3)` from triples `{0, a, b}`; each translation class has three such members.
fn n_k3(table: &ResidueTable) -> u64 {
    let p = table.modulus();
    let mut raw = 0u64;
    for a in 1..p {
        if table.chi(a) != 1 {
            continue;
        }
        for b in a + 1..p {
            if table.chi(b) == 1 && table.chi(b - a) == 1 {
                raw += 1;
            }
        }
    }
    raw / 3
}

/// Ordered tuples of distinct residues weighted by `prod (1 + chi(r_i - r_j))`, pruned at zero factors.
fn y0_count(table: &ResidueTable, l: usize) -> u128 {
    let g = PaleyBits::new(table);
    let p = g.all.len();
    let d = l * (l - 1) / 2;
    let mut common = vec![0u64; g.words];
    let mut ordered = 0u128;
    for r1 in 0..p {
        for r2 in set_bits(&g.all[r1]) {
            and_into(&mut common, &g.all[r1], &g.all[r2]);
            ordered += match l {
                3 => common.iter().map(|w| w.count_ones() as u128).sum::<u128>(),
                _ => set_bits(&common)
                    .map(|r3| popcount_and(&common, &g.all[r3]) as u128)
                    .sum(),
            };
        }
    }
    (1u128 << d) * ordered
}

pub fn y0_relation_check(l: usize, table: &ResidueTable) -> Result<Y0Check> {
    require_symmetric(table)?;
    let n_kl = match l {
        3 => n_k3(table),
        4 => gamma_counts(table)?.count(FourGraph::complete()),
        _ => {
            return Err(Error::OutOfRange {
                what: "l",
                value: l as u64,
                constraint: "l in {3, 4}",
            })
        }
    };
    Ok(Y0Check {
        l,
        p: table.p(),
        y0: y0_count(table, l),
        n_kl,
    })
}

/// One prime's `(k, d)` and class counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaSample {
    pub p: PrimeModulus,
    pub k: u64,
    pub d: u64,
    pub counts: [u64; CLASS_COUNT],
}

pub fn gamma_sample(table: &ResidueTable) -> Result<GammaSample> {
    let inputs = GoncharovaInputs::new(table)?;
    Ok(GammaSample {
        p: table.p(),
        k: inputs.k,
        d: inputs.d,
        counts: gamma_counts(table)?.counts,
    })
}

/// Monomials `k^i d^j` with `3i + 2j <= 9` and `j <= 1`.
pub fn interpolation_basis() -> Vec<(u32, u32)> {
    let mut basis = Vec::new();
    for j in 0..=1u32 {
        for i in 0..=3u32 {
            if 3 * i + 2 * j <= 9 {
                basis.push((i, j));
            }
        }
    }
    basis
}

/// `24 n_p(Γ) = sum c_{ij} k^i d^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaPolynomial {
    pub class_id: usize,
    pub terms: Vec<((u32, u32), BigRational)>,
}

impl GammaPolynomial {
    pub fn eval(&self, k: u64, d: u64) -> BigRational {
        self.terms
            .iter()
            .map(|&((i, j), ref c)| c * monomial(k, d, i, j))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn coefficient(&self, i: u32, j: u32) -> BigRational {
        self.terms
            .iter()
            .find(|(m, _)| *m == (i, j))
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }
}

fn monomial(k: u64, d: u64, i: u32, j: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(k).pow(i) * BigInt::from(d).pow(j))
}

fn bigint_number<S: Serializer>(
    st: &mut S::SerializeStruct,
    key: &'static str,
    v: &BigInt,
) -> std::result::Result<(), S::Error> {
    match v.to_i64() {
        Some(n) => st.serialize_field(key, &n),
        None => st.serialize_field(key, &v.to_string()),
    }
}

struct Term<'a>((u32, u32), &'a BigRational);

impl Serialize for Term<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Term", 4)?;
        st.serialize_field("k_exp", &self.0 .0)?;
        st.serialize_field("d_exp", &self.0 .1)?;
        bigint_number::<S>(&mut st, "num", self.1.numer())?;
        bigint_number::<S>(&mut st, "den", self.1.denom())?;
        st.end()
    }
}

/// Coefficients of `24 n_p(Γ)`, each as `{num, den}`.
impl Serialize for GammaPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<Term> = self.terms.iter().map(|(m, c)| Term(*m, c)).collect();
        let mut st = serializer.serialize_struct("GammaPolynomial", 4)?;
        st.serialize_field("class_id", &self.class_id)?;
        st.serialize_field("class", &CLASS_NAMES[self.class_id])?;
        st.serialize_field("scale", &24)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(m: &mut [Vec<BigRational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(piv) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, piv);
        let inv = BigRational::one() / m[row][col].clone();
        for c in 0..m[row].len() {
            m[row][c] = &m[row][c] * &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..m[r].len() {
                    let delta = &f * &m[row][c];
                    m[r][c] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

/// Exact least-structure fit of `24 n_p(Γ)` on the capped basis, validated on held-out primes.
pub fn interpolate_gamma_polynomial(
    class: FourGraph,
    training: &[GammaSample],
    held_out: &[GammaSample],
) -> Result<GammaPolynomial> {
    let basis = interpolation_basis();
    let needed = basis.len();
    if training.len() < 12 {
        return Err(Error::BasisDeficient {
            rank: training.len().min(needed),
            needed,
        });
    }
    let target =
        |s: &GammaSample| BigRational::from_integer(BigInt::from(24 * s.counts[class.class_id()]));
    let mut system: Vec<Vec<BigRational>> = training
        .iter()
        .map(|s| {
            basis
                .iter()
                .map(|&(i, j)| monomial(s.k, s.d, i, j))
                .chain(std::iter::once(target(s)))
                .collect()
        })
        .collect();
    let pivots = rref(&mut system, needed + 1);
    if pivots.contains(&needed) {
        // a pivot in the right-hand column: the training rows are inconsistent
        let p = training[0].p.get();
        return Err(Error::NonPolynomial {
            class_id: class.class_id(),
            p,
        });
    }
    if pivots.len() < needed {
        return Err(Error::BasisDeficient {
            rank: pivots.len(),
            needed,
        });
    }
    let terms = basis
        .iter()
        .enumerate()
        .map(|(col, &m)| (m, system[col][needed].clone()))
        .collect();
    let poly = GammaPolynomial {
        class_id: class.class_id(),
        terms,
    };
    for s in training.iter().chain(held_out) {
        if poly.eval(s.k, s.d) != target(s) {
            return Err(Error::NonPolynomial {
                class_id: class.class_id(),
                p: s.p.get(),
            });
        }
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::sieve_primes;

    fn table(p: u64) -> ResidueTable {
        ResidueTable::new(PrimeModulus::new(p).unwrap())
    }

    fn one_mod_four(limit: u64) -> impl Iterator<Item = PrimeModulus> {
        sieve_primes(limit)
            .unwrap()
            .into_iter()
            .filter(|p| p.is_one_mod_four())
    }

    #[test]
    fn eleven_classes() {
        let masks: Vec<u8> = FourGraph::all().map(|g| g.canonical_mask()).collect();
        assert_eq!(masks, vec![0, 1, 3, 7, 11, 12, 13, 15, 30, 31, 63]);
        assert_eq!(FourGraph::complete().class_id(), 10);
        assert_eq!(FourGraph::empty().class_id(), 0);
        assert_eq!(FourGraph::from_mask(0b100000).class_id(), 1);
        assert!(FourGraph::from_class_id(11).is_err());
    }

    #[test]
    fn complements_pair_up() {
        let names: Vec<_> = FourGraph::all()
            .map(|g| (g.name(), g.complement().name()))
            .collect();
        assert!(names.contains(&("claw", "K3+K1")));
        assert!(names.contains(&("2K2", "C4")));
        assert!(names.contains(&("P4", "P4")));
        for g in FourGraph::all() {
            assert_eq!(g.complement().complement(), g);
            assert_eq!(g.edge_count() + g.complement().edge_count(), 6);
        }
    }

    #[test]
    fn classify_examples() {
        let t13 = table(13);
        // differences 1, 3, 9 are residues; 2, 6, 8 are not
        let g = classify_tuple(&t13, [0, 1, 3, 9]).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.name(), "claw");
        // edges for the differences 1, 1, 1, 3
        let g = classify_tuple(&t13, [0, 1, 2, 3]).unwrap();
        assert_eq!(g.name(), "C4");
        assert_eq!(classify_tuple(&t13, [0, 1, 1, 3]), Err(Error::InvalidTuple));
        assert_eq!(
            classify_tuple(&t13, [0, 1, 14, 3]),
            Err(Error::InvalidTuple)
        );
        assert_eq!(
            classify_tuple(&table(7), [0, 1, 2, 3]),
            Err(Error::OrientedCaseUnsupported(7))
        );
    }

    #[test]
    fn classification_is_permutation_invariant() {
        let t = table(29);
        let perms = permutations();
        for r in [[0u64, 1, 4, 9], [2, 3, 5, 7], [0, 5, 6, 13]] {
            let g = classify_tuple(&t, r).unwrap();
            for perm in &perms {
                let s = [r[perm[0]], r[perm[1]], r[perm[2]], r[perm[3]]];
                assert_eq!(classify_tuple(&t, s).unwrap(), g);
                let shifted = s.map(|x| (x + 11) % 29);
                assert_eq!(classify_tuple(&t, shifted).unwrap(), g);
            }
        }
    }

    #[test]
    fn gamma_count_examples() {
        let c13 = gamma_counts(&table(13)).unwrap();
        assert_eq!(c13.counts, [0, 3, 12, 2, 2, 3, 15, 12, 3, 3, 0]);
        assert_eq!(
            gamma_counts(&table(17))
                .unwrap()
                .count(FourGraph::complete()),
            0
        );
        let c29 = gamma_counts(&table(29)).unwrap();
        assert_eq!(c29.counts, [7, 63, 168, 42, 42, 42, 175, 168, 42, 63, 7]);
        assert!(gamma_counts(&table(11)).is_err());
    }

    #[test]
    fn gamma_counts_match_tuple_classification() {
        for p in [13u64, 17, 29, 37] {
            let t = table(p);
            let mut raw = [0u64; CLASS_COUNT];
            for a in 1..p {
                for b in a + 1..p {
                    for c in b + 1..p {
                        raw[classify_tuple(&t, [0, a, b, c]).unwrap().class_id()] += 1;
                    }
                }
            }
            assert_eq!(gamma_counts(&t).unwrap().counts, raw.map(|c| c / 4));
        }
    }

    #[test]
    fn conservation_and_self_complementarity() {
        for p in one_mod_four(500) {
            let r = gamma_counts(&ResidueTable::new(p)).unwrap();
            assert_eq!(r.total(), GraphCountRecord::expected_total(p), "p={p}");
            for g in FourGraph::all() {
                assert_eq!(r.count(g), r.count(g.complement()), "p={p} {g}");
            }
        }
    }

    #[test]
    fn prime_counts_round_trip_and_match_direct() {
        for p in one_mod_four(100) {
            let t = ResidueTable::new(p);
            let r = gamma_counts(&t).unwrap();
            assert_eq!(counts_from_prime_counts(&r.prime_counts), r.counts);
            assert_eq!(prime_counts_direct(&t).unwrap(), r.prime_counts, "p={p}");
            assert_eq!(r.prime_counts[10], r.counts[10]);
            assert_eq!(r.prime_counts[0], r.total());
        }
    }

    #[test]
    fn goncharova_examples() {
        let i13 = GoncharovaInputs::new(&table(13)).unwrap();
        assert_eq!((i13.k, i13.d), (3, 1));
        assert_eq!(goncharova_k4(&table(13)).unwrap(), 0);
        assert_eq!(goncharova_k4(&table(17)).unwrap(), 0);
        let i29 = GoncharovaInputs::new(&table(29)).unwrap();
        assert_eq!((i29.k, i29.d), (7, 3));
        assert_eq!(goncharova_k4(&table(29)).unwrap(), 7);
    }

    #[test]
    fn clique_examples() {
        assert_eq!(clique4_paley(&table(13)).unwrap(), 0);
        assert_eq!(clique4_paley(&table(17)).unwrap(), 0);
        assert_eq!(clique4_paley(&table(29)).unwrap(), 203);
    }

    #[test]
    fn goncharova_matches_cliques_and_classes() {
        for p in one_mod_four(400).filter(|p| p.get() >= 13) {
            let t = ResidueTable::new(p);
            let n = goncharova_k4(&t).unwrap();
            assert_eq!(clique4_paley(&t).unwrap(), p.get() * n, "p={p}");
            assert_eq!(gamma_counts(&t).unwrap().count(FourGraph::complete()), n);
        }
    }

    #[test]
    fn d_is_a_non_negative_integer() {
        for p in one_mod_four(10_000) {
            assert!(
                GoncharovaInputs::new(&ResidueTable::new(p)).is_ok(),
                "p={p}"
            );
        }
    }

    #[test]
    fn y0_examples() {
        let c = y0_relation_check(3, &table(13)).unwrap();
        assert_eq!(c.n_kl, 2);
        assert!(c.holds());
        let c = y0_relation_check(4, &table(13)).unwrap();
        assert_eq!(c.y0, 0);
        let c = y0_relation_check(4, &table(29)).unwrap();
        assert_eq!(c.y0, 64 * 24 * 29 * 7);
        assert!(c.holds());
        assert!(y0_relation_check(5, &table(13)).is_err());
    }

    #[test]
    fn basis_shape() {
        assert_eq!(
            interpolation_basis(),
            vec![(0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (1, 1), (2, 1)]
        );
    }

    fn samples(lo: u64, hi: u64) -> Vec<GammaSample> {
        one_mod_four(hi)
            .filter(|p| p.get() >= lo)
            .map(|p| gamma_sample(&ResidueTable::new(p)).unwrap())
            .collect()
    }

    #[test]
    fn interpolation_recovers_k4() {
        let train = samples(13, 109);
        let held = samples(113, 257);
        assert_eq!((train.len(), held.len()), (12, 12));
        let poly = interpolate_gamma_polynomial(FourGraph::complete(), &train, &held).unwrap();
        let expect = [0i64, 4, -5, 1, 0, 2, 0];
        for (((i, j), c), e) in poly.terms.iter().zip(expect) {
            assert_eq!(
                c,
                &BigRational::from_integer(BigInt::from(e)),
                "k^{i} d^{j}"
            );
        }
        let empty = interpolate_gamma_polynomial(FourGraph::empty(), &train, &held).unwrap();
        assert_eq!(empty.coefficient(3, 0), poly.coefficient(3, 0));
        let all: Vec<_> = FourGraph::all()
            .map(|g| interpolate_gamma_polynomial(g, &train, &held).unwrap())
            .collect();
        for s in &held {
            let total: BigRational = all
                .iter()
                .map(|q| q.eval(s.k, s.d))
                .fold(BigRational::zero(), |a, b| a + b);
            let expected = 24 * GraphCountRecord::expected_total(s.p);
            assert_eq!(total, BigRational::from_integer(BigInt::from(expected)));
        }
    }

    #[test]
    fn interpolation_rejects_short_training_sets() {
        let train = samples(13, 60);
        assert!(matches!(
            interpolate_gamma_polynomial(FourGraph::complete(), &train, &[]),
            Err(Error::BasisDeficient { .. })
        ));
    }

    #[test]
    fn interpolation_reports_non_polynomial_data() {
        let mut train = samples(13, 109);
        let held = samples(113, 137);
        train[3].counts[10] += 1;
        assert!(matches!(
            interpolate_gamma_polynomial(FourGraph::complete(), &train, &held),
            Err(Error::NonPolynomial { class_id: 10, .. })
        ));
        let train = samples(13, 109);
        let mut held = held;
        held[1].counts[10] += 1;
        assert_eq!(
            interpolate_gamma_polynomial(FourGraph::complete(), &train, &held),
            Err(Error::NonPolynomial {
                class_id: 10,
                p: held[1].p.get()
            })
        );
    }
}
