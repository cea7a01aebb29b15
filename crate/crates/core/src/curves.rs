//! Point counts and Frobenius traces of hyperelliptic curves `y^2 = f(x)`,
//! the quadric intersections `C_l`, and the character sums attached to them.

use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::ffield::{find_nonresidue, mul_mod, pow_mod, PrimeModulus, QuadExt, ResidueTable};
use crate::patterns::{count_pattern_scan, PatternWord};

/// `F_p` or `F_{p^2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FieldDegree {
    Base,
    Quadratic,
}

impl FieldDegree {
    pub fn from_degree(d: u32) -> Result<Self> {
        match d {
            1 => Ok(FieldDegree::Base),
            2 => Ok(FieldDegree::Quadratic),
            _ => Err(Error::OutOfRange {
                what: "extension degree",
                value: d as u64,
                constraint: "1 or 2",
            }),
        }
    }

    pub fn degree(self) -> u32 {
        match self {
            FieldDegree::Base => 1,
            FieldDegree::Quadratic => 2,
        }
    }

    pub fn order(self, p: PrimeModulus) -> u64 {
        p.get().pow(self.degree())
    }
}

/// `y^2 = f(x)` with integer coefficients, lowest degree first.
///
/// Curves built from a list of shifts `f = prod (x + c)` keep the shifts so
/// that counting can multiply characters instead of evaluating `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveSpec {
    label: String,
    coeffs: Vec<i64>,
    #[serde(skip)]
    shifts: Option<Vec<i64>>,
}

impl CurveSpec {
    pub fn new(label: impl Into<String>, coeffs: Vec<i64>) -> Result<Self> {
        let label = label.into();
        let mut coeffs = coeffs;
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::DegenerateCurve(label));
        }
        if coeffs.len() > 9 {
            return Err(Error::OutOfRange {
                what: "degree",
                value: coeffs.len() as u64 - 1,
                constraint: "degree <= 8",
            });
        }
        Ok(CurveSpec {
            label,
            coeffs,
            shifts: None,
        })
    }

    /// `f(x) = prod_k (x + shifts[k])`.
    pub fn from_shifts(label: impl Into<String>, shifts: &[i64]) -> Result<Self> {
        let mut coeffs = vec![1i64];
        for &c in shifts {
            let mut next = vec![0i64; coeffs.len() + 1];
            for (i, &a) in coeffs.iter().enumerate() {
                next[i] += a * c;
                next[i + 1] += a;
            }
            coeffs = next;
        }
        let mut spec = CurveSpec::new(label, coeffs)?;
        spec.shifts = Some(shifts.to_vec());
        Ok(spec)
    }

    /// `f_T(x) = prod_{i in T} (x + i - 1)`, labelled by the digits of `T`.
    pub fn f_t(subset: &[usize]) -> Self {
        let label: String = std::iter::once('T')
            .chain(
                subset
                    .iter()
                    .map(|&i| char::from_digit(i as u32, 36).unwrap_or('?')),
            )
            .collect();
        let shifts: Vec<i64> = subset.iter().map(|&i| i as i64 - 1).collect();
        Self::from_shifts(label, &shifts).expect("non-empty subset")
    }

    pub fn e0() -> Self {
        Self::named("E0", &[0, 1, 2])
    }

    pub fn e1() -> Self {
        Self::named("E1", &[0, 1, 3])
    }

    pub fn e2() -> Self {
        Self::named("E2", &[0, 2, 3])
    }

    pub fn e3() -> Self {
        Self::named("E3", &[1, 2, 3])
    }

    pub fn e4() -> Self {
        Self::named("E4", &[0, 1, 2, 3])
    }

    /// `y^2 = x^3 - x`.
    pub fn x3_minus_x() -> Self {
        Self::named("x3-x", &[0, 1, -1])
    }

    fn named(label: &str, shifts: &[i64]) -> Self {
        Self::from_shifts(label, shifts).expect("fixed curve")
    }

    /// Resolves `E0`..`E4`, `x3-x`, or `T` followed by subset digits such as `T124`.
    pub fn from_label(label: &str) -> Result<Self> {
        match label {
            "E0" => Ok(Self::e0()),
            "E1" => Ok(Self::e1()),
            "E2" => Ok(Self::e2()),
            "E3" => Ok(Self::e3()),
            "E4" => Ok(Self::e4()),
            "x3-x" => Ok(Self::x3_minus_x()),
            t if t.starts_with('T') && t.len() > 1 => {
                let subset = t[1..]
                    .chars()
                    .map(|c| {
                        c.to_digit(10)
                            .filter(|&d| d >= 1)
                            .map(|d| d as usize)
                            .ok_or_else(|| Error::Parse(format!("bad subset label {t:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mut sorted = subset.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted != subset {
                    return Err(Error::Parse(format!(
                        "subset label {t:?} must be strictly increasing"
                    )));
                }
                Ok(Self::f_t(&subset))
            }
            other => Err(Error::Parse(format!("unknown curve label {other:?}"))),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn shifts(&self) -> Option<&[i64]> {
        self.shifts.as_deref()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> i64 {
        *self.coeffs.last().expect("degree >= 1")
    }

    pub fn genus(&self) -> u32 {
        (self.degree() as u32 - 1) / 2
    }

    /// Coefficients reduced mod `p`, trailing zeros removed.
    pub fn reduced(&self, p: PrimeModulus) -> Vec<u64> {
        let mut r: Vec<u64> = self.coeffs.iter().map(|&c| p.reduce(c)).collect();
        trim(&mut r);
        r
    }

    pub fn eval(&self, x: u64, p: PrimeModulus) -> u64 {
        let m = p.get();
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| (mul_mod(acc, x, m) + p.reduce(c)) % m)
    }

    /// Degree is preserved mod `p` and `gcd(f, f') = 1` over `F_p`.
    pub fn has_good_reduction(&self, p: PrimeModulus) -> bool {
        let f = self.reduced(p);
        if f.len() != self.coeffs.len() {
            return false;
        }
        let m = p.get();
        let mut df: Vec<u64> = f
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod(c, i as u64 % m, m))
            .collect();
        trim(&mut df);
        if df.is_empty() {
            return false;
        }
        poly_gcd(f, df, m).len() == 1
    }
}

fn trim(f: &mut Vec<u64>) {
    while f.last() == Some(&0) {
        f.pop();
    }
}

/// Monic-free remainder `a mod b` over `F_m`; `b` non-empty.
fn poly_rem(mut a: Vec<u64>, b: &[u64], m: u64) -> Vec<u64> {
    let lead_inv = pow_mod(*b.last().unwrap(), m - 2, m);
    while a.len() >= b.len() {
        let coef = mul_mod(*a.last().unwrap(), lead_inv, m);
        let off = a.len() - b.len();
        for (i, &bc) in b.iter().enumerate() {
            a[off + i] = (a[off + i] + m - mul_mod(coef, bc, m)) % m;
        }
        trim(&mut a);
        if a.is_empty() {
            break;
        }
    }
    a
}

fn poly_gcd(mut a: Vec<u64>, mut b: Vec<u64>, m: u64) -> Vec<u64> {
    while !b.is_empty() {
        let r = poly_rem(a, &b, m);
        a = b;
        b = r;
    }
    a
}

/// `prod_k chi(x + r_k)` for every `x` in `0..p`, where `row` holds `chi` of each residue.
fn shifted_product(row: &[i8], shifts: &[u64]) -> Vec<i8> {
    let p = row.len();
    let mut acc = vec![1i8; p];
    for &r in shifts {
        let r = r as usize;
        let (head, tail) = acc.split_at_mut(p - r);
        for (a, &c) in head.iter_mut().zip(&row[r..]) {
            *a = a.wrapping_mul(c);
        }
        for (a, &c) in tail.iter_mut().zip(&row[..r]) {
            *a = a.wrapping_mul(c);
        }
    }
    acc
}

fn character_total(values: &[i8]) -> i64 {
    // wrapping keeps the loop vectorizable under overflow checks; |sum| <= len
    values
        .iter()
        .fold(0i64, |acc, &v| acc.wrapping_add(v as i64))
}

/// `sum_{x in F_q} (1 + chi_q(f(x)))`.
pub fn affine_count(f: &CurveSpec, table: &ResidueTable, ext: FieldDegree) -> Result<u64> {
    let p = table.p();
    let m = p.get();
    if f.reduced(p).is_empty() {
        return Err(Error::DegenerateCurve(f.label.clone()));
    }
    let q = ext.order(p) as i64;
    let sum: i64 = match (ext, f.shifts()) {
        (FieldDegree::Base, Some(shifts)) => {
            let rs: Vec<u64> = shifts.iter().map(|&c| p.reduce(c)).collect();
            character_total(&shifted_product(table.as_slice(), &rs))
        }
        (FieldDegree::Base, None) => (0..m).map(|x| table.chi(f.eval(x, p)) as i64).sum(),
        (FieldDegree::Quadratic, Some(shifts)) => {
            // chi_q(a + c + b sqrt(d)) = chi((a + c)^2 - d b^2)
            let k = QuadExt::new(p);
            let rs: Vec<u64> = shifts.iter().map(|&c| p.reduce(c)).collect();
            let mut row = vec![0i8; m as usize];
            let mut total = 0i64;
            for b in 0..m {
                let db2 = mul_mod(k.delta(), mul_mod(b, b, m), m);
                for (t, slot) in row.iter_mut().enumerate() {
                    let t = t as u64;
                    *slot = table.chi((mul_mod(t, t, m) + m - db2) % m);
                }
                total += character_total(&shifted_product(&row, &rs));
            }
            total
        }
        (FieldDegree::Quadratic, None) => {
            let k = QuadExt::new(p);
            let coeffs: Vec<_> = f.reduced(p).into_iter().map(|c| k.elem(c, 0)).collect();
            let mut total = 0i64;
            for a in 0..m {
                for b in 0..m {
                    let x = k.elem(a, b);
                    let y = coeffs
                        .iter()
                        .rev()
                        .fold(k.zero(), |acc, &c| k.add(k.mul(acc, x), c));
                    total += k.chi(table, y) as i64;
                }
            }
            total
        }
    };
    Ok((q + sum) as u64)
}

/// 1 for odd degree; for even degree 2 or 0 by squareness of the leading coefficient.
pub fn points_at_infinity(f: &CurveSpec, table: &ResidueTable, ext: FieldDegree) -> u64 {
    if f.degree() % 2 == 1 {
        return 1;
    }
    // every element of F_p is a square in F_{p^2}
    if ext == FieldDegree::Quadratic || table.chi_signed(f.leading()) == 1 {
        2
    } else {
        0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub p: PrimeModulus,
    pub label: String,
    pub field_degree: u32,
    pub affine_count: u64,
    pub points_at_infinity: u64,
    pub trace: i64,
    pub genus: u32,
}

impl TraceRecord {
    pub fn projective_count(&self) -> u64 {
        self.affine_count + self.points_at_infinity
    }

    /// `a^2 <= 4 g^2 q`, exactly.
    pub fn satisfies_weil_bound(&self) -> bool {
        let q = (self.p.get() as i128).pow(self.field_degree);
        let g = self.genus as i128;
        (self.trace as i128).pow(2) <= 4 * g * g * q
    }
}

pub fn frobenius_trace(f: &CurveSpec, table: &ResidueTable) -> Result<TraceRecord> {
    frobenius_trace_over(f, table, FieldDegree::Base)
}

/// Trace of Frobenius of `y^2 = f(x)` over `F_p` or `F_{p^2}` by direct counting.
pub fn frobenius_trace_over(
    f: &CurveSpec,
    table: &ResidueTable,
    ext: FieldDegree,
) -> Result<TraceRecord> {
    let p = table.p();
    if !f.has_good_reduction(p) {
        return Err(Error::BadReduction {
            label: f.label.clone(),
            p: p.get(),
        });
    }
    let affine = affine_count(f, table, ext)?;
    let inf = points_at_infinity(f, table, ext);
    let q = ext.order(p) as i64;
    Ok(TraceRecord {
        p,
        label: f.label.clone(),
        field_degree: ext.degree(),
        affine_count: affine,
        points_at_infinity: inf,
        trace: q + 1 - (affine + inf) as i64,
        genus: f.genus(),
    })
}

/// `a(p^2) = a(p)^2 - 2p` for an elliptic curve.
pub fn elliptic_trace_squared_field(a: i64, p: PrimeModulus) -> i64 {
    a * a - 2 * p.get() as i64
}

fn require_one_mod_four(p: PrimeModulus) -> Result<()> {
    if !p.is_one_mod_four() {
        return Err(Error::WrongClass {
            p: p.get(),
            expected: 1,
        });
    }
    Ok(())
}

/// `J = sum_{i=1}^{p-3} chi(i(i+1)(i+2))` and `b = sum_{i=1}^{p} chi(i(i^2+s))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct JacobsthalPair {
    pub p: PrimeModulus,
    pub j: i64,
    pub b: i64,
    /// The non-residue used for `b`.
    pub s: u64,
}

impl JacobsthalPair {
    pub fn identity_holds(&self) -> bool {
        self.j * self.j + self.b * self.b == 4 * self.p.get() as i64
    }
}

pub fn jacobsthal(table: &ResidueTable) -> Result<JacobsthalPair> {
    let p = table.p();
    require_one_mod_four(p)?;
    let m = p.get();
    let j: i64 = (1..=m - 3)
        .map(|i| table.chi(mul_mod(mul_mod(i, i + 1, m), i + 2, m)) as i64)
        .sum();
    let s = find_nonresidue(p);
    let b: i64 = (1..=m)
        .map(|i| {
            let i = i % m;
            table.chi(mul_mod(i, (mul_mod(i, i, m) + s) % m, m)) as i64
        })
        .sum();
    Ok(JacobsthalPair { p, j, b, s })
}

/// `p = a^2 + b^2` with `a` odd and both positive.
pub fn sum_of_two_squares(p: PrimeModulus) -> Option<(u64, u64)> {
    let m = p.get();
    let mut a = 1u64;
    while a * a < m {
        let rest = m - a * a;
        let b = (rest as f64).sqrt().round() as u64;
        for c in b.saturating_sub(1)..=b + 1 {
            if c * c == rest && c % 2 == 0 {
                return Some((a, c));
            }
        }
        a += 2;
    }
    None
}

/// Points of `x^2 + y^2 + x^2 y^2 = 1` over `F_p`, plus the four at infinity.
pub fn gauss_last_entry_count(table: &ResidueTable) -> Result<u64> {
    let p = table.p();
    require_one_mod_four(p)?;
    let m = p.get();
    // y^2 (1 + x^2) = 1 - x^2; when 1 + x^2 = 0 there is no solution since p != 2
    let mut affine = 0u64;
    for x in 0..m {
        let x2 = mul_mod(x, x, m);
        let den = (1 + x2) % m;
        if den == 0 {
            continue;
        }
        let num = (1 + m - x2) % m;
        affine += (1 + table.chi(mul_mod(num, den, m)) as i64) as u64;
    }
    Ok(affine + 4)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClCurveCount {
    pub l: usize,
    pub p: PrimeModulus,
    pub field_degree: u32,
    pub projective_count: u64,
    /// Only computed over `F_p`.
    pub torus_count: Option<u64>,
    pub genus: u64,
}

/// `g_l = 2^{l-2}(l-3) + 1`.
pub fn cl_genus(l: usize) -> u64 {
    assert!(l >= 3);
    (1u64 << (l - 2)) * (l as u64 - 3) + 1
}

fn check_cl_range(l: usize, p: PrimeModulus) -> Result<()> {
    if l < 3 {
        return Err(Error::OutOfRange {
            what: "l",
            value: l as u64,
            constraint: "l >= 3",
        });
    }
    if p.get() <= 2 * l as u64 {
        return Err(Error::OutOfRange {
            what: "p",
            value: p.get(),
            constraint: "p > 2l",
        });
    }
    Ok(())
}

/// Points of `x_i^2 - x_1^2 = (i-1) x_0^2`, `i = 2..l`, in `P^l`.
pub fn count_cl(l: usize, table: &ResidueTable, ext: FieldDegree) -> Result<ClCurveCount> {
    let p = table.p();
    check_cl_range(l, p)?;
    let m = p.get();
    // x_0 = 0 forces x_i = +-x_1
    let at_infinity = 1i64 << (l - 1);
    let (affine, torus) = match ext {
        FieldDegree::Base => {
            let mut affine = 0i64;
            let mut torus = 0u64;
            for x in 0..m {
                let x2 = mul_mod(x, x, m);
                let mut prod = 1i64;
                let mut all_squares = x != 0;
                for i in 1..l as u64 {
                    let c = table.chi((x2 + i) % m);
                    prod *= 1 + c as i64;
                    all_squares &= c == 1;
                }
                affine += prod;
                if all_squares {
                    torus += 1 << (l - 1);
                }
            }
            (affine, Some(torus))
        }
        FieldDegree::Quadratic => {
            let k = QuadExt::new(p);
            let mut affine = 0i64;
            for a in 0..m {
                for b in 0..m {
                    let x = k.elem(a, b);
                    let x2 = k.mul(x, x);
                    let mut prod = 1i64;
                    for i in 1..l as u64 {
                        prod *= 1 + k.chi(table, k.add(x2, k.elem(i, 0))) as i64;
                        if prod == 0 {
                            break;
                        }
                    }
                    affine += prod;
                }
            }
            (affine, None)
        }
    };
    Ok(ClCurveCount {
        l,
        p,
        field_degree: ext.degree(),
        projective_count: (at_infinity + affine) as u64,
        torus_count: torus,
        genus: cl_genus(l),
    })
}

/// Checks `2^{l-2}(l-3) + 1 = sum_T floor((|T|-1)/2)` over subsets of `[1, l]`.
pub fn genus_identity(l: usize) -> bool {
    assert!((3..=30).contains(&l));
    let sum: u64 = (0u64..1 << l)
        .map(|mask| {
            let size = mask.count_ones() as u64;
            if size >= 3 {
                (size - 1) / 2
            } else {
                0
            }
        })
        .sum();
    sum == cl_genus(l)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceDecomposition {
    pub l: usize,
    pub p: PrimeModulus,
    pub field_degree: u32,
    /// `q + 1 - |C_l(F_q)|`
    pub lhs: i64,
    pub terms: Vec<(String, i64)>,
}

impl TraceDecomposition {
    pub fn rhs(&self) -> i64 {
        self.terms.iter().map(|(_, a)| a).sum()
    }

    pub fn holds(&self) -> bool {
        self.lhs == self.rhs()
    }
}

/// Compares the trace of `C_l` with the sum of traces of `C_T`, `|T| >= 3`.
pub fn trace_decomposition_check(
    l: usize,
    table: &ResidueTable,
    ext: FieldDegree,
) -> Result<TraceDecomposition> {
    let p = table.p();
    if !(4..=5).contains(&l) {
        return Err(Error::OutOfRange {
            what: "l",
            value: l as u64,
            constraint: "l in {4, 5}",
        });
    }
    check_cl_range(l, p)?;
    let count = count_cl(l, table, ext)?;
    let q = ext.order(p) as i64;
    let mut terms = Vec::new();
    for mask in 1u32..(1 << l) {
        if mask.count_ones() < 3 {
            continue;
        }
        let subset: Vec<usize> = (1..=l).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        let curve = CurveSpec::f_t(&subset);
        let base = frobenius_trace(&curve, table)?;
        let a = match ext {
            FieldDegree::Base => base.trace,
            FieldDegree::Quadratic if curve.genus() == 1 => {
                elliptic_trace_squared_field(base.trace, p)
            }
            FieldDegree::Quadratic => frobenius_trace_over(&curve, table, ext)?.trace,
        };
        terms.push((curve.label().to_string(), a));
    }
    Ok(TraceDecomposition {
        l,
        p,
        field_degree: ext.degree(),
        lhs: q + 1 - count.projective_count as i64,
        terms,
    })
}

/// `n_p(R^4)` against the traces of `E_0..E_4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct L4TraceIdentity {
    pub p: PrimeModulus,
    pub n_r4: u64,
    pub traces: [i64; 5],
    /// `n_p(R^4)` minus the main and trace terms.
    pub correction: Dyadic,
}

impl L4TraceIdentity {
    pub fn correction_bounded(&self) -> bool {
        self.correction.abs() <= Dyadic::from(5)
    }

    /// For `p = 3 mod 4`: `a_0 = 0` and `a_1 + a_2 = 0`.
    pub fn supersingular_relations_hold(&self) -> bool {
        self.p.is_one_mod_four() || (self.traces[0] == 0 && self.traces[1] + self.traces[2] == 0)
    }

    pub fn holds(&self) -> bool {
        self.correction_bounded() && self.supersingular_relations_hold()
    }
}

pub fn l4_trace_identity(table: &ResidueTable) -> Result<L4TraceIdentity> {
    let p = table.p();
    if p.get() < 7 {
        return Err(Error::OutOfRange {
            what: "p",
            value: p.get(),
            constraint: "p >= 7",
        });
    }
    let mut traces = [0i64; 5];
    for (slot, curve) in traces.iter_mut().zip([
        CurveSpec::e0(),
        CurveSpec::e1(),
        CurveSpec::e2(),
        CurveSpec::e3(),
        CurveSpec::e4(),
    ]) {
        *slot = frobenius_trace(&curve, table)?.trace;
    }
    let n_r4 = count_pattern_scan(table, &PatternWord::residues(4))?;
    let pi = p.get() as i128;
    let [a0, a1, _, _, a4] = traces.map(|a| a as i128);
    let main = if p.is_one_mod_four() {
        Dyadic::new(pi - 2 * a0 - 2 * a1 - a4, 4)
    } else {
        Dyadic::new(pi - a4, 4)
    };
    Ok(L4TraceIdentity {
        p,
        n_r4,
        traces,
        correction: Dyadic::from(n_r4 as i64) - main,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::sieve_primes;

    fn table(p: u64) -> ResidueTable {
        ResidueTable::new(PrimeModulus::new(p).unwrap())
    }

    fn plain(spec: &CurveSpec) -> CurveSpec {
        CurveSpec::new(spec.label(), spec.coeffs().to_vec()).unwrap()
    }

    #[test]
    fn shift_constructor_expands() {
        assert_eq!(CurveSpec::e0().coeffs(), &[0, 2, 3, 1]);
        assert_eq!(CurveSpec::x3_minus_x().coeffs(), &[0, -1, 0, 1]);
        assert_eq!(
            CurveSpec::f_t(&[1, 2, 4]).coeffs(),
            CurveSpec::e1().coeffs()
        );
        assert_eq!(
            CurveSpec::from_label("T1234").unwrap().coeffs(),
            CurveSpec::e4().coeffs()
        );
        assert!(CurveSpec::from_label("T21").is_err());
        assert!(CurveSpec::new("c", vec![3, 0, 0]).is_err());
    }

    #[test]
    fn affine_count_examples() {
        let x3x = CurveSpec::x3_minus_x();
        assert_eq!(affine_count(&x3x, &table(5), FieldDegree::Base).unwrap(), 7);
        assert_eq!(affine_count(&x3x, &table(7), FieldDegree::Base).unwrap(), 7);
        assert_eq!(
            affine_count(&CurveSpec::e0(), &table(13), FieldDegree::Base).unwrap(),
            7
        );
        let zero_mod_5 = CurveSpec::new("5x", vec![0, 5]).unwrap();
        assert!(matches!(
            affine_count(&zero_mod_5, &table(5), FieldDegree::Base),
            Err(Error::DegenerateCurve(_))
        ));
    }

    #[test]
    fn trace_examples() {
        let x3x = CurveSpec::x3_minus_x();
        assert_eq!(frobenius_trace(&x3x, &table(7)).unwrap().trace, 0);
        assert_eq!(frobenius_trace(&x3x, &table(5)).unwrap().trace, -2);
        let r = frobenius_trace(&CurveSpec::e0(), &table(13)).unwrap();
        assert_eq!((r.trace, r.points_at_infinity, r.genus), (6, 1, 1));
        assert!(matches!(
            frobenius_trace(&CurveSpec::e4(), &table(3)),
            Err(Error::BadReduction { .. })
        ));
    }

    #[test]
    fn shift_kernel_matches_horner() {
        for p in [5u64, 7, 11, 13, 29, 101] {
            let t = table(p);
            for curve in [
                CurveSpec::e0(),
                CurveSpec::e1(),
                CurveSpec::e4(),
                CurveSpec::f_t(&[1, 2, 3, 4, 5]),
            ] {
                for ext in [FieldDegree::Base, FieldDegree::Quadratic] {
                    if ext == FieldDegree::Quadratic && p > 30 {
                        continue;
                    }
                    assert_eq!(
                        affine_count(&curve, &t, ext).unwrap(),
                        affine_count(&plain(&curve), &t, ext).unwrap(),
                        "p={p} {}",
                        curve.label()
                    );
                }
            }
        }
    }

    #[test]
    fn quadratic_extension_traces_follow_the_recursion() {
        for p in sieve_primes(60)
            .unwrap()
            .into_iter()
            .filter(|p| p.get() >= 5)
        {
            let t = ResidueTable::new(p);
            for curve in [CurveSpec::e0(), CurveSpec::e1(), CurveSpec::e4()] {
                let a = frobenius_trace(&curve, &t).unwrap().trace;
                let a2 = frobenius_trace_over(&curve, &t, FieldDegree::Quadratic)
                    .unwrap()
                    .trace;
                assert_eq!(a2, elliptic_trace_squared_field(a, p));
            }
        }
    }

    #[test]
    fn good_reduction_detection() {
        assert!(CurveSpec::e4().has_good_reduction(PrimeModulus::new(5).unwrap()));
        assert!(!CurveSpec::e4().has_good_reduction(PrimeModulus::new(3).unwrap()));
        let double_root = CurveSpec::from_shifts("d", &[0, 7]).unwrap();
        assert!(!double_root.has_good_reduction(PrimeModulus::new(7).unwrap()));
        assert!(double_root.has_good_reduction(PrimeModulus::new(5).unwrap()));
    }

    #[test]
    fn weil_bound_and_symmetries() {
        for p in sieve_primes(10_000)
            .unwrap()
            .into_iter()
            .filter(|p| p.get() >= 7)
        {
            let t = ResidueTable::new(p);
            let a: Vec<_> = [
                CurveSpec::e0(),
                CurveSpec::e1(),
                CurveSpec::e2(),
                CurveSpec::e3(),
                CurveSpec::e4(),
            ]
            .iter()
            .map(|c| frobenius_trace(c, &t).unwrap())
            .collect();
            assert!(a.iter().all(|r| r.satisfies_weil_bound()), "p={p}");
            assert_eq!(a[0].trace, a[3].trace);
            if p.mod4() == 3 {
                assert_eq!(a[0].trace, 0);
                assert_eq!(a[1].trace + a[2].trace, 0);
            } else {
                assert_eq!(a[1].trace, a[2].trace);
            }
        }
    }

    #[test]
    fn jacobsthal_examples() {
        let j5 = jacobsthal(&table(5)).unwrap();
        assert_eq!((j5.j, j5.b * j5.b), (2, 16));
        let j13 = jacobsthal(&table(13)).unwrap();
        assert_eq!((j13.j, j13.b * j13.b), (-6, 16));
        let j17 = jacobsthal(&table(17)).unwrap();
        assert_eq!((j17.j, j17.b * j17.b), (-2, 64));
        assert_eq!(jacobsthal(&table(29)).unwrap().j.pow(2), 100);
        assert_eq!(
            jacobsthal(&table(7)),
            Err(Error::WrongClass { p: 7, expected: 1 })
        );
    }

    #[test]
    fn jacobsthal_identity_and_trace_relation() {
        for p in sieve_primes(10_000)
            .unwrap()
            .into_iter()
            .filter(|p| p.is_one_mod_four())
        {
            let t = ResidueTable::new(p);
            let pair = jacobsthal(&t).unwrap();
            assert!(pair.identity_holds(), "p={p}");
            assert_eq!(pair.j.rem_euclid(4), 2);
            let a0 = frobenius_trace(&CurveSpec::e0(), &t).unwrap().trace;
            assert_eq!(a0 * a0, pair.j * pair.j);
        }
    }

    #[test]
    fn gauss_last_entry_examples() {
        assert_eq!(gauss_last_entry_count(&table(5)).unwrap(), 8);
        assert_eq!(gauss_last_entry_count(&table(13)).unwrap().abs_diff(14), 6);
        assert_eq!(gauss_last_entry_count(&table(17)).unwrap().abs_diff(18), 2);
        assert!(gauss_last_entry_count(&table(11)).is_err());
    }

    #[test]
    fn gauss_last_entry_matches_brute_force() {
        for p in sieve_primes(400)
            .unwrap()
            .into_iter()
            .filter(|p| p.is_one_mod_four())
        {
            let m = p.get();
            let mut brute = 0u64;
            for x in 0..m {
                for y in 0..m {
                    let x2 = x * x % m;
                    let y2 = y * y % m;
                    if (x2 + y2 + x2 * y2 % m) % m == 1 {
                        brute += 1;
                    }
                }
            }
            let t = ResidueTable::new(p);
            let total = gauss_last_entry_count(&t).unwrap();
            assert_eq!(total, brute + 4);
            let (a, _) = sum_of_two_squares(p).unwrap();
            assert_eq!(total.abs_diff(m + 1), 2 * a);
        }
    }

    #[test]
    fn cl_examples() {
        let c = count_cl(3, &table(13), FieldDegree::Base).unwrap();
        assert_eq!(c.torus_count, Some(0));
        assert_eq!(
            count_cl(3, &table(17), FieldDegree::Base)
                .unwrap()
                .torus_count,
            Some(0)
        );
        assert_eq!(
            count_cl(4, &table(13), FieldDegree::Base)
                .unwrap()
                .torus_count,
            Some(0)
        );
        assert!(count_cl(4, &table(7), FieldDegree::Base).is_err());
        assert!(count_cl(2, &table(13), FieldDegree::Base).is_err());
    }

    #[test]
    fn cl_torus_matches_pattern_count() {
        for p in sieve_primes(1000).unwrap() {
            let t = ResidueTable::new(p);
            for l in 3..=6usize {
                if p.get() <= 2 * l as u64 {
                    continue;
                }
                let c = count_cl(l, &t, FieldDegree::Base).unwrap();
                let torus = c.torus_count.unwrap();
                assert_eq!(torus % (1 << l), 0);
                let n = count_pattern_scan(&t, &PatternWord::residues(l)).unwrap();
                assert_eq!(torus >> l, n, "p={p} l={l}");
            }
        }
    }

    #[test]
    fn cl_projective_count_matches_cone_count() {
        // (cone - 1)/(q - 1) over the homogeneous system in (x_0, x_1)
        for p in [11u64, 13, 17, 19] {
            let t = table(p);
            for l in 3..=5usize {
                if p <= 2 * l as u64 {
                    continue;
                }
                let mut cone = 0i64;
                for x0 in 0..p {
                    for x1 in 0..p {
                        let mut prod = 1i64;
                        for i in 1..l as u64 {
                            prod *= 1 + t.chi((x1 * x1 + i * x0 * x0) % p) as i64;
                        }
                        cone += prod;
                    }
                }
                let proj = count_cl(l, &t, FieldDegree::Base).unwrap().projective_count as i64;
                assert_eq!((cone - 1) / (p as i64 - 1), proj);
                assert_eq!((cone - 1) % (p as i64 - 1), 0);
            }
        }
    }

    #[test]
    fn genus_identity_examples() {
        assert_eq!(cl_genus(3), 1);
        assert_eq!(cl_genus(4), 5);
        assert_eq!(cl_genus(6), 49);
        assert!((3..=16).all(genus_identity));
    }

    #[test]
    fn trace_decomposition_examples() {
        for (l, p) in [(4, 13), (4, 17), (5, 11)] {
            let r = trace_decomposition_check(l, &table(p), FieldDegree::Base).unwrap();
            assert!(r.holds(), "l={l} p={p}: {r:?}");
        }
        let r = trace_decomposition_check(4, &table(11), FieldDegree::Quadratic).unwrap();
        assert_eq!((r.lhs, r.rhs()), (-62, -62));
        assert!(trace_decomposition_check(6, &table(13), FieldDegree::Base).is_err());
    }

    #[test]
    fn l4_identity_examples() {
        let r7 = l4_trace_identity(&table(7)).unwrap();
        assert_eq!(r7.traces[0], 0);
        assert!(r7.holds());
        let r11 = l4_trace_identity(&table(11)).unwrap();
        assert_eq!(r11.traces[1] + r11.traces[2], 0);
        assert!(l4_trace_identity(&table(13)).unwrap().holds());
        assert!(l4_trace_identity(&table(5)).is_err());
    }
}
