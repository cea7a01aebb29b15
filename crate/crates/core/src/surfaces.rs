//! Point counts on the K3 surface `S`, its affine models `X` and `X'`, the
//! quartic twists of `u^2 = s^4 + 1`, and the del Pezzo surface `S_{2,2}`.
//!
//! Every `w^2 = v` is replaced by the factor `1 + chi(v)`; coordinates that
//! only appear squared are never enumerated.

use serde::Serialize;

use crate::curves::{affine_count, frobenius_trace, jacobsthal, CurveSpec, FieldDegree};
use crate::error::{Error, Result};
use crate::ffield::{mul_mod, PrimeModulus, ResidueTable};

fn require_at_least(p: PrimeModulus, min: u64) -> Result<()> {
    if p.get() < min {
        return Err(Error::OutOfRange {
            what: "p",
            value: p.get(),
            constraint: if min == 5 { "p >= 5" } else { "p >= 3" },
        });
    }
    Ok(())
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

fn squares(m: u64) -> Vec<u64> {
    (0..m).map(|x| mul_mod(x, x, m)).collect()
}

#[inline]
fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

/// `|S(F_p)|` and `|S°(F_p)|` for `x1^2 - x2^2 = x3^2, x0^2 - x1^2 = x4^2, x0^2 - x2^2 = x5^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SCount {
    pub projective: u64,
    pub torus: u64,
}

pub fn count_s(table: &ResidueTable) -> Result<SCount> {
    let p = table.p();
    require_at_least(p, 5)?;
    let m = p.get();
    let sq = squares(m);
    let w = |v: u64| (1 + table.chi(v) as i64) as u64;
    let torus_w = |v: u64| if table.chi(v) == 1 { 2u64 } else { 0 };

    // projective points of P^2 in (x0 : x1 : x2), lifted through the three relations
    let mut projective = 0u64;
    let mut torus = 0u64;
    for x1 in 0..m {
        let s1 = sq[x1 as usize];
        let v2 = sub_mod(1, s1, m);
        let w2 = w(v2);
        let t2 = torus_w(v2);
        for x2 in 0..m {
            let s2 = sq[x2 as usize];
            let v1 = sub_mod(s1, s2, m);
            let v3 = sub_mod(1, s2, m);
            projective += w(v1) * w2 * w(v3);
            if x1 != 0 && x2 != 0 {
                torus += torus_w(v1) * t2 * torus_w(v3);
            }
        }
    }
    let minus_one = m - 1;
    for x2 in 0..m {
        let s2 = sq[x2 as usize];
        projective += w(sub_mod(1, s2, m)) * w(minus_one) * w(sub_mod(0, s2, m));
    }
    projective += w(minus_one) * w(minus_one);
    Ok(SCount { projective, torus })
}

/// `(cone - 1)/(p - 1)` over the affine cone in `(x0, x1, x2)`; `O(p^3)`.
pub fn count_s_cone(table: &ResidueTable) -> Result<u64> {
    let p = table.p();
    require_at_least(p, 5)?;
    let m = p.get();
    let sq = squares(m);
    let w = |v: u64| (1 + table.chi(v) as i64) as u64;
    let mut cone = 0u64;
    for x0 in 0..m as usize {
        for x1 in 0..m as usize {
            let v2 = w(sub_mod(sq[x0], sq[x1], m));
            if v2 == 0 {
                continue;
            }
            for x2 in 0..m as usize {
                cone += v2 * w(sub_mod(sq[x1], sq[x2], m)) * w(sub_mod(sq[x0], sq[x2], m));
            }
        }
    }
    exact_projective(cone, m)
}

fn exact_projective(cone: u64, m: u64) -> Result<u64> {
    if !(cone - 1).is_multiple_of(m - 1) {
        return Err(Error::Inconsistent(format!(
            "cone count {cone} - 1 is not divisible by p - 1 = {}",
            m - 1
        )));
    }
    Ok((cone - 1) / (m - 1))
}

/// `M_p = sum_{x,y} (1 + chi((x^2 y^2 + 1)(x^2 + y^2)))`.
pub fn count_x(table: &ResidueTable) -> u64 {
    let m = table.modulus();
    let sq = squares(m);
    let mut total = 0u64;
    for &a in &sq {
        for &b in &sq {
            let v = mul_mod((mul_mod(a, b, m) + 1) % m, (a + b) % m, m);
            total += (1 + table.chi(v) as i64) as u64;
        }
    }
    total
}

/// `y1^2 = (t^2 x1^4 + 1)(t^2 + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct XPrimeCount {
    pub affine: u64,
    /// Points with `x1 y1 t = 0`.
    pub boundary: u64,
}

fn xprime_value(x1: u64, t: u64, m: u64) -> u64 {
    let t2 = mul_mod(t, t, m);
    let x2 = mul_mod(x1, x1, m);
    let x4 = mul_mod(x2, x2, m);
    mul_mod((mul_mod(t2, x4, m) + 1) % m, (t2 + 1) % m, m)
}

pub fn count_xprime(table: &ResidueTable) -> Result<XPrimeCount> {
    let p = table.p();
    require_at_least(p, 5)?;
    let m = p.get();
    let w = |v: u64| (1 + table.chi(v) as i64) as u64;
    let mut affine = 0u64;
    for x1 in 0..m {
        for t in 0..m {
            affine += w(xprime_value(x1, t, m));
        }
    }
    // inclusion-exclusion over the three coordinate hyperplanes
    let on_x1: u64 = (0..m).map(|t| w(xprime_value(0, t, m))).sum();
    let on_t: u64 = (0..m).map(|x1| w(xprime_value(x1, 0, m))).sum();
    let mut on_y1 = 0u64;
    for x1 in 0..m {
        for t in 0..m {
            on_y1 += u64::from(xprime_value(x1, t, m) == 0);
        }
    }
    let on_x1_y1 = (0..m).filter(|&t| xprime_value(0, t, m) == 0).count() as u64;
    let on_x1_t = w(xprime_value(0, 0, m));
    let on_y1_t = (0..m).filter(|&x1| xprime_value(x1, 0, m) == 0).count() as u64;
    let on_all = u64::from(xprime_value(0, 0, m) == 0);
    let boundary = on_x1 + on_y1 + on_t - on_x1_y1 - on_x1_t - on_y1_t + on_all;
    Ok(XPrimeCount { affine, boundary })
}

/// Direct count of `X'` points with `x1 y1 t = 0`.
pub fn count_xprime_boundary_direct(table: &ResidueTable) -> u64 {
    let m = table.modulus();
    let mut total = 0u64;
    for x1 in 0..m {
        for t in 0..m {
            let v = xprime_value(x1, t, m);
            total += if x1 == 0 || t == 0 {
                (1 + table.chi(v) as i64) as u64
            } else {
                u64::from(v == 0)
            };
        }
    }
    total
}

/// Direct count of `X'` points with `x1 y1 t != 0`.
pub fn count_xprime_interior_direct(table: &ResidueTable) -> u64 {
    let m = table.modulus();
    let mut total = 0u64;
    for x1 in 1..m {
        for t in 1..m {
            if table.chi(xprime_value(x1, t, m)) == 1 {
                total += 2;
            }
        }
    }
    total
}

/// One of the curves `u^2 = a (b^2 s^4 + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TwistRow {
    pub a: u64,
    pub b: u64,
    pub affine: u64,
    /// Affine points with `s = 0` or `u = 0`.
    pub boundary: u64,
    pub infinity: u64,
    pub trace: i64,
}

impl TwistRow {
    /// `|E°(F_p)|`
    pub fn interior(&self) -> u64 {
        self.affine - self.boundary
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuarticTwists {
    pub p: PrimeModulus,
    pub delta: u64,
    /// Order `(1,1), (d,1), (1,d), (d,d)`.
    pub rows: [TwistRow; 4],
}

impl QuarticTwists {
    pub fn traces(&self) -> [i64; 4] {
        self.rows.map(|r| r.trace)
    }

    /// Traces follow `(a, -a, -a, a)`.
    pub fn signs_hold(&self) -> bool {
        let a = self.rows[0].trace;
        self.traces() == [a, -a, -a, a]
    }

    /// Boundary and infinity columns for `p = +-1 mod 8` and `p = +-3 mod 8`.
    pub fn expected_table(p: PrimeModulus) -> ([u64; 4], [u64; 4]) {
        let boundary = match p.mod8() {
            1 | 7 => [6, 4, 2, 0],
            _ => [2, 0, 6, 4],
        };
        (boundary, [2, 0, 2, 0])
    }

    pub fn table_matches(&self) -> bool {
        let (boundary, infinity) = Self::expected_table(self.p);
        self.rows.map(|r| r.boundary) == boundary && self.rows.map(|r| r.infinity) == infinity
    }
}

pub fn quartic_twist_counts(table: &ResidueTable) -> Result<QuarticTwists> {
    let p = table.p();
    require_one_mod_four(p)?;
    let m = p.get();
    let delta = table.nonresidue();
    let fourth: Vec<u64> = (0..m)
        .map(|s| {
            let s2 = mul_mod(s, s, m);
            mul_mod(s2, s2, m)
        })
        .collect();
    let row = |a: u64, b: u64| -> TwistRow {
        let b2 = mul_mod(b, b, m);
        let mut affine = 0u64;
        let mut boundary = 0u64;
        for (s, &s4) in fourth.iter().enumerate() {
            let v = mul_mod(a, (mul_mod(b2, s4, m) + 1) % m, m);
            let n = (1 + table.chi(v) as i64) as u64;
            affine += n;
            if s == 0 {
                boundary += n;
            } else if v == 0 {
                boundary += 1;
            }
        }
        let infinity = if table.chi(a) == 1 { 2 } else { 0 };
        TwistRow {
            a,
            b,
            affine,
            boundary,
            infinity,
            trace: m as i64 + 1 - (affine + infinity) as i64,
        }
    };
    Ok(QuarticTwists {
        p,
        delta,
        rows: [row(1, 1), row(delta, 1), row(1, delta), row(delta, delta)],
    })
}

/// Both sides of `|X' \ X'_0| = 1/4 sum |E_i°|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Eq8Check {
    pub p: PrimeModulus,
    pub lhs: u64,
    pub rhs_times_four: u64,
}

impl Eq8Check {
    pub fn holds(&self) -> bool {
        4 * self.lhs == self.rhs_times_four
    }
}

pub fn eq8_check(table: &ResidueTable) -> Result<Eq8Check> {
    let twists = quartic_twist_counts(table)?;
    Ok(Eq8Check {
        p: table.p(),
        lhs: count_xprime_interior_direct(table),
        rhs_times_four: twists.rows.iter().map(|r| r.interior().pow(2)).sum(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SurfaceCountRecord {
    pub p: PrimeModulus,
    pub s_proj: u64,
    pub s_torus: u64,
    pub m_p: u64,
    pub xp_affine: u64,
    pub xp0: u64,
    /// Affine counts of the four twists; only for `p = 1 mod 4`.
    pub twist_affine: Option<[u64; 4]>,
    /// Affine count of `y^2 = x^3 - x`.
    pub n_p: u64,
}

impl SurfaceCountRecord {
    pub fn violations(&self) -> Vec<String> {
        let p = self.p.get();
        let mut out = Vec::new();
        if self.s_proj + 1 != self.m_p {
            out.push(format!(
                "S_proj + 1 = {} != M_p = {}",
                self.s_proj + 1,
                self.m_p
            ));
        }
        if self.xp_affine + p != self.m_p {
            out.push(format!(
                "Xp + p = {} != M_p = {}",
                self.xp_affine + p,
                self.m_p
            ));
        }
        if self.p.is_one_mod_four() {
            if self.s_torus + 24 * p != self.s_proj + 80 {
                out.push(format!("S_torus = {} != S_proj - 24p + 80", self.s_torus));
            }
            if self.xp0 + 15 != 7 * p {
                out.push(format!("Xp0 = {} != 7p - 15", self.xp0));
            }
        }
        out
    }
}

pub fn surface_record(table: &ResidueTable) -> Result<SurfaceCountRecord> {
    let p = table.p();
    let s = count_s(table)?;
    let xp = count_xprime(table)?;
    let twist_affine = if p.is_one_mod_four() {
        Some(quartic_twist_counts(table)?.rows.map(|r| r.affine))
    } else {
        None
    };
    Ok(SurfaceCountRecord {
        p,
        s_proj: s.projective,
        s_torus: s.torus,
        m_p: count_x(table),
        xp_affine: xp.affine,
        xp0: xp.boundary,
        twist_affine,
        n_p: affine_count(&CurveSpec::x3_minus_x(), table, FieldDegree::Base)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub lhs: i64,
    pub rhs: i64,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaChainReport {
    pub p: PrimeModulus,
    pub checks: Vec<IdentityCheck>,
}

impl LemmaChainReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(IdentityCheck::holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.holds())
    }
}

/// Every surface identity that applies to the residue class of `p`.
pub fn lemma_chain_check(table: &ResidueTable) -> Result<LemmaChainReport> {
    let rec = surface_record(table)?;
    let p = rec.p.get() as i64;
    let n_p = rec.n_p as i64;
    let m_p = rec.m_p as i64;
    let s_proj = rec.s_proj as i64;
    let mut checks = vec![
        IdentityCheck {
            name: "S_proj = M_p - 1",
            lhs: s_proj,
            rhs: m_p - 1,
        },
        IdentityCheck {
            name: "M_p = Xp + p",
            lhs: m_p,
            rhs: rec.xp_affine as i64 + p,
        },
        IdentityCheck {
            name: "M_p = (p+1)^2 + (N_p-p)^2 + 1",
            lhs: m_p,
            rhs: (p + 1).pow(2) + (n_p - p).pow(2) + 1,
        },
    ];
    if rec.p.is_one_mod_four() {
        let j = jacobsthal(table)?.j;
        let eq8 = eq8_check(table)?;
        checks.extend([
            IdentityCheck {
                name: "S_torus = S_proj - 24p + 80",
                lhs: rec.s_torus as i64,
                rhs: s_proj - 24 * p + 80,
            },
            IdentityCheck {
                name: "Xp0 = 7p - 15",
                lhs: rec.xp0 as i64,
                rhs: 7 * p - 15,
            },
            IdentityCheck {
                name: "S_proj = (p+1)^2 + J^2",
                lhs: s_proj,
                rhs: (p + 1).pow(2) + j * j,
            },
            IdentityCheck {
                name: "4 |X' minus X'_0| = sum |E_i°|^2",
                lhs: 4 * eq8.lhs as i64,
                rhs: eq8.rhs_times_four as i64,
            },
        ]);
    } else {
        checks.push(IdentityCheck {
            name: "M_p = (p+1)^2 + 1",
            lhs: m_p,
            rhs: (p + 1).pow(2) + 1,
        });
    }
    Ok(LemmaChainReport { p: rec.p, checks })
}

/// Singular points of `S` in the four coordinate families, when `sqrt(-1)` exists.
pub fn singular_points(table: &ResidueTable) -> Result<Vec<[u64; 6]>> {
    let p = table.p();
    require_one_mod_four(p)?;
    let m = p.get();
    let i = (1..m)
        .find(|&x| mul_mod(x, x, m) == m - 1)
        .expect("p = 1 mod 4");
    let neg = |x: u64| (m - x) % m;
    let mut points = Vec::with_capacity(16);
    for s in [1u64, m - 1] {
        for t in [1u64, m - 1] {
            // x1 = x2 = x3 = 0, x0 = +-x4 = +-x5
            points.push([1, 0, 0, 0, s, t]);
            // x0 = x1 = x4 = 0, x2 = +-i x3 = +-i x5
            let i_inv = neg(i);
            points.push([0, 0, 1, mul_mod(s, i_inv, m), 0, mul_mod(t, i_inv, m)]);
            // x0 = x2 = x5 = 0, x1 = +-x3 = +-i x4
            points.push([0, 1, 0, s, mul_mod(t, i_inv, m), 0]);
            // x3 = x4 = x5 = 0, x0 = +-x1 = +-x2
            points.push([1, s, t, 0, 0, 0]);
        }
    }
    Ok(points)
}

/// Point lies on `S` and the Jacobian of the three quadrics has rank < 3 there.
pub fn is_singular_point_of_s(x: &[u64; 6], m: u64) -> bool {
    let sq = |v: u64| mul_mod(v, v, m);
    let on_s = (sq(x[1]) + 2 * m - sq(x[2]) - sq(x[3])).is_multiple_of(m)
        && (sq(x[0]) + 2 * m - sq(x[1]) - sq(x[4])).is_multiple_of(m)
        && (sq(x[0]) + 2 * m - sq(x[2]) - sq(x[5])).is_multiple_of(m);
    if !on_s || x.iter().all(|&v| v == 0) {
        return false;
    }
    let n = |v: u64| (m - v) % m;
    let mut rows = [
        [0, x[1], n(x[2]), n(x[3]), 0, 0],
        [x[0], n(x[1]), 0, 0, n(x[4]), 0],
        [x[0], 0, n(x[2]), 0, 0, n(x[5])],
    ];
    rank_mod(&mut rows, m) < 3
}

fn rank_mod(rows: &mut [[u64; 6]; 3], m: u64) -> usize {
    let mut rank = 0;
    for col in 0..6 {
        let Some(pivot) = (rank..3).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = crate::ffield::pow_mod(rows[rank][col], m - 2, m);
        for r in 0..3 {
            if r != rank && rows[r][col] != 0 {
                let f = mul_mod(rows[r][col], inv, m);
                let pivot_row = rows[rank];
                for (v, &pv) in rows[r].iter_mut().zip(&pivot_row) {
                    *v = (*v + m - mul_mod(f, pv, m)) % m;
                }
            }
        }
        rank += 1;
        if rank == 3 {
            break;
        }
    }
    rank
}

/// Projective count of `S_{2,2}` and the torus count of its affine cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct S22Count {
    pub p: PrimeModulus,
    pub projective: u64,
    pub cone_torus: u64,
    /// `#{(s0, s1, s2)` nonzero squares with `s1 - s0`, `s2 - s1` nonzero squares`}`.
    pub square_triples: u64,
}

impl S22Count {
    pub fn torus_contract_holds(&self) -> bool {
        self.cone_torus == 32 * self.square_triples
    }
}

pub fn s22_counts(table: &ResidueTable) -> Result<S22Count> {
    let p = table.p();
    require_at_least(p, 5)?;
    let m = p.get();
    let sq = squares(m);
    let w = |v: u64| (1 + table.chi(v) as i64) as u64;
    let mut cone = 0u64;
    for x0 in 0..m as usize {
        for x1 in 0..m as usize {
            let a = w(sub_mod(sq[x1], sq[x0], m));
            if a == 0 {
                continue;
            }
            for x2 in 0..m as usize {
                cone += a * w(sub_mod(sq[x2], sq[x1], m));
            }
        }
    }
    let projective = exact_projective(cone, m)?;

    // x3, x4 nonzero need nonzero square differences; the x2 factor depends only on x1
    let torus_w = |v: u64| if table.chi(v) == 1 { 2u64 } else { 0 };
    let inner: Vec<u64> = (0..m as usize)
        .map(|x1| {
            (1..m as usize)
                .map(|x2| torus_w(sub_mod(sq[x2], sq[x1], m)))
                .sum()
        })
        .collect();
    let mut cone_torus = 0u64;
    for x0 in 1..m as usize {
        for x1 in 1..m as usize {
            cone_torus += torus_w(sub_mod(sq[x1], sq[x0], m)) * inner[x1];
        }
    }

    let nonzero_squares: Vec<u64> = (1..m).filter(|&s| table.chi(s) == 1).collect();
    let mut square_triples = 0u64;
    for &s0 in &nonzero_squares {
        for &s1 in &nonzero_squares {
            if table.chi(sub_mod(s1, s0, m)) != 1 {
                continue;
            }
            square_triples += nonzero_squares
                .iter()
                .filter(|&&s2| table.chi(sub_mod(s2, s1, m)) == 1)
                .count() as u64;
        }
    }
    Ok(S22Count {
        p,
        projective,
        cone_torus,
        square_triples,
    })
}

/// Trace of `u^2 = s^4 + 1` through its smooth model, for reporting.
pub fn quartic_trace(table: &ResidueTable) -> Result<i64> {
    let curve = CurveSpec::new("s4+1", vec![1, 0, 0, 0, 1])?;
    Ok(frobenius_trace(&curve, table)?.trace)
}
