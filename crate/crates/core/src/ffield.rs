//! Prime enumeration, prime-field arithmetic, Legendre characters and the
//! quadratic extension `F_p[sqrt(delta)]`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// An odd prime `p`, with its residues mod 4 and mod 8 cached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        Ok(PrimeModulus(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    pub fn mod4(self) -> u8 {
        (self.0 % 4) as u8
    }

    pub fn mod8(self) -> u8 {
        (self.0 % 8) as u8
    }

    pub fn is_one_mod_four(self) -> bool {
        self.mod4() == 1
    }

    /// Reduces a signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, a: i64) -> u64 {
        (a as i128).rem_euclid(self.0 as i128) as u64
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for the whole `u64` range.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &BASES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All odd primes `<= limit`, ascending.
pub fn sieve_primes(limit: u64) -> Result<Vec<PrimeModulus>> {
    if limit < 3 {
        return Err(Error::EmptyRange(limit));
    }
    // odd-only sieve: index i stands for 2i + 1
    let n = (limit as usize - 1) / 2 + 1;
    let mut composite = vec![false; n];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit as usize {
        if !composite[i] {
            let step = 2 * i + 1;
            let mut j = (step * step) / 2;
            while j < n {
                composite[j] = true;
                j += step;
            }
        }
        i += 1;
    }
    Ok((1..n)
        .filter(|&i| !composite[i])
        .map(|i| PrimeModulus(2 * i as u64 + 1))
        .collect())
}

/// Odd primes in the closed interval `[lo, hi]`; empty when `hi < 3` or `hi < lo`.
pub fn primes_between(lo: u64, hi: u64) -> Vec<PrimeModulus> {
    if hi < 3 || hi < lo {
        return Vec::new();
    }
    sieve_primes(hi)
        .map(|ps| ps.into_iter().filter(|p| p.get() >= lo).collect())
        .unwrap_or_default()
}

/// Legendre symbol `(a/p)` by Euler's criterion.
pub fn legendre(a: i64, p: PrimeModulus) -> i8 {
    let r = p.reduce(a);
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p.get() - 1) / 2, p.get()) == 1 {
        1
    } else {
        -1
    }
}

/// Smallest positive quadratic non-residue mod `p`.
pub fn find_nonresidue(p: PrimeModulus) -> u64 {
    (2..p.get())
        .find(|&d| legendre(d as i64, p) == -1)
        .expect("every odd prime has a non-residue")
}

/// Legendre characters of every residue mod `p`, one signed byte each.
#[derive(Debug, Clone)]
pub struct ResidueTable {
    p: PrimeModulus,
    chi: Vec<i8>,
}

impl ResidueTable {
    pub fn new(p: PrimeModulus) -> Self {
        let pu = p.get() as usize;
        let mut chi = vec![-1i8; pu];
        chi[0] = 0;
        // i^2 mod p by running sums of odd numbers; 2i - 1 < p keeps one subtraction enough
        let mut sq = 0usize;
        for i in 1..=(pu - 1) / 2 {
            sq += 2 * i - 1;
            if sq >= pu {
                sq -= pu;
            }
            chi[sq] = 1;
        }
        ResidueTable { p, chi }
    }

    #[inline]
    pub fn p(&self) -> PrimeModulus {
        self.p
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p.get()
    }

    /// Character of an already reduced residue.
    #[inline]
    pub fn chi(&self, a: u64) -> i8 {
        self.chi[a as usize]
    }

    #[inline]
    pub fn chi_signed(&self, a: i64) -> i8 {
        self.chi[self.p.reduce(a) as usize]
    }

    #[inline]
    pub fn is_residue(&self, a: u64) -> bool {
        self.chi[a as usize] == 1
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.chi
    }

    pub fn nonresidue(&self) -> u64 {
        self.chi.iter().position(|&c| c == -1).expect("p >= 3") as u64
    }
}

pub fn residue_table(p: PrimeModulus) -> ResidueTable {
    ResidueTable::new(p)
}

/// `a + b * sqrt(delta)`, coefficients reduced mod `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadExtElement {
    pub a: u64,
    pub b: u64,
}

/// The field `F_p[x]/(x^2 - delta)` for the smallest non-residue `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadExt {
    p: u64,
    delta: u64,
}

impl QuadExt {
    pub fn new(p: PrimeModulus) -> Self {
        QuadExt {
            p: p.get(),
            delta: find_nonresidue(p),
        }
    }

    /// `delta` must be a non-residue mod `p`; not re-checked.
    pub fn with_delta(p: PrimeModulus, delta: u64) -> Self {
        QuadExt {
            p: p.get(),
            delta: delta % p.get(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn elem(&self, a: u64, b: u64) -> QuadExtElement {
        QuadExtElement {
            a: a % self.p,
            b: b % self.p,
        }
    }

    pub fn zero(&self) -> QuadExtElement {
        QuadExtElement { a: 0, b: 0 }
    }

    pub fn one(&self) -> QuadExtElement {
        QuadExtElement { a: 1, b: 0 }
    }

    pub fn sqrt_delta(&self) -> QuadExtElement {
        QuadExtElement { a: 0, b: 1 }
    }

    pub fn add(&self, x: QuadExtElement, y: QuadExtElement) -> QuadExtElement {
        QuadExtElement {
            a: (x.a + y.a) % self.p,
            b: (x.b + y.b) % self.p,
        }
    }

    pub fn sub(&self, x: QuadExtElement, y: QuadExtElement) -> QuadExtElement {
        QuadExtElement {
            a: (x.a + self.p - y.a) % self.p,
            b: (x.b + self.p - y.b) % self.p,
        }
    }

    pub fn mul(&self, x: QuadExtElement, y: QuadExtElement) -> QuadExtElement {
        let p = self.p as u128;
        let (xa, xb, ya, yb) = (x.a as u128, x.b as u128, y.a as u128, y.b as u128);
        let a = (xa * ya + (xb * yb % p) * self.delta as u128) % p;
        let b = (xa * yb + xb * ya) % p;
        QuadExtElement {
            a: a as u64,
            b: b as u64,
        }
    }

    pub fn pow(&self, mut x: QuadExtElement, mut e: u128) -> QuadExtElement {
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        acc
    }

    /// `N(a + b sqrt(delta)) = a^2 - delta b^2`.
    pub fn norm(&self, x: QuadExtElement) -> u64 {
        let p = self.p as u128;
        let a2 = x.a as u128 * x.a as u128 % p;
        let db2 = (x.b as u128 * x.b as u128 % p) * self.delta as u128 % p;
        ((a2 + p - db2) % p) as u64
    }

    /// Quadratic character of `F_{p^2}` by Euler's criterion `x^((p^2-1)/2)`.
    pub fn chi_by_power(&self, x: QuadExtElement) -> i8 {
        if x == self.zero() {
            return 0;
        }
        let e = (self.p as u128 * self.p as u128 - 1) / 2;
        if self.pow(x, e) == self.one() {
            1
        } else {
            -1
        }
    }

    /// Quadratic character of `F_{p^2}` through the norm: `x^((p^2-1)/2) = N(x)^((p-1)/2)`.
    #[inline]
    pub fn chi(&self, table: &ResidueTable, x: QuadExtElement) -> i8 {
        table.chi(self.norm(x))
    }
}

pub fn quadext_mul(field: &QuadExt, x: QuadExtElement, y: QuadExtElement) -> QuadExtElement {
    field.mul(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn sieve_small_limits() {
        let got: Vec<u64> = sieve_primes(12).unwrap().iter().map(|p| p.get()).collect();
        assert_eq!(got, vec![3, 5, 7, 11]);
        assert_eq!(sieve_primes(3).unwrap(), vec![pm(3)]);
        assert_eq!(sieve_primes(100).unwrap().len(), 24);
        assert_eq!(sieve_primes(2), Err(Error::EmptyRange(2)));
    }

    #[test]
    fn sieve_agrees_with_miller_rabin() {
        let sieved: Vec<u64> = sieve_primes(20_000)
            .unwrap()
            .iter()
            .map(|p| p.get())
            .collect();
        let tested: Vec<u64> = (3..=20_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieved, tested);
    }

    #[test]
    fn prime_modulus_rejects_non_primes() {
        assert!(PrimeModulus::new(2).is_err());
        assert!(PrimeModulus::new(9).is_err());
        assert!(PrimeModulus::new(1).is_err());
        let p = pm(17);
        assert_eq!((p.mod4(), p.mod8()), (1, 1));
        assert!(PrimeModulus::new(18_446_744_073_709_551_557).is_ok());
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(0, pm(13)), 0);
        assert_eq!(legendre(1, pm(13)), 1);
        assert_eq!(legendre(2, pm(17)), 1);
        assert_eq!(legendre(6, pm(17)), -1);
        assert_eq!(legendre(-1, pm(7)), -1);
        assert_eq!(legendre(-1, pm(13)), 1);
    }

    #[test]
    fn residue_table_examples() {
        assert_eq!(ResidueTable::new(pm(5)).as_slice(), &[0, 1, -1, -1, 1]);
        let t = ResidueTable::new(pm(17));
        let plus: Vec<u64> = (0..17).filter(|&a| t.chi(a) == 1).collect();
        assert_eq!(plus, vec![1, 2, 4, 8, 9, 13, 15, 16]);
    }

    #[test]
    fn nonresidue_examples() {
        assert_eq!(find_nonresidue(pm(5)), 2);
        assert_eq!(find_nonresidue(pm(7)), 3);
        assert_eq!(find_nonresidue(pm(17)), 3);
        assert_eq!(ResidueTable::new(pm(17)).nonresidue(), 3);
    }

    #[test]
    fn table_balance_and_multiplicativity() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for p in sieve_primes(10_000).unwrap() {
            let t = ResidueTable::new(p);
            let pu = p.get();
            let plus = t.as_slice().iter().filter(|&&c| c == 1).count() as u64;
            let minus = t.as_slice().iter().filter(|&&c| c == -1).count() as u64;
            assert_eq!(plus, (pu - 1) / 2);
            assert_eq!(minus, (pu - 1) / 2);
            assert_eq!(t.chi(0), 0);
            let trials = if pu < 200 { 1000 } else { 50 };
            for _ in 0..trials {
                let a = rng.gen_range(1..pu);
                let b = rng.gen_range(1..pu);
                assert_eq!(t.chi(mul_mod(a, b, pu)), t.chi(a) * t.chi(b));
            }
        }
    }

    #[test]
    fn quadext_examples() {
        let p = pm(5);
        let f = QuadExt::new(p);
        assert_eq!(f.delta(), 2);
        let s = f.sqrt_delta();
        assert_eq!(f.mul(s, s), f.elem(2, 0));
        let x = f.elem(3, 4);
        assert_eq!(quadext_mul(&f, x, f.one()), x);
        assert_eq!(f.mul(f.elem(1, 1), f.elem(1, 4)), f.elem(4, 0));
    }

    proptest! {
        #[test]
        fn euler_criterion_matches_table(idx in 0usize..200, a in 0u64..1_000_000) {
            let primes = sieve_primes(2000).unwrap();
            let p = primes[idx % primes.len()];
            let t = ResidueTable::new(p);
            let r = a % p.get();
            prop_assert_eq!(legendre(a as i64, p), t.chi(r));
            let e = pow_mod(r, (p.get() - 1) / 2, p.get());
            let expect = match t.chi(r) { 0 => 0, 1 => 1, _ => p.get() - 1 };
            prop_assert_eq!(e, expect);
        }

        #[test]
        fn quadext_norm_multiplicative_and_group_order(
            idx in 0usize..100, a in 0u64..10_000, b in 1u64..10_000, c in 0u64..10_000, d in 0u64..10_000
        ) {
            let primes = sieve_primes(600).unwrap();
            let p = primes[idx % primes.len()];
            let f = QuadExt::new(p);
            let x = f.elem(a, b);
            let y = f.elem(c, d);
            let pu = p.get();
            prop_assert_eq!(f.norm(f.mul(x, y)), mul_mod(f.norm(x), f.norm(y), pu));
            if x != f.zero() {
                prop_assert_eq!(f.pow(x, pu as u128 * pu as u128 - 1), f.one());
            }
            let t = ResidueTable::new(p);
            prop_assert_eq!(f.chi(&t, y), f.chi_by_power(y));
        }
    }
}
