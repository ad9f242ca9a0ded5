//! Prime-field arithmetic and point counting on y² = f(x).
//!
//! Counting uses the quadratic character: #{(x, y) : y² = f(x)} = Σ_x (1 + χ(f(x))).
//! For each prime a square-indicator table of size p is built once, and f is
//! evaluated at x = 0, 1, …, p−1 by stepping its forward-difference table, so
//! the inner loop is deg(f) modular additions and no multiplications.

use crate::error::{Error, Result};

/// All primes up to an inclusive bound, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeList {
    bound: u64,
    primes: Vec<u64>,
}

impl PrimeList {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }
}

/// Sieve of Eratosthenes over `[2, bound]`.
pub fn sieve_primes(bound: u64) -> PrimeList {
    let n = bound as usize;
    if n < 2 {
        return PrimeList { bound, primes: Vec::new() };
    }
    let mut composite = vec![false; n + 1];
    let mut i = 2usize;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    let primes = (2..=n).filter(|&k| !composite[k]).map(|k| k as u64).collect();
    PrimeList { bound, primes }
}

/// Deterministic trial division; inputs here are below 2^32.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(())
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

#[inline]
fn reduce(a: i64, p: u64) -> u64 {
    a.rem_euclid(p as i64) as u64
}

/// Legendre symbol (a | p) by Euler's criterion.
pub fn legendre(a: i64, p: u64) -> Result<i8> {
    check_odd_prime(p)?;
    let r = reduce(a, p);
    if r == 0 {
        return Ok(0);
    }
    Ok(if pow_mod(r, (p - 1) / 2, p) == 1 { 1 } else { -1 })
}

/// Integer polynomial, dense coefficients from low to high degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<i64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<i64>) -> Result<Self> {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("zero polynomial".into()));
        }
        Ok(Self { coeffs })
    }

    /// Builds Σ coeff·x^deg from `(deg, coeff)` pairs; repeated degrees add up.
    pub fn from_terms(terms: &[(usize, i64)]) -> Result<Self> {
        let degree = terms.iter().map(|&(d, _)| d).max().unwrap_or(0);
        let mut coeffs = vec![0i64; degree + 1];
        for &(d, a) in terms {
            coeffs[d] += a;
        }
        Self::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Horner evaluation of f(x) mod p.
    pub fn eval_mod(&self, x: u64, p: u64) -> u64 {
        let x = x % p;
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &a| (mul_mod(acc, x, p) + reduce(a, p)) % p)
    }
}

/// Quadratic character χ(v) for all residues v mod p.
pub struct SquareTable {
    p: u64,
    chi: Vec<i8>,
}

impl SquareTable {
    pub fn new(p: u64) -> Result<Self> {
        check_odd_prime(p)?;
        let n = p as usize;
        let mut chi = vec![-1i8; n];
        chi[0] = 0;
        // (x+1)² = x² + 2x + 1
        let mut sq = 0u64;
        for x in 0..p.div_ceil(2) {
            if x > 0 {
                chi[sq as usize] = 1;
            }
            sq = (sq + 2 * x + 1) % p;
        }
        Ok(Self { p, chi })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn chi(&self, v: u64) -> i8 {
        self.chi[v as usize]
    }
}

/// Σ_{x ∈ F_p} χ(f(x)), with f stepped through its forward differences.
pub fn character_sum(f: &Poly, table: &SquareTable) -> i64 {
    let p = table.prime();
    let deg = f.degree();
    // diff[k] = Δ^k f(0) mod p; valid for any p since the identities are over Z.
    let mut diff: Vec<u64> = (0..=deg as u64).map(|j| f.eval_mod(j, p)).collect();
    for k in 1..=deg {
        for j in (k..=deg).rev() {
            diff[j] = (diff[j] + p - diff[j - 1]) % p;
        }
    }
    let mut sum = 0i64;
    for _ in 0..p {
        sum += table.chi(diff[0]) as i64;
        for k in 0..deg {
            let v = diff[k] + diff[k + 1];
            diff[k] = if v >= p { v - p } else { v };
        }
    }
    sum
}

/// Number of affine solutions (x, y) ∈ F_p² of y² = f(x).
pub fn affine_count(f: &Poly, p: u64) -> Result<u64> {
    let table = SquareTable::new(p)?;
    Ok(affine_count_with(f, &table))
}

/// [`affine_count`] reusing a prebuilt square table.
pub fn affine_count_with(f: &Poly, table: &SquareTable) -> u64 {
    (table.prime() as i64 + character_sum(f, table)) as u64
}
