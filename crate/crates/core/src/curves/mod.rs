//! The two curve families, Frobenius traces, and the splitting of
//! Jac(y² = x^(2^m) − c) into the factors Jac(y² = x^(2^d+1) − cx), d = 1, …, m−1.

pub mod cache;

pub use cache::TraceCache;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{affine_count_with, is_prime, Poly, SquareTable};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// y² = x^(2^m) − c
    #[serde(rename = "pow2m")]
    PowTwo,
    /// y² = x^(2^d+1) − cx
    #[serde(rename = "twopow")]
    TwoPowPlusOne,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::PowTwo => "pow2m",
            Family::TwoPowPlusOne => "twopow",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pow2m" => Ok(Family::PowTwo),
            "twopow" => Ok(Family::TwoPowPlusOne),
            other => Err(Error::InvalidArgument(format!(
                "unknown family {other:?} (expected pow2m or twopow)"
            ))),
        }
    }
}

/// One curve from either family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveSpec {
    family: Family,
    param: u32,
    c: i64,
}

// 2^m stays well inside i64/u64 and the degree stays usable for point counts.
const MAX_PARAM: u32 = 20;

impl CurveSpec {
    pub fn new(family: Family, param: u32, c: i64) -> Result<Self> {
        let min = match family {
            Family::PowTwo => 2,
            Family::TwoPowPlusOne => 1,
        };
        if param < min || param > MAX_PARAM {
            return Err(Error::InvalidCurve(format!(
                "{family} needs parameter in {min}..={MAX_PARAM}, got {param}"
            )));
        }
        if c == 0 {
            return Err(Error::InvalidCurve("c must be nonzero".into()));
        }
        Ok(Self { family, param, c })
    }

    /// y² = x^(2^m) − c
    pub fn pow_two(m: u32, c: i64) -> Result<Self> {
        Self::new(Family::PowTwo, m, c)
    }

    /// y² = x^(2^d+1) − cx
    pub fn two_pow_plus_one(d: u32, c: i64) -> Result<Self> {
        Self::new(Family::TwoPowPlusOne, d, c)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn param(&self) -> u32 {
        self.param
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    /// 2^(m−1) − 1 or 2^(d−1).
    pub fn genus(&self) -> usize {
        match self.family {
            Family::PowTwo => (1usize << (self.param - 1)) - 1,
            Family::TwoPowPlusOne => 1usize << (self.param - 1),
        }
    }

    /// Order of the roots of unity generating the CM field: 2^m or 2^(d+1).
    pub fn root_order(&self) -> u64 {
        match self.family {
            Family::PowTwo => 1u64 << self.param,
            Family::TwoPowPlusOne => 1u64 << (self.param + 1),
        }
    }

    pub fn polynomial(&self) -> Poly {
        let terms: Vec<(usize, i64)> = match self.family {
            Family::PowTwo => vec![(1usize << self.param, 1), (0, -self.c)],
            Family::TwoPowPlusOne => vec![((1usize << self.param) + 1, 1), (1, -self.c)],
        };
        Poly::from_terms(&terms).expect("family polynomials are nonzero")
    }

    /// Points at infinity on the smooth model: one for odd degree, two for
    /// even degree with square leading coefficient.
    pub fn points_at_infinity(&self) -> u64 {
        match self.family {
            Family::PowTwo => 2,
            Family::TwoPowPlusOne => 1,
        }
    }

    pub fn is_good_prime(&self, p: u64) -> bool {
        p != 2 && is_prime(p) && !self.c.unsigned_abs().is_multiple_of(p)
    }

    /// Isogeny factors y² = x^(2^d+1) − cx; a curve of the second family is its own factor.
    pub fn factors(&self) -> Vec<CurveSpec> {
        match self.family {
            Family::PowTwo => (1..self.param)
                .map(|d| CurveSpec { family: Family::TwoPowPlusOne, param: d, c: self.c })
                .collect(),
            Family::TwoPowPlusOne => vec![*self],
        }
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.c < 0 { '+' } else { '-' };
        let a = self.c.unsigned_abs();
        match self.family {
            Family::PowTwo => write!(f, "y^2 = x^{} {sign} {a}", 1u64 << self.param),
            Family::TwoPowPlusOne if a == 1 => write!(f, "y^2 = x^{} {sign} x", (1u64 << self.param) + 1),
            Family::TwoPowPlusOne => write!(f, "y^2 = x^{} {sign} {a}x", (1u64 << self.param) + 1),
        }
    }
}

/// Frobenius trace at one good prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub spec: CurveSpec,
    pub p: u64,
    pub t: i64,
}

impl TraceRecord {
    /// t/√p
    pub fn a1(&self) -> f64 {
        self.t as f64 / (self.p as f64).sqrt()
    }
}

/// How a trace is obtained for the first family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TraceMethod {
    /// Count points on the curve itself.
    #[default]
    Direct,
    /// Sum the traces of the isogeny factors.
    FactorSum,
}

fn bad_prime(spec: &CurveSpec, p: u64) -> Error {
    Error::BadPrime { p, curve: spec.to_string() }
}

fn trace_with(spec: &CurveSpec, table: &SquareTable) -> i64 {
    let p = table.prime();
    let count = affine_count_with(&spec.polynomial(), table) + spec.points_at_infinity();
    let t = p as i64 + 1 - count as i64;
    let weil = 2 * spec.genus() as i64 * (2.0 * (p as f64).sqrt()).ceil() as i64;
    assert!(t.abs() <= weil, "trace {t} of {spec} at p={p} violates the Weil bound");
    t
}

/// t = p + 1 − #C(F_p).
pub fn frobenius_trace(spec: &CurveSpec, p: u64) -> Result<i64> {
    if !spec.is_good_prime(p) {
        return Err(bad_prime(spec, p));
    }
    Ok(trace_with(spec, &SquareTable::new(p)?))
}

/// Trace computed with the chosen method; one square table serves every factor.
pub fn frobenius_trace_by(spec: &CurveSpec, p: u64, method: TraceMethod) -> Result<i64> {
    if !spec.is_good_prime(p) {
        return Err(bad_prime(spec, p));
    }
    let table = SquareTable::new(p)?;
    Ok(match method {
        TraceMethod::Direct => trace_with(spec, &table),
        TraceMethod::FactorSum => spec.factors().iter().map(|f| trace_with(f, &table)).sum(),
    })
}

pub fn normalized_a1(spec: &CurveSpec, p: u64) -> Result<f64> {
    Ok(frobenius_trace(spec, p)? as f64 / (p as f64).sqrt())
}

/// The d-values of the factors Jac(y² = x^(2^d+1) − cx) of Jac(y² = x^(2^m) − c).
pub fn decompose_factors(m: u32) -> Result<Vec<u32>> {
    if m < 2 {
        return Err(Error::InvalidCurve(format!("m must be at least 2, got {m}")));
    }
    Ok((1..m).collect())
}

/// Traces for every good prime in `primes`, computed in parallel and
/// returned in the order of `primes`.
pub fn sweep_traces(spec: &CurveSpec, primes: &[u64], method: TraceMethod) -> Result<Vec<TraceRecord>> {
    primes
        .par_iter()
        .filter(|&&p| spec.is_good_prime(p))
        .map(|&p| Ok(TraceRecord { spec: *spec, p, t: frobenius_trace_by(spec, p, method)? }))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdditivityViolation {
    pub p: u64,
    pub direct: i64,
    pub factor_sum: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdditivityReport {
    pub m: u32,
    pub c: i64,
    pub pmax: u64,
    pub primes_checked: usize,
    pub violations: Vec<AdditivityViolation>,
}

impl AdditivityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares t(y² = x^(2^m) − c) against Σ_d t(y² = x^(2^d+1) − cx) at every
/// good prime up to `pmax`.
pub fn verify_trace_additivity(m: u32, c: i64, pmax: u64) -> Result<AdditivityReport> {
    let spec = CurveSpec::pow_two(m, c)?;
    let primes = crate::arith::sieve_primes(pmax);
    let good: Vec<u64> = primes.iter().filter(|&p| spec.is_good_prime(p)).collect();
    let rows: Vec<AdditivityViolation> = good
        .par_iter()
        .map(|&p| {
            let table = SquareTable::new(p)?;
            let direct = trace_with(&spec, &table);
            let factor_sum = spec.factors().iter().map(|f| trace_with(f, &table)).sum();
            Ok(AdditivityViolation { p, direct, factor_sum })
        })
        .collect::<Result<_>>()?;
    Ok(AdditivityReport {
        m,
        c,
        pmax,
        primes_checked: rows.len(),
        violations: rows.into_iter().filter(|r| r.direct != r.factor_sum).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_trace(spec: &CurveSpec, p: u64) -> i64 {
        let f = spec.polynomial();
        let mut affine = 0i64;
        for x in 0..p {
            let fx = f.eval_mod(x, p);
            affine += (0..p).filter(|y| y * y % p == fx).count() as i64;
        }
        p as i64 + 1 - (affine + spec.points_at_infinity() as i64)
    }

    #[test]
    fn genus_values() {
        assert_eq!(CurveSpec::pow_two(4, 1).unwrap().genus(), 7);
        assert_eq!(CurveSpec::two_pow_plus_one(3, 1).unwrap().genus(), 4);
        assert_eq!(CurveSpec::two_pow_plus_one(1, 1).unwrap().genus(), 1);
        assert_eq!(CurveSpec::pow_two(2, 1).unwrap().genus(), 1);
    }

    #[test]
    fn invalid_specs() {
        assert!(CurveSpec::pow_two(1, 1).is_err());
        assert!(CurveSpec::two_pow_plus_one(0, 1).is_err());
        assert!(CurveSpec::two_pow_plus_one(3, 0).is_err());
    }

    #[test]
    fn good_primes() {
        let spec = CurveSpec::two_pow_plus_one(3, 3).unwrap();
        assert!(!spec.is_good_prime(3));
        assert!(!spec.is_good_prime(2));
        assert!(spec.is_good_prime(5));
        assert!(!spec.is_good_prime(9));
        assert!(!CurveSpec::two_pow_plus_one(3, -10).unwrap().is_good_prime(5));
    }

    #[test]
    fn trace_examples() {
        let e = CurveSpec::two_pow_plus_one(1, 1).unwrap();
        assert_eq!(frobenius_trace(&e, 5).unwrap(), -2);
        assert_eq!(frobenius_trace(&e, 7).unwrap(), 0);
        let c16 = CurveSpec::pow_two(4, 1).unwrap();
        assert_eq!(frobenius_trace(&c16, 7).unwrap(), 0);
        assert!(matches!(frobenius_trace(&e, 2), Err(Error::BadPrime { .. })));
    }

    #[test]
    fn traces_match_brute_force() {
        for spec in [
            CurveSpec::two_pow_plus_one(1, 1).unwrap(),
            CurveSpec::two_pow_plus_one(2, -3).unwrap(),
            CurveSpec::two_pow_plus_one(3, 5).unwrap(),
            CurveSpec::pow_two(3, 2).unwrap(),
            CurveSpec::pow_two(4, -1).unwrap(),
        ] {
            for p in crate::arith::sieve_primes(60).iter().filter(|&p| spec.is_good_prime(p)) {
                assert_eq!(frobenius_trace(&spec, p).unwrap(), brute_trace(&spec, p), "{spec} p={p}");
            }
        }
    }

    #[test]
    fn normalized_trace() {
        let e = CurveSpec::two_pow_plus_one(1, 1).unwrap();
        assert!((normalized_a1(&e, 5).unwrap() + 2.0 / 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(normalized_a1(&e, 7).unwrap(), 0.0);
    }

    #[test]
    fn a1_within_weil_bound() {
        for spec in [CurveSpec::two_pow_plus_one(3, 7).unwrap(), CurveSpec::pow_two(4, 3).unwrap()] {
            let primes = crate::arith::sieve_primes(2000);
            for r in sweep_traces(&spec, primes.as_slice(), TraceMethod::Direct).unwrap() {
                assert!(r.a1().abs() <= 2.0 * spec.genus() as f64, "{spec} p={}", r.p);
            }
        }
    }

    #[test]
    fn elliptic_factor_is_supersingular_at_3_mod_4() {
        let e = CurveSpec::two_pow_plus_one(1, 1).unwrap();
        for p in crate::arith::sieve_primes(200).iter().filter(|p| p % 4 == 3) {
            assert_eq!(frobenius_trace(&e, p).unwrap(), 0, "p={p}");
        }
    }

    #[test]
    fn decomposition() {
        assert_eq!(decompose_factors(4).unwrap(), vec![1, 2, 3]);
        assert_eq!(decompose_factors(5).unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(decompose_factors(2).unwrap(), vec![1]);
        assert!(decompose_factors(1).is_err());
    }

    #[test]
    fn additivity_small_cases() {
        assert!(verify_trace_additivity(4, 1, 100).unwrap().holds());
        let r = verify_trace_additivity(2, 3, 50).unwrap();
        assert!(r.holds());
        assert!(r.primes_checked > 0);
        let c16 = CurveSpec::pow_two(4, 1).unwrap();
        let parts: Vec<i64> = c16.factors().iter().map(|f| frobenius_trace(f, 7).unwrap()).collect();
        assert_eq!(parts, vec![0, 0, 0]);
    }

    #[test]
    fn sweep_is_sorted_and_skips_bad_primes() {
        let spec = CurveSpec::two_pow_plus_one(2, 15).unwrap();
        let primes = crate::arith::sieve_primes(300);
        let recs = sweep_traces(&spec, primes.as_slice(), TraceMethod::Direct).unwrap();
        assert!(recs.windows(2).all(|w| w[0].p < w[1].p));
        assert!(recs.iter().all(|r| r.p != 2 && r.p != 3 && r.p != 5));
    }

    #[test]
    fn family_names_round_trip() {
        for f in [Family::PowTwo, Family::TwoPowPlusOne] {
            assert_eq!(f.as_str().parse::<Family>().unwrap(), f);
        }
        assert!("x".parse::<Family>().is_err());
    }

    #[test]
    fn display() {
        assert_eq!(CurveSpec::pow_two(4, 3).unwrap().to_string(), "y^2 = x^16 - 3");
        assert_eq!(CurveSpec::two_pow_plus_one(3, -2).unwrap().to_string(), "y^2 = x^9 + 2x");
    }
}
