use std::fmt;
use std::ops::{Mul, Neg};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// ζ_N^e with N a power of two, kept in lowest terms (e odd or e = 0, N = 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity {
    exp: u64,
    order: u64,
}

impl RootOfUnity {
    pub const ONE: Self = Self { exp: 0, order: 1 };
    pub const MINUS_ONE: Self = Self { exp: 1, order: 2 };

    pub fn new(exp: i64, order: u64) -> Result<Self> {
        if order == 0 || !order.is_power_of_two() {
            return Err(Error::InvalidRootOrder(order));
        }
        Ok(Self::reduced(exp.rem_euclid(order as i64) as u64, order))
    }

    /// ζ_N = exp(2πi/N).
    pub fn primitive(order: u64) -> Result<Self> {
        Self::new(1, order)
    }

    fn reduced(exp: u64, order: u64) -> Self {
        let exp = exp % order;
        if exp == 0 {
            return Self::ONE;
        }
        let shift = exp.trailing_zeros().min(order.trailing_zeros());
        Self { exp: exp >> shift, order: order >> shift }
    }

    pub fn exp(&self) -> u64 {
        self.exp
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Exponent of this root written as a power of ζ_n; needs `order | n`.
    pub fn exp_in(&self, n: u64) -> Result<u64> {
        if n == 0 || !n.is_power_of_two() || !n.is_multiple_of(self.order) {
            return Err(Error::InvalidRootOrder(n));
        }
        Ok(self.exp * (n / self.order))
    }

    pub fn pow(&self, k: i64) -> Self {
        let e = (self.exp as i128 * k as i128).rem_euclid(self.order as i128) as u64;
        Self::reduced(e, self.order)
    }

    pub fn conj(&self) -> Self {
        Self::reduced(self.order - self.exp, self.order)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, std::f64::consts::TAU * self.exp as f64 / self.order as f64)
    }

    /// e^{2πi·t} for a rational t with power-of-two denominator.
    pub fn from_turn(t: Ratio<i64>) -> Result<Self> {
        let den = *t.denom() as u64;
        Self::new(*t.numer(), den)
    }

    /// e/N as a rational in [0, 1).
    pub fn turn(&self) -> Ratio<i64> {
        Ratio::new(self.exp as i64, self.order as i64)
    }
}

impl Mul for RootOfUnity {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let n = self.order.max(rhs.order);
        Self::reduced(self.exp * (n / self.order) + rhs.exp * (n / rhs.order), n)
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.exp, self.order) {
            (0, _) => f.write_str("1"),
            (1, 2) => f.write_str("-1"),
            (e, n) => write!(f, "z{n}^{e}"),
        }
    }
}

/// A monomial ζ_N^e · c^q with c a formal positive real and q rational.
/// Signs live in the root of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycMono {
    root: RootOfUnity,
    c_pow: Ratio<i64>,
}

impl CycMono {
    pub const ONE: Self = Self { root: RootOfUnity::ONE, c_pow: Ratio::new_raw(0, 1) };

    pub fn new(root: RootOfUnity, c_pow: Ratio<i64>) -> Result<Self> {
        if !(*c_pow.denom() as u64).is_power_of_two() {
            return Err(Error::InvalidArgument(format!("c-exponent {c_pow} needs a power-of-two denominator")));
        }
        Ok(Self { root, c_pow })
    }

    pub fn root_only(root: RootOfUnity) -> Self {
        Self { root, c_pow: Ratio::zero() }
    }

    /// ζ_N^e
    pub fn zeta(exp: i64, order: u64) -> Result<Self> {
        Ok(Self::root_only(RootOfUnity::new(exp, order)?))
    }

    pub fn minus_one() -> Self {
        Self::root_only(RootOfUnity::MINUS_ONE)
    }

    pub fn root(&self) -> RootOfUnity {
        self.root
    }

    pub fn c_pow(&self) -> Ratio<i64> {
        self.c_pow
    }

    pub fn is_c_free(&self) -> bool {
        self.c_pow.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.root == RootOfUnity::ONE && self.c_pow.is_zero()
    }

    pub fn with_root(&self, root: RootOfUnity) -> Self {
        Self { root, c_pow: self.c_pow }
    }

    /// Same root, c-exponent dropped (the value at c = 1).
    pub fn clear_c(&self) -> Self {
        Self::root_only(self.root)
    }

    /// Complex conjugate: c is real, so only the root flips.
    pub fn conj(&self) -> Self {
        Self { root: self.root.conj(), c_pow: self.c_pow }
    }

    pub fn inv(&self) -> Self {
        Self { root: self.root.conj(), c_pow: -self.c_pow }
    }

    /// True iff `self + other = 0`.
    pub fn cancels(&self, other: &Self) -> bool {
        self.c_pow == other.c_pow && self.root * RootOfUnity::MINUS_ONE == other.root
    }

    /// ζ_N ↦ exp(2πi/N), c^q ↦ the positive real root.
    pub fn eval(&self, c: f64) -> Result<Complex64> {
        if c.is_nan() || c <= 0.0 {
            return Err(Error::NonPositiveTwist(c));
        }
        let q = *self.c_pow.numer() as f64 / *self.c_pow.denom() as f64;
        Ok(self.root.to_complex() * c.powf(q))
    }
}

impl Mul for CycMono {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Self { root: self.root * rhs.root, c_pow: self.c_pow + rhs.c_pow }
    }
}

impl Neg for CycMono {
    type Output = Self;

    fn neg(self) -> Self {
        Self { root: self.root * RootOfUnity::MINUS_ONE, c_pow: self.c_pow }
    }
}

impl One for CycMono {
    fn one() -> Self {
        Self::ONE
    }
}

impl fmt::Display for CycMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c_pow.is_zero() {
            write!(f, "{}", self.root)
        } else if self.root == RootOfUnity::ONE {
            write!(f, "c^({})", self.c_pow)
        } else {
            write!(f, "{}*c^({})", self.root, self.c_pow)
        }
    }
}

/// Lowest common power-of-two order of a set of roots.
pub(crate) fn common_order<'a>(roots: impl IntoIterator<Item = &'a RootOfUnity>) -> u64 {
    roots.into_iter().fold(1u64, |n, r| n.lcm(&r.order()))
}
