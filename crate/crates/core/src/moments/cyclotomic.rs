use std::fmt;

use crate::cyclo::RootOfUnity;
use crate::error::{Error, Result};

/// Element of Z[ζ_N] for N a power of two, in the basis 1, ζ, …, ζ^(N/2−1)
/// (so ζ^(N/2) = −1). Arithmetic is checked and fails with [`Error::Overflow`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclotomicInt {
    order: u64,
    coeffs: Vec<i128>,
}

impl CyclotomicInt {
    pub fn zero(order: u64) -> Result<Self> {
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::InvalidRootOrder(order));
        }
        Ok(Self { order, coeffs: vec![0; (order / 2) as usize] })
    }

    pub fn from_integer(order: u64, n: i128) -> Result<Self> {
        let mut z = Self::zero(order)?;
        z.coeffs[0] = n;
        Ok(z)
    }

    pub fn from_root(order: u64, root: RootOfUnity) -> Result<Self> {
        let mut z = Self::zero(order)?;
        z.add_root(root, 1)?;
        Ok(z)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Adds k·root in place.
    pub fn add_root(&mut self, root: RootOfUnity, k: i128) -> Result<()> {
        let e = root.exp_in(self.order)?;
        let half = self.order / 2;
        let (slot, sign) = if e >= half { (e - half, -1) } else { (e, 1) };
        let c = &mut self.coeffs[slot as usize];
        *c = c.checked_add(sign * k).ok_or(Error::Overflow)?;
        Ok(())
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::InvalidRootOrder(other.order));
        }
        Ok(())
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.check_order(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = a.checked_add(*b).ok_or(Error::Overflow)?;
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let h = self.coeffs.len();
        let mut out = vec![0i128; h];
        for (i, &a) in self.coeffs.iter().enumerate().filter(|(_, a)| **a != 0) {
            for (j, &b) in other.coeffs.iter().enumerate().filter(|(_, b)| **b != 0) {
                let p = a.checked_mul(b).ok_or(Error::Overflow)?;
                let (k, p) = if i + j >= h { (i + j - h, -p) } else { (i + j, p) };
                out[k] = out[k].checked_add(p).ok_or(Error::Overflow)?;
            }
        }
        Ok(Self { order: self.order, coeffs: out })
    }

    /// The integer value, if every non-constant coordinate vanishes.
    pub fn as_integer(&self) -> Option<i128> {
        self.coeffs[1..].iter().all(|&c| c == 0).then_some(self.coeffs[0])
    }

    pub fn to_complex(&self) -> num_complex::Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| RootOfUnity::new(k as i64, self.order).unwrap().to_complex() * c as f64)
            .sum()
    }
}

impl fmt::Display for CyclotomicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(k, c)| if k == 0 { c.to_string() } else { format!("{c}*z{}^{k}", self.order) })
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}
