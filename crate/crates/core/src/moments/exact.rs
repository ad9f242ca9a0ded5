//! Exact Haar moments of a₁ = tr(g) over ST.
//!
//! On a coset T·γ the trace is a Laurent polynomial in the torus variables
//! u_k = e^{iθ_k}, and integrating over the torus keeps its constant term.

use std::collections::HashMap;

use num_rational::Ratio;
use rayon::prelude::*;

use super::cyclotomic::CyclotomicInt;
use crate::curves::CurveSpec;
use crate::cyclo::{MonoMatrix, RootOfUnity};
use crate::error::{Error, Result};
use crate::stgroup::{CosetList, SatoTateGroup, TorusDescriptor};

/// Largest supported moment order.
pub const MAX_ORDER: u32 = 12;

type Exponent = Vec<i8>;

/// Σ coef·u^e over exponent vectors e ∈ Z^r with coefficients in Z[ζ_N].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceLaurent {
    num_angles: usize,
    order: u64,
    terms: HashMap<Exponent, CyclotomicInt>,
}

impl TraceLaurent {
    pub fn zero(num_angles: usize, order: u64) -> Result<Self> {
        CyclotomicInt::zero(order)?;
        Ok(Self { num_angles, order, terms: HashMap::new() })
    }

    /// Adds k·root·u^exp.
    pub fn add_term(&mut self, exp: &[i8], root: RootOfUnity, k: i128) -> Result<()> {
        if exp.len() != self.num_angles {
            return Err(Error::SizeMismatch(exp.len(), self.num_angles));
        }
        let slot = match self.terms.get_mut(exp) {
            Some(s) => s,
            None => self.terms.entry(exp.to_vec()).or_insert(CyclotomicInt::zero(self.order)?),
        };
        slot.add_root(root, k)?;
        if slot.is_zero() {
            self.terms.remove(exp);
        }
        Ok(())
    }

    pub fn num_angles(&self) -> usize {
        self.num_angles
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exp: &[i8]) -> Option<&CyclotomicInt> {
        self.terms.get(exp)
    }

    /// Constant terms of P⁰, P¹, …, P^n_max.
    pub fn constant_terms(&self, n_max: u32) -> Result<Vec<CyclotomicInt>> {
        let origin: Exponent = vec![0; self.num_angles];
        let mut out = vec![CyclotomicInt::from_integer(self.order, 1)?];
        let mut cur: HashMap<Exponent, CyclotomicInt> = HashMap::new();
        cur.insert(origin.clone(), CyclotomicInt::from_integer(self.order, 1)?);
        let terms: Vec<(&Exponent, &CyclotomicInt)> = self.terms.iter().collect();
        for step in 1..=n_max {
            // Each factor moves the L1 norm by at most one, so anything farther
            // than the remaining steps cannot come back to the origin.
            let budget = (n_max - step) as i32;
            let mut next: HashMap<Exponent, CyclotomicInt> = HashMap::new();
            for (x, cx) in &cur {
                for (y, cy) in &terms {
                    let z: Exponent = x.iter().zip(y.iter()).map(|(a, b)| a + b).collect();
                    if z.iter().map(|v| (*v as i32).abs()).sum::<i32>() > budget {
                        continue;
                    }
                    let prod = cx.mul(cy)?;
                    match next.get_mut(&z) {
                        Some(acc) => acc.add_assign(&prod)?,
                        None => {
                            next.insert(z, prod);
                        }
                    }
                }
            }
            next.retain(|_, v| !v.is_zero());
            out.push(match next.get(&origin) {
                Some(v) => v.clone(),
                None => CyclotomicInt::zero(self.order)?,
            });
            cur = next;
        }
        Ok(out)
    }
}

/// tr(T(θ)·γ) as a Laurent polynomial: only diagonal entries contribute, the
/// first slot of block i with u_k and the second with u_k⁻¹.
pub fn trace_laurent(coset: &MonoMatrix, desc: &TorusDescriptor, order: u64) -> Result<TraceLaurent> {
    if coset.size() != 2 * desc.g() {
        return Err(Error::SizeMismatch(coset.size(), 2 * desc.g()));
    }
    let mut p = TraceLaurent::zero(desc.num_angles(), order)?;
    for (i, &a) in desc.angle_of_block().iter().enumerate() {
        for (slot, sign) in [(2 * i, 1i8), (2 * i + 1, -1i8)] {
            if let Some(m) = coset.get(slot, slot) {
                if !m.is_c_free() {
                    return Err(Error::TwistedEntry(format!("({slot}, {slot}) = {m}")));
                }
                let mut exp = vec![0i8; desc.num_angles()];
                exp[a] = sign;
                p.add_term(&exp, m.root(), 1)?;
            }
        }
    }
    Ok(p)
}

/// Constant term of P^n.
pub fn exact_moment(p: &TraceLaurent, n: u32) -> Result<CyclotomicInt> {
    Ok(p.constant_terms(n)?.pop().expect("at least P⁰"))
}

/// Exact moments M_0 … M_n_max of a₁ under the Haar measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMoments {
    pub cosets: usize,
    values: Vec<Ratio<i128>>,
}

impl ExactMoments {
    pub fn n_max(&self) -> u32 {
        (self.values.len() - 1) as u32
    }

    /// M_n for 0 ≤ n ≤ n_max.
    pub fn moment(&self, n: u32) -> Ratio<i128> {
        self.values[n as usize]
    }

    /// M_1 … M_n_max.
    pub fn values(&self) -> &[Ratio<i128>] {
        &self.values[1..]
    }
}

fn check_n_max(n_max: u32) -> Result<()> {
    if n_max > MAX_ORDER {
        return Err(Error::InvalidArgument(format!("moment order {n_max} exceeds {MAX_ORDER}")));
    }
    Ok(())
}

/// Average of the per-coset constant terms; fails unless every average is rational.
pub fn coset_average_moments(cosets: &CosetList, n_max: u32) -> Result<ExactMoments> {
    check_n_max(n_max)?;
    let order = cosets.representatives.iter().map(MonoMatrix::root_order).max().unwrap_or(1).max(4);
    let sums = cosets
        .representatives
        .par_iter()
        .map(|g| trace_laurent(g, &cosets.descriptor, order)?.constant_terms(n_max))
        .try_reduce(
            || (0..=n_max).map(|_| CyclotomicInt::zero(order).unwrap()).collect(),
            |mut acc, part| {
                for (a, b) in acc.iter_mut().zip(&part) {
                    a.add_assign(b)?;
                }
                Ok(acc)
            },
        )?;
    let count = cosets.len() as i128;
    let values = sums
        .iter()
        .enumerate()
        .map(|(n, s)| s.as_integer().map(|v| Ratio::new(v, count)).ok_or(Error::NonRational(n as u32)))
        .collect::<Result<_>>()?;
    Ok(ExactMoments { cosets: cosets.len(), values })
}

/// M_n[μ₁] = (1/|cosets|)·Σ_cosets constant term of tr(T·γ)^n, for n ≤ n_max ≤ 12.
pub fn group_exact_moments(spec: &CurveSpec, n_max: u32) -> Result<ExactMoments> {
    check_n_max(n_max)?;
    let group = SatoTateGroup::new(spec)?;
    coset_average_moments(&group.cosets, n_max)
}

/// Reference measures on the trace of U(1) and U(1)_2 = diag(u, ū, u, ū).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum U1Variant {
    U1,
    U1Squared,
}

fn binomial(n: u32, k: u32) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// binom(n, n/2) or 2^n·binom(n, n/2); zero for odd n.
pub fn reference_u1_moments(n: u32, variant: U1Variant) -> u128 {
    if n % 2 == 1 {
        return 0;
    }
    let b = binomial(n, n / 2);
    match variant {
        U1Variant::U1 => b,
        U1Variant::U1Squared => b << n,
    }
}
