//! The endomorphisms α (x ↦ ζx) and β (x ↦ c^(1/2g)/x) acting on the
//! differentials, in the basis where ST⁰ is a diagonal torus.

use num_rational::Ratio;

use super::galois::GaloisElt;
use super::matrix::MonoMatrix;
use super::mono::{CycMono, RootOfUnity};
use crate::curves::{CurveSpec, Family};
use crate::error::{Error, Result};

/// Whether c stays formal or is specialized to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Twist {
    #[default]
    Formal,
    Untwisted,
}

fn check_d(d: u32) -> Result<()> {
    if !(1..=20).contains(&d) {
        return Err(Error::InvalidCurve(format!("d must be in 1..=20, got {d}")));
    }
    Ok(())
}

fn check_m(m: u32) -> Result<()> {
    if !(2..=20).contains(&m) {
        return Err(Error::InvalidCurve(format!("m must be in 2..=20, got {m}")));
    }
    Ok(())
}

/// diag(Z, Z³, …, Z^(2g−1)) with Z = diag(ζ, ζ̄), ζ = ζ_{2^(d+1)}.
pub fn alpha_matrix(d: u32) -> Result<MonoMatrix> {
    check_d(d)?;
    let g = 1i64 << (d - 1);
    let n = 1u64 << (d + 1);
    let diag = (0..g)
        .flat_map(|j| [2 * j + 1, -(2 * j + 1)])
        .map(|e| CycMono::zeta(e, n))
        .collect::<Result<_>>()?;
    Ok(MonoMatrix::diagonal(diag))
}

/// Block (j, g−1−j) equals (−1)^j·c^(δ_j)·I₂ with δ_j = (2j − g + 1)/2^d.
pub fn beta_matrix(d: u32, twist: Twist) -> Result<MonoMatrix> {
    check_d(d)?;
    let g = 1usize << (d - 1);
    let mut m = MonoMatrix::zeros(2 * g);
    for j in 0..g {
        let sign = if j % 2 == 0 { RootOfUnity::ONE } else { RootOfUnity::MINUS_ONE };
        let delta = match twist {
            Twist::Formal => Ratio::new(2 * j as i64 - g as i64 + 1, 1i64 << d),
            Twist::Untwisted => Ratio::from_integer(0),
        };
        let entry = CycMono::new(sign, delta)?;
        let k = g - 1 - j;
        m.set(2 * j, 2 * k, entry)?;
        m.set(2 * j + 1, 2 * k + 1, entry)?;
    }
    Ok(m)
}

/// diag(α_1, …, α_{m−1}).
pub fn big_alpha(m: u32) -> Result<MonoMatrix> {
    check_m(m)?;
    let parts = (1..m).map(alpha_matrix).collect::<Result<Vec<_>>>()?;
    Ok(MonoMatrix::block_diag(&parts))
}

/// Z·diag(β_1, …, β_{m−1}) with Z = diag(i, −i, …, i, −i).
pub fn big_beta(m: u32, twist: Twist) -> Result<MonoMatrix> {
    check_m(m)?;
    let parts = (1..m).map(|d| beta_matrix(d, twist)).collect::<Result<Vec<_>>>()?;
    let inner = MonoMatrix::block_diag(&parts);
    let z = MonoMatrix::diagonal(
        (0..inner.size())
            .map(|r| CycMono::zeta(if r % 2 == 0 { 1 } else { -1 }, 4))
            .collect::<Result<_>>()?,
    );
    z.mul(&inner)
}

/// The generating endomorphisms of a Jacobian.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endomorphisms {
    pub alpha: MonoMatrix,
    pub beta: MonoMatrix,
}

impl Endomorphisms {
    pub fn for_spec(spec: &CurveSpec, twist: Twist) -> Result<Self> {
        Ok(match spec.family() {
            Family::TwoPowPlusOne => Self {
                alpha: alpha_matrix(spec.param())?,
                beta: beta_matrix(spec.param(), twist)?,
            },
            Family::PowTwo => Self {
                alpha: big_alpha(spec.param())?,
                beta: big_beta(spec.param(), twist)?,
            },
        })
    }
}

/// Relation γ·E·γ⁻¹ = ^σE for a single endomorphism E.
pub fn conjugation_relation_holds(gamma: &MonoMatrix, sigma: &GaloisElt, e: &MonoMatrix) -> Result<bool> {
    let inv = gamma.inverse()?;
    Ok(gamma.mul(e)?.mul(&inv)? == sigma.act(e)?)
}

/// True iff γαγ⁻¹ = ^σα and γβγ⁻¹ = ^σβ exactly.
pub fn verify_twisted_lefschetz(gamma: &MonoMatrix, sigma: &GaloisElt, endo: &Endomorphisms) -> Result<bool> {
    Ok(conjugation_relation_holds(gamma, sigma, &endo.alpha)?
        && conjugation_relation_holds(gamma, sigma, &endo.beta)?)
}
