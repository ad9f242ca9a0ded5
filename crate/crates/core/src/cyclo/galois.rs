use std::fmt;

use num_rational::Ratio;

use super::matrix::MonoMatrix;
use super::mono::{CycMono, RootOfUnity};
use crate::error::{Error, Result};

/// Automorphisms of Q(ζ_N, c^(1/2g)) acting entrywise on matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GaloisElt {
    /// ζ ↦ ζ^a on Q(ζ_N), fixing c.
    Sigma { a: i64, order: u64 },
    /// The `power`-th power of τ, which fixes ζ and sends c^q ↦ e^{2πi·q}·c^q
    /// on the first coordinate of each 2×2 block. The second coordinate of a
    /// block is the complex conjugate slot and receives the inverse phase.
    Tau { power: i64 },
}

impl GaloisElt {
    pub fn sigma(a: i64, order: u64) -> Result<Self> {
        if order == 0 || !order.is_power_of_two() {
            return Err(Error::InvalidRootOrder(order));
        }
        if a.rem_euclid(2) == 0 {
            return Err(Error::InvalidArgument(format!("σ_a needs odd a, got {a}")));
        }
        Ok(GaloisElt::Sigma { a: a.rem_euclid(order.max(2) as i64), order })
    }

    pub fn tau(power: i64) -> Self {
        GaloisElt::Tau { power }
    }

    /// Image of an entry sitting in row `row`.
    pub fn act_on(&self, m: &CycMono, row: usize) -> Result<CycMono> {
        match *self {
            GaloisElt::Sigma { a, order } => {
                let root = m.root();
                if order % root.order() != 0 {
                    return Err(Error::InvalidRootOrder(root.order()));
                }
                Ok(m.with_root(root.pow(a)))
            }
            GaloisElt::Tau { power } => {
                let sign = if row.is_multiple_of(2) { 1 } else { -1 };
                let phase = RootOfUnity::from_turn(m.c_pow() * Ratio::from_integer(sign * power))?;
                Ok(m.with_root(m.root() * phase))
            }
        }
    }

    pub fn act(&self, m: &MonoMatrix) -> Result<MonoMatrix> {
        m.try_map(|row, x| self.act_on(x, row))
    }
}

impl fmt::Display for GaloisElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GaloisElt::Sigma { a, order } => {
                let signed = if a > order as i64 / 2 { a - order as i64 } else { a };
                write!(f, "sigma_{signed}")
            }
            GaloisElt::Tau { power: 1 } => f.write_str("tau"),
            GaloisElt::Tau { power } => write!(f, "tau^{power}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(e: i64, n: u64) -> CycMono {
        CycMono::zeta(e, n).unwrap()
    }

    #[test]
    fn sigma_five_on_zeta() {
        let s = GaloisElt::sigma(5, 16).unwrap();
        assert_eq!(s.act_on(&z(1, 16), 0).unwrap(), z(5, 16));
    }

    #[test]
    fn sigma_minus_one_conjugates() {
        let zd = MonoMatrix::diagonal(vec![z(1, 16), z(-1, 16)]);
        let s = GaloisElt::sigma(-1, 16).unwrap();
        assert_eq!(s.act(&zd).unwrap(), zd.conj());
    }

    #[test]
    fn sigma_rejects_larger_roots() {
        let s = GaloisElt::sigma(5, 8).unwrap();
        assert!(s.act_on(&z(1, 16), 0).is_err());
        assert!(GaloisElt::sigma(2, 8).is_err());
    }

    #[test]
    fn tau_on_c_power_blocks() {
        // c^δ I₂ with δ = (2j − g + 1)/2^d; d = 3, g = 4, j = 0 gives δ = −3/8.
        let q = Ratio::new(-3, 8);
        let d = CycMono::new(RootOfUnity::ONE, q).unwrap();
        let blk = MonoMatrix::diagonal(vec![d, d]);
        let image = GaloisElt::tau(1).act(&blk).unwrap();
        let zeta16 = |e| CycMono::new(RootOfUnity::new(e, 16).unwrap(), q).unwrap();
        // ζ^{2(2j−g+1)} = ζ_16^{−6} on the first slot, its conjugate on the second.
        assert_eq!(image, MonoMatrix::diagonal(vec![zeta16(-6), zeta16(6)]));
    }

    #[test]
    fn tau_fixes_roots() {
        assert_eq!(GaloisElt::tau(3).act_on(&z(5, 32), 0).unwrap(), z(5, 32));
    }

    fn arb_mono() -> impl Strategy<Value = CycMono> {
        (0i64..32, -8i64..8, 0u32..4).prop_map(|(e, qn, qd)| {
            CycMono::new(RootOfUnity::new(e, 32).unwrap(), Ratio::new(qn, 1 << qd)).unwrap()
        })
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = MonoMatrix> {
        (Just((0..n).collect::<Vec<usize>>()).prop_shuffle(), prop::collection::vec(arb_mono(), n)).prop_map(
            move |(perm, vals)| {
                MonoMatrix::from_entries(n, perm.into_iter().enumerate().zip(vals)).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn sigma_is_multiplicative_on_monomial_matrices(
            a in arb_matrix(6),
            b in arb_matrix(6),
            k in 0i64..16,
        ) {
            let s = GaloisElt::sigma(2 * k + 1, 32).unwrap();
            let lhs = s.act(&a.mul(&b).unwrap()).unwrap();
            let rhs = s.act(&a).unwrap().mul(&s.act(&b).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
