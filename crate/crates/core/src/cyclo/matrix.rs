use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::mono::{common_order, CycMono, RootOfUnity};
use crate::error::{Error, Result};

/// Sparse square matrix with [`CycMono`] entries. Rows and columns are
/// grouped in consecutive pairs, so block (i, j) covers rows 2i, 2i+1 and
/// columns 2j, 2j+1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonoMatrix {
    size: usize,
    entries: BTreeMap<(usize, usize), CycMono>,
}

impl MonoMatrix {
    pub fn zeros(size: usize) -> Self {
        Self { size, entries: BTreeMap::new() }
    }

    pub fn identity(size: usize) -> Self {
        Self::diagonal((0..size).map(|_| CycMono::ONE).collect())
    }

    pub fn diagonal(diag: Vec<CycMono>) -> Self {
        let size = diag.len();
        Self { size, entries: diag.into_iter().enumerate().map(|(i, m)| ((i, i), m)).collect() }
    }

    pub fn from_entries(size: usize, entries: impl IntoIterator<Item = ((usize, usize), CycMono)>) -> Result<Self> {
        let mut out = Self::zeros(size);
        for ((r, c), m) in entries {
            out.set(r, c, m)?;
        }
        Ok(out)
    }

    pub fn set(&mut self, row: usize, col: usize, value: CycMono) -> Result<()> {
        if row >= self.size || col >= self.size {
            return Err(Error::InvalidArgument(format!(
                "entry ({row}, {col}) outside a {0}x{0} matrix",
                self.size
            )));
        }
        self.entries.insert((row, col), value);
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of 2×2 blocks along the diagonal.
    pub fn blocks(&self) -> usize {
        self.size / 2
    }

    pub fn get(&self, row: usize, col: usize) -> Option<&CycMono> {
        self.entries.get(&(row, col))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &CycMono)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    fn check_same_size(&self, other: &Self) -> Result<()> {
        if self.size != other.size {
            return Err(Error::SizeMismatch(self.size, other.size));
        }
        Ok(())
    }

    /// Exact product. Two monomials landing on the same entry must cancel,
    /// otherwise the result would leave the monomial world.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_same_size(rhs)?;
        let mut by_row: Vec<Vec<(usize, CycMono)>> = vec![Vec::new(); rhs.size];
        for (&(r, c), &m) in &rhs.entries {
            by_row[r].push((c, m));
        }
        let mut out: BTreeMap<(usize, usize), Option<CycMono>> = BTreeMap::new();
        for (&(r, k), &a) in &self.entries {
            for &(c, b) in &by_row[k] {
                let prod = a * b;
                match out.get_mut(&(r, c)) {
                    None => {
                        out.insert((r, c), Some(prod));
                    }
                    Some(slot @ Some(_)) if slot.unwrap().cancels(&prod) => *slot = None,
                    Some(_) => return Err(Error::NotMonomial { row: r, col: c }),
                }
            }
        }
        Ok(Self {
            size: self.size,
            entries: out.into_iter().filter_map(|(k, v)| v.map(|m| (k, m))).collect(),
        })
    }

    /// Inverse of a generalized permutation matrix (one entry per row and column).
    pub fn inverse(&self) -> Result<Self> {
        let mut rows = vec![false; self.size];
        let mut cols = vec![false; self.size];
        for &(r, c) in self.entries.keys() {
            if rows[r] || cols[c] {
                return Err(Error::Singular);
            }
            rows[r] = true;
            cols[c] = true;
        }
        if self.entries.len() != self.size {
            return Err(Error::Singular);
        }
        Ok(Self {
            size: self.size,
            entries: self.entries.iter().map(|(&(r, c), m)| ((c, r), m.inv())).collect(),
        })
    }

    pub fn transpose(&self) -> Self {
        Self { size: self.size, entries: self.entries.iter().map(|(&(r, c), &m)| ((c, r), m)).collect() }
    }

    pub fn conj(&self) -> Self {
        self.map(|_, m| m.conj())
    }

    pub fn conj_transpose(&self) -> Self {
        self.transpose().conj()
    }

    pub fn neg(&self) -> Self {
        self.map(|_, m| -*m)
    }

    /// Applies `f(row, entry)` to every stored entry.
    pub fn map(&self, f: impl Fn(usize, &CycMono) -> CycMono) -> Self {
        Self { size: self.size, entries: self.entries.iter().map(|(&(r, c), m)| ((r, c), f(r, m))).collect() }
    }

    pub(crate) fn try_map(&self, f: impl Fn(usize, &CycMono) -> Result<CycMono>) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|(&(r, c), m)| Ok(((r, c), f(r, m)?)))
            .collect::<Result<_>>()?;
        Ok(Self { size: self.size, entries })
    }

    /// Every c-exponent set to zero, i.e. the specialization c = 1.
    pub fn clear_c(&self) -> Self {
        self.map(|_, m| m.clear_c())
    }

    pub fn is_c_free(&self) -> bool {
        self.entries.values().all(CycMono::is_c_free)
    }

    /// Smallest N with every entry's root in μ_N.
    pub fn root_order(&self) -> u64 {
        common_order(self.entries.values().map(|m| m.root()).collect::<Vec<_>>().iter())
    }

    pub fn block_diag(parts: &[MonoMatrix]) -> Self {
        let size = parts.iter().map(|p| p.size).sum();
        let mut entries = BTreeMap::new();
        let mut off = 0;
        for p in parts {
            entries.extend(p.entries.iter().map(|(&(r, c), &m)| ((r + off, c + off), m)));
            off += p.size;
        }
        Self { size, entries }
    }

    /// Entries of the 2×2 block (i, j) as [[a, b], [c, d]].
    pub fn block(&self, i: usize, j: usize) -> [[Option<CycMono>; 2]; 2] {
        let e = |r, c| self.get(2 * i + r, 2 * j + c).copied();
        [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
    }

    /// Block-column index of the nonzero block in each block-row, if the
    /// matrix has exactly one nonzero block per block-row and block-column.
    pub fn block_permutation(&self) -> Option<Vec<usize>> {
        let g = self.blocks();
        let mut target: Vec<Option<usize>> = vec![None; g];
        for &(r, c) in self.entries.keys() {
            match target[r / 2] {
                None => target[r / 2] = Some(c / 2),
                Some(j) if j == c / 2 => {}
                Some(_) => return None,
            }
        }
        let perm: Vec<usize> = target.into_iter().collect::<Option<_>>()?;
        let mut seen = vec![false; g];
        for &j in &perm {
            if std::mem::replace(&mut seen[j], true) {
                return None;
            }
        }
        Some(perm)
    }

    /// Numeric matrix with c^q replaced by the positive real root of `c`.
    pub fn to_numeric(&self, c: f64) -> Result<DMatrix<Complex64>> {
        if c.is_nan() || c <= 0.0 {
            return Err(Error::NonPositiveTwist(c));
        }
        let mut m = DMatrix::zeros(self.size, self.size);
        for (&(r, col), v) in &self.entries {
            m[(r, col)] = v.eval(c)?;
        }
        Ok(m)
    }

    pub fn to_dump(&self) -> MatrixDump {
        MatrixDump {
            size: self.size,
            entries: self
                .entries
                .iter()
                .map(|(&(r, c), m)| {
                    let q = m.c_pow();
                    (r, c, m.root().exp(), m.root().order(), *q.numer(), *q.denom())
                })
                .collect(),
        }
    }

    pub fn from_dump(dump: &MatrixDump) -> Result<Self> {
        let entries = dump
            .entries
            .iter()
            .map(|&(r, c, e, n, qn, qd)| {
                if qd <= 0 {
                    return Err(Error::InvalidArgument(format!("c-exponent denominator {qd}")));
                }
                let root = RootOfUnity::new(e as i64, n)?;
                Ok(((r, c), CycMono::new(root, Ratio::new(qn, qd))?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_entries(dump.size, entries)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_dump())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_dump(&serde_json::from_str(text)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// JSON form `{size, entries: [[row, col, e, N, q_num, q_den], …]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDump {
    pub size: usize,
    pub entries: Vec<(usize, usize, u64, u64, i64, i64)>,
}

impl fmt::Display for MonoMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.size {
            let row: Vec<String> = (0..self.size)
                .map(|c| self.get(r, c).map_or_else(|| "0".to_string(), |m| m.to_string()))
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j_block(g: usize) -> MonoMatrix {
        let mut m = MonoMatrix::zeros(2 * g);
        for i in 0..g {
            m.set(2 * i, 2 * i + 1, CycMono::ONE).unwrap();
            m.set(2 * i + 1, 2 * i, CycMono::minus_one()).unwrap();
        }
        m
    }

    #[test]
    fn j_squared_is_minus_identity() {
        let j = j_block(3);
        assert_eq!(j.mul(&j).unwrap(), MonoMatrix::identity(6).neg());
    }

    #[test]
    fn inverse_of_diagonal() {
        let d = MonoMatrix::diagonal(vec![
            CycMono::zeta(1, 16).unwrap(),
            CycMono::new(RootOfUnity::new(3, 8).unwrap(), Ratio::new(1, 4)).unwrap(),
        ]);
        assert_eq!(d.mul(&d.inverse().unwrap()).unwrap(), MonoMatrix::identity(2));
        assert_eq!(d.inverse().unwrap().mul(&d).unwrap(), MonoMatrix::identity(2));
    }

    #[test]
    fn singular_inputs() {
        assert!(matches!(MonoMatrix::zeros(2).inverse(), Err(Error::Singular)));
        let m = MonoMatrix::from_entries(2, [((0, 0), CycMono::ONE), ((1, 0), CycMono::ONE)]).unwrap();
        assert!(matches!(m.inverse(), Err(Error::Singular)));
    }

    #[test]
    fn products_that_leave_monomials_fail() {
        let full = MonoMatrix::from_entries(2, [((0, 0), CycMono::ONE), ((0, 1), CycMono::ONE)]).unwrap();
        let col = MonoMatrix::from_entries(2, [((0, 0), CycMono::ONE), ((1, 0), CycMono::ONE)]).unwrap();
        assert!(matches!(full.mul(&col), Err(Error::NotMonomial { row: 0, col: 0 })));
        let col_neg = MonoMatrix::from_entries(2, [((0, 0), CycMono::ONE), ((1, 0), CycMono::minus_one())]).unwrap();
        assert_eq!(full.mul(&col_neg).unwrap().nnz(), 0);
    }

    #[test]
    fn size_mismatch() {
        assert!(matches!(
            MonoMatrix::identity(2).mul(&MonoMatrix::identity(4)),
            Err(Error::SizeMismatch(2, 4))
        ));
    }

    #[test]
    fn json_round_trip() {
        let m = MonoMatrix::from_entries(
            4,
            [
                ((0, 2), CycMono::new(RootOfUnity::new(3, 16).unwrap(), Ratio::new(-1, 4)).unwrap()),
                ((1, 3), CycMono::minus_one()),
                ((2, 0), CycMono::ONE),
                ((3, 1), CycMono::zeta(1, 4).unwrap()),
            ],
        )
        .unwrap();
        let text = m.to_json().unwrap();
        assert!(text.starts_with("{\"size\":4,\"entries\":[[0,2,3,16,-1,4]"));
        assert_eq!(MonoMatrix::from_json(&text).unwrap(), m);
    }

    #[test]
    fn block_permutation_detection() {
        let j = j_block(2);
        assert_eq!(j.block_permutation(), Some(vec![0, 1]));
        let bad = MonoMatrix::from_entries(4, [((0, 0), CycMono::ONE), ((2, 1), CycMono::ONE)]).unwrap();
        assert_eq!(bad.block_permutation(), None);
    }

    #[test]
    fn numeric_matches_exact_product() {
        let a = MonoMatrix::from_entries(
            4,
            [
                ((0, 3), CycMono::zeta(1, 8).unwrap()),
                ((1, 2), CycMono::new(RootOfUnity::ONE, Ratio::new(1, 2)).unwrap()),
                ((2, 0), CycMono::zeta(3, 16).unwrap()),
                ((3, 1), CycMono::minus_one()),
            ],
        )
        .unwrap();
        let b = a.conj_transpose();
        let exact = a.mul(&b).unwrap().to_numeric(3.0).unwrap();
        let numeric = a.to_numeric(3.0).unwrap() * b.to_numeric(3.0).unwrap();
        assert!((exact - numeric).norm() < 1e-12);
        assert!(a.to_numeric(-1.0).is_err());
    }
}
