//! Exact rank and kernel computations for the Mumford-Tate degeneracy test:
//! a factor passes when the kernel of M together with the factor's coordinate
//! block spans a subspace of infinite index in Z^cols.

use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer matrix with its columns partitioned into factor blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MTInstance {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<BigInt>>,
    blocks: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct MTFile {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
    blocks: Vec<usize>,
}

impl MTInstance {
    pub fn new(rows: usize, cols: usize, entries: Vec<i64>, blocks: Vec<usize>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::SizeMismatch(entries.len(), rows * cols));
        }
        if blocks.iter().sum::<usize>() != cols || blocks.contains(&0) {
            return Err(Error::InvalidArgument(format!("blocks {blocks:?} do not partition {cols} columns")));
        }
        let entries = entries.chunks(cols.max(1)).take(rows).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Ok(Self { rows, cols, entries, blocks })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: MTFile = serde_json::from_str(text)?;
        Self::new(f.rows, f.cols, f.entries, f.blocks)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn matrix(&self) -> &[Vec<BigInt>] {
        &self.entries
    }
}

/// Row echelon form from fraction-free (Bareiss) elimination.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

fn echelon(m: &[Vec<BigInt>], cols: usize) -> Echelon {
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..a.len() {
            for j in c + 1..cols {
                // Exact by Sylvester's identity.
                a[i][j] = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    Echelon { rows: a, pivots }
}

pub fn rank(m: &[Vec<BigInt>], cols: usize) -> usize {
    echelon(m, cols).pivots.len()
}

fn primitive(v: Vec<BigRational>) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let sign = ints.iter().find(|x| !x.is_zero()).map_or(BigInt::one(), |x| x.signum());
    ints.into_iter().map(|x| x / &g * &sign).collect()
}

/// Basis of the rational kernel as primitive integer vectors, one per free column.
pub fn kernel_basis(m: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let ech = echelon(m, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !ech.pivots.contains(c)).collect();
    free.into_iter()
        .map(|f| {
            let mut x = vec![BigRational::zero(); cols];
            x[f] = BigRational::one();
            for (i, &p) in ech.pivots.iter().enumerate().rev() {
                let row = &ech.rows[i];
                let s: BigRational = (p + 1..cols)
                    .filter(|&j| !row[j].is_zero())
                    .map(|j| BigRational::from_integer(row[j].clone()) * &x[j])
                    .sum();
                x[p] = -s / BigRational::from_integer(row[p].clone());
            }
            primitive(x)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IndexKind {
    InfiniteIndex,
    FiniteIndex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Overall {
    Nondegenerate,
    DegeneracySignal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockVerdict {
    pub offset: usize,
    pub width: usize,
    /// dim(span(kernel) + coordinate block)
    pub span_dim: usize,
    pub index: IndexKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MTVerdict {
    pub rank: usize,
    pub kernel_dim: usize,
    pub blocks: Vec<BlockVerdict>,
    pub overall: Overall,
}

/// For each column block B: InfiniteIndex iff dim(span(ker M) + Z^B) < cols.
pub fn factor_index_check(inst: &MTInstance) -> MTVerdict {
    let kernel = kernel_basis(&inst.entries, inst.cols);
    let mut blocks = Vec::new();
    let mut offset = 0;
    for &width in &inst.blocks {
        let mut span = kernel.clone();
        span.extend((offset..offset + width).map(|k| {
            let mut e = vec![BigInt::zero(); inst.cols];
            e[k] = BigInt::one();
            e
        }));
        let span_dim = rank(&span, inst.cols);
        let index = if span_dim < inst.cols { IndexKind::InfiniteIndex } else { IndexKind::FiniteIndex };
        blocks.push(BlockVerdict { offset, width, span_dim, index });
        offset += width;
    }
    let overall = if blocks.iter().all(|b| b.index == IndexKind::InfiniteIndex) {
        Overall::Nondegenerate
    } else {
        Overall::DegeneracySignal
    };
    MTVerdict { rank: inst.cols - kernel.len(), kernel_dim: kernel.len(), blocks, overall }
}
