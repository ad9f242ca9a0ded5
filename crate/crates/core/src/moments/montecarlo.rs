//! Monte Carlo moments of the characteristic-polynomial coefficients a_i.
//!
//! Sample s draws from its own ChaCha8 stream (seed, s), and the per-sample
//! values are summed pairwise in sample order, so results do not depend on
//! how the samples are split across threads.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stgroup::CosetList;

pub const UNITARY_TOL: f64 = 1e-9;

/// Numeric coset representatives together with the torus they multiply.
pub struct NumericGroup<'a> {
    cosets: &'a CosetList,
    matrices: Vec<DMatrix<Complex64>>,
}

impl<'a> NumericGroup<'a> {
    pub fn new(cosets: &'a CosetList) -> Result<Self> {
        let matrices = cosets
            .representatives
            .iter()
            .map(|g| g.to_numeric(1.0))
            .collect::<Result<_>>()?;
        Ok(Self { cosets, matrices })
    }

    pub fn genus(&self) -> usize {
        self.cosets.descriptor.g()
    }

    /// T(θ)·γ with θ uniform on [0, 2π)^r and γ a uniform coset representative.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> DMatrix<Complex64> {
        let desc = &self.cosets.descriptor;
        let thetas: Vec<f64> = (0..desc.num_angles()).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        let k = rng.random_range(0..self.matrices.len());
        desc.torus_numeric(&thetas) * &self.matrices[k]
    }

    /// a_i of one sample. For i = 1 this is the trace.
    fn statistic<R: Rng>(&self, rng: &mut R, i: usize) -> Result<f64> {
        let m = self.sample(rng);
        Ok(charpoly_prefix(&m, i)[i - 1])
    }
}

/// Sample for index `s` under `seed`.
pub fn sample_rng(seed: u64, s: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(s);
    rng
}

/// One random element of ST as a numeric unitary matrix.
pub fn mc_sample<R: Rng>(cosets: &CosetList, rng: &mut R) -> Result<DMatrix<Complex64>> {
    Ok(NumericGroup::new(cosets)?.sample(rng))
}

fn unitarity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    (m.adjoint() * m - DMatrix::<Complex64>::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Complex eigenvalues via the Schur form, or [`Error::NoConvergence`] when
/// the QR iteration stalls (it can on block-permutation-like matrices).
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    let schur = m.clone().try_schur(1e-14, 1000 * n.max(1)).ok_or(Error::NoConvergence(n))?;
    Ok(schur.unpack().1.diagonal().iter().copied().collect())
}

/// a_1 … a_k from the power traces tr(M^j), j ≤ k, by Newton's identities.
fn charpoly_prefix(m: &DMatrix<Complex64>, k: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(k);
    let mut pw = m.clone();
    for j in 1..=k {
        if j > 1 {
            if j == k {
                // tr(A·M) without forming the product
                p.push(pw.iter().zip(m.transpose().iter()).map(|(a, b)| a * b).sum());
                break;
            }
            pw = &pw * m;
        }
        p.push(pw.trace());
    }
    let mut e = vec![Complex64::new(1.0, 0.0)];
    for j in 1..=k {
        let s: Complex64 = (1..=j).map(|t| if t % 2 == 1 { e[j - t] * p[t - 1] } else { -e[j - t] * p[t - 1] }).sum();
        e.push(s / j as f64);
    }
    e.into_iter().skip(1).map(|c| c.re).collect()
}

/// a_1 … a_g with det(1 − M·T) = 1 − a_1 T + a_2 T² − …, i.e. a_k is the k-th
/// elementary symmetric function of the eigenvalues (a_1 = trace). The
/// imaginary parts, zero for symplectic M, are dropped.
pub fn charpoly_coeffs(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    if !m.is_square() || !m.nrows().is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("expected an even square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    let defect = unitarity_defect(m);
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    Ok(charpoly_prefix(m, m.nrows() / 2))
}

/// e_0 … e_k of the given values.
pub fn elementary_symmetric(values: &[Complex64], k: usize) -> Vec<Complex64> {
    let mut e = vec![Complex64::new(0.0, 0.0); k + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for &x in values {
        for j in (1..=k).rev() {
            e[j] = e[j] + e[j - 1] * x;
        }
    }
    e
}

/// Pairwise summation in index order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub statistic: usize,
    pub samples: u64,
    pub seed: u64,
    /// Sample means of a_i^n for n = 1, …, n_max.
    pub estimates: Vec<f64>,
    /// Standard errors of those means.
    pub stderr: Vec<f64>,
}

/// Sample moments of powers of `values`, with standard errors.
pub fn sample_moments(values: &[f64], n_max: u32) -> (Vec<f64>, Vec<f64>) {
    let count = values.len() as f64;
    let mut est = Vec::new();
    let mut err = Vec::new();
    for n in 1..=n_max as i32 {
        let pw: Vec<f64> = values.iter().map(|x| x.powi(n)).collect();
        let sq: Vec<f64> = pw.iter().map(|x| x * x).collect();
        let mean = pairwise_sum(&pw) / count;
        let var = (pairwise_sum(&sq) / count - mean * mean).max(0.0);
        est.push(mean);
        err.push(if values.len() > 1 { (var / (count - 1.0)).sqrt() } else { f64::NAN });
    }
    (est, err)
}

/// Monte Carlo moments M_1 … M_n_max of a_i over the Haar measure.
pub fn mc_moments(cosets: &CosetList, i: usize, n_max: u32, samples: u64, seed: u64) -> Result<McEstimate> {
    let g = cosets.descriptor.g();
    if i == 0 || i > g {
        return Err(Error::InvalidArgument(format!("statistic a_{i} needs 1 <= i <= {g}")));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let group = NumericGroup::new(cosets)?;
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|s| group.statistic(&mut sample_rng(seed, s), i))
        .collect::<Result<_>>()?;
    let (estimates, stderr) = sample_moments(&values, n_max);
    Ok(McEstimate { statistic: i, samples, seed, estimates, stderr })
}
