//! Sato-Tate groups as a torus ST⁰ plus exact coset representatives of the
//! component group, generated by γ, γ_J and γ_c.

use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::curves::{CurveSpec, Family};
use crate::cyclo::{conjugation_relation_holds, CycMono, Endomorphisms, GaloisElt, MonoMatrix, RootOfUnity, Twist};
use crate::error::{Error, Result};

/// ST⁰ as block-diagonal matrices whose block i is diag(u_k, ū_k) with
/// k = `angle_of_block[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorusDescriptor {
    num_angles: usize,
    angle_of_block: Vec<usize>,
}

impl TorusDescriptor {
    pub fn new(num_angles: usize, angle_of_block: Vec<usize>) -> Result<Self> {
        let mut used = vec![false; num_angles];
        for &a in &angle_of_block {
            *used.get_mut(a).ok_or_else(|| {
                Error::InvalidArgument(format!("angle index {a} out of range 0..{num_angles}"))
            })? = true;
        }
        if used.iter().any(|u| !u) {
            return Err(Error::InvalidArgument("every angle must occur in some block".into()));
        }
        Ok(Self { num_angles, angle_of_block })
    }

    /// Block count g.
    pub fn g(&self) -> usize {
        self.angle_of_block.len()
    }

    pub fn num_angles(&self) -> usize {
        self.num_angles
    }

    pub fn angle_of_block(&self) -> &[usize] {
        &self.angle_of_block
    }

    /// diag(e^{iθ_k}, e^{−iθ_k}) per block.
    pub fn torus_numeric(&self, thetas: &[f64]) -> DMatrix<Complex64> {
        let diag: Vec<Complex64> = self
            .angle_of_block
            .iter()
            .flat_map(|&a| {
                let u = Complex64::from_polar(1.0, thetas[a]);
                [u, u.conj()]
            })
            .collect();
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag))
    }

    fn factor(d: u32) -> Vec<usize> {
        if d == 1 {
            return vec![0];
        }
        let g = 1usize << (d - 1);
        (0..g).map(|i| i.min(g - 1 - i)).collect()
    }
}

/// Block i shares its angle with block g−1−i, the block β swaps it with;
/// y² = x³ − cx has one angle. First-family curves concatenate their
/// factors in increasing d with disjoint angles.
pub fn identity_descriptor(spec: &CurveSpec) -> TorusDescriptor {
    let ds: Vec<u32> = match spec.family() {
        Family::TwoPowPlusOne => vec![spec.param()],
        Family::PowTwo => (1..spec.param()).collect(),
    };
    let mut angles = Vec::new();
    let mut base = 0;
    for d in ds {
        let part = TorusDescriptor::factor(d);
        let r = part.iter().max().map_or(0, |m| m + 1);
        angles.extend(part.into_iter().map(|a| a + base));
        base += r;
    }
    TorusDescriptor::new(base, angles).expect("factor descriptors use every angle")
}

fn v2(n: u64) -> u32 {
    n.trailing_zeros()
}

fn is_perfect_power(n: u64, k: u32) -> bool {
    if n <= 1 || k == 1 {
        return true;
    }
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u64;
    r = r.saturating_sub(1);
    for cand in r..=r + 2 {
        if cand.checked_pow(k) == Some(n) {
            return true;
        }
    }
    false
}

/// Largest power of two a ≤ N/2 with |c| = 2^(j·a/2)·q^a. Signs are absorbed
/// by roots of unity in Q(ζ_N).
pub fn classify_c(c: i64, n: u64) -> Result<u64> {
    if c == 0 {
        return Err(Error::InvalidArgument("c must be nonzero".into()));
    }
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::InvalidRootOrder(n));
    }
    let abs = c.unsigned_abs();
    let e2 = v2(abs);
    let odd = abs >> e2;
    let mut a = n / 2;
    while a > 1 {
        if (e2 as u64).is_multiple_of(a / 2) && is_perfect_power(odd, a as u32) {
            return Ok(a);
        }
        a /= 2;
    }
    Ok(1)
}

/// Twist class of a curve, or `None` when the generators do not depend on c
/// (y² = x³ − cx and y² = x⁴ − c).
pub fn twist_class(spec: &CurveSpec) -> Result<Option<u64>> {
    if spec.root_order() < 8 {
        return Ok(None);
    }
    classify_c(spec.c(), spec.root_order()).map(Some)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    pub gamma: MonoMatrix,
    pub gamma_j: MonoMatrix,
    pub gamma_c: MonoMatrix,
    pub twist_class: Option<u64>,
}

impl GeneratorSet {
    pub fn named(&self) -> [(&'static str, &MonoMatrix); 3] {
        [("gamma", &self.gamma), ("gamma_J", &self.gamma_j), ("gamma_c", &self.gamma_c)]
    }
}

fn one() -> CycMono {
    CycMono::ONE
}

fn put_j(m: &mut MonoMatrix, bi: usize, bj: usize, negate: bool) {
    let (top, bottom) = if negate { (CycMono::minus_one(), one()) } else { (one(), CycMono::minus_one()) };
    m.set(2 * bi, 2 * bj + 1, top).unwrap();
    m.set(2 * bi + 1, 2 * bj, bottom).unwrap();
}

struct FactorGenerators {
    gamma: MonoMatrix,
    gamma_j: MonoMatrix,
    gamma_c: MonoMatrix,
}

fn factor_generators(d: u32, a: u64, signed_j: bool) -> Result<FactorGenerators> {
    let g = 1usize << (d - 1);
    let n = 1usize << (d + 1);
    let mut gamma = MonoMatrix::zeros(2 * g);
    let mut gamma_j = MonoMatrix::zeros(2 * g);
    for i in 1..=g {
        let r = 5 * (2 * i - 1) % n;
        for j in 1..=g {
            if 2 * j - 1 == r {
                gamma.set(2 * (i - 1), 2 * (j - 1), one())?;
                gamma.set(2 * (i - 1) + 1, 2 * (j - 1) + 1, one())?;
            } else if 2 * j - 1 == n - r {
                put_j(&mut gamma, i - 1, j - 1, signed_j && 2 * j > g);
            }
        }
        put_j(&mut gamma_j, i - 1, i - 1, false);
    }
    let diag = (0..g as i64)
        .flat_map(|i| {
            let e = a as i64 * (2 * i + 1 - g as i64);
            [e, -e]
        })
        .map(|e| CycMono::zeta(e, n as u64))
        .collect::<Result<_>>()?;
    Ok(FactorGenerators { gamma, gamma_j, gamma_c: MonoMatrix::diagonal(diag) })
}

/// Generators for a given twist class (`None` behaves as class 1).
pub fn generators_for_class(spec: &CurveSpec, class: Option<u64>) -> Result<GeneratorSet> {
    let a = class.unwrap_or(1);
    if !a.is_power_of_two() || (spec.root_order() >= 8 && a > spec.root_order() / 2) {
        return Err(Error::InvalidArgument(format!("twist class {a} out of range")));
    }
    let (ds, signed_j): (Vec<u32>, bool) = match spec.family() {
        Family::TwoPowPlusOne => (vec![spec.param()], true),
        Family::PowTwo => ((1..spec.param()).collect(), false),
    };
    let parts = ds.into_iter().map(|d| factor_generators(d, a, signed_j)).collect::<Result<Vec<_>>>()?;
    let cat = |f: fn(&FactorGenerators) -> &MonoMatrix| {
        MonoMatrix::block_diag(&parts.iter().map(|p| f(p).clone()).collect::<Vec<_>>())
    };
    Ok(GeneratorSet {
        gamma: cat(|p| &p.gamma),
        gamma_j: cat(|p| &p.gamma_j),
        gamma_c: cat(|p| &p.gamma_c),
        twist_class: class,
    })
}

pub fn generators(spec: &CurveSpec) -> Result<GeneratorSet> {
    generators_for_class(spec, twist_class(spec)?)
}

/// Mᴴ M = I and Mᵀ Ω M = Ω with Ω = diag(J, …, J). Needs c-free entries.
pub fn check_usp_membership(m: &MonoMatrix) -> Result<bool> {
    if let Some(((r, c), e)) = m.entries().find(|(_, e)| !e.is_c_free()) {
        return Err(Error::TwistedEntry(format!("({r}, {c}) = {e}")));
    }
    let n = m.size();
    if !n.is_multiple_of(2) {
        return Ok(false);
    }
    let mut omega = MonoMatrix::zeros(n);
    for i in 0..n / 2 {
        put_j(&mut omega, i, i, false);
    }
    let unitary = match m.conj_transpose().mul(m) {
        Ok(p) => p == MonoMatrix::identity(n),
        Err(Error::NotMonomial { .. }) => false,
        Err(e) => return Err(e),
    };
    let symplectic = match m.transpose().mul(&omega).and_then(|x| x.mul(m)) {
        Ok(p) => p == omega,
        Err(Error::NotMonomial { .. }) => false,
        Err(e) => return Err(e),
    };
    Ok(unitary && symplectic)
}

/// True iff g1·g2⁻¹ lies in the torus described by `desc`.
pub fn coset_equal(g1: &MonoMatrix, g2: &MonoMatrix, desc: &TorusDescriptor) -> Result<bool> {
    if g1.size() != g2.size() {
        return Err(Error::SizeMismatch(g1.size(), g2.size()));
    }
    if g1.size() != 2 * desc.g() {
        return Err(Error::SizeMismatch(g1.size(), 2 * desc.g()));
    }
    let q = g1.mul(&g2.inverse()?)?;
    if q.nnz() != q.size() {
        return Ok(false);
    }
    let mut angle_value: Vec<Option<RootOfUnity>> = vec![None; desc.num_angles()];
    for (i, &a) in desc.angle_of_block().iter().enumerate() {
        let (Some(u), Some(v)) = (q.get(2 * i, 2 * i), q.get(2 * i + 1, 2 * i + 1)) else {
            return Ok(false);
        };
        if !u.is_c_free() || !v.is_c_free() || u.conj() != *v {
            return Ok(false);
        }
        match angle_value[a] {
            None => angle_value[a] = Some(u.root()),
            Some(prev) if prev == u.root() => {}
            Some(_) => return Ok(false),
        }
    }
    Ok(true)
}

/// Representative of the coset T·M: the torus element that makes the first
/// entry of the first block of each angle equal to a power of c alone.
pub fn coset_key(m: &MonoMatrix, desc: &TorusDescriptor) -> Result<MonoMatrix> {
    let mut u: Vec<Option<RootOfUnity>> = vec![None; desc.num_angles()];
    for (i, &a) in desc.angle_of_block().iter().enumerate() {
        if u[a].is_none() {
            let row = 2 * i;
            let entry = m.entries().find(|((r, _), _)| *r == row).map(|(_, e)| *e).ok_or(Error::Singular)?;
            u[a] = Some(entry.root().conj());
        }
    }
    Ok(m.map(|row, e| {
        let ua = u[desc.angle_of_block()[row / 2]].expect("every angle visited");
        let scale = if row % 2 == 0 { ua } else { ua.conj() };
        e.with_root(e.root() * scale)
    }))
}

/// Coset representatives of ST/ST⁰, identity first, in breadth-first order.
#[derive(Clone, Debug)]
pub struct CosetList {
    pub descriptor: TorusDescriptor,
    pub representatives: Vec<MonoMatrix>,
}

impl CosetList {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }
}

/// Closure of the generators modulo ST⁰, with at most `cap` cosets.
pub fn closure(gens: &[&MonoMatrix], desc: &TorusDescriptor, cap: usize) -> Result<CosetList> {
    let n = 2 * desc.g();
    let id = MonoMatrix::identity(n);
    let mut seen: HashMap<MonoMatrix, usize> = HashMap::new();
    seen.insert(coset_key(&id, desc)?, 0);
    let mut reps = vec![id];
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &x in &frontier {
            for g in gens {
                let y = reps[x].mul(g)?;
                let key = coset_key(&y, desc)?;
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(key) {
                    if reps.len() >= cap {
                        return Err(Error::ClosureOverflow(cap));
                    }
                    e.insert(reps.len());
                    next.push(reps.len());
                    reps.push(y);
                }
            }
        }
        frontier = next;
    }
    Ok(CosetList { descriptor: desc.clone(), representatives: reps })
}

/// Cosets of ST⁰ in ST generated by γ, γ_J, γ_c.
pub fn component_group(spec: &CurveSpec) -> Result<CosetList> {
    component_group_with(spec, &generators(spec)?)
}

pub fn component_group_with(spec: &CurveSpec, gens: &GeneratorSet) -> Result<CosetList> {
    let desc = identity_descriptor(spec);
    let cap = 1usize << (2 * spec.param());
    closure(&[&gens.gamma, &gens.gamma_j, &gens.gamma_c], &desc, cap)
}

/// One twisted-Lefschetz relation γ·E·γ⁻¹ = ^σE.
#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub generator: &'static str,
    pub galois: String,
    pub endomorphism: &'static str,
    pub c_exponents: &'static str,
    pub holds: bool,
}

impl fmt::Display for RelationCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<8} {:<8} {:<8} c={:<6} gamma E gamma^-1 = sigma(E)",
            if self.holds { "PASS" } else { "FAIL" },
            self.generator,
            self.galois,
            self.endomorphism,
            self.c_exponents
        )
    }
}

/// The relations (γ_J, σ₋₁), (γ, σ₅), (γ_c, τ^a) against α and β.
///
/// σ₅ is checked with β at c = 1: γ permutes the blocks of β and so
/// permutes its c-exponents, which no unitary monomial γ can undo.
pub fn verify_generators(spec: &CurveSpec, gens: &GeneratorSet) -> Result<Vec<RelationCheck>> {
    let n = spec.root_order();
    let formal = Endomorphisms::for_spec(spec, Twist::Formal)?;
    let plain = Endomorphisms::for_spec(spec, Twist::Untwisted)?;
    let tau = GaloisElt::tau(gens.twist_class.unwrap_or(1) as i64);
    let cases: [(&'static str, &MonoMatrix, GaloisElt, &Endomorphisms, &'static str); 3] = [
        ("gamma_J", &gens.gamma_j, GaloisElt::sigma(-1, n)?, &formal, "formal"),
        ("gamma", &gens.gamma, GaloisElt::sigma(5, n)?, &plain, "1"),
        ("gamma_c", &gens.gamma_c, tau, &formal, "formal"),
    ];
    let mut out = Vec::new();
    for (name, g, sigma, endo, cmode) in cases {
        for (ename, e) in [("alpha", &endo.alpha), ("beta", &endo.beta)] {
            out.push(RelationCheck {
                generator: name,
                galois: sigma.to_string(),
                endomorphism: ename,
                c_exponents: if ename == "alpha" { "formal" } else { cmode },
                holds: conjugation_relation_holds(g, &sigma, e)?,
            });
        }
    }
    Ok(out)
}

/// Torus, generators and component group of one curve.
#[derive(Clone, Debug)]
pub struct SatoTateGroup {
    pub spec: CurveSpec,
    pub descriptor: TorusDescriptor,
    pub generators: GeneratorSet,
    pub cosets: CosetList,
}

impl SatoTateGroup {
    pub fn new(spec: &CurveSpec) -> Result<Self> {
        let generators = generators(spec)?;
        let cosets = component_group_with(spec, &generators)?;
        Ok(Self { spec: *spec, descriptor: identity_descriptor(spec), generators, cosets })
    }
}
