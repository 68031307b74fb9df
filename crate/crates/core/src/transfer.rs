//! Galerkin truncations of the reduced transfer operators in the Fourier basis.
//!
//! For an irreducible block of dimension `d` the matrix acts on coefficient
//! vectors indexed by `(m, a)` with `|m| ≤ K` and `0 ≤ a < d`, flattened as
//! `(m + K) d + a`:
//!
//! `M[(m,a),(k,b)] = ∫ e^{-2πimx} τ_α(x)[a,b] e^{2πik E(x)} dx`.

use std::f64::consts::TAU;
use std::fmt;
use std::io::{Read, Write};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::dynamics::{wrap, Cocycle, CocycleSU2, CocycleU1, ExpandingMap};
use crate::error::{Error, Result};
use crate::su2::SpinRep;

/// Largest tolerated quadrature tail estimate.
pub const QUADRATURE_TOL: f64 = 1e-10;

const MAGIC: &[u8; 4] = b"RTLM";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    U1,
    SU2,
}

/// Label of an irreducible representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Alpha {
    /// `ν ∈ Z` for U(1).
    Frequency(i64),
    /// Spin `j = twice_j / 2` for SU(2).
    Spin(u32),
}

impl Alpha {
    pub fn spin(j: f64) -> Result<Self> {
        SpinRep::from_spin(j).map(|r| Alpha::Spin(r.twice_j()))
    }

    pub fn group(self) -> Group {
        match self {
            Alpha::Frequency(_) => Group::U1,
            Alpha::Spin(_) => Group::SU2,
        }
    }

    pub fn block_dim(self) -> usize {
        match self {
            Alpha::Frequency(_) => 1,
            Alpha::Spin(t) => t as usize + 1,
        }
    }

    pub fn is_trivial(self) -> bool {
        matches!(self, Alpha::Frequency(0) | Alpha::Spin(0))
    }

    /// Numeric value, `ν` or `j`.
    pub fn value(self) -> f64 {
        match self {
            Alpha::Frequency(nu) => nu as f64,
            Alpha::Spin(t) => t as f64 / 2.0,
        }
    }

    fn fraction(self) -> (i32, u32) {
        match self {
            Alpha::Frequency(nu) => (nu as i32, 1),
            Alpha::Spin(t) => (t as i32, 2),
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Frequency(nu) => write!(f, "{nu}"),
            Alpha::Spin(t) if t % 2 == 0 => write!(f, "{}", t / 2),
            Alpha::Spin(t) => write!(f, "{t}/2"),
        }
    }
}

/// A truncated transfer matrix together with its provenance.
#[derive(Clone, Debug)]
pub struct TruncatedTransferMatrix {
    pub alpha: Alpha,
    pub cutoff: usize,
    pub quadrature_size: usize,
    pub entries: DMatrix<Complex64>,
    /// Quadrature tail estimate; `NaN` when loaded from a cache.
    pub residual: f64,
}

impl TruncatedTransferMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Flat index of the basis vector `(m, a)`.
    pub fn index(&self, m: i64, a: usize) -> usize {
        flat_index(self.cutoff, self.alpha.block_dim(), m, a)
    }
}

fn flat_index(cutoff: usize, d: usize, m: i64, a: usize) -> usize {
    (m + cutoff as i64) as usize * d + a
}

/// Assembly knobs.
#[derive(Clone, Debug)]
pub struct AssemblyOptions {
    /// Force this number of quadrature nodes instead of the automatic choice.
    pub quadrature_size: Option<usize>,
    pub tolerance: f64,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            quadrature_size: None,
            tolerance: QUADRATURE_TOL,
        }
    }
}

/// Automatic quadrature size for a block whose phase has Fourier bandwidth
/// about `bandwidth`.
pub fn quadrature_size(map: &ExpandingMap, bandwidth: f64, cutoff: usize) -> usize {
    let k = cutoff as f64;
    let d = map.degree() as f64 + 1.0 + map.amplitude().abs();
    let a = 16.0 * (k + bandwidth + 1.0);
    let b = 4.0 * (d * k + bandwidth);
    (a.max(b).ceil() as usize).next_power_of_two()
}

fn u1_bandwidth(c: &CocycleU1, nu: i64) -> f64 {
    (nu as f64).abs() * c.phase.harmonic_weight()
}

fn su2_bandwidth(c: &CocycleSU2, twice_j: u32) -> f64 {
    twice_j as f64 * c.harmonic_weight()
}

/// Truncated matrix for any cocycle and matching representation label.
pub fn assemble(
    map: &ExpandingMap,
    cocycle: &Cocycle,
    alpha: Alpha,
    cutoff: usize,
    opts: &AssemblyOptions,
) -> Result<TruncatedTransferMatrix> {
    match (cocycle, alpha) {
        (Cocycle::U1(c), Alpha::Frequency(nu)) => assemble_u1_with(map, c, nu, cutoff, opts),
        (Cocycle::SU2(c), Alpha::Spin(t)) => assemble_su2_with(map, c, t, cutoff, opts),
        _ => Err(Error::GroupMismatch(format!(
            "label {alpha:?} does not belong to the cocycle group"
        ))),
    }
}

pub fn assemble_u1(map: &ExpandingMap, cocycle: &CocycleU1, nu: i64, cutoff: usize) -> Result<TruncatedTransferMatrix> {
    assemble_u1_with(map, cocycle, nu, cutoff, &AssemblyOptions::default())
}

pub fn assemble_u1_with(
    map: &ExpandingMap,
    cocycle: &CocycleU1,
    nu: i64,
    cutoff: usize,
    opts: &AssemblyOptions,
) -> Result<TruncatedTransferMatrix> {
    let nq = opts
        .quadrature_size
        .unwrap_or_else(|| quadrature_size(map, u1_bandwidth(cocycle, nu), cutoff));
    let nuf = nu as f64;
    let phase: Vec<Complex64> = (0..nq)
        .map(|q| Complex64::from_polar(1.0, nuf * cocycle.phase.eval(q as f64 / nq as f64)))
        .collect();
    let (entries, residual) = assemble_blocks(map, cutoff, nq, 1, |q, _, _| phase[q]);
    finish(Alpha::Frequency(nu), cutoff, nq, entries, residual, opts)
}

pub fn assemble_su2(
    map: &ExpandingMap,
    cocycle: &CocycleSU2,
    twice_j: u32,
    cutoff: usize,
) -> Result<TruncatedTransferMatrix> {
    assemble_su2_with(map, cocycle, twice_j, cutoff, &AssemblyOptions::default())
}

pub fn assemble_su2_with(
    map: &ExpandingMap,
    cocycle: &CocycleSU2,
    twice_j: u32,
    cutoff: usize,
    opts: &AssemblyOptions,
) -> Result<TruncatedTransferMatrix> {
    let nq = opts
        .quadrature_size
        .unwrap_or_else(|| quadrature_size(map, su2_bandwidth(cocycle, twice_j), cutoff));
    let rep = SpinRep::new(twice_j);
    let d = rep.dim();
    let reps: Vec<DMatrix<Complex64>> = (0..nq)
        .into_par_iter()
        .map(|q| rep.group_rep(cocycle, q as f64 / nq as f64))
        .collect();
    let (entries, residual) = assemble_blocks(map, cutoff, nq, d, |q, a, b| reps[q][(a, b)]);
    finish(Alpha::Spin(twice_j), cutoff, nq, entries, residual, opts)
}

fn finish(
    alpha: Alpha,
    cutoff: usize,
    nq: usize,
    entries: DMatrix<Complex64>,
    residual: f64,
    opts: &AssemblyOptions,
) -> Result<TruncatedTransferMatrix> {
    if !(residual <= opts.tolerance) {
        return Err(Error::UnderResolved {
            tail: residual,
            tolerance: opts.tolerance,
            nodes: nq,
        });
    }
    Ok(TruncatedTransferMatrix {
        alpha,
        cutoff,
        quadrature_size: nq,
        entries,
        residual,
    })
}

struct Spectrum {
    fft: Arc<dyn Fft<f64>>,
    half: Arc<dyn Fft<f64>>,
    n: usize,
}

impl Spectrum {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            fft: planner.plan_fft_forward(n),
            half: planner.plan_fft_forward((n / 2).max(1)),
            n,
        }
    }

    /// Normalized Fourier coefficients of `samples`.
    fn coefficients(&self, mut samples: Vec<Complex64>) -> Vec<Complex64> {
        self.fft.process(&mut samples);
        let s = 1.0 / self.n as f64;
        samples.iter_mut().for_each(|c| *c *= s);
        samples
    }

    /// Coefficients computed from the even-indexed samples only.
    fn coarse_coefficients(&self, samples: &[Complex64]) -> Vec<Complex64> {
        let mut even: Vec<Complex64> = samples.iter().step_by(2).copied().collect();
        self.half.process(&mut even);
        let s = 1.0 / even.len() as f64;
        even.iter_mut().for_each(|c| *c *= s);
        even
    }
}

fn coeff(c: &[Complex64], n: i64) -> Complex64 {
    let len = c.len() as i64;
    if n.abs() * 2 >= len {
        return Complex64::new(0.0, 0.0);
    }
    c[n.rem_euclid(len) as usize]
}

/// Shared assembly: `phase(q, a, b)` is the block matrix at node `q/nq`.
fn assemble_blocks<P>(map: &ExpandingMap, cutoff: usize, nq: usize, d: usize, phase: P) -> (DMatrix<Complex64>, f64)
where
    P: Fn(usize, usize, usize) -> Complex64 + Sync,
{
    let dim = (2 * cutoff + 1) * d;
    let kk = cutoff as i64;
    let spec = Spectrum::new(nq);
    let mut entries = DMatrix::<Complex64>::zeros(dim, dim);
    if map.is_linear() {
        // M[(m,a),(k,b)] = c^{ab}_{m - k·deg}
        let deg = map.degree() as i64;
        let reach = kk * (deg + 1);
        let blocks: Vec<(Vec<Complex64>, f64)> = (0..d * d)
            .into_par_iter()
            .map(|ab| {
                let (a, b) = (ab / d, ab % d);
                let samples: Vec<Complex64> = (0..nq).map(|q| phase(q, a, b)).collect();
                let coarse = spec.coarse_coefficients(&samples);
                let fine = spec.coefficients(samples);
                let tail = (-reach..=reach)
                    .map(|n| (coeff(&fine, n) - coeff(&coarse, n)).norm())
                    .fold(0.0, f64::max);
                (fine, tail)
            })
            .collect();
        let mut residual = 0.0_f64;
        for (ab, (c, tail)) in blocks.iter().enumerate() {
            let (a, b) = (ab / d, ab % d);
            residual = residual.max(*tail);
            for m in -kk..=kk {
                for k in -kk..=kk {
                    entries[(flat_index(cutoff, d, m, a), flat_index(cutoff, d, k, b))] = coeff(c, m - deg * k);
                }
            }
        }
        return (entries, residual);
    }
    let lifts: Vec<f64> = (0..nq).map(|q| wrap(map.lift(q as f64 / nq as f64))).collect();
    let probes = probe_columns(cutoff);
    let columns: Vec<(Vec<Complex64>, f64)> = (0..dim)
        .into_par_iter()
        .map(|col| {
            let (k, b) = ((col / d) as i64 - kk, col % d);
            let mut out = vec![Complex64::new(0.0, 0.0); dim];
            let mut tail = 0.0_f64;
            for a in 0..d {
                let samples: Vec<Complex64> = (0..nq)
                    .map(|q| phase(q, a, b) * Complex64::from_polar(1.0, TAU * (k as f64) * lifts[q]))
                    .collect();
                if probes.contains(&k) {
                    let coarse = spec.coarse_coefficients(&samples);
                    let fine = spec.coefficients(samples.clone());
                    for m in -kk..=kk {
                        tail = tail.max((coeff(&fine, m) - coeff(&coarse, m)).norm());
                    }
                }
                let c = spec.coefficients(samples);
                for m in -kk..=kk {
                    out[flat_index(cutoff, d, m, a)] = coeff(&c, m);
                }
            }
            (out, tail)
        })
        .collect();
    let mut residual = 0.0_f64;
    for (col, (v, tail)) in columns.into_iter().enumerate() {
        residual = residual.max(tail);
        entries.set_column(col, &nalgebra::DVector::from_vec(v));
    }
    (entries, residual)
}

fn probe_columns(cutoff: usize) -> Vec<i64> {
    let k = cutoff as i64;
    let mut v = vec![-k, -k / 2, 0, k / 2, k];
    v.dedup();
    v
}

/// Truncation of the adjoint operator `(F*φ)(x) = Σ_{E(y)=x} e^{-iνΩ(y)} φ(y) / E'(y)`,
/// assembled directly from the inverse branches.
pub fn assemble_adjoint_u1(
    map: &ExpandingMap,
    cocycle: &CocycleU1,
    nu: i64,
    cutoff: usize,
) -> Result<TruncatedTransferMatrix> {
    assemble_adjoint_u1_with(map, cocycle, nu, cutoff, &AssemblyOptions::default())
}

pub fn assemble_adjoint_u1_with(
    map: &ExpandingMap,
    cocycle: &CocycleU1,
    nu: i64,
    cutoff: usize,
    opts: &AssemblyOptions,
) -> Result<TruncatedTransferMatrix> {
    let nq = opts
        .quadrature_size
        .unwrap_or_else(|| quadrature_size(map, u1_bandwidth(cocycle, nu), cutoff));
    let deg = map.degree();
    let nuf = nu as f64;
    let mut branches = Vec::with_capacity(nq * deg as usize);
    for q in 0..nq {
        let x = q as f64 / nq as f64;
        for e in 0..deg {
            let y = map.inverse_branch(e, x)?;
            let w = Complex64::from_polar(1.0 / map.derivative(y), -nuf * cocycle.phase.eval(y));
            branches.push((y, w));
        }
    }
    let dim = 2 * cutoff + 1;
    let kk = cutoff as i64;
    let spec = Spectrum::new(nq);
    let probes = probe_columns(cutoff);
    let columns: Vec<(Vec<Complex64>, f64)> = (0..dim)
        .into_par_iter()
        .map(|col| {
            let k = col as i64 - kk;
            let samples: Vec<Complex64> = branches
                .chunks(deg as usize)
                .map(|br| {
                    br.iter()
                        .map(|(y, w)| w * Complex64::from_polar(1.0, TAU * k as f64 * y))
                        .sum()
                })
                .collect();
            let mut tail = 0.0_f64;
            if probes.contains(&k) {
                let coarse = spec.coarse_coefficients(&samples);
                let fine = spec.coefficients(samples.clone());
                for m in -kk..=kk {
                    tail = tail.max((coeff(&fine, m) - coeff(&coarse, m)).norm());
                }
            }
            let c = spec.coefficients(samples);
            ((-kk..=kk).map(|m| coeff(&c, m)).collect(), tail)
        })
        .collect();
    let mut entries = DMatrix::<Complex64>::zeros(dim, dim);
    let mut residual = 0.0_f64;
    for (col, (v, tail)) in columns.into_iter().enumerate() {
        residual = residual.max(tail);
        entries.set_column(col, &nalgebra::DVector::from_vec(v));
    }
    finish(Alpha::Frequency(nu), cutoff, nq, entries, residual, opts)
}

/// Write a matrix in the `RTLM` cache format: a 32-byte little-endian header
/// followed by row-major `(re, im)` pairs of `f64`.
pub fn write_cache<W: Write>(mut w: W, m: &TruncatedTransferMatrix) -> Result<()> {
    let (num, den) = m.alpha.fraction();
    let group: u32 = match m.alpha.group() {
        Group::U1 => 0,
        Group::SU2 => 1,
    };
    let mut header = Vec::with_capacity(32);
    header.extend_from_slice(MAGIC);
    header.extend_from_slice(&group.to_le_bytes());
    header.extend_from_slice(&num.to_le_bytes());
    header.extend_from_slice(&den.to_le_bytes());
    header.extend_from_slice(&(m.cutoff as u32).to_le_bytes());
    header.extend_from_slice(&0u32.to_le_bytes());
    header.extend_from_slice(&(m.quadrature_size as u64).to_le_bytes());
    w.write_all(&header)?;
    let n = m.dim();
    let mut body = Vec::with_capacity(n * n * 16);
    for r in 0..n {
        for c in 0..n {
            let z = m.entries[(r, c)];
            body.extend_from_slice(&z.re.to_le_bytes());
            body.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    w.write_all(&body)?;
    Ok(())
}

/// Read a matrix written by [`write_cache`].
pub fn read_cache<R: Read>(mut r: R) -> Result<TruncatedTransferMatrix> {
    let mut h = [0u8; 32];
    r.read_exact(&mut h)?;
    if &h[0..4] != MAGIC {
        return Err(Error::CacheFormat("bad magic".into()));
    }
    let u32_at = |i: usize| u32::from_le_bytes(h[i..i + 4].try_into().unwrap());
    let group = u32_at(4);
    let num = i32::from_le_bytes(h[8..12].try_into().unwrap());
    let den = u32_at(12);
    let cutoff = u32_at(16) as usize;
    let nq = u64::from_le_bytes(h[24..32].try_into().unwrap()) as usize;
    let alpha = match (group, den) {
        (0, 1) => Alpha::Frequency(num as i64),
        (1, 2) if num >= 0 => Alpha::Spin(num as u32),
        _ => {
            return Err(Error::CacheFormat(format!(
                "unsupported group {group} with label {num}/{den}"
            )))
        }
    };
    let n = (2 * cutoff + 1) * alpha.block_dim();
    let mut body = vec![0u8; n * n * 16];
    r.read_exact(&mut body)?;
    let f = |i: usize| f64::from_le_bytes(body[i..i + 8].try_into().unwrap());
    let entries = DMatrix::from_fn(n, n, |row, col| {
        let i = (row * n + col) * 16;
        Complex64::new(f(i), f(i + 8))
    });
    Ok(TruncatedTransferMatrix {
        alpha,
        cutoff,
        quadrature_size: nq,
        entries,
        residual: f64::NAN,
    })
}
