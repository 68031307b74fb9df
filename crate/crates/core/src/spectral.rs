//! Eigenvalues, singular values, resonance extraction and the invariant density.

use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::io::Write;

use faer::Mat;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics::{Cocycle, CocycleU1, ExpandingMap};
use crate::error::{Error, Result};
use crate::transfer::{assemble, assemble_adjoint_u1, Alpha, AssemblyOptions};

fn to_faer(m: &DMatrix<Complex64>) -> Mat<Complex64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Decreasing modulus, then increasing phase angle.
pub fn modulus_order(a: &Complex64, b: &Complex64) -> Ordering {
    b.norm().total_cmp(&a.norm()).then_with(|| a.arg().total_cmp(&b.arg()))
}

/// All eigenvalues of a dense complex matrix, by decreasing modulus.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidArgument("eigenvalues of a non-square matrix".into()));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut ev = to_faer(m)
        .eigenvalues()
        .map_err(|_| Error::EigenNonConvergence { dim: m.nrows() })?;
    ev.sort_by(modulus_order);
    Ok(ev)
}

/// Singular values in decreasing order.
pub fn singular_values(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    let mut sv = to_faer(m).singular_values().map_err(|_| Error::SvdNonConvergence {
        rows: m.nrows(),
        cols: m.ncols(),
    })?;
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Resonance {
    pub value: Complex64,
    /// Distance to the matched eigenvalue at the coarser cutoff.
    pub stability_error: f64,
    pub stable: bool,
}

#[derive(Clone, Debug)]
pub struct ResonanceSet {
    pub alpha: Alpha,
    pub cutoff: usize,
    pub entries: Vec<Resonance>,
    pub tolerance: f64,
    pub floor: f64,
    pub sobolev_order: f64,
    pub sobolev_radius: f64,
    pub warning: Option<String>,
}

impl ResonanceSet {
    pub fn stable(&self) -> impl Iterator<Item = &Resonance> {
        self.entries.iter().filter(|r| r.stable)
    }

    pub fn stable_values(&self) -> Vec<Complex64> {
        self.stable().map(|r| r.value).collect()
    }

    /// Largest stable modulus, 0 if nothing is stable.
    pub fn spectral_radius(&self) -> f64 {
        self.stable().map(|r| r.value.norm()).fold(0.0, f64::max)
    }

    /// Largest stable modulus after removing the eigenvalue 1 of the trivial block.
    pub fn spectral_radius_without_unit(&self) -> f64 {
        self.stable()
            .filter(|r| !(self.alpha.is_trivial() && (r.value - 1.0).norm() < self.tolerance))
            .map(|r| r.value.norm())
            .fold(0.0, f64::max)
    }

    /// Number of stable resonances with `|λ| > threshold`.
    pub fn count_above(&self, threshold: f64) -> Result<usize> {
        if threshold <= self.floor {
            return Err(Error::BelowFloor {
                threshold,
                floor: self.floor,
            });
        }
        Ok(self.stable().filter(|r| r.value.norm() > threshold).count())
    }
}

/// `max(2·tol, 0.05)`.
pub fn default_floor(tolerance: f64) -> f64 {
    (2.0 * tolerance).max(0.05)
}

/// Essential radius `e_min^m (k/e_min)^{1/2}` of the Sobolev space of order `m`.
pub fn sobolev_radius(map: &ExpandingMap, order: f64) -> f64 {
    let e = map.e_min();
    e.powf(order) * (map.degree() as f64 / e).sqrt()
}

#[derive(Clone, Debug)]
pub struct ExtractOptions {
    pub tolerance: f64,
    pub floor: Option<f64>,
    pub sobolev_order: f64,
    pub assembly: AssemblyOptions,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            floor: None,
            sobolev_order: -3.0,
            assembly: AssemblyOptions::default(),
        }
    }
}

/// Match the eigenvalues `fine` (larger cutoff) against `coarse`.
///
/// Walks `fine` from the largest modulus down and pairs each eigenvalue above
/// `floor` with the nearest coarse eigenvalue; a coarse eigenvalue claimed
/// twice marks the later claimant unstable.
pub fn match_spectra(coarse: &[Complex64], fine: &[Complex64], tolerance: f64, floor: f64) -> Vec<Resonance> {
    let mut fine = fine.to_vec();
    fine.sort_by(modulus_order);
    let mut used = vec![false; coarse.len()];
    let mut out = Vec::new();
    for &lam in fine.iter().filter(|l| l.norm() > floor) {
        let nearest = coarse
            .iter()
            .enumerate()
            .map(|(i, c)| (i, (c - lam).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let (stable, err) = match nearest {
            Some((i, d)) if !used[i] => {
                used[i] = true;
                (d < tolerance, d)
            }
            Some((_, d)) => (false, d),
            None => (false, f64::INFINITY),
        };
        out.push(Resonance {
            value: lam,
            stability_error: err,
            stable,
        });
    }
    out
}

pub fn extract_resonances(
    map: &ExpandingMap,
    cocycle: &Cocycle,
    alpha: Alpha,
    cutoff: usize,
    tolerance: f64,
) -> Result<ResonanceSet> {
    let opts = ExtractOptions {
        tolerance,
        ..Default::default()
    };
    extract_resonances_with(map, cocycle, alpha, cutoff, &opts)
}

/// Resonances of one block, kept when stable under `K → 2K`.
pub fn extract_resonances_with(
    map: &ExpandingMap,
    cocycle: &Cocycle,
    alpha: Alpha,
    cutoff: usize,
    opts: &ExtractOptions,
) -> Result<ResonanceSet> {
    let coarse = eigenvalues(&assemble(map, cocycle, alpha, cutoff, &opts.assembly)?.entries)?;
    let fine = eigenvalues(&assemble(map, cocycle, alpha, 2 * cutoff, &opts.assembly)?.entries)?;
    let floor = opts.floor.unwrap_or_else(|| default_floor(opts.tolerance));
    let entries = match_spectra(&coarse, &fine, opts.tolerance, floor);
    if alpha.is_trivial() {
        let unit = entries
            .iter()
            .min_by(|a, b| (a.value - 1.0).norm().total_cmp(&(b.value - 1.0).norm()));
        match unit {
            Some(r) if r.stable && (r.value - 1.0).norm() < opts.tolerance => {}
            _ => {
                let nearest = fine
                    .iter()
                    .copied()
                    .min_by(|a, b| (a - 1.0).norm().total_cmp(&(b - 1.0).norm()))
                    .unwrap_or_default();
                return Err(Error::MissingUnitEigenvalue {
                    nearest,
                    distance: (nearest - 1.0).norm(),
                });
            }
        }
    }
    let n_stable = entries.iter().filter(|r| r.stable).count();
    let warning = (n_stable < 3).then(|| format!("only {n_stable} stable resonances at K = {cutoff}"));
    Ok(ResonanceSet {
        alpha,
        cutoff,
        entries,
        tolerance: opts.tolerance,
        floor,
        sobolev_order: opts.sobolev_order,
        sobolev_radius: sobolev_radius(map, opts.sobolev_order),
        warning,
    })
}

/// `max_k Σ_{j≤k} log|λ_j| − Σ_{j≤k} log σ_j` over `k` up to the numerical
/// rank. Non-positive for every square matrix.
pub fn weyl_check(lambdas: &[Complex64], sigmas: &[f64]) -> Result<f64> {
    if lambdas.len() != sigmas.len() {
        return Err(Error::LengthMismatch {
            left: lambdas.len(),
            right: sigmas.len(),
        });
    }
    let mut mods: Vec<f64> = lambdas.iter().map(|l| l.norm()).collect();
    mods.sort_by(|a, b| b.total_cmp(a));
    let mut sig = sigmas.to_vec();
    sig.sort_by(|a, b| b.total_cmp(a));
    let top = sig.first().copied().unwrap_or(0.0);
    let cutoff = top * sig.len() as f64 * f64::EPSILON * 16.0;
    let mut worst = f64::NEG_INFINITY;
    let (mut l, mut s) = (0.0, 0.0);
    for (m, sv) in mods.iter().zip(&sig) {
        if *sv <= cutoff {
            break;
        }
        l += m.ln();
        s += sv.ln();
        if l == f64::NEG_INFINITY {
            break;
        }
        worst = worst.max(l - s);
    }
    Ok(worst)
}

/// Fourier coefficients of the invariant density of the base map.
#[derive(Clone, Debug)]
pub struct SrbDensity {
    pub cutoff: usize,
    /// Coefficient of `e^{2πimx}` at index `m + cutoff`.
    pub coefficients: Vec<Complex64>,
    pub eigenvalue: Complex64,
}

impl SrbDensity {
    pub fn coefficient(&self, m: i64) -> Complex64 {
        let i = m + self.cutoff as i64;
        if i < 0 || i as usize >= self.coefficients.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coefficients[i as usize]
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.cutoff as i64;
        (-k..=k)
            .map(|m| self.coefficient(m) * Complex64::from_polar(1.0, TAU * m as f64 * x))
            .sum::<Complex64>()
            .re
    }
}

/// Leading eigenvector of the adjoint trivial block, normalized to mean 1.
pub fn srb_density(map: &ExpandingMap, cutoff: usize) -> Result<SrbDensity> {
    if cutoff < 16 {
        return Err(Error::InvalidArgument(format!(
            "srb_density needs K >= 16, got {cutoff}"
        )));
    }
    let m = assemble_adjoint_u1(map, &CocycleU1::trivial(), 0, cutoff)?;
    let eig = to_faer(&m.entries)
        .eigen()
        .map_err(|_| Error::EigenNonConvergence { dim: m.dim() })?;
    let vals: Vec<Complex64> = (0..m.dim()).map(|i| eig.S()[i]).collect();
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| (vals[a] - 1.0).norm().total_cmp(&(vals[b] - 1.0).norm()));
    let lead = order[0];
    let value = vals[lead];
    if (value - 1.0).norm() > 1e-8 {
        return Err(Error::MissingUnitEigenvalue {
            nearest: value,
            distance: (value - 1.0).norm(),
        });
    }
    let gap = order.get(1).map_or(f64::INFINITY, |&i| (vals[i] - 1.0).norm());
    if gap < 1e-6 {
        return Err(Error::DegenerateLeading { value, gap });
    }
    let v: Vec<Complex64> = (0..m.dim()).map(|i| eig.U()[(i, lead)]).collect();
    let mean = v[cutoff];
    let coefficients: Vec<Complex64> = v.iter().map(|c| c / mean).collect();
    let density = SrbDensity {
        cutoff,
        coefficients,
        eigenvalue: value,
    };
    let (mut min, mut imag) = (f64::INFINITY, 0.0_f64);
    let k = cutoff as i64;
    for i in 0..1024 {
        let x = i as f64 / 1024.0;
        let z: Complex64 = (-k..=k)
            .map(|m| density.coefficient(m) * Complex64::from_polar(1.0, TAU * m as f64 * x))
            .sum();
        min = min.min(z.re);
        imag = imag.max(z.im.abs());
    }
    if min <= 0.0 || imag > 1e-8 {
        return Err(Error::NonPositiveDensity { min, imag });
    }
    Ok(density)
}

/// Write resonance sets as CSV with columns
/// `alpha_num, alpha_den, re, im, modulus, stab_err, stable`.
pub fn write_resonance_csv<W: Write>(mut w: W, sets: &[ResonanceSet]) -> Result<()> {
    writeln!(w, "alpha_num,alpha_den,re,im,modulus,stab_err,stable")?;
    for set in sets {
        let (num, den) = match set.alpha {
            Alpha::Frequency(nu) => (nu, 1),
            Alpha::Spin(t) => (t as i64, 2),
        };
        for r in &set.entries {
            writeln!(
                w,
                "{num},{den},{},{},{},{},{}",
                r.value.re,
                r.value.im,
                r.value.norm(),
                r.stability_error,
                r.stable
            )?;
        }
    }
    Ok(())
}
