//! The six experiments. Each has a pure computation returning rows and a
//! `run_*` wrapper that writes CSV, SVG and the resolved config.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use skewlab::dynamics::{Cocycle, ExpandingMap};
use skewlab::num_complex::Complex64;
use skewlab::phasespace::{
    box_volume, captive_counts, escape_radius, gap_bound, minkowski_dimension, sample_trapped_set_with, write_box_csv,
    write_cloud_csv, CaptiveGrid, GapBound, SphereLayout, TrappedCloud, TrappedOptions,
};
use skewlab::spectral::{extract_resonances_with, srb_density, write_resonance_csv, ExtractOptions, ResonanceSet};
use skewlab::transfer::{assemble, Alpha, AssemblyOptions, Group};

use crate::config::{ExperimentConfig, LayoutSpec};
use crate::svg::{Glyph, Plot};
use crate::RunError;

/// Files written by one run and whether any row failed.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub failures: Vec<String>,
    pub summary: String,
}

struct Outputs {
    dir: PathBuf,
    report: Report,
}

impl Outputs {
    fn new(dir: &Path, cfg: &ExperimentConfig) -> Result<Self, RunError> {
        fs::create_dir_all(dir)?;
        let mut out = Self {
            dir: dir.to_path_buf(),
            report: Report::default(),
        };
        out.write("resolved_config.toml", cfg.to_toml().as_bytes())?;
        Ok(out)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), RunError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        self.report.files.push(path);
        Ok(())
    }
}

fn setup(cfg: &ExperimentConfig) -> Result<(ExpandingMap, Cocycle), RunError> {
    cfg.validate()?;
    Ok((cfg.build_map()?, cfg.build_cocycle()?))
}

fn extract_options(cfg: &ExperimentConfig) -> ExtractOptions {
    ExtractOptions {
        tolerance: cfg.tolerance.stability,
        floor: cfg.tolerance.floor,
        sobolev_order: cfg.tolerance.sobolev_order,
        assembly: AssemblyOptions {
            quadrature_size: None,
            tolerance: cfg.tolerance.quadrature,
        },
    }
}

/// Stability-filtered resonances of one block at the configured cutoff.
pub fn resonance_set(
    cfg: &ExperimentConfig,
    map: &ExpandingMap,
    c: &Cocycle,
    alpha: Alpha,
) -> skewlab::Result<ResonanceSet> {
    extract_resonances_with(map, c, alpha, cfg.cutoff_for(alpha, c), &extract_options(cfg))
}

#[derive(Clone, Debug)]
pub struct SpectrumRow {
    pub alpha: Alpha,
    pub cutoff: usize,
    pub outcome: Result<ResonanceSet, String>,
}

pub fn spectrum(cfg: &ExperimentConfig) -> Result<Vec<SpectrumRow>, RunError> {
    let (map, c) = setup(cfg)?;
    let alphas = cfg.alphas()?;
    Ok(alphas
        .par_iter()
        .map(|&alpha| SpectrumRow {
            alpha,
            cutoff: cfg.cutoff_for(alpha, &c),
            outcome: resonance_set(cfg, &map, &c, alpha).map_err(|e| e.to_string()),
        })
        .collect())
}

pub fn run_spectrum(cfg: &ExperimentConfig, dir: &Path) -> Result<Report, RunError> {
    let rows = spectrum(cfg)?;
    let map = cfg.build_map()?;
    let mut out = Outputs::new(dir, cfg)?;
    let sets: Vec<ResonanceSet> = rows.iter().filter_map(|r| r.outcome.as_ref().ok().cloned()).collect();
    let mut csv = Vec::new();
    write_resonance_csv(&mut csv, &sets)?;
    out.write("resonances.csv", &csv)?;

    let mut status = String::from("alpha,cutoff,status,stable,warning\n");
    for r in &rows {
        match &r.outcome {
            Ok(set) => {
                let _ = writeln!(
                    status,
                    "{},{},ok,{},{}",
                    r.alpha,
                    r.cutoff,
                    set.stable().count(),
                    set.warning.as_deref().unwrap_or("")
                );
            }
            Err(e) => {
                let _ = writeln!(status, "{},{},failed,0,{}", r.alpha, r.cutoff, e.replace(',', ";"));
                out.report.failures.push(format!("alpha {}: {e}", r.alpha));
            }
        }
    }
    out.write("spectrum_status.csv", status.as_bytes())?;

    let gap = 1.0 / map.e_min().sqrt();
    let mut plot = Plot::new("Resonances", (-1.1, 1.1), (-1.1, 1.1)).labels("Re λ", "Im λ");
    plot.circle((0.0, 0.0), 1.0, "black", false);
    plot.circle((0.0, 0.0), gap, "gray", true);
    let pts: Vec<(f64, f64)> = sets
        .iter()
        .flat_map(|s| s.stable().map(|r| (r.value.re, r.value.im)))
        .filter(|&(re, im)| (re - 1.0).abs() + im.abs() > 1e-9)
        .collect();
    plot.points(pts, "steelblue", 2.5);
    plot.points(vec![(1.0, 0.0)], "crimson", 5.0);
    out.write("resonances.svg", plot.render().as_bytes())?;

    let stable: usize = sets.iter().map(|s| s.stable().count()).sum();
    out.report.summary = format!(
        "{} blocks, {} stable resonances, gap circle 1/√E_min = {gap:.5}",
        rows.len(),
        stable
    );
    Ok(out.report)
}

#[derive(Clone, Debug)]
pub struct GapRow {
    pub alpha: Alpha,
    pub cutoff: usize,
    /// Largest stable modulus, the trivial eigenvalue 1 excluded.
    pub radius: Result<f64, String>,
    pub stable: usize,
}

/// Returns the rows and the reference value `1/√E_min`.
pub fn gap(cfg: &ExperimentConfig) -> Result<(Vec<GapRow>, f64), RunError> {
    let (map, c) = setup(cfg)?;
    let alphas = cfg.alphas()?;
    let rows = alphas
        .par_iter()
        .map(|&alpha| {
            let set = resonance_set(cfg, &map, &c, alpha);
            GapRow {
                alpha,
                cutoff: cfg.cutoff_for(alpha, &c),
                stable: set.as_ref().map_or(0, |s| s.stable().count()),
                radius: set.map(|s| s.spectral_radius_without_unit()).map_err(|e| e.to_string()),
            }
        })
        .collect();
    Ok((rows, 1.0 / map.e_min().sqrt()))
}

pub fn run_gap(cfg: &ExperimentConfig, dir: &Path) -> Result<Report, RunError> {
    let (rows, reference) = gap(cfg)?;
    let mut out = Outputs::new(dir, cfg)?;
    let mut csv = String::from("alpha,cutoff,radius,reference,stable,status\n");
    for r in &rows {
        match &r.radius {
            Ok(v) => {
                let _ = writeln!(csv, "{},{},{v},{reference},{},ok", r.alpha, r.cutoff, r.stable);
            }
            Err(e) => {
                let _ = writeln!(csv, "{},{},,{reference},0,{}", r.alpha, r.cutoff, e.replace(',', ";"));
                out.report.failures.push(format!("alpha {}: {e}", r.alpha));
            }
        }
    }
    out.write("gap.csv", csv.as_bytes())?;

    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.radius.as_ref().ok().map(|&v| (r.alpha.value(), v)))
        .collect();
    let xr = Plot::range_of(pts.iter().map(|p| p.0));
    let mut plot = Plot::new("Spectral radius per block", xr, (0.0, 1.05)).labels("α", "max |λ|");
    plot.line(vec![(xr.0, reference), (xr.1, reference)], "gray", true);
    plot.line(pts.clone(), "steelblue", false);
    plot.points(pts, "steelblue", 4.0);
    out.write("gap.svg", plot.render().as_bytes())?;
    out.report.summary = format!("{} blocks, reference 1/√E_min = {reference:.5}", rows.len());
    Ok(out.report)
}

#[derive(Clone, Debug)]
pub struct WeylRow {
    pub alpha: Alpha,
    pub cutoff: usize,
    /// `N_α` at the main threshold.
    pub count: Option<usize>,
    /// `(ε, N_α(ε))` for the sweep.
    pub sweep: Vec<(f64, usize)>,
    pub delta: f64,
    pub depth: usize,
    pub points: usize,
    pub volume: Option<f64>,
    /// `log N_α / log |α|`.
    pub count_ratio: Option<f64>,
    /// `d/2 + log Vol / log |α|` with `d` the phase-space dimension.
    pub volume_ratio: Option<f64>,
    pub flags: Vec<String>,
}

/// Trapped-set tube volume at `δ` for one block.
pub fn weyl_cloud(
    cfg: &ExperimentConfig,
    map: &ExpandingMap,
    c: &Cocycle,
    delta: f64,
) -> skewlab::Result<(TrappedCloud, f64)> {
    let w = &cfg.weyl;
    let opts = TrappedOptions {
        kappa: w.kappa,
        momentum_scale: w.momentum_scale,
        budget: w.budget,
        seed: cfg.seed,
        force_enumeration: false,
    };
    let x_grid = (w.x_density / delta).ceil() as usize;
    let sphere = (!c.is_u1()).then_some(w.sphere_grid);
    let cloud = sample_trapped_set_with(map, c, delta, x_grid, sphere, &opts)?;
    let vol = box_volume(&cloud, delta)?;
    Ok((cloud, vol))
}

/// Assemble a Weyl row from an already extracted resonance set.
pub fn weyl_row(
    cfg: &ExperimentConfig,
    map: &ExpandingMap,
    c: &Cocycle,
    index: usize,
    alpha: Alpha,
    set: Result<&ResonanceSet, String>,
) -> Result<WeylRow, RunError> {
    let delta = cfg.delta_for(index, alpha)?;
    let log_a = alpha.value().abs().ln();
    let half_dim = if c.is_u1() { 1.0 } else { 2.0 };
    let mut row = WeylRow {
        alpha,
        cutoff: cfg.cutoff_for(alpha, c),
        count: None,
        sweep: Vec::new(),
        delta,
        depth: 0,
        points: 0,
        volume: None,
        count_ratio: None,
        volume_ratio: None,
        flags: Vec::new(),
    };
    match set {
        Ok(set) => {
            match set.count_above(cfg.weyl.epsilon) {
                Ok(n) => {
                    row.count = Some(n);
                    row.count_ratio = (n > 0 && log_a > 0.0).then(|| (n as f64).ln() / log_a);
                }
                Err(e) => row.flags.push(e.to_string()),
            }
            for &eps in &cfg.weyl.epsilon_sweep {
                if let Ok(n) = set.count_above(eps) {
                    row.sweep.push((eps, n));
                }
            }
            if let Some(w) = &set.warning {
                row.flags.push(w.clone());
            }
        }
        Err(e) => row.flags.push(format!("resonances: {e}")),
    }
    match weyl_cloud(cfg, map, c, delta) {
        Ok((cloud, vol)) => {
            row.depth = cloud.depth;
            row.points = cloud.len();
            row.volume = Some(vol);
            row.volume_ratio = (vol > 0.0 && log_a > 0.0).then(|| half_dim + vol.ln() / log_a);
            if !cloud.exhaustive {
                row.flags.push("sampled cloud".into());
            }
        }
        Err(e) => row.flags.push(format!("cloud: {e}")),
    }
    Ok(row)
}

pub fn weyl(cfg: &ExperimentConfig) -> Result<Vec<WeylRow>, RunError> {
    let (map, c) = setup(cfg)?;
    let alphas = cfg.alphas()?;
    for (i, &a) in alphas.iter().enumerate() {
        cfg.delta_for(i, a)?;
    }
    alphas
        .par_iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let set = resonance_set(cfg, &map, &c, alpha);
            weyl_row(cfg, &map, &c, i, alpha, set.as_ref().map_err(|e| e.to_string()))
        })
        .collect()
}

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|v| v.to_string()).unwrap_or_default()
}

/// Least-squares slope and intercept.
fn fit_line(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| (sxy / sxx, my - sxy / sxx * mx))
}

pub fn run_weyl(cfg: &ExperimentConfig, dir: &Path) -> Result<Report, RunError> {
    let rows = weyl(cfg)?;
    let mut out = Outputs::new(dir, cfg)?;
    let mut csv =
        String::from("alpha,cutoff,epsilon,count,log_count_ratio,delta,depth,points,volume,volume_ratio,gap,flags\n");
    for r in &rows {
        let gap = match (r.count_ratio, r.volume_ratio) {
            (Some(a), Some(b)) => (a - b).abs().to_string(),
            _ => String::new(),
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{gap},{}",
            r.alpha,
            r.cutoff,
            cfg.weyl.epsilon,
            opt(&r.count),
            opt(&r.count_ratio),
            r.delta,
            r.depth,
            r.points,
            opt(&r.volume),
            opt(&r.volume_ratio),
            r.flags.join("; ").replace(',', ";")
        );
    }
    out.write("weyl.csv", csv.as_bytes())?;

    let mut sweep = String::from("alpha,epsilon,count,log_count_ratio\n");
    for r in &rows {
        let la = r.alpha.value().abs().ln();
        for &(eps, n) in &r.sweep {
            let ratio = if n > 0 && la > 0.0 {
                ((n as f64).ln() / la).to_string()
            } else {
                String::new()
            };
            let _ = writeln!(sweep, "{},{eps},{n},{ratio}", r.alpha);
        }
    }
    out.write("weyl_sweep.csv", sweep.as_bytes())?;

    let plus: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.count_ratio.map(|v| (r.alpha.value(), v)))
        .collect();
    let star: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.volume_ratio.map(|v| (r.alpha.value(), v)))
        .collect();
    let xr = Plot::range_of(rows.iter().map(|r| r.alpha.value()));
    let yr = Plot::range_of(plus.iter().chain(&star).map(|p| p.1).chain([0.5, 1.5]));
    let mut plot = Plot::new("Fractal Weyl law", xr, yr).labels("α", "log-ratio");
    plot.line(vec![(xr.0, 1.0), (xr.1, 1.0)], "gray", true);
    plot.markers(plus.clone(), "steelblue", Glyph::Plus);
    plot.markers(star.clone(), "crimson", Glyph::Star);
    plot.legend("log N / log α", "steelblue");
    plot.legend("d/2 + log Vol / log α", "crimson");
    out.write("weyl.svg", plot.render().as_bytes())?;

    let slope = |p: &[(f64, f64)]| fit_line(p).map_or(f64::NAN, |f| f.0);
    let flagged = rows.iter().filter(|r| !r.flags.is_empty()).count();
    out.report.summary = format!(
        "{} blocks ({flagged} flagged); slope of log N/log α vs α: {:.3e}, of volume ratio: {:.3e}",
        rows.len(),
        slope(&plus),
        slope(&star)
    );
    Ok(out.report)
}

/// Cloud plots show at most this many points; the CSV keeps all of them.
const SVG_POINTS: usize = 20_000;

pub fn trapped(cfg: &ExperimentConfig) -> Result<TrappedCloud, RunError> {
    let (map, c) = setup(cfg)?;
    let t = &cfg.trapped;
    let opts = TrappedOptions {
        kappa: t.kappa,
        momentum_scale: t.momentum_scale,
        budget: t.budget,
        seed: cfg.seed,
        force_enumeration: false,
    };
    let sphere = (!c.is_u1()).then_some(t.sphere_grid);
    Ok(sample_trapped_set_with(&map, &c, t.delta, t.x_grid, sphere, &opts)?)
}

pub fn run_trapped(cfg: &ExperimentConfig, dir: &Path) -> Result<Report, RunError> {
    let cloud = trapped(cfg)?;
    let mut out = Outputs::new(dir, cfg)?;
    let mut csv = Vec::new();
    write_cloud_csv(&mut csv, &cloud)?;
    out.write("trapped.csv", &csv)?;

    let xi_range = Plot::range_of(cloud.points.iter().map(|p| p.point.xi));
    let stride = cloud.len().div_ceil(SVG_POINTS).max(1);
    let shown: Vec<_> = cloud.points.iter().step_by(stride).collect();
    let mut plot = Plot::new("Trapped set, (x, ξ) projection", (0.0, 1.0), xi_range).labels("x", "ξ");
    let radius = if shown.len() > 5_000 { 0.8 } else { 1.5 };
    if cloud.group == Group::SU2 {
        plot.shaded(
            shown
                .iter()
                .map(|p| (p.point.x, p.point.xi, p.point.n.map_or(0.0, |n| n.z)))
                .collect(),
            radius,
        );
        plot.legend("n₃ = −1", "#0040ff");
        plot.legend("n₃ = +1", "#ff4000");
    } else {
        plot.points(
            shown.iter().map(|p| (p.point.x, p.point.xi)).collect(),
            "steelblue",
            radius,
        );
    }
    out.write("trapped_x_xi.svg", plot.render().as_bytes())?;
    if cloud.group == Group::SU2 {
        let mut side = Plot::new("Trapped set, (n₃, ξ) projection", (-1.05, 1.05), xi_range).labels("n₃", "ξ");
        side.points(
            shown
                .iter()
                .map(|p| (p.point.n.map_or(0.0, |n| n.z), p.point.xi))
                .collect(),
            "steelblue",
            radius,
        );
        out.write("trapped_n3_xi.svg", side.render().as_bytes())?;
    }

    let mut summary = format!(
        "{} points, depth {}, accuracy {:.3e}, |ξ| ≤ {:.4}",
        cloud.len(),
        cloud.depth,
        cloud.accuracy,
        cloud.points.iter().map(|p| p.point.xi.abs()).fold(0.0, f64::max)
    );
    if !cfg.trapped.box_deltas.is_empty() {
        let mut deltas = Vec::new();
        let mut volumes = Vec::new();
        for &d in &cfg.trapped.box_deltas {
            deltas.push(d);
            volumes.push(box_volume(&cloud, d)?);
        }
        let ambient = if cloud.group == Group::SU2 { 4 } else { 2 };
        let fit = minkowski_dimension(&deltas, &volumes, ambient)?;
        let mut csv = Vec::new();
        write_box_csv(&mut csv, &fit)?;
        out.write("box_count.csv", &csv)?;
        let pts: Vec<(f64, f64)> = fit
            .deltas
            .iter()
            .zip(&fit.volumes)
            .map(|(d, v)| (d.ln(), v.ln()))
            .collect();
        let mut plot = Plot::new(
            &format!("Box counting, dimension {:.3}", fit.dimension),
            Plot::range_of(pts.iter().map(|p| p.0)),
            Plot::range_of(pts.iter().map(|p| p.1)),
        )
        .labels("log δ", "log Vol");
        plot.line(pts.clone(), "gray", true);
        plot.points(pts, "steelblue", 4.0);
        out.write("box_count.svg", plot.render().as_bytes())?;
        let _ = write!(summary, ", box dimension {:.4}", fit.dimension);
    }
    out.report.summary = summary;
    Ok(out.report)
}

#[derive(Clone, Debug)]
pub struct CaptiveTable {
    pub radius: f64,
    pub kappa: f64,
    /// `counts[i] = N(i + 1)`.
    pub counts: Vec<u64>,
    pub bounds: Vec<GapBound>,
}

pub fn captive(cfg: &ExperimentConfig) -> Result<CaptiveTable, RunError> {
    let (map, c) = setup(cfg)?;
    let s = &cfg.captive;
    let e = map.e_min();
    let kappa = s.kappa.unwrap_or(0.5 * (1.0 + e));
    let radius = match s.radius {
        Some(r) => r,
        None => escape_radius(&map, &c, kappa)?,
    };
    let grid = CaptiveGrid {
        x: s.x_grid,
        xi: s.xi_grid,
        sphere: s.sphere_grid,
        layout: match s.sphere_layout {
            LayoutSpec::Fibonacci => SphereLayout::Fibonacci,
            LayoutSpec::Equator => SphereLayout::Equator,
        },
    };
    let counts = captive_counts(&map, &c, s.n_max, &grid, radius)?;
    let bounds = gap_bound(map.degree(), e, kappa, s.order, &counts)?;
    Ok(CaptiveTable {
        radius,
        kappa,
        counts,
        bounds,
    })
}

pub fn run_captive(cfg: &ExperimentConfig, dir: &Path) -> Result<Report, RunError> {
    let t = captive(cfg)?;
    let mut out = Outputs::new(dir, cfg)?;
    let mut csv = String::from("n,count,log_count_over_n,bound,bound_radius\n");
    for (i, (&n_count, b)) in t.counts.iter().zip(&t.bounds).enumerate() {
        let n = i + 1;
        let _ = writeln!(
            csv,
            "{n},{n_count},{},{},{}",
            (n_count as f64).ln() / n as f64,
            b.bound,
            b.radius
        );
    }
    out.write("captive.csv", csv.as_bytes())?;

    let pts: Vec<(f64, f64)> = t
        .counts
        .iter()
        .enumerate()
        .map(|(i, &n)| ((i + 1) as f64, (n as f64).ln() / (i + 1) as f64))
        .collect();
    let yr = Plot::range_of(pts.iter().map(|p| p.1).chain([0.0]));
    let mut plot = Plot::new("Captivity", Plot::range_of(pts.iter().map(|p| p.0)), yr).labels("n", "log N(n) / n");
    plot.line(pts.clone(), "steelblue", false);
    plot.points(pts, "steelblue", 4.0);
    out.write("captive.svg", plot.render().as_bytes())?;
    out.report.summary = format!(
        "R = {:.4}, κ = {:.3}, N({}) = {}",
        t.radius,
        t.kappa,
        t.counts.len(),
        t.counts.last().copied().unwrap_or(1)
    );
    Ok(out.report)
}

#[derive(Clone, Debug)]
pub struct Correlation {
    pub alpha: Alpha,
    pub cutoff: usize,
    /// `C(n)` for `n = 0..=n_max`.
    pub values: Vec<Complex64>,
    pub limit: Complex64,
    /// `exp` of the fitted slope of `log |C(n) − C_∞|`; 0 when the
    /// difference vanishes identically.
    pub rate: f64,
    /// Modulus of the leading stable resonance of the block, the trivial
    /// eigenvalue 1 excluded.
    pub leading: f64,
    pub non_decaying: bool,
}

fn coefficient_vector(
    coeffs: &[crate::config::CoefficientSpec],
    cutoff: usize,
    d: usize,
) -> Result<Vec<Complex64>, RunError> {
    let k = cutoff as i64;
    let mut v = vec![Complex64::new(0.0, 0.0); (2 * cutoff + 1) * d];
    for c in coeffs {
        if c.mode.abs() > k || c.component >= d {
            return Err(RunError::Config(format!(
                "coefficient (mode {}, component {}) is outside the block (K = {cutoff}, dim {d})",
                c.mode, c.component
            )));
        }
        v[(c.mode + k) as usize * d + c.component] += Complex64::new(c.re, c.im);
    }
    Ok(v)
}

pub fn correlation(cfg: &ExperimentConfig) -> Result<Correlation, RunError> {
    let (map, c) = setup(cfg)?;
    let spec = &cfg.correlation;
    let alpha = cfg.alpha_from(spec.alpha)?;
    let cutoff = cfg.cutoff_for(alpha, &c);
    let d = alpha.block_dim();
    let k = cutoff as i64;
    let m = assemble(&map, &c, alpha, cutoff, &extract_options(cfg).assembly)?.entries;
    let psi = coefficient_vector(&spec.psi, cutoff, d)?;
    let phi = coefficient_vector(&spec.phi, cutoff, d)?;
    let rho = srb_density(&map, spec.srb_cutoff)?;
    let mut weighted = vec![Complex64::new(0.0, 0.0); phi.len()];
    for (i, p) in phi.iter().enumerate().filter(|(_, p)| p.norm() > 0.0) {
        let (mp, a) = ((i / d) as i64 - k, i % d);
        for m in -k..=k {
            weighted[(m + k) as usize * d + a] += p * rho.coefficient(m - mp);
        }
    }
    let inner = |v: &[Complex64]| -> Complex64 { weighted.iter().zip(v).map(|(w, x)| w.conj() * x).sum() };

    let mut v = skewlab::nalgebra::DVector::from_vec(psi.clone());
    let mut values = Vec::with_capacity(spec.n_max + 1);
    for _ in 0..=spec.n_max {
        values.push(inner(v.as_slice()));
        v = &m * v;
    }
    let limit = if alpha.is_trivial() {
        let mean: Complex64 = (-k..=k).map(|mm| psi[(mm + k) as usize] * rho.coefficient(-mm)).sum();
        mean * weighted[cutoff].conj()
    } else {
        Complex64::new(0.0, 0.0)
    };

    let scale = values.iter().map(|z| z.norm()).fold(0.0, f64::max).max(limit.norm());
    let [lo, hi] = spec.fit;
    let pts: Vec<(f64, f64)> = (lo..=hi)
        .map(|n| (n as f64, (values[n] - limit).norm()))
        .filter(|&(_, r)| r > 1e-13 * scale)
        .map(|(n, r)| (n, r.ln()))
        .collect();
    let rate = if pts.len() < 3 {
        0.0
    } else {
        fit_line(&pts).map_or(0.0, |f| f.0.exp())
    };

    let set = resonance_set(cfg, &map, &c, alpha)?;
    let leading = set.spectral_radius_without_unit();
    let tol = cfg.tolerance.stability;
    let non_decaying = set
        .stable()
        .any(|r| r.value.norm() >= 1.0 - tol && !(alpha.is_trivial() && (r.value - 1.0).norm() < tol));
    Ok(Correlation {
        alpha,
        cutoff,
        values,
        limit,
        rate,
        leading,
        non_decaying,
    })
}

pub fn run_correlation(cfg: &ExperimentConfig, dir: &Path) -> Result<Report, RunError> {
    let r = correlation(cfg)?;
    let mut out = Outputs::new(dir, cfg)?;
    let mut csv = String::from("n,re,im,abs_diff\n");
    for (n, z) in r.values.iter().enumerate() {
        let _ = writeln!(csv, "{n},{},{},{}", z.re, z.im, (z - r.limit).norm());
    }
    out.write("correlation.csv", csv.as_bytes())?;
    let summary_csv = format!(
        "alpha,cutoff,limit_re,limit_im,rate,leading,non_decaying\n{},{},{},{},{},{},{}\n",
        r.alpha, r.cutoff, r.limit.re, r.limit.im, r.rate, r.leading, r.non_decaying
    );
    out.write("correlation_fit.csv", summary_csv.as_bytes())?;

    let pts: Vec<(f64, f64)> = r
        .values
        .iter()
        .enumerate()
        .map(|(n, z)| (n as f64, (z - r.limit).norm()))
        .filter(|p| p.1 > 0.0)
        .map(|(n, v)| (n, v.log10()))
        .collect();
    let mut plot = Plot::new(
        &format!("Correlation decay, rate {:.4} (|λ₁| = {:.4})", r.rate, r.leading),
        Plot::range_of(pts.iter().map(|p| p.0)),
        Plot::range_of(pts.iter().map(|p| p.1)),
    )
    .labels("n", "log₁₀ |C(n) − C∞|");
    plot.line(pts.clone(), "steelblue", false);
    plot.points(pts, "steelblue", 3.0);
    out.write("correlation.svg", plot.render().as_bytes())?;
    out.report.summary = format!(
        "block {}: fitted rate {:.4}, leading resonance modulus {:.4}{}",
        r.alpha,
        r.rate,
        r.leading,
        if r.non_decaying {
            ", non-decaying (eigenvalue on the unit circle)"
        } else {
            ""
        }
    );
    Ok(out.report)
}
