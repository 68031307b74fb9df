use std::f64::consts::{PI, TAU};
use std::io::Write;

use super::trapped::TrappedCloud;
use super::PhasePoint;
use crate::dynamics::circle_diff;
use crate::error::{Error, Result};

/// Grid parameters for box counting under the sup-product metric
/// (periodic `x`, `ξ / momentum_scale`, chordal distance on `S²`).
#[derive(Clone, Copy, Debug)]
pub struct BoxGrid {
    pub momentum_scale: f64,
    /// Cell side; `None` uses `δ/4`.
    pub cell: Option<f64>,
}

impl Default for BoxGrid {
    fn default() -> Self {
        Self {
            momentum_scale: 1.0,
            cell: None,
        }
    }
}

/// `Vol(A^δ)` for the cloud, refusing clouds that are too coarse for `δ`.
pub fn box_volume(cloud: &TrappedCloud, delta: f64) -> Result<f64> {
    if cloud.accuracy > delta / 2.0 {
        return Err(Error::UnderResolvedCloud {
            accuracy: cloud.accuracy,
            delta,
        });
    }
    let pts: Vec<PhasePoint> = cloud.points.iter().map(|p| p.point).collect();
    let grid = BoxGrid {
        momentum_scale: cloud.momentum_scale,
        cell: None,
    };
    box_volume_points(&pts, delta, &grid)
}

/// `Vol(A^δ)` for a raw point set: the number of cells whose centre lies
/// within sup-distance `δ` of some point, times the cell volume.
pub fn box_volume_points(points: &[PhasePoint], delta: f64, grid: &BoxGrid) -> Result<f64> {
    let h = grid.cell.unwrap_or(delta / 4.0);
    if !(delta > 0.0) || delta < 2.0 * h {
        return Err(Error::CellTooCoarse { delta, cell: h });
    }
    if points.is_empty() {
        return Ok(0.0);
    }
    let scale = grid.momentum_scale;
    let sphere = points[0].n.is_some();

    let nx = (1.0 / h).ceil() as usize;
    let hx = 1.0 / nx as f64;
    let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
        (a.min(p.xi / scale), b.max(p.xi / scale))
    });
    let xi0 = lo - delta - h;
    let nxi = (((hi + delta + h) - xi0) / h).ceil() as usize;
    let (nz, nphi) = if sphere {
        ((2.0 / h).ceil() as usize, (TAU / h).ceil() as usize)
    } else {
        (1, 1)
    };
    let ns = nz * nphi;
    let total = nx as u128 * nxi as u128 * ns as u128;
    if total > 1u128 << 33 {
        return Err(Error::InvalidArgument(format!(
            "box grid of {total} cells is too large"
        )));
    }
    let mut bits = vec![0u64; (total as usize).div_ceil(64)];
    let mut sphere_cells = Vec::new();
    for p in points {
        // x cells with |centre - x| ≤ δ on the circle
        let cx = p.x / hx - 0.5;
        let (ia, ib) = ((cx - delta / hx).ceil() as i64, (cx + delta / hx).floor() as i64);
        let xs: Vec<usize> = (ia..=ib)
            .filter(|i| circle_diff((*i as f64 + 0.5) * hx, p.x).abs() <= delta)
            .map(|i| i.rem_euclid(nx as i64) as usize)
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let ci = (p.xi / scale - xi0) / h - 0.5;
        let ja = (ci - delta / h).ceil().max(0.0) as usize;
        let jb = ((ci + delta / h).floor() as usize).min(nxi - 1);
        sphere_cells.clear();
        match p.n {
            Some(n) if sphere => chordal_cells(&n, delta, nz, nphi, &mut sphere_cells),
            _ => sphere_cells.push(0),
        }
        for &ix in &xs {
            for j in ja..=jb {
                let base = (ix * nxi + j) * ns;
                for &s in &sphere_cells {
                    let b = base + s;
                    bits[b >> 6] |= 1 << (b & 63);
                }
            }
        }
    }
    let count: u64 = bits.iter().map(|w| w.count_ones() as u64).sum();
    let cell_area = if sphere { 4.0 * PI / ns as f64 } else { 1.0 };
    Ok(count as f64 * hx * h * cell_area)
}

/// Equal-area sphere cells (uniform in `z` and `φ`) whose centres lie within
/// chordal distance `delta` of `n`.
fn chordal_cells(n: &nalgebra::Vector3<f64>, delta: f64, nz: usize, nphi: usize, out: &mut Vec<usize>) {
    let hz = 2.0 / nz as f64;
    let hphi = TAU / nphi as f64;
    let rho_p = (n[0] * n[0] + n[1] * n[1]).sqrt();
    let phi_p = n[1].atan2(n[0]);
    for iz in 0..nz {
        let z = -1.0 + (iz as f64 + 0.5) * hz;
        let dz = z - n[2];
        if dz.abs() > delta {
            continue;
        }
        let rho = (1.0 - z * z).max(0.0).sqrt();
        // chord² = dz² + ρ² + ρ_p² − 2ρρ_p cos Δφ
        let denom = 2.0 * rho * rho_p;
        let num = dz * dz + rho * rho + rho_p * rho_p - delta * delta;
        let reach = if denom <= 0.0 {
            if num <= 0.0 {
                PI
            } else {
                continue;
            }
        } else {
            let c = num / denom;
            if c > 1.0 {
                continue;
            }
            c.max(-1.0).acos()
        };
        if reach >= PI {
            out.extend((0..nphi).map(|k| iz * nphi + k));
            continue;
        }
        let cp = phi_p / hphi - 0.5;
        let (ka, kb) = ((cp - reach / hphi).ceil() as i64, (cp + reach / hphi).floor() as i64);
        let mut seen = std::collections::BTreeSet::new();
        for k in ka..=kb {
            seen.insert(k.rem_euclid(nphi as i64) as usize);
        }
        out.extend(seen.into_iter().map(|k| iz * nphi + k));
    }
}

/// Box-counting data and the fitted Minkowski dimension.
#[derive(Clone, Debug)]
pub struct BoxCountResult {
    pub deltas: Vec<f64>,
    pub volumes: Vec<f64>,
    pub ambient_dim: usize,
    pub slope: f64,
    pub dimension: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
}

/// Least-squares fit of `log Vol` against `log δ`; the slope is the codimension.
pub fn minkowski_dimension(deltas: &[f64], volumes: &[f64], ambient_dim: usize) -> Result<BoxCountResult> {
    if deltas.len() != volumes.len() {
        return Err(Error::LengthMismatch {
            left: deltas.len(),
            right: volumes.len(),
        });
    }
    let mut pairs: Vec<(f64, f64)> = deltas.iter().copied().zip(volumes.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let span = if pairs.is_empty() {
        0.0
    } else {
        (pairs[pairs.len() - 1].0 / pairs[0].0).log10()
    };
    if pairs.len() < 5 || span < 1.5 - 1e-9 {
        return Err(Error::InsufficientRange {
            count: pairs.len(),
            decades: span,
        });
    }
    if pairs.iter().any(|p| !(p.1 > 0.0)) || pairs.windows(2).any(|w| w[1].1 < w[0].1) {
        return Err(Error::NonMonotoneVolumes);
    }
    let lx: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let residual = (lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - icept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let d = ambient_dim as f64;
    Ok(BoxCountResult {
        deltas: pairs.iter().map(|p| p.0).collect(),
        volumes: pairs.iter().map(|p| p.1).collect(),
        ambient_dim,
        slope,
        dimension: (d - slope).clamp(0.0, d),
        residual,
    })
}

/// CSV with columns `delta, volume, log_delta, log_volume`.
pub fn write_box_csv<W: Write>(mut w: W, r: &BoxCountResult) -> Result<()> {
    writeln!(w, "delta,volume,log_delta,log_volume")?;
    for (d, v) in r.deltas.iter().zip(&r.volumes) {
        writeln!(w, "{d},{v},{},{}", d.ln(), v.ln())?;
    }
    Ok(())
}
