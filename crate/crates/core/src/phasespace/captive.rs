use std::f64::consts::TAU;

use nalgebra::Vector3;
use rayon::prelude::*;

use super::trapped::fibonacci_sphere;
use crate::dynamics::{Cocycle, ExpandingMap};
use crate::error::{Error, Result};
use crate::su2::adjoint_rotation;

/// Placement of the sphere starting points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SphereLayout {
    #[default]
    Fibonacci,
    /// Evenly spaced on the great circle `n₃ = 0`, at half-step angles.
    Equator,
}

/// Starting points for [`captive_counts`]: `x` cell centres, `ξ` evenly
/// spaced on `[-R, R]` (endpoints included, plus `ξ = 0` when `xi` is
/// even), `sphere` points on `S²`.
#[derive(Clone, Copy, Debug)]
pub struct CaptiveGrid {
    pub x: usize,
    pub xi: usize,
    pub sphere: usize,
    pub layout: SphereLayout,
}

impl Default for CaptiveGrid {
    fn default() -> Self {
        Self {
            x: 64,
            xi: 64,
            sphere: 0,
            layout: SphereLayout::Fibonacci,
        }
    }
}

fn sphere_points(grid: &CaptiveGrid) -> Vec<Vector3<f64>> {
    match grid.layout {
        SphereLayout::Fibonacci => fibonacci_sphere(grid.sphere),
        SphereLayout::Equator => (0..grid.sphere)
            .map(|i| {
                let phi = TAU * (i as f64 + 0.5) / grid.sphere as f64;
                Vector3::new(phi.cos(), phi.sin(), 0.0)
            })
            .collect(),
    }
}

/// `N(1), …, N(n_max)`: for each depth, the largest number of words whose
/// orbit from a single starting point stays in `|ξ| ≤ R`.
pub fn captive_counts(
    map: &ExpandingMap,
    c: &Cocycle,
    n_max: usize,
    grid: &CaptiveGrid,
    radius: f64,
) -> Result<Vec<u64>> {
    if n_max > 30 {
        return Err(Error::InvalidArgument(format!("depth {n_max} exceeds 30")));
    }
    let spheres: Vec<Option<Vector3<f64>>> = match c {
        Cocycle::U1(_) => vec![None],
        Cocycle::SU2(_) if grid.sphere > 0 => sphere_points(grid).into_iter().map(Some).collect(),
        Cocycle::SU2(_) => return Err(Error::GroupMismatch("SU(2) counting needs a sphere grid".into())),
    };
    let mut xis: Vec<f64> = if grid.xi <= 1 {
        vec![0.0]
    } else {
        (0..grid.xi)
            .map(|i| -radius + 2.0 * radius * i as f64 / (grid.xi - 1) as f64)
            .collect()
    };
    if grid.xi.is_multiple_of(2) {
        xis.insert(grid.xi / 2, 0.0);
    }
    let starts: Vec<(f64, f64, Option<Vector3<f64>>)> = (0..grid.x)
        .flat_map(|i| {
            let x = (i as f64 + 0.5) / grid.x as f64;
            let spheres = &spheres;
            xis.iter().flat_map(move |&xi| spheres.iter().map(move |s| (x, xi, *s)))
        })
        .collect();
    let per_start: Vec<Result<Vec<u64>>> = starts
        .par_iter()
        .map(|&(x, xi, n)| survivors(map, c, x, xi, n, n_max, radius))
        .collect();
    let mut best = vec![0u64; n_max];
    for counts in per_start {
        for (b, v) in best.iter_mut().zip(counts?) {
            *b = (*b).max(v);
        }
    }
    Ok(best)
}

pub fn captive_count(map: &ExpandingMap, c: &Cocycle, n: usize, grid: &CaptiveGrid, radius: f64) -> Result<u64> {
    if n == 0 {
        return Ok(1);
    }
    Ok(captive_counts(map, c, n, grid, radius)?[n - 1])
}

fn survivors(
    map: &ExpandingMap,
    c: &Cocycle,
    x: f64,
    xi: f64,
    n: Option<Vector3<f64>>,
    n_max: usize,
    radius: f64,
) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; n_max];
    let mut stack = vec![(0usize, x, xi, n)];
    while let Some((level, x, xi, n)) = stack.pop() {
        if level == n_max {
            continue;
        }
        for l in 0..map.degree() {
            let y = map.inverse_branch(l, x)?;
            let (xi2, n2) = match c {
                Cocycle::U1(c) => (map.derivative(y) * xi + c.u1_phase(y).1, None),
                Cocycle::SU2(c) => {
                    let d = c.su2_data(y);
                    let s = n.expect("sphere point");
                    (map.derivative(y) * xi + d.u.dot(&s), Some(adjoint_rotation(&d.tau) * s))
                }
            };
            if xi2.abs() <= radius {
                counts[level] += 1;
                stack.push((level + 1, y, xi2, n2));
            }
        }
    }
    Ok(counts)
}

/// One term of the gap bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapBound {
    pub n: usize,
    pub bound: f64,
    /// `bound^{1/(2n)}`.
    pub radius: f64,
}

/// `B(n) = (k/E_min)^n κ^{2m} + N(n−1)/E_min^n` for `n = 1..=counts.len()`,
/// where `counts[i] = N(i+1)` and `N(0) = 1`.
pub fn gap_bound(degree: u32, rate: f64, kappa: f64, order: f64, counts: &[u64]) -> Result<Vec<GapBound>> {
    if !(kappa > 1.0 && kappa < rate) {
        return Err(Error::KappaOutOfRange { kappa, e_min: rate });
    }
    if !(order < 0.0) {
        return Err(Error::InvalidArgument(format!("order {order} must be negative")));
    }
    let k = degree as f64;
    Ok((1..=counts.len())
        .map(|n| {
            let prev = if n == 1 { 1 } else { counts[n - 2] } as f64;
            let bound = (k / rate).powi(n as i32) * kappa.powf(2.0 * order) + prev / rate.powi(n as i32);
            GapBound {
                n,
                bound,
                radius: bound.powf(0.5 / n as f64),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::CocycleU1;

    #[test]
    fn flat_cocycle_keeps_everything() {
        let e = ExpandingMap::doubling();
        let c = Cocycle::U1(CocycleU1::trivial());
        let grid = CaptiveGrid {
            x: 4,
            xi: 1,
            ..Default::default()
        };
        let counts = captive_counts(&e, &c, 10, &grid, 0.0).unwrap();
        for (i, n) in counts.iter().enumerate() {
            assert_eq!(*n, 1 << (i + 1));
        }
    }

    #[test]
    fn worst_case_bound_has_no_gap() {
        let counts: Vec<u64> = (1..=30).map(|n| 1u64 << n).collect();
        let b = gap_bound(2, 2.0, 1.5, -1.0, &counts).unwrap();
        assert!((b[29].radius - 1.0).abs() < 0.05);
        let deep = gap_bound(2, 2.0, 1.5, -200.0, &counts).unwrap();
        assert!((deep[4].bound - counts[3] as f64 / 32.0).abs() < 1e-12);
    }
}
