use std::f64::consts::PI;
use std::io::Write;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::canonical::{escape_radius, s_max};
use super::PhasePoint;
use crate::dynamics::{Cocycle, ExpandingMap, Word};
use crate::error::{Error, Result};
use crate::su2::adjoint_rotation;
use crate::transfer::Group;

/// A cloud point with the word that generated it, stored as its
/// lexicographic index among words of length `depth`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CloudPoint {
    pub point: PhasePoint,
    pub word_index: u64,
}

/// Points on the graphs `S_ε` for words of a fixed depth.
#[derive(Clone, Debug)]
pub struct TrappedCloud {
    pub group: Group,
    pub degree: u32,
    pub points: Vec<CloudPoint>,
    pub depth: usize,
    /// Distance bound to the trapped set, in metric units.
    pub accuracy: f64,
    pub s_max: f64,
    pub escape_radius: f64,
    /// Momentum is measured as `ξ / momentum_scale` by the box metric.
    pub momentum_scale: f64,
    /// Whether every word was enumerated.
    pub exhaustive: bool,
}

impl TrappedCloud {
    /// Wrap an arbitrary point set, with zero accuracy bound.
    pub fn from_points(group: Group, points: Vec<PhasePoint>) -> Self {
        let s = points.iter().map(|p| p.xi.abs()).fold(0.0, f64::max);
        Self {
            group,
            degree: 2,
            points: points
                .into_iter()
                .map(|point| CloudPoint { point, word_index: 0 })
                .collect(),
            depth: 0,
            accuracy: 0.0,
            s_max: s,
            escape_radius: 0.0,
            momentum_scale: 1.0,
            exhaustive: true,
        }
    }

    pub fn word(&self, p: &CloudPoint) -> Word {
        Word::from_index(p.word_index, self.depth, self.degree)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct TrappedOptions {
    /// Escape contraction; defaults to the midpoint of `(1, e_min)`.
    pub kappa: Option<f64>,
    pub momentum_scale: f64,
    pub budget: u64,
    pub seed: u64,
    pub force_enumeration: bool,
}

impl Default for TrappedOptions {
    fn default() -> Self {
        Self {
            kappa: None,
            momentum_scale: 1.0,
            budget: 1 << 22,
            seed: 0x5EED,
            force_enumeration: false,
        }
    }
}

/// `n` points of the Fibonacci lattice on `S²`.
pub fn fibonacci_sphere(n: usize) -> Vec<Vector3<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Vector3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// Smallest depth whose distance bound `(R + S_max) e_min^{-n}` is at most
/// `delta / 2` in units where momentum is divided by `scale`.
pub fn trapped_depth(e_min: f64, radius: f64, s_max: f64, delta: f64, scale: f64) -> usize {
    let ratio = 2.0 * (radius + s_max) / (delta * scale);
    if ratio <= 1.0 {
        return 1;
    }
    ((ratio.ln() / e_min.ln()).ceil() as usize).max(1)
}

pub fn sample_trapped_set(
    map: &ExpandingMap,
    c: &Cocycle,
    delta: f64,
    x_grid: usize,
    sphere_grid: Option<usize>,
) -> Result<TrappedCloud> {
    sample_trapped_set_with(map, c, delta, x_grid, sphere_grid, &TrappedOptions::default())
}

/// Sample `K` on `x_grid` base points (times `sphere_grid` Fibonacci points for SU(2)).
pub fn sample_trapped_set_with(
    map: &ExpandingMap,
    c: &Cocycle,
    delta: f64,
    x_grid: usize,
    sphere_grid: Option<usize>,
    opts: &TrappedOptions,
) -> Result<TrappedCloud> {
    if !(delta > 0.0) || x_grid == 0 {
        return Err(Error::InvalidArgument(format!(
            "need delta > 0 and a non-empty grid, got delta = {delta}, x_grid = {x_grid}"
        )));
    }
    let e = map.e_min();
    let kappa = opts.kappa.unwrap_or(0.5 * (1.0 + e));
    let radius = escape_radius(map, c, kappa)?;
    let smax = s_max(map, c);
    let depth = trapped_depth(e, radius, smax, delta, opts.momentum_scale);
    let accuracy = (radius + smax) * e.powi(-(depth as i32)) / opts.momentum_scale;
    let k = map.degree();
    let words = (k as u128).checked_pow(depth as u32).filter(|w| *w <= u64::MAX as u128);
    let words = words.ok_or_else(|| Error::InvalidArgument(format!("depth {depth} overflows word indices")))? as u64;

    let spheres: Vec<Option<Vector3<f64>>> = match (c, sphere_grid) {
        (Cocycle::U1(_), _) => vec![None],
        (Cocycle::SU2(_), Some(n)) if n > 0 => fibonacci_sphere(n).into_iter().map(Some).collect(),
        (Cocycle::SU2(_), _) => return Err(Error::GroupMismatch("SU(2) sampling needs a sphere grid".into())),
    };
    let bases: Vec<(f64, Option<Vector3<f64>>)> = (0..x_grid)
        .flat_map(|i| {
            let x = (i as f64 + 0.5) / x_grid as f64;
            spheres.iter().map(move |s| (x, *s))
        })
        .collect();
    let required = bases.len() as u128 * words as u128;
    let exhaustive = required <= opts.budget as u128;
    if !exhaustive && opts.force_enumeration {
        return Err(Error::BudgetExceeded {
            required,
            budget: opts.budget as u128,
        });
    }
    let per_base = if exhaustive {
        words
    } else {
        (opts.budget / bases.len() as u64).max(1)
    };
    let chunks: Vec<Result<Vec<CloudPoint>>> = bases
        .par_iter()
        .enumerate()
        .map(|(bi, &(x, n))| {
            if exhaustive {
                enumerate_words(map, c, x, n, depth)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(bi as u64);
                (0..per_base)
                    .map(|_| {
                        let idx = rng.random_range(0..words);
                        let w = Word::from_index(idx, depth, k);
                        let (xi, _) = graph_value(map, c, w.letters(), x, n)?;
                        Ok(CloudPoint {
                            point: PhasePoint { x, xi, n },
                            word_index: idx,
                        })
                    })
                    .collect()
            }
        })
        .collect();
    let mut points = Vec::with_capacity((bases.len() as u64 * per_base) as usize);
    for chunk in chunks {
        points.extend(chunk?);
    }
    Ok(TrappedCloud {
        group: if c.is_u1() { Group::U1 } else { Group::SU2 },
        degree: k,
        points,
        depth,
        accuracy,
        s_max: smax,
        escape_radius: radius,
        momentum_scale: opts.momentum_scale,
        exhaustive,
    })
}

/// One graph value and the final transported sphere point.
fn graph_value(
    map: &ExpandingMap,
    c: &Cocycle,
    letters: &[u8],
    x: f64,
    n: Option<Vector3<f64>>,
) -> Result<(f64, Option<Vector3<f64>>)> {
    let (mut y, mut d, mut s, mut sphere) = (x, 1.0, 0.0, n);
    for &l in letters {
        (y, d, s, sphere) = step(map, c, l, y, d, s, sphere)?;
    }
    Ok((s, sphere))
}

type State = (f64, f64, f64, Option<Vector3<f64>>);

fn step(
    map: &ExpandingMap,
    c: &Cocycle,
    letter: u8,
    y: f64,
    d: f64,
    s: f64,
    sphere: Option<Vector3<f64>>,
) -> Result<State> {
    let y = map.inverse_branch(letter as u32, y)?;
    let d = d * map.derivative(y);
    match c {
        Cocycle::U1(c) => Ok((y, d, s - c.u1_phase(y).1 / d, sphere)),
        Cocycle::SU2(c) => {
            let data = c.su2_data(y);
            let prev = sphere.expect("sphere point");
            Ok((
                y,
                d,
                s - data.u.dot(&prev) / d,
                Some(adjoint_rotation(&data.tau) * prev),
            ))
        }
    }
}

/// Depth-first enumeration of all words, sharing prefixes.
fn enumerate_words(
    map: &ExpandingMap,
    c: &Cocycle,
    x: f64,
    n: Option<Vector3<f64>>,
    depth: usize,
) -> Result<Vec<CloudPoint>> {
    let k = map.degree() as u64;
    let mut out = Vec::with_capacity(k.pow(depth as u32) as usize);
    let mut stack: Vec<(usize, u64, State)> = vec![(0, 0, (x, 1.0, 0.0, n))];
    while let Some((level, index, state)) = stack.pop() {
        if level == depth {
            out.push(CloudPoint {
                point: PhasePoint { x, xi: state.2, n },
                word_index: index,
            });
            continue;
        }
        for l in (0..k).rev() {
            let (y, d, s, sphere) = state;
            let next = step(map, c, l as u8, y, d, s, sphere)?;
            stack.push((level + 1, index * k + l, next));
        }
    }
    Ok(out)
}

/// CSV with columns `x, xi[, nx, ny, nz], depth, word`.
pub fn write_cloud_csv<W: Write>(mut w: W, cloud: &TrappedCloud) -> Result<()> {
    let sphere = cloud.group == Group::SU2;
    if sphere {
        writeln!(w, "x,xi,nx,ny,nz,depth,word")?;
    } else {
        writeln!(w, "x,xi,depth,word")?;
    }
    for p in &cloud.points {
        let word = cloud.word(p);
        match p.point.n {
            Some(n) if sphere => writeln!(
                w,
                "{},{},{},{},{},{},{}",
                p.point.x, p.point.xi, n[0], n[1], n[2], cloud.depth, word
            )?,
            _ => writeln!(w, "{},{},{},{}", p.point.x, p.point.xi, cloud.depth, word)?,
        }
    }
    Ok(())
}
