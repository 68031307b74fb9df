use nalgebra::Vector3;

use super::PhasePoint;
use crate::dynamics::{Cocycle, CocycleSU2, CocycleU1, ExpandingMap, Word};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre_unit;
use crate::su2::{adjoint_rotation, rotation_about};

/// `H(x, n) = u(x)·n`.
pub fn h_field(c: &CocycleSU2, x: f64, n: &Vector3<f64>) -> f64 {
    c.su2_data(x).u.dot(n)
}

/// `n·∫₀¹ R̃_{tΩ(x)} Ω'(x) dt` for exponential cocycles, with `R̃_v` the
/// right-handed rotation by `|v|` about `v`.
pub fn h_field_integral(c: &CocycleSU2, x: f64, n: &Vector3<f64>) -> Option<f64> {
    let (om, dom) = c.omega(x)?;
    let (t, w) = gauss_legendre_unit(64);
    let v: Vector3<f64> = t
        .iter()
        .zip(&w)
        .map(|(t, w)| rotation_about(&(om * *t)) * dom * *w)
        .sum();
    Some(v.dot(n))
}

pub fn canonical_map_u1(map: &ExpandingMap, c: &CocycleU1, letter: u32, p: &PhasePoint) -> Result<PhasePoint> {
    let y = map.inverse_branch(letter, p.x)?;
    let (_, dom) = c.u1_phase(y);
    Ok(PhasePoint::new(y, map.derivative(y) * p.xi + dom))
}

pub fn canonical_map_su2(map: &ExpandingMap, c: &CocycleSU2, letter: u32, p: &PhasePoint) -> Result<PhasePoint> {
    let n =
        p.n.ok_or_else(|| Error::GroupMismatch("SU(2) map needs a sphere component".into()))?;
    let y = map.inverse_branch(letter, p.x)?;
    let d = c.su2_data(y);
    Ok(PhasePoint::with_sphere(
        y,
        map.derivative(y) * p.xi + d.u.dot(&n),
        adjoint_rotation(&d.tau) * n,
    ))
}

pub fn canonical_map(map: &ExpandingMap, c: &Cocycle, letter: u32, p: &PhasePoint) -> Result<PhasePoint> {
    match c {
        Cocycle::U1(c) => canonical_map_u1(map, c, letter, p),
        Cocycle::SU2(c) => canonical_map_su2(map, c, letter, p),
    }
}

/// `F_ε^n`, first letter applied first.
pub fn forward_orbit(map: &ExpandingMap, c: &Cocycle, word: &Word, p: &PhasePoint) -> Result<PhasePoint> {
    word.letters()
        .iter()
        .try_fold(*p, |q, &l| canonical_map(map, c, l as u32, &q))
}

/// The single-valued inverse `F^{-n}`.
pub fn inverse_orbit(map: &ExpandingMap, c: &Cocycle, n: usize, p: &PhasePoint) -> Result<PhasePoint> {
    let (mut x, mut d) = (p.x, 1.0);
    let mut acc = 0.0;
    let mut sphere = p.n;
    for _ in 0..n {
        let h = match (c, sphere) {
            (Cocycle::U1(c), _) => c.u1_phase(x).1,
            (Cocycle::SU2(c), Some(s)) => {
                let data = c.su2_data(x);
                let back = adjoint_rotation(&data.tau).transpose() * s;
                sphere = Some(back);
                data.u.dot(&back)
            }
            (Cocycle::SU2(_), None) => return Err(Error::GroupMismatch("SU(2) map needs a sphere component".into())),
        };
        acc += d * h;
        let (nx, de) = map.eval(x);
        d *= de;
        x = nx;
    }
    Ok(PhasePoint {
        x,
        xi: (p.xi - acc) / d,
        n: sphere,
    })
}

/// `S_ε(x[, n])`, the backward graph of a word.
pub fn backward_graph(map: &ExpandingMap, c: &Cocycle, word: &Word, x: f64, n: Option<&Vector3<f64>>) -> Result<f64> {
    let mut y = x;
    let mut d = 1.0;
    let mut s = 0.0;
    let mut sphere = n.copied();
    if matches!(c, Cocycle::SU2(_)) && sphere.is_none() {
        return Err(Error::GroupMismatch("SU(2) graph needs a sphere point".into()));
    }
    for &l in word.letters() {
        y = map.inverse_branch(l as u32, y)?;
        d *= map.derivative(y);
        let h = match c {
            Cocycle::U1(c) => c.u1_phase(y).1,
            Cocycle::SU2(c) => {
                let data = c.su2_data(y);
                let prev = sphere.expect("checked above");
                sphere = Some(adjoint_rotation(&data.tau) * prev);
                data.u.dot(&prev)
            }
        };
        s -= h / d;
    }
    Ok(s)
}

/// `sup |f|` over the circle: a 4096-point grid refined by golden-section search.
pub fn sup_norm_on_circle<F: Fn(f64) -> f64>(f: F) -> f64 {
    const GRID: usize = 4096;
    let g = |x: f64| f(x).abs();
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..GRID {
        let v = g(i as f64 / GRID as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let h = 1.0 / GRID as f64;
    let (mut a, mut b) = (best_i as f64 * h - h, best_i as f64 * h + h);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..60 {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    best.max(gc).max(gd)
}

/// `‖Ω'‖_∞` or `max_{x,n} |H(x, n)| = ‖u‖_∞`.
fn momentum_kick_bound(c: &Cocycle) -> f64 {
    match c {
        Cocycle::U1(c) => {
            if c.phase.bandwidth() == 0 {
                0.0
            } else {
                sup_norm_on_circle(|x| c.u1_phase(x).1)
            }
        }
        Cocycle::SU2(c) => {
            if c.harmonic_weight() == 0.0 {
                0.0
            } else {
                sup_norm_on_circle(|x| c.su2_data(x).u.norm())
            }
        }
    }
}

/// Radius `R` beyond which every branch expands momentum by at least `kappa`.
pub fn escape_radius(map: &ExpandingMap, c: &Cocycle, kappa: f64) -> Result<f64> {
    let e = map.e_min();
    if !(kappa > 1.0 && kappa < e) {
        return Err(Error::KappaOutOfRange { kappa, e_min: e });
    }
    Ok(momentum_kick_bound(c) / (e - kappa))
}

/// Uniform bound on every backward graph.
pub fn s_max(map: &ExpandingMap, c: &Cocycle) -> f64 {
    momentum_kick_bound(c) / (map.e_min() - 1.0)
}
