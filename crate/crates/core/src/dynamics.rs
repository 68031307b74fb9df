//! Expanding circle maps, their inverse branches, and U(1)/SU(2) cocycles.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::OnceLock;

use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::TrigSeries;

const BRANCH_TOL: f64 = 1e-14;
const BRANCH_MAX_ITER: usize = 100;

/// Reduce to `[0, 1)`.
pub fn wrap(x: f64) -> f64 {
    let y = x - x.floor();
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

/// Signed distance on `R/Z`, in `[-1/2, 1/2)`.
pub fn circle_diff(a: f64, b: f64) -> f64 {
    let d = a - b;
    d - (d + 0.5).floor()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MapKind {
    /// `E(x) = kx mod 1`.
    Linear,
    /// `E(x) = kx + (a/2π) sin(2πx) mod 1`.
    Perturbed { amplitude: f64 },
}

/// A smooth degree-`k` expanding map of the circle.
#[derive(Debug)]
pub struct ExpandingMap {
    degree: u32,
    kind: MapKind,
    rate: OnceLock<f64>,
}

impl Clone for ExpandingMap {
    fn clone(&self) -> Self {
        let rate = OnceLock::new();
        if let Some(r) = self.rate.get() {
            let _ = rate.set(*r);
        }
        Self {
            degree: self.degree,
            kind: self.kind,
            rate,
        }
    }
}

impl PartialEq for ExpandingMap {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.kind == other.kind
    }
}

impl ExpandingMap {
    pub fn linear(degree: u32) -> Result<Self> {
        Self::new(degree, MapKind::Linear)
    }

    pub fn perturbed(degree: u32, amplitude: f64) -> Result<Self> {
        if amplitude == 0.0 {
            return Self::linear(degree);
        }
        Self::new(degree, MapKind::Perturbed { amplitude })
    }

    /// `x ↦ 2x mod 1`.
    pub fn doubling() -> Self {
        Self::linear(2).expect("doubling map is expanding")
    }

    pub fn new(degree: u32, kind: MapKind) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidMap(format!("degree {degree} < 2")));
        }
        if let MapKind::Perturbed { amplitude } = kind {
            if !amplitude.is_finite() || degree as f64 - amplitude.abs() <= 1.0 {
                return Err(Error::InvalidMap(format!(
                    "degree {degree} with amplitude {amplitude} is not uniformly expanding"
                )));
            }
        }
        Ok(Self {
            degree,
            kind,
            rate: OnceLock::new(),
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn amplitude(&self) -> f64 {
        match self.kind {
            MapKind::Linear => 0.0,
            MapKind::Perturbed { amplitude } => amplitude,
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, MapKind::Linear)
    }

    /// `min E'`.
    pub fn e_min(&self) -> f64 {
        self.degree as f64 - self.amplitude().abs()
    }

    /// Asymptotic expansion rate, estimated once with [`min_expansion`] at `n = 12`.
    pub fn expansion_rate(&self) -> f64 {
        *self.rate.get_or_init(|| {
            if self.is_linear() {
                self.degree as f64
            } else {
                min_expansion(self, 12, 1024).unwrap_or_else(|_| self.e_min())
            }
        })
    }

    /// The lift `R → R` with `lift(x + 1) = lift(x) + k`.
    pub fn lift(&self, x: f64) -> f64 {
        let k = self.degree as f64;
        match self.kind {
            MapKind::Linear => k * x,
            MapKind::Perturbed { amplitude } => k * x + amplitude / TAU * (TAU * x).sin(),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let k = self.degree as f64;
        match self.kind {
            MapKind::Linear => k,
            MapKind::Perturbed { amplitude } => k + amplitude * (TAU * x).cos(),
        }
    }

    /// `(E(x) mod 1, E'(x))`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        (wrap(self.lift(x)), self.derivative(x))
    }

    /// `(E^n(x), (E^n)'(x))`.
    pub fn iterate(&self, x: f64, n: usize) -> (f64, f64) {
        let (mut y, mut d) = (wrap(x), 1.0);
        for _ in 0..n {
            d *= self.derivative(y);
            y = wrap(self.lift(y));
        }
        (y, d)
    }

    /// The preimage `y ∈ [0, 1)` of `x` with `lift(y) = x + letter`.
    pub fn inverse_branch(&self, letter: u32, x: f64) -> Result<f64> {
        if letter >= self.degree {
            return Err(Error::InvalidLetter {
                letter,
                degree: self.degree,
            });
        }
        let x = wrap(x);
        let k = self.degree as f64;
        let target = x + letter as f64;
        if self.is_linear() {
            return Ok(target / k);
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut y = target / k;
        for _ in 0..BRANCH_MAX_ITER {
            let g = self.lift(y) - target;
            if g.abs() <= BRANCH_TOL {
                return Ok(wrap(y));
            }
            if g > 0.0 {
                hi = y;
            } else {
                lo = y;
            }
            let mut next = y - g / self.derivative(y);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - y).abs() <= BRANCH_TOL * 1e-2 {
                return Ok(wrap(next));
            }
            y = next;
        }
        Err(Error::BranchNonConvergence {
            branch: letter,
            x,
            iterations: BRANCH_MAX_ITER,
        })
    }

    /// Apply the inverse branches of `word`, first letter first. Returns the
    /// preimage and the derivative of `E^n` at it.
    pub fn word_preimage(&self, word: &Word, x: f64) -> Result<(f64, f64)> {
        let mut y = wrap(x);
        let mut d = 1.0;
        for &l in word.letters() {
            y = self.inverse_branch(l as u32, y)?;
            d *= self.derivative(y);
        }
        Ok((y, d))
    }

    /// The points `x_{ε|j}` and derivatives `(E^j)'(x_{ε|j})` for `j = 1..=n`.
    pub fn word_orbit(&self, word: &Word, x: f64) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::with_capacity(word.len());
        let mut y = wrap(x);
        let mut d = 1.0;
        for &l in word.letters() {
            y = self.inverse_branch(l as u32, y)?;
            d *= self.derivative(y);
            out.push((y, d));
        }
        Ok(out)
    }
}

/// Estimate `min_x ((E^n)'(x))^{1/n}` on a uniform grid.
pub fn min_expansion(map: &ExpandingMap, n: usize, grid: usize) -> Result<f64> {
    if n == 0 || grid < 64 {
        return Err(Error::InvalidArgument(format!(
            "min_expansion needs n >= 1 and grid >= 64, got n = {n}, grid = {grid}"
        )));
    }
    let mut best = f64::INFINITY;
    for i in 0..grid {
        let (_, d) = map.iterate(i as f64 / grid as f64, n);
        best = best.min(d);
    }
    Ok(best.powf(1.0 / n as f64).max(map.e_min()))
}

/// A finite sequence of inverse-branch labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<u8>,
}

impl Word {
    pub fn new(letters: Vec<u8>, degree: u32) -> Result<Self> {
        if let Some(&l) = letters.iter().find(|&&l| l as u32 >= degree) {
            return Err(Error::InvalidLetter {
                letter: l as u32,
                degree,
            });
        }
        Ok(Self { letters })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// The `index`-th word of length `len` in lexicographic order.
    pub fn from_index(mut index: u64, len: usize, degree: u32) -> Self {
        let mut letters = vec![0u8; len];
        for slot in letters.iter_mut().rev() {
            *slot = (index % degree as u64) as u8;
            index /= degree as u64;
        }
        Self { letters }
    }

    /// Parse a string of base-`degree` digits.
    pub fn parse(s: &str, degree: u32) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| {
                c.to_digit(36)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::InvalidArgument(format!("bad letter {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters, degree)
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The prefix `ε|j`.
    pub fn prefix(&self, j: usize) -> Word {
        Word {
            letters: self.letters[..j.min(self.len())].to_vec(),
        }
    }

    /// Concatenation `self` then `other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    pub fn push(&mut self, letter: u8) {
        self.letters.push(letter);
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.letters {
            write!(f, "{}", std::char::from_digit(l as u32, 36).unwrap_or('?'))?;
        }
        Ok(())
    }
}

/// `x ↦ e^{iν Ω(x)}`, stored through the real phase `Ω`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CocycleU1 {
    pub phase: TrigSeries,
}

impl CocycleU1 {
    pub fn new(phase: TrigSeries) -> Self {
        Self { phase }
    }

    pub fn trivial() -> Self {
        Self::default()
    }

    /// `(Ω(x), Ω'(x))`.
    pub fn u1_phase(&self, x: f64) -> (f64, f64) {
        self.phase.eval_with_derivative(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(Axis::X),
            1 => Some(Axis::Y),
            2 => Some(Axis::Z),
            _ => None,
        }
    }

    pub fn unit(self) -> Vector3<f64> {
        let mut v = Vector3::zeros();
        v[self.index()] = 1.0;
        v
    }
}

/// One factor `exp(i ω(x) J_axis)` of a product cocycle.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub axis: Axis,
    pub angle: TrigSeries,
}

impl Factor {
    pub fn new(axis: Axis, angle: TrigSeries) -> Self {
        Self { axis, angle }
    }
}

/// An SU(2)-valued cocycle `τ: S¹ → SU(2)`.
#[derive(Clone, Debug, PartialEq)]
pub enum CocycleSU2 {
    /// `τ(x) = exp(i Ω(x)·J)`.
    Exponential([TrigSeries; 3]),
    /// `τ(x) = Π_l exp(i ω_l(x) J_{a_l})`, leftmost factor first.
    Product(Vec<Factor>),
}

/// `τ(x)` in the fundamental representation together with the left
/// log-derivative `u(x)`, defined by `u·J = -i τ⁻¹ τ'`.
#[derive(Clone, Debug, PartialEq)]
pub struct Su2Data {
    pub tau: Matrix2<Complex64>,
    pub tau_prime: Matrix2<Complex64>,
    pub u: Vector3<f64>,
}

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Pauli matrices; `J_a = σ_a / 2` in the fundamental representation.
pub fn pauli() -> [Matrix2<Complex64>; 3] {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    [
        Matrix2::new(o, l, l, o),
        Matrix2::new(o, -I, I, o),
        Matrix2::new(l, o, o, -l),
    ]
}

fn sigma_dot(v: &Vector3<f64>) -> Matrix2<Complex64> {
    let p = pauli();
    p[0] * Complex64::from(v[0]) + p[1] * Complex64::from(v[1]) + p[2] * Complex64::from(v[2])
}

/// `exp(i θ J_axis)` in the fundamental representation.
pub fn fundamental_axis_exp(axis: Axis, theta: f64) -> Matrix2<Complex64> {
    let (s, c) = (0.5 * theta).sin_cos();
    Matrix2::identity() * Complex64::from(c) + pauli()[axis.index()] * (I * s)
}

/// `exp(i v·J)` in the fundamental representation.
pub fn fundamental_exp(v: &Vector3<f64>) -> Matrix2<Complex64> {
    let r = v.norm();
    Matrix2::identity() * Complex64::from((0.5 * r).cos()) + sigma_dot(v) * (I * sin_half_over(r))
}

/// `sin(r/2)/r`, regular at zero.
fn sin_half_over(r: f64) -> f64 {
    if r.abs() < 1e-3 {
        let r2 = r * r;
        0.5 - r2 / 48.0 + r2 * r2 / 3840.0
    } else {
        (0.5 * r).sin() / r
    }
}

/// `d/dr [sin(r/2)/r] / r`, regular at zero.
fn sin_half_over_derivative(r: f64) -> f64 {
    if r.abs() < 1e-2 {
        let r2 = r * r;
        -1.0 / 24.0 + r2 / 960.0 - r2 * r2 / 80640.0
    } else {
        (0.5 * r * (0.5 * r).cos() - (0.5 * r).sin()) / (r * r * r)
    }
}

/// Components of `X` in the basis `J_l`, for `X` in `su(2)` (up to `i`).
fn su2_components(x: &Matrix2<Complex64>) -> Vector3<f64> {
    let p = pauli();
    Vector3::new((p[0] * x).trace().re, (p[1] * x).trace().re, (p[2] * x).trace().re)
}

impl CocycleSU2 {
    /// The exponential-form angle vector and its derivative at `x`.
    pub fn omega(&self, x: f64) -> Option<(Vector3<f64>, Vector3<f64>)> {
        match self {
            CocycleSU2::Exponential(c) => {
                let (a, da) = c[0].eval_with_derivative(x);
                let (b, db) = c[1].eval_with_derivative(x);
                let (z, dz) = c[2].eval_with_derivative(x);
                Some((Vector3::new(a, b, z), Vector3::new(da, db, dz)))
            }
            CocycleSU2::Product(_) => None,
        }
    }

    /// Σ over all angle functions of `Σ n (|a_n| + |b_n|)`.
    pub fn harmonic_weight(&self) -> f64 {
        match self {
            CocycleSU2::Exponential(c) => c.iter().map(TrigSeries::harmonic_weight).sum(),
            CocycleSU2::Product(f) => f.iter().map(|f| f.angle.harmonic_weight()).sum(),
        }
    }

    /// Upper bound on `sup |u|`.
    pub fn log_derivative_bound(&self) -> f64 {
        TAU * self.harmonic_weight()
    }

    pub fn su2_data(&self, x: f64) -> Su2Data {
        let (tau, tau_prime) = match self {
            CocycleSU2::Exponential(_) => {
                let (om, dom) = self.omega(x).expect("exponential form");
                let r = om.norm();
                let f = sin_half_over(r);
                let g = sin_half_over_derivative(r);
                let dot = om.dot(&dom);
                let tau = Matrix2::identity() * Complex64::from((0.5 * r).cos()) + sigma_dot(&om) * (I * f);
                let dtau = Matrix2::identity() * Complex64::from(-0.5 * f * dot)
                    + sigma_dot(&om) * (I * (g * dot))
                    + sigma_dot(&dom) * (I * f);
                (tau, dtau)
            }
            CocycleSU2::Product(factors) => {
                let mats: Vec<_> = factors
                    .iter()
                    .map(|fa| {
                        let (w, dw) = fa.angle.eval_with_derivative(x);
                        let m = fundamental_axis_exp(fa.axis, w);
                        let dm = pauli()[fa.axis.index()] * (I * (0.5 * dw)) * m;
                        (m, dm)
                    })
                    .collect();
                let mut tau = Matrix2::identity();
                let mut dtau = Matrix2::zeros();
                for (m, dm) in &mats {
                    dtau = dtau * m + tau * dm;
                    tau *= m;
                }
                (tau, dtau)
            }
        };
        let x_mat = (tau.adjoint() * tau_prime) * (-I);
        Su2Data {
            tau,
            tau_prime,
            u: su2_components(&x_mat),
        }
    }
}

/// Either kind of cocycle.
#[derive(Clone, Debug, PartialEq)]
pub enum Cocycle {
    U1(CocycleU1),
    SU2(CocycleSU2),
}

impl From<CocycleU1> for Cocycle {
    fn from(c: CocycleU1) -> Self {
        Cocycle::U1(c)
    }
}

impl From<CocycleSU2> for Cocycle {
    fn from(c: CocycleSU2) -> Self {
        Cocycle::SU2(c)
    }
}

impl Cocycle {
    pub fn is_u1(&self) -> bool {
        matches!(self, Cocycle::U1(_))
    }
}
