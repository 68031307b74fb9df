//! Spin-`j` representations, coherent states and anti-Wick quantization on `S²`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, Vector3};
use num_complex::Complex64;

use crate::dynamics::{pauli, Axis, CocycleSU2};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, gauss_legendre_unit};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Completeness residual above which a sphere quadrature is rejected.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// The `(2j+1)`-dimensional irreducible representation of `su(2)`.
///
/// Basis index `i` carries the `J₃` eigenvalue `m = i - j`; index 0 is the
/// lowest weight, the coherent state at the south pole.
#[derive(Clone, Debug)]
pub struct SpinRep {
    twice_j: u32,
    generators: [DMatrix<Complex64>; 3],
    /// Orthonormal eigenbases of `J₁`, `J₂` with eigenvalues `m` ascending.
    bases: [DMatrix<Complex64>; 2],
}

impl SpinRep {
    /// Spin `twice_j / 2`.
    pub fn new(twice_j: u32) -> Self {
        let d = twice_j as usize + 1;
        let j = twice_j as f64 / 2.0;
        let mut jp = DMatrix::<Complex64>::zeros(d, d);
        for i in 0..d - 1 {
            let m = i as f64 - j;
            jp[(i + 1, i)] = Complex64::from((j * (j + 1.0) - m * (m + 1.0)).sqrt());
        }
        let jm = jp.adjoint();
        let j1 = (&jp + &jm) * Complex64::from(0.5);
        let j2 = (&jp - &jm) * (-0.5 * I);
        let j3 = DMatrix::from_diagonal(&DVector::from_fn(d, |i, _| Complex64::from(i as f64 - j)));
        let bases = [eigenbasis(&j1), eigenbasis(&j2)];
        Self {
            twice_j,
            generators: [j1, j2, j3],
            bases,
        }
    }

    /// Spin `j`, which must be a non-negative half-integer.
    pub fn from_spin(j: f64) -> Result<Self> {
        let t = (2.0 * j).round();
        if j < 0.0 || (2.0 * j - t).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("{j} is not a half-integer spin")));
        }
        Ok(Self::new(t as u32))
    }

    pub fn twice_j(&self) -> u32 {
        self.twice_j
    }

    pub fn j(&self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.twice_j as usize + 1
    }

    /// `[J₁, J₂, J₃]`.
    pub fn generators(&self) -> &[DMatrix<Complex64>; 3] {
        &self.generators
    }

    pub fn generator(&self, axis: Axis) -> &DMatrix<Complex64> {
        &self.generators[axis.index()]
    }

    /// `v·J`.
    pub fn dot(&self, v: &Vector3<f64>) -> DMatrix<Complex64> {
        &self.generators[0] * Complex64::from(v[0])
            + &self.generators[1] * Complex64::from(v[1])
            + &self.generators[2] * Complex64::from(v[2])
    }

    fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.dim()).map(move |i| i as f64 - self.j())
    }

    /// `exp(i θ J_axis)`.
    pub fn axis_exp(&self, axis: Axis, theta: f64) -> DMatrix<Complex64> {
        let phases: Vec<Complex64> = self.weights().map(|m| Complex64::from_polar(1.0, theta * m)).collect();
        match axis {
            Axis::Z => DMatrix::from_diagonal(&DVector::from_vec(phases)),
            Axis::X | Axis::Y => {
                let v = &self.bases[axis.index()];
                let mut scaled = v.clone();
                for (mut col, p) in scaled.column_iter_mut().zip(&phases) {
                    col *= *p;
                }
                scaled * v.adjoint()
            }
        }
    }

    /// `exp(i v·J)`.
    pub fn exp_i(&self, v: &Vector3<f64>) -> DMatrix<Complex64> {
        let r = v.norm();
        if r == 0.0 {
            return DMatrix::identity(self.dim(), self.dim());
        }
        let theta = (v[2] / r).clamp(-1.0, 1.0).acos();
        let phi = v[1].atan2(v[0]);
        let w = self.axis_exp(Axis::Z, -phi) * self.axis_exp(Axis::Y, -theta);
        let mut scaled = w.clone();
        for (mut col, m) in scaled.column_iter_mut().zip(self.weights()) {
            col *= Complex64::from_polar(1.0, r * m);
        }
        scaled * w.adjoint()
    }

    /// `τ̂_j(x)`.
    pub fn group_rep(&self, cocycle: &CocycleSU2, x: f64) -> DMatrix<Complex64> {
        match cocycle {
            CocycleSU2::Exponential(_) => self.exp_i(&cocycle.omega(x).expect("exponential").0),
            CocycleSU2::Product(factors) => {
                let d = self.dim();
                factors.iter().fold(DMatrix::identity(d, d), |acc, f| {
                    acc * self.axis_exp(f.axis, f.angle.eval(x))
                })
            }
        }
    }

    /// `τ̂_j(x)` and its derivative, computed in spin `j` without reference to
    /// the fundamental representation.
    pub fn group_rep_with_derivative(&self, cocycle: &CocycleSU2, x: f64) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
        let d = self.dim();
        match cocycle {
            CocycleSU2::Exponential(_) => {
                let (om, dom) = cocycle.omega(x).expect("exponential");
                let xp = self.dot(&dom) * I;
                let (t, w) = gauss_legendre_unit(64);
                let mut deriv = DMatrix::zeros(d, d);
                for (t, w) in t.iter().zip(&w) {
                    deriv += self.exp_i(&(om * (1.0 - t))) * &xp * self.exp_i(&(om * *t)) * Complex64::from(*w);
                }
                (self.exp_i(&om), deriv)
            }
            CocycleSU2::Product(factors) => {
                let mut g = DMatrix::identity(d, d);
                let mut dg = DMatrix::zeros(d, d);
                for f in factors {
                    let (w, dw) = f.angle.eval_with_derivative(x);
                    let m = self.axis_exp(f.axis, w);
                    let dm = self.generator(f.axis) * (I * dw) * &m;
                    dg = dg * &m + &g * dm;
                    g *= m;
                }
                (g, dg)
            }
        }
    }

    /// The lowest-weight vector `|0⟩`.
    pub fn lowest_weight(&self) -> DVector<Complex64> {
        let mut v = DVector::zeros(self.dim());
        v[0] = Complex64::from(1.0);
        v
    }

    /// `|n⟩ = ĝ|0⟩` with `g` the minimal rotation taking the south pole to `n`.
    pub fn coherent_state(&self, n: &Vector3<f64>) -> DVector<Complex64> {
        let n = n.normalize();
        let south = Vector3::new(0.0, 0.0, -1.0);
        let beta = south.dot(&n).clamp(-1.0, 1.0).acos();
        let axis = south.cross(&n);
        let axis = if axis.norm() > 1e-300 {
            axis.normalize()
        } else {
            Vector3::x()
        };
        self.exp_i(&(axis * -beta)) * self.lowest_weight()
    }

    /// `Op(a) = (d/4π) ∫ a(n) |n⟩⟨n| dn`, evaluated with `quad`.
    pub fn anti_wick<F, T>(&self, symbol: F, quad: &SphereQuadrature) -> Result<DMatrix<Complex64>>
    where
        F: Fn(&Vector3<f64>) -> T,
        T: Into<Complex64>,
    {
        let d = self.dim();
        let scale = d as f64 / (4.0 * PI);
        let mut op = DMatrix::zeros(d, d);
        let mut id = DMatrix::<Complex64>::zeros(d, d);
        for (n, w) in quad.nodes().iter().zip(quad.weights()) {
            let v = self.coherent_state(n);
            let proj = &v * v.adjoint();
            let a: Complex64 = symbol(n).into();
            op += &proj * (a * (w * scale));
            id += proj * Complex64::from(w * scale);
        }
        let residual = (id - DMatrix::identity(d, d)).norm();
        if residual > COMPLETENESS_TOL {
            return Err(Error::InsufficientQuadrature { residual });
        }
        Ok(op)
    }

    /// `⟨n|A|n⟩`.
    pub fn wick_symbol(&self, a: &DMatrix<Complex64>, n: &Vector3<f64>) -> Complex64 {
        let v = self.coherent_state(n);
        (v.adjoint() * a * &v)[(0, 0)]
    }

    /// `(tr Op(a), (d/4π) ∫ a dn)`.
    pub fn trace_check<F, T>(&self, symbol: F, quad: &SphereQuadrature) -> Result<(Complex64, Complex64)>
    where
        F: Fn(&Vector3<f64>) -> T + Copy,
        T: Into<Complex64>,
    {
        let op = self.anti_wick(symbol, quad)?;
        let scale = self.dim() as f64 / (4.0 * PI);
        let integral: Complex64 = quad
            .nodes()
            .iter()
            .zip(quad.weights())
            .map(|(n, w)| symbol(n).into() * (w * scale))
            .sum();
        Ok((op.trace(), integral))
    }
}

fn eigenbasis(h: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    DMatrix::from_fn(h.nrows(), h.ncols(), |r, c| eig.eigenvectors[(r, order[c])])
}

/// The rotation `R_g` with `g (n·J) g⁻¹ = (R_g n)·J`.
pub fn adjoint_rotation(g: &Matrix2<Complex64>) -> Matrix3<f64> {
    let p = pauli();
    Matrix3::from_fn(|l, k| 0.5 * (p[l] * g * p[k] * g.adjoint()).trace().re)
}

/// Right-handed rotation by the angle `|v|` about `v`.
pub fn rotation_about(v: &Vector3<f64>) -> Matrix3<f64> {
    let t = v.norm();
    if t == 0.0 {
        return Matrix3::identity();
    }
    let k = (v / t).cross_matrix();
    Matrix3::identity() + k * t.sin() + k * k * (1.0 - t.cos())
}

/// `{f, g}(n) = n·(∇f × ∇g)` for ambient gradients at `n`.
pub fn poisson_bracket(n: &Vector3<f64>, grad_f: &Vector3<f64>, grad_g: &Vector3<f64>) -> f64 {
    n.dot(&grad_f.cross(grad_g))
}

/// Gauss–Legendre in `cos θ` times a uniform rule in `φ`; exact for
/// polynomials of degree at most `order` restricted to `S²`.
#[derive(Clone, Debug)]
pub struct SphereQuadrature {
    order: usize,
    nodes: Vec<Vector3<f64>>,
    weights: Vec<f64>,
}

impl SphereQuadrature {
    pub fn new(order: usize) -> Self {
        let l = order / 2 + 1;
        let m = order + 1;
        let (z, wz) = gauss_legendre(l);
        let mut nodes = Vec::with_capacity(l * m);
        let mut weights = Vec::with_capacity(l * m);
        for (z, wz) in z.iter().zip(&wz) {
            let rho = (1.0 - z * z).max(0.0).sqrt();
            for k in 0..m {
                let phi = TAU * k as f64 / m as f64;
                nodes.push(Vector3::new(rho * phi.cos(), rho * phi.sin(), *z));
                weights.push(wz * TAU / m as f64);
            }
        }
        Self { order, nodes, weights }
    }

    /// A rule that resolves projectors of spin `j` times symbols of degree `extra`.
    pub fn for_spin(twice_j: u32, extra: usize) -> Self {
        Self::new(2 * twice_j as usize + extra)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[Vector3<f64>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
