use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2, Vector3};
use num_complex::Complex64;
use proptest::prelude::*;
use skewlab::dynamics::{fundamental_exp, Axis, CocycleSU2, Factor};
use skewlab::fourier::TrigSeries;
use skewlab::phasespace::{h_field, h_field_integral};
use skewlab::su2::{adjoint_rotation, poisson_bracket, SphereQuadrature, SpinRep};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn unit(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}

fn op_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

fn symbol_a(n: &Vector3<f64>) -> f64 {
    n[0] + 0.5 * n[2] * n[2]
}

fn symbol_b(n: &Vector3<f64>) -> f64 {
    n[1] * n[2] - 0.3 * n[0]
}

/// `{a, b}` from the ambient gradients of the two test symbols.
fn bracket_ab(n: &Vector3<f64>) -> f64 {
    let ga = Vector3::new(1.0, 0.0, n[2]);
    let gb = Vector3::new(-0.3, n[2], n[1]);
    poisson_bracket(n, &ga, &gb)
}

fn product_residual(twice_j: u32) -> f64 {
    let rep = SpinRep::new(twice_j);
    let q = SphereQuadrature::for_spin(twice_j, 6);
    let a = rep.anti_wick(symbol_a, &q).unwrap();
    let b = rep.anti_wick(symbol_b, &q).unwrap();
    let ab = rep.anti_wick(|n: &Vector3<f64>| symbol_a(n) * symbol_b(n), &q).unwrap();
    op_norm(&(ab - a * b))
}

fn commutator_residual(twice_j: u32) -> f64 {
    let rep = SpinRep::new(twice_j);
    let q = SphereQuadrature::for_spin(twice_j, 6);
    let a = rep.anti_wick(symbol_a, &q).unwrap();
    let b = rep.anti_wick(symbol_b, &q).unwrap();
    let br = rep.anti_wick(bracket_ab, &q).unwrap();
    let comm = (&a * &b - &b * &a) * (-I * rep.j());
    op_norm(&(comm - br))
}

#[test]
fn product_law_error_halves() {
    let (r8, r16) = (product_residual(16), product_residual(32));
    let ratio = r16 / r8;
    assert!((0.3..=0.7).contains(&ratio), "{r8:e} → {r16:e}, ratio {ratio}");
}

#[test]
fn commutator_law_with_planck_one_over_j() {
    let (r8, r16) = (commutator_residual(16), commutator_residual(32));
    assert!(r16 < r8, "{r8:e} → {r16:e}");
    assert!(r16 < 0.2);
}

#[test]
fn bracket_of_coordinates() {
    let n = unit(0.7, 1.9);
    let b = poisson_bracket(&n, &Vector3::z(), &Vector3::x());
    assert!((b - n[1]).abs() < 1e-15);
}

#[test]
fn completeness_up_to_spin_twenty() {
    for twice_j in [1, 7, 16, 40] {
        let rep = SpinRep::new(twice_j);
        let q = SphereQuadrature::for_spin(twice_j, 0);
        let id = rep.anti_wick(|_: &Vector3<f64>| 1.0, &q).unwrap();
        let d = rep.dim();
        assert!((id - DMatrix::<Complex64>::identity(d, d)).norm() <= 1e-8);
    }
}

#[test]
fn trace_identity() {
    let rep = SpinRep::new(11);
    let q = SphereQuadrature::for_spin(11, 8);
    let (tr, integral) = rep
        .trace_check(|n: &Vector3<f64>| (n[0] * n[1] + n[2]).exp(), &q)
        .unwrap();
    assert!((tr - integral).norm() <= 1e-8);
}

/// The Wick symbol of `-(i/j) τ̂⁻¹ τ̂'` is `u·n` at every spin, since the
/// left log-derivative is a Lie algebra element and `⟨n|J|n⟩ = j n`.
#[test]
fn wick_symbol_of_log_derivative_is_exact() {
    let c = CocycleSU2::Exponential([TrigSeries::cosine(0.2), TrigSeries::sine(0.5), TrigSeries::cosine(1.0)]);
    for twice_j in [10, 20, 40] {
        let rep = SpinRep::new(twice_j);
        let j = rep.j();
        for &x in &[0.1, 0.45, 0.8] {
            let (g, dg) = rep.group_rep_with_derivative(&c, x);
            let op = g.adjoint() * dg * (-I / j);
            let n = unit(1.1, -0.4 + x);
            let w = rep.wick_symbol(&op, &n);
            assert!((w.re - h_field(&c, x, &n)).abs() < 1e-9);
            assert!(w.im.abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn overlap_law(twice_j in 0u32..=40, t1 in 0.0..PI, p1 in -PI..PI, t2 in 0.0..PI, p2 in -PI..PI) {
        let rep = SpinRep::new(twice_j);
        let (a, b) = (unit(t1, p1), unit(t2, p2));
        let lhs = rep.coherent_state(&a).dotc(&rep.coherent_state(&b)).norm_sqr();
        let rhs = ((1.0 + a.dot(&b)) / 2.0).powi(twice_j as i32);
        prop_assert!((lhs - rhs).abs() <= 1e-10);
    }

    #[test]
    fn covariance(twice_j in 1u32..=20, t in 0.0..PI, p in -PI..PI, v in prop::array::uniform3(-2.0..2.0f64)) {
        let rep = SpinRep::new(twice_j);
        let v = Vector3::from(v);
        let g2 = fundamental_exp(&v);
        let g = rep.exp_i(&v);
        let n = unit(t, p);
        let moved = &g * rep.coherent_state(&n);
        let target = rep.coherent_state(&(adjoint_rotation(&g2) * n));
        prop_assert!((moved.dotc(&target).norm() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn adjoint_rotation_is_orthogonal(v in prop::array::uniform3(-4.0..4.0f64)) {
        let g: Matrix2<Complex64> = fundamental_exp(&Vector3::from(v));
        let r = adjoint_rotation(&g);
        prop_assert!((r.transpose() * r - nalgebra::Matrix3::identity()).norm() < 1e-13);
        prop_assert!((r.determinant() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn log_derivative_matches_integral(
        c in prop::array::uniform3(prop::collection::vec(-1.0..1.0f64, 2)),
        x in 0.0..1.0f64,
        t in 0.0..PI, p in -PI..PI,
    ) {
        let cyc = CocycleSU2::Exponential([
            TrigSeries::new(0.0, vec![c[0][0]], vec![c[0][1]]),
            TrigSeries::new(c[1][0], vec![c[1][1]], vec![]),
            TrigSeries::new(0.0, vec![0.0, c[2][0]], vec![c[2][1]]),
        ]);
        let n = unit(t, p);
        let a = h_field(&cyc, x, &n);
        let b = h_field_integral(&cyc, x, &n).unwrap();
        prop_assert!((a - b).abs() <= 1e-8);
    }

    #[test]
    fn spin_rep_is_homomorphism(twice_j in 1u32..=9, x in 0.0..1.0f64) {
        let c = CocycleSU2::Product(vec![
            Factor::new(Axis::Z, TrigSeries::cosine(1.0)),
            Factor::new(Axis::Y, TrigSeries::constant(0.7)),
            Factor::new(Axis::Z, TrigSeries::cosine(1.0)),
        ]);
        let rep = SpinRep::new(twice_j);
        let g = rep.group_rep(&c, x);
        let d = rep.dim();
        prop_assert!((g.adjoint() * &g - DMatrix::<Complex64>::identity(d, d)).norm() < 1e-12);
        // J transforms by the adjoint rotation of the fundamental image
        let r = adjoint_rotation(&c.su2_data(x).tau);
        for k in 0..3 {
            let lhs = &g * &rep.generators()[k] * g.adjoint();
            let rhs = rep.dot(&r.column(k).into_owned());
            prop_assert!((lhs - rhs).norm() < 1e-11);
        }
    }
}
