use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skewlab::dynamics::{Cocycle, CocycleU1, ExpandingMap};
use skewlab::fourier::TrigSeries;
use skewlab::spectral::{eigenvalues, extract_resonances, singular_values, weyl_check};
use skewlab::transfer::{assemble_u1, Alpha};

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

#[test]
fn weyl_inequality_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    for _ in 0..100 {
        let m = random_matrix(&mut rng, 30);
        let v = weyl_check(&eigenvalues(&m).unwrap(), &singular_values(&m).unwrap()).unwrap();
        assert!(v <= 1e-10, "{v:e}");
    }
}

#[test]
fn weyl_inequality_on_transfer_matrices() {
    let e = ExpandingMap::doubling();
    let c = CocycleU1::new(TrigSeries::cosine(1.0));
    for nu in [0, 1, 10, 40] {
        let m = assemble_u1(&e, &c, nu, 64).unwrap().entries;
        let v = weyl_check(&eigenvalues(&m).unwrap(), &singular_values(&m).unwrap()).unwrap();
        assert!(v <= 1e-10, "ν = {nu}: {v:e}");
    }
}

#[test]
fn stable_resonances_are_inside_unit_disc() {
    let e = ExpandingMap::doubling();
    let c = Cocycle::U1(CocycleU1::new(TrigSeries::cosine(1.0)));
    for nu in 0..4 {
        let set = extract_resonances(&e, &c, Alpha::Frequency(nu), 48, 1e-6).unwrap();
        assert!(set.stable().all(|r| r.value.norm() <= 1.0 + 1e-6));
        let sorted = set.entries.windows(2).all(|w| w[0].value.norm() >= w[1].value.norm());
        assert!(sorted);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn eigenvalues_have_small_residual(seed in any::<u64>(), n in 2usize..25) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&mut rng, n);
        let norm = m.clone().svd(false, false).singular_values.max();
        let ev = eigenvalues(&m).unwrap();
        prop_assert_eq!(ev.len(), n);
        for l in ev {
            let shifted = &m - DMatrix::<Complex64>::identity(n, n) * l;
            let smallest = shifted.svd(false, false).singular_values.min();
            prop_assert!(smallest <= 1e-8 * norm);
        }
    }

    #[test]
    fn singular_values_square_to_gram_eigenvalues(seed in any::<u64>(), n in 1usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&mut rng, n);
        let sv = singular_values(&m).unwrap();
        prop_assert!(sv.windows(2).all(|w| w[0] >= w[1]));
        let mut gram: Vec<f64> = (m.adjoint() * &m).symmetric_eigen().eigenvalues.iter().copied().collect();
        gram.sort_by(|a, b| b.total_cmp(a));
        for (s, g) in sv.iter().zip(&gram) {
            prop_assert!((s * s - g).abs() <= 1e-10 * gram[0].max(1.0));
        }
    }
}
