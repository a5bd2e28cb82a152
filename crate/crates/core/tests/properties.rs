use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use strata::fields::norms::lebesgue_norm;
use strata::spectral::{anisotropic_laplacian, solve_anisotropic_poisson, Axis, Field, Grid, Parity, SpectralField, VOLUME};

fn grid_strategy() -> impl Strategy<Value = Grid> {
    (prop::sample::select(vec![4usize, 6, 8]), prop::sample::select(vec![4usize, 8, 12]))
        .prop_map(|(n, nz)| Grid::new(n, n, nz).unwrap())
}

fn parity_strategy() -> impl Strategy<Value = Parity> {
    prop::sample::select(vec![Parity::Even, Parity::Odd])
}

fn random_field(grid: &Grid, parity: Parity, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    Field::new(grid, values, parity).unwrap().parity_project(parity)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn round_trip_and_parseval(g in grid_strategy(), p in parity_strategy(), seed in any::<u64>()) {
        let f = random_field(&g, p, seed);
        let s = f.forward();
        let back = s.inverse();
        prop_assert!(back.sub(&f).unwrap().max_abs() < 1e-12);
        let physical = f.values().iter().map(|v| v * v).sum::<f64>() * VOLUME / g.len() as f64;
        assert_relative_eq!(s.norm_l2_sq(), physical, max_relative = 1e-12);
        prop_assert!(s.hermitian_defect() < 1e-14);
    }

    #[test]
    fn dealias_is_idempotent(g in grid_strategy(), seed in any::<u64>()) {
        let once = random_field(&g, Parity::Even, seed).forward().dealias();
        prop_assert!(once.is_band_limited());
        let twice = once.dealias();
        prop_assert_eq!(twice.coeffs(), once.coeffs());
    }

    #[test]
    fn parity_parts_recombine(g in grid_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let raw = Field::new(&g, values, Parity::Even).unwrap();
        let even = raw.parity_project(Parity::Even);
        let odd = raw.parity_project(Parity::Odd);
        prop_assert!(even.parity_defect() < 1e-14 && odd.parity_defect() < 1e-14);
        for (i, v) in raw.values().iter().enumerate() {
            prop_assert!((even.values()[i] + odd.values()[i] - v).abs() < 1e-14);
        }
        let d = even.forward().derivative(Axis::Z, 1).unwrap();
        prop_assert_eq!(d.parity(), Parity::Odd);
        prop_assert!(d.inverse().parity_defect() < 1e-12);
    }

    #[test]
    fn poisson_inverts_laplacian(
        g in grid_strategy(),
        seed in any::<u64>(),
        tau in 0.01f64..2.0,
    ) {
        let mut rhs = random_field(&g, Parity::Even, seed).forward().dealias();
        rhs.coeffs_mut()[0] = 0.0.into();
        let p = solve_anisotropic_poisson(&rhs, tau).unwrap();
        prop_assert!(p.mean().abs() < 1e-14);
        let back = anisotropic_laplacian(&p, tau);
        let scale = rhs.max_abs_coeff().max(1e-300);
        prop_assert!(back.sub(&rhs).unwrap().max_abs_coeff() / scale < 1e-11);
    }

    #[test]
    fn lebesgue_triangle_inequality(
        g in grid_strategy(),
        seeds in (any::<u64>(), any::<u64>()),
        p in prop::sample::select(vec![2u32, 4]),
    ) {
        let a = random_field(&g, Parity::Odd, seeds.0);
        let b = random_field(&g, Parity::Odd, seeds.1);
        let sum = a.sub(&b.scaled(-1.0)).unwrap();
        let lhs = lebesgue_norm(&sum, p).unwrap();
        let rhs = lebesgue_norm(&a, p).unwrap() + lebesgue_norm(&b, p).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn spectral_norms_are_homogeneous(g in grid_strategy(), seed in any::<u64>(), c in -5.0f64..5.0) {
        let s: SpectralField = random_field(&g, Parity::Even, seed).forward();
        assert_relative_eq!(s.scaled(c).norm_l2(), c.abs() * s.norm_l2(), max_relative = 1e-12, epsilon = 1e-300);
    }
}
