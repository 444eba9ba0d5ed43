use std::f64::consts::PI;

use pam_core::grid::{
    besov_norm, even_extension, forward_transform, inverse_transform, lp_block, odd_extension, read_grid_binary,
    sigma_symbol, write_grid_binary, BoxSpec, GridField, LpDecomposition, Parity, SpectralField,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_field(spec: BoxSpec, seed: u64) -> GridField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = GridField::from_fn(spec, |_, _| rng.random_range(-1.0..1.0));
    if spec.boundary() == pam_core::grid::Boundary::Dirichlet {
        let n = spec.points();
        for i in 0..n {
            for j in 0..n {
                if i == 0 || j == 0 || i == n - 1 || j == n - 1 {
                    field.values_mut()[spec.index(i, j)] = 0.0;
                }
            }
        }
    }
    field
}

fn rel_max_err(a: &GridField, b: &GridField) -> f64 {
    a.sub(b).unwrap().max_abs() / b.max_abs().max(1e-300)
}

fn neumann_mode(spec: BoxSpec, k: [usize; 2]) -> GridField {
    let side = spec.side();
    let amp = |k: usize| if k == 0 { (1.0 / side).sqrt() } else { (2.0 / side).sqrt() };
    GridField::from_fn(spec, |x, y| {
        amp(k[0]) * amp(k[1]) * (PI * k[0] as f64 * (x + side / 2.0) / side).cos()
            * (PI * k[1] as f64 * (y + side / 2.0) / side).cos()
    })
}

#[test]
fn roundtrip_on_all_reference_grids() {
    for n in [33, 65, 129, 257] {
        for boundary in [pam_core::grid::Boundary::Neumann, pam_core::grid::Boundary::Dirichlet] {
            let spec = BoxSpec::new(3.5, n, boundary).unwrap();
            let seeds = if n <= 65 { 0..100 } else { 0..5 };
            for seed in seeds {
                let f = random_field(spec, seed);
                let back = inverse_transform(&forward_transform(&f).unwrap());
                assert!(rel_max_err(&back, &f) <= 1e-10, "n={n} seed={seed}");
            }
        }
    }
}

#[test]
fn parseval_with_quadrature_weights() {
    for n in [33, 65, 129, 257] {
        for boundary in [pam_core::grid::Boundary::Neumann, pam_core::grid::Boundary::Dirichlet] {
            let spec = BoxSpec::new(2.0, n, boundary).unwrap();
            let f = random_field(spec, n as u64);
            let coeffs = forward_transform(&f).unwrap();
            let lhs = f.l2_norm();
            let rhs = coeffs.weighted_l2_norm();
            assert!((lhs - rhs).abs() <= 1e-10 * lhs);
        }
    }
}

#[test]
fn zero_field_has_zero_coefficients() {
    let spec = BoxSpec::neumann(1.0, 17).unwrap();
    let coeffs = forward_transform(&GridField::<f64>::zeros(spec)).unwrap();
    assert!(coeffs.coeffs().iter().all(|&c| c == 0.0));
    let back = inverse_transform(&SpectralField::<f64>::zeros(spec, [Parity::Even; 2]));
    assert!(back.values().iter().all(|&v| v == 0.0));
}

#[test]
fn sigma_on_single_mode() {
    let spec = BoxSpec::neumann(4.0, 33).unwrap();
    let k = [3, 5];
    let unit = SpectralField::<f64>::unit(spec, [Parity::Even; 2], k);
    let out = unit.apply_multiplier(sigma_symbol).unwrap();
    let freq2 = (9.0 + 25.0) / 16.0;
    assert!((out.get(k) - 1.0 / (1.0 + 0.5 * PI * PI * freq2)).abs() < 1e-15);
    let identity = unit.apply_multiplier(|_| 1.0).unwrap();
    assert_eq!(identity, unit);
}

#[test]
fn laplacian_multiplier_matches_cosine_eigenrelation() {
    let spec = BoxSpec::neumann(2.0, 65).unwrap();
    let k = [2, 3];
    let mode = neumann_mode(spec, k);
    let via_multiplier = mode
        .apply_multiplier(|f| PI * PI * (f[0] * f[0] + f[1] * f[1]))
        .unwrap();
    let factor = PI * PI * (4.0 + 9.0) / 4.0;
    assert!(rel_max_err(&via_multiplier, &mode.scale(factor)) < 1e-12);
    // finite-difference check of -Δ in the interior
    let h = spec.spacing();
    let (i, j) = (20, 31);
    let fd = -(mode.at(i + 1, j) + mode.at(i - 1, j) + mode.at(i, j + 1) + mode.at(i, j - 1) - 4.0 * mode.at(i, j)) / (h * h);
    assert!((fd - via_multiplier.at(i, j)).abs() < 1e-2 * factor);
}

#[test]
fn multiplier_composition_is_product() {
    let spec = BoxSpec::neumann(3.0, 33).unwrap();
    let coeffs = forward_transform(&random_field(spec, 7)).unwrap();
    let m1 = |f: [f64; 2]| 1.0 / (1.0 + f[0] * f[0] + f[1] * f[1]);
    let m2 = |f: [f64; 2]| (f[0] - 2.0 * f[1]).cos();
    let composed = coeffs.apply_multiplier(m2).unwrap().apply_multiplier(m1).unwrap();
    let product = coeffs.apply_multiplier(|f| m1(f) * m2(f)).unwrap();
    for (a, b) in composed.coeffs().iter().zip(product.coeffs()) {
        assert!((a - b).abs() <= 4.0 * f64::EPSILON * b.abs());
    }
}

#[test]
fn constant_lives_in_the_ball_block() {
    let spec = BoxSpec::neumann(2.0, 33).unwrap();
    let f = GridField::constant(spec, 1.7);
    let lp = LpDecomposition::new(&f).unwrap();
    assert!(rel_max_err(lp.block(-1), &f) < 1e-13);
    for (i, b) in lp.iter().skip(1) {
        assert!(b.max_abs() < 1e-13, "block {i}");
    }
}

#[test]
fn dyadic_mode_concentrates_near_its_block() {
    let spec = BoxSpec::neumann(2.0, 129).unwrap();
    for i in 0..5 {
        let k = (2f64.powi(i) * spec.side()).round() as usize;
        let mode = neumann_mode(spec, [k, 0]);
        let energy = mode.l2_norm().powi(2);
        let near: f64 = (i - 1..=i + 1)
            .filter(|&j| j >= -1 && j <= pam_core::grid::top_block(&spec))
            .map(|j| lp_block(&mode, j).unwrap().l2_norm().powi(2))
            .sum();
        assert!(near >= 0.99 * energy, "block {i}");
    }
}

#[test]
fn block_index_out_of_range_is_an_error() {
    let spec = BoxSpec::neumann(2.0, 33).unwrap();
    let f = GridField::<f64>::zeros(spec);
    assert!(lp_block(&f, -2).is_err());
    assert!(lp_block(&f, pam_core::grid::top_block(&spec) + 1).is_err());
}

#[test]
fn blocks_sum_to_identity() {
    for n in [33, 129] {
        let spec = BoxSpec::neumann(4.0, n).unwrap();
        let f = random_field(spec, 3);
        let lp = LpDecomposition::new(&f).unwrap();
        assert!(rel_max_err(&lp.reconstruct(), &f) <= 1e-10);
    }
}

#[test]
fn besov_norm_of_single_mode_tracks_sup_norm() {
    let spec = BoxSpec::neumann(2.0, 129).unwrap();
    for k in [[0, 0], [1, 0], [3, 4], [10, 7], [40, 0]] {
        let mode = neumann_mode(spec, k);
        let norm = besov_norm(&mode, 0.0, f64::INFINITY, f64::INFINITY).unwrap();
        let sup = mode.max_abs();
        assert!(norm <= 4.0 * sup && norm >= sup / 4.0, "k={k:?}");
    }
    let zero = GridField::<f64>::zeros(spec);
    assert_eq!(besov_norm(&zero, -1.0, f64::INFINITY, f64::INFINITY).unwrap(), 0.0);
}

#[test]
fn extensions_reflect_and_restrict() {
    let spec = BoxSpec::neumann(2.0, 17).unwrap();
    let c = GridField::constant(spec, 2.5);
    assert!(even_extension(&c).values().iter().all(|&v| v == 2.5));
    let mode = neumann_mode(spec, [3, 1]);
    let ext = even_extension(&mode);
    let side = spec.side();
    let h = spec.spacing();
    for i in 0..ext.points() {
        for j in 0..ext.points() {
            let x = -side / 2.0 + i as f64 * h;
            let y = -side / 2.0 + j as f64 * h;
            let expected = (2.0 / side) * (3.0 * PI * (x + side / 2.0) / side).cos() * (PI * (y + side / 2.0) / side).cos();
            assert!((ext.at(i, j) - expected).abs() < 1e-12);
        }
    }
    let odd = odd_extension(&mode);
    assert_eq!(odd.at(20, 3), -mode.at(12, 3));
}

#[test]
fn binary_roundtrip_preserves_everything() {
    let spec = BoxSpec::dirichlet(3.0, 9).unwrap();
    let f = random_field(spec, 11);
    let mut bytes = Vec::new();
    write_grid_binary(&f, &mut bytes).unwrap();
    assert_eq!(bytes.len(), 32 + 8 * 81);
    let back = read_grid_binary(bytes.as_slice()).unwrap();
    assert_eq!(back, f);
    bytes[0] = b'X';
    assert!(read_grid_binary(bytes.as_slice()).is_err());
}

#[test]
fn single_precision_roundtrip() {
    let spec = BoxSpec::neumann(2.0, 33).unwrap();
    let f: GridField<f32> = random_field(spec, 5).cast();
    let back = inverse_transform(&forward_transform(&f).unwrap());
    let err = back.sub(&f).unwrap().max_abs() / f.max_abs();
    assert!(err < 1e-5);
}

#[test]
fn invalid_boxes_are_rejected() {
    assert!(BoxSpec::neumann(0.5, 33).is_err());
    assert!(BoxSpec::neumann(2.0, 7).is_err());
    assert!(GridField::from_values(BoxSpec::neumann(2.0, 9).unwrap(), vec![0.0; 80]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn extension_restriction_is_bitwise(seed in any::<u64>(), n in 9usize..24) {
        let spec = BoxSpec::neumann(1.5, n).unwrap();
        let f = random_field(spec, seed);
        prop_assert_eq!(even_extension(&f).restrict(&f), f.clone());
        prop_assert_eq!(odd_extension(&f).restrict(&f), f);
    }

    #[test]
    fn besov_norm_is_homogeneous_and_subadditive(seed in any::<u64>(), c in -5.0f64..5.0, alpha in -1.5f64..1.0) {
        let spec = BoxSpec::neumann(2.0, 17).unwrap();
        let f = random_field(spec, seed);
        let g = random_field(spec, seed.wrapping_add(1));
        let inf = f64::INFINITY;
        let nf = besov_norm(&f, alpha, inf, inf).unwrap();
        let ncf = besov_norm(&f.scale(c), alpha, inf, inf).unwrap();
        prop_assert!((ncf - c.abs() * nf).abs() <= 1e-12 * nf.max(1.0));
        let ng = besov_norm(&g, alpha, 2.0, 1.0).unwrap();
        let nf2 = besov_norm(&f, alpha, 2.0, 1.0).unwrap();
        let nsum = besov_norm(&f.add(&g).unwrap(), alpha, 2.0, 1.0).unwrap();
        prop_assert!(nsum <= nf2 + ng + 1e-12);
    }

    #[test]
    fn roundtrip_random_sizes(seed in any::<u64>(), n in 8usize..40, side in 1.0f64..10.0) {
        let spec = BoxSpec::neumann(side, n).unwrap();
        let f = random_field(spec, seed);
        let back = inverse_transform(&forward_transform(&f).unwrap());
        prop_assert!(rel_max_err(&back, &f) <= 1e-10);
    }
}
