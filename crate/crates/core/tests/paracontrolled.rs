use pam_core::grid::{besov_norm, BoxSpec, GridField};
use pam_core::noise::{enhance, mollify_fourier, sample_white_noise, FourierCutoff};
use pam_core::paracontrolled::{
    dealiased_product, half_grad_squared, para_lt, paraproduct, resonance, wick_square_grad_z,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_field(spec: BoxSpec, seed: u64) -> GridField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GridField::from_fn(spec, |_, _| rng.random_range(-1.0..1.0))
}

fn rel_err(a: &GridField, b: &GridField) -> f64 {
    a.sub(b).unwrap().max_abs() / b.max_abs().max(1e-300)
}

#[test]
fn bony_pieces_reconstruct_dealiased_product() {
    let spec = BoxSpec::neumann(2.0, 65).unwrap();
    for seed in 0..10 {
        let u = random_field(spec, 2 * seed);
        let v = random_field(spec, 2 * seed + 1);
        let triple = paraproduct(&u, &v).unwrap();
        let product = dealiased_product(&u, &v).unwrap();
        assert!(rel_err(&triple.sum(), &product) < 1e-9);
    }
}

#[test]
fn dealiased_product_is_exact_for_band_limited_fields() {
    let spec = BoxSpec::neumann(1.0, 33).unwrap();
    let pi = std::f64::consts::PI;
    let u = GridField::from_fn(spec, |x, y| (3.0 * pi * (x + 0.5)).cos() * (pi * (y + 0.5)).cos());
    let v = GridField::from_fn(spec, |x, y| (5.0 * pi * (x + 0.5)).cos() + (2.0 * pi * (y + 0.5)).cos());
    let exact = u.mul(&v).unwrap();
    assert!(rel_err(&dealiased_product(&u, &v).unwrap(), &exact) < 1e-12);
}

#[test]
fn constant_left_factor_has_no_high_low_part() {
    let spec = BoxSpec::neumann(4.0, 65).unwrap();
    let u = GridField::constant(spec, 2.5);
    let v = random_field(spec, 7);
    let triple = paraproduct(&u, &v).unwrap();
    assert!(triple.para_gt.max_abs() < 1e-12);
    let lhs = triple.para_lt.add(&triple.resonance).unwrap();
    assert!(rel_err(&lhs, &dealiased_product(&u, &v).unwrap()) < 1e-12);
    assert!(rel_err(&lhs, &v.scale(2.5)) < 1e-12);
}

#[test]
fn zero_factor_gives_zero_pieces() {
    let spec = BoxSpec::neumann(1.0, 33).unwrap();
    let u = random_field(spec, 3);
    let triple = paraproduct(&u, &GridField::zeros(spec)).unwrap();
    assert_eq!(triple.para_lt.max_abs(), 0.0);
    assert_eq!(triple.resonance.max_abs(), 0.0);
    assert_eq!(triple.para_gt.max_abs(), 0.0);
}

#[test]
fn resonance_is_symmetric_bitwise() {
    let spec = BoxSpec::neumann(3.0, 65).unwrap();
    for seed in 0..5 {
        let u = random_field(spec, 10 + seed);
        let v = random_field(spec, 20 + seed);
        assert_eq!(resonance(&u, &v).unwrap(), resonance(&v, &u).unwrap());
    }
}

#[test]
fn para_lt_mirrors_para_gt() {
    let spec = BoxSpec::neumann(2.0, 33).unwrap();
    let u = random_field(spec, 1);
    let v = random_field(spec, 2);
    let a = paraproduct(&u, &v).unwrap();
    let b = paraproduct(&v, &u).unwrap();
    assert!(rel_err(&a.para_lt, &b.para_gt) < 1e-13);
}

#[test]
fn wick_square_of_zero_is_zero() {
    let spec = BoxSpec::neumann(2.0, 33).unwrap();
    let zero: GridField = GridField::zeros(spec);
    assert_eq!(wick_square_grad_z(&zero, &zero).unwrap().value.max_abs(), 0.0);
}

#[test]
fn wick_square_matches_renormalised_gradient_square() {
    // Z = σ(D)ξ_ε and Θ = ξ_ε ⊙ σ(D)ξ_ε − c; both sides are formed on the grid
    let spec = BoxSpec::neumann(4.0, 129).unwrap();
    let nc = sample_white_noise(&spec, 11);
    let xi = mollify_fourier(&nc, 0.25, &FourierCutoff::default()).unwrap().field;
    let c = 0.37;
    let enhanced = enhance(&xi, c).unwrap();
    let z = xi.apply_multiplier(pam_core::grid::sigma_symbol).unwrap();
    let wick = wick_square_grad_z(&z, &enhanced.big_xi).unwrap();
    let direct = half_grad_squared(&z).unwrap().shift(-c);
    assert!(rel_err(&wick.value, &direct) < 1e-10, "{}", rel_err(&wick.value, &direct));
}

#[test]
fn paraproduct_bound_constant_is_stable_across_resolution() {
    // ‖u ⋖ v‖_{C^β} / (‖u‖_∞ ‖v‖_{C^β}) for smooth u and rough v, β = -0.5
    let mut ratios = Vec::new();
    for &n in &[33usize, 65, 129] {
        let spec = BoxSpec::neumann(4.0, n).unwrap();
        let u = GridField::from_fn(spec, |x, y| (0.8 * x).sin() + (0.5 * y).cos());
        let v = sample_white_noise(&spec, 5).raw_field();
        let lhs = besov_norm(&para_lt(&u, &v).unwrap(), -0.5, f64::INFINITY, f64::INFINITY).unwrap();
        let rhs = u.max_abs() * besov_norm(&v, -0.5, f64::INFINITY, f64::INFINITY).unwrap();
        ratios.push(lhs / rhs);
    }
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(max < 4.0 && max / min < 1.5, "{ratios:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bony_pieces_are_bilinear(seed in 0u64..1000, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let spec = BoxSpec::neumann(2.0, 33).unwrap();
        let u1 = random_field(spec, seed);
        let u2 = random_field(spec, seed + 1);
        let v = random_field(spec, seed + 2);
        let mix = u1.scale(a).add(&u2.scale(b)).unwrap();
        let lhs = paraproduct(&mix, &v).unwrap();
        let p1 = paraproduct(&u1, &v).unwrap();
        let p2 = paraproduct(&u2, &v).unwrap();
        let rhs = p1.resonance.scale(a).add(&p2.resonance.scale(b)).unwrap();
        prop_assert!(lhs.resonance.sub(&rhs).unwrap().max_abs() < 1e-11 * (1.0 + rhs.max_abs()));
        let rhs_lt = p1.para_lt.scale(a).add(&p2.para_lt.scale(b)).unwrap();
        prop_assert!(lhs.para_lt.sub(&rhs_lt).unwrap().max_abs() < 1e-11 * (1.0 + rhs_lt.max_abs()));
    }

    #[test]
    fn reconstruction_holds_for_random_sizes(seed in 0u64..1000, log_n in 3u32..7, side in 1.0f64..6.0) {
        let spec = BoxSpec::neumann(side, (1usize << log_n) + 1).unwrap();
        let u = random_field(spec, seed);
        let v = random_field(spec, seed ^ 0xabc);
        let triple = paraproduct(&u, &v).unwrap();
        prop_assert!(rel_err(&triple.sum(), &dealiased_product(&u, &v).unwrap()) < 1e-9);
    }
}
