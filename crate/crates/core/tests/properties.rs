//! Cross-module invariants: identities tying conjugates, divergences, and
//! forms together, plus property tests over randomized inputs.

use proptest::prelude::*;

use sbd_core::conjugate::{
    fenchel_conjugate, fenchel_conjugate_iterative, symplectic_conjugate, symplectic_gradient,
    SolverParams,
};
use sbd_core::divergence::{bregman, dual_bregman, symplectic_bregman, symplectic_fenchel_young};
use sbd_core::group::{is_symplectic, random_symplectic};
use sbd_core::matrix::Matrix;
use sbd_core::potential::{gradient_default, Entropy, Potential, Quadratic, Separable};
use sbd_core::sample;
use sbd_core::space::{apply_complex_structure, DualSystem, PhasePoint, SymplecticForm};

fn params() -> SolverParams {
    SolverParams::default()
}

fn point(x: &[f64], y: &[f64]) -> PhasePoint {
    PhasePoint::new(x.to_vec(), y.to_vec()).unwrap()
}

#[test]
fn minus_j_pairs_points_through_the_composite_inner_product() {
    // omega0(-J z1, z2) equals <x1, x2> + <y1, y2>.
    let mut rng = sample::rng(41, 0);
    let form = SymplecticForm::canonical(3).unwrap();
    for _ in 0..200 {
        let z1 = sample::random_point(3, -3.0, 3.0, &mut rng);
        let z2 = sample::random_point(3, -3.0, 3.0, &mut rng);
        let lhs = form
            .evaluate(&apply_complex_structure(&z1).scale(-1.0), &z2)
            .unwrap();
        let composite: f64 = z1
            .flat()
            .iter()
            .zip(&z2.flat())
            .map(|(a, b)| a * b)
            .sum();
        assert!((lhs - composite).abs() <= 1e-9, "{lhs} vs {composite}");
    }
}

#[test]
fn symplectic_conjugate_equals_ordinary_at_j_of_the_target() {
    let mut rng = sample::rng(42, 0);
    let form = SymplecticForm::canonical(1).unwrap();
    let f = Quadratic::new(
        sample::random_spd(2, &mut rng),
        sample::random_vector(2, -0.5, 0.5, &mut rng),
        0.4,
    )
    .unwrap();
    for _ in 0..100 {
        let zp = sample::random_point(1, -2.0, 2.0, &mut rng);
        let sympl = symplectic_conjugate(&f, &form, &zp, &params()).unwrap();
        let ordinary =
            fenchel_conjugate(&f, &apply_complex_structure(&zp).flat(), &params()).unwrap();
        assert!((sympl.value - ordinary.value).abs() <= 1e-10);
    }
}

#[test]
fn biconjugation_recovers_quadratics() {
    let mut rng = sample::rng(43, 0);
    let f = Quadratic::new(
        sample::random_spd(2, &mut rng),
        sample::random_vector(2, -0.5, 0.5, &mut rng),
        -0.3,
    )
    .unwrap();
    let f_star = f.conjugate_potential();
    for _ in 0..100 {
        let z = sample::random_vector(2, -2.0, 2.0, &mut rng);
        // (F*)*(z) via the iterative solver on the conjugate potential.
        let back = fenchel_conjugate_iterative(&f_star, &z, &params()).unwrap();
        let direct = f.value(&z).finite().unwrap();
        assert!(
            (back.value - direct).abs() <= 1e-7,
            "{} vs {direct}",
            back.value
        );
    }
}

#[test]
fn symplectic_bregman_is_fenchel_young_at_the_lifted_gradient() {
    let mut rng = sample::rng(44, 0);
    let form = SymplecticForm::canonical(1).unwrap();
    let f = Quadratic::new(
        sample::random_spd(2, &mut rng),
        sample::random_vector(2, -0.5, 0.5, &mut rng),
        0.0,
    )
    .unwrap();
    for _ in 0..100 {
        let z1 = sample::random_point(1, -2.0, 2.0, &mut rng);
        let z2 = sample::random_point(1, -2.0, 2.0, &mut rng);
        let br = symplectic_bregman(&f, &form, &z1, &z2).unwrap();
        let lifted = symplectic_gradient(&f, &form, &z2).unwrap();
        let fy = symplectic_fenchel_young(&f, &form, &z1, &lifted, &params()).unwrap();
        assert!(
            (br.value - fy.value).abs() <= 1e-7,
            "{} vs {}",
            br.value,
            fy.value
        );
        // Audit-report invariant: value reconstructs from its parts.
        assert!((br.value - br.parts.reconstruct()).abs() <= 1e-10 || br.clamped);
    }
}

#[test]
fn the_two_skew_arrangements_agree_to_rounding() {
    let mut rng = sample::rng(45, 0);
    let q = sample::random_spd(2, &mut rng);
    let form = SymplecticForm::from_inner_product(&q).unwrap();
    let f = Quadratic::new(
        sample::random_spd(4, &mut rng),
        sample::random_vector(4, -0.5, 0.5, &mut rng),
        0.0,
    )
    .unwrap();
    for _ in 0..200 {
        let z1 = sample::random_point(2, -2.0, 2.0, &mut rng);
        let z2 = sample::random_point(2, -2.0, 2.0, &mut rng);
        let lifted = symplectic_gradient(&f, &form, &z2).unwrap();
        let diff = z1.sub(&z2);
        let one = form.evaluate(&lifted, &diff).unwrap();
        let other = form.evaluate(&diff, &lifted).unwrap();
        assert!((one + other).abs() <= 1e-12, "{one} vs {other}");
    }
}

#[test]
fn rewritten_inequality_in_split_coordinates() {
    // F(x, y) + F*(-y', x') >= <x', y> - <x, y'> for the canonical form.
    let mut rng = sample::rng(46, 0);
    let f = Quadratic::new(
        sample::random_spd(2, &mut rng),
        sample::random_vector(2, -0.3, 0.3, &mut rng),
        0.1,
    )
    .unwrap();
    for _ in 0..500 {
        let z = sample::random_point(1, -2.0, 2.0, &mut rng);
        let zp = sample::random_point(1, -2.0, 2.0, &mut rng);
        let fz = f.value(&z.flat()).finite().unwrap();
        let swapped = [-zp.y()[0], zp.x()[0]];
        let conj = fenchel_conjugate(&f, &swapped, &params()).unwrap();
        let rhs = zp.x()[0] * z.y()[0] - z.x()[0] * zp.y()[0];
        assert!(fz + conj.value >= rhs - 1e-9);
    }
}

#[test]
fn dual_bregman_swaps_argument_order() {
    let mut rng = sample::rng(47, 0);
    let f = Entropy::new(2);
    for _ in 0..50 {
        let x1 = sample::random_vector(2, 0.2, 3.0, &mut rng);
        let x2 = sample::random_vector(2, 0.2, 3.0, &mut rng);
        let primal = bregman(&f, &x1, &x2, None).unwrap();
        let x1_star = gradient_default(&f, &x1).unwrap();
        let x2_star = gradient_default(&f, &x2).unwrap();
        // B_F(x1 : x2) = B_{F*}(x2* : x1*).
        let dual = dual_bregman(&f, &x2_star, &x1_star, &params()).unwrap();
        assert!(
            (primal.value - dual.value).abs() <= 1e-9,
            "{} vs {}",
            primal.value,
            dual.value
        );
    }
}

#[test]
fn divergences_vanish_on_the_diagonal() {
    let mut rng = sample::rng(48, 0);
    let form = SymplecticForm::canonical(2).unwrap();
    let potentials: Vec<Box<dyn Potential>> = vec![
        Box::new(Quadratic::new(
            sample::random_spd(4, &mut rng),
            sample::random_vector(4, -0.5, 0.5, &mut rng),
            0.0,
        )
        .unwrap()),
        Box::new(Separable::new(Entropy::new(2), Entropy::new(2))),
    ];
    for (potential, lo, hi) in [(&potentials[0], -2.0, 2.0), (&potentials[1], 0.2, 3.0)] {
        for _ in 0..100 {
            let z = sample::random_point(2, lo, hi, &mut rng);
            let same = symplectic_bregman(potential.as_ref(), &form, &z, &z).unwrap();
            assert!(same.value <= 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn matrix_json_roundtrip_is_lossless(
        rows in 1usize..4,
        cols in 1usize..4,
        seed in any::<u64>(),
    ) {
        let mut rng = sample::rng(seed, 100);
        let data = sample::random_vector(rows * cols, -1e6, 1e6, &mut rng);
        let m = Matrix::new(rows, cols, data).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        let back: Matrix = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(m, back);
    }

    #[test]
    fn pairing_forms_are_skew_and_bilinear(
        seed in any::<u64>(),
        n in 1usize..4,
        alpha in -2.0f64..2.0,
        beta in -2.0f64..2.0,
    ) {
        let mut rng = sample::rng(seed, 101);
        let p = sample::random_invertible(n, &mut rng);
        let form = SymplecticForm::from_pairing(&DualSystem::new(p).unwrap()).unwrap();
        let z1 = sample::random_point(n, -2.0, 2.0, &mut rng);
        let z1p = sample::random_point(n, -2.0, 2.0, &mut rng);
        let z2 = sample::random_point(n, -2.0, 2.0, &mut rng);

        let w12 = form.evaluate(&z1, &z2).unwrap();
        let w21 = form.evaluate(&z2, &z1).unwrap();
        prop_assert!((w12 + w21).abs() <= 1e-9);
        prop_assert!(form.evaluate(&z1, &z1).unwrap().abs() <= 1e-9);

        let combo = z1.scale(alpha).add(&z1p.scale(beta));
        let lhs = form.evaluate(&combo, &z2).unwrap();
        let rhs = alpha * w12 + beta * form.evaluate(&z1p, &z2).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9);
    }

    #[test]
    fn random_group_elements_compose(seed_a in any::<u64>(), seed_b in any::<u64>()) {
        let a = random_symplectic(2, seed_a).unwrap();
        let b = random_symplectic(2, seed_b).unwrap();
        let product = a.matrix().matmul(b.matrix()).unwrap();
        prop_assert!(is_symplectic(&product, 1e-8).unwrap());
    }

    #[test]
    fn fenchel_young_gap_is_nonnegative_for_quadratics(
        seed in any::<u64>(),
        x in -2.0f64..2.0,
        y in -2.0f64..2.0,
        xp in -2.0f64..2.0,
        yp in -2.0f64..2.0,
    ) {
        let mut rng = sample::rng(seed, 102);
        let f = Quadratic::new(
            sample::random_spd(2, &mut rng),
            sample::random_vector(2, -0.5, 0.5, &mut rng),
            0.0,
        )
        .unwrap();
        let form = SymplecticForm::canonical(1).unwrap();
        let report = symplectic_fenchel_young(
            &f,
            &form,
            &point(&[x], &[y]),
            &point(&[xp], &[yp]),
            &params(),
        )
        .unwrap();
        prop_assert!(report.parts.reconstruct() >= -1e-8);
        prop_assert!(report.value >= 0.0);
    }

    #[test]
    fn trajectory_csv_roundtrip(
        seed in any::<u64>(),
        nodes in 2usize..8,
        n in 1usize..3,
    ) {
        let mut rng = sample::rng(seed, 103);
        let times: Vec<f64> = (0..nodes).map(|k| k as f64 * 0.25).collect();
        let points: Vec<PhasePoint> =
            (0..nodes).map(|_| sample::random_point(n, -5.0, 5.0, &mut rng)).collect();
        let rates: Vec<PhasePoint> =
            (0..nodes).map(|_| sample::random_point(n, -5.0, 5.0, &mut rng)).collect();
        let path = sbd_core::sben::DiscretePath::new(times, points, rates).unwrap();
        let text = sbd_core::sben::trajectory_to_csv(&path);
        let back = sbd_core::sben::trajectory_from_csv(&text).unwrap();
        prop_assert_eq!(back.times(), path.times());
        prop_assert_eq!(back.points(), path.points());
        prop_assert_eq!(back.irr_rates(), path.irr_rates());
    }
}
