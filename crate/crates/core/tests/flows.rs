use loewner_core::discretize::{bin_field, singleize_multislit, BinPoint};
use loewner_core::loewner::{solve_backward_f, solve_forward_g, DriverFormula};
use loewner_core::{Complex, DiscreteMeasure, DrivingFunction, HalfPlaneMap, HerglotzField, LoewnerField, SolverSettings};
use proptest::prelude::*;

fn smooth() -> LoewnerField {
    DrivingFunction::Formula(DriverFormula::CosineShift { offset: 0.5, amplitude: 0.4, frequency: 3.0 }).into()
}

fn two_piece_field() -> HerglotzField {
    HerglotzField::new(
        vec![0.4, 1.0],
        vec![
            DiscreteMeasure::new(vec![(0.1, 0.3), (0.55, 0.7)]).unwrap(),
            DiscreteMeasure::new(vec![(0.2, 0.5), (0.9, 0.5)]).unwrap(),
        ],
        1.0,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn forward_undoes_backward(re in -3.0f64..3.0, im in 0.5f64..5.0) {
        let z = Complex::new(re, im);
        let s = SolverSettings::default();
        for field in [smooth(), two_piece_field().into()] {
            let w = solve_backward_f(&field, 1.0, z, &s).unwrap();
            let back = solve_forward_g(&field, 1.0, w, &s).unwrap();
            prop_assert!((back - z).norm() < 1e-6, "{z} -> {w} -> {back}");
        }
    }

    #[test]
    fn earlier_maps_contain_later_images(re in -3.0f64..3.0, im in 0.5f64..5.0, s in 0.05f64..0.95) {
        let z = Complex::new(re, im);
        let set = SolverSettings::default();
        let field = smooth();
        let w = solve_backward_f(&field, 1.0, z, &set).unwrap();
        let h = solve_forward_g(&field, s, w, &set).unwrap();
        prop_assert!(h.im > 0.0);
    }
}

#[test]
fn piecewise_driver_is_a_composition_of_closed_forms() {
    let breakpoints = vec![0.3, 0.7, 1.0];
    let values = vec![0.5, -0.3, 1.0];
    let field: LoewnerField = DrivingFunction::piecewise(breakpoints.clone(), values.clone()).unwrap().into();
    let mut start = 0.0;
    let pieces: Vec<_> = breakpoints
        .iter()
        .zip(&values)
        .map(|(&b, &u)| {
            let map = HalfPlaneMap::slit(u, 2.0 * (b - start));
            start = b;
            map
        })
        .collect();
    let composed = HalfPlaneMap::compose(pieces);
    let s = SolverSettings::default();
    for j in 0..20 {
        let z = Complex::new(-2.0 + 0.2 * j as f64, 0.3 + 0.1 * j as f64);
        let exact = composed.eval(z).unwrap();
        let numeric = solve_backward_f(&field, 1.0, z, &s).unwrap();
        assert!((exact - numeric).norm() < 1e-7, "{z}: {exact} vs {numeric}");
    }
}

fn fixed_step_order(forward: bool) -> f64 {
    let field = smooth();
    let z = Complex::new(0.6, 0.4);
    let run = |steps: usize| {
        let s = SolverSettings::fixed(steps);
        if forward {
            solve_forward_g(&field, 1.0, z, &s).unwrap()
        } else {
            solve_backward_f(&field, 1.0, z, &s).unwrap()
        }
    };
    let reference = run(8192);
    let (coarse, fine) = ((run(32) - reference).norm(), (run(64) - reference).norm());
    (coarse / fine).log2()
}

#[test]
fn step_halving_order_forward() {
    let p = fixed_step_order(true);
    assert!(p >= 4.0, "observed order {p}");
}

#[test]
fn step_halving_order_backward() {
    let p = fixed_step_order(false);
    assert!(p >= 4.0, "observed order {p}");
}

/// Many small atoms, so that midpoint binning behaves like binning a density.
fn spread_measure(shift: f64) -> DiscreteMeasure {
    let raw: Vec<(f64, f64)> = (0..400).map(|j| ((j as f64 + shift) / 400.0, 1.0 + (j % 7) as f64)).collect();
    let total: f64 = raw.iter().map(|a| a.1).sum();
    DiscreteMeasure::new(raw.into_iter().map(|(x, w)| (x, w / total)).collect()).unwrap()
}

#[test]
fn discretization_ladder_is_cauchy() {
    let field = HerglotzField::new(vec![0.5, 1.0], vec![spread_measure(0.37), spread_measure(0.81)], 1.0).unwrap();
    let z = Complex::new(0.4, 0.8);
    let s = SolverSettings::default();
    let exact = solve_backward_f(&field.clone().into(), 1.0, z, &s).unwrap();
    let values: Vec<Complex> = [(2, 8), (4, 32), (8, 128), (16, 512), (32, 2048)]
        .iter()
        .map(|&(space, time)| {
            let multi = bin_field(&field, space, BinPoint::Midpoint).unwrap();
            let driver = singleize_multislit(&multi, 1.0, time).unwrap();
            solve_backward_f(&driver.into(), 1.0, z, &s).unwrap()
        })
        .collect();
    let steps: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    assert!(steps.windows(2).all(|w| w[1] < w[0]), "{steps:?}");
    let last = (values[values.len() - 1] - exact).norm();
    assert!(last < 5e-3, "distance to the field solution {last}");
}
