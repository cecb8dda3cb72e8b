//! Convergence of the approximation pipelines along resolution ladders on
//! which `√(2n³/T)` is irrational, so the floor introduces a genuine
//! quantization error at every rung.

use loewner_core::pipeline::{run_field_approximation, run_slit_approximation, DriverSpec, FieldSpec, PipelineConfig, Trend};

fn strict(cfg: &mut PipelineConfig, max_order: usize) {
    cfg.checks.trend = Trend::Strict;
    cfg.checks.trend_max_order = Some(max_order);
}

#[test]
fn unit_driver_improves_along_irrational_scales() {
    let mut cfg = PipelineConfig::for_driver(DriverSpec::Constant { value: 1.0 }, 1.0, vec![16, 64], vec![0.25, 0.5, 1.0], 6);
    strict(&mut cfg, 6);
    let report = run_slit_approximation(&cfg).unwrap();
    assert!(report.passed(), "{:?}", report.checks);
}

#[test]
fn linear_driver_improves() {
    let mut cfg = PipelineConfig::for_driver(
        DriverSpec::Linear { intercept: 0.2, slope: 0.6 },
        1.0,
        vec![8, 16, 32, 64],
        vec![0.25, 0.5, 1.0],
        4,
    );
    strict(&mut cfg, 4);
    let report = run_slit_approximation(&cfg).unwrap();
    assert!(report.passed(), "{:?}", report.checks);
}

#[test]
fn two_atom_field_improves_along_irrational_scales() {
    let mut cfg = PipelineConfig::for_field(
        FieldSpec::Constant { atoms: vec![(0.25, 0.5), (0.75, 0.5)] },
        1.0,
        1.0,
        vec![4, 16, 64],
        vec![0.25, 0.5, 1.0],
        4,
    );
    strict(&mut cfg, 4);
    let report = run_field_approximation(&cfg).unwrap();
    assert!(report.passed(), "{:?}", report.checks);
}

#[test]
fn integer_scales_make_constant_drivers_exact() {
    // √(2n³) = 32 at n = 8: every level is exactly U·c and the composition
    // telescopes to the closed-form flow.
    let cfg = PipelineConfig::for_driver(DriverSpec::Constant { value: 1.0 }, 1.0, vec![8], vec![0.25, 0.5, 1.0], 6);
    let report = run_slit_approximation(&cfg).unwrap();
    assert!(report.rows.iter().all(|r| r.abs_error < 1e-10));
}
