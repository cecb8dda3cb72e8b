//! Numerical chordal Loewner flows: forward `g_t`, backward `f_t`, scaling and
//! the normalization checks of the associated measures.

mod driver;
mod flow;
mod rk;

use std::sync::Arc;

pub use driver::{DriverFormula, DrivingFunction, HerglotzField, LoewnerField};
pub use flow::{solve_backward_f, solve_forward_g, FlowMap, SolverSettings};

use crate::error::{invalid, Error, Result};
use crate::halfplane::{i_times, moments_adaptive, ContourSettings, HalfPlaneMap, MomentSequence};
use crate::scalar::Scalar;

impl<S: Scalar> HalfPlaneMap<S> {
    /// Wraps `f_t` of the given field as a half-plane map.
    pub fn flow(field: Arc<LoewnerField<S>>, time: S, settings: SolverSettings<S>) -> Self {
        HalfPlaneMap::Flow(Arc::new(FlowMap { field, time, settings }))
    }
}

/// `z ↦ F(c·z)/c`: the F-transform of `B ↦ μ(c·B)`.
///
/// When `F = f_{d·t}` of a driver `U`, the result is `h_t` for the driver
/// `U(d·t)/c` with the time-change factor `d/c²`; `d` is carried along for
/// bookkeeping only.
pub fn scale_map<S: Scalar>(map: HalfPlaneMap<S>, c: S, d: S) -> Result<HalfPlaneMap<S>> {
    if !(c > S::zero()) || !(d > S::zero()) {
        return Err(invalid("scale factors must be positive"));
    }
    Ok(HalfPlaneMap::Scaled { inner: Box::new(map), factor: c, time_factor: d })
}

/// `|F(iR) - (iR - t/(iR))|`, the defect of hydrodynamic normalization.
pub fn hydro_residual<S: Scalar>(map: &HalfPlaneMap<S>, t: S, radius: S) -> Result<S> {
    let z = i_times(radius);
    Ok((map.eval(z)? - (z - z.inv() * t)).norm())
}

/// Moments of `μ_t` (with `F_{μ_t} = f_t`) from the numerical flow.
///
/// The contour radius starts at `M + 4√t + 1` and grows until the moments are
/// radius-stable. The result must satisfy `|m_1| < 1e-7` and `|m_2 - t| < 1e-6`.
pub fn measure_moments_at_time<S: Scalar>(
    field: &Arc<LoewnerField<S>>,
    t: S,
    order: usize,
    settings: &SolverSettings<S>,
    contour: &ContourSettings<S>,
) -> Result<MomentSequence<S>> {
    if !(t >= S::zero()) {
        return Err(invalid("time must be non-negative"));
    }
    let map = HalfPlaneMap::flow(field.clone(), t, *settings);
    let seed = field.support_bound(t) + S::lit(4.0) * t.sqrt() + S::one();
    let moments = moments_adaptive(&map, seed, order, contour)?.moments;
    let v = moments.values();
    if order >= 1 && !(v[1].abs() < S::tol(1e-7)) {
        return Err(Error::NormalizationViolated(format!("mean {} at t = {t}", v[1])));
    }
    if order >= 2 && !((v[2] - t).abs() < S::tol(1e-6)) {
        return Err(Error::NormalizationViolated(format!("variance {} at t = {t}", v[2])));
    }
    Ok(moments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfplane::{moments_by_contour, DiscreteMeasure};
    use crate::scalar::c;
    use approx::assert_abs_diff_eq;

    #[test]
    fn scaling_identity() {
        let f = HalfPlaneMap::slit(0.3, 2.0);
        let g = scale_map(f.clone(), 1.0, 1.0).unwrap();
        for k in 0..20 {
            let z = c(-2.0 + 0.2 * k as f64, 0.1 + 0.3 * k as f64);
            assert_eq!(f.eval(z).unwrap(), g.eval(z).unwrap());
        }
        assert!(scale_map(f, 0.0, 1.0).is_err());
    }

    #[test]
    fn scaling_law_for_arcsine() {
        let (cf, t) = (3.0f64, 0.7);
        let scaled = scale_map(HalfPlaneMap::slit(0.0, 2.0 * cf * cf * t), cf, cf * cf).unwrap();
        let plain = HalfPlaneMap::slit(0.0, 2.0 * t);
        for k in 0..20 {
            let z = c(-3.0 + 0.31 * k as f64, 0.05 + 0.25 * k as f64);
            assert!((scaled.eval(z).unwrap() - plain.eval(z).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn scaled_meixner_variance() {
        let (n, u, horizon) = (3.0f64, 2.0, 1.5);
        let cf = (2.0 * n.powi(3) / horizon).sqrt();
        let f = scale_map(HalfPlaneMap::slit(u, 4.0 * n * n), cf, cf * cf).unwrap();
        let m = moments_by_contour(&f, 2.0, 2, &ContourSettings::default()).unwrap();
        assert_abs_diff_eq!(m.values()[2], horizon / n, epsilon = 1e-8);
    }

    #[test]
    fn hydro_examples() {
        assert_eq!(hydro_residual(&HalfPlaneMap::<f64>::Identity, 0.0, 7.0).unwrap(), 0.0);
        assert!(hydro_residual(&HalfPlaneMap::slit(0.0, 2.0), 1.0, 100.0).unwrap() <= 1e-4);
        let n = 3.0;
        let r = hydro_residual(&HalfPlaneMap::slit(0.0, 4.0 * n), 2.0 * n, 1000.0).unwrap();
        assert!(r <= 1e-6);
    }

    #[test]
    fn flow_moments_examples() {
        let s = SolverSettings::default();
        let cs = ContourSettings::default();
        let dirac: Arc<LoewnerField<f64>> = Arc::new(DrivingFunction::Constant(0.0).into());
        let m = measure_moments_at_time(&dirac, 1.0, 4, &s, &cs).unwrap();
        for (a, b) in m.values().iter().zip([1.0, 0.0, 1.0, 0.0, 1.5]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-8);
        }
        let m0 = measure_moments_at_time(&dirac, 0.0, 4, &s, &cs).unwrap();
        assert_eq!(m0.values()[0], 1.0);
        assert!(m0.values()[1..].iter().all(|v| v.abs() < 1e-14));

        let two = Arc::new(
            HerglotzField::constant(
                DiscreteMeasure::new(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap(),
                1.0,
                1.0,
            )
            .unwrap()
            .into(),
        );
        let m = measure_moments_at_time(&two, 0.5, 2, &s, &cs).unwrap();
        assert_abs_diff_eq!(m.values()[1], 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(m.values()[2], 0.5, epsilon = 1e-8);
    }
}
