use std::sync::Arc;

use super::driver::LoewnerField;
use super::rk::Integrator;
use crate::error::{invalid, Result};
use crate::scalar::{Scalar, C};

/// Integration controls for the Loewner flows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings<S> {
    pub abs_tol: S,
    pub max_steps: usize,
    /// Forward trajectories with `Im w` below this value count as absorbed by the hull.
    pub eps_min: S,
    /// Equal steps per smooth piece instead of adaptive control.
    pub fixed_steps: Option<usize>,
}

impl<S: Scalar> Default for SolverSettings<S> {
    fn default() -> Self {
        Self {
            abs_tol: S::tol(1e-10),
            max_steps: 1_000_000,
            eps_min: S::lit(1e-8),
            fixed_steps: None,
        }
    }
}

impl<S: Scalar> SolverSettings<S> {
    pub fn with_tolerance(abs_tol: S) -> Self {
        Self { abs_tol, ..Self::default() }
    }

    pub fn fixed(steps: usize) -> Self {
        Self { fixed_steps: Some(steps), ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > S::zero()) || !(self.eps_min > S::zero()) {
            return Err(invalid("solver tolerance and eps_min must be positive"));
        }
        Ok(())
    }
}

fn validate_request<S: Scalar>(field: &LoewnerField<S>, t: S, z: C<S>) -> Result<()> {
    if !(t >= S::zero()) {
        return Err(invalid(format!("time must be non-negative, got {t}")));
    }
    if let Some(h) = field.horizon() {
        if t > h * (S::one() + S::tol(1e-12)) {
            return Err(invalid(format!("time {t} beyond field horizon {h}")));
        }
    }
    if !(z.im > S::zero()) {
        return Err(invalid("starting point must lie in the upper half-plane"));
    }
    Ok(())
}

/// `g_t(z)`: integrates `dw/ds = H(s, w)` from `w(0) = z` up to time `t`.
pub fn solve_forward_g<S: Scalar>(
    field: &LoewnerField<S>,
    t: S,
    z: C<S>,
    settings: &SolverSettings<S>,
) -> Result<C<S>> {
    settings.validate()?;
    validate_request(field, t, z)?;
    let mut it = Integrator::new(
        settings.abs_tol,
        settings.max_steps,
        Some(settings.eps_min),
        settings.fixed_steps,
    );
    let mut w = z;
    for (lo, hi) in field.pieces(t) {
        let rhs = field.on_piece(lo, hi);
        w = it.run(|s, w| rhs.eval(s, w), lo, hi, w)?;
    }
    Ok(w)
}

/// `f_t(z) = g_t⁻¹(z)`: integrates the reversed flow `dw/ds = -H(t - s, w)`
/// over `s ∈ [0, t]`. `Im w` grows along this flow, so nothing is absorbed.
pub fn solve_backward_f<S: Scalar>(
    field: &LoewnerField<S>,
    t: S,
    z: C<S>,
    settings: &SolverSettings<S>,
) -> Result<C<S>> {
    settings.validate()?;
    validate_request(field, t, z)?;
    let mut it = Integrator::new(settings.abs_tol, settings.max_steps, None, settings.fixed_steps);
    let mut w = z;
    for (lo, hi) in field.pieces(t).into_iter().rev() {
        let rhs = field.on_piece(lo, hi);
        w = it.run(|s, w| -rhs.eval(t - s, w), t - hi, t - lo, w)?;
    }
    Ok(w)
}

/// The map `f_t` of a Loewner field, usable as a [`crate::halfplane::HalfPlaneMap`].
#[derive(Debug, Clone)]
pub struct FlowMap<S> {
    pub field: Arc<LoewnerField<S>>,
    pub time: S,
    pub settings: SolverSettings<S>,
}

impl<S: Scalar> FlowMap<S> {
    pub fn eval(&self, z: C<S>) -> Result<C<S>> {
        solve_backward_f(&self.field, self.time, z, &self.settings)
    }
}
