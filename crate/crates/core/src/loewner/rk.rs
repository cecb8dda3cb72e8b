//! Dormand–Prince 5(4) for a scalar complex ODE `w' = f(s, w)`.

use crate::error::{Error, Result};
use crate::scalar::{finite, Scalar, C};

//                      c2     c3      c4     c5     c6  c7
const NODES: [f64; 7] = [0.0, 1. / 5., 3. / 10., 4. / 5., 8. / 9., 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1. / 5., 0.0, 0.0, 0.0, 0.0, 0.0],
    [3. / 40., 9. / 40., 0.0, 0.0, 0.0, 0.0],
    [44. / 45., -56. / 15., 32. / 9., 0.0, 0.0, 0.0],
    [19372. / 6561., -25360. / 2187., 64448. / 6561., -212. / 729., 0.0, 0.0],
    [9017. / 3168., -355. / 33., 46732. / 5247., 49. / 176., -5103. / 18656., 0.0],
    [35. / 384., 0.0, 500. / 1113., 125. / 192., -2187. / 6784., 11. / 84.],
];

// 5th-order weights equal the last row of A (FSAL); these are b - b*.
const ERR: [f64; 7] = [
    71. / 57600.,
    0.0,
    -71. / 16695.,
    71. / 1920.,
    -17253. / 339200.,
    22. / 525.,
    -1. / 40.,
];

/// Tableau converted to the working scalar type once per integration.
struct Tableau<S> {
    nodes: [S; 7],
    a: [[S; 6]; 7],
    err: [S; 7],
}

impl<S: Scalar> Tableau<S> {
    fn new() -> Self {
        Self {
            nodes: NODES.map(S::lit),
            a: A.map(|row| row.map(S::lit)),
            err: ERR.map(S::lit),
        }
    }
}

/// Step-size control and stopping rules shared by both flow directions.
pub(crate) struct Integrator<S> {
    pub abs_tol: S,
    pub max_steps: usize,
    /// Abort with `HullAbsorbed` when `Im w` falls below this value.
    pub guard: Option<S>,
    /// Take this many equal steps instead of adapting.
    pub fixed_steps: Option<usize>,
    pub steps_taken: usize,
    tableau: Tableau<S>,
}

impl<S: Scalar> Integrator<S> {
    pub fn new(abs_tol: S, max_steps: usize, guard: Option<S>, fixed_steps: Option<usize>) -> Self {
        Self { abs_tol, max_steps, guard, fixed_steps, steps_taken: 0, tableau: Tableau::new() }
    }

    /// One Dormand–Prince step; returns the 5th-order value and error estimate.
    fn step(&self, f: &impl Fn(S, C<S>) -> C<S>, s: S, w: C<S>, h: S) -> (C<S>, S) {
        let tab = &self.tableau;
        let mut k = [C::new(S::zero(), S::zero()); 7];
        k[0] = f(s, w);
        for i in 1..7 {
            let mut acc = w;
            for j in 0..i {
                if tab.a[i][j] != S::zero() {
                    acc += k[j] * (tab.a[i][j] * h);
                }
            }
            k[i] = f(s + tab.nodes[i] * h, acc);
        }
        let mut next = w;
        for j in 0..6 {
            next += k[j] * (tab.a[6][j] * h);
        }
        let mut err = C::new(S::zero(), S::zero());
        for j in 0..7 {
            err += k[j] * (tab.err[j] * h);
        }
        (next, err.norm())
    }

    fn check(&self, s: S, w: C<S>) -> Result<()> {
        let im = w.im.to_f64().unwrap_or(f64::NAN);
        if !finite(w) {
            return Err(Error::HullAbsorbed { time: s.to_f64().unwrap_or(f64::NAN), im });
        }
        if let Some(g) = self.guard {
            if w.im < g {
                return Err(Error::HullAbsorbed { time: s.to_f64().unwrap_or(f64::NAN), im });
            }
        }
        Ok(())
    }

    /// Integrates from `s0` to `s1 > s0` starting at `w0`.
    pub fn run(&mut self, f: impl Fn(S, C<S>) -> C<S>, s0: S, s1: S, w0: C<S>) -> Result<C<S>> {
        let span = s1 - s0;
        if !(span > S::zero()) {
            return Ok(w0);
        }
        if let Some(n) = self.fixed_steps {
            let h = span / S::from_usize_lossy(n.max(1));
            let mut w = w0;
            for i in 0..n.max(1) {
                let s = s0 + h * S::from_usize_lossy(i);
                w = self.step(&f, s, w, h).0;
                self.steps_taken += 1;
                self.check(s + h, w)?;
            }
            return Ok(w);
        }

        let safety = S::lit(0.9);
        let (alpha, beta) = (S::lit(0.7 / 5.0), S::lit(0.4 / 5.0));
        let (min_factor, max_factor) = (S::lit(0.2), S::lit(5.0));
        let tiny = S::epsilon() * S::lit(64.0) * S::one().max(s1.abs());
        let mut s = s0;
        let mut w = w0;
        let mut h = (span * S::lit(0.05)).min(S::one());
        let mut prev_ratio = S::one();
        let mut rejected = false;
        while s < s1 {
            if self.steps_taken >= self.max_steps {
                return Err(Error::StepLimit {
                    limit: self.max_steps,
                    target: s1.to_f64().unwrap_or(f64::NAN),
                });
            }
            let last = s + h >= s1;
            let h_try = if last { s1 - s } else { h };
            let (next, err) = self.step(&f, s, w, h_try);
            self.steps_taken += 1;
            let ratio = err / self.abs_tol;
            if ratio <= S::one() && finite(next) {
                s = if last { s1 } else { s + h_try };
                w = next;
                self.check(s, w)?;
                let r = ratio.max(S::lit(1e-10));
                let mut factor = safety * r.powf(-alpha) * prev_ratio.powf(beta);
                factor = factor.max(min_factor).min(max_factor);
                if rejected {
                    factor = factor.min(S::one());
                }
                h = h_try * factor;
                prev_ratio = r.max(S::lit(1e-4));
                rejected = false;
            } else {
                let factor = if ratio.is_finite() {
                    (safety * ratio.powf(-S::lit(0.2))).max(min_factor)
                } else {
                    min_factor
                };
                h = h_try * factor;
                rejected = true;
                if self.guard.is_some() && h < tiny {
                    // Step size collapsed next to a singularity of the field.
                    return Err(Error::HullAbsorbed {
                        time: s.to_f64().unwrap_or(f64::NAN),
                        im: w.im.to_f64().unwrap_or(f64::NAN),
                    });
                }
                if h < tiny {
                    return Err(Error::StepLimit {
                        limit: self.steps_taken,
                        target: s1.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        Ok(w)
    }
}
