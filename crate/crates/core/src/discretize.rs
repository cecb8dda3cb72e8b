//! Turning continuous Loewner data into piecewise-constant drivers and
//! spidernet indices.

use crate::error::{invalid, Error, Result};
use crate::loewner::{DrivingFunction, HerglotzField};
use crate::scalar::Scalar;

/// Largest driver value admissible at resolution `n` on `[0, horizon]`:
/// `√(T/2)·(2√n − n^{-3/2})`.
pub fn max_driver_bound<S: Scalar>(horizon: S, n: usize) -> S {
    let n = S::from_usize_lossy(n);
    (horizon / S::lit(2.0)).sqrt() * (S::lit(2.0) * n.sqrt() - n.powf(S::lit(-1.5)))
}

/// Spatial scale `√(2n³/T)` that maps driver values to spidernet indices.
pub fn index_scale<S: Scalar>(horizon: S, n: usize) -> S {
    (S::lit(2.0) * S::from_usize_lossy(n).powi(3) / horizon).sqrt()
}

/// Integer driver levels `u_{n,1} … u_{n,n}` on the grid `kT/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriverQuantization<S> {
    pub horizon: S,
    pub n: usize,
    /// Bound on the driver over `[0, T]` that was checked for feasibility.
    pub bound: S,
    pub levels: Vec<u64>,
}

impl<S: Scalar> DriverQuantization<S> {
    /// Spidernet family parameter `n²` for the pipeline.
    pub fn family(&self) -> u64 {
        (self.n * self.n) as u64
    }

    /// Driver value `√(T/(2n³))·u_{n,k}` represented by level `k` (1-based).
    pub fn level_value(&self, k: usize) -> S {
        S::from_u64(self.levels[k - 1]).unwrap() / index_scale(self.horizon, self.n)
    }
}

/// `u_{n,k} = ⌊√(2T)·√n · U(kT/n) / (T/n)⌋` for `k = 1 … n`.
pub fn quantize_driver<S: Scalar>(
    driver: &DrivingFunction<S>,
    horizon: S,
    n: usize,
) -> Result<DriverQuantization<S>> {
    let (_, sup) = driver.range_on(horizon);
    quantize_driver_with_bound(driver, horizon, n, sup)
}

/// As [`quantize_driver`], checking feasibility against a caller-supplied bound.
pub fn quantize_driver_with_bound<S: Scalar>(
    driver: &DrivingFunction<S>,
    horizon: S,
    n: usize,
    bound: S,
) -> Result<DriverQuantization<S>> {
    if n == 0 || !(horizon > S::zero()) {
        return Err(invalid("resolution and horizon must be positive"));
    }
    let max = max_driver_bound(horizon, n);
    let (_, sup) = driver.range_on(horizon);
    let bound = bound.max(sup);
    if bound > max {
        return Err(Error::InfeasibleResolution {
            n,
            bound: bound.to_f64().unwrap_or(f64::NAN),
            max: max.to_f64().unwrap_or(f64::NAN),
        });
    }
    let scale = index_scale(horizon, n);
    let top = (2 * n * n - 1) as u64;
    let mut levels = Vec::with_capacity(n);
    for k in 1..=n {
        let t = horizon * S::from_usize_lossy(k) / S::from_usize_lossy(n);
        let u = driver.eval(t);
        if u < S::zero() {
            return Err(Error::NegativeDriver {
                time: t.to_f64().unwrap_or(f64::NAN),
                value: u.to_f64().unwrap_or(f64::NAN),
            });
        }
        let x = scale * u;
        // Absorb rounding of products that are integers in exact arithmetic.
        let level = (x + S::tol(1e-12) * S::one().max(x)).floor();
        levels.push(level.to_u64().unwrap_or(top).min(top));
    }
    Ok(DriverQuantization { horizon, n, bound, levels })
}

/// Weights `λ_k` and drivers `V_k` of the multi-slit field `Σ λ_k(t)/(z − V_k(t))`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiSlit<S> {
    pub weights: Vec<DrivingFunction<S>>,
    pub drivers: Vec<DrivingFunction<S>>,
}

impl<S: Scalar> MultiSlit<S> {
    pub fn new(weights: Vec<DrivingFunction<S>>, drivers: Vec<DrivingFunction<S>>) -> Result<Self> {
        if weights.is_empty() || weights.len() != drivers.len() {
            return Err(invalid("multi-slit needs one weight per driver"));
        }
        Ok(Self { weights, drivers })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Checks `λ_k ≥ 0` and `Σ λ_k = 1` on `samples + 1` uniform points of `[0, horizon]`.
    pub fn validate(&self, horizon: S, samples: usize) -> Result<()> {
        for i in 0..=samples {
            let t = horizon * S::from_usize_lossy(i) / S::from_usize_lossy(samples.max(1));
            let mut total = S::zero();
            for w in &self.weights {
                let v = w.eval(t);
                if v < S::zero() {
                    return Err(invalid(format!("negative weight {v} at t = {t}")));
                }
                total += v;
            }
            if (total - S::one()).abs() > S::tol(1e-12) {
                return Err(invalid(format!("weights sum to {total} at t = {t}")));
            }
        }
        Ok(())
    }
}

/// Replaces the multi-slit field by a single slit: on each of `m` equal
/// intervals `I_j` the driver runs through `V_1, V_2, …` on consecutive
/// sub-intervals of relative lengths `λ_k(t_j)`, `t_j` the right end of `I_j`.
/// Each sub-interval carries the value of `V_k` at its own midpoint.
pub fn singleize_multislit<S: Scalar>(
    multi: &MultiSlit<S>,
    horizon: S,
    m: usize,
) -> Result<DrivingFunction<S>> {
    if m == 0 || !(horizon > S::zero()) {
        return Err(invalid("interval count and horizon must be positive"));
    }
    let width = horizon / S::from_usize_lossy(m);
    let mut breakpoints = Vec::new();
    let mut values = Vec::new();
    for j in 0..m {
        let start = width * S::from_usize_lossy(j);
        let end = if j + 1 == m { horizon } else { width * S::from_usize_lossy(j + 1) };
        let mut cursor = start;
        let mut cumulative = S::zero();
        let last_positive = multi.weights.iter().rposition(|w| w.eval(end) > S::zero());
        for (k, (weight, driver)) in multi.weights.iter().zip(&multi.drivers).enumerate() {
            let lambda = weight.eval(end);
            if !(lambda > S::zero()) {
                continue;
            }
            cumulative += lambda;
            let stop = if Some(k) == last_positive { end } else { start + width * cumulative };
            if stop > cursor {
                breakpoints.push(stop);
                values.push(driver.eval((cursor + stop) * S::lit(0.5)));
                cursor = stop;
            }
        }
    }
    DrivingFunction::piecewise(breakpoints, values)
}

/// Box-kernel smoothing of weights sampled on a uniform grid over `[0, horizon]`
/// (reflected at both ends), renormalized so the weights sum to one everywhere.
pub fn mollify_weights<S: Scalar>(weights: &[Vec<S>], horizon: S, window: S) -> Result<Vec<Vec<S>>> {
    let len = weights.first().map_or(0, Vec::len);
    if len < 2 || weights.iter().any(|w| w.len() != len) {
        return Err(invalid("weights must share a grid with at least two samples"));
    }
    if !(window > S::zero()) || window > horizon {
        return Err(invalid("window must lie in (0, horizon]"));
    }
    let h = horizon / S::from_usize_lossy(len - 1);
    let half = window * S::lit(0.5);
    let mut out: Vec<Vec<S>> = weights
        .iter()
        .map(|w| {
            let cumulative = cumulative_trapezoid(w, h);
            (0..len)
                .map(|i| {
                    let t = h * S::from_usize_lossy(i);
                    reflected_integral(w, &cumulative, h, horizon, t - half, t + half) / window
                })
                .collect()
        })
        .collect();
    for i in 0..len {
        let total = out.iter().fold(S::zero(), |acc, w| acc + w[i]);
        if total > S::zero() {
            for w in out.iter_mut() {
                w[i] /= total;
            }
        }
    }
    Ok(out)
}

fn cumulative_trapezoid<S: Scalar>(w: &[S], h: S) -> Vec<S> {
    let mut acc = vec![S::zero(); w.len()];
    for i in 1..w.len() {
        acc[i] = acc[i - 1] + (w[i - 1] + w[i]) * h * S::lit(0.5);
    }
    acc
}

/// `∫_0^x` of the linear interpolant, `0 ≤ x ≤ T`.
fn primitive<S: Scalar>(w: &[S], cumulative: &[S], h: S, x: S) -> S {
    let cells = w.len() - 1;
    let pos = (x / h).max(S::zero());
    let i = pos.floor().to_usize().unwrap_or(0).min(cells - 1);
    let frac = (pos - S::from_usize_lossy(i)).min(S::one());
    let slope = w[i + 1] - w[i];
    cumulative[i] + h * (w[i] * frac + slope * frac * frac * S::lit(0.5))
}

fn reflected_integral<S: Scalar>(w: &[S], cumulative: &[S], h: S, horizon: S, a: S, b: S) -> S {
    let p = |x: S| primitive(w, cumulative, h, x.max(S::zero()).min(horizon));
    let mut total = p(b.min(horizon)) - p(a.max(S::zero()));
    if a < S::zero() {
        total += p(-a);
    }
    if b > horizon {
        total += p(horizon) - p(horizon + horizon - b);
    }
    total
}

/// Representative point used for each spatial bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BinPoint {
    #[default]
    Midpoint,
    /// Centre of mass of `ν_t` inside the bin (midpoint when the bin is empty).
    Barycenter,
}

/// Bins `[0, M]` into `I_1 = [0, M/m]`, `I_k = ((k−1)M/m, kM/m]`, with weights
/// `λ_k(t) = ν_t(I_k)` and one slit driver per bin.
pub fn bin_field<S: Scalar>(field: &HerglotzField<S>, m: usize, point: BinPoint) -> Result<MultiSlit<S>> {
    if m == 0 {
        return Err(invalid("bin count must be positive"));
    }
    if !field.nonnegative_support() {
        return Err(invalid("field support must lie in [0, M]"));
    }
    let bound = field.bound();
    let width = bound / S::from_usize_lossy(m);
    let edges: Vec<_> = (0..=m)
        .map(|k| if k == m { bound } else { width * S::from_usize_lossy(k) })
        .collect();
    let cells = field.breakpoints().to_vec();
    let mut weights = Vec::with_capacity(m);
    let mut drivers = Vec::with_capacity(m);
    for k in 0..m {
        let (lo, hi) = (edges[k], edges[k + 1]);
        let midpoint = (lo + hi) * S::lit(0.5);
        let mut lambdas = Vec::with_capacity(cells.len());
        let mut points = Vec::with_capacity(cells.len());
        for nu in field.measures() {
            let mut mass = S::zero();
            let mut first = S::zero();
            for &(x, w) in nu.atoms() {
                if (x > lo || (k == 0 && x == lo)) && x <= hi {
                    mass += w;
                    first += w * x;
                }
            }
            lambdas.push(mass);
            points.push(match point {
                BinPoint::Barycenter if mass > S::zero() => first / mass,
                _ => midpoint,
            });
        }
        weights.push(steps_or_constant(&cells, lambdas)?);
        drivers.push(steps_or_constant(&cells, points)?);
    }
    MultiSlit::new(weights, drivers)
}

fn steps_or_constant<S: Scalar>(cells: &[S], values: Vec<S>) -> Result<DrivingFunction<S>> {
    if values.windows(2).all(|w| w[0] == w[1]) {
        Ok(DrivingFunction::Constant(values[0]))
    } else {
        DrivingFunction::piecewise(cells.to_vec(), values)
    }
}
