use rayon::prelude::*;

use super::{HalfPlaneMap, MomentSequence};
use crate::error::{invalid, Error, Result};
use crate::scalar::{c, Scalar};

/// Quadrature controls for contour moment extraction.
#[derive(Debug, Clone, Copy)]
pub struct ContourSettings<S> {
    /// Points on the full circle; a power of two, at least 256.
    pub points: usize,
    /// Number of point doublings tried before declaring instability.
    pub max_doublings: usize,
    /// Allowed change of a moment under refinement, relative to `max(1, |m_k|)`.
    pub stability_tol: S,
    /// Allowed `|m_0 - 1|`.
    pub normalization_tol: S,
}

impl<S: Scalar> Default for ContourSettings<S> {
    fn default() -> Self {
        Self {
            points: 1024,
            max_doublings: 2,
            stability_tol: S::tol(1e-8),
            normalization_tol: S::tol(1e-6),
        }
    }
}

/// Trapezoid rule for `(1/2πi)∮ z^k G(z) dz` on `|z| = radius` with `points`
/// nodes at half-step offsets. Only the upper semicircle is evaluated; the
/// lower half follows from `G(z̄) = conj G(z)`, so each moment is real.
fn contour_pass<S: Scalar>(
    map: &HalfPlaneMap<S>,
    radius: S,
    order: usize,
    points: usize,
) -> Result<Vec<S>> {
    let half = points / 2;
    let step = S::PI() / S::from_usize_lossy(half);
    let samples: Vec<_> = (0..half)
        .into_par_iter()
        .map(|j| {
            let theta = (S::from_usize_lossy(j) + S::lit(0.5)) * step;
            let z = c(radius * theta.cos(), radius * theta.sin());
            map.cauchy(z).map(|g| (z, g * z))
        })
        .collect::<Result<_>>()?;
    let mut moments = vec![S::zero(); order + 1];
    for (z, mut term) in samples {
        for m in moments.iter_mut() {
            *m += term.re;
            term *= z;
        }
    }
    let weight = S::lit(2.0) / S::from_usize_lossy(points);
    Ok(moments.into_iter().map(|m| m * weight).collect())
}

fn max_change<S: Scalar>(a: &[S], b: &[S]) -> (usize, S, S) {
    let mut worst = (0, S::zero(), S::zero());
    for (k, (x, y)) in a.iter().zip(b).enumerate() {
        let change = (*x - *y).abs();
        let rel = change / S::one().max(y.abs());
        if rel > worst.2 {
            worst = (k, change, rel);
        }
    }
    worst
}

/// Moments `m_0 … m_order` of the measure whose F-transform is `map`, read off
/// a circle of the given radius, which must enclose the support.
pub fn moments_by_contour<S: Scalar>(
    map: &HalfPlaneMap<S>,
    radius: S,
    order: usize,
    settings: &ContourSettings<S>,
) -> Result<MomentSequence<S>> {
    if settings.points < 256 || !settings.points.is_power_of_two() {
        return Err(invalid(format!(
            "contour point count must be a power of two >= 256, got {}",
            settings.points
        )));
    }
    if !(radius > S::zero()) {
        return Err(invalid("contour radius must be positive"));
    }
    let check_norm = |m: &[S]| {
        let deviation = (m[0] - S::one()).abs();
        if deviation < settings.normalization_tol {
            Ok(())
        } else {
            Err(Error::ContourNormalization {
                deviation: deviation.to_f64().unwrap_or(f64::NAN),
                radius: radius.to_f64().unwrap_or(f64::NAN),
            })
        }
    };
    let mut coarse = contour_pass(map, radius, order, settings.points)?;
    check_norm(&coarse)?;
    let mut points = settings.points;
    let mut last = (0, S::zero());
    for _ in 0..settings.max_doublings {
        points *= 2;
        let fine = contour_pass(map, radius, order, points)?;
        check_norm(&fine)?;
        let (k, change, rel) = max_change(&coarse, &fine);
        if rel <= settings.stability_tol {
            let mut values = fine;
            values[0] = S::one();
            return Ok(MomentSequence::new(values));
        }
        last = (k, change);
        coarse = fine;
    }
    Err(Error::ContourUnstable {
        order: last.0,
        change: last.1.to_f64().unwrap_or(f64::NAN),
    })
}

/// Contour moments together with the radius that produced them.
#[derive(Debug, Clone)]
pub struct AdaptiveMoments<S> {
    pub moments: MomentSequence<S>,
    pub radius: S,
}

/// Grows the radius from `seed` by 50% steps until the normalization check
/// passes and the moments agree with those at the next radius.
pub fn moments_adaptive<S: Scalar>(
    map: &HalfPlaneMap<S>,
    seed: S,
    order: usize,
    settings: &ContourSettings<S>,
) -> Result<AdaptiveMoments<S>> {
    const MAX_TRIES: usize = 16;
    let grow = S::lit(1.5);
    let mut radius = seed;
    let mut last_err = None;
    for _ in 0..MAX_TRIES {
        let here = match moments_by_contour(map, radius, order, settings) {
            Ok(m) => m,
            Err(e @ (Error::ContourNormalization { .. } | Error::ContourUnstable { .. })) => {
                last_err = Some(e);
                radius *= grow;
                continue;
            }
            Err(e) => return Err(e),
        };
        match moments_by_contour(map, radius * grow, order, settings) {
            Ok(next) => {
                let (k, change, rel) = max_change(here.values(), next.values());
                if rel <= settings.stability_tol {
                    return Ok(AdaptiveMoments { moments: here, radius });
                }
                last_err = Some(Error::ContourUnstable {
                    order: k,
                    change: change.to_f64().unwrap_or(f64::NAN),
                });
            }
            Err(e @ (Error::ContourNormalization { .. } | Error::ContourUnstable { .. })) => {
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
        radius *= grow;
    }
    Err(last_err.unwrap_or(Error::ContourUnstable { order: 0, change: f64::NAN }))
}
