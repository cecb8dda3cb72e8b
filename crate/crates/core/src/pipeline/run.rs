use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;

use super::config::{PipelineConfig, ReferenceSource, Trend};
use super::report::{CheckOutcome, ConvergenceReport, ReportMetadata, ReportRow};
use crate::discretize::{bin_field, index_scale, quantize_driver_with_bound, singleize_multislit, BinPoint, DriverQuantization};
use crate::error::{invalid, Error, Result};
use crate::graph::{build_spidernet, comb_ball, SpidernetSpec};
use crate::halfplane::{moments_adaptive, moments_by_contour, ContourSettings, HalfPlaneMap, MomentSequence};
use crate::loewner::{measure_moments_at_time, scale_map, DrivingFunction, HerglotzField, LoewnerField};
use crate::moments::{adjacency_vs_sum, check_monotone_factorization, root_moments};

/// Number of grid steps `⌊tn/T⌋` up to time `t`.
pub fn steps_until(t: f64, horizon: f64, n: usize) -> usize {
    ((t * n as f64 / horizon) + 1e-9).floor() as usize
}

/// `F_1 ∘ … ∘ F_k` with `F_j = √((z − u_j)² − 4n²) + u_j`, before rescaling.
pub fn composed_meixner(q: &DriverQuantization<f64>, k: usize) -> HalfPlaneMap<f64> {
    let s = 4.0 * q.family() as f64;
    HalfPlaneMap::compose(q.levels[..k].iter().map(|&u| HalfPlaneMap::slit(u as f64, s)))
}

/// The rescaled approximant of `μ_{kT/n}`: [`composed_meixner`] seen at
/// spatial scale `c = √(2n³/T)`.
pub fn slit_approximant(q: &DriverQuantization<f64>, k: usize) -> Result<HalfPlaneMap<f64>> {
    let c = index_scale(q.horizon, q.n);
    scale_map(composed_meixner(q, k), c, c * c)
}

/// Contour moments of a map with a closed-form support bound; the radius
/// starts at `min(hint, bound)` and grows until stable.
fn bounded_moments(map: &HalfPlaneMap<f64>, hint: f64, order: usize, contour: &ContourSettings<f64>) -> Result<MomentSequence<f64>> {
    let bound = map.support_bound().unwrap_or(f64::INFINITY);
    let seed = hint.min(1.05 * bound + 1e-3);
    Ok(moments_adaptive(map, seed, order, contour)?.moments)
}

/// Moments `m_0 … m_order` of the rescaled approximant after `k` steps.
pub fn approximant_moments(
    q: &DriverQuantization<f64>,
    k: usize,
    order: usize,
    contour: &ContourSettings<f64>,
) -> Result<MomentSequence<f64>> {
    let t = q.horizon * k as f64 / q.n as f64;
    let hint = q.bound + 4.0 * t.sqrt() + 1.0;
    bounded_moments(&slit_approximant(q, k)?, hint, order, contour)
}

/// Reference moments of `μ_t` for one field.
fn reference_moments(
    field: &Arc<LoewnerField<f64>>,
    source: ReferenceSource,
    t: f64,
    config: &PipelineConfig,
) -> Result<MomentSequence<f64>> {
    let contour = config.tolerances.contour();
    let result = match (source, field.as_ref()) {
        (ReferenceSource::Flow, _) => {
            measure_moments_at_time(field, t, config.moments, &config.tolerances.solver(), &contour)
        }
        (ReferenceSource::ClosedForm, LoewnerField::Slit(DrivingFunction::Constant(u))) => {
            let map = HalfPlaneMap::slit(*u, 2.0 * t);
            bounded_moments(&map, u.abs() + 4.0 * t.sqrt() + 1.0, config.moments, &contour)
        }
        (ReferenceSource::ClosedForm, _) => {
            Err(invalid("closed-form references exist only for constant drivers"))
        }
    };
    result.map_err(|e| Error::ReferenceFailure(format!("t = {t}: {e}")))
}

/// Distinct evaluation times over all resolutions, in first-seen order.
fn all_times(config: &PipelineConfig) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &n in &config.resolutions {
        for t in config.times.for_resolution(config.horizon, n) {
            if !out.contains(&t) {
                out.push(t);
            }
        }
    }
    out
}

/// Builds report rows for drivers already quantized per resolution.
fn tabulate(
    config: &PipelineConfig,
    quantized: &[DriverQuantization<f64>],
    field: Arc<LoewnerField<f64>>,
) -> Result<Vec<ReportRow>> {
    let times = all_times(config);
    let references = times
        .par_iter()
        .map(|&t| reference_moments(&field, config.reference, t, config))
        .collect::<Result<Vec<_>>>()?;
    let contour = config.tolerances.contour();
    let cells: Vec<(usize, f64)> = quantized
        .iter()
        .enumerate()
        .flat_map(|(i, q)| config.times.for_resolution(config.horizon, q.n).into_iter().map(move |t| (i, t)))
        .collect();
    let blocks = cells
        .par_iter()
        .map(|&(i, t)| {
            let q = &quantized[i];
            let k = steps_until(t, config.horizon, q.n);
            let approx = approximant_moments(q, k, config.moments, &contour)?;
            let reference = &references[times.iter().position(|&s| s == t).unwrap()];
            Ok((0..=config.moments)
                .map(|order| {
                    let (a, r) = (approx.values()[order], reference.values()[order]);
                    ReportRow { n: q.n, k, t, order, approx: a, reference: r, abs_error: (a - r).abs() }
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(blocks.into_iter().flatten().collect())
}

fn evaluate_checks(config: &PipelineConfig, rows: &[ReportRow]) -> Vec<CheckOutcome> {
    let checks = &config.checks;
    let mut out = Vec::new();
    if let Some(tol) = checks.mean_tol {
        let worst = rows.iter().filter(|r| r.order == 1).map(|r| r.approx.abs()).fold(0.0, f64::max);
        out.push(CheckOutcome::new("mean", worst < tol, format!("max |m1| = {worst:e}, tolerance {tol:e}")));
    }
    if let Some(tol) = checks.variance_tol {
        let worst = rows
            .iter()
            .filter(|r| r.order == 2)
            .map(|r| (r.approx - config.horizon * r.k as f64 / r.n as f64).abs())
            .fold(0.0, f64::max);
        out.push(CheckOutcome::new("variance", worst < tol, format!("max |m2 - kT/n| = {worst:e}, tolerance {tol:e}")));
    }
    if let Some(tol) = checks.nonnegative_tol {
        let worst = rows.iter().map(|r| r.approx).fold(f64::INFINITY, f64::min);
        let worst = if rows.is_empty() { 0.0 } else { worst };
        out.push(CheckOutcome::new("nonnegative", worst >= -tol, format!("min moment = {worst:e}, tolerance {tol:e}")));
    }
    if let Some(tol) = checks.max_error {
        let worst = rows.iter().map(|r| r.abs_error).fold(0.0, f64::max);
        out.push(CheckOutcome::new("max_error", worst <= tol, format!("max error = {worst:e}, tolerance {tol:e}")));
    }
    if checks.trend != Trend::None && config.resolutions.len() >= 2 {
        let max_order = checks.trend_max_order.unwrap_or(config.moments).min(config.moments);
        let report = ConvergenceReport { metadata: ReportMetadata::new("", String::new()), rows: rows.to_vec(), checks: vec![] };
        let mut failures = Vec::new();
        for t in all_times(config) {
            let ns: Vec<usize> = config
                .resolutions
                .iter()
                .copied()
                .filter(|&n| report.rows_for(n, t).next().is_some())
                .collect();
            if ns.len() < 2 {
                continue;
            }
            let errs: Vec<f64> = ns.iter().map(|&n| report.max_error(n, t, max_order)).collect();
            let ok = errs.iter().all(|&e| e <= checks.trend_floor) || match checks.trend {
                Trend::Strict => errs.windows(2).all(|w| w[1] < w[0]),
                _ => errs[errs.len() - 1] < errs[0],
            };
            if !ok {
                failures.push(format!("t = {t}: {errs:?}"));
            }
        }
        let detail = if failures.is_empty() {
            format!("errors decrease in n ({:?}) for orders <= {max_order}", checks.trend)
        } else {
            failures.join("; ")
        };
        out.push(CheckOutcome::new("trend", failures.is_empty(), detail));
    }
    out
}

fn driver_bound(config: &PipelineConfig, driver: &DrivingFunction<f64>) -> f64 {
    let (_, sup) = driver.range_on(config.horizon);
    config.bound.map_or(sup, |m| m.max(sup))
}

/// Quantized Meixner compositions for a single slit driver, tabulated
/// against moments of the Loewner flow of that driver.
pub fn run_slit_approximation(config: &PipelineConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    let driver = config.driver()?;
    let bound = driver_bound(config, &driver);
    config.check_feasible(bound)?;
    let quantized = config
        .resolutions
        .iter()
        .map(|&n| quantize_driver_with_bound(&driver, config.horizon, n, bound))
        .collect::<Result<Vec<_>>>()?;
    let rows = tabulate(config, &quantized, Arc::new(driver.into()))?;
    let checks = evaluate_checks(config, &rows);
    Ok(ConvergenceReport { metadata: ReportMetadata::new("slit", config.hash()), rows, checks })
}

/// Single-slit driver standing in for a Herglotz field at resolution `n`.
pub fn discretize_field(field: &HerglotzField<f64>, config: &PipelineConfig, n: usize) -> Result<DrivingFunction<f64>> {
    let r = &config.refinement;
    let point = if r.barycenter { BinPoint::Barycenter } else { BinPoint::Midpoint };
    let multi = bin_field(field, r.space.cells(n), point)?;
    singleize_multislit(&multi, config.horizon, r.time.cells(n))
}

/// Field version of [`run_slit_approximation`]: each resolution uses the
/// single-slit discretization of the field, the reference uses the field.
pub fn run_field_approximation(config: &PipelineConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    let field = config.field()?;
    if !field.nonnegative_support() {
        return Err(invalid("field support must lie in [0, M]"));
    }
    if field.horizon() < config.horizon {
        return Err(invalid("field is shorter than the horizon"));
    }
    let bound = field.bound();
    config.check_feasible(bound)?;
    let quantized = config
        .resolutions
        .iter()
        .map(|&n| {
            let driver = discretize_field(&field, config, n)?;
            quantize_driver_with_bound(&driver, config.horizon, n, bound)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = tabulate(config, &quantized, Arc::new(field.into()))?;
    let checks = evaluate_checks(config, &rows);
    Ok(ConvergenceReport { metadata: ReportMetadata::new("field", config.hash()), rows, checks })
}

/// Largest resolution accepted by [`run_graph_verify`].
pub const GRAPH_MAX_RESOLUTION: usize = 2;
/// Largest moment order accepted by [`run_graph_verify`].
pub const GRAPH_MAX_ORDER: usize = 6;

/// Exact walk counts on comb products of the quantized spidernets, checked
/// against contour moments of the composed Meixner transforms.
///
/// Rows hold graph moments as `approx` and contour moments (unscaled) as
/// `reference`.
pub fn run_graph_verify(config: &PipelineConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    if config.moments > GRAPH_MAX_ORDER || config.resolutions.iter().any(|&n| n > GRAPH_MAX_RESOLUTION) {
        return Err(invalid(format!(
            "graph verification is limited to n <= {GRAPH_MAX_RESOLUTION} and order <= {GRAPH_MAX_ORDER}"
        )));
    }
    let driver = config.driver()?;
    let bound = driver_bound(config, &driver);
    config.check_feasible(bound)?;
    let order = config.moments;
    let contour = config.tolerances.contour();
    let mut rows = Vec::new();
    let mut mismatches = Vec::new();
    let mut negative = Vec::new();
    let mut factorization = Vec::new();
    let mut adjacency = Vec::new();
    for &n in &config.resolutions {
        let q = quantize_driver_with_bound(&driver, config.horizon, n, bound)?;
        let family = q.family() as usize;
        for t in config.times.for_resolution(config.horizon, n) {
            let k = steps_until(t, config.horizon, n);
            let word: Vec<SpidernetSpec> = q.levels[..k]
                .iter()
                .map(|&u| SpidernetSpec::meixner(family, u as usize, order / 2 + 1))
                .collect();
            let graph_moments = if word.is_empty() {
                MomentSequence::new((0..=order).map(|j| BigInt::from((j == 0) as u8)).collect())
            } else {
                root_moments(&comb_ball(&word, order / 2)?, order)?
            };
            let map = composed_meixner(&q, k);
            let hint = map.support_bound().unwrap_or(1.0) + 1.0;
            let analytic = moments_by_contour(&map, hint, order, &contour)
                .map_err(|e| Error::ReferenceFailure(format!("n = {n}, t = {t}: {e}")))?;
            let exact = graph_moments.to_scalar::<f64>();
            for j in 0..=order {
                let (a, r) = (exact.values()[j], analytic.values()[j]);
                let err = (a - r).abs();
                if err > 1e-6 * r.abs().max(1.0) {
                    mismatches.push(format!("word {:?} order {j}: {a} vs {r}", word_data(&word)));
                }
                rows.push(ReportRow { n, k, t, order: j, approx: a, reference: r, abs_error: err });
            }
            if !graph_moments.all_nonnegative() {
                negative.push(format!("word {:?}", word_data(&word)));
            }
            if word.len() >= 2 {
                let prefix = &word[..2];
                let graphs = prefix.iter().map(build_spidernet).collect::<Result<Vec<_>>>()?;
                for p in 0..=order {
                    for q_ in 0..=order - p {
                        for r in 0..=order - p - q_ {
                            if !check_monotone_factorization(&graphs, p, q_, r)? {
                                factorization.push(format!("word {:?} (p, q, r) = ({p}, {q_}, {r})", word_data(prefix)));
                            }
                        }
                    }
                }
                let small = prefix
                    .iter()
                    .map(|s| build_spidernet(&SpidernetSpec { depth: 1, ..*s }))
                    .collect::<Result<Vec<_>>>()?;
                if !adjacency_vs_sum(&small)? {
                    adjacency.push(format!("word {:?}", word_data(prefix)));
                }
            }
        }
    }
    let outcome = |name: &str, failures: Vec<String>, ok: &str| {
        let passed = failures.is_empty();
        CheckOutcome::new(name, passed, if passed { ok.to_string() } else { failures.join("; ") })
    };
    let checks = vec![
        outcome("moments", mismatches, "graph moments match contour moments within 1e-6"),
        outcome("nonnegative", negative, "all graph moments are non-negative"),
        outcome("factorization", factorization, "monotone factorization holds exactly"),
        outcome("adjacency", adjacency, "comb adjacency equals the sum of embedded operators"),
    ];
    Ok(ConvergenceReport { metadata: ReportMetadata::new("graph", config.hash()), rows, checks })
}

fn word_data(word: &[SpidernetSpec]) -> Vec<(usize, usize, usize)> {
    word.iter().map(|s| (s.a, s.b, s.c)).collect()
}
