//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::process::{Command, ExitCode};
use std::sync::Arc;

use loewner_core::graph::{build_spidernet, comb_ball, comb_ball_graphs, comb_power, RootedGraph, SpidernetSpec};
use loewner_core::halfplane::{atom_mass, moments_by_contour};
use loewner_core::loewner::{measure_moments_at_time, scale_map, solve_backward_f, solve_forward_g, DriverFormula};
use loewner_core::moments::{adjacency_vs_sum, check_monotone_factorization, root_moments};
use loewner_core::pipeline::{
    approximant_moments, run_field_approximation, run_slit_approximation, DriverSpec, FieldSpec, PipelineConfig, Trend,
};
use loewner_core::discretize::quantize_driver;
use loewner_core::{Complex, ContourSettings, DiscreteMeasure, DrivingFunction, HalfPlaneMap, HerglotzField, LoewnerField, SolverSettings};

struct Outcome {
    passed: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { passed: true, lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        self.lines.push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
        self.passed &= ok;
    }
}

fn binomial(n: u64, k: u64) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64)
}

/// `m_{2j} = C(2j, j) (t/2)^j` for the arcsine law of variance `t`.
fn arcsine_moments(order: usize, t: f64) -> Vec<f64> {
    (0..=order)
        .map(|k| if k % 2 == 1 { 0.0 } else { binomial(k as u64, k as u64 / 2) * (t / 2.0).powi(k as i32 / 2) })
        .collect()
}

fn c1_closed_form_solver() -> Outcome {
    let mut o = Outcome::new();
    let zero: LoewnerField = DrivingFunction::Constant(0.0).into();
    let s = SolverSettings::default();
    let z = Complex::new(0.0, 2.0);
    let f = solve_backward_f(&zero, 1.0, z, &s).unwrap();
    let g = solve_forward_g(&zero, 1.0, z, &s).unwrap();
    let ef = (f - Complex::new(0.0, 6f64.sqrt())).norm();
    let eg = (g - Complex::new(0.0, 2f64.sqrt())).norm();
    o.check(ef < 1e-8, format!("f_1(2i) = {f}, error {ef:e}"));
    o.check(eg < 1e-8, format!("g_1(2i) = {g}, error {eg:e}"));
    let smooth: LoewnerField =
        DrivingFunction::Formula(DriverFormula::CosineShift { offset: 0.5, amplitude: 0.4, frequency: 3.0 }).into();
    let w = Complex::new(0.6, 0.4);
    for (name, forward) in [("forward", true), ("backward", false)] {
        let run = |steps: usize| {
            let st = SolverSettings::fixed(steps);
            if forward {
                solve_forward_g(&smooth, 1.0, w, &st).unwrap()
            } else {
                solve_backward_f(&smooth, 1.0, w, &st).unwrap()
            }
        };
        let reference = run(8192);
        let order = ((run(32) - reference).norm() / (run(64) - reference).norm()).log2();
        o.check(order >= 4.0, format!("{name} step-halving order {order:.2}"));
    }
    o
}

fn c2_arcsine_moments() -> Outcome {
    let mut o = Outcome::new();
    let field: Arc<LoewnerField> =
        Arc::new(HerglotzField::constant(DiscreteMeasure::dirac(0.0), 1.0, 1.0).unwrap().into());
    let m = measure_moments_at_time(&field, 1.0, 4, &SolverSettings::default(), &ContourSettings::default()).unwrap();
    // x = √2 cos θ with θ uniform is arcsine-distributed with variance 1; the
    // trapezoid rule is exact for these trigonometric polynomials.
    let n = 64;
    let quad: Vec<f64> = (0..=4)
        .map(|k| {
            (0..n).map(|j| (2f64.sqrt() * (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos()).powi(k)).sum::<f64>()
                / n as f64
        })
        .collect();
    let expected = [1.0, 0.0, 1.0, 0.0, 1.5];
    for k in 0..=4 {
        let err = (m.values()[k] - expected[k]).abs();
        o.check(err < 1e-8 && (quad[k] - expected[k]).abs() < 1e-12, format!("m_{k} = {:.12} (quadrature {:.12})", m.values()[k], quad[k]));
    }
    o
}

fn c3_meixner_mean_variance() -> Outcome {
    let mut o = Outcome::new();
    let cs = ContourSettings::default();
    for n in 1..=3 {
        for u in 0..=2 {
            let map = HalfPlaneMap::meixner(n as f64, u as f64);
            let radius = map.support_bound().unwrap() + 1.0;
            let m = moments_by_contour(&map, radius, 2, &cs).unwrap();
            let (m1, m2) = (m.values()[1], m.values()[2]);
            o.check(m1.abs() < 1e-8 && (m2 - 2.0 * n as f64).abs() < 1e-8, format!("(n, u) = ({n}, {u}): m1 = {m1:e}, m2 = {m2:.12}"));
        }
    }
    o
}

fn c4_spidernet_moments() -> Outcome {
    let mut o = Outcome::new();
    let k = 8;
    let cs = ContourSettings::default();
    for (n, u) in [(1usize, 0usize), (1, 1), (2, 1), (2, 3)] {
        let g = build_spidernet(&SpidernetSpec::meixner(n, u, k / 2 + 1)).unwrap();
        let exact = root_moments(&g, k).unwrap();
        let map = HalfPlaneMap::meixner(n as f64, u as f64);
        let contour = moments_by_contour(&map, map.support_bound().unwrap() + 1.0, k, &cs).unwrap();
        let worst = exact
            .to_scalar::<f64>()
            .values()
            .iter()
            .zip(contour.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let shown: Vec<String> = exact.values().iter().map(ToString::to_string).collect();
        o.check(worst < 1e-6, format!("(n, u) = ({n}, {u}): walks ({}), max deviation {worst:e}", shown.join(", ")));
        if (n, u) == (1, 0) {
            o.check(shown == ["1", "0", "2", "0", "6", "0", "20", "0", "70"], "arcsine walk counts");
        }
    }
    o
}

fn c5_atom() -> Outcome {
    let mut o = Outcome::new();
    let map = HalfPlaneMap::slit(1.0, 8.0);
    let mass = atom_mass(&map, -2.0).unwrap();
    // Residue oracle 1/F'(-2), F'(x) = -(x-1)/√((x-1)² - 8) left of the cut.
    let x: f64 = -2.0;
    let residue = 1.0 / (-(x - 1.0) / ((x - 1.0).powi(2) - 8.0).sqrt());
    o.check((residue - 1.0 / 3.0).abs() < 1e-15, format!("residue oracle {residue}"));
    o.check((mass - residue).abs() < 1e-6, format!("atom mass at -2: {mass:.10}"));
    o
}

fn c6_comb_suite() -> Outcome {
    let mut o = Outcome::new();
    let alphabet = [RootedGraph::edge(), build_spidernet(&SpidernetSpec::new(2, 2, 1, 3)).unwrap()];
    let mut words: Vec<Vec<RootedGraph>> = Vec::new();
    for len in 1..=3u32 {
        for code in 0..2usize.pow(len) {
            words.push((0..len).map(|i| alphabet[(code >> i) & 1].clone()).collect());
        }
    }
    let adjacency = words.iter().all(|w| adjacency_vs_sum(w).unwrap());
    o.check(adjacency, format!("adjacency equals operator sum on {} words", words.len()));
    let mut identities = 0;
    let mut factor_ok = true;
    for w in words.iter().filter(|w| w.len() >= 2) {
        for p in 0..=8 {
            for q in 0..=8 - p {
                for r in 0..=8 - p - q {
                    factor_ok &= check_monotone_factorization(w, p, q, r).unwrap();
                    identities += 1;
                }
            }
        }
    }
    o.check(factor_ok, format!("monotone factorization on {identities} (word, p, q, r) cases, p+q+r <= 8"));
    let mut balls = 0;
    let mut ball_ok = true;
    for w in &words {
        let full = comb_power(w);
        for r in 0..=4 {
            ball_ok &= comb_ball_graphs(w, r).same_labeled_graph(&full.ball(r));
            balls += 1;
        }
    }
    let specs = [SpidernetSpec::new(2, 2, 1, 3), SpidernetSpec::new(4, 4, 2, 3)];
    for len in 1..=3u32 {
        for code in 0..2usize.pow(len) {
            let word: Vec<SpidernetSpec> = (0..len).map(|i| specs[(code >> i) & 1]).collect();
            let graphs: Vec<RootedGraph> = word.iter().map(|s| build_spidernet(s).unwrap()).collect();
            let full = comb_power(&graphs);
            for r in 0..=2 {
                ball_ok &= comb_ball(&word, r).unwrap().same_labeled_graph(&full.ball(r));
                balls += 1;
            }
        }
    }
    o.check(ball_ok, format!("lazy ball equals explicit ball in {balls} cases"));
    o
}

fn c7_zero_driver_exactness() -> Outcome {
    let mut o = Outcome::new();
    let cs = ContourSettings::default();
    for n in [2usize, 4, 8, 16] {
        let q = quantize_driver(&DrivingFunction::Constant(0.0), 1.0, n).unwrap();
        let mut worst: f64 = 0.0;
        for k in 1..=n {
            let m = approximant_moments(&q, k, 6, &cs).unwrap();
            let oracle = arcsine_moments(6, k as f64 / n as f64);
            worst = m.values().iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(worst, f64::max);
        }
        o.check(worst < 1e-9, format!("n = {n}: max deviation from arcsine over all grid times {worst:e}"));
    }
    o
}

fn c8_unit_driver_convergence() -> Outcome {
    let mut o = Outcome::new();
    let times = vec![0.25, 0.5, 1.0];
    let cfg = PipelineConfig::for_driver(DriverSpec::Constant { value: 1.0 }, 1.0, vec![8, 64], times.clone(), 6);
    let report = run_slit_approximation(&cfg).unwrap();
    let err = |n: usize| times.iter().map(|&t| report.max_error(n, t, 6)).fold(0.0, f64::max);
    let (e8, e64) = (err(8), err(64));
    o.check(e64 < e8, format!("max error n = 8: {e8:e}, n = 64: {e64:e}"));
    for &t in &times {
        let (a, b) = (report.max_error(8, t, 6), report.max_error(64, t, 6));
        o.check(b < a, format!("t = {t}: n = 8 {a:e}, n = 64 {b:e}"));
    }
    let mean = report.rows.iter().filter(|r| r.order == 1).map(|r| r.approx.abs()).fold(0.0, f64::max);
    o.check(mean < 1e-10, format!("max |m1| = {mean:e}"));
    let var = report
        .rows
        .iter()
        .filter(|r| r.order == 2)
        .map(|r| (r.approx - (r.t * r.n as f64).floor() / r.n as f64).abs())
        .fold(0.0, f64::max);
    o.check(var < 1e-10, format!("max |m2 - floor(tn)/n| = {var:e}"));
    let low = report.rows.iter().map(|r| r.approx).fold(f64::INFINITY, f64::min);
    o.check(low >= -1e-9, format!("smallest approximant moment {low:e}"));
    o
}

fn c9_field_reduction_and_convergence() -> Outcome {
    let mut o = Outcome::new();
    let times = vec![0.25, 0.5, 1.0];
    let ns = vec![8, 16, 32];
    for u in [0.0, 0.5, 1.0] {
        let slit = PipelineConfig::for_driver(DriverSpec::Constant { value: u }, 1.0, ns.clone(), times.clone(), 4);
        let field = PipelineConfig::for_field(FieldSpec::Constant { atoms: vec![(u, 1.0)] }, 1.0, 1.0, ns.clone(), times.clone(), 4);
        let (a, b) = (run_slit_approximation(&slit).unwrap(), run_field_approximation(&field).unwrap());
        let same_shape = a.rows.len() == b.rows.len()
            && a.rows.iter().zip(&b.rows).all(|(x, y)| (x.n, x.k, x.t, x.order) == (y.n, y.k, y.t, y.order));
        let worst = a
            .rows
            .iter()
            .zip(&b.rows)
            .map(|(x, y)| (x.approx - y.approx).abs().max((x.reference - y.reference).abs()))
            .fold(0.0, f64::max);
        o.check(same_shape && worst < 1e-9, format!("delta_{u} field vs U = {u}: max row difference {worst:e}"));
    }
    let mut cfg = PipelineConfig::for_field(
        FieldSpec::Constant { atoms: vec![(0.25, 0.5), (0.75, 0.5)] },
        1.0,
        1.0,
        ns.clone(),
        times.clone(),
        4,
    );
    cfg.checks.trend = Trend::Strict;
    cfg.checks.trend_max_order = Some(4);
    let report = run_field_approximation(&cfg).unwrap();
    for &t in &times {
        let errs: Vec<f64> = ns.iter().map(|&n| report.max_error(n, t, 4)).collect();
        let ok = errs.windows(2).all(|w| w[1] < w[0]);
        o.check(ok, format!("two-atom field t = {t}: errors over n = {ns:?}: {errs:?}"));
    }
    o
}

fn c10_scaling_law() -> Outcome {
    let mut o = Outcome::new();
    let (c, t) = (3.0, 0.7);
    let scaled = scale_map(HalfPlaneMap::slit(0.0, 2.0 * c * c * t), c, c * c).unwrap();
    let target = HalfPlaneMap::slit(0.0, 2.0 * t);
    let worst = (0..20)
        .map(|j| {
            let z = Complex::new(-3.0 + 0.3 * j as f64, 0.05 + 0.25 * j as f64);
            (scaled.eval(z).unwrap() - target.eval(z).unwrap()).norm()
        })
        .fold(0.0, f64::max);
    o.check(worst < 1e-12, format!("max pointwise difference at 20 points {worst:e}"));
    o
}

fn c11_determinism() -> Outcome {
    let mut o = Outcome::new();
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"driver":{"kind":"linear","intercept":0.2,"slope":0.6},"horizon":1.0,
            "resolutions":[8,16,32],"times":[0.25,0.5,1.0],"moments":6}"#,
    )
    .unwrap();
    let run = |out: &str| {
        let out = dir.path().join(out);
        let status = Command::new(env!("CARGO_BIN_EXE_loewner"))
            .args(["approx-thm10", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap()
            .status;
        (status.code(), std::fs::read(out.join("approx-thm10.csv")).unwrap_or_default())
    };
    let (first, second) = (run("a"), run("b"));
    o.check(!first.1.is_empty() && first.1 == second.1, format!("{} CSV bytes, identical across runs", first.1.len()));
    o.check(first.0 == second.0, format!("exit codes {:?} and {:?}", first.0, second.0));
    o
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("closed-form solver oracle and step-halving order", c1_closed_form_solver),
        ("arcsine moments of the zero-driver flow", c2_arcsine_moments),
        ("Meixner transform mean and variance", c3_meixner_mean_variance),
        ("spidernet walk counts match Meixner moments", c4_spidernet_moments),
        ("atom of SlitMap(1, 8) at -2", c5_atom),
        ("comb product and monotone independence suite", c6_comb_suite),
        ("zero-driver approximant is exact at grid times", c7_zero_driver_exactness),
        ("unit-driver approximation improves from n = 8 to 64", c8_unit_driver_convergence),
        ("field reduction and two-atom convergence", c9_field_reduction_and_convergence),
        ("scaling law", c10_scaling_law),
        ("byte-identical CLI output", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        println!("criterion {:>2} {}: {name}", i + 1, if outcome.passed { "PASS" } else { "FAIL" });
        for line in &outcome.lines {
            println!("    {line}");
        }
        failed += usize::from(!outcome.passed);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
