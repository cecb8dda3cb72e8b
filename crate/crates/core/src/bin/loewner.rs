use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use loewner_core::graph::{build_spidernet, SpidernetSpec};
use loewner_core::loewner::{hydro_residual, measure_moments_at_time, LoewnerField};
use loewner_core::moments::root_moments;
use loewner_core::pipeline::{
    emit_report, format_g15, run_field_approximation, run_graph_verify, run_slit_approximation, ConvergenceReport,
    PipelineConfig, TimeSelection,
};
use loewner_core::{HalfPlaneMap, Result};

#[derive(Parser)]
#[command(name = "loewner", version, about = "Loewner flows, monotone convolution and spidernet comb products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Moments of the Loewner flow of the configured driver or field.
    SlitSolve(Common),
    /// Meixner-composition approximation of a slit driver.
    #[command(name = "approx-thm10")]
    ApproxSlit(Common),
    /// Same for a Herglotz field, discretized to a single slit.
    #[command(name = "approx-thm11")]
    ApproxField(Common),
    /// Exact walk counts on comb products of small spidernets.
    GraphVerify(Common),
    /// Builds one truncated spidernet and reports its structure.
    SpidernetInfo(SpidernetArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Highest moment order.
    #[arg(long)]
    moments: Option<usize>,
    /// Comma-separated resolutions.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Comma-separated evaluation times.
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
}

impl Common {
    fn load(&self) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::load(&self.config)?;
        if let Some(k) = self.moments {
            cfg.moments = k;
        }
        if let Some(n) = &self.n {
            cfg.resolutions = n.clone();
        }
        if let Some(t) = &self.times {
            cfg.times = TimeSelection::List(t.clone());
        }
        if let Some(out) = &self.out {
            cfg.output = Some(out.clone());
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct SpidernetArgs {
    #[arg(long, required_unless_present = "meixner")]
    a: Option<usize>,
    #[arg(long, required_unless_present = "meixner")]
    b: Option<usize>,
    #[arg(long, required_unless_present = "meixner")]
    c: Option<usize>,
    /// Family data `(2n, n+1+u, n)` given as `n,u`.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["a", "b", "c"])]
    meixner: Option<Vec<usize>>,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Highest root moment to print (capped by the truncation depth).
    #[arg(long, default_value_t = 4)]
    moments: usize,
    /// Write the adjacency dump here.
    #[arg(long)]
    dump: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::SlitSolve(args) => slit_solve(&args),
        Command::ApproxSlit(args) => pipeline(&args, "approx-thm10", run_slit_approximation),
        Command::ApproxField(args) => pipeline(&args, "approx-thm11", run_field_approximation),
        Command::GraphVerify(args) => pipeline(&args, "graph-verify", run_graph_verify),
        Command::SpidernetInfo(args) => spidernet_info(&args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn out_dir(cfg: &PipelineConfig) -> PathBuf {
    cfg.output.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn pipeline(args: &Common, name: &str, run: fn(&PipelineConfig) -> Result<ConvergenceReport>) -> Result<bool> {
    let cfg = args.load()?;
    let report = run(&cfg)?;
    let (csv, json) = emit_report(&report, &cfg, &out_dir(&cfg).join(format!("{name}.csv")))?;
    for check in &report.checks {
        println!("{} {}: {}", if check.passed { "PASS" } else { "FAIL" }, check.name, check.detail);
    }
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(report.passed())
}

fn slit_solve(args: &Common) -> Result<bool> {
    let cfg = args.load()?;
    cfg.validate()?;
    let field: Arc<LoewnerField<f64>> = Arc::new(if cfg.field.is_some() {
        cfg.field()?.into()
    } else {
        cfg.driver()?.into()
    });
    let n = *cfg.resolutions.last().unwrap();
    let solver = cfg.tolerances.solver();
    let contour = cfg.tolerances.contour();
    let mut csv = String::from("t,order,moment\n");
    for t in cfg.times.for_resolution(cfg.horizon, n) {
        let m = measure_moments_at_time(&field, t, cfg.moments, &solver, &contour)?;
        let map = HalfPlaneMap::flow(field.clone(), t, solver);
        let residual = hydro_residual(&map, t, 1e3)?;
        println!("t = {}: moments {:?}, hydrodynamic residual at R = 1e3: {residual:e}", format_g15(t), m.values());
        for (k, v) in m.values().iter().enumerate() {
            csv.push_str(&format!("{},{k},{}\n", format_g15(t), format_g15(*v)));
        }
    }
    let dir = out_dir(&cfg);
    write(&dir, &dir.join("slit-solve.csv"), &csv)?;
    Ok(true)
}

fn spidernet_info(args: &SpidernetArgs) -> Result<bool> {
    let spec = match &args.meixner {
        Some(nu) if nu.len() == 2 => SpidernetSpec::meixner(nu[0], nu[1], args.depth),
        Some(_) => return Err(loewner_core::Error::InvalidInput("--meixner expects n,u".into())),
        None => SpidernetSpec::new(args.a.unwrap(), args.b.unwrap(), args.c.unwrap(), args.depth),
    };
    let g = build_spidernet(&spec)?;
    println!("data (a, b, c) = ({}, {}, {}), horizontal degree u = {}", spec.a, spec.b, spec.c, spec.horizontal());
    println!("depth {}: {} vertices, {} edges", spec.depth, g.vertex_count(), g.edge_count());
    let shells: Vec<usize> = (0..=spec.depth).map(|d| spec.shell_size(d)).collect();
    println!("shell sizes {shells:?}");
    let order = args.moments.min(2 * g.exact_radius().unwrap_or(0) + 1);
    let m = root_moments(&g, order)?;
    let shown: Vec<String> = m.values().iter().map(ToString::to_string).collect();
    println!("root moments up to order {order}: {}", shown.join(", "));
    if let Some(path) = &args.dump {
        let dir = path.parent().unwrap_or(Path::new("."));
        write(dir, path, &g.dump())?;
        println!("wrote {}", path.display());
    }
    Ok(true)
}

fn write(dir: &Path, path: &Path, text: &str) -> Result<()> {
    let io = |p: &Path| {
        let p = p.to_path_buf();
        move |source| loewner_core::Error::Io { path: p, source }
    };
    if !dir.as_os_str().is_empty() {
        std::fs::create_dir_all(dir).map_err(io(dir))?;
    }
    std::fs::write(path, text).map_err(io(path))
}
