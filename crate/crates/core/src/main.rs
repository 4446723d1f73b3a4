use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use iga_contact::cli::{init_threads, run_benchmark, run_infsup, Benchmark, RunConfig};
use iga_contact::Error;

#[derive(Parser)]
#[command(name = "iga-contact", version, about = "Isogeometric mixed FEM for frictionless contact against a rigid plane")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// 2D Hertz cylinder, linear elasticity
    Hertz2d(Overrides),
    /// 3D Hertz sphere, linear elasticity
    Hertz3d(Overrides),
    /// 2D Hertz cylinder, Neo-Hookean, pressure load
    Hertz2dLarge(Overrides),
    /// 2D Hertz cylinder, Neo-Hookean, prescribed displacement
    Hertz2dLargeDirichlet(Overrides),
    /// Discrete inf-sup constant of the displacement/multiplier pairing
    Infsup(Overrides),
    /// Run the benchmark named by the `benchmark` key of a config file
    Run {
        #[arg(value_name = "CONFIG")]
        file: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Args, Default)]
struct Overrides {
    /// key = value file applied before the flags
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    pressure: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    displacement: Option<f64>,
    #[arg(long)]
    degree: Option<usize>,
    /// number of meshes including the reference
    #[arg(long)]
    levels: Option<usize>,
    /// span_fraction,length_fraction
    #[arg(long)]
    grading: Option<String>,
    #[arg(long)]
    base_spans: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_config(path: &PathBuf, expected: Option<Benchmark>) -> Result<RunConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let cfg = match expected {
        Some(b) if !text.lines().any(|l| l.split('#').next().unwrap_or("").trim_start().starts_with("benchmark")) => {
            RunConfig::parse(&format!("benchmark = {b}\n{text}"))?
        }
        _ => RunConfig::parse(&text)?,
    };
    if let Some(b) = expected {
        if cfg.benchmark != b {
            return Err(Error::Config(format!("config names benchmark '{}' but '{b}' was requested", cfg.benchmark)));
        }
    }
    Ok(cfg)
}

fn build(bench: Option<Benchmark>, file: Option<&PathBuf>, o: &Overrides) -> Result<RunConfig, Error> {
    let mut cfg = match (file.or(o.config.as_ref()), bench) {
        (Some(path), b) => read_config(path, b)?,
        (None, Some(b)) => RunConfig::defaults(b),
        (None, None) => return Err(Error::Config("no benchmark given".into())),
    };
    let fields: [(&str, Option<String>); 7] = [
        ("pressure", o.pressure.map(|v| v.to_string())),
        ("displacement", o.displacement.map(|v| v.to_string())),
        ("degree", o.degree.map(|v| v.to_string())),
        ("levels", o.levels.map(|v| v.to_string())),
        ("grading", o.grading.clone()),
        ("base_spans", o.base_spans.map(|v| v.to_string())),
        ("out", o.out.as_ref().map(|p| p.display().to_string())),
    ];
    for (k, v) in fields {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.command {
        Command::Hertz2d(o) => build(Some(Benchmark::Hertz2d), None, o),
        Command::Hertz3d(o) => build(Some(Benchmark::Hertz3d), None, o),
        Command::Hertz2dLarge(o) => build(Some(Benchmark::Hertz2dLarge), None, o),
        Command::Hertz2dLargeDirichlet(o) => build(Some(Benchmark::Hertz2dLargeDirichlet), None, o),
        Command::Infsup(o) => build(Some(Benchmark::InfSup), None, o),
        Command::Run { file, overrides } => build(None, Some(file), overrides),
    };
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}\nusage: iga-contact <hertz2d|hertz3d|hertz2d-large|hertz2d-large-dirichlet|infsup|run CONFIG> [options]");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let outcome = if cfg.benchmark == Benchmark::InfSup {
        run_infsup(&cfg).map(|r| {
            for (h, b) in &r.rows {
                println!("h = {h:.6e}  beta = {b:.6e}");
            }
            if r.rows.len() > 1 {
                println!("beta max/min = {:.4}", r.ratio());
            }
        })
    } else {
        run_benchmark(&cfg).map(|r| {
            for e in &r.errors {
                println!(
                    "h = {:.4e}  L2 = {:.4e}  H1 = {:.4e}  mult(ana) = {:.4e}  mult(ref) = {:.4e}",
                    e.h, e.l2, e.h1, e.mult_analytic, e.mult_reference
                );
            }
            if let Some(rt) = &r.rates {
                println!(
                    "rates: L2 {:.3}  H1 {:.3}  mult(ana) {:.3}  mult(ref) {:.3}",
                    rt.l2, rt.h1, rt.mult_analytic, rt.mult_reference
                );
            }
        })
    };
    match outcome {
        Ok(()) => {
            println!("outputs written to {}", cfg.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::Config(_)) { 2 } else { 1 })
        }
    }
}
