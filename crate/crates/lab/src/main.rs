use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use lpp_shock::models::correspondence_probe;
use lpp_shock::twdist::TracyWidom;
use lpp_shock_lab::experiments::{self, replicas};
use lpp_shock_lab::report::{fmt17, to_json_bytes};
use lpp_shock_lab::verify::{interface_suite, oracle_suite, tw_suite};
use lpp_shock_lab::{with_threads, ExperimentConfig};
use serde_json::json;

#[derive(Parser)]
#[command(name = "lpp-shock", version, about = "Shock experiments for exponential last passage percolation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate the limit law of an experiment on its grid.
    Predict {
        #[arg(long)]
        config: PathBuf,
    },
    /// Tabulate the GUE and GOE Tracy-Widom laws.
    TwTable {
        #[arg(long, default_value_t = -8.0, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, default_value_t = 6.0, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
    /// Exact and numerical self-checks.
    Verify {
        /// Random instances of the enumeration and interface suites.
        #[arg(long, default_value_t = 100)]
        instances: usize,
    },
}

fn emit(out: &Option<PathBuf>, name: &str, bytes: &[u8]) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(name), bytes)?;
            eprintln!("wrote {}", dir.join(name).display());
        }
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    with_threads(cli.threads, || dispatch(&cli))?
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { config } => {
            let mut cfg = ExperimentConfig::load(config)?;
            if let Some(s) = cli.seed {
                cfg.master_seed = s;
            }
            let dir = cli.out.clone().or_else(|| cfg.out_dir.clone().map(PathBuf::from));
            let Some(dir) = dir else { bail!("no output directory: pass --out or set out_dir") };
            let tw = TracyWidom::new();
            let (report, timings) = experiments::run(&cfg, &tw)?;
            report.write_to(&dir)?;
            timings.write_to(&dir)?;
            for c in &report.checks {
                println!("{} {} {} (bound {})", if c.passed { "PASS" } else { "FAIL" }, c.name, fmt17(c.value), fmt17(c.bound));
            }
            println!("{:.1} s, reports in {}", timings.total_seconds, dir.display());
        }
        Command::Predict { config } => {
            let cfg = ExperimentConfig::load(config)?;
            let rows = experiments::prediction(&cfg, &TracyWidom::new())?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["s", "predicted"])?;
            for (s, p) in rows {
                w.write_record([fmt17(s), fmt17(p)])?;
            }
            emit(&cli.out, "predict.csv", &w.into_inner()?)?;
        }
        Command::TwTable { from, to, step } => {
            if !(step > &0.0 && to > from) {
                bail!("need from < to and step > 0");
            }
            let tw = TracyWidom::new();
            let k = ((to - from) / step).round() as usize;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["s", "f_gue", "f_goe", "density_gue", "density_goe"])?;
            for i in 0..=k {
                let s = from + step * i as f64;
                w.write_record([s, tw.gue.at(s), tw.goe.at(s), tw.gue.density(s), tw.goe.density(s)].map(fmt17))?;
            }
            emit(&cli.out, "tw_table.csv", &w.into_inner()?)?;
        }
        Command::Verify { instances } => {
            let seed = cli.seed.unwrap_or(0);
            let oracle = oracle_suite(*instances, seed)?;
            println!("enumeration: {} instances, {} sites, {} mismatches", oracle.instances, oracle.sites, oracle.mismatches);
            let (corr, _) = replicas(seed, *instances, |plan| Ok(correspondence_probe(0.5, 30, 50, plan)?))?;
            let violations: usize = corr.iter().map(|c| c.violations + c.table_mismatches).sum();
            println!("correspondence: {} probes, {} violations", corr.iter().map(|c| c.probes).sum::<usize>(), violations);
            let iface = interface_suite(*instances, 50, seed)?;
            println!("interface: {} instances, {} violations", iface.instances, iface.violations());
            let tw = tw_suite(&TracyWidom::new(), 0.1)?;
            println!(
                "tracy-widom: route gaps {:.2e} (gue) {:.2e} (goe), monotonicity {:.2e}, limits {:.2e}",
                tw.gue_route_gap, tw.goe_route_gap, tw.monotonicity_defect, tw.limit_defect
            );
            let ok = oracle.mismatches == 0
                && violations == 0
                && iface.violations() == 0
                && tw.gue_route_gap <= 1e-6
                && tw.goe_route_gap <= 1e-6
                && tw.monotonicity_defect <= 0.0
                && tw.limit_defect <= 1e-6;
            if let Some(dir) = &cli.out {
                let v = json!({ "enumeration": oracle, "interface": iface, "tracy_widom": tw, "correspondence_violations": violations, "passed": ok });
                emit(&Some(dir.clone()), "verify.json", &to_json_bytes(&v)?)?;
            }
            if !ok {
                bail!("verification failed");
            }
            println!("all checks passed");
        }
    }
    Ok(())
}
