use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use lcsnav_core::harness::{
    self, cmd_eval, cmd_generate_maps, cmd_train, load_domains, load_map_dir, moving_average_slope, naive_seed_policy,
    read_policy, trace_csv, ExperimentConfig, METRICS_HEADER,
};
use lcsnav_core::{load_map, Potential, VisionConfig};

#[derive(Parser)]
#[command(
    name = "lcsnav",
    version,
    about = "Grid navigation with a learning classifier system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the master seed (and the map seed).
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
            cfg.maps.seed = s;
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a suite of generated office maps.
    GenerateMaps {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        height: Option<usize>,
    },
    /// Train every configured variant and write metrics and policies.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory of .map files replacing the configured suite.
        #[arg(long)]
        maps: Option<PathBuf>,
        /// Train only this variant.
        #[arg(long)]
        variant: Option<Potential>,
        #[arg(long)]
        generations: Option<usize>,
    },
    /// Evaluate a policy (or the naive seed policy) on a directory of maps.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        policy: Option<PathBuf>,
        #[arg(long)]
        maps: Option<PathBuf>,
        #[arg(long)]
        radius: Option<f64>,
        /// Per-domain CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the path trace of a policy on one map.
    Trace {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        policy: Option<PathBuf>,
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenerateMaps {
            common,
            out,
            count,
            width,
            height,
        } => {
            let mut cfg = common.load()?;
            cfg.maps.count = count.unwrap_or(cfg.maps.count);
            cfg.maps.width = width.unwrap_or(cfg.maps.width);
            cfg.maps.height = height.unwrap_or(cfg.maps.height);
            let files = cmd_generate_maps(&cfg.maps, &out)?;
            println!("wrote {} maps to {}", files.len(), out.display());
        }
        Command::Train {
            common,
            out,
            maps,
            variant,
            generations,
        } => {
            let mut cfg = common.load()?;
            if let Some(dir) = maps {
                cfg.maps.dir = Some(dir);
            }
            if let Some(g) = generations {
                cfg.generations = g;
            }
            if let Some(v) = variant {
                let vc = cfg.variants.get(&v).cloned().unwrap_or_default();
                cfg.variants = [(v, vc)].into_iter().collect();
            }
            let out = harness::output_dir(out.as_deref(), &cfg);
            let runs = cmd_train(&cfg, &out)?;
            println!("{METRICS_HEADER}");
            for run in &runs {
                let last = run.rows.last().expect("row 0 always present");
                println!("{}", last.csv());
                let means: Vec<f64> = run.rows.iter().map(|r| r.report.mean).collect();
                if let Some(s) = moving_average_slope(&means, 10) {
                    println!("# {} moving-average slope {s:+.5} per generation", run.variant);
                }
            }
            println!("outputs in {}", out.display());
        }
        Command::Eval {
            common,
            policy,
            maps,
            radius,
            out,
        } => {
            let cfg = common.load()?;
            let domains = match maps {
                Some(dir) => load_map_dir(&dir)?,
                None => load_domains(&cfg.maps)?,
            };
            let (policy, expected) = match policy {
                Some(p) => (read_policy(&p)?, common.config.as_ref().map(|_| &cfg.registry)),
                None => (naive_seed_policy(&cfg)?, None),
            };
            let factor = cfg.learning(Potential::Supervised).step_limit_factor;
            let outcome = cmd_eval(&policy, &domains, radius.unwrap_or(cfg.radius), factor, expected)?;
            print!("{}", outcome.table());
            if let Some(path) = out {
                write(&path, &outcome.csv())?;
            }
        }
        Command::Trace {
            common,
            policy,
            map,
            radius,
            out,
        } => {
            let cfg = common.load()?;
            let policy = match policy {
                Some(p) => read_policy(&p)?,
                None => naive_seed_policy(&cfg)?,
            };
            let text = fs::read_to_string(&map).with_context(|| format!("reading {}", map.display()))?;
            let domain = load_map(&text).with_context(|| format!("map {}", map.display()))?;
            let vision = VisionConfig::new(radius.unwrap_or(cfg.radius))?;
            let factor = cfg.learning(Potential::Supervised).step_limit_factor;
            let csv = trace_csv(&policy, &domain, &vision, factor)?;
            match out {
                Some(path) => write(&path, &csv)?,
                None => print!("{csv}"),
            }
        }
    }
    Ok(())
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
