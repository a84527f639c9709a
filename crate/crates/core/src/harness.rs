//! Experiment configuration and the command implementations behind the
//! `lcsnav` CLI.
//!
//! The configuration file is TOML:
//!
//! ```toml
//! seed = 7
//! generations = 100
//! radius = 5.0
//! fusion = "rule2"
//!
//! [maps]
//! count = 20
//! width = 100
//! height = 100
//! seed = 7
//!
//! [registry]
//! vision = "relative:5"
//!
//! [lcs]
//! capacity = 200
//!
//! [variants.supervised]
//! beta = 1.0
//!
//! [variants.retrospective]
//! m_initial = 0
//! m_increment = 2
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::gridworld::{
    generate_office_map, load_map, save_map, step, DomainEnsemble, GridDomain, OfficeParams, VisionConfig,
};
use crate::lcs::{FusionRule, GeneSet, LcsConfig};
use crate::learning::{evaluate_policy, run_episode, CostReport, EpisodeOptions, LearningConfig, Potential, Trainer};
use crate::policy::{parse_policy, write_policy, Policy};
use crate::predicates::{build_registry, RegistryConfig, VisionMode};

/// Where the domains of an experiment come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapSource {
    /// Directory of `*.map` files; when set, the generator fields are ignored.
    pub dir: Option<PathBuf>,
    pub count: usize,
    pub width: usize,
    pub height: usize,
    pub seed: u64,
    pub office: OfficeParams,
}

impl Default for MapSource {
    fn default() -> Self {
        MapSource {
            dir: None,
            count: 20,
            width: 100,
            height: 100,
            seed: 7,
            office: OfficeParams::default(),
        }
    }
}

/// Per-variant learning parameters; the potential comes from the section name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VariantConfig {
    pub beta: f64,
    pub m_initial: usize,
    pub m_increment: usize,
    pub step_limit_factor: f64,
}

impl Default for VariantConfig {
    fn default() -> Self {
        let l = LearningConfig::default();
        VariantConfig {
            beta: l.beta,
            m_initial: l.m_initial,
            m_increment: l.m_increment,
            step_limit_factor: l.step_limit_factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub generations: usize,
    pub radius: f64,
    pub fusion: FusionRule,
    pub out: PathBuf,
    /// Write a path trace of the final policy on every domain.
    pub traces: bool,
    pub maps: MapSource,
    pub registry: RegistryConfig,
    pub lcs: LcsConfig,
    pub variants: BTreeMap<Potential, VariantConfig>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 7,
            generations: 100,
            radius: 5.0,
            fusion: FusionRule::Rule2,
            out: PathBuf::from("out"),
            traces: false,
            maps: MapSource::default(),
            registry: RegistryConfig::default(),
            lcs: LcsConfig::default(),
            variants: Potential::ALL
                .into_iter()
                .map(|p| (p, VariantConfig::default()))
                .collect(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).context("config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        VisionConfig::new(self.radius)?;
        if self.maps.dir.is_none() && self.maps.count == 0 {
            bail!("maps.count must be >= 1");
        }
        build_registry(&self.registry)?;
        for (p, v) in &self.variants {
            if !(v.beta > 0.0) {
                bail!("variants.{p}.beta must be positive");
            }
            if !(v.step_limit_factor > 0.0) {
                bail!("variants.{p}.step_limit_factor must be positive");
            }
        }
        Ok(())
    }

    pub fn vision(&self) -> Result<VisionConfig> {
        Ok(VisionConfig::new(self.radius)?)
    }

    pub fn learning(&self, potential: Potential) -> LearningConfig {
        let v = self.variants.get(&potential).cloned().unwrap_or_default();
        LearningConfig {
            beta: v.beta,
            potential,
            m_initial: v.m_initial,
            m_increment: v.m_increment,
            step_limit_factor: v.step_limit_factor,
            fusion: self.fusion,
        }
    }
}

/// Seed of the `i`-th generated map.
pub fn map_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add(index as u64)
}

pub fn map_file_name(index: usize) -> String {
    format!("map_{index:03}.map")
}

/// Generates the configured suite in memory.
pub fn generate_suite(src: &MapSource) -> Result<Vec<GridDomain>> {
    (0..src.count)
        .map(|i| {
            generate_office_map(map_seed(src.seed, i), src.width, src.height, &src.office)
                .with_context(|| format!("generating map {i}"))
        })
        .collect()
}

/// Writes `count` maps plus `manifest.txt` (`file seed` per line).
pub fn cmd_generate_maps(src: &MapSource, out: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut manifest = String::new();
    let mut files = Vec::new();
    for (i, d) in generate_suite(src)?.iter().enumerate() {
        let name = map_file_name(i);
        let path = out.join(&name);
        fs::write(&path, save_map(d)).with_context(|| format!("writing {}", path.display()))?;
        manifest.push_str(&format!("{name} {}\n", map_seed(src.seed, i)));
        files.push(path);
    }
    fs::write(out.join("manifest.txt"), manifest)?;
    Ok(files)
}

/// Loads every `*.map` file of a directory in file-name order.
pub fn load_map_dir(dir: &Path) -> Result<Vec<(String, GridDomain)>> {
    let mut names: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "map"))
        .collect();
    names.sort();
    if names.is_empty() {
        bail!("no .map files in {}", dir.display());
    }
    names
        .into_iter()
        .map(|p| {
            let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
            let d = load_map(&text).with_context(|| format!("map {}", p.display()))?;
            Ok((p.file_name().unwrap().to_string_lossy().into_owned(), d))
        })
        .collect()
}

pub fn load_domains(src: &MapSource) -> Result<Vec<(String, GridDomain)>> {
    match &src.dir {
        Some(dir) => load_map_dir(dir),
        None => Ok(generate_suite(src)?
            .into_iter()
            .enumerate()
            .map(|(i, d)| (map_file_name(i), d))
            .collect()),
    }
}

/// One metrics row.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub generation: usize,
    pub variant: Potential,
    pub report: CostReport,
    pub active_genes: usize,
    pub hold: usize,
}

pub const METRICS_HEADER: &str = "generation,variant,mean_cost,std_cost,failures,active_genes,M";

impl MetricsRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.generation,
            self.variant,
            self.report.mean,
            self.report.stddev,
            self.report.failures,
            self.active_genes,
            self.hold
        )
    }
}

/// Outcome of training one variant.
#[derive(Debug, Clone)]
pub struct VariantRun {
    pub variant: Potential,
    pub rows: Vec<MetricsRow>,
    pub policy: Policy,
}

/// Trains one variant from the shared seed. Row 0 evaluates the initial
/// population without learning; row `g` reports the training episodes of
/// generation `g`.
pub fn train_variant(
    cfg: &ExperimentConfig,
    ensemble: &DomainEnsemble,
    variant: Potential,
    mut on_row: impl FnMut(&MetricsRow),
) -> Result<VariantRun> {
    let registry = build_registry(&cfg.registry)?;
    let mut trainer = Trainer::new(
        registry,
        cfg.vision()?,
        cfg.learning(variant),
        cfg.lcs.clone(),
        cfg.seed,
    )?;
    let mut rows = Vec::with_capacity(cfg.generations + 1);
    let initial = trainer.evaluate(ensemble)?;
    let row = MetricsRow {
        generation: 0,
        variant,
        report: initial,
        active_genes: trainer.genes.active_count(),
        hold: trainer.hold(),
    };
    on_row(&row);
    rows.push(row);
    for g in 1..=cfg.generations {
        let hold = trainer.hold();
        let report = trainer
            .run_generation(ensemble)
            .with_context(|| format!("variant {variant}, generation {g}"))?;
        let row = MetricsRow {
            generation: g,
            variant,
            report,
            active_genes: trainer.genes.active_count(),
            hold,
        };
        on_row(&row);
        rows.push(row);
    }
    Ok(VariantRun {
        variant,
        rows,
        policy: Policy {
            fusion: cfg.fusion,
            registry: trainer.registry().clone(),
            genes: trainer.genes.clone(),
        },
    })
}

/// Least-squares slope of the trailing moving average of mean costs.
pub fn moving_average_slope(means: &[f64], window: usize) -> Option<f64> {
    let window = window.max(1);
    if means.len() < window + 1 {
        return None;
    }
    let ma: Vec<f64> = means
        .windows(window)
        .map(|w| w.iter().sum::<f64>() / window as f64)
        .collect();
    let tail = &ma[ma.len().saturating_sub(window)..];
    if tail.len() < 2 {
        return None;
    }
    let n = tail.len() as f64;
    let mx = (n - 1.0) / 2.0;
    let my = tail.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in tail.iter().enumerate() {
        let dx = i as f64 - mx;
        sxy += dx * (y - my);
        sxx += dx * dx;
    }
    Some(sxy / sxx)
}

/// Runs every configured variant, writing `metrics.csv`,
/// `policy_<variant>.txt` and (optionally) `traces/<variant>_<map>.csv`
/// under `out`.
pub fn cmd_train(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<VariantRun>> {
    cfg.validate()?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let named = load_domains(&cfg.maps)?;
    let names: Vec<String> = named.iter().map(|(n, _)| n.clone()).collect();
    let ensemble = DomainEnsemble::uniform(named.into_iter().map(|(_, d)| d).collect())?;
    check_registry_fits(&cfg.registry, &ensemble)?;

    let metrics_path = out.join("metrics.csv");
    let mut metrics =
        fs::File::create(&metrics_path).with_context(|| format!("creating {}", metrics_path.display()))?;
    writeln!(metrics, "{METRICS_HEADER}")?;
    let mut runs = Vec::new();
    for &variant in cfg.variants.keys() {
        let run = train_variant(cfg, &ensemble, variant, |row| {
            let _ = writeln!(metrics, "{}", row.csv());
        })?;
        metrics.flush()?;
        let policy_path = out.join(format!("policy_{variant}.txt"));
        fs::write(&policy_path, write_policy(&run.policy))
            .with_context(|| format!("writing {}", policy_path.display()))?;
        if cfg.traces {
            let dir = out.join("traces");
            fs::create_dir_all(&dir)?;
            for (name, d) in names.iter().zip(ensemble.domains()) {
                let csv = trace_csv(&run.policy, d, &cfg.vision()?, cfg.learning(variant).step_limit_factor)?;
                let stem = name.trim_end_matches(".map");
                fs::write(dir.join(format!("{variant}_{stem}.csv")), csv)?;
            }
        }
        runs.push(run);
    }
    Ok(runs)
}

fn check_registry_fits(reg: &RegistryConfig, ensemble: &DomainEnsemble) -> Result<()> {
    if let VisionMode::Absolute(w, h) = reg.vision {
        for d in ensemble.domains() {
            if (d.width(), d.height()) != (w as usize, h as usize) {
                bail!(
                    "registry uses absolute {w}x{h} vision but a map is {}x{}",
                    d.width(),
                    d.height()
                );
            }
        }
    }
    Ok(())
}

/// The naive policy as a three-gene policy file.
pub fn naive_seed_policy(cfg: &ExperimentConfig) -> Result<Policy> {
    let registry = build_registry(&cfg.registry)?;
    let genes = GeneSet::with_naive_seeds(&cfg.lcs, &registry)
        .ok_or_else(|| anyhow!("registry has no naive-action predicates"))?;
    Ok(Policy {
        fusion: cfg.fusion,
        registry,
        genes,
    })
}

pub fn read_policy(path: &Path) -> Result<Policy> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_policy(&text).with_context(|| format!("policy {}", path.display()))
}

/// Evaluation summary with per-map rows.
#[derive(Debug, Clone)]
pub struct EvalOutcome {
    pub report: CostReport,
    pub names: Vec<String>,
}

impl EvalOutcome {
    pub fn csv(&self) -> String {
        let mut s = String::from("domain,cost\n");
        for (i, c) in &self.report.per_domain {
            s.push_str(&format!("{},{}\n", self.names[*i], c));
        }
        s
    }

    pub fn table(&self) -> String {
        let mut s = format!(
            "mean {:.4}  std {:.4}  failures {}\n",
            self.report.mean, self.report.stddev, self.report.failures
        );
        for (i, c) in &self.report.per_domain {
            s.push_str(&format!("  {:<16} {:.4}\n", self.names[*i], c));
        }
        s
    }
}

/// Evaluates `policy` on `maps`. When `expected` is given, its registry must
/// equal the one embedded in the policy.
pub fn cmd_eval(
    policy: &Policy,
    maps: &[(String, GridDomain)],
    radius: f64,
    step_limit_factor: f64,
    expected: Option<&RegistryConfig>,
) -> Result<EvalOutcome> {
    if let Some(reg) = expected {
        if reg != policy.registry.config() {
            bail!(
                "registry mismatch: policy has [{}], configuration has [{}]",
                policy.registry.config(),
                reg
            );
        }
    }
    let ensemble = DomainEnsemble::uniform(maps.iter().map(|(_, d)| d.clone()).collect())?;
    check_registry_fits(policy.registry.config(), &ensemble)?;
    let learning = LearningConfig {
        fusion: policy.fusion,
        step_limit_factor,
        ..LearningConfig::default()
    };
    let report = evaluate_policy(
        &ensemble,
        &policy.genes,
        &policy.registry,
        &VisionConfig::new(radius)?,
        &learning,
    )?;
    Ok(EvalOutcome {
        report,
        names: maps.iter().map(|(n, _)| n.clone()).collect(),
    })
}

pub const TRACE_HEADER: &str = "step,x,y,dx,dy,action,reached";

/// Path trace: the initial pose, then one record per command. The terminal
/// record carries `reached` = 1 (goal) or 0 (step cap); others leave it empty.
pub fn trace_csv(
    policy: &Policy,
    domain: &GridDomain,
    vision: &VisionConfig,
    step_limit_factor: f64,
) -> Result<String> {
    let learning = LearningConfig {
        fusion: policy.fusion,
        step_limit_factor,
        ..LearningConfig::default()
    };
    let mut genes = policy.genes.clone();
    let opts = EpisodeOptions {
        record_trace: true,
        ..EpisodeOptions::evaluation()
    };
    let result = run_episode(domain, &mut genes, &policy.registry, vision, &learning, &opts)?;
    let trace = result.trace.unwrap_or_default();
    let mut s = String::from(TRACE_HEADER);
    s.push('\n');
    let mut pose = domain.start();
    let terminal = |k: usize| -> &'static str {
        if k == trace.len() {
            if result.reached {
                "1"
            } else {
                "0"
            }
        } else {
            ""
        }
    };
    let (dx, dy) = pose.dir.vector();
    s.push_str(&format!("0,{},{},{dx},{dy},,{}\n", pose.pos.x, pose.pos.y, terminal(0)));
    for (k, rec) in trace.iter().enumerate() {
        debug_assert_eq!(step(domain, pose, rec.action), rec.after);
        pose = rec.after;
        let (dx, dy) = pose.dir.vector();
        s.push_str(&format!(
            "{},{},{},{dx},{dy},{},{}\n",
            k + 1,
            pose.pos.x,
            pose.pos.y,
            rec.action,
            terminal(k + 1)
        ));
    }
    Ok(s)
}

/// Resolves the output directory: flag, then config.
pub fn output_dir(flag: Option<&Path>, cfg: &ExperimentConfig) -> PathBuf {
    flag.map(Path::to_path_buf).unwrap_or_else(|| cfg.out.clone())
}
