//! Python bindings: maps, the naive baseline, training and policy files.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use lcsnav_core::harness::{self, ExperimentConfig};
use lcsnav_core::learning::{evaluate_naive, evaluate_policy, run_naive_episode};
use lcsnav_core::policy::{parse_policy, write_policy};
use lcsnav_core::{self as core, DomainEnsemble, GridDomain, VisionConfig};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn ensemble(domains: Vec<PyRef<'_, Domain>>) -> PyResult<DomainEnsemble> {
    DomainEnsemble::uniform(domains.iter().map(|d| d.inner.clone()).collect()).map_err(err)
}

/// A static grid with start state and goal cell.
#[pyclass(frozen)]
struct Domain {
    inner: GridDomain,
}

#[pymethods]
impl Domain {
    /// Parses the map text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        core::load_map(text).map(|inner| Domain { inner }).map_err(err)
    }

    /// Generates an office-like map (W, H >= 16) with default room parameters.
    #[staticmethod]
    fn office(seed: u64, width: usize, height: usize) -> PyResult<Self> {
        core::generate_office_map(seed, width, height, &core::OfficeParams::default())
            .map(|inner| Domain { inner })
            .map_err(err)
    }

    fn to_text(&self) -> String {
        core::save_map(&self.inner)
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    /// `(x, y)` of the start cell.
    #[getter]
    fn start(&self) -> (i32, i32) {
        let s = self.inner.start();
        (s.pos.x, s.pos.y)
    }

    #[getter]
    fn goal(&self) -> (i32, i32) {
        let g = self.inner.goal();
        (g.x, g.y)
    }

    /// Shortest command count from the start state.
    fn optimal_length(&self) -> Option<u32> {
        core::shortest_path(
            &core::GridView::of_domain(&self.inner),
            self.inner.start(),
            self.inner.goal(),
        )
        .length
    }

    /// Runs the naive policy; returns `(reached, cost, commands)`.
    #[pyo3(signature = (radius = 5.0, step_limit_factor = 2.0))]
    fn naive_episode(&self, radius: f64, step_limit_factor: f64) -> PyResult<(bool, f64, Vec<String>)> {
        let vision = VisionConfig::new(radius).map_err(err)?;
        let r = run_naive_episode(&self.inner, &vision, step_limit_factor).map_err(err)?;
        Ok((r.reached, r.cost, r.commands.iter().map(|a| a.to_string()).collect()))
    }

    fn __repr__(&self) -> String {
        format!(
            "Domain({}x{}, start={:?}, goal={:?})",
            self.width(),
            self.height(),
            self.start(),
            self.goal()
        )
    }
}

/// Prior-weighted cost summary over an ensemble.
#[pyclass(frozen, get_all)]
struct CostReport {
    mean: f64,
    stddev: f64,
    failures: usize,
    per_domain: Vec<f64>,
}

impl From<core::CostReport> for CostReport {
    fn from(r: core::CostReport) -> Self {
        CostReport {
            mean: r.mean,
            stddev: r.stddev,
            failures: r.failures,
            per_domain: r.per_domain.into_iter().map(|(_, c)| c).collect(),
        }
    }
}

#[pymethods]
impl CostReport {
    fn __repr__(&self) -> String {
        format!(
            "CostReport(mean={:.4}, stddev={:.4}, failures={})",
            self.mean, self.stddev, self.failures
        )
    }
}

/// A gene set together with its predicate registry and fusion rule.
#[pyclass(frozen)]
struct Policy {
    inner: core::policy::Policy,
}

#[pymethods]
impl Policy {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_policy(text).map(|inner| Policy { inner }).map_err(err)
    }

    /// The three naive seed genes under the default experiment settings.
    #[staticmethod]
    fn naive() -> PyResult<Self> {
        harness::naive_seed_policy(&ExperimentConfig::default())
            .map(|inner| Policy { inner })
            .map_err(err)
    }

    fn to_text(&self) -> String {
        write_policy(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.genes.len()
    }

    #[pyo3(signature = (domains, radius = 5.0, step_limit_factor = 2.0))]
    fn evaluate(&self, domains: Vec<PyRef<'_, Domain>>, radius: f64, step_limit_factor: f64) -> PyResult<CostReport> {
        let ens = ensemble(domains)?;
        let vision = VisionConfig::new(radius).map_err(err)?;
        let learning = core::LearningConfig {
            fusion: self.inner.fusion,
            step_limit_factor,
            ..Default::default()
        };
        evaluate_policy(&ens, &self.inner.genes, &self.inner.registry, &vision, &learning)
            .map(CostReport::from)
            .map_err(err)
    }
}

/// Trains one potential variant. `config` is optional TOML in the CLI's
/// experiment format.
#[pyclass]
struct Trainer {
    inner: core::Trainer,
}

#[pymethods]
impl Trainer {
    #[new]
    #[pyo3(signature = (potential = "supervised", seed = None, config = None))]
    fn new(potential: &str, seed: Option<u64>, config: Option<&str>) -> PyResult<Self> {
        let cfg = match config {
            Some(text) => ExperimentConfig::from_toml(text).map_err(err)?,
            None => ExperimentConfig::default(),
        };
        let potential: core::Potential = potential.parse().map_err(err)?;
        let registry = core::build_registry(&cfg.registry).map_err(err)?;
        let vision = cfg.vision().map_err(err)?;
        let inner = core::Trainer::new(
            registry,
            vision,
            cfg.learning(potential),
            cfg.lcs.clone(),
            seed.unwrap_or(cfg.seed),
        )
        .map_err(err)?;
        Ok(Trainer { inner })
    }

    /// One generation: every domain once, selection after each episode.
    fn run_generation(&mut self, domains: Vec<PyRef<'_, Domain>>) -> PyResult<CostReport> {
        let ens = ensemble(domains)?;
        self.inner.run_generation(&ens).map(CostReport::from).map_err(err)
    }

    fn evaluate(&self, domains: Vec<PyRef<'_, Domain>>) -> PyResult<CostReport> {
        let ens = ensemble(domains)?;
        self.inner.evaluate(&ens).map(CostReport::from).map_err(err)
    }

    #[getter]
    fn generation(&self) -> usize {
        self.inner.generation()
    }

    #[getter]
    fn hold(&self) -> usize {
        self.inner.hold()
    }

    #[getter]
    fn active_genes(&self) -> usize {
        self.inner.genes.active_count()
    }

    fn policy(&self) -> Policy {
        Policy {
            inner: core::policy::Policy {
                fusion: self.inner.learning().fusion,
                registry: self.inner.registry().clone(),
                genes: self.inner.genes.clone(),
            },
        }
    }
}

/// Naive-policy cost over a list of domains.
#[pyfunction]
#[pyo3(signature = (domains, radius = 5.0, step_limit_factor = 2.0))]
fn naive_cost(domains: Vec<PyRef<'_, Domain>>, radius: f64, step_limit_factor: f64) -> PyResult<CostReport> {
    let ens = ensemble(domains)?;
    let vision = VisionConfig::new(radius).map_err(err)?;
    evaluate_naive(&ens, &vision, step_limit_factor)
        .map(CostReport::from)
        .map_err(err)
}

/// The seeded map suite `count` maps of `width x height` starting at `seed`.
#[pyfunction]
#[pyo3(signature = (count = 20, width = 100, height = 100, seed = 7))]
fn office_suite(count: usize, width: usize, height: usize, seed: u64) -> PyResult<Vec<Domain>> {
    let src = harness::MapSource {
        count,
        width,
        height,
        seed,
        ..Default::default()
    };
    let maps = harness::generate_suite(&src).map_err(err)?;
    Ok(maps.into_iter().map(|inner| Domain { inner }).collect())
}

#[pymodule]
fn lcsnav(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Domain>()?;
    m.add_class::<CostReport>()?;
    m.add_class::<Policy>()?;
    m.add_class::<Trainer>()?;
    m.add_function(wrap_pyfunction!(naive_cost, m)?)?;
    m.add_function(wrap_pyfunction!(office_suite, m)?)?;
    Ok(())
}
