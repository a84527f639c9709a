//! Trained-policy text format.
//!
//! ```text
//! lcsnav-policy 1
//! fusion rule2
//! registry vision=relative:5 anchors=0,1 position=1 ...
//! predicates <name> <name> ...
//! zone <active_size> <min_lifetime> <w_min> <credit_incubating>
//! gene <id> <action> <weight> <birth_step> <permanent> <active> <alpha_1> ... <alpha_n>
//! ```
//!
//! Reals are written in Rust's shortest round-trip decimal form, so
//! `parse(write(p)) == p` bit for bit.

use std::fmt::Write as _;

use thiserror::Error;

use crate::lcs::{FusionRule, Gene, GeneSet};
use crate::predicates::{build_registry, PredicateRegistry, RegistryConfig};

const MAGIC: &str = "lcsnav-policy 1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolicyError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("predicate names in the file do not match the rebuilt registry")]
    RegistryMismatch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    pub fusion: FusionRule,
    pub registry: PredicateRegistry,
    pub genes: GeneSet,
}

pub fn write_policy(policy: &Policy) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "fusion {}", policy.fusion);
    let _ = writeln!(out, "registry {}", policy.registry.config());
    let _ = writeln!(out, "predicates {}", policy.registry.names().join(" "));
    let g = &policy.genes;
    let _ = writeln!(
        out,
        "zone {} {} {} {}",
        g.active_size,
        g.min_lifetime,
        g.w_min,
        u8::from(g.credit_incubating)
    );
    for (i, gene) in g.genes().iter().enumerate() {
        let _ = write!(
            out,
            "gene {} {} {} {} {} {}",
            gene.id,
            gene.action,
            gene.weight,
            gene.birth_step,
            u8::from(gene.permanent),
            u8::from(g.is_active(i))
        );
        for a in gene.alpha() {
            let _ = write!(out, " {a}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_policy(text: &str) -> Result<Policy, PolicyError> {
    let err = |line: usize, message: String| PolicyError::Parse { line, message };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let mut next = |what: &str| -> Result<(usize, &str), PolicyError> {
        lines
            .next()
            .ok_or_else(|| err(0, format!("unexpected end of file, expected {what}")))
    };

    let (n, magic) = next("header")?;
    if magic.trim() != MAGIC {
        return Err(err(n, format!("expected {MAGIC:?}")));
    }
    let (n, l) = next("fusion")?;
    let fusion: FusionRule = l
        .strip_prefix("fusion ")
        .ok_or_else(|| err(n, "expected fusion".into()))?
        .trim()
        .parse()
        .map_err(|e| err(n, e))?;
    let (n, l) = next("registry")?;
    let cfg: RegistryConfig = l
        .strip_prefix("registry ")
        .ok_or_else(|| err(n, "expected registry".into()))?
        .parse()
        .map_err(|e| err(n, format!("{e}")))?;
    let registry = build_registry(&cfg).map_err(|e| err(n, e.to_string()))?;
    let (n, l) = next("predicates")?;
    let names: Vec<&str> = l
        .strip_prefix("predicates ")
        .ok_or_else(|| err(n, "expected predicates".into()))?
        .split_whitespace()
        .collect();
    if names != registry.names() {
        return Err(PolicyError::RegistryMismatch);
    }
    let (n, l) = next("zone")?;
    let zone: Vec<&str> = l
        .strip_prefix("zone ")
        .ok_or_else(|| err(n, "expected zone".into()))?
        .split_whitespace()
        .collect();
    let [size, life, wmin, shadow] = zone.as_slice() else {
        return Err(err(n, "zone needs 4 fields".into()));
    };
    let mut genes = GeneSet::new(
        size.parse().map_err(|_| err(n, "bad active size".into()))?,
        life.parse().map_err(|_| err(n, "bad min lifetime".into()))?,
        wmin.parse().map_err(|_| err(n, "bad w_min".into()))?,
    );
    genes.credit_incubating = *shadow == "1";

    let mut last_id = None;
    for (n, l) in lines {
        if l.trim().is_empty() {
            continue;
        }
        let mut f = l.split_whitespace();
        if f.next() != Some("gene") {
            return Err(err(n, "expected gene record".into()));
        }
        let mut field = |name: &str| f.next().ok_or_else(|| err(n, format!("missing {name}")));
        let id: u64 = field("id")?.parse().map_err(|_| err(n, "bad id".into()))?;
        let action = field("action")?.parse().map_err(|e| err(n, e))?;
        let weight: f64 = field("weight")?.parse().map_err(|_| err(n, "bad weight".into()))?;
        let birth: u64 = field("birth")?.parse().map_err(|_| err(n, "bad birth".into()))?;
        let permanent = field("permanent")? == "1";
        let active = field("active")? == "1";
        let alpha: Vec<f64> = f
            .map(|t| t.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| err(n, "bad coefficient".into()))?;
        if alpha.len() != registry.len() {
            return Err(err(
                n,
                format!("{} coefficients, registry has {}", alpha.len(), registry.len()),
            ));
        }
        if last_id.is_some_and(|p| p >= id) {
            return Err(err(n, "gene ids must increase".into()));
        }
        last_id = Some(id);
        let mut gene =
            Gene::new(id, alpha, action, weight, birth).ok_or_else(|| err(n, "all-zero condition".into()))?;
        gene.permanent = permanent;
        genes.insert(gene, active);
    }
    Ok(Policy {
        fusion,
        registry,
        genes,
    })
}
