//! Report assembly: the per-partition spectral/counting pipeline, the paired
//! random-vs-planted sweep, JSON schema validation, and CSV rendering.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::counting::{cycle_deviation, CountReport};
use crate::error::Result;
use crate::hypergraph::{generate, GenSpec, Hypergraph};
use crate::indexing::{proper_partitions, Partition};
use crate::multilinear::{flatten, Budget, DeviationSpec, MultiForm};
use crate::spectral::{a_spectrum, lambda1_pi, lambda2_pi, HopmOptions, NormBracket};

/// Schema the JSON reports validate against; shipped with the repository.
pub const REPORT_SCHEMA_JSON: &str =
    include_str!("../../../schemas/quasirandom_report.v1.json");

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BracketReport {
    pub lower: f64,
    pub upper: Option<f64>,
    pub upper_budget_exceeded: bool,
}

impl From<&NormBracket> for BracketReport {
    fn from(b: &NormBracket) -> Self {
        BracketReport {
            lower: b.lower,
            upper: b.upper,
            upper_budget_exceeded: b.upper_budget_exceeded,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionReport {
    pub partition: String,
    pub orderings: Vec<String>,
    pub lambda1: BracketReport,
    pub lambda2: BracketReport,
    /// lambda2 upper over lambda1 lower; absent when either side is missing.
    pub separation: Option<f64>,
    pub mu1: f64,
    pub mu2: f64,
    pub mu_ratio: f64,
    pub a_min_eig: f64,
    pub a_dim: usize,
    pub tau_all_ones: f64,
    pub q: f64,
    pub counts: CountReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportMeta {
    pub n: usize,
    pub k: usize,
    pub edge_count: usize,
    pub density: f64,
    pub seed: Option<u64>,
    /// Density reference used for count expectations.
    pub p: f64,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuasirandomReport {
    pub schema_version: u32,
    pub meta: ReportMeta,
    pub partitions: Vec<PartitionReport>,
}

impl QuasirandomReport {
    /// Zeroes the wall clock so identical inputs give identical bytes.
    pub fn canonicalize(&mut self) {
        self.meta.wall_time_ms = 0;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// Partitions to analyze; None means every proper partition of k.
    pub partitions: Option<Vec<Partition>>,
    /// Cycle parameter: counts use cycles of length 4*ell.
    pub ell: usize,
    /// Density reference for expected counts; None falls back to the
    /// observed density.
    pub p: Option<f64>,
    pub hopm: HopmOptions,
    pub budget: Budget,
    /// Generator seed echoed into the report when known.
    pub seed: Option<u64>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            partitions: None,
            ell: 1,
            p: None,
            hopm: HopmOptions::default(),
            budget: Budget::default(),
            seed: None,
        }
    }
}

/// tau evaluated at the unit-scaled all-ones vector of every mode; equals
/// k!|E|/n^(k/2) for loop-free hypergraphs.
pub fn tau_all_ones(tau: &crate::multilinear::MultiMap<f64>) -> Result<f64> {
    let ones: Vec<Vec<f64>> = tau
        .mode_dims()
        .iter()
        .map(|&d| vec![1.0 / (d as f64).sqrt(); d])
        .collect();
    let refs: Vec<&[f64]> = ones.iter().map(|v| v.as_slice()).collect();
    tau.eval(&refs)
}

fn partition_report(
    h: &Hypergraph,
    pi: &Partition,
    p_ref: f64,
    opts: &AnalyzeOptions,
) -> Result<PartitionReport> {
    let l1 = lambda1_pi(h, pi, &opts.hopm, &opts.budget)?;
    let l2 = lambda2_pi(h, pi, &opts.hopm, &opts.budget)?;
    let canonical = pi.canonical_ordering();
    let tau = flatten(h, &canonical)?;
    let spectrum = a_spectrum(&tau, &opts.budget)?;
    let counts = cycle_deviation(h, pi, opts.ell, p_ref, &opts.budget)?;
    let lambda1 = BracketReport::from(&l1.combined);
    let lambda2 = BracketReport::from(&l2.combined);
    let separation = match (lambda2.upper, lambda1.lower) {
        (Some(u), lo) if lo > 0.0 => Some(u / lo),
        _ => None,
    };
    let mu_ratio = if spectrum.mu1 != 0.0 { spectrum.mu2 / spectrum.mu1 } else { 0.0 };
    Ok(PartitionReport {
        partition: pi.label(),
        orderings: l1.per_ordering.iter().map(|(o, _)| o.label()).collect(),
        lambda1,
        lambda2,
        separation,
        mu1: spectrum.mu1,
        mu2: spectrum.mu2,
        mu_ratio,
        a_min_eig: spectrum.min_eig,
        a_dim: spectrum.dim,
        tau_all_ones: tau_all_ones(&tau)?,
        q: DeviationSpec::for_hypergraph(h).q,
        counts,
    })
}

/// Runs the full per-partition pipeline on one hypergraph.
pub fn analyze(h: &Hypergraph, opts: &AnalyzeOptions) -> Result<QuasirandomReport> {
    let start = Instant::now();
    let partitions = match &opts.partitions {
        Some(ps) => ps.clone(),
        None => proper_partitions(h.k()),
    };
    let density = h.density(h.has_loops());
    let p_ref = opts.p.unwrap_or(density);
    let mut reports = Vec::with_capacity(partitions.len());
    for pi in &partitions {
        reports.push(partition_report(h, pi, p_ref, opts)?);
    }
    Ok(QuasirandomReport {
        schema_version: REPORT_SCHEMA_VERSION,
        meta: ReportMeta {
            n: h.n(),
            k: h.k(),
            edge_count: h.edge_count(),
            density,
            seed: opts.seed,
            p: p_ref,
            wall_time_ms: start.elapsed().as_millis() as u64,
        },
        partitions: reports,
    })
}

/// Sweep configuration: for each (n, seed), a random instance plus, when
/// `bias` is set, a planted-bias instance with the same expected density.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub k: usize,
    pub p: f64,
    pub ns: Vec<usize>,
    pub seeds: Vec<u64>,
    pub bias: Option<f64>,
    pub allow_loops: bool,
    pub partitions: Option<Vec<String>>,
    pub ell: usize,
    pub restarts: usize,
    pub max_entries: u128,
}

impl ExperimentConfig {
    pub fn new(k: usize, p: f64, ns: Vec<usize>, seeds: Vec<u64>, bias: Option<f64>) -> Self {
        ExperimentConfig {
            k,
            p,
            ns,
            seeds,
            bias,
            allow_loops: false,
            partitions: None,
            ell: 1,
            restarts: HopmOptions::default().restarts,
            max_entries: Budget::default().max_entries,
        }
    }
}

/// One instance x partition observation; `scale` is n^(k/2) and
/// `lambda2_upper_over_scale` the separation statistic of the sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub variant: String,
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub bias: Option<f64>,
    pub seed: u64,
    pub partition: String,
    pub lambda1_lower: f64,
    pub lambda1_upper: Option<f64>,
    pub lambda2_lower: f64,
    pub lambda2_upper: Option<f64>,
    pub separation: Option<f64>,
    pub lambda2_upper_over_scale: Option<f64>,
    pub mu1: f64,
    pub mu2: f64,
    pub mu_ratio: f64,
    pub a_min_eig: f64,
    pub circuits: i128,
    pub expected: f64,
    pub ratio: f64,
    pub m: usize,
    pub length: usize,
    pub tau_all_ones: f64,
    pub q: f64,
    pub edge_count: usize,
    pub density: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub rows: Vec<ExperimentRow>,
}

fn parse_partition_names(cfg: &ExperimentConfig) -> Result<Vec<Partition>> {
    match &cfg.partitions {
        Some(names) => names
            .iter()
            .map(|s| crate::indexing::parse_partition(s))
            .collect(),
        None => Ok(proper_partitions(cfg.k)),
    }
}

/// Runs the sweep; rows come back sorted by (n, seed, variant, partition).
pub fn experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let partitions = parse_partition_names(cfg)?;
    let budget = Budget::new(cfg.max_entries);
    let hopm = HopmOptions { restarts: cfg.restarts, ..HopmOptions::default() };
    let mut variants: Vec<(&str, Option<f64>)> = vec![("random", None)];
    if cfg.bias.is_some() {
        variants.push(("planted", cfg.bias));
    }

    let mut rows = Vec::new();
    for &n in &cfg.ns {
        for &seed in &cfg.seeds {
            for &(variant, bias) in &variants {
                let spec = GenSpec {
                    n,
                    k: cfg.k,
                    p: cfg.p,
                    seed,
                    allow_loops: cfg.allow_loops,
                    bias,
                };
                let h = generate(&spec)?;
                let opts = AnalyzeOptions {
                    partitions: Some(partitions.clone()),
                    ell: cfg.ell,
                    p: Some(cfg.p),
                    hopm,
                    budget,
                    seed: Some(seed),
                };
                let report = analyze(&h, &opts)?;
                let scale = (n as f64).powf(cfg.k as f64 / 2.0);
                for pr in &report.partitions {
                    rows.push(ExperimentRow {
                        variant: variant.to_string(),
                        n,
                        k: cfg.k,
                        p: cfg.p,
                        bias,
                        seed,
                        partition: pr.partition.clone(),
                        lambda1_lower: pr.lambda1.lower,
                        lambda1_upper: pr.lambda1.upper,
                        lambda2_lower: pr.lambda2.lower,
                        lambda2_upper: pr.lambda2.upper,
                        separation: pr.separation,
                        lambda2_upper_over_scale: pr.lambda2.upper.map(|u| u / scale),
                        mu1: pr.mu1,
                        mu2: pr.mu2,
                        mu_ratio: pr.mu_ratio,
                        a_min_eig: pr.a_min_eig,
                        circuits: pr.counts.circuits,
                        expected: pr.counts.expected,
                        ratio: pr.counts.ratio,
                        m: pr.counts.m,
                        length: pr.counts.length,
                        tau_all_ones: pr.tau_all_ones,
                        q: pr.q,
                        edge_count: report.meta.edge_count,
                        density: report.meta.density,
                    });
                }
            }
        }
    }
    rows.sort_by(|a, b| {
        (a.n, a.seed, &a.variant, &a.partition).cmp(&(b.n, b.seed, &b.variant, &b.partition))
    });
    Ok(ExperimentReport { schema_version: REPORT_SCHEMA_VERSION, config: cfg.clone(), rows })
}

fn csv_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub const CSV_HEADER: &str = "variant,n,k,p,bias,seed,partition,lambda1_lower,lambda1_upper,\
lambda2_lower,lambda2_upper,separation,lambda2_upper_over_scale,mu1,mu2,mu_ratio,a_min_eig,\
circuits,expected,ratio,m,length,tau_all_ones,q,edge_count,density";

/// Tidy CSV, one row per instance x partition, rows in sweep order.
pub fn rows_to_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.variant,
            r.n,
            r.k,
            r.p,
            csv_opt(r.bias),
            r.seed,
            r.partition,
            r.lambda1_lower,
            csv_opt(r.lambda1_upper),
            r.lambda2_lower,
            csv_opt(r.lambda2_upper),
            csv_opt(r.separation),
            csv_opt(r.lambda2_upper_over_scale),
            r.mu1,
            r.mu2,
            r.mu_ratio,
            r.a_min_eig,
            r.circuits,
            r.expected,
            r.ratio,
            r.m,
            r.length,
            r.tau_all_ones,
            r.q,
            r.edge_count,
            r.density
        ));
    }
    out
}

fn type_matches(value: &Value, ty: &str) -> bool {
    match ty {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "boolean" => value.is_boolean(),
        "null" => value.is_null(),
        "integer" => value.as_i64().is_some() || value.as_u64().is_some(),
        "number" => value.is_number(),
        _ => false,
    }
}

fn validate_node(value: &Value, schema: &Value, path: &str, errors: &mut Vec<String>) {
    if let Some(ty) = schema.get("type") {
        let allowed: Vec<String> = match ty {
            Value::String(s) => vec![s.clone()],
            Value::Array(a) => {
                a.iter().filter_map(|v| v.as_str().map(String::from)).collect()
            }
            _ => vec![],
        };
        if !allowed.iter().any(|t| type_matches(value, t)) {
            errors.push(format!("{path}: expected type {allowed:?}"));
            return;
        }
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(value) {
            errors.push(format!("{path}: value not in enum"));
        }
    }
    if let Some(min) = schema.get("minimum").and_then(Value::as_f64) {
        if let Some(x) = value.as_f64() {
            if x < min {
                errors.push(format!("{path}: {x} below minimum {min}"));
            }
        }
    }
    if let Some(obj) = value.as_object() {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for name in required.iter().filter_map(Value::as_str) {
                if !obj.contains_key(name) {
                    errors.push(format!("{path}: missing required field {name}"));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        for (key, sub) in obj {
            match props.and_then(|p| p.get(key)) {
                Some(sub_schema) => {
                    validate_node(sub, sub_schema, &format!("{path}.{key}"), errors)
                }
                None => {
                    if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
                        errors.push(format!("{path}: unexpected field {key}"));
                    }
                }
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), value.as_array()) {
        for (i, sub) in arr.iter().enumerate() {
            validate_node(sub, items, &format!("{path}[{i}]"), errors);
        }
    }
}

/// Validates a JSON value against a schema restricted to the keywords the
/// shipped schema uses (type, required, properties, additionalProperties,
/// items, minimum, enum).
pub fn validate_against_schema(
    value: &Value,
    schema: &Value,
) -> std::result::Result<(), Vec<String>> {
    let mut errors = Vec::new();
    validate_node(value, schema, "$", &mut errors);
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

/// Validates a report JSON string against the shipped schema.
pub fn validate_report_json(json: &str) -> std::result::Result<(), Vec<String>> {
    let value: Value =
        serde_json::from_str(json).map_err(|e| vec![format!("invalid JSON: {e}")])?;
    let schema: Value =
        serde_json::from_str(REPORT_SCHEMA_JSON).expect("shipped schema parses");
    validate_against_schema(&value, &schema)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::complete_graph;

    #[test]
    fn analyze_complete_graph_thirty() {
        let h = complete_graph(30);
        let report = analyze(&h, &AnalyzeOptions::default()).unwrap();
        assert_eq!(report.partitions.len(), 1);
        let pr = &report.partitions[0];
        assert_eq!(pr.partition, "1+1");
        assert!((pr.lambda1.lower - 29.0).abs() < 1e-6);
        assert!((pr.lambda1.upper.unwrap() - 29.0).abs() < 1e-6);
        assert!((pr.lambda2.lower - 1.0).abs() < 1e-6);
        assert!((pr.lambda2.upper.unwrap() - 1.0).abs() < 1e-6);
        assert!((pr.mu1 - 841.0).abs() < 1e-6);
        assert!((pr.q - 29.0 / 30.0).abs() < 1e-12);
        assert!(pr.counts.ratio > 0.85 && pr.counts.ratio <= 1.0);
        assert_eq!(report.meta.p, 1.0);
    }

    #[test]
    fn analyze_empty_hypergraph() {
        let h = Hypergraph::new(4, 3, vec![]).unwrap();
        let report = analyze(&h, &AnalyzeOptions::default()).unwrap();
        assert_eq!(report.partitions.len(), 2);
        for pr in &report.partitions {
            assert_eq!(pr.lambda1.lower, 0.0);
            assert_eq!(pr.lambda2.lower, 0.0);
            assert_eq!(pr.counts.circuits, 0);
            assert!(pr.separation.is_none());
        }
    }

    #[test]
    fn report_json_validates_against_schema() {
        let h = complete_graph(6);
        let mut report = analyze(&h, &AnalyzeOptions::default()).unwrap();
        report.canonicalize();
        let json = report.to_json();
        validate_report_json(&json).unwrap();
    }

    #[test]
    fn schema_validator_rejects_broken_reports() {
        let h = complete_graph(4);
        let mut report = analyze(&h, &AnalyzeOptions::default()).unwrap();
        report.canonicalize();
        let mut value: Value = serde_json::from_str(&report.to_json()).unwrap();

        let mut missing = value.clone();
        missing.as_object_mut().unwrap().remove("meta");
        assert!(validate_against_schema(
            &missing,
            &serde_json::from_str(REPORT_SCHEMA_JSON).unwrap()
        )
        .is_err());

        value["schema_version"] = Value::from(99);
        assert!(validate_against_schema(
            &value,
            &serde_json::from_str(REPORT_SCHEMA_JSON).unwrap()
        )
        .is_err());

        let extra = serde_json::json!({"unknown": 1});
        assert!(validate_against_schema(
            &extra,
            &serde_json::from_str(REPORT_SCHEMA_JSON).unwrap()
        )
        .is_err());
    }

    #[test]
    fn tau_all_ones_matches_closed_form() {
        let h = complete_graph(5);
        let tau = flatten(&h, &Partition::new(vec![1, 1]).unwrap().canonical_ordering()).unwrap();
        let got = tau_all_ones(&tau).unwrap();
        let want = 2.0 * 10.0 / 5.0;
        assert!((got - want).abs() < 1e-10);
    }

    #[test]
    fn experiment_rows_sorted_and_csv_stable() {
        let cfg = ExperimentConfig::new(2, 0.5, vec![8, 6], vec![1, 0], Some(0.3));
        let report = experiment(&cfg).unwrap();
        assert_eq!(report.rows.len(), 8);
        let keys: Vec<(usize, u64, String, String)> = report
            .rows
            .iter()
            .map(|r| (r.n, r.seed, r.variant.clone(), r.partition.clone()))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);

        let csv1 = rows_to_csv(&report.rows);
        let report2 = experiment(&cfg).unwrap();
        let csv2 = rows_to_csv(&report2.rows);
        assert_eq!(csv1, csv2);
        assert!(csv1.starts_with("variant,n,k,p,bias,seed,partition"));
        assert_eq!(csv1.lines().count(), 9);
    }

    #[test]
    fn analyze_reruns_identically_after_canonicalize() {
        let h = complete_graph(8);
        let mut a = analyze(&h, &AnalyzeOptions::default()).unwrap();
        let mut b = analyze(&h, &AnalyzeOptions::default()).unwrap();
        a.canonicalize();
        b.canonicalize();
        assert_eq!(a.to_json(), b.to_json());
    }
}
