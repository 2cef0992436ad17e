//! Experiment configuration, sweeps, method comparison and report output.
//!
//! Defaults follow the 12-qubit, 8192-shot protocol: `Z@[0]` observable,
//! `P_up@1` projector, and the conjoined (sign-positive and projector-up)
//! oracle for Grover runs. Qubit placement and oracle choice are assumptions
//! and are listed in every report's `assumptions` field.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{build_grover, build_shallow, lower_circuit, optimal_iterations, Circuit, ShallowSpec};
use crate::error::{Error, Result};
use crate::estimators::{
    average_metrics, haar_average_itcf, mean_and_variance, metrics_from_probabilities, state_metrics, CircuitSummary,
    EstimateReport, Method, Metrics, ShotsUsed,
};
use crate::noise::{apply_noisy_circuit, noisy_estimates, NoiseParams, NoisyEstimates};
use crate::observables::{parse_projector, parse_zstring, DiagonalObservable, OracleKind, UpProjector};
use crate::rng::derive_seed;
use crate::statevec::{apply_circuit, haar_random_state, sample_distribution, zero_state, ShotHistogram};

pub const DEFAULT_QUBITS: usize = 12;
pub const DEFAULT_SHOTS: u64 = 8192;
pub const DEFAULT_OBSERVABLE: &str = "Z@[0]";
pub const DEFAULT_PROJECTOR: &str = "P_up@1";

/// Fixed CSV header for reports and sweeps.
pub const REPORT_CSV_HEADER: [&str; 9] = [
    "method",
    "n",
    "T",
    "shots",
    "seed",
    "c_ab_projected",
    "c_ab_full",
    "s_a",
    "e_a",
];

pub const COMPARISON_CSV_HEADER: [&str; 4] = ["method", "s_a", "c_ab_projected", "e_a"];

// Sub-stream tags for seed derivation.
const STREAM_SHOTS: u64 = 1;
const STREAM_NOISE: u64 = 2;
const STREAM_HAAR: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentMethod {
    Haar,
    Grover,
    Shallow,
}

impl std::str::FromStr for ExperimentMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar" => Ok(ExperimentMethod::Haar),
            "grover" => Ok(ExperimentMethod::Grover),
            "shallow" => Ok(ExperimentMethod::Shallow),
            _ => Err(Error::Parse {
                input: s.into(),
                message: "expected haar, grover or shallow".into(),
            }),
        }
    }
}

impl From<ExperimentMethod> for Method {
    fn from(m: ExperimentMethod) -> Method {
        match m {
            ExperimentMethod::Haar => Method::Haar,
            ExperimentMethod::Grover => Method::Grover,
            ExperimentMethod::Shallow => Method::Shallow,
        }
    }
}

fn default_n() -> usize {
    DEFAULT_QUBITS
}
fn default_method() -> ExperimentMethod {
    ExperimentMethod::Grover
}
fn default_observable() -> String {
    DEFAULT_OBSERVABLE.into()
}
fn default_projector() -> String {
    DEFAULT_PROJECTOR.into()
}
fn default_shots() -> u64 {
    DEFAULT_SHOTS
}

/// One experiment, as read from a JSON config file.
///
/// `oracle` and `iterations` belong to `grover`, `shallow` to `shallow`,
/// `haar_samples` to `haar`; setting one for another method is an error.
/// Missing method fields are filled with defaults when resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_n")]
    pub n_qubits: usize,
    #[serde(default = "default_method")]
    pub method: ExperimentMethod,
    #[serde(default = "default_observable")]
    pub observable: String,
    #[serde(default = "default_projector")]
    pub projector: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shallow: Option<ShallowSpec>,
    /// 0 selects exact amplitude-based estimation.
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub haar_samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseParams>,
    #[serde(default)]
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_qubits: DEFAULT_QUBITS,
            method: ExperimentMethod::Grover,
            observable: DEFAULT_OBSERVABLE.into(),
            projector: DEFAULT_PROJECTOR.into(),
            oracle: None,
            iterations: None,
            shallow: None,
            shots: DEFAULT_SHOTS,
            haar_samples: None,
            noise: None,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn for_method(method: ExperimentMethod) -> Self {
        ExperimentConfig {
            method,
            ..Default::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config(json_field(&e), e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_file(path)?;
        Self::from_json(&text)
    }

    /// Parses and checks every field, filling method defaults.
    pub fn resolve(&self) -> Result<ResolvedExperiment> {
        let n = self.n_qubits;
        let support = parse_zstring(&self.observable).map_err(|e| Error::config("observable", e.to_string()))?;
        let observable =
            DiagonalObservable::zstring(n, &support).map_err(|e| Error::config("observable", e.to_string()))?;
        let projector = parse_projector(&self.projector).map_err(|e| Error::config("projector", e.to_string()))?;
        projector
            .check_disjoint(&observable)
            .map_err(|e| Error::config("projector", e.to_string()))?;
        if let Some(noise) = &self.noise {
            noise.validate().map_err(|e| Error::config("noise", e.to_string()))?;
        }

        let mut echo = self.clone();
        let mut assumptions = Vec::new();
        if self.observable == DEFAULT_OBSERVABLE && self.projector == DEFAULT_PROJECTOR {
            assumptions.push("observable Z on qubit 0 and projector on qubit 1 (placement assumed)".into());
        }
        let forbid = |field: &str, present: bool| {
            if present {
                Err(Error::config(
                    field,
                    format!("not used by method `{}`", Method::from(self.method)),
                ))
            } else {
                Ok(())
            }
        };

        let plan = match self.method {
            ExperimentMethod::Haar => {
                forbid("oracle", self.oracle.is_some())?;
                forbid("iterations", self.iterations.is_some())?;
                forbid("shallow", self.shallow.is_some())?;
                forbid("noise", self.noise.is_some())?;
                let samples = self.haar_samples.unwrap_or(1);
                if samples == 0 {
                    return Err(Error::config("haar_samples", "must be at least 1"));
                }
                echo.haar_samples = Some(samples);
                Plan::Haar { samples }
            }
            ExperimentMethod::Grover => {
                forbid("shallow", self.shallow.is_some())?;
                forbid("haar_samples", self.haar_samples.is_some())?;
                let kind = self.oracle.clone().unwrap_or_else(|| {
                    assumptions.push("oracle sign_positive_and_up (oracle unspecified at source)".into());
                    OracleKind::SignPositiveAndUp
                });
                let predicate = kind
                    .resolve(&observable, projector)
                    .map_err(|e| Error::config("oracle", e.to_string()))?;
                predicate
                    .validate(n)
                    .map_err(|e| Error::config("oracle", e.to_string()))?;
                let marked = predicate.marked_count(n);
                let space = 1u64 << n;
                if marked == 0 || marked == space {
                    return Err(Error::config(
                        "oracle",
                        Error::DegenerateOracle {
                            predicate: predicate.id(),
                            marked,
                            space,
                        }
                        .to_string(),
                    ));
                }
                let iterations = match self.iterations {
                    Some(t) => t,
                    None => {
                        assumptions.push("iterations chosen by optimal_iterations".into());
                        optimal_iterations(marked, space)?
                    }
                };
                let circuit =
                    build_grover(n, &predicate, iterations).map_err(|e| Error::config("iterations", e.to_string()))?;
                echo.oracle = Some(kind);
                echo.iterations = Some(iterations);
                Plan::Circuit {
                    circuit,
                    iterations: Some(iterations),
                }
            }
            ExperimentMethod::Shallow => {
                forbid("oracle", self.oracle.is_some())?;
                forbid("iterations", self.iterations.is_some())?;
                forbid("haar_samples", self.haar_samples.is_some())?;
                let spec = self.shallow.clone().unwrap_or_else(|| {
                    assumptions.push("shallow spec: Ry(pi/4) on each observable qubit plus CNOT chain".into());
                    ShallowSpec::biased_parity(&observable)
                });
                let circuit = build_shallow(n, &spec).map_err(|e| Error::config("shallow", e.to_string()))?;
                echo.shallow = Some(spec);
                Plan::Circuit {
                    circuit,
                    iterations: None,
                }
            }
        };
        Ok(ResolvedExperiment {
            config: echo,
            observable,
            projector,
            plan,
            assumptions,
        })
    }
}

fn json_field(e: &serde_json::Error) -> String {
    // serde_json reports unknown/invalid fields inside the message.
    let msg = e.to_string();
    msg.split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "<root>".into())
}

#[derive(Debug, Clone)]
pub enum Plan {
    Haar { samples: u64 },
    Circuit { circuit: Circuit, iterations: Option<u32> },
}

/// A validated config with parsed objects and defaults applied.
#[derive(Debug, Clone)]
pub struct ResolvedExperiment {
    /// The input config with every default written out.
    pub config: ExperimentConfig,
    pub observable: DiagonalObservable,
    pub projector: UpProjector,
    pub plan: Plan,
    pub assumptions: Vec<String>,
}

impl ResolvedExperiment {
    pub fn circuit(&self) -> Option<&Circuit> {
        match &self.plan {
            Plan::Circuit { circuit, .. } => Some(circuit),
            Plan::Haar { .. } => None,
        }
    }

    /// Outcome distribution the estimators see: exact for noiseless runs,
    /// trajectory-averaged under noise.
    pub fn distribution(&self) -> Result<Vec<f64>> {
        let cfg = &self.config;
        match &self.plan {
            Plan::Haar { .. } => {
                Ok(haar_random_state(cfg.n_qubits, derive_seed(cfg.seed, STREAM_HAAR))?.probabilities())
            }
            Plan::Circuit { circuit, .. } => {
                let start = zero_state(cfg.n_qubits)?;
                match &cfg.noise {
                    Some(noise) => {
                        Ok(
                            apply_noisy_circuit(&start, circuit, noise, derive_seed(cfg.seed, STREAM_NOISE))?
                                .probabilities,
                        )
                    }
                    None => Ok(apply_circuit(&start, circuit)?.probabilities()),
                }
            }
        }
    }

    pub fn sample(&self, shots: u64) -> Result<ShotHistogram> {
        let probs = self.distribution()?;
        sample_distribution(
            self.config.n_qubits,
            &probs,
            shots,
            derive_seed(self.config.seed, STREAM_SHOTS),
        )
    }
}

fn summarize(circuit: &Circuit) -> CircuitSummary {
    let lowered = lower_circuit(circuit).ok();
    CircuitSummary {
        metadata: circuit.metadata().clone(),
        gate_count: circuit.len(),
        depth: circuit.depth(),
        lowered_gate_count: lowered.as_ref().map(Circuit::len),
        lowered_depth: lowered.as_ref().map(Circuit::depth),
    }
}

/// Builds the state for `config`, estimates, and returns a full report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<EstimateReport> {
    let resolved = config.resolve()?;
    let cfg = &resolved.config;
    let (obs, proj) = (&resolved.observable, resolved.projector);
    let n = cfg.n_qubits;
    let shots = (cfg.shots > 0).then_some(cfg.shots);

    let mut report = match &resolved.plan {
        Plan::Haar { samples } => {
            let haar_seed = derive_seed(cfg.seed, STREAM_HAAR);
            let (exact, series) = haar_average_itcf(n, obs, proj, *samples, haar_seed)?;
            match shots {
                None => exact,
                Some(shots) => {
                    let shot_metrics = series
                        .seeds
                        .iter()
                        .enumerate()
                        .map(|(i, &s)| {
                            let probs = haar_random_state(n, s)?.probabilities();
                            let h = sample_distribution(
                                n,
                                &probs,
                                shots,
                                derive_seed(cfg.seed, STREAM_SHOTS + 16 * i as u64),
                            )?;
                            metrics_from_probabilities(&h.frequencies(), obs, proj)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let mut r = EstimateReport::from_metrics(
                        Method::Haar,
                        n,
                        ShotsUsed::Shots(shots),
                        cfg.seed,
                        average_metrics(&shot_metrics),
                    );
                    r.exact = Some(exact.metrics());
                    r.samples = Some(*samples);
                    r.sample_variance =
                        mean_and_variance(&shot_metrics.iter().map(|m| m.c_ab_projected).collect::<Vec<_>>()).1;
                    r
                }
            }
        }
        Plan::Circuit { circuit, iterations } => {
            let probs = resolved.distribution()?;
            let exact = metrics_from_probabilities(&probs, obs, proj)?;
            let mut r = match shots {
                None => EstimateReport::from_metrics(cfg.method.into(), n, ShotsUsed::Exact, cfg.seed, exact),
                Some(shots) => {
                    let h = sample_distribution(n, &probs, shots, derive_seed(cfg.seed, STREAM_SHOTS))?;
                    let m = metrics_from_probabilities(&h.frequencies(), obs, proj)?;
                    let mut r =
                        EstimateReport::from_metrics(cfg.method.into(), n, ShotsUsed::Shots(shots), cfg.seed, m);
                    r.exact = Some(exact);
                    r
                }
            };
            r.iterations = *iterations;
            r.samples = cfg.noise.map(|nz| nz.trajectories as u64);
            r.circuit = Some(summarize(circuit));
            r
        }
    };
    report.seed = cfg.seed;
    report.config_echo = serde_json::to_value(cfg).expect("config serializes");
    report.assumptions = resolved.assumptions.clone();
    Ok(report)
}

/// Per-trajectory estimator values for a noisy circuit config. Uses the same
/// trajectory seeds as [`run_experiment`], so the mean distribution matches.
pub fn trajectory_estimates(config: &ExperimentConfig) -> Result<NoisyEstimates> {
    let resolved = config.resolve()?;
    let noise = config
        .noise
        .ok_or_else(|| Error::config("noise", "trajectory dump needs a noise model"))?;
    let circuit = resolved
        .circuit()
        .ok_or_else(|| Error::config("method", "trajectory dump needs a circuit method"))?;
    noisy_estimates(
        &zero_state(config.n_qubits)?,
        circuit,
        &noise,
        derive_seed(config.seed, STREAM_NOISE),
        &resolved.observable,
        resolved.projector,
    )
}

/// Exact metrics for a noiseless circuit run of `config` (no shots, no noise).
pub fn ideal_metrics(config: &ExperimentConfig) -> Result<Metrics> {
    let resolved = config.resolve()?;
    match resolved.circuit() {
        Some(c) => {
            let s = apply_circuit(&zero_state(config.n_qubits)?, c)?;
            state_metrics(&s, &resolved.observable, resolved.projector)
        }
        None => Err(Error::arg("ideal metrics need a circuit method")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: u32,
    pub report: EstimateReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: String,
    pub points: Vec<SweepPoint>,
}

/// One Grover run per iteration count, each with a seed derived from the
/// base seed and `T`.
pub fn sweep_grover_iterations(config: &ExperimentConfig, range: &[u32]) -> Result<SweepResult> {
    if config.method != ExperimentMethod::Grover {
        return Err(Error::config("method", "sweeps require method `grover`"));
    }
    if range.is_empty() || range.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::arg("sweep range must be nonempty and strictly increasing"));
    }
    let points = range
        .par_iter()
        .map(|&t| {
            let cfg = ExperimentConfig {
                iterations: Some(t),
                seed: derive_seed(config.seed, t as u64),
                ..config.clone()
            };
            Ok(SweepPoint {
                value: t,
                report: run_experiment(&cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        axis: "T".into(),
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub method: Method,
    pub s_a: f64,
    pub c_ab_projected: f64,
    pub e_a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub reports: Vec<EstimateReport>,
}

/// Default three-way comparison: Haar, Grover and shallow on shared settings.
pub fn default_comparison_configs() -> Vec<ExperimentConfig> {
    [
        ExperimentMethod::Haar,
        ExperimentMethod::Grover,
        ExperimentMethod::Shallow,
    ]
    .into_iter()
    .map(ExperimentConfig::for_method)
    .collect()
}

pub fn compare_methods(configs: &[ExperimentConfig]) -> Result<Comparison> {
    if configs.len() < 2 {
        return Err(Error::arg("comparison needs at least two configs"));
    }
    let first = configs[0].resolve()?;
    for (i, c) in configs.iter().enumerate().skip(1) {
        let r = c.resolve()?;
        if c.n_qubits != configs[0].n_qubits {
            return Err(Error::arg(format!("config {i}: n_qubits differs from config 0")));
        }
        if r.observable != first.observable {
            return Err(Error::arg(format!("config {i}: observable differs from config 0")));
        }
        if r.projector != first.projector {
            return Err(Error::arg(format!("config {i}: projector differs from config 0")));
        }
    }
    let reports = configs.iter().map(run_experiment).collect::<Result<Vec<_>>>()?;
    let rows = reports
        .iter()
        .map(|r| ComparisonRow {
            method: r.method,
            s_a: r.s_a,
            c_ab_projected: r.c_ab_projected,
            e_a: r.e_a,
        })
        .collect();
    Ok(Comparison { rows, reports })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse {
                input: s.into(),
                message: "expected csv or json".into(),
            }),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn report_record(r: &EstimateReport) -> [String; 9] {
    [
        r.method.to_string(),
        r.n_qubits.to_string(),
        opt(r.iterations),
        r.shots_used.to_string(),
        r.seed.to_string(),
        r.c_ab_projected.to_string(),
        r.c_ab_full.to_string(),
        r.s_a.to_string(),
        opt(r.e_a),
    ]
}

/// CSV text: the fixed header plus one row per report.
pub fn reports_to_csv<'a>(reports: impl IntoIterator<Item = &'a EstimateReport>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(REPORT_CSV_HEADER)?;
    for r in reports {
        w.write_record(report_record(r))?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?).expect("utf8"))
}

pub fn comparison_to_csv(c: &Comparison) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COMPARISON_CSV_HEADER)?;
    for row in &c.rows {
        w.write_record([
            row.method.to_string(),
            row.s_a.to_string(),
            row.c_ab_projected.to_string(),
            opt(row.e_a),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?).expect("utf8"))
}

/// `bitstring,count` rows, qubit `n-1` leftmost.
pub fn histogram_to_csv(h: &ShotHistogram) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bitstring", "count"])?;
    for (&z, &count) in &h.counts {
        w.write_record([h.bitstring(z), count.to_string()])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?).expect("utf8"))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Anything the harness can write as CSV or JSON.
pub enum Output<'a> {
    Report(&'a EstimateReport),
    Sweep(&'a SweepResult),
    Comparison(&'a Comparison),
    Histogram(&'a ShotHistogram),
}

impl Output<'_> {
    pub fn render(&self, format: Format) -> Result<String> {
        match (self, format) {
            (Output::Report(r), Format::Json) => Ok(to_json(r)),
            (Output::Report(r), Format::Csv) => reports_to_csv([*r]),
            (Output::Sweep(s), Format::Json) => Ok(to_json(s)),
            (Output::Sweep(s), Format::Csv) => reports_to_csv(s.points.iter().map(|p| &p.report)),
            (Output::Comparison(c), Format::Json) => Ok(to_json(c)),
            (Output::Comparison(c), Format::Csv) => comparison_to_csv(c),
            (Output::Histogram(h), Format::Json) => Ok(to_json(h)),
            (Output::Histogram(h), Format::Csv) => histogram_to_csv(h),
        }
    }
}

/// Writes `output` to `path` in `format`.
pub fn emit_outputs(output: Output<'_>, format: Format, path: &Path) -> Result<()> {
    let text = output.render(format)?;
    write_file(path, &text)
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(text.as_bytes()).map_err(io)
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_report_json(path: &Path) -> Result<EstimateReport> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(method: ExperimentMethod) -> ExperimentConfig {
        ExperimentConfig {
            shots: 0,
            ..ExperimentConfig::for_method(method)
        }
    }

    #[test]
    fn defaults_resolve() {
        let r = ExperimentConfig::default().resolve().unwrap();
        assert_eq!(r.config.oracle, Some(OracleKind::SignPositiveAndUp));
        assert_eq!(r.config.iterations, Some(1));
        assert!(!r.assumptions.is_empty());
    }

    #[test]
    fn validation_names_fields() {
        let mut c = ExperimentConfig {
            projector: "P_up@0".into(),
            ..Default::default()
        };
        match c.resolve() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "projector"),
            other => panic!("{other:?}"),
        }
        c.projector = DEFAULT_PROJECTOR.into();
        c.method = ExperimentMethod::Haar;
        c.iterations = Some(2);
        match c.resolve() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "iterations"),
            other => panic!("{other:?}"),
        }
        let bad = ExperimentConfig::from_json(r#"{"n_qubits": 4, "colour": 1}"#).unwrap_err();
        assert!(
            matches!(bad, Error::Config { ref field, .. } if field == "colour"),
            "{bad}"
        );
        assert_eq!(bad.exit_code(), 2);
    }

    #[test]
    fn degenerate_oracle_is_rejected() {
        let c = ExperimentConfig {
            n_qubits: 3,
            oracle: Some(OracleKind::Set(vec![])),
            ..Default::default()
        };
        let err = run_experiment(&c).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "oracle"));
    }

    #[test]
    fn reports_are_deterministic() {
        for m in [
            ExperimentMethod::Haar,
            ExperimentMethod::Grover,
            ExperimentMethod::Shallow,
        ] {
            let c = ExperimentConfig {
                n_qubits: 6,
                seed: 17,
                ..ExperimentConfig::for_method(m)
            };
            let a = run_experiment(&c).unwrap();
            let b = run_experiment(&c).unwrap();
            assert_eq!(to_json(&a), to_json(&b));
        }
    }

    #[test]
    fn echo_reruns_identically() {
        let c = ExperimentConfig {
            n_qubits: 6,
            seed: 5,
            noise: Some(NoiseParams::new(0.01, 0.02, 20).unwrap()),
            ..Default::default()
        };
        let r = run_experiment(&c).unwrap();
        let echoed: ExperimentConfig = serde_json::from_value(r.config_echo.clone()).unwrap();
        let again = run_experiment(&echoed).unwrap();
        // Defaults are explicit in the echo, so only the assumption notes differ.
        assert!(again.assumptions.len() < r.assumptions.len());
        assert_eq!(
            EstimateReport {
                assumptions: vec![],
                ..again
            },
            EstimateReport {
                assumptions: vec![],
                ..r
            }
        );
    }

    #[test]
    fn grover_exact_default_is_fully_peaked() {
        let r = run_experiment(&exact(ExperimentMethod::Grover)).unwrap();
        assert!((r.c_ab_projected - 1.0).abs() < 1e-9);
        assert_eq!(r.shots_used, ShotsUsed::Exact);
        assert_eq!(r.iterations, Some(1));
    }

    #[test]
    fn shot_report_carries_exact_reference() {
        let r = run_experiment(&ExperimentConfig {
            n_qubits: 6,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(r.shots_used, ShotsUsed::Shots(DEFAULT_SHOTS));
        let ex = r.exact.unwrap();
        assert!((r.c_ab_projected - ex.c_ab_projected).abs() < 0.05);
    }

    #[test]
    fn csv_header_and_rows() {
        let r = run_experiment(&exact(ExperimentMethod::Shallow)).unwrap();
        let text = reports_to_csv([&r]).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "method,n,T,shots,seed,c_ab_projected,c_ab_full,s_a,e_a"
        );
        assert!(lines.next().unwrap().starts_with("shallow,12,,exact,0,"));
        assert!(lines.next().is_none());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let r = run_experiment(&ExperimentConfig::for_method(ExperimentMethod::Haar)).unwrap();
        emit_outputs(Output::Report(&r), Format::Json, &path).unwrap();
        assert_eq!(read_report_json(&path).unwrap(), r);
    }

    #[test]
    fn sweep_shapes() {
        let c = exact(ExperimentMethod::Grover);
        let s = sweep_grover_iterations(&c, &(1..=10).collect::<Vec<_>>()).unwrap();
        assert_eq!(s.points.len(), 10);
        let csv = Output::Sweep(&s).render(Format::Csv).unwrap();
        assert_eq!(csv.lines().count(), 11);
        assert!(sweep_grover_iterations(&c, &[2, 1]).is_err());
        assert!(sweep_grover_iterations(&exact(ExperimentMethod::Haar), &[1]).is_err());
    }

    #[test]
    fn comparison_shapes() {
        let cfgs: Vec<_> = default_comparison_configs()
            .into_iter()
            .map(|c| ExperimentConfig { shots: 0, ..c })
            .collect();
        let cmp = compare_methods(&cfgs).unwrap();
        assert_eq!(cmp.rows.len(), 3);
        let csv = comparison_to_csv(&cmp).unwrap();
        assert_eq!(csv.lines().next().unwrap(), "method,s_a,c_ab_projected,e_a");
        assert!(compare_methods(&cfgs[..1]).is_err());
        let mut mismatched = cfgs.clone();
        mismatched[1].n_qubits = 8;
        assert!(compare_methods(&mismatched).is_err());
    }

    #[test]
    fn trajectory_mean_matches_report() {
        let c = ExperimentConfig {
            n_qubits: 5,
            shots: 0,
            noise: Some(NoiseParams::new(0.01, 0.05, 64).unwrap()),
            ..Default::default()
        };
        let t = trajectory_estimates(&c).unwrap();
        assert_eq!(t.per_trajectory.len(), 64);
        let r = run_experiment(&c).unwrap();
        assert!((t.mean.c_ab_projected - r.c_ab_projected).abs() < 1e-12);
        assert!(trajectory_estimates(&ExperimentConfig::default()).is_err());
    }

    #[test]
    fn io_errors_carry_path() {
        let err = read_report_json(Path::new("/nonexistent/dir/r.json")).unwrap_err();
        assert_eq!(err.exit_code(), 4);
        assert!(err.to_string().contains("/nonexistent/dir/r.json"));
    }
}
