//! Projected ITCF estimators and peakedness metrics.
//!
//! All estimators reduce to sums over a probability vector `p(z)`. The
//! projected weight is `w_z = p(z)` when the projector qubit reads 0 and 0
//! otherwise. With `a_z` the observable diagonal:
//!
//! * `c_ab_projected = Σ w_z a_z` (the unnormalized plotting convention)
//! * `c_ab_full = 2^{1-n} Σ w_z a_z - 2^{-n} Σ p(z) a_z`
//! * `s_a = Σ_{a_z ≠ 0} w_z`
//! * `e_a = Σ w_z a_z / Σ w_z |a_z|`

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::CircuitMetadata;
use crate::error::{Error, Result};
use crate::observables::{DiagonalObservable, UpProjector};
use crate::rng::derive_seed;
use crate::statevec::{haar_random_state, ShotHistogram, StateVector};

/// Largest register for exhaustive trace sums.
pub const MAX_EXACT_QUBITS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Haar,
    Grover,
    Shallow,
    Custom,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Haar => "haar",
            Method::Grover => "grover",
            Method::Shallow => "shallow",
            Method::Custom => "custom",
        })
    }
}

/// `"exact"` for amplitude-based values, otherwise the shot count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShotsUsed {
    Shots(u64),
    #[serde(with = "exact_tag")]
    Exact,
}

mod exact_tag {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("exact")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        match String::deserialize(d)?.as_str() {
            "exact" => Ok(()),
            other => Err(D::Error::custom(format!("expected \"exact\", got {other:?}"))),
        }
    }
}

impl std::fmt::Display for ShotsUsed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ShotsUsed::Shots(n) => write!(f, "{n}"),
            ShotsUsed::Exact => f.write_str("exact"),
        }
    }
}

/// Estimator values for one probability distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub c_ab_projected: f64,
    pub c_ab_full: f64,
    pub s_a: f64,
    /// `None` when the projected subspace carries no weight.
    pub e_a: Option<f64>,
    /// `<r|A|r> = Σ p(z) a_z`.
    pub expectation_a: f64,
    /// `Σ w_z |a_z|`, the denominator of `e_a`.
    pub abs_weight: f64,
}

/// Sizes of the sampled circuit before and after lowering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitSummary {
    pub metadata: CircuitMetadata,
    pub gate_count: usize,
    pub depth: usize,
    pub lowered_gate_count: Option<usize>,
    pub lowered_depth: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub method: Method,
    pub n_qubits: usize,
    /// Grover iteration count, when applicable.
    pub iterations: Option<u32>,
    pub shots_used: ShotsUsed,
    pub seed: u64,
    pub c_ab_projected: f64,
    pub c_ab_full: f64,
    pub s_a: f64,
    pub e_a: Option<f64>,
    pub expectation_a: f64,
    pub abs_weight: f64,
    /// Amplitude-exact values, present when the headline numbers are shot based.
    pub exact: Option<Metrics>,
    /// Sample variance of `c_ab_projected` across Haar states or trajectories.
    pub sample_variance: Option<f64>,
    pub samples: Option<u64>,
    pub circuit: Option<CircuitSummary>,
    /// Inputs needed to reproduce this report.
    pub config_echo: serde_json::Value,
    /// Defaults applied where no source value exists.
    pub assumptions: Vec<String>,
}

impl EstimateReport {
    pub fn from_metrics(method: Method, n_qubits: usize, shots_used: ShotsUsed, seed: u64, m: Metrics) -> Self {
        EstimateReport {
            method,
            n_qubits,
            iterations: None,
            shots_used,
            seed,
            c_ab_projected: m.c_ab_projected,
            c_ab_full: m.c_ab_full,
            s_a: m.s_a,
            e_a: m.e_a,
            expectation_a: m.expectation_a,
            abs_weight: m.abs_weight,
            exact: None,
            sample_variance: None,
            samples: None,
            circuit: None,
            config_echo: serde_json::Value::Null,
            assumptions: Vec::new(),
        }
    }

    pub fn metrics(&self) -> Metrics {
        Metrics {
            c_ab_projected: self.c_ab_projected,
            c_ab_full: self.c_ab_full,
            s_a: self.s_a,
            e_a: self.e_a,
            expectation_a: self.expectation_a,
            abs_weight: self.abs_weight,
        }
    }
}

fn check_pair(n_qubits: usize, obs: &DiagonalObservable, proj: UpProjector) -> Result<()> {
    if obs.n_qubits() != n_qubits {
        return Err(Error::arg(format!(
            "observable has {} qubits, state has {n_qubits}",
            obs.n_qubits()
        )));
    }
    proj.check_disjoint(obs)
}

fn check_state(state: &StateVector) -> Result<()> {
    if state.is_projected() {
        return Err(Error::Contract(
            "estimators take the unprojected state; the projector is applied internally".into(),
        ));
    }
    state.check_normalized()
}

/// All metrics for a distribution over `2^n` basis states.
pub fn metrics_from_probabilities(
    probabilities: &[f64],
    obs: &DiagonalObservable,
    proj: UpProjector,
) -> Result<Metrics> {
    let n = obs.n_qubits();
    if probabilities.len() != 1 << n {
        return Err(Error::arg("distribution length does not match observable"));
    }
    check_pair(n, obs, proj)?;
    let (mut signed, mut absolute, mut overlap, mut expectation) = (0.0, 0.0, 0.0, 0.0);
    for (z, &p) in probabilities.iter().enumerate() {
        let a = obs.value(z);
        expectation += p * a;
        if proj.passes(z) {
            signed += p * a;
            absolute += p * a.abs();
            if a != 0.0 {
                overlap += p;
            }
        }
    }
    let dim = (1u64 << n) as f64;
    Ok(Metrics {
        c_ab_projected: signed,
        c_ab_full: 2.0 * signed / dim - expectation / dim,
        s_a: overlap,
        e_a: (absolute > 0.0).then(|| signed / absolute),
        expectation_a: expectation,
        abs_weight: absolute,
    })
}

pub fn state_metrics(state: &StateVector, obs: &DiagonalObservable, proj: UpProjector) -> Result<Metrics> {
    check_state(state)?;
    metrics_from_probabilities(&state.probabilities(), obs, proj)
}

/// `w_z = |<z|P↑|r>|²`.
pub fn projected_weights(state: &StateVector, proj: UpProjector) -> Result<Vec<f64>> {
    check_state(state)?;
    proj.validate(state.n_qubits())?;
    Ok(state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(z, a)| if proj.passes(z) { a.norm_sqr() } else { 0.0 })
        .collect())
}

/// `Σ_z w_z a_z`.
pub fn itcf_projected(state: &StateVector, obs: &DiagonalObservable, proj: UpProjector) -> Result<f64> {
    Ok(state_metrics(state, obs, proj)?.c_ab_projected)
}

/// `2^{1-n}·itcf_projected - 2^{-n}·<r|A|r>`.
pub fn itcf_full(state: &StateVector, obs: &DiagonalObservable, proj: UpProjector) -> Result<f64> {
    Ok(state_metrics(state, obs, proj)?.c_ab_full)
}

pub fn support_overlap(state: &StateVector, obs: &DiagonalObservable, proj: UpProjector) -> Result<f64> {
    Ok(state_metrics(state, obs, proj)?.s_a)
}

pub fn biased_ratio(state: &StateVector, obs: &DiagonalObservable, proj: UpProjector) -> Result<f64> {
    state_metrics(state, obs, proj)?
        .e_a
        .ok_or_else(|| Error::UndefinedRatio("state has no weight inside the projected subspace".into()))
}

/// `2^{-n} Tr(A (2P↑ - I))` by exhaustive sum. Overlapping supports are allowed.
pub fn exact_trace_itcf(obs: &DiagonalObservable, proj: UpProjector, n_qubits: usize) -> Result<f64> {
    if n_qubits == 0 || n_qubits > MAX_EXACT_QUBITS {
        return Err(Error::Capacity {
            what: "qubit count for exact trace",
            min: 1,
            max: MAX_EXACT_QUBITS,
            got: n_qubits,
        });
    }
    if obs.n_qubits() != n_qubits {
        return Err(Error::arg("observable size does not match n"));
    }
    proj.validate(n_qubits)?;
    let dim = 1usize << n_qubits;
    let sum: f64 = (0..dim)
        .map(|z| obs.value(z) * if proj.passes(z) { 1.0 } else { -1.0 })
        .sum();
    Ok(sum / dim as f64)
}

/// Estimates from empirical frequencies `counts_z / total`.
pub fn shot_estimates(hist: &ShotHistogram, obs: &DiagonalObservable, proj: UpProjector) -> Result<EstimateReport> {
    if hist.total_shots == 0 {
        return Err(Error::arg("histogram has no shots"));
    }
    let m = metrics_from_probabilities(&hist.frequencies(), obs, proj)?;
    Ok(EstimateReport::from_metrics(
        Method::Custom,
        hist.n_qubits,
        ShotsUsed::Shots(hist.total_shots),
        hist.seed.unwrap_or(0),
        m,
    ))
}

/// Per-sample values behind a Haar average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarSeries {
    pub seeds: Vec<u64>,
    pub samples: Vec<Metrics>,
}

impl HaarSeries {
    pub fn projected(&self) -> Vec<f64> {
        self.samples.iter().map(|m| m.c_ab_projected).collect()
    }

    pub fn expectation(&self) -> Vec<f64> {
        self.samples.iter().map(|m| m.expectation_a).collect()
    }
}

/// Sample mean and unbiased sample variance (`None` below two samples).
pub fn mean_and_variance(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = (xs.len() > 1).then(|| xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0));
    (mean, var)
}

/// Averages metrics over equally weighted samples. `e_a` is the ratio of
/// the averaged numerator and denominator, so `e_a·s_a = c_ab` still holds
/// for ±1 observables.
pub fn average_metrics(samples: &[Metrics]) -> Metrics {
    let n = samples.len() as f64;
    let avg = |f: fn(&Metrics) -> f64| samples.iter().map(f).sum::<f64>() / n;
    let c = avg(|m| m.c_ab_projected);
    let denom = avg(|m| m.abs_weight);
    Metrics {
        c_ab_projected: c,
        c_ab_full: avg(|m| m.c_ab_full),
        s_a: avg(|m| m.s_a),
        e_a: (denom > 0.0).then(|| c / denom),
        expectation_a: avg(|m| m.expectation_a),
        abs_weight: denom,
    }
}

/// Mean estimator over `num_states` Haar states with seeds derived from `seed`.
pub fn haar_average_itcf(
    n_qubits: usize,
    obs: &DiagonalObservable,
    proj: UpProjector,
    num_states: u64,
    seed: u64,
) -> Result<(EstimateReport, HaarSeries)> {
    if num_states == 0 {
        return Err(Error::arg("need at least one Haar state"));
    }
    check_pair(n_qubits, obs, proj)?;
    let seeds: Vec<u64> = (0..num_states).map(|i| derive_seed(seed, i)).collect();
    let samples = seeds
        .par_iter()
        .map(|&s| state_metrics(&haar_random_state(n_qubits, s)?, obs, proj))
        .collect::<Result<Vec<_>>>()?;
    let series = HaarSeries { seeds, samples };
    let mean = average_metrics(&series.samples);
    let mut report = EstimateReport::from_metrics(Method::Haar, n_qubits, ShotsUsed::Exact, seed, mean);
    report.sample_variance = mean_and_variance(&series.projected()).1;
    report.samples = Some(num_states);
    Ok((report, series))
}
