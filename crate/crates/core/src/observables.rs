//! Diagonal observables, the up-projector, and phase-oracle predicates.
//!
//! Basis indices are little-endian: bit `i` of `z` is the value of qubit `i`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::MAX_QUBITS;

#[inline]
pub(crate) fn bit(z: usize, qubit: usize) -> bool {
    (z >> qubit) & 1 == 1
}

fn check_register(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Capacity {
            what: "qubit count",
            min: 1,
            max: MAX_QUBITS,
            got: n_qubits,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Diagonal {
    /// Product of Pauli-Z on `support`; identity when empty.
    ZString { mask: u64 },
    /// Arbitrary real diagonal, one value per basis state.
    Dense { values: Vec<f64> },
}

/// An observable that is diagonal in the computational basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalObservable {
    n_qubits: usize,
    support: Vec<usize>,
    diagonal: Diagonal,
}

impl DiagonalObservable {
    /// Pauli-Z string on `support`. `a_z = (-1)^(parity of the supported bits)`.
    pub fn zstring(n_qubits: usize, support: &[usize]) -> Result<Self> {
        check_register(n_qubits)?;
        let mut sorted: Vec<usize> = support.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != support.len() {
            return Err(Error::arg(format!("duplicate qubit in support {support:?}")));
        }
        if let Some(&q) = sorted.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::arg(format!(
                "support qubit {q} out of range for {n_qubits} qubits"
            )));
        }
        let mask = sorted.iter().fold(0u64, |m, &q| m | (1 << q));
        Ok(DiagonalObservable {
            n_qubits,
            support: sorted,
            diagonal: Diagonal::ZString { mask },
        })
    }

    /// General real diagonal. Its support is the set of qubits the values
    /// actually depend on.
    pub fn from_diagonal(n_qubits: usize, values: Vec<f64>) -> Result<Self> {
        check_register(n_qubits)?;
        if values.len() != 1 << n_qubits {
            return Err(Error::arg(format!(
                "diagonal has {} entries, expected {}",
                values.len(),
                1usize << n_qubits
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("diagonal contains a non-finite value"));
        }
        let support = (0..n_qubits)
            .filter(|&q| (0..values.len()).any(|z| values[z] != values[z ^ (1 << q)]))
            .collect();
        Ok(DiagonalObservable {
            n_qubits,
            support,
            diagonal: Diagonal::Dense { values },
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn is_zstring(&self) -> bool {
        matches!(self.diagonal, Diagonal::ZString { .. })
    }

    /// True when every diagonal entry is ±1.
    pub fn is_unit_valued(&self) -> bool {
        match &self.diagonal {
            Diagonal::ZString { .. } => true,
            Diagonal::Dense { values } => values.iter().all(|v| v.abs() == 1.0),
        }
    }

    /// `a_z` without bounds checking beyond the slice access.
    #[inline]
    pub fn value(&self, z: usize) -> f64 {
        match &self.diagonal {
            Diagonal::ZString { mask } => {
                if (z as u64 & mask).count_ones().is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            }
            Diagonal::Dense { values } => values[z],
        }
    }

    pub fn diag_value(&self, z: usize) -> Result<f64> {
        if z >= 1 << self.n_qubits {
            return Err(Error::arg(format!(
                "basis index {z} out of range for {} qubits",
                self.n_qubits
            )));
        }
        Ok(self.value(z))
    }

    pub fn materialize(&self) -> Vec<f64> {
        (0..1usize << self.n_qubits).map(|z| self.value(z)).collect()
    }

    /// Textual form, e.g. `Z@[0,2,4]`. Dense observables render as `diag[..]`.
    pub fn spec(&self) -> String {
        match &self.diagonal {
            Diagonal::ZString { .. } => format!("Z@{}", index_list(&self.support)),
            Diagonal::Dense { .. } => format!("diag{}", index_list(&self.support)),
        }
    }
}

fn index_list(items: &[usize]) -> String {
    let inner: Vec<String> = items.iter().map(|q| q.to_string()).collect();
    format!("[{}]", inner.join(","))
}

/// Single-qubit projector `|0><0|` on `qubit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpProjector {
    pub qubit: usize,
}

impl UpProjector {
    pub fn new(qubit: usize) -> Self {
        UpProjector { qubit }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.qubit >= n_qubits {
            return Err(Error::arg(format!(
                "projector qubit {} out of range for {n_qubits} qubits",
                self.qubit
            )));
        }
        Ok(())
    }

    /// Checks that the projector acts outside the observable's support.
    pub fn check_disjoint(&self, obs: &DiagonalObservable) -> Result<()> {
        self.validate(obs.n_qubits())?;
        if obs.support().contains(&self.qubit) {
            return Err(Error::arg(format!(
                "projector qubit {} overlaps observable support {:?}",
                self.qubit,
                obs.support()
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn passes(&self, z: usize) -> bool {
        !bit(z, self.qubit)
    }

    pub fn spec(&self) -> String {
        format!("P_up@{}", self.qubit)
    }
}

/// Requires qubit `qubit` to read `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitConstraint {
    pub qubit: usize,
    pub value: bool,
}

/// Boolean predicate over basis states, used by phase oracles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OraclePredicate {
    /// `a_z > 0` (Heaviside step of the diagonal, with Θ(0) = 0).
    SignPositive {
        observable: DiagonalObservable,
    },
    /// `a_z > 0` and the projector qubit reads 0.
    SignPositiveAndUp {
        observable: DiagonalObservable,
        projector: UpProjector,
    },
    ExplicitSet {
        marked: Vec<usize>,
    },
    Conjunction {
        constraints: Vec<BitConstraint>,
    },
}

/// Heaviside oracle `f(z) = Θ(a_z)`.
pub fn heaviside_oracle(obs: &DiagonalObservable) -> Result<OraclePredicate> {
    if obs.support().is_empty() {
        return Err(Error::arg(
            "observable has empty support: every basis state would be marked, \
             so amplitude amplification has nothing to amplify",
        ));
    }
    Ok(OraclePredicate::SignPositive {
        observable: obs.clone(),
    })
}

/// Marks `a_z > 0` together with the projector bit reading 0.
pub fn conjoined_oracle(obs: &DiagonalObservable, proj: UpProjector) -> Result<OraclePredicate> {
    proj.check_disjoint(obs)?;
    Ok(OraclePredicate::SignPositiveAndUp {
        observable: obs.clone(),
        projector: proj,
    })
}

pub fn explicit_oracle(marked: &[usize]) -> OraclePredicate {
    let set: BTreeSet<usize> = marked.iter().copied().collect();
    OraclePredicate::ExplicitSet {
        marked: set.into_iter().collect(),
    }
}

pub fn conjunction_oracle(constraints: &[BitConstraint]) -> Result<OraclePredicate> {
    let mut seen = BTreeSet::new();
    for c in constraints {
        if !seen.insert(c.qubit) {
            return Err(Error::arg(format!("qubit {} constrained more than once", c.qubit)));
        }
    }
    let mut constraints = constraints.to_vec();
    constraints.sort_by_key(|c| c.qubit);
    Ok(OraclePredicate::Conjunction { constraints })
}

impl OraclePredicate {
    pub fn id(&self) -> String {
        match self {
            OraclePredicate::SignPositive { observable } => {
                format!("sign_positive({})", observable.spec())
            }
            OraclePredicate::SignPositiveAndUp { observable, projector } => {
                format!("sign_positive_and_up({},{})", observable.spec(), projector.spec())
            }
            OraclePredicate::ExplicitSet { marked } => format!("set:{}", index_list(marked)),
            OraclePredicate::Conjunction { constraints } => {
                let parts: Vec<String> = constraints
                    .iter()
                    .map(|c| format!("{}={}", c.qubit, c.value as u8))
                    .collect();
                format!("bits:[{}]", parts.join(","))
            }
        }
    }

    #[inline]
    pub fn marks(&self, z: usize) -> bool {
        match self {
            OraclePredicate::SignPositive { observable } => observable.value(z) > 0.0,
            OraclePredicate::SignPositiveAndUp { observable, projector } => {
                projector.passes(z) && observable.value(z) > 0.0
            }
            OraclePredicate::ExplicitSet { marked } => marked.binary_search(&z).is_ok(),
            OraclePredicate::Conjunction { constraints } => constraints.iter().all(|c| bit(z, c.qubit) == c.value),
        }
    }

    /// Checks that every index the predicate refers to fits in `n_qubits`.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let mismatch = |obs: &DiagonalObservable| {
            if obs.n_qubits() != n_qubits {
                Err(Error::arg(format!(
                    "predicate observable has {} qubits, circuit has {n_qubits}",
                    obs.n_qubits()
                )))
            } else {
                Ok(())
            }
        };
        match self {
            OraclePredicate::SignPositive { observable } => mismatch(observable),
            OraclePredicate::SignPositiveAndUp { observable, projector } => {
                mismatch(observable)?;
                projector.check_disjoint(observable)
            }
            OraclePredicate::ExplicitSet { marked } => match marked.last() {
                Some(&z) if z >= 1 << n_qubits => Err(Error::arg(format!(
                    "marked index {z} out of range for {n_qubits} qubits"
                ))),
                _ => Ok(()),
            },
            OraclePredicate::Conjunction { constraints } => match constraints.iter().find(|c| c.qubit >= n_qubits) {
                Some(c) => Err(Error::arg(format!(
                    "constraint qubit {} out of range for {n_qubits} qubits",
                    c.qubit
                ))),
                None => Ok(()),
            },
        }
    }

    /// Exact number of marked basis states in an `n_qubits` register.
    pub fn marked_count(&self, n_qubits: usize) -> u64 {
        let space = 1u64 << n_qubits;
        match self {
            OraclePredicate::SignPositive { observable } if observable.is_zstring() => {
                if observable.support().is_empty() {
                    space
                } else {
                    space / 2
                }
            }
            OraclePredicate::SignPositiveAndUp { observable, projector }
                if observable.is_zstring() && !observable.support().contains(&projector.qubit) =>
            {
                if observable.support().is_empty() {
                    space / 2
                } else {
                    space / 4
                }
            }
            OraclePredicate::ExplicitSet { marked } => marked.iter().filter(|&&z| (z as u64) < space).count() as u64,
            OraclePredicate::Conjunction { constraints } => space >> constraints.len(),
            _ => (0..1usize << n_qubits).filter(|&z| self.marks(z)).count() as u64,
        }
    }

    pub fn marked_set(&self, n_qubits: usize) -> Vec<usize> {
        (0..1usize << n_qubits).filter(|&z| self.marks(z)).collect()
    }
}

impl fmt::Display for OraclePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

fn parse_err(input: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        input: input.to_string(),
        message: message.into(),
    }
}

fn parse_list<T, F>(input: &str, body: &str, mut item: F) -> Result<Vec<T>>
where
    F: FnMut(&str) -> Option<T>,
{
    let inner = body
        .strip_prefix('[')
        .and_then(|b| b.strip_suffix(']'))
        .ok_or_else(|| parse_err(input, "expected a bracketed list"))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|tok| item(tok.trim()).ok_or_else(|| parse_err(input, format!("bad list item `{tok}`"))))
        .collect()
}

/// Parses `Z@[0,2,4]` into the qubit support list.
pub fn parse_zstring(input: &str) -> Result<Vec<usize>> {
    let body = input
        .trim()
        .strip_prefix("Z@")
        .ok_or_else(|| parse_err(input, "expected `Z@[...]`"))?;
    parse_list(input, body, |t| t.parse().ok())
}

/// Parses `P_up@5`.
pub fn parse_projector(input: &str) -> Result<UpProjector> {
    let body = input
        .trim()
        .strip_prefix("P_up@")
        .ok_or_else(|| parse_err(input, "expected `P_up@<qubit>`"))?;
    body.parse()
        .map(UpProjector::new)
        .map_err(|_| parse_err(input, "projector qubit must be a nonnegative integer"))
}

/// Oracle selection as written in configs; resolved against an observable
/// and projector by [`OracleKind::resolve`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum OracleKind {
    SignPositive,
    SignPositiveAndUp,
    Set(Vec<usize>),
    Bits(Vec<BitConstraint>),
}

impl OracleKind {
    pub fn resolve(&self, obs: &DiagonalObservable, proj: UpProjector) -> Result<OraclePredicate> {
        match self {
            OracleKind::SignPositive => heaviside_oracle(obs),
            OracleKind::SignPositiveAndUp => conjoined_oracle(obs, proj),
            OracleKind::Set(marked) => Ok(explicit_oracle(marked)),
            OracleKind::Bits(constraints) => conjunction_oracle(constraints),
        }
    }
}

impl FromStr for OracleKind {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let s = input.trim();
        let s = s.strip_prefix("oracle=").unwrap_or(s);
        match s {
            "sign_positive" => return Ok(OracleKind::SignPositive),
            "sign_positive_and_up" => return Ok(OracleKind::SignPositiveAndUp),
            _ => {}
        }
        if let Some(body) = s.strip_prefix("set:") {
            return parse_list(input, body, |t| t.parse().ok()).map(OracleKind::Set);
        }
        if let Some(body) = s.strip_prefix("bits:") {
            return parse_list(input, body, |t| {
                let (q, v) = t.split_once('=')?;
                let value = match v.trim() {
                    "0" => false,
                    "1" => true,
                    _ => return None,
                };
                Some(BitConstraint {
                    qubit: q.trim().parse().ok()?,
                    value,
                })
            })
            .map(OracleKind::Bits);
        }
        Err(parse_err(
            input,
            "expected sign_positive | sign_positive_and_up | set:[...] | bits:[q=v,...]",
        ))
    }
}

impl TryFrom<String> for OracleKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<OracleKind> for String {
    fn from(k: OracleKind) -> String {
        k.to_string()
    }
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleKind::SignPositive => f.write_str("sign_positive"),
            OracleKind::SignPositiveAndUp => f.write_str("sign_positive_and_up"),
            OracleKind::Set(m) => write!(f, "set:{}", index_list(m)),
            OracleKind::Bits(c) => {
                let parts: Vec<String> = c.iter().map(|c| format!("{}={}", c.qubit, c.value as u8)).collect();
                write!(f, "bits:[{}]", parts.join(","))
            }
        }
    }
}
