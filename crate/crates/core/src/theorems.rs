//! Theorem-level checkers producing replayable [`Certificate`]s.
//!
//! * [`certify_time_symmetry_violation`] searches every bijection of the
//!   ontic space for an ontological time reverse of a self-reversing
//!   experiment, and separately reports the marginal-dependence argument
//!   that rules one out.
//! * [`verify_measurement_independence`] replays, step by step, the
//!   derivation that an ontological time reverse forces the ontic state to
//!   be independent of both setting choices.
//! * [`check_preparation_noncontextuality`] tests whether the ontic
//!   distribution averaged over the preparation output depends on the
//!   preparation input.
//! * [`chsh_value`] computes the CHSH combination of correlators.

#![allow(clippy::needless_range_loop)]

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::check::Conditional;
use crate::error::{Error, Result};
use crate::numerics::{sum_in, Scalar, Tolerance};
use crate::ontological::{
    bayesian_inversion, check_ontological_time_reverse, joint, search_time_reverse_bijection,
    Bijection, OntModel, OnticLabel, SearchOptions,
};
use crate::operational::{self, Experiment};
use crate::quantum::{MINUS, PLUS};

/// Groups ontic states into the keys of a marginal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Projector {
    /// Keep the whole ontic state.
    Identity,
    /// Keep the listed components of a structured state, e.g. `[0]` maps
    /// `[λ₁, λ₂]` to `λ₁`.
    Components(Vec<usize>),
}

impl Projector {
    pub fn first() -> Projector {
        Projector::Components(vec![0])
    }

    pub fn key(&self, label: &OnticLabel) -> String {
        match self {
            Projector::Identity => label.to_string(),
            Projector::Components(keep) => {
                let parts: Vec<&str> = keep
                    .iter()
                    .filter_map(|&i| label.components().get(i).map(String::as_str))
                    .collect();
                if parts.len() == 1 {
                    parts[0].to_string()
                } else {
                    format!("[{}]", parts.join(","))
                }
            }
        }
    }
}

/// `g(k, x, y) = Σ_{a, b} Σ_{λ ↦ k} p(a, b, λ | x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalFunction {
    keys: Vec<String>,
    x_labels: Vec<String>,
    y_labels: Vec<String>,
    values: Vec<Scalar>,
}

impl MarginalFunction {
    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn value(&self, key: usize, x: usize, y: usize) -> &Scalar {
        &self.values[(key * self.x_labels.len() + x) * self.y_labels.len() + y]
    }

    pub fn get(&self, key: &str, x: &str, y: &str) -> Option<&Scalar> {
        let k = self.keys.iter().position(|s| s == key)?;
        let x = self.x_labels.iter().position(|s| s == x)?;
        let y = self.y_labels.iter().position(|s| s == y)?;
        Some(self.value(k, x, y))
    }

    /// `(key, x, y, value)` for every entry in key-major order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, &str, &Scalar)> {
        let (nx, ny) = (self.x_labels.len(), self.y_labels.len());
        self.values.iter().enumerate().map(move |(i, v)| {
            let k = i / (nx * ny);
            let x = (i / ny) % nx;
            let y = i % ny;
            (
                self.keys[k].as_str(),
                self.x_labels[x].as_str(),
                self.y_labels[y].as_str(),
                v,
            )
        })
    }
}

pub fn marginal_g(m: &OntModel, projector: &Projector) -> MarginalFunction {
    let sig = m.experiment().signature();
    let mut keys: Vec<String> = Vec::new();
    let mut key_of = Vec::with_capacity(m.lambda().len());
    for label in m.lambda().labels() {
        let k = projector.key(label);
        let idx = match keys.iter().position(|s| *s == k) {
            Some(i) => i,
            None => {
                keys.push(k);
                keys.len() - 1
            }
        };
        key_of.push(idx);
    }
    let j = joint(m);
    let (nx, ny) = (sig.x.len(), sig.y.len());
    let mut values = vec![Scalar::zero(m.mode()); keys.len() * nx * ny];
    for (l, &k) in key_of.iter().enumerate() {
        for x in 0..nx {
            for y in 0..ny {
                let slot = &mut values[(k * nx + x) * ny + y];
                *slot = &*slot + &j.ontic_given_settings(l, x, y);
            }
        }
    }
    MarginalFunction {
        keys,
        x_labels: sig.x.labels().to_vec(),
        y_labels: sig.y.labels().to_vec(),
        values,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CertificateKind {
    /// Every bijection of the ontic space was refuted.
    ViolationExhaustive,
    /// At least one ontological time reverse was found.
    TimeReverseFound,
    /// All steps of the independence derivation checked out.
    LemmaVerified,
    /// Some step of the independence derivation failed.
    LemmaRefuted,
    Noncontextual,
    Contextual,
    #[serde(rename = "CHSH")]
    Chsh,
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CertificateKind::ViolationExhaustive => "ViolationExhaustive",
            CertificateKind::TimeReverseFound => "TimeReverseFound",
            CertificateKind::LemmaVerified => "LemmaVerified",
            CertificateKind::LemmaRefuted => "LemmaRefuted",
            CertificateKind::Noncontextual => "Noncontextual",
            CertificateKind::Contextual => "Contextual",
            CertificateKind::Chsh => "CHSH",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Informational; neither supports nor refutes the verdict.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Step {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Step {
    fn new(name: &str, status: Status, witness: Option<String>) -> Step {
        Step {
            name: name.to_string(),
            status,
            witness,
        }
    }
}

/// A machine-checkable verdict.
///
/// `scalars` holds canonical scalar strings and counts, keyed by name, so the
/// serialized form is stable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub inputs: Vec<String>,
    pub steps: Vec<Step>,
    pub scalars: BTreeMap<String, String>,
}

impl Certificate {
    pub fn step(&self, name: &str) -> Option<&Step> {
        self.steps.iter().find(|s| s.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.steps.iter().all(|s| s.status != Status::Fail)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("certificate serializes")
    }
}

fn ontic_given_settings_table(m: &OntModel) -> Vec<Vec<Vec<Scalar>>> {
    let j = joint(m);
    let sig = m.experiment().signature();
    (0..m.lambda().len())
        .map(|l| {
            (0..sig.x.len())
                .map(|x| {
                    (0..sig.y.len())
                        .map(|y| j.ontic_given_settings(l, x, y))
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Runs the exhaustive bijection search of `m` against itself.
///
/// Requires the experiment to be its own operational time reverse. An empty
/// search result yields [`CertificateKind::ViolationExhaustive`]; otherwise the
/// certificate lists the witnesses. Independently of the search, a
/// `marginal_dependence` step records settings at which `p(λ | x, y)` varies
/// with `x`: any reverse would need `p(λ | x, y) = p(f(λ) | y, x)`, and the
/// right side never depends on `x` because the measurement cannot influence
/// the ontic state.
pub fn certify_time_symmetry_violation(m: &OntModel, opts: SearchOptions) -> Result<Certificate> {
    let e = m.experiment();
    let tol = opts.tolerance;
    match operational::check_time_reverse_pair(e, e, tol) {
        Ok(_) => {}
        Err(failure) => return Err(Error::NotSelfReverse(failure.to_string())),
    }
    let search = search_time_reverse_bijection(m, m, opts)?;

    let mut steps = vec![Step::new("operational_self_reverse", Status::Pass, None)];
    let mut scalars = BTreeMap::new();
    scalars.insert("bijections_total".into(), search.total.to_string());
    scalars.insert("bijections_refuted".into(), search.refuted().to_string());
    scalars.insert("bijections_pruned".into(), search.pruned.to_string());
    scalars.insert("bijections_checked".into(), search.checked.to_string());

    let kind = if search.found.is_empty() {
        steps.push(Step::new(
            "exhaustive_bijection_search",
            Status::Pass,
            Some(format!(
                "{} of {} bijections refuted ({} by marginal pruning, {} by full check)",
                search.refuted(),
                search.total,
                search.pruned,
                search.checked
            )),
        ));
        CertificateKind::ViolationExhaustive
    } else {
        let listed = search
            .found
            .iter()
            .map(|f| {
                if f.is_identity() {
                    "identity".to_string()
                } else {
                    f.to_string()
                }
            })
            .join("; ");
        steps.push(Step::new(
            "exhaustive_bijection_search",
            Status::Fail,
            Some(listed),
        ));
        CertificateKind::TimeReverseFound
    };

    // p(λ | x, y) varying with x at fixed y
    let table = ontic_given_settings_table(m);
    let sig = e.signature();
    let mut dependence = None;
    'outer: for (l, per_x) in table.iter().enumerate() {
        for y in 0..sig.y.len() {
            for x in 1..sig.x.len() {
                if !per_x[x][y].same(&per_x[0][y], tol) {
                    dependence = Some(format!(
                        "p(λ={} | x={}, y={}) = {} but p(λ={} | x={}, y={}) = {}; a reverse needs \
                         p(λ | x, y) = p(f(λ) | y, x), which cannot vary with x",
                        m.lambda().label(l),
                        sig.x.label(0),
                        sig.y.label(y),
                        per_x[0][y],
                        m.lambda().label(l),
                        sig.x.label(x),
                        sig.y.label(y),
                        per_x[x][y],
                    ));
                    break 'outer;
                }
            }
        }
    }
    steps.push(match dependence {
        Some(w) => Step::new("marginal_dependence", Status::Pass, Some(w)),
        None => Step::new(
            "marginal_dependence",
            Status::Info,
            Some("p(λ | x, y) does not depend on x".into()),
        ),
    });

    if m.lambda()
        .labels()
        .iter()
        .all(|l| l.components().len() >= 2)
    {
        let g = marginal_g(m, &Projector::first());
        for (k, x, y, v) in g.entries() {
            scalars.insert(format!("g({k}, x={x}, y={y})"), v.to_string());
        }
    }

    Ok(Certificate {
        kind,
        inputs: vec![e.name().to_string()],
        steps,
        scalars,
    })
}

/// Re-derives the verdict of a time-symmetry certificate by brute force:
/// every permutation of the ontic space is checked cell by cell, with no
/// pruning. Returns whether the recomputed counts and verdict match.
pub fn replay_time_symmetry(m: &OntModel, cert: &Certificate, tol: Tolerance) -> Result<bool> {
    let n = m.lambda().len();
    let mut found = 0u128;
    let mut total = 0u128;
    for perm in (0..n).permutations(n) {
        total += 1;
        let f = Bijection::new(m.lambda().clone(), m.lambda().clone(), perm)?;
        if check_ontological_time_reverse(m, m, &f, tol)?.holds() {
            found += 1;
        }
    }
    let expected_kind = if found == 0 {
        CertificateKind::ViolationExhaustive
    } else {
        CertificateKind::TimeReverseFound
    };
    Ok(cert.kind == expected_kind
        && cert.scalars.get("bijections_total") == Some(&total.to_string())
        && cert.scalars.get("bijections_refuted") == Some(&(total - found).to_string()))
}

/// Replays the derivation that an ontological time reverse forces
/// `p(λ | x, y) = p(λ)`.
///
/// Steps, each checked on every cell:
/// 1. `CI1`: `Σ_{a,b} p₁(a, b, λ | x, y) = p₁(λ | x)`, with `p₁(λ | x)`
///    taken from the Bayesian inversion of the preparation, whose identity
///    `p(λ | a, x) p(a | x) = p(a | λ, x) p(λ | x)` is checked too.
/// 2. `CI2`: the same for the partner at `(f(λ), y, x)`.
/// 3. `LTR`: `p₁(λ | x, y) = p₂(f(λ) | y, x)`.
/// 4. `MI`: `p₁(λ | x, y)` equals one value `p(λ)` for all settings.
///
/// Fails with `PreconditionFailed` when `(m1, m2, f)` is not an ontological
/// time reverse.
pub fn verify_measurement_independence(
    m1: &OntModel,
    m2: &OntModel,
    f: &Bijection,
    tol: Tolerance,
) -> Result<Certificate> {
    let outcome = check_ontological_time_reverse(m1, m2, f, tol)
        .map_err(|e| Error::PreconditionFailed(e.to_string()))?;
    if let Some(mm) = outcome.mismatch() {
        return Err(Error::PreconditionFailed(format!(
            "not an ontological time reverse: {mm}"
        )));
    }
    let sig1 = m1.experiment().signature();
    let (nx, ny, nl) = (sig1.x.len(), sig1.y.len(), m1.lambda().len());
    let t1 = ontic_given_settings_table(m1);
    let t2 = ontic_given_settings_table(m2);

    let ci1 = conditional_independence(m1, &t1, tol);
    let ci2 = conditional_independence(m2, &t2, tol).map(|w| format!("partner: {w}"));

    let mut ltr = None;
    'ltr: for l in 0..nl {
        for x in 0..nx {
            for y in 0..ny {
                let left = &t1[l][x][y];
                let right = &t2[f.apply(l)][y][x];
                if !left.same(right, tol) {
                    ltr = Some(format!(
                        "p(λ={} | x={}, y={}) = {left} but p'(f(λ) | y, x) = {right}",
                        m1.lambda().label(l),
                        sig1.x.label(x),
                        sig1.y.label(y)
                    ));
                    break 'ltr;
                }
            }
        }
    }

    let mut mi = None;
    'mi: for (l, per_x) in t1.iter().enumerate() {
        for (x, per_y) in per_x.iter().enumerate() {
            for (y, v) in per_y.iter().enumerate() {
                if !v.same(&per_x[0][0], tol) {
                    mi = Some(format!(
                        "p(λ={} | x={}, y={}) = {v} differs from p(λ) = {}",
                        m1.lambda().label(l),
                        sig1.x.label(x),
                        sig1.y.label(y),
                        per_x[0][0]
                    ));
                    break 'mi;
                }
            }
        }
    }

    let status = |w: &Option<String>| {
        if w.is_none() {
            Status::Pass
        } else {
            Status::Fail
        }
    };
    let steps = vec![
        Step::new("CI1", status(&ci1), ci1.clone()),
        Step::new("CI2", status(&ci2), ci2.clone()),
        Step::new("LTR", status(&ltr), ltr.clone()),
        Step::new("MI", status(&mi), mi.clone()),
    ];
    let all = steps.iter().all(|s| s.status == Status::Pass);
    let mut scalars = BTreeMap::new();
    for l in 0..nl {
        scalars.insert(
            format!("p(λ={})", m1.lambda().label(l)),
            t1[l][0][0].to_string(),
        );
    }
    Ok(Certificate {
        kind: if all {
            CertificateKind::LemmaVerified
        } else {
            CertificateKind::LemmaRefuted
        },
        inputs: vec![
            m1.experiment().name().to_string(),
            m2.experiment().name().to_string(),
            f.to_string(),
        ],
        steps,
        scalars,
    })
}

/// First cell where `Σ_{a,b} p(a, b, λ | x, y) ≠ p(λ | x)` or where the
/// Bayesian inversion identity fails.
fn conditional_independence(
    m: &OntModel,
    table: &[Vec<Vec<Scalar>>],
    tol: Tolerance,
) -> Option<String> {
    let inv = bayesian_inversion(m, tol);
    let sig = m.experiment().signature();
    for l in 0..m.lambda().len() {
        for x in 0..sig.x.len() {
            let prior = inv.ontic_given_x(l, x);
            for a in 0..sig.a.len() {
                let forward = m.prep_ontic(l, a, x) * m.prep_out(a, x);
                let inverted = match inv.output_given_ontic(a, l, x) {
                    Conditional::Defined(post) => post * prior,
                    Conditional::Undefined => Scalar::zero(m.mode()),
                };
                if !forward.same(&inverted, tol) {
                    return Some(format!(
                        "Bayesian inversion fails at a={}, λ={}, x={}: {forward} != {inverted}",
                        sig.a.label(a),
                        m.lambda().label(l),
                        sig.x.label(x)
                    ));
                }
            }
            for y in 0..sig.y.len() {
                if !table[l][x][y].same(prior, tol) {
                    return Some(format!(
                        "p(λ={} | x={}, y={}) = {} but p(λ | x) = {prior}",
                        m.lambda().label(l),
                        sig.x.label(x),
                        sig.y.label(y),
                        table[l][x][y]
                    ));
                }
            }
        }
    }
    None
}

/// Tests whether `Σ_a p(λ | a, x) p(a | x)` is independent of `x`.
///
/// Only meaningful for a preparation whose outcome marginals carry no
/// information about `x`; otherwise `SignallingPreparation` is returned.
pub fn check_preparation_noncontextuality(m: &OntModel, tol: Tolerance) -> Result<Certificate> {
    let e = m.experiment();
    let ns = operational::check_no_signalling(e, tol);
    if let Some(w) = ns.past_witness {
        return Err(Error::SignallingPreparation(w.to_string()));
    }
    let inv = bayesian_inversion(m, tol);
    let sig = e.signature();
    let mut witness = None;
    'outer: for l in 0..m.lambda().len() {
        for x in 1..sig.x.len() {
            if !inv.ontic_given_x(l, x).same(inv.ontic_given_x(l, 0), tol) {
                witness = Some((l, x));
                break 'outer;
            }
        }
    }
    let mut scalars = BTreeMap::new();
    for l in 0..m.lambda().len() {
        for x in 0..sig.x.len() {
            scalars.insert(
                format!("p(λ={} | x={})", m.lambda().label(l), sig.x.label(x)),
                inv.ontic_given_x(l, x).to_string(),
            );
        }
    }
    let mut steps = vec![Step::new("no_signalling_preparation", Status::Pass, None)];
    let kind = match witness {
        None => {
            steps.push(Step::new(
                "ontic_marginal_x_independent",
                Status::Pass,
                None,
            ));
            CertificateKind::Noncontextual
        }
        Some((l, x)) => {
            let w = format!(
                "λ={}, x1={}, x2={}: {} != {}",
                m.lambda().label(l),
                sig.x.label(0),
                sig.x.label(x),
                inv.ontic_given_x(l, 0),
                inv.ontic_given_x(l, x)
            );
            steps.push(Step::new(
                "ontic_marginal_x_independent",
                Status::Fail,
                Some(w),
            ));
            CertificateKind::Contextual
        }
    };
    Ok(Certificate {
        kind,
        inputs: vec![e.name().to_string()],
        steps,
        scalars,
    })
}

/// Witness of preparation contextuality recovered from a certificate:
/// `(λ, x1, x2)`.
pub fn contextuality_witness(cert: &Certificate) -> Option<(String, String, String)> {
    let w = cert
        .step("ontic_marginal_x_independent")?
        .witness
        .as_ref()?;
    let head = w.split(':').next()?;
    let mut parts = HashMap::new();
    for item in head.split(", ") {
        let (k, v) = item.split_once('=')?;
        parts.insert(k, v);
    }
    Some((
        parts.get("λ")?.to_string(),
        parts.get("x1")?.to_string(),
        parts.get("x2")?.to_string(),
    ))
}

fn spin_values(set: &crate::operational::LabelSet, which: &str) -> Result<Vec<i64>> {
    let mut values = Vec::with_capacity(set.len());
    for l in set.labels() {
        values.push(match l.as_str() {
            PLUS => 1,
            MINUS => -1,
            other => {
                return Err(Error::NonBinaryOutcomes(format!(
                    "{which} has label `{other}`"
                )))
            }
        });
    }
    if values.len() != 2 {
        return Err(Error::NonBinaryOutcomes(format!(
            "{which} has {} labels",
            values.len()
        )));
    }
    Ok(values)
}

/// Correlator `E(x, y) = Σ_{a,b} ab p(a, b | x, y)` by label indices.
fn correlator(e: &Experiment, av: &[i64], bv: &[i64], x: usize, y: usize) -> Scalar {
    let mode = e.mode();
    let mut terms = Vec::with_capacity(4);
    for (a, &sa) in av.iter().enumerate() {
        for (b, &sb) in bv.iter().enumerate() {
            terms.push(&Scalar::int(sa * sb, mode) * e.p(a, b, x, y));
        }
    }
    sum_in(mode, &terms)
}

/// `S = E(x0, y0) + E(x0, y1) + E(x1, y0) − E(x1, y1)`; local models obey
/// `|S| ≤ 2`.
pub fn chsh_value(e: &Experiment, x0: &str, x1: &str, y0: &str, y1: &str) -> Result<Scalar> {
    let sig = e.signature();
    let av = spin_values(&sig.a, "Ω_A")?;
    let bv = spin_values(&sig.b, "Ω_B")?;
    let (x0, x1) = (sig.x.require(x0)?, sig.x.require(x1)?);
    let (y0, y1) = (sig.y.require(y0)?, sig.y.require(y1)?);
    let c = |x, y| correlator(e, &av, &bv, x, y);
    Ok(&(&(&c(x0, y0) + &c(x0, y1)) + &c(x1, y0)) - &c(x1, y1))
}

/// CHSH value with its correlators and a step recording whether `|S| > 2`.
pub fn chsh_certificate(
    e: &Experiment,
    settings: [&str; 4],
    tol: Tolerance,
) -> Result<Certificate> {
    let [x0, x1, y0, y1] = settings;
    let s = chsh_value(e, x0, x1, y0, y1)?;
    let sig = e.signature();
    let av = spin_values(&sig.a, "Ω_A")?;
    let bv = spin_values(&sig.b, "Ω_B")?;
    let mut scalars = BTreeMap::new();
    for (x, y) in [(x0, y0), (x0, y1), (x1, y0), (x1, y1)] {
        let v = correlator(e, &av, &bv, sig.x.require(x)?, sig.y.require(y)?);
        scalars.insert(format!("E(x={x}, y={y})"), v.to_string());
    }
    scalars.insert("S".into(), s.to_string());
    let mode = e.mode();
    let two = Scalar::int(2, mode);
    let exceeds = s.compare(&two, tol)? == std::cmp::Ordering::Greater
        || s.compare(&-&two, tol)? == std::cmp::Ordering::Less;
    let step = Step::new(
        "exceeds_local_bound",
        if exceeds { Status::Pass } else { Status::Fail },
        Some(format!("S = {s} ≈ {:.6}", s.to_f64())),
    );
    Ok(Certificate {
        kind: CertificateKind::Chsh,
        inputs: vec![e.name().to_string(), settings.join(",")],
        steps: vec![step],
        scalars,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operational::{LabelSet, Signature};
    use crate::quantum::{build_classical_control, build_maudlin, spin_labels};

    #[test]
    fn projector_keys() {
        let l = OnticLabel::pair("0", "+1");
        assert_eq!(Projector::Identity.key(&l), "[0,+1]");
        assert_eq!(Projector::first().key(&l), "0");
        assert_eq!(Projector::Components(vec![1]).key(&l), "+1");
    }

    #[test]
    fn uncorrelated_chsh_is_zero() {
        let sig = Signature::new(
            spin_labels(),
            spin_labels(),
            LabelSet::new(["0", "1"]).unwrap(),
            LabelSet::new(["0", "1"]).unwrap(),
        );
        let e = Experiment::from_fn("flat", sig, |_, _, _, _| Scalar::ratio(1, 4)).unwrap();
        assert_eq!(
            chsh_value(&e, "0", "1", "0", "1").unwrap(),
            Scalar::ratio(0, 1)
        );
    }

    #[test]
    fn chsh_rejects_non_binary_outcomes() {
        let (e, _) = build_classical_control(3).unwrap();
        assert!(matches!(
            chsh_value(&e, "*", "*", "*", "*"),
            Err(Error::NonBinaryOutcomes(_))
        ));
    }

    #[test]
    fn chsh_unknown_setting() {
        let (e, _) = build_maudlin();
        assert!(matches!(
            chsh_value(&e, "0", "7", "0", "1"),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn independence_needs_a_reverse() {
        let (_, m) = build_maudlin();
        let id = Bijection::identity(m.lambda());
        assert!(matches!(
            verify_measurement_independence(&m, &m, &id, Tolerance::DEFAULT),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn witness_parses_back() {
        let (_, m) = build_maudlin();
        let cert = check_preparation_noncontextuality(&m, Tolerance::DEFAULT).unwrap();
        assert_eq!(
            contextuality_witness(&cert),
            Some(("[0,+1]".into(), "0".into(), "1".into()))
        );
    }

    fn two_direction_bb() -> OntModel {
        let (prep, _) = crate::quantum::maudlin_directions();
        crate::quantum::build_bb_model(&prep, &prep, crate::numerics::Mode::Exact).unwrap()
    }

    #[test]
    fn marginal_g_examples() {
        let (_, m) = build_maudlin();
        let g = marginal_g(&m, &Projector::first());
        assert_eq!(g.keys(), ["0", "1"]);
        for (k, x, _, v) in g.entries() {
            let want = if k == x { 1 } else { 0 };
            assert_eq!(v, &Scalar::ratio(want, 1));
        }
        let g = marginal_g(&two_direction_bb(), &Projector::first());
        for (k, x, _, v) in g.entries() {
            assert_eq!(v, &Scalar::ratio((k == x) as i64, 1));
        }
        let (_, c) = build_classical_control(3).unwrap();
        let g = marginal_g(&c, &Projector::Identity);
        assert_eq!(g.keys().len(), 3);
        assert!(g.entries().all(|(_, _, _, v)| v == &Scalar::ratio(1, 3)));
        assert_eq!(g.get("2", "*", "*"), Some(&Scalar::ratio(1, 3)));
    }

    #[test]
    fn bb_on_two_directions_violates() {
        let m = two_direction_bb();
        let cert = certify_time_symmetry_violation(&m, SearchOptions::default()).unwrap();
        assert_eq!(cert.kind, CertificateKind::ViolationExhaustive);
        assert_eq!(cert.scalars["bijections_total"], "24");
        assert_eq!(
            cert.step("marginal_dependence").unwrap().status,
            Status::Pass
        );
    }

    #[test]
    fn classical_control_certificates() {
        let (_, m) = build_classical_control(4).unwrap();
        let cert = certify_time_symmetry_violation(&m, SearchOptions::default()).unwrap();
        assert_eq!(cert.kind, CertificateKind::TimeReverseFound);
        assert_eq!(
            cert.step("exhaustive_bijection_search")
                .unwrap()
                .witness
                .as_deref(),
            Some("identity")
        );
        let id = Bijection::identity(m.lambda());
        let lemma = verify_measurement_independence(&m, &m, &id, Tolerance::DEFAULT).unwrap();
        assert_eq!(lemma.kind, CertificateKind::LemmaVerified);
        assert!(lemma.scalars.values().all(|v| v == "1/4 + 0/1*sqrt3"));
        let nc = check_preparation_noncontextuality(&m, Tolerance::DEFAULT).unwrap();
        assert_eq!(nc.kind, CertificateKind::Noncontextual);
        assert_eq!(contextuality_witness(&nc), None);
    }

    #[test]
    fn not_self_reverse_is_rejected() {
        let sig = Signature::new(
            LabelSet::numbered(2).unwrap(),
            LabelSet::numbered(2).unwrap(),
            LabelSet::new(["*"]).unwrap(),
            LabelSet::new(["*"]).unwrap(),
        );
        // a uniform, b always the first label: not symmetric under a <-> b
        let m = OntModel::with_induced_experiment(
            "skewed",
            sig,
            crate::ontological::OnticSpace::numbered(1).unwrap(),
            |_, _| Scalar::ratio(1, 2),
            |_, _, _| Scalar::ratio(1, 1),
            |b, _, _| Scalar::ratio((b == 0) as i64, 1),
        )
        .unwrap();
        assert!(matches!(
            certify_time_symmetry_violation(&m, SearchOptions::default()),
            Err(Error::NotSelfReverse(_))
        ));
    }

    #[test]
    fn perfectly_correlated_bits_reach_the_local_bound() {
        let bits = || LabelSet::new(["0", "1"]).unwrap();
        let sig = Signature::new(spin_labels(), spin_labels(), bits(), bits());
        let e = Experiment::from_fn("copy", sig, |a, b, _, _| Scalar::ratio((a == b) as i64, 2))
            .unwrap();
        let s = chsh_value(&e, "0", "1", "0", "1").unwrap();
        assert_eq!(s, Scalar::ratio(2, 1));
        let cert = chsh_certificate(&e, ["0", "1", "0", "1"], Tolerance::DEFAULT).unwrap();
        assert_eq!(cert.steps[0].status, Status::Fail);
    }

    #[test]
    fn maudlin_chsh_certificate() {
        let (e, _) = build_maudlin();
        let cert = chsh_certificate(&e, ["0", "1", "0", "1"], Tolerance::DEFAULT).unwrap();
        assert_eq!(cert.scalars["S"], "1/2 + 1/1*sqrt3");
        assert_eq!(cert.scalars["E(x=0, y=1)"], "0/1 + 1/2*sqrt3");
        assert_eq!(cert.steps[0].status, Status::Pass);
    }

    #[test]
    fn signalling_preparation_rejected() {
        let bits = || LabelSet::new(["0", "1"]).unwrap();
        let sig = Signature::new(bits(), bits(), bits(), bits());
        // b copies x through λ = x
        let m = OntModel::with_induced_experiment(
            "copy-x",
            sig,
            crate::ontological::OnticSpace::numbered(2).unwrap(),
            |_, _| Scalar::ratio(1, 2),
            |l, _, x| Scalar::ratio((l == x) as i64, 1),
            |b, l, _| Scalar::ratio((b == l) as i64, 1),
        )
        .unwrap();
        assert!(matches!(
            check_preparation_noncontextuality(&m, Tolerance::DEFAULT),
            Err(Error::SignallingPreparation(_))
        ));
    }
}
