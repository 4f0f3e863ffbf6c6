//! Finite ontological models of prepare-and-measure experiments.
//!
//! A model explains `p(a, b | x, y)` through an ontic state `λ`:
//!
//! ```text
//! p(a, b, λ | x, y) = p_M(b | λ, y) · p_P(λ | a, x) · p_P(a | x)
//! ```
//!
//! The measurement response sees only `λ` and `y`. Two models are
//! ontological time reverses under a bijection `f` of their ontic spaces when
//! `p(a, b, λ | x, y) = p'(b, a, f(λ) | y, x)` for every cell.

use std::collections::HashSet;
use std::fmt;

use crate::check::{Conditional, Mismatch, Outcome};
use crate::error::{Error, Result};
use crate::numerics::{sum_in, Mode, NumericError, Scalar, Tolerance};
use crate::operational::{self, Experiment, ReverseFailure, Signature};

/// An ontic state label. Structured states such as `[λ₁, λ₂]` carry one
/// string per component.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OnticLabel(Vec<String>);

impl OnticLabel {
    pub fn new<I, S>(components: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let parts: Vec<String> = components.into_iter().map(Into::into).collect();
        if parts.is_empty() {
            return Err(Error::InvalidLabels(
                "ontic label without components".into(),
            ));
        }
        Ok(OnticLabel(parts))
    }

    pub fn single(label: impl Into<String>) -> Self {
        OnticLabel(vec![label.into()])
    }

    pub fn pair(first: impl Into<String>, second: impl Into<String>) -> Self {
        OnticLabel(vec![first.into(), second.into()])
    }

    pub fn components(&self) -> &[String] {
        &self.0
    }
}

impl fmt::Display for OnticLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            f.write_str(&self.0[0])
        } else {
            write!(f, "[{}]", self.0.join(","))
        }
    }
}

/// A finite ontic state space Λ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OnticSpace(Vec<OnticLabel>);

impl OnticSpace {
    pub fn new(labels: Vec<OnticLabel>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidLabels("empty ontic space".into()));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(Error::InvalidLabels(format!("duplicate ontic state {l}")));
            }
        }
        Ok(OnticSpace(labels))
    }

    /// Ontic states `"1"`, …, `"k"`.
    pub fn numbered(k: usize) -> Result<Self> {
        OnticSpace::new((1..=k).map(|i| OnticLabel::single(i.to_string())).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[OnticLabel] {
        &self.0
    }

    pub fn label(&self, index: usize) -> &OnticLabel {
        &self.0[index]
    }

    pub fn index_of(&self, label: &OnticLabel) -> Option<usize> {
        self.0.iter().position(|l| l == label)
    }
}

/// A finite ontological model of an experiment.
///
/// Tables are stored densely: `prep_out` over `(a, x)`, `prep_ontic` over
/// `(λ, a, x)` and `meas` over `(b, λ, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OntModel {
    experiment: Experiment,
    lambda: OnticSpace,
    prep_out: Vec<Scalar>,
    prep_ontic: Vec<Scalar>,
    meas: Vec<Scalar>,
}

impl OntModel {
    pub fn new(
        experiment: Experiment,
        lambda: OnticSpace,
        prep_out: Vec<Scalar>,
        prep_ontic: Vec<Scalar>,
        meas: Vec<Scalar>,
    ) -> Result<Self> {
        let sig = experiment.signature();
        let (na, nb, nx, ny, nl) = (
            sig.a.len(),
            sig.b.len(),
            sig.x.len(),
            sig.y.len(),
            lambda.len(),
        );
        let shapes = [
            ("prep_out", prep_out.len(), na * nx),
            ("prep_ontic", prep_ontic.len(), nl * na * nx),
            ("meas", meas.len(), nb * nl * ny),
        ];
        for (what, got, want) in shapes {
            if got != want {
                return Err(Error::Shape(format!(
                    "{what}: expected {want} cells, got {got}"
                )));
            }
        }
        let mode = experiment.mode();
        if prep_out
            .iter()
            .chain(&prep_ontic)
            .chain(&meas)
            .any(|s| s.mode() != mode)
        {
            return Err(NumericError::MixedModes.into());
        }
        Ok(OntModel {
            experiment,
            lambda,
            prep_out,
            prep_ontic,
            meas,
        })
    }

    /// Builds the model tables from closures over label indices.
    pub fn from_fns<P, L, M>(
        experiment: Experiment,
        lambda: OnticSpace,
        mut prep_out: P,
        mut prep_ontic: L,
        mut meas: M,
    ) -> Result<Self>
    where
        P: FnMut(usize, usize) -> Scalar,
        L: FnMut(usize, usize, usize) -> Scalar,
        M: FnMut(usize, usize, usize) -> Scalar,
    {
        let sig = experiment.signature().clone();
        let nl = lambda.len();
        let po = iproduct(&[sig.a.len(), sig.x.len()])
            .map(|i| prep_out(i[0], i[1]))
            .collect();
        let pl = iproduct(&[nl, sig.a.len(), sig.x.len()])
            .map(|i| prep_ontic(i[0], i[1], i[2]))
            .collect();
        let pm = iproduct(&[sig.b.len(), nl, sig.y.len()])
            .map(|i| meas(i[0], i[1], i[2]))
            .collect();
        OntModel::new(experiment, lambda, po, pl, pm)
    }

    /// Builds a model and the experiment it induces, `p(a, b | x, y) = Σ_λ joint`.
    pub fn with_induced_experiment<P, L, M>(
        name: impl Into<String>,
        sig: Signature,
        lambda: OnticSpace,
        mut prep_out: P,
        prep_ontic: L,
        meas: M,
    ) -> Result<Self>
    where
        P: FnMut(usize, usize) -> Scalar,
        L: FnMut(usize, usize, usize) -> Scalar,
        M: FnMut(usize, usize, usize) -> Scalar,
    {
        let mode = prep_out(0, 0).mode();
        let placeholder = Experiment::from_fn("", sig.clone(), |_, _, _, _| Scalar::zero(mode))?;
        let draft = OntModel::from_fns(placeholder, lambda, prep_out, prep_ontic, meas)?;
        let j = joint(&draft);
        let experiment =
            Experiment::from_fn(name, sig, |a, b, x, y| j.marginal_over_lambda(a, b, x, y))?;
        OntModel::new(
            experiment,
            draft.lambda,
            draft.prep_out,
            draft.prep_ontic,
            draft.meas,
        )
    }

    pub fn experiment(&self) -> &Experiment {
        &self.experiment
    }

    /// Renames the underlying experiment.
    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.experiment = self.experiment.renamed(name);
        self
    }

    pub fn lambda(&self) -> &OnticSpace {
        &self.lambda
    }

    pub fn mode(&self) -> Mode {
        self.experiment.mode()
    }

    fn sig(&self) -> &Signature {
        self.experiment.signature()
    }

    /// `p_P(a | x)`.
    pub fn prep_out(&self, a: usize, x: usize) -> &Scalar {
        &self.prep_out[a * self.sig().x.len() + x]
    }

    /// `p_P(λ | a, x)`.
    pub fn prep_ontic(&self, l: usize, a: usize, x: usize) -> &Scalar {
        let s = self.sig();
        &self.prep_ontic[(l * s.a.len() + a) * s.x.len() + x]
    }

    /// `p_M(b | λ, y)`.
    pub fn meas(&self, b: usize, l: usize, y: usize) -> &Scalar {
        let s = self.sig();
        &self.meas[(b * self.lambda.len() + l) * s.y.len() + y]
    }

    /// Explicit lossy conversion of the model and its experiment to floats.
    pub fn to_float(&self) -> OntModel {
        let conv = |v: &[Scalar]| v.iter().map(Scalar::to_float).collect();
        OntModel {
            experiment: self.experiment.to_float(),
            lambda: self.lambda.clone(),
            prep_out: conv(&self.prep_out),
            prep_ontic: conv(&self.prep_ontic),
            meas: conv(&self.meas),
        }
    }

    pub fn describe_cell(&self, a: usize, b: usize, l: usize, x: usize, y: usize) -> String {
        let s = self.sig();
        format!(
            "a={}, b={}, λ={}, x={}, y={}",
            s.a.label(a),
            s.b.label(b),
            self.lambda.label(l),
            s.x.label(x),
            s.y.label(y)
        )
    }
}

/// Row-major index tuples over `dims`.
fn iproduct(dims: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = dims.iter().product();
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; dims.len()];
        for (slot, &d) in idx.iter_mut().zip(dims).rev() {
            *slot = flat % d;
            flat /= d;
        }
        idx
    })
}

/// Normalization and range failures of a model's conditional tables.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ModelReport {
    pub problems: Vec<String>,
}

impl ModelReport {
    pub fn is_ok(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Checks that all three factors are conditional probability distributions.
pub fn validate_model(m: &OntModel, tol: Tolerance) -> ModelReport {
    let s = m.sig();
    let mode = m.mode();
    let one = Scalar::one(mode);
    let mut problems = Vec::new();
    for v in m.prep_out.iter().chain(&m.prep_ontic).chain(&m.meas) {
        if !v.is_probability(tol) {
            problems.push(format!("value {v} outside [0,1]"));
            break;
        }
    }
    for x in 0..s.x.len() {
        let col: Vec<&Scalar> = (0..s.a.len()).map(|a| m.prep_out(a, x)).collect();
        let total = sum_in(mode, col);
        if !total.same(&one, tol) {
            problems.push(format!("Σ_a p(a|x={}) = {total}", s.x.label(x)));
        }
        for a in 0..s.a.len() {
            let col: Vec<&Scalar> = (0..m.lambda.len()).map(|l| m.prep_ontic(l, a, x)).collect();
            let total = sum_in(mode, col);
            if !total.same(&one, tol) {
                problems.push(format!(
                    "Σ_λ p(λ|a={},x={}) = {total}",
                    s.a.label(a),
                    s.x.label(x)
                ));
            }
        }
    }
    for l in 0..m.lambda.len() {
        for y in 0..s.y.len() {
            let col: Vec<&Scalar> = (0..s.b.len()).map(|b| m.meas(b, l, y)).collect();
            let total = sum_in(mode, col);
            if !total.same(&one, tol) {
                problems.push(format!(
                    "Σ_b p(b|λ={},y={}) = {total}",
                    m.lambda.label(l),
                    s.y.label(y)
                ));
            }
        }
    }
    ModelReport { problems }
}

/// `p(a, b, λ | x, y)` for every cell of a model.
#[derive(Clone, Debug, PartialEq)]
pub struct JointTable {
    sig: Signature,
    n_lambda: usize,
    mode: Mode,
    values: Vec<Scalar>,
}

impl JointTable {
    fn index(&self, a: usize, b: usize, l: usize, x: usize, y: usize) -> usize {
        (((a * self.sig.b.len() + b) * self.n_lambda + l) * self.sig.x.len() + x) * self.sig.y.len()
            + y
    }

    pub fn get(&self, a: usize, b: usize, l: usize, x: usize, y: usize) -> &Scalar {
        &self.values[self.index(a, b, l, x, y)]
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn n_lambda(&self) -> usize {
        self.n_lambda
    }

    /// `Σ_λ p(a, b, λ | x, y)`.
    pub fn marginal_over_lambda(&self, a: usize, b: usize, x: usize, y: usize) -> Scalar {
        let cells: Vec<&Scalar> = (0..self.n_lambda)
            .map(|l| self.get(a, b, l, x, y))
            .collect();
        sum_in(self.mode, cells)
    }

    /// `p(λ | x, y) = Σ_{a,b} p(a, b, λ | x, y)`.
    pub fn ontic_given_settings(&self, l: usize, x: usize, y: usize) -> Scalar {
        let mut cells = Vec::with_capacity(self.sig.a.len() * self.sig.b.len());
        for a in 0..self.sig.a.len() {
            for b in 0..self.sig.b.len() {
                cells.push(self.get(a, b, l, x, y));
            }
        }
        sum_in(self.mode, cells)
    }
}

/// The joint distribution `p_M(b|λ,y) · p_P(λ|a,x) · p_P(a|x)`.
pub fn joint(m: &OntModel) -> JointTable {
    let s = m.sig().clone();
    let nl = m.lambda.len();
    let mut values = Vec::with_capacity(s.a.len() * s.b.len() * nl * s.x.len() * s.y.len());
    for a in 0..s.a.len() {
        for b in 0..s.b.len() {
            for l in 0..nl {
                for x in 0..s.x.len() {
                    let prep = m.prep_ontic(l, a, x) * m.prep_out(a, x);
                    for y in 0..s.y.len() {
                        values.push(m.meas(b, l, y) * &prep);
                    }
                }
            }
        }
    }
    JointTable {
        sig: s,
        n_lambda: nl,
        mode: m.mode(),
        values,
    }
}

/// Whether summing the joint over λ gives back the experiment's table.
pub fn reproduces(m: &OntModel, tol: Tolerance) -> Outcome {
    let j = joint(m);
    let e = &m.experiment;
    let s = e.signature();
    for a in 0..s.a.len() {
        for b in 0..s.b.len() {
            for x in 0..s.x.len() {
                for y in 0..s.y.len() {
                    let model = j.marginal_over_lambda(a, b, x, y);
                    let table = e.p(a, b, x, y);
                    if !model.same(table, tol) {
                        return Outcome::Fails(Mismatch {
                            cell: e.describe_cell(a, b, x, y),
                            left: model,
                            right: table.clone(),
                        });
                    }
                }
            }
        }
    }
    Outcome::Holds
}

/// A one-to-one map between ontic spaces.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bijection {
    source: OnticSpace,
    target: OnticSpace,
    map: Vec<usize>,
}

impl Bijection {
    /// `map[i]` is the index in `target` of the image of `source[i]`.
    pub fn new(source: OnticSpace, target: OnticSpace, map: Vec<usize>) -> Result<Self> {
        if source.len() != target.len() || map.len() != source.len() {
            return Err(Error::DomainMismatch(format!(
                "|source| = {}, |target| = {}, map covers {}",
                source.len(),
                target.len(),
                map.len()
            )));
        }
        let mut hit = vec![false; target.len()];
        for &j in &map {
            if j >= target.len() || std::mem::replace(&mut hit[j], true) {
                return Err(Error::DomainMismatch("map is not one-to-one".into()));
            }
        }
        Ok(Bijection {
            source,
            target,
            map,
        })
    }

    pub fn identity(space: &OnticSpace) -> Bijection {
        Bijection {
            source: space.clone(),
            target: space.clone(),
            map: (0..space.len()).collect(),
        }
    }

    pub fn source(&self) -> &OnticSpace {
        &self.source
    }

    pub fn target(&self) -> &OnticSpace {
        &self.target
    }

    pub fn as_indices(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.map.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> Bijection {
        let mut inv = vec![0; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j] = i;
        }
        Bijection {
            source: self.target.clone(),
            target: self.source.clone(),
            map: inv,
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Bijection) -> Result<Bijection> {
        if self.target != other.source {
            return Err(Error::DomainMismatch(
                "composition of incompatible bijections".into(),
            ));
        }
        Ok(Bijection {
            source: self.source.clone(),
            target: other.target.clone(),
            map: self.map.iter().map(|&j| other.map[j]).collect(),
        })
    }
}

impl fmt::Display for Bijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .map
            .iter()
            .enumerate()
            .map(|(i, &j)| format!("{}->{}", self.source.label(i), self.target.label(j)))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Pushes the λ-indexed tables of `m` through `f`, so that state `λ` of `m`
/// becomes `f(λ)` in the result.
pub fn relabel(m: &OntModel, f: &Bijection) -> Result<OntModel> {
    if f.source != m.lambda {
        return Err(Error::DomainMismatch(
            "bijection source is not the model's ontic space".into(),
        ));
    }
    let inv = f.inverse();
    let m_ref = m;
    OntModel::from_fns(
        m.experiment.clone(),
        f.target.clone(),
        |a, x| m_ref.prep_out(a, x).clone(),
        |l2, a, x| m_ref.prep_ontic(inv.apply(l2), a, x).clone(),
        |b, l2, y| m_ref.meas(b, inv.apply(l2), y).clone(),
    )
}

fn require_operational_reverse(m1: &OntModel, m2: &OntModel, tol: Tolerance) -> Result<()> {
    match operational::check_time_reverse_pair(&m1.experiment, &m2.experiment, tol) {
        Ok(_) => Ok(()),
        Err(ReverseFailure::CardinalityMismatch(msg)) => Err(Error::NotOperationalReverses(msg)),
        Err(ReverseFailure::TableMismatch(mm)) => {
            Err(Error::NotOperationalReverses(mm.to_string()))
        }
    }
}

fn first_reverse_mismatch(
    m1: &OntModel,
    j1: &JointTable,
    j2: &JointTable,
    map: &[usize],
    tol: Tolerance,
) -> Option<Mismatch> {
    let s = j1.signature();
    for a in 0..s.a.len() {
        for b in 0..s.b.len() {
            for (l, &l2) in map.iter().enumerate() {
                for x in 0..s.x.len() {
                    for y in 0..s.y.len() {
                        let left = j1.get(a, b, l, x, y);
                        let right = j2.get(b, a, l2, y, x);
                        if !left.same(right, tol) {
                            return Some(Mismatch {
                                cell: m1.describe_cell(a, b, l, x, y),
                                left: left.clone(),
                                right: right.clone(),
                            });
                        }
                    }
                }
            }
        }
    }
    None
}

/// Checks `p1(a, b, λ | x, y) = p2(b, a, f(λ) | y, x)` for every cell.
///
/// Defined only when the two experiments are operational time reverses
/// (positional label identification).
pub fn check_ontological_time_reverse(
    m1: &OntModel,
    m2: &OntModel,
    f: &Bijection,
    tol: Tolerance,
) -> Result<Outcome> {
    require_operational_reverse(m1, m2, tol)?;
    if f.source != m1.lambda || f.target != m2.lambda {
        return Err(Error::DomainMismatch(
            "bijection does not map the first model's ontic space onto the second's".into(),
        ));
    }
    let (j1, j2) = (joint(m1), joint(m2));
    Ok(match first_reverse_mismatch(m1, &j1, &j2, &f.map, tol) {
        None => Outcome::Holds,
        Some(mm) => Outcome::Fails(mm),
    })
}

/// Default bound on |Λ| for exhaustive bijection search.
pub const DEFAULT_CAP: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    pub tolerance: Tolerance,
    pub cap: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            tolerance: Tolerance::DEFAULT,
            cap: DEFAULT_CAP,
        }
    }
}

/// Outcome of an exhaustive bijection search.
///
/// `total = pruned + checked`; every candidate not in `found` was refuted,
/// either by the marginal pruning rule or by a full cell-by-cell check.
#[derive(Clone, Debug, PartialEq)]
pub struct BijectionSearch {
    pub total: u128,
    pub pruned: u128,
    pub checked: u128,
    pub found: Vec<Bijection>,
}

impl BijectionSearch {
    pub fn refuted(&self) -> u128 {
        self.total - self.found.len() as u128
    }
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Enumerates every bijection `f: Λ₁ → Λ₂` under which `m2` is an ontological
/// time reverse of `m1`, in lexicographic order of `f`.
///
/// The only pruning is necessary: `p1(λ | x, y)` must equal
/// `p2(f(λ) | y, x)` for all settings, since that follows from summing the
/// reverse condition over outcomes.
pub fn search_time_reverse_bijection(
    m1: &OntModel,
    m2: &OntModel,
    opts: SearchOptions,
) -> Result<BijectionSearch> {
    require_operational_reverse(m1, m2, opts.tolerance)?;
    let n = m1.lambda.len();
    if n > opts.cap || m2.lambda.len() > opts.cap {
        return Err(Error::SpaceTooLarge {
            size: n.max(m2.lambda.len()),
            cap: opts.cap,
        });
    }
    if n != m2.lambda.len() {
        return Ok(BijectionSearch {
            total: 0,
            pruned: 0,
            checked: 0,
            found: Vec::new(),
        });
    }
    let (j1, j2) = (joint(m1), joint(m2));
    let s = m1.sig();
    let (nx, ny) = (s.x.len(), s.y.len());
    let sig1: Vec<Vec<Scalar>> = (0..n)
        .map(|l| {
            iproduct(&[nx, ny])
                .map(|i| j1.ontic_given_settings(l, i[0], i[1]))
                .collect()
        })
        .collect();
    let sig2: Vec<Vec<Scalar>> = (0..n)
        .map(|l2| {
            iproduct(&[nx, ny])
                .map(|i| j2.ontic_given_settings(l2, i[1], i[0]))
                .collect()
        })
        .collect();
    let tol = opts.tolerance;
    let compatible: Vec<Vec<bool>> = sig1
        .iter()
        .map(|v1| {
            sig2.iter()
                .map(|v2| v1.iter().zip(v2).all(|(p, q)| p.same(q, tol)))
                .collect()
        })
        .collect();

    let mut state = Search {
        m1,
        j1: &j1,
        j2: &j2,
        tol,
        compatible: &compatible,
        map: Vec::with_capacity(n),
        used: vec![false; n],
        pruned: 0,
        checked: 0,
        found: Vec::new(),
    };
    state.run();
    let found = state
        .found
        .into_iter()
        .map(|map| Bijection {
            source: m1.lambda.clone(),
            target: m2.lambda.clone(),
            map,
        })
        .collect();
    Ok(BijectionSearch {
        total: factorial(n),
        pruned: state.pruned,
        checked: state.checked,
        found,
    })
}

struct Search<'a> {
    m1: &'a OntModel,
    j1: &'a JointTable,
    j2: &'a JointTable,
    tol: Tolerance,
    compatible: &'a [Vec<bool>],
    map: Vec<usize>,
    used: Vec<bool>,
    pruned: u128,
    checked: u128,
    found: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn run(&mut self) {
        let n = self.used.len();
        let depth = self.map.len();
        if depth == n {
            self.checked += 1;
            if first_reverse_mismatch(self.m1, self.j1, self.j2, &self.map, self.tol).is_none() {
                self.found.push(self.map.clone());
            }
            return;
        }
        for target in 0..n {
            if self.used[target] {
                continue;
            }
            if !self.compatible[depth][target] {
                self.pruned += factorial(n - depth - 1);
                continue;
            }
            self.used[target] = true;
            self.map.push(target);
            self.run();
            self.map.pop();
            self.used[target] = false;
        }
    }
}

/// Bayesian inversion of the preparation factors:
/// `p(λ | x) = Σ_a p(λ | a, x) p(a | x)` and
/// `p(a | λ, x) = p(λ | a, x) p(a | x) / p(λ | x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BayesianInversion {
    n_lambda: usize,
    n_x: usize,
    ontic_given_x: Vec<Scalar>,
    output_given_ontic: Vec<Conditional>,
}

impl BayesianInversion {
    /// `p(λ | x)`.
    pub fn ontic_given_x(&self, l: usize, x: usize) -> &Scalar {
        &self.ontic_given_x[l * self.n_x + x]
    }

    /// `p(a | λ, x)`, undefined where `p(λ | x) = 0`.
    pub fn output_given_ontic(&self, a: usize, l: usize, x: usize) -> &Conditional {
        &self.output_given_ontic[(a * self.n_lambda + l) * self.n_x + x]
    }
}

pub fn bayesian_inversion(m: &OntModel, tol: Tolerance) -> BayesianInversion {
    let s = m.sig();
    let (na, nx, nl) = (s.a.len(), s.x.len(), m.lambda.len());
    let mode = m.mode();
    let mut ontic_given_x = Vec::with_capacity(nl * nx);
    for l in 0..nl {
        for x in 0..nx {
            let terms: Vec<Scalar> = (0..na)
                .map(|a| m.prep_ontic(l, a, x) * m.prep_out(a, x))
                .collect();
            ontic_given_x.push(sum_in(mode, &terms));
        }
    }
    let mut output_given_ontic = Vec::with_capacity(na * nl * nx);
    for a in 0..na {
        for l in 0..nl {
            for x in 0..nx {
                let denom = &ontic_given_x[l * nx + x];
                output_given_ontic.push(if denom.is_zero(tol) {
                    Conditional::Undefined
                } else {
                    Conditional::Defined(&(m.prep_ontic(l, a, x) * m.prep_out(a, x)) / denom)
                });
            }
        }
    }
    BayesianInversion {
        n_lambda: nl,
        n_x: nx,
        ontic_given_x,
        output_given_ontic,
    }
}

/// Constructs the ontological time reverse of `m` with ontic states renamed
/// through `f`.
///
/// The partner exchanges the roles of the two devices: its preparation
/// emits `f(λ)` correlated with its output exactly as `m`'s measurement
/// correlates `λ` with `b`, and its measurement responds as `m`'s
/// preparation output does given `λ`. This is only possible when `p(λ | x)`
/// does not depend on `x`; otherwise `PreconditionFailed` is returned.
pub fn swap_and_relabel(
    m: &OntModel,
    f: &Bijection,
    name: impl Into<String>,
    tol: Tolerance,
) -> Result<OntModel> {
    if f.source != m.lambda {
        return Err(Error::DomainMismatch(
            "bijection source is not the model's ontic space".into(),
        ));
    }
    let s = m.sig();
    let (na, nb, nx, ny, nl) = (s.a.len(), s.b.len(), s.x.len(), s.y.len(), m.lambda.len());
    let mode = m.mode();
    let inv = bayesian_inversion(m, tol);
    for l in 0..nl {
        for x in 1..nx {
            if !inv.ontic_given_x(l, x).same(inv.ontic_given_x(l, 0), tol) {
                return Err(Error::PreconditionFailed(format!(
                    "p(λ={} | x) depends on x, so no ontological time reverse exists",
                    m.lambda.label(l)
                )));
            }
        }
    }
    let prior: Vec<Scalar> = (0..nl).map(|l| inv.ontic_given_x(l, 0).clone()).collect();
    let experiment = operational::reverse(&m.experiment, name);
    let f_inv = f.inverse();

    // Partner output a' ranges over Ω_B, input x' over Ω_Y.
    let out2: Vec<Scalar> = iproduct(&[nb, ny])
        .map(|i| {
            let terms: Vec<Scalar> = (0..nl).map(|l| &prior[l] * m.meas(i[0], l, i[1])).collect();
            sum_in(mode, &terms)
        })
        .collect();
    let uniform = Scalar::one(mode).checked_div(&Scalar::int(na as i64, mode))?;

    OntModel::from_fns(
        experiment,
        f.target.clone(),
        |a2, x2| out2[a2 * ny + x2].clone(),
        |l2, a2, x2| {
            let l = f_inv.apply(l2);
            let norm = &out2[a2 * ny + x2];
            if norm.is_zero(tol) {
                prior[l].clone()
            } else {
                &(&prior[l] * m.meas(a2, l, x2)) / norm
            }
        },
        |b2, l2, y2| {
            let l = f_inv.apply(l2);
            match inv.output_given_ontic(b2, l, y2) {
                Conditional::Defined(v) => v.clone(),
                Conditional::Undefined => uniform.clone(),
            }
        },
    )
}
