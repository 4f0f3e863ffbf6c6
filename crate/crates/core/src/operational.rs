//! Prepare-and-measure experiments as finite probability tables.
//!
//! An [`Experiment`] holds `p(a, b | x, y)` for preparation input `x`,
//! preparation output `a`, measurement input `y` and measurement outcome `b`.
//! This module decides normalization, no-signalling and whether two
//! experiments are operational time reverses of one another, i.e.
//!
//! ```text
//! p(a, b | x, y) = p'(a' = b, b' = a | x' = y, y' = x)
//! ```

use std::collections::HashSet;
use std::fmt;

use crate::check::{Conditional, Mismatch};
use crate::error::{Error, Result};
use crate::numerics::{sum_in, Direction, Mode, Scalar, Tolerance};

/// A nonempty ordered list of distinct labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabelSet(Vec<String>);

impl LabelSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidLabels("empty label set".into()));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidLabels(format!("duplicate label `{l}`")));
            }
        }
        Ok(LabelSet(labels))
    }

    /// Labels `"1"`, …, `"k"`.
    pub fn numbered(k: usize) -> Result<Self> {
        LabelSet::new((1..=k).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.0
    }

    pub fn label(&self, index: usize) -> &str {
        &self.0[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.0.iter().position(|l| l == label)
    }

    pub fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }
}

/// Physical directions behind the abstract setting labels of a qubit
/// experiment. Kept separately so that relabelled settings (two labels that
/// name different directions on the two sides) stay visible in reports.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionMap {
    pub x: Vec<Direction>,
    pub y: Vec<Direction>,
}

/// The four label sets of an experiment, in `(A, B, X, Y)` order.
#[derive(Clone, Debug, PartialEq)]
pub struct Signature {
    pub a: LabelSet,
    pub b: LabelSet,
    pub x: LabelSet,
    pub y: LabelSet,
}

impl Signature {
    pub fn new(a: LabelSet, b: LabelSet, x: LabelSet, y: LabelSet) -> Self {
        Signature { a, b, x, y }
    }

    pub fn cells(&self) -> usize {
        self.a.len() * self.b.len() * self.x.len() * self.y.len()
    }

    /// Signature of the time-reversed experiment.
    pub fn reversed(&self) -> Signature {
        Signature {
            a: self.b.clone(),
            b: self.a.clone(),
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }
}

/// A prepare-and-measure experiment `p(a, b | x, y)`.
///
/// Construction checks shape and mode uniformity only; the probabilistic
/// invariants are reported by [`validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    name: String,
    sig: Signature,
    table: Vec<Scalar>,
    mode: Mode,
    directions: Option<DirectionMap>,
}

impl Experiment {
    /// `table` is laid out row-major over `(a, b, x, y)`.
    pub fn new(name: impl Into<String>, sig: Signature, table: Vec<Scalar>) -> Result<Self> {
        if table.len() != sig.cells() {
            return Err(Error::Shape(format!(
                "expected {} cells, got {}",
                sig.cells(),
                table.len()
            )));
        }
        let mode = table[0].mode();
        if table.iter().any(|s| s.mode() != mode) {
            return Err(crate::numerics::NumericError::MixedModes.into());
        }
        Ok(Experiment {
            name: name.into(),
            sig,
            table,
            mode,
            directions: None,
        })
    }

    pub fn from_fn<F>(name: impl Into<String>, sig: Signature, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize, usize, usize) -> Scalar,
    {
        let mut table = Vec::with_capacity(sig.cells());
        for a in 0..sig.a.len() {
            for b in 0..sig.b.len() {
                for x in 0..sig.x.len() {
                    for y in 0..sig.y.len() {
                        table.push(f(a, b, x, y));
                    }
                }
            }
        }
        Experiment::new(name, sig, table)
    }

    pub fn with_directions(mut self, directions: DirectionMap) -> Result<Self> {
        if directions.x.len() != self.sig.x.len() || directions.y.len() != self.sig.y.len() {
            return Err(Error::Shape(
                "direction map does not cover the setting labels".into(),
            ));
        }
        self.directions = Some(directions);
        Ok(self)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn omega_a(&self) -> &LabelSet {
        &self.sig.a
    }

    pub fn omega_b(&self) -> &LabelSet {
        &self.sig.b
    }

    pub fn omega_x(&self) -> &LabelSet {
        &self.sig.x
    }

    pub fn omega_y(&self) -> &LabelSet {
        &self.sig.y
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn directions(&self) -> Option<&DirectionMap> {
        self.directions.as_ref()
    }

    fn index(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        ((a * self.sig.b.len() + b) * self.sig.x.len() + x) * self.sig.y.len() + y
    }

    /// `p(a, b | x, y)` by label indices.
    pub fn p(&self, a: usize, b: usize, x: usize, y: usize) -> &Scalar {
        &self.table[self.index(a, b, x, y)]
    }

    /// `p(a, b | x, y)` by label names.
    pub fn p_labels(&self, a: &str, b: &str, x: &str, y: &str) -> Result<&Scalar> {
        Ok(self.p(
            self.sig.a.require(a)?,
            self.sig.b.require(b)?,
            self.sig.x.require(x)?,
            self.sig.y.require(y)?,
        ))
    }

    pub fn describe_cell(&self, a: usize, b: usize, x: usize, y: usize) -> String {
        format!(
            "a={}, b={}, x={}, y={}",
            self.sig.a.label(a),
            self.sig.b.label(b),
            self.sig.x.label(x),
            self.sig.y.label(y)
        )
    }

    /// `p(a | x, y) = Σ_b p(a, b | x, y)`.
    pub fn marginal_a(&self, a: usize, x: usize, y: usize) -> Scalar {
        let cells: Vec<&Scalar> = (0..self.sig.b.len()).map(|b| self.p(a, b, x, y)).collect();
        sum_in(self.mode, cells)
    }

    /// `p(b | x, y) = Σ_a p(a, b | x, y)`.
    pub fn marginal_b(&self, b: usize, x: usize, y: usize) -> Scalar {
        let cells: Vec<&Scalar> = (0..self.sig.a.len()).map(|a| self.p(a, b, x, y)).collect();
        sum_in(self.mode, cells)
    }

    /// `p(b | a, x, y)`, undefined when `p(a | x, y) = 0`.
    pub fn outcome_given_output(&self, b: usize, a: usize, x: usize, y: usize) -> Conditional {
        let denom = self.marginal_a(a, x, y);
        if denom.is_zero(Tolerance::DEFAULT) {
            Conditional::Undefined
        } else {
            Conditional::Defined(self.p(a, b, x, y) / &denom)
        }
    }

    /// Explicit lossy conversion of every cell into float mode.
    pub fn to_float(&self) -> Experiment {
        Experiment {
            name: self.name.clone(),
            sig: self.sig.clone(),
            table: self.table.iter().map(Scalar::to_float).collect(),
            mode: Mode::Float,
            directions: self.directions.as_ref().map(|d| DirectionMap {
                x: d.x.iter().map(Direction::to_float).collect(),
                y: d.y.iter().map(Direction::to_float).collect(),
            }),
        }
    }
}

/// A cell whose value lies outside `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RangeViolation {
    pub cell: String,
    pub value: Scalar,
}

/// A setting pair `(x, y)` whose column does not sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizationViolation {
    pub x: String,
    pub y: String,
    pub sum: Scalar,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ValidationReport {
    pub out_of_range: Vec<RangeViolation>,
    pub unnormalized: Vec<NormalizationViolation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.out_of_range.is_empty() && self.unnormalized.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        let mut parts = Vec::new();
        for r in &self.out_of_range {
            parts.push(format!("{} out of [0,1] at {}", r.value, r.cell));
        }
        for n in &self.unnormalized {
            parts.push(format!("sum {} != 1 at x={}, y={}", n.sum, n.x, n.y));
        }
        f.write_str(&parts.join("; "))
    }
}

/// Checks the range of every cell and normalization of every `(x, y)` column.
pub fn validate(e: &Experiment, tol: Tolerance) -> ValidationReport {
    let sig = e.signature();
    let mut report = ValidationReport::default();
    for a in 0..sig.a.len() {
        for b in 0..sig.b.len() {
            for x in 0..sig.x.len() {
                for y in 0..sig.y.len() {
                    let v = e.p(a, b, x, y);
                    if !v.is_probability(tol) {
                        report.out_of_range.push(RangeViolation {
                            cell: e.describe_cell(a, b, x, y),
                            value: v.clone(),
                        });
                    }
                }
            }
        }
    }
    let one = Scalar::one(e.mode());
    for x in 0..sig.x.len() {
        for y in 0..sig.y.len() {
            let sums: Vec<Scalar> = (0..sig.a.len()).map(|a| e.marginal_a(a, x, y)).collect();
            let total = sum_in(e.mode(), &sums);
            if !total.same(&one, tol) {
                report.unnormalized.push(NormalizationViolation {
                    x: sig.x.label(x).to_string(),
                    y: sig.y.label(y).to_string(),
                    sum: total,
                });
            }
        }
    }
    report
}

/// Two settings that give different marginals for a fixed outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct SignallingWitness {
    /// The outcome whose marginal varies, e.g. `b=+1`.
    pub outcome: String,
    /// The setting held fixed, e.g. `y=0`.
    pub fixed: String,
    /// The two values of the varied setting.
    pub varied: (String, String),
    pub values: (Scalar, Scalar),
}

impl fmt::Display for SignallingWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p({} | {}) is {} at {} but {} at {}",
            self.outcome, self.fixed, self.values.0, self.varied.0, self.values.1, self.varied.1
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoSignallingReport {
    /// `Σ_b p(a, b | x, y)` does not depend on `y`.
    pub to_future: bool,
    /// `Σ_a p(a, b | x, y)` does not depend on `x`.
    pub to_past: bool,
    pub future_witness: Option<SignallingWitness>,
    pub past_witness: Option<SignallingWitness>,
}

impl NoSignallingReport {
    pub fn both(&self) -> bool {
        self.to_future && self.to_past
    }
}

pub fn check_no_signalling(e: &Experiment, tol: Tolerance) -> NoSignallingReport {
    let sig = e.signature();

    let mut past_witness = None;
    'past: for b in 0..sig.b.len() {
        for y in 0..sig.y.len() {
            let first = e.marginal_b(b, 0, y);
            for x in 1..sig.x.len() {
                let other = e.marginal_b(b, x, y);
                if !first.same(&other, tol) {
                    past_witness = Some(SignallingWitness {
                        outcome: format!("b={}", sig.b.label(b)),
                        fixed: format!("y={}", sig.y.label(y)),
                        varied: (
                            format!("x={}", sig.x.label(0)),
                            format!("x={}", sig.x.label(x)),
                        ),
                        values: (first, other),
                    });
                    break 'past;
                }
            }
        }
    }

    let mut future_witness = None;
    'future: for a in 0..sig.a.len() {
        for x in 0..sig.x.len() {
            let first = e.marginal_a(a, x, 0);
            for y in 1..sig.y.len() {
                let other = e.marginal_a(a, x, y);
                if !first.same(&other, tol) {
                    future_witness = Some(SignallingWitness {
                        outcome: format!("a={}", sig.a.label(a)),
                        fixed: format!("x={}", sig.x.label(x)),
                        varied: (
                            format!("y={}", sig.y.label(0)),
                            format!("y={}", sig.y.label(y)),
                        ),
                        values: (first, other),
                    });
                    break 'future;
                }
            }
        }
    }

    NoSignallingReport {
        to_future: future_witness.is_none(),
        to_past: past_witness.is_none(),
        future_witness,
        past_witness,
    }
}

/// How the labels of a candidate reverse `e2` are identified with those of
/// `e1`. Each vector is a bijection given by indices:
/// `a2_of_b[b]` is the index in `Ω_A'` identified with `b ∈ Ω_B`, and so on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relabelling {
    pub a2_of_b: Vec<usize>,
    pub b2_of_a: Vec<usize>,
    pub x2_of_y: Vec<usize>,
    pub y2_of_x: Vec<usize>,
}

impl Relabelling {
    /// Position `i` on one side is identified with position `i` on the other.
    pub fn positional(e1: &Experiment) -> Relabelling {
        let s = e1.signature();
        Relabelling {
            a2_of_b: (0..s.b.len()).collect(),
            b2_of_a: (0..s.a.len()).collect(),
            x2_of_y: (0..s.y.len()).collect(),
            y2_of_x: (0..s.x.len()).collect(),
        }
    }
}

/// Evidence that `partner` is an operational time reverse.
///
/// Each identification lists `(label in partner, label in original)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeReverseWitness {
    pub partner: String,
    pub a_prime_is_b: Vec<(String, String)>,
    pub b_prime_is_a: Vec<(String, String)>,
    pub x_prime_is_y: Vec<(String, String)>,
    pub y_prime_is_x: Vec<(String, String)>,
    pub self_reverse: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ReverseFailure {
    /// Some label set pair has different sizes, so no identification exists.
    CardinalityMismatch(String),
    TableMismatch(Mismatch),
}

impl fmt::Display for ReverseFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReverseFailure::CardinalityMismatch(msg) => write!(f, "cardinality mismatch: {msg}"),
            ReverseFailure::TableMismatch(m) => write!(f, "table mismatch {m}"),
        }
    }
}

fn cardinality_check(e1: &Experiment, e2: &Experiment) -> std::result::Result<(), String> {
    let (s1, s2) = (e1.signature(), e2.signature());
    let pairs = [
        ("|Ω_A'|", s2.a.len(), "|Ω_B|", s1.b.len()),
        ("|Ω_B'|", s2.b.len(), "|Ω_A|", s1.a.len()),
        ("|Ω_X'|", s2.x.len(), "|Ω_Y|", s1.y.len()),
        ("|Ω_Y'|", s2.y.len(), "|Ω_X|", s1.x.len()),
    ];
    for (ln, l, rn, r) in pairs {
        if l != r {
            return Err(format!("{ln} = {l} but {rn} = {r}"));
        }
    }
    Ok(())
}

fn pair_labels(target: &LabelSet, source: &LabelSet, map: &[usize]) -> Vec<(String, String)> {
    map.iter()
        .enumerate()
        .map(|(i, &j)| (target.label(j).to_string(), source.label(i).to_string()))
        .collect()
}

fn same_tables(e1: &Experiment, e2: &Experiment) -> bool {
    e1.name == e2.name && e1.sig == e2.sig && e1.table == e2.table
}

/// Checks `p1(a, b | x, y) = p2(b, a | y, x)` under an explicit label
/// identification.
pub fn check_time_reverse_pair_with(
    e1: &Experiment,
    e2: &Experiment,
    map: &Relabelling,
    tol: Tolerance,
) -> std::result::Result<TimeReverseWitness, ReverseFailure> {
    cardinality_check(e1, e2).map_err(ReverseFailure::CardinalityMismatch)?;
    let (s1, s2) = (e1.signature(), e2.signature());
    let lens_ok = map.a2_of_b.len() == s1.b.len()
        && map.b2_of_a.len() == s1.a.len()
        && map.x2_of_y.len() == s1.y.len()
        && map.y2_of_x.len() == s1.x.len();
    if !lens_ok {
        return Err(ReverseFailure::CardinalityMismatch(
            "relabelling does not cover the label sets".into(),
        ));
    }
    for a in 0..s1.a.len() {
        for b in 0..s1.b.len() {
            for x in 0..s1.x.len() {
                for y in 0..s1.y.len() {
                    let left = e1.p(a, b, x, y);
                    let right = e2.p(
                        map.a2_of_b[b],
                        map.b2_of_a[a],
                        map.x2_of_y[y],
                        map.y2_of_x[x],
                    );
                    if !left.same(right, tol) {
                        return Err(ReverseFailure::TableMismatch(Mismatch {
                            cell: e1.describe_cell(a, b, x, y),
                            left: left.clone(),
                            right: right.clone(),
                        }));
                    }
                }
            }
        }
    }
    Ok(TimeReverseWitness {
        partner: e2.name().to_string(),
        a_prime_is_b: pair_labels(&s2.a, &s1.b, &map.a2_of_b),
        b_prime_is_a: pair_labels(&s2.b, &s1.a, &map.b2_of_a),
        x_prime_is_y: pair_labels(&s2.x, &s1.y, &map.x2_of_y),
        y_prime_is_x: pair_labels(&s2.y, &s1.x, &map.y2_of_x),
        self_reverse: same_tables(e1, e2),
    })
}

/// Checks whether `e2` is an operational time reverse of `e1` under
/// positional label identification.
pub fn check_time_reverse_pair(
    e1: &Experiment,
    e2: &Experiment,
    tol: Tolerance,
) -> std::result::Result<TimeReverseWitness, ReverseFailure> {
    cardinality_check(e1, e2).map_err(ReverseFailure::CardinalityMismatch)?;
    check_time_reverse_pair_with(e1, e2, &Relabelling::positional(e1), tol)
}

/// Whether `e` is its own operational time reverse.
pub fn is_self_time_reverse(e: &Experiment, tol: Tolerance) -> Result<bool> {
    match check_time_reverse_pair(e, e, tol) {
        Ok(_) => Ok(true),
        Err(ReverseFailure::TableMismatch(_)) => Ok(false),
        Err(ReverseFailure::CardinalityMismatch(msg)) => Err(Error::CardinalityMismatch(msg)),
    }
}

/// Builds the time reverse of `e`: the experiment with the roles of
/// preparation and measurement swapped.
pub fn reverse(e: &Experiment, name: impl Into<String>) -> Experiment {
    let sig = e.signature();
    let rev_sig = sig.reversed();
    let mut table = Vec::with_capacity(e.table.len());
    for a2 in 0..rev_sig.a.len() {
        for b2 in 0..rev_sig.b.len() {
            for x2 in 0..rev_sig.x.len() {
                for y2 in 0..rev_sig.y.len() {
                    table.push(e.p(b2, a2, y2, x2).clone());
                }
            }
        }
    }
    Experiment {
        name: name.into(),
        sig: rev_sig,
        table,
        mode: e.mode,
        directions: e.directions.as_ref().map(|d| DirectionMap {
            x: d.y.clone(),
            y: d.x.clone(),
        }),
    }
}

/// Every experiment in `candidates` that is an operational time reverse of
/// `e` under positional identification. No uniqueness is implied.
pub fn time_reverse_partners(
    e: &Experiment,
    candidates: &[Experiment],
    tol: Tolerance,
) -> Vec<TimeReverseWitness> {
    candidates
        .iter()
        .filter_map(|c| check_time_reverse_pair(e, c, tol).ok())
        .collect()
}

/// Largest label set for which [`search_time_reverse_labellings`] enumerates
/// identifications.
pub const MAX_LABELS_FOR_SEARCH: usize = 6;

/// Searches all label identifications (not just positional ones) under which
/// `e2` is a time reverse of `e1`, stopping after `limit` witnesses.
///
/// Backtracking assigns the four bijections a few labels at a time and checks
/// every cell as soon as its four labels are mapped.
pub fn search_time_reverse_labellings(
    e1: &Experiment,
    e2: &Experiment,
    tol: Tolerance,
    limit: usize,
) -> Result<Vec<TimeReverseWitness>> {
    cardinality_check(e1, e2).map_err(Error::CardinalityMismatch)?;
    let s1 = e1.signature();
    let largest = [s1.a.len(), s1.b.len(), s1.x.len(), s1.y.len()]
        .into_iter()
        .max()
        .unwrap_or(0);
    if largest > MAX_LABELS_FOR_SEARCH {
        return Err(Error::CardinalityMismatch(format!(
            "label search supports at most {MAX_LABELS_FOR_SEARCH} labels per set, got {largest}"
        )));
    }

    // Variables: (kind, index in e1). Kinds: 0 = a2_of_b, 1 = b2_of_a,
    // 2 = x2_of_y, 3 = y2_of_x. Settings first, interleaved, then outcomes.
    let sizes = [s1.b.len(), s1.a.len(), s1.y.len(), s1.x.len()];
    let mut order = Vec::new();
    for pair in [[2usize, 3usize], [0, 1]] {
        let n = sizes[pair[0]].max(sizes[pair[1]]);
        for i in 0..n {
            for &k in &pair {
                if i < sizes[k] {
                    order.push((k, i));
                }
            }
        }
    }

    let mut search = LabelSearch {
        e1,
        e2,
        tol,
        limit,
        order,
        maps: sizes.map(|n| vec![None; n]),
        used: sizes.map(|n| vec![false; n]),
        found: Vec::new(),
    };
    search.run(0);
    Ok(search.found)
}

struct LabelSearch<'a> {
    e1: &'a Experiment,
    e2: &'a Experiment,
    tol: Tolerance,
    limit: usize,
    order: Vec<(usize, usize)>,
    maps: [Vec<Option<usize>>; 4],
    used: [Vec<bool>; 4],
    found: Vec<TimeReverseWitness>,
}

impl LabelSearch<'_> {
    fn run(&mut self, depth: usize) {
        if self.found.len() >= self.limit {
            return;
        }
        if depth == self.order.len() {
            let full = |v: &Vec<Option<usize>>| v.iter().map(|o| o.unwrap()).collect();
            let map = Relabelling {
                a2_of_b: full(&self.maps[0]),
                b2_of_a: full(&self.maps[1]),
                x2_of_y: full(&self.maps[2]),
                y2_of_x: full(&self.maps[3]),
            };
            if let Ok(w) = check_time_reverse_pair_with(self.e1, self.e2, &map, self.tol) {
                self.found.push(w);
            }
            return;
        }
        let (kind, i) = self.order[depth];
        for target in 0..self.used[kind].len() {
            if self.used[kind][target] {
                continue;
            }
            self.maps[kind][i] = Some(target);
            self.used[kind][target] = true;
            if self.consistent(kind, i) {
                self.run(depth + 1);
            }
            self.used[kind][target] = false;
            self.maps[kind][i] = None;
        }
    }

    /// Checks every fully-mapped cell touching the variable just assigned.
    fn consistent(&self, kind: usize, i: usize) -> bool {
        let s1 = self.e1.signature();
        let range = |k: usize, n: usize| -> Vec<usize> {
            if k == kind {
                vec![i]
            } else {
                (0..n).collect()
            }
        };
        for b in range(0, s1.b.len()) {
            let Some(a2) = self.maps[0][b] else { continue };
            for a in range(1, s1.a.len()) {
                let Some(b2) = self.maps[1][a] else { continue };
                for y in range(2, s1.y.len()) {
                    let Some(x2) = self.maps[2][y] else { continue };
                    for x in range(3, s1.x.len()) {
                        let Some(y2) = self.maps[3][x] else { continue };
                        if !self
                            .e1
                            .p(a, b, x, y)
                            .same(self.e2.p(a2, b2, x2, y2), self.tol)
                        {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm() -> LabelSet {
        LabelSet::new(["+1", "-1"]).unwrap()
    }

    fn bits() -> LabelSet {
        LabelSet::new(["0", "1"]).unwrap()
    }

    fn binary_sig() -> Signature {
        Signature::new(pm(), pm(), bits(), bits())
    }

    /// p(a,b|x,y) = δ_{b,x} / 2: the outcome copies the preparation input.
    fn copy_x() -> Experiment {
        Experiment::from_fn("copy-x", binary_sig(), |_, b, x, _| {
            if b == x {
                Scalar::ratio(1, 2)
            } else {
                Scalar::ratio(0, 1)
            }
        })
        .unwrap()
    }

    #[test]
    fn label_set_invariants() {
        assert!(LabelSet::new(Vec::<String>::new()).is_err());
        assert!(LabelSet::new(["a", "a"]).is_err());
        assert_eq!(LabelSet::numbered(3).unwrap().labels(), ["1", "2", "3"]);
    }

    #[test]
    fn shape_and_mode_checked() {
        let r = Experiment::new("bad", binary_sig(), vec![Scalar::ratio(1, 4); 15]);
        assert!(matches!(r, Err(Error::Shape(_))));
        let mut cells = vec![Scalar::ratio(1, 4); 16];
        cells[3] = Scalar::Float(0.25);
        assert!(Experiment::new("mixed", binary_sig(), cells).is_err());
    }

    #[test]
    fn unnormalized_column_is_reported() {
        let e = Experiment::from_fn("bad", binary_sig(), |a, b, x, y| match (a, b, x, y) {
            (0, 0, 0, 0) => Scalar::ratio(1, 1),
            (0, 1, 0, 0) => Scalar::ratio(1, 4),
            (_, _, 0, 0) => Scalar::ratio(0, 1),
            _ => Scalar::ratio(1, 4),
        })
        .unwrap();
        let report = validate(&e, Tolerance::DEFAULT);
        assert!(report.out_of_range.is_empty());
        assert_eq!(report.unnormalized.len(), 1);
        assert_eq!(report.unnormalized[0].x, "0");
        assert_eq!(report.unnormalized[0].y, "0");
        assert_eq!(report.unnormalized[0].sum, Scalar::ratio(5, 4));
    }

    #[test]
    fn copy_x_signals() {
        let e = copy_x();
        assert!(validate(&e, Tolerance::DEFAULT).is_ok());
        let ns = check_no_signalling(&e, Tolerance::DEFAULT);
        assert!(!ns.to_past);
        assert!(ns.to_future);
        let w = ns.past_witness.unwrap();
        assert_eq!(w.outcome, "b=+1");
        assert_eq!(w.values, (Scalar::ratio(1, 1), Scalar::ratio(0, 1)));
    }

    #[test]
    fn copy_x_is_not_self_reverse() {
        assert!(!is_self_time_reverse(&copy_x(), Tolerance::DEFAULT).unwrap());
    }

    #[test]
    fn cardinality_mismatch() {
        let three = LabelSet::new(["u", "v", "w"]).unwrap();
        let e1 = copy_x();
        let sig2 = Signature::new(pm(), three, bits(), bits());
        let e2 = Experiment::from_fn("e2", sig2, |_, _, _, _| Scalar::ratio(1, 6)).unwrap();
        assert!(matches!(
            check_time_reverse_pair(&e1, &e2, Tolerance::DEFAULT),
            Err(ReverseFailure::CardinalityMismatch(_))
        ));
        let sig3 = Signature::new(
            pm(),
            LabelSet::new(["u", "v", "w"]).unwrap(),
            bits(),
            bits(),
        );
        let e3 = Experiment::from_fn("e3", sig3, |_, _, _, _| Scalar::ratio(1, 6)).unwrap();
        assert!(matches!(
            is_self_time_reverse(&e3, Tolerance::DEFAULT),
            Err(Error::CardinalityMismatch(_))
        ));
    }

    #[test]
    fn reverse_of_copy_x_is_its_partner() {
        let e = copy_x();
        let r = reverse(&e, "copy-x-rev");
        let w = check_time_reverse_pair(&e, &r, Tolerance::DEFAULT).unwrap();
        assert!(!w.self_reverse);
        assert_eq!(w.partner, "copy-x-rev");
        assert_eq!(reverse(&r, "copy-x"), e);
    }

    #[test]
    fn symmetric_table_is_self_reverse() {
        let e = Experiment::from_fn("sym", binary_sig(), |a, b, x, y| {
            let corr = if a == b { 1 } else { -1 };
            let weight = if x == y { 2 } else { 1 };
            Scalar::ratio(4 + corr * weight, 16)
        })
        .unwrap();
        let w = check_time_reverse_pair(&e, &e, Tolerance::DEFAULT).unwrap();
        assert!(w.self_reverse);
        assert_eq!(
            w.x_prime_is_y,
            vec![("0".into(), "0".into()), ("1".into(), "1".into())]
        );
    }

    #[test]
    fn label_search_finds_renamed_partner() {
        let e = copy_x();
        // Reverse, then reorder the a' labels so positional matching fails.
        let r = reverse(&e, "r");
        let swapped_a = Signature::new(
            LabelSet::new(["-1", "+1"]).unwrap(),
            r.omega_b().clone(),
            r.omega_x().clone(),
            r.omega_y().clone(),
        );
        let r2 =
            Experiment::from_fn("r2", swapped_a, |a, b, x, y| r.p(1 - a, b, x, y).clone()).unwrap();
        assert!(check_time_reverse_pair(&e, &r2, Tolerance::DEFAULT).is_err());
        let found = search_time_reverse_labellings(&e, &r2, Tolerance::DEFAULT, 100).unwrap();
        // The table is unchanged by swapping the a labels, by swapping the y
        // labels, and by swapping b and x together: 2³ identifications.
        assert_eq!(found.len(), 8);
        assert!(found.iter().any(|w| w.a_prime_is_b
            == vec![
                ("+1".to_string(), "+1".to_string()),
                ("-1".to_string(), "-1".to_string())
            ]
            && w.x_prime_is_y
                == vec![
                    ("0".to_string(), "0".to_string()),
                    ("1".to_string(), "1".to_string())
                ]));
        let first = search_time_reverse_labellings(&e, &r2, Tolerance::DEFAULT, 1).unwrap();
        assert_eq!(first.len(), 1);
    }

    #[test]
    fn partners_in_collection() {
        let e = copy_x();
        let r = reverse(&e, "r");
        let found = time_reverse_partners(
            &e,
            &[e.clone(), r.clone(), r.renamed("r-again")],
            Tolerance::DEFAULT,
        );
        let names: Vec<_> = found.iter().map(|w| w.partner.as_str()).collect();
        assert_eq!(names, ["r", "r-again"]);
    }

    #[test]
    fn zero_marginal_conditional_is_undefined() {
        let e = copy_x();
        // p(a=+1 | x=0, y=0) = 1/2, so conditionals on it are defined
        assert_eq!(
            e.outcome_given_output(0, 0, 0, 0),
            Conditional::Defined(Scalar::ratio(1, 1))
        );
        let sig = Signature::new(pm(), pm(), bits(), bits());
        let det = Experiment::from_fn("det", sig, |a, b, _, _| {
            if a == 0 && b == 0 {
                Scalar::ratio(1, 1)
            } else {
                Scalar::ratio(0, 1)
            }
        })
        .unwrap();
        assert_eq!(det.outcome_given_output(0, 1, 0, 0), Conditional::Undefined);
    }
}
