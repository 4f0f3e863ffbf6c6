//! Concrete experiments and models: qubit prepare-and-measure tables, the
//! Beltrametti-Bugajski model, Maudlin's two-setting model and a classical
//! channel used as a positive control.
//!
//! Spin states are prepared along `n` with output `a = ±1` and measured
//! along `m` with outcome `b = ±1`, which gives
//! `p(a, b | n, m) = ¼ (1 + ab n·m)`.

use crate::error::{Error, Result};
use crate::numerics::{Direction, Mode, Scalar, Tolerance};
use crate::ontological::{OntModel, OnticLabel, OnticSpace};
use crate::operational::{DirectionMap, Experiment, LabelSet, Signature};

pub const PLUS: &str = "+1";
pub const MINUS: &str = "-1";

/// The outcome labels `{+1, -1}`, in that order.
pub fn spin_labels() -> LabelSet {
    LabelSet::new([PLUS, MINUS]).expect("two distinct labels")
}

/// `+1` for index 0, `-1` for index 1 of [`spin_labels`].
fn spin(i: usize) -> i64 {
    if i == 0 {
        1
    } else {
        -1
    }
}

/// A set of labelled directions, used as either preparation or measurement
/// settings.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    labels: LabelSet,
    directions: Vec<Direction>,
}

impl Settings {
    pub fn new(labels: LabelSet, directions: Vec<Direction>) -> Result<Self> {
        if labels.len() != directions.len() {
            return Err(Error::Shape(format!(
                "{} labels for {} directions",
                labels.len(),
                directions.len()
            )));
        }
        Ok(Settings { labels, directions })
    }

    /// Labels `"0"`, `"1"`, … in order.
    pub fn indexed(directions: Vec<Direction>) -> Result<Self> {
        let labels = LabelSet::new((0..directions.len()).map(|i| i.to_string()))?;
        Settings::new(labels, directions)
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    fn in_mode(&self, mode: Mode) -> Result<Vec<Direction>> {
        self.directions
            .iter()
            .zip(self.labels.labels())
            .map(|(d, label)| match (d.mode(), mode) {
                (Mode::Float, Mode::Exact) => Err(Error::InexactDirection(format!(
                    "direction `{label}` has float components"
                ))),
                (Mode::Exact, Mode::Float) => Ok(d.to_float()),
                _ => Ok(d.clone()),
            })
            .collect()
    }
}

/// Spin preparation: input `x` picks a direction, output `a = ±1` is uniform
/// and the state is spin-`a` along it.
pub type QubitPreparation = Settings;

/// Projective spin measurement along the direction picked by `y`.
pub type QubitMeasurement = Settings;

/// `½ (1 + sign · dot)`.
fn half_plus(mode: Mode, sign: i64, dot: &Scalar) -> Scalar {
    let half = Scalar::one(mode) / Scalar::int(2, mode);
    &half * &(Scalar::one(mode) + &Scalar::int(sign, mode) * dot)
}

/// Quantum prediction `¼ (1 + ab n·m)` for every setting pair.
pub fn predict_qubit(
    prep: &QubitPreparation,
    meas: &QubitMeasurement,
    mode: Mode,
) -> Result<Experiment> {
    let ns = prep.in_mode(mode)?;
    let ms = meas.in_mode(mode)?;
    let mut dots = Vec::with_capacity(ns.len() * ms.len());
    for n in &ns {
        for m in &ms {
            dots.push(n.dot(m)?);
        }
    }
    let sig = Signature::new(
        spin_labels(),
        spin_labels(),
        prep.labels.clone(),
        meas.labels.clone(),
    );
    let ny = ms.len();
    let quarter = Scalar::one(mode) / Scalar::int(4, mode);
    let e = Experiment::from_fn("qubit", sig, |a, b, x, y| {
        let ab = Scalar::int(spin(a) * spin(b), mode);
        &quarter * &(Scalar::one(mode) + &ab * &dots[x * ny + y])
    })?;
    e.with_directions(DirectionMap { x: ns, y: ms })
}

/// The Beltrametti-Bugajski model restricted to the preparation directions
/// in use: `Λ = D × {+1, -1}`, the ontic state records the prepared
/// direction and output, and the measurement responds with the Born rule.
pub fn build_bb_model(
    prep: &QubitPreparation,
    meas: &QubitMeasurement,
    mode: Mode,
) -> Result<OntModel> {
    let experiment = predict_qubit(prep, meas, mode)?.renamed("bb");
    let ns = prep.in_mode(mode)?;
    let ms = meas.in_mode(mode)?;
    let mut states = Vec::with_capacity(2 * ns.len());
    for label in prep.labels.labels() {
        for s in [PLUS, MINUS] {
            states.push(OnticLabel::pair(label.clone(), s));
        }
    }
    let lambda = OnticSpace::new(states)?;
    let mut dots = Vec::with_capacity(ns.len() * ms.len());
    for n in &ns {
        for m in &ms {
            dots.push(n.dot(m)?);
        }
    }
    let ny = ms.len();
    let half = Scalar::one(mode) / Scalar::int(2, mode);
    let delta = |same: bool| {
        if same {
            Scalar::one(mode)
        } else {
            Scalar::zero(mode)
        }
    };
    // Ontic index l encodes (direction l / 2, sign l % 2).
    OntModel::from_fns(
        experiment,
        lambda,
        |_, _| half.clone(),
        |l, a, x| delta(l / 2 == x && l % 2 == a),
        |b, l, y| half_plus(mode, spin(l % 2) * spin(b), &dots[(l / 2) * ny + y]),
    )
}

fn exact_direction(x: Scalar, y: Scalar, z: Scalar) -> Direction {
    Direction::new(x, y, z, Tolerance::DEFAULT).expect("unit vector")
}

/// The z axis and the two directions at ±30° from it in the z-x plane.
pub fn maudlin_directions() -> (Settings, Settings) {
    let zero = || Scalar::ratio(0, 1);
    let z_axis = || exact_direction(zero(), zero(), Scalar::ratio(1, 1));
    let tilt =
        |sign: i64| exact_direction(Scalar::ratio(sign, 2), zero(), Scalar::surd(0, 1, 1, 2));
    let prep = Settings::indexed(vec![z_axis(), tilt(1)]).expect("labels");
    let meas = Settings::indexed(vec![z_axis(), tilt(-1)]).expect("labels");
    (prep, meas)
}

/// Maudlin's model: two preparation settings (`X = 0` along z, `X = 1` at
/// +30°) and two measurement settings (`Y = 0` along z, `Y = 1` at −30°).
///
/// `X = 1` and `Y = 1` name different physical directions; the experiment
/// keeps the direction map. Λ = {0, 1} × {+1, −1}.
///
/// The returned table is computed from the model factors rather than typed
/// in, so the ontic state always carries the preparation setting: p(λ₁ | x)
/// is 1 exactly when λ₁ = x.
pub fn build_maudlin() -> (Experiment, OntModel) {
    let (prep, meas) = maudlin_directions();
    let model = build_bb_model(&prep, &meas, Mode::Exact)
        .expect("exact directions")
        .renamed("maudlin");
    (model.experiment().clone(), model)
}

/// A perfect classical channel on `k` symbols with one trivial setting on
/// each side: `a` is uniform, `λ = a` and `b = λ`.
pub fn build_classical_control(k: usize) -> Result<(Experiment, OntModel)> {
    if k == 0 {
        return Err(Error::InvalidLabels(
            "classical control needs k >= 1".into(),
        ));
    }
    let sig = Signature::new(
        LabelSet::numbered(k)?,
        LabelSet::numbered(k)?,
        LabelSet::new(["*"])?,
        LabelSet::new(["*"])?,
    );
    let delta = |i: usize, j: usize| Scalar::ratio((i == j) as i64, 1);
    let model = OntModel::with_induced_experiment(
        format!("classical-{k}"),
        sig,
        OnticSpace::numbered(k)?,
        |_, _| Scalar::ratio(1, k as i64),
        |l, a, _| delta(l, a),
        |b, l, _| delta(b, l),
    )?;
    Ok((model.experiment().clone(), model))
}
