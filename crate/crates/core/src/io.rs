//! Canonical JSON model files.
//!
//! A file holds an `"experiment"` object and optionally an `"ont_model"`
//! object. Tables are lists of cell records whose `p` field is a scalar
//! string; every cell must be present. Output is pretty-printed with sorted
//! keys, records in label order and canonical scalar strings, so emitting a
//! parsed file reproduces it byte for byte.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::numerics::{Direction, Mode, Scalar, Tolerance};
use crate::ontological::{OntModel, OnticLabel, OnticSpace};
use crate::operational::{DirectionMap, Experiment, LabelSet, Signature};
use crate::quantum::Settings;
use crate::theorems::Certificate;

/// Contents of a model file.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelFile {
    pub experiment: Experiment,
    pub model: Option<OntModel>,
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, ctx: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| schema(format!("{ctx}: missing field `{key}`")))
}

fn object<'a>(v: &'a Value, ctx: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| schema(format!("{ctx}: expected an object")))
}

fn array<'a>(v: &'a Value, ctx: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| schema(format!("{ctx}: expected an array")))
}

fn label_text(v: &Value, ctx: &str) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string()),
        _ => Err(schema(format!("{ctx}: labels must be strings or integers"))),
    }
}

fn label_set(obj: &Map<String, Value>, key: &str) -> Result<LabelSet> {
    let items = array(field(obj, key, "experiment")?, key)?;
    let labels = items
        .iter()
        .map(|v| label_text(v, key))
        .collect::<Result<Vec<_>>>()?;
    LabelSet::new(labels)
}

fn ontic_label(v: &Value, ctx: &str) -> Result<OnticLabel> {
    match v {
        Value::Array(parts) => {
            let parts = parts
                .iter()
                .map(|p| label_text(p, ctx))
                .collect::<Result<Vec<_>>>()?;
            OnticLabel::new(parts)
        }
        other => Ok(OnticLabel::single(label_text(other, ctx)?)),
    }
}

fn ontic_json(l: &OnticLabel) -> Value {
    match l.components() {
        [single] => Value::String(single.clone()),
        parts => Value::Array(parts.iter().cloned().map(Value::String).collect()),
    }
}

/// Reads a scalar in the requested mode. Exact mode refuses float text;
/// float mode converts exact values.
pub fn parse_scalar(v: &Value, mode: Mode, ctx: &str) -> Result<Scalar> {
    let parsed: Scalar = match v {
        Value::String(s) => s.parse().map_err(|e| schema(format!("{ctx}: {e}")))?,
        Value::Number(n) => match n.as_i64() {
            Some(i) => Scalar::ratio(i, 1),
            None => Scalar::Float(n.as_f64().unwrap_or(f64::NAN)),
        },
        _ => return Err(schema(format!("{ctx}: expected a scalar string"))),
    };
    match (parsed.mode(), mode) {
        (Mode::Float, Mode::Exact) => {
            Err(schema(format!("{ctx}: float value `{v}` in exact mode")))
        }
        _ => Ok(parsed.into_mode(mode)?),
    }
}

fn scalar_json(s: &Scalar) -> Value {
    Value::String(s.to_string())
}

/// Index lookup for a label field of a cell record.
fn record_index(rec: &Map<String, Value>, key: &str, set: &LabelSet, ctx: &str) -> Result<usize> {
    let text = label_text(field(rec, key, ctx)?, ctx)?;
    set.index_of(&text)
        .ok_or_else(|| schema(format!("{ctx}: unknown {key} label `{text}`")))
}

fn ontic_index(rec: &Map<String, Value>, lambda: &OnticSpace, ctx: &str) -> Result<usize> {
    let l = ontic_label(field(rec, "lambda", ctx)?, ctx)?;
    lambda
        .index_of(&l)
        .ok_or_else(|| schema(format!("{ctx}: unknown lambda label `{l}`")))
}

/// Fills a dense table from cell records. `locate` maps a record to its slot;
/// `describe` names a slot for the missing-cell error.
fn fill_table(
    records: &[Value],
    cells: usize,
    mode: Mode,
    ctx: &str,
    mut locate: impl FnMut(&Map<String, Value>) -> Result<usize>,
    describe: impl Fn(usize) -> String,
) -> Result<Vec<Scalar>> {
    let mut slots: Vec<Option<Scalar>> = vec![None; cells];
    for (i, rec) in records.iter().enumerate() {
        let rctx = format!("{ctx}[{i}]");
        let rec = object(rec, &rctx)?;
        let slot = locate(rec)?;
        if slots[slot].is_some() {
            return Err(schema(format!("{ctx}: duplicate cell {}", describe(slot))));
        }
        slots[slot] = Some(parse_scalar(field(rec, "p", &rctx)?, mode, &rctx)?);
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| schema(format!("{ctx}: missing cell {}", describe(i)))))
        .collect()
}

fn parse_direction(v: &Value, mode: Mode, tol: Tolerance, ctx: &str) -> Result<Direction> {
    let comps = array(v, ctx)?;
    if comps.len() != 3 {
        return Err(schema(format!("{ctx}: a direction has three components")));
    }
    let c = |i: usize| -> Result<Scalar> {
        let s = match &comps[i] {
            Value::String(s) => s.parse().map_err(|e| schema(format!("{ctx}: {e}")))?,
            Value::Number(n) => match n.as_i64() {
                Some(k) if mode == Mode::Exact => Scalar::ratio(k, 1),
                _ => Scalar::Float(n.as_f64().unwrap_or(f64::NAN)),
            },
            _ => return Err(schema(format!("{ctx}: expected a scalar"))),
        };
        match (s.mode(), mode) {
            (Mode::Float, Mode::Exact) => Err(Error::InexactDirection(format!(
                "{ctx}: component `{}` is a float",
                comps[i]
            ))),
            _ => Ok(s.into_mode(mode)?),
        }
    };
    Ok(Direction::new(c(0)?, c(1)?, c(2)?, tol)?)
}

fn direction_json(d: &Direction) -> Value {
    Value::Array(d.components().iter().map(|c| scalar_json(c)).collect())
}

fn parse_experiment(v: &Value, mode: Mode, tol: Tolerance) -> Result<Experiment> {
    let obj = object(v, "experiment")?;
    let name = field(obj, "name", "experiment")?
        .as_str()
        .ok_or_else(|| schema("experiment: `name` must be a string"))?
        .to_string();
    let sig = Signature::new(
        label_set(obj, "omega_a")?,
        label_set(obj, "omega_b")?,
        label_set(obj, "omega_x")?,
        label_set(obj, "omega_y")?,
    );
    let records = array(field(obj, "table", "experiment")?, "table")?;
    let (nb, nx, ny) = (sig.b.len(), sig.x.len(), sig.y.len());
    let table = fill_table(
        records,
        sig.cells(),
        mode,
        "table",
        |rec| {
            let a = record_index(rec, "a", &sig.a, "table")?;
            let b = record_index(rec, "b", &sig.b, "table")?;
            let x = record_index(rec, "x", &sig.x, "table")?;
            let y = record_index(rec, "y", &sig.y, "table")?;
            Ok(((a * nb + b) * nx + x) * ny + y)
        },
        |i| {
            format!(
                "a={}, b={}, x={}, y={}",
                sig.a.label(i / (nb * nx * ny)),
                sig.b.label((i / (nx * ny)) % nb),
                sig.x.label((i / ny) % nx),
                sig.y.label(i % ny)
            )
        },
    )?;
    let e = Experiment::new(name, sig, table)?;
    match obj.get("directions") {
        None => Ok(e),
        Some(d) => {
            let d = object(d, "directions")?;
            let side = |key: &str| -> Result<Vec<Direction>> {
                array(field(d, key, "directions")?, key)?
                    .iter()
                    .map(|v| parse_direction(v, mode, tol, key))
                    .collect()
            };
            let map = DirectionMap {
                x: side("x")?,
                y: side("y")?,
            };
            e.with_directions(map)
        }
    }
}

fn parse_model(v: &Value, e: &Experiment, mode: Mode) -> Result<OntModel> {
    let obj = object(v, "ont_model")?;
    let named = field(obj, "experiment", "ont_model")?
        .as_str()
        .ok_or_else(|| schema("ont_model: `experiment` must be a string"))?;
    if named != e.name() {
        return Err(schema(format!(
            "ont_model refers to experiment `{named}` but the file holds `{}`",
            e.name()
        )));
    }
    let lambda = OnticSpace::new(
        array(field(obj, "lambda", "ont_model")?, "lambda")?
            .iter()
            .map(|v| ontic_label(v, "lambda"))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let sig = e.signature();
    let (na, nb, nx, ny, nl) = (
        sig.a.len(),
        sig.b.len(),
        sig.x.len(),
        sig.y.len(),
        lambda.len(),
    );
    let prep_out = fill_table(
        array(field(obj, "prep_out", "ont_model")?, "prep_out")?,
        na * nx,
        mode,
        "prep_out",
        |rec| {
            let a = record_index(rec, "a", &sig.a, "prep_out")?;
            let x = record_index(rec, "x", &sig.x, "prep_out")?;
            Ok(a * nx + x)
        },
        |i| format!("a={}, x={}", sig.a.label(i / nx), sig.x.label(i % nx)),
    )?;
    let prep_ontic = fill_table(
        array(field(obj, "prep_ontic", "ont_model")?, "prep_ontic")?,
        nl * na * nx,
        mode,
        "prep_ontic",
        |rec| {
            let l = ontic_index(rec, &lambda, "prep_ontic")?;
            let a = record_index(rec, "a", &sig.a, "prep_ontic")?;
            let x = record_index(rec, "x", &sig.x, "prep_ontic")?;
            Ok((l * na + a) * nx + x)
        },
        |i| {
            format!(
                "λ={}, a={}, x={}",
                lambda.label(i / (na * nx)),
                sig.a.label((i / nx) % na),
                sig.x.label(i % nx)
            )
        },
    )?;
    let meas = fill_table(
        array(field(obj, "meas", "ont_model")?, "meas")?,
        nb * nl * ny,
        mode,
        "meas",
        |rec| {
            let b = record_index(rec, "b", &sig.b, "meas")?;
            let l = ontic_index(rec, &lambda, "meas")?;
            let y = record_index(rec, "y", &sig.y, "meas")?;
            Ok((b * nl + l) * ny + y)
        },
        |i| {
            format!(
                "b={}, λ={}, y={}",
                sig.b.label(i / (nl * ny)),
                lambda.label((i / ny) % nl),
                sig.y.label(i % ny)
            )
        },
    )?;
    OntModel::new(e.clone(), lambda, prep_out, prep_ontic, meas)
}

/// Parses a model file. JSON syntax errors carry line and column.
pub fn parse_model_file(text: &str, mode: Mode, tol: Tolerance) -> Result<ModelFile> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    let top = object(&v, "model file")?;
    let experiment = parse_experiment(field(top, "experiment", "model file")?, mode, tol)?;
    let model = match top.get("ont_model") {
        None => None,
        Some(m) => Some(parse_model(m, &experiment, mode)?),
    };
    Ok(ModelFile { experiment, model })
}

pub fn experiment_json(e: &Experiment) -> Value {
    let sig = e.signature();
    let labels =
        |s: &LabelSet| Value::Array(s.labels().iter().cloned().map(Value::String).collect());
    let mut table = Vec::with_capacity(sig.cells());
    for a in 0..sig.a.len() {
        for b in 0..sig.b.len() {
            for x in 0..sig.x.len() {
                for y in 0..sig.y.len() {
                    table.push(json!({
                        "a": sig.a.label(a),
                        "b": sig.b.label(b),
                        "x": sig.x.label(x),
                        "y": sig.y.label(y),
                        "p": scalar_json(e.p(a, b, x, y)),
                    }));
                }
            }
        }
    }
    let mut obj = json!({
        "name": e.name(),
        "omega_a": labels(&sig.a),
        "omega_b": labels(&sig.b),
        "omega_x": labels(&sig.x),
        "omega_y": labels(&sig.y),
        "table": table,
    });
    if let Some(d) = e.directions() {
        obj["directions"] = json!({
            "x": d.x.iter().map(direction_json).collect::<Vec<_>>(),
            "y": d.y.iter().map(direction_json).collect::<Vec<_>>(),
        });
    }
    obj
}

pub fn model_json(m: &OntModel) -> Value {
    let sig = m.experiment().signature();
    let lambda = m.lambda();
    let mut prep_out = Vec::new();
    for a in 0..sig.a.len() {
        for x in 0..sig.x.len() {
            prep_out.push(json!({
                "a": sig.a.label(a),
                "x": sig.x.label(x),
                "p": scalar_json(m.prep_out(a, x)),
            }));
        }
    }
    let mut prep_ontic = Vec::new();
    for l in 0..lambda.len() {
        for a in 0..sig.a.len() {
            for x in 0..sig.x.len() {
                prep_ontic.push(json!({
                    "lambda": ontic_json(lambda.label(l)),
                    "a": sig.a.label(a),
                    "x": sig.x.label(x),
                    "p": scalar_json(m.prep_ontic(l, a, x)),
                }));
            }
        }
    }
    let mut meas = Vec::new();
    for b in 0..sig.b.len() {
        for l in 0..lambda.len() {
            for y in 0..sig.y.len() {
                meas.push(json!({
                    "b": sig.b.label(b),
                    "lambda": ontic_json(lambda.label(l)),
                    "y": sig.y.label(y),
                    "p": scalar_json(m.meas(b, l, y)),
                }));
            }
        }
    }
    json!({
        "experiment": m.experiment().name(),
        "lambda": lambda.labels().iter().map(ontic_json).collect::<Vec<_>>(),
        "prep_out": prep_out,
        "prep_ontic": prep_ontic,
        "meas": meas,
    })
}

pub fn model_file_json(e: &Experiment, m: Option<&OntModel>) -> Value {
    let mut top = json!({ "experiment": experiment_json(e) });
    if let Some(m) = m {
        top["ont_model"] = model_json(m);
    }
    top
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn emit_model_file(e: &Experiment, m: Option<&OntModel>) -> String {
    to_canonical_string(&model_file_json(e, m))
}

pub fn emit_certificate(c: &Certificate) -> String {
    to_canonical_string(&c.to_json())
}

/// Parses a directions file:
/// `{"directions": [[x, y, z], ...], "measurement_directions": [...]}`.
///
/// Without `measurement_directions` the preparation directions are reused.
/// Settings are labelled `"0"`, `"1"`, … in order.
pub fn parse_directions(text: &str, mode: Mode, tol: Tolerance) -> Result<(Settings, Settings)> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    let top = object(&v, "directions file")?;
    let list = |key: &str| -> Result<Vec<Direction>> {
        array(field(top, key, "directions file")?, key)?
            .iter()
            .enumerate()
            .map(|(i, d)| parse_direction(d, mode, tol, &format!("{key}[{i}]")))
            .collect()
    };
    let prep = list("directions")?;
    let meas = match top.get("measurement_directions") {
        Some(_) => list("measurement_directions")?,
        None => prep.clone(),
    };
    if prep.is_empty() || meas.is_empty() {
        return Err(schema("directions file: at least one direction is needed"));
    }
    Ok((Settings::indexed(prep)?, Settings::indexed(meas)?))
}
