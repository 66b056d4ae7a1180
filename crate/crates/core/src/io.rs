//! File formats.
//!
//! - q-cycle set JSON: `{"n": 3, "sigma": [[..]], "delta": [[..]]}`, entries
//!   1-based, `delta` omitted for cycle sets.
//! - q-cycle set text: one line `sigma_x = (cycles)` per point, optional
//!   `delta_x = ...` lines; `#` starts a comment.
//! - brace JSON: `{"n": 4, "add": [[..]], "mul": [[..]]}`, entries 0-based.
//! - dynamical pair JSON: `{"base": <q-cycle set>, "fiber": m, "alpha": A,
//!   "alpha_prime": A'}` where `A[x-1][y-1][s-1][t-1] = α_{(x,y)}(s,t)`, base
//!   points and fiber elements 1-based.
//! - epimorphism JSON: `{"source": <q-cycle set>, "target": <q-cycle set>,
//!   "map": [..]}` with 1-based images; `"map": "retract"` with no target
//!   means the retract projection.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::brace::SkewBrace;
use crate::constructions::{builtin, Builtin, DynamicalPair};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::qcycle::QCycleSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QCycleSetJson {
    pub n: usize,
    pub sigma: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraceJson {
    pub n: usize,
    pub add: Vec<Vec<usize>>,
    pub mul: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynamicalPairJson {
    pub base: QCycleSetJson,
    pub fiber: usize,
    pub alpha: Vec<Vec<Vec<Vec<usize>>>>,
    pub alpha_prime: Vec<Vec<Vec<Vec<usize>>>>,
}

/// Any structure a command can take as input.
#[derive(Clone, Debug)]
pub enum Input {
    QCycle(QCycleSet),
    Brace(SkewBrace),
    Pair(DynamicalPair),
    Epimorphism { source: QCycleSet, target: Option<QCycleSet>, map: Option<Vec<usize>> },
}

fn one_based(table: &[Vec<usize>], name: &str) -> Result<Vec<Vec<usize>>> {
    let n = table.len();
    table
        .iter()
        .enumerate()
        .map(|(x, row)| {
            row.iter()
                .map(|&v| {
                    if v == 0 || v > n {
                        Err(Error::OutOfRange { value: v as i64, n, at: format!("{name} row {}", x + 1) })
                    } else {
                        Ok(v - 1)
                    }
                })
                .collect()
        })
        .collect()
}

fn plus_one(t: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    t.into_iter().map(|r| r.into_iter().map(|v| v + 1).collect()).collect()
}

impl QCycleSetJson {
    pub fn from_structure(x: &QCycleSet) -> QCycleSetJson {
        QCycleSetJson {
            n: x.n(),
            sigma: plus_one(x.sigma_table()),
            delta: (!x.is_cycle_set()).then(|| plus_one(x.delta_table())),
        }
    }

    pub fn into_structure(self) -> Result<QCycleSet> {
        if self.sigma.len() != self.n {
            return Err(Error::Shape(format!("n = {} but sigma has {} rows", self.n, self.sigma.len())));
        }
        let sigma = one_based(&self.sigma, "sigma")?;
        let delta = match &self.delta {
            Some(d) => one_based(d, "delta")?,
            None => sigma.clone(),
        };
        QCycleSet::new(sigma, delta)
    }
}

impl BraceJson {
    pub fn from_brace(b: &SkewBrace) -> BraceJson {
        BraceJson { n: b.n(), add: b.add_table(), mul: b.mul_table() }
    }

    pub fn into_brace(self) -> Result<SkewBrace> {
        if self.add.len() != self.n {
            return Err(Error::Shape(format!("n = {} but add has {} rows", self.n, self.add.len())));
        }
        SkewBrace::new(self.add, self.mul)
    }
}

impl DynamicalPairJson {
    pub fn from_pair(dp: &DynamicalPair) -> DynamicalPairJson {
        let n = dp.base.n();
        let m = dp.fiber;
        let nest = |f: &dyn Fn(usize, usize, usize, usize) -> usize| {
            (0..n)
                .map(|x| (0..n).map(|y| (0..m).map(|s| (0..m).map(|t| f(x, y, s, t) + 1).collect()).collect()).collect())
                .collect()
        };
        DynamicalPairJson {
            base: QCycleSetJson::from_structure(&dp.base),
            fiber: m,
            alpha: nest(&|x, y, s, t| dp.a(x, y, s, t)),
            alpha_prime: nest(&|x, y, s, t| dp.ap(x, y, s, t)),
        }
    }

    pub fn into_pair(self) -> Result<DynamicalPair> {
        let base = self.base.into_structure()?;
        let (n, m) = (base.n(), self.fiber);
        let flat = |name: &str, a: &Vec<Vec<Vec<Vec<usize>>>>| -> Result<Vec<u32>> {
            let mut out = Vec::with_capacity(n * n * m * m);
            let shape = || Error::Shape(format!("{name} must be {n}×{n}×{m}×{m}"));
            if a.len() != n {
                return Err(shape());
            }
            for (x, ax) in a.iter().enumerate() {
                if ax.len() != n {
                    return Err(shape());
                }
                for (y, axy) in ax.iter().enumerate() {
                    if axy.len() != m || axy.iter().any(|r| r.len() != m) {
                        return Err(shape());
                    }
                    for &v in axy.iter().flatten() {
                        if v == 0 || v > m {
                            return Err(Error::OutOfRange { value: v as i64, n: m, at: format!("{name}[{}][{}]", x + 1, y + 1) });
                        }
                        out.push(v as u32 - 1);
                    }
                }
            }
            Ok(out)
        };
        let alpha = flat("alpha", &self.alpha)?;
        let alpha_prime = flat("alpha_prime", &self.alpha_prime)?;
        Ok(DynamicalPair { base, fiber: m, alpha, alpha_prime })
    }
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), col: e.column(), msg: e.to_string() }
}

struct Row {
    x: usize,
    cycles: String,
    line: usize,
    col: usize,
}

/// q-cycle set in the text format.
pub fn parse_qcycle_text(text: &str) -> Result<QCycleSet> {
    let mut sigma: Vec<Row> = Vec::new();
    let mut delta: Vec<Row> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |col: usize, msg: &str| Error::Parse { line: line_no, col, msg: msg.to_string() };
        let (lhs, rhs) = line.split_once('=').ok_or_else(|| err(1, "expected `sigma_x = (cycles)`"))?;
        let lhs = lhs.trim().trim_end_matches(':').trim();
        let (kind, idx) = lhs.split_once('_').ok_or_else(|| err(1, "expected `sigma_x` or `delta_x`"))?;
        let x: usize = idx.trim().parse().map_err(|_| err(kind.len() + 2, "point index is not a positive integer"))?;
        let col = raw.find('=').map_or(1, |c| c + 2);
        let target = match kind.trim() {
            "sigma" | "σ" => &mut sigma,
            "delta" | "δ" => &mut delta,
            _ => return Err(err(1, "expected `sigma_x` or `delta_x`")),
        };
        target.push(Row { x, cycles: rhs.trim().to_string(), line: line_no, col });
    }
    let n = sigma.len();
    if n == 0 {
        return Err(Error::Parse { line: 1, col: 1, msg: "no sigma lines".into() });
    }
    let rows = |list: &[Row], name: &str| -> Result<Vec<Vec<usize>>> {
        let mut out: Vec<Option<Vec<usize>>> = vec![None; n];
        for &Row { x, ref cycles, line, col } in list {
            if x == 0 || x > n || out[x - 1].is_some() {
                return Err(Error::Parse { line, col: 1, msg: format!("{name}_{x} is out of range or repeated") });
            }
            let p = Permutation::parse_cycles(n, cycles).map_err(|e| Error::Parse { line, col, msg: e.to_string() })?;
            out[x - 1] = Some(p.images());
        }
        out.into_iter()
            .enumerate()
            .map(|(x, r)| r.ok_or_else(|| Error::Parse { line: 0, col: 0, msg: format!("{name}_{} missing", x + 1) }))
            .collect()
    };
    let s = rows(&sigma, "sigma")?;
    let d = if delta.is_empty() { s.clone() } else { rows(&delta, "delta")? };
    QCycleSet::new(s, d)
}

/// Text format, 1-based cycles.
pub fn qcycle_to_text(x: &QCycleSet) -> String {
    let mut out = String::new();
    for p in 0..x.n() {
        out.push_str(&format!("sigma_{} = {}\n", p + 1, x.sigma(p)));
    }
    if !x.is_cycle_set() {
        for p in 0..x.n() {
            out.push_str(&format!("delta_{} = {}\n", p + 1, x.delta(p)));
        }
    }
    out
}

/// Parses JSON or text; the kind is inferred from the keys present.
pub fn parse_input(text: &str) -> Result<Input> {
    let trimmed = text.trim_start();
    if !trimmed.starts_with('{') {
        return parse_qcycle_text(text).map(Input::QCycle);
    }
    let v: Value = serde_json::from_str(text).map_err(json_err)?;
    let obj = v.as_object().ok_or_else(|| Error::Parse { line: 1, col: 1, msg: "expected a JSON object".into() })?;
    let from = |v: Value| -> Result<QCycleSet> { serde_json::from_value::<QCycleSetJson>(v).map_err(json_err)?.into_structure() };
    if obj.contains_key("sigma") {
        return from(v).map(Input::QCycle);
    }
    if obj.contains_key("add") {
        return serde_json::from_value::<BraceJson>(v).map_err(json_err)?.into_brace().map(Input::Brace);
    }
    if obj.contains_key("alpha") {
        return serde_json::from_value::<DynamicalPairJson>(v).map_err(json_err)?.into_pair().map(Input::Pair);
    }
    if let Some(src) = obj.get("source") {
        let source = from(src.clone())?;
        let target = obj.get("target").map(|t| from(t.clone())).transpose()?;
        let map = match obj.get("map") {
            Some(Value::String(s)) if s == "retract" => None,
            Some(m) => {
                let imgs: Vec<usize> = serde_json::from_value(m.clone()).map_err(json_err)?;
                if imgs.contains(&0) {
                    return Err(Error::OutOfRange { value: 0, n: imgs.len(), at: "map".into() });
                }
                Some(imgs.into_iter().map(|i| i - 1).collect())
            }
            None => None,
        };
        if map.is_some() != target.is_some() {
            return Err(Error::Parse { line: 1, col: 1, msg: "an explicit map needs a target and vice versa".into() });
        }
        return Ok(Input::Epimorphism { source, target, map });
    }
    Err(Error::Parse { line: 1, col: 1, msg: "unrecognized structure: expected sigma, add, alpha or source".into() })
}

/// A file path, or `builtin:NAME`.
pub fn load(spec: &str) -> Result<Input> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return Ok(match builtin(name)? {
            Builtin::QCycle(x) => Input::QCycle(x),
            Builtin::Brace(b) => Input::Brace(b),
        });
    }
    let text = std::fs::read_to_string(Path::new(spec))
        .map_err(|e| Error::Parse { line: 0, col: 0, msg: format!("{spec}: {e}") })?;
    parse_input(&text)
}

/// Wraps a payload with the tool version and the convention fingerprint.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report<T> {
    pub tool: String,
    pub version: String,
    pub conventions: String,
    pub command: String,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &str, result: T) -> Report<T> {
        Report {
            tool: "ybe".into(),
            version: crate::VERSION.into(),
            conventions: crate::CONVENTIONS.into(),
            command: command.into(),
            result,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
