//! Scene documents: a pattern, a screen family or a ball configuration,
//! plus optional `d`, `seed` and `tol`.
//!
//! ```json
//! {"normals": [[1, 0], ["-1/2", 0.8660254037844386]]}
//! {"d": 3, "screens": [{"lambda": 2.0, "n": [1, 0]}]}
//! {"d": 3, "balls": [{"center": [-1, 0, 3], "radius": 1}], "seed": 7}
//! ```
//!
//! Pattern coordinates are read exactly: JSON numbers by their decimal
//! text, strings as `p/q` or decimals.

use num_rational::BigRational;
use pinning_core::balls::{Ball, BallConfig, BallsError};
use pinning_core::exact::{parse_rational, QVec2};
use pinning_core::linespace::{LinespaceError, Screen, ScreenFamily};
use pinning_core::pattern2d::{HalfplanePattern, PatternError};
use serde_json::{json, Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("schema: {0}")]
    Schema(String),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Linespace(#[from] LinespaceError),
    #[error(transparent)]
    Balls(#[from] BallsError),
}

fn schema<T>(msg: impl Into<String>) -> Result<T, SceneError> {
    Err(SceneError::Schema(msg.into()))
}

#[derive(Debug, Clone, Default)]
pub struct SceneFile {
    pub d: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub pattern: Option<HalfplanePattern>,
    pub screens: Option<ScreenFamily>,
    pub balls: Option<BallConfig>,
}

const KEYS: [&str; 6] = ["d", "seed", "tol", "normals", "screens", "balls"];

impl SceneFile {
    pub fn parse(text: &str) -> Result<Self, SceneError> {
        let v: Value = serde_json::from_str(text)?;
        let Value::Object(obj) = v else { return schema("top level must be an object") };
        if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return schema(format!("unknown key \"{k}\""));
        }
        let d = match obj.get("d") {
            None => None,
            Some(x) => Some(x.as_u64().filter(|&d| d >= 2).ok_or(SceneError::Schema("d must be an integer >= 2".into()))?
                as usize),
        };
        let seed = match obj.get("seed") {
            None => None,
            Some(x) => Some(x.as_u64().ok_or(SceneError::Schema("seed must be a nonnegative integer".into()))?),
        };
        let tol = match obj.get("tol") {
            None => None,
            Some(x) => Some(x.as_f64().filter(|t| *t > 0.0).ok_or(SceneError::Schema("tol must be positive".into()))?),
        };
        let pattern = obj.get("normals").map(parse_normals).transpose()?;
        let screens = match obj.get("screens") {
            None => None,
            Some(s) => {
                let Some(d) = d else { return schema("\"screens\" needs \"d\"") };
                Some(parse_screens(d, s)?)
            }
        };
        let balls = match obj.get("balls") {
            None => None,
            Some(b) => {
                let Some(d) = d else { return schema("\"balls\" needs \"d\"") };
                Some(parse_balls(d, b)?)
            }
        };
        if pattern.is_none() && screens.is_none() && balls.is_none() {
            return schema("expected one of \"normals\", \"screens\", \"balls\"");
        }
        if let (Some(_), Some(d)) = (&pattern, d) {
            if d != 3 && balls.is_none() && screens.is_none() {
                return schema("a pattern document describes d = 3");
            }
        }
        Ok(Self { d, seed, tol, pattern, screens, balls })
    }

    pub fn read(path: &str) -> Result<Self, SceneError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| SceneError::Read { path: path.to_string(), source })?;
        Self::parse(&text)
    }

    pub fn require_pattern(&self) -> Result<&HalfplanePattern, SceneError> {
        self.pattern.as_ref().ok_or(SceneError::Schema("scene has no \"normals\"".into()))
    }

    pub fn require_balls(&self) -> Result<&BallConfig, SceneError> {
        self.balls.as_ref().ok_or(SceneError::Schema("scene has no \"balls\"".into()))
    }
}

fn exact_coordinate(v: &Value) -> Result<BigRational, SceneError> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return schema("normal coordinates must be numbers or strings"),
    };
    parse_rational(&text).map_err(|e| SceneError::Schema(format!("bad coordinate \"{text}\": {e}")))
}

fn parse_normals(v: &Value) -> Result<HalfplanePattern, SceneError> {
    let Some(list) = v.as_array() else { return schema("\"normals\" must be an array") };
    let mut out = Vec::with_capacity(list.len());
    for item in list {
        match item.as_array().map(Vec::as_slice) {
            Some([x, y]) => out.push(QVec2::new(exact_coordinate(x)?, exact_coordinate(y)?)),
            _ => return schema("each normal must be a pair [x, y]"),
        }
    }
    Ok(HalfplanePattern::new(out)?)
}

fn reals(v: &Value, what: &str) -> Result<Vec<f64>, SceneError> {
    let Some(list) = v.as_array() else { return schema(format!("{what} must be an array of numbers")) };
    list.iter()
        .map(|x| x.as_f64().ok_or(SceneError::Schema(format!("{what} must be an array of numbers"))))
        .collect()
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, what: &str) -> Result<&'a Value, SceneError> {
    obj.get(key).ok_or(SceneError::Schema(format!("{what} is missing \"{key}\"")))
}

fn parse_screens(d: usize, v: &Value) -> Result<ScreenFamily, SceneError> {
    let Some(list) = v.as_array() else { return schema("\"screens\" must be an array") };
    let mut screens = Vec::with_capacity(list.len());
    for item in list {
        let Some(obj) = item.as_object() else { return schema("each screen must be an object") };
        let lambda = field(obj, "lambda", "screen")?
            .as_f64()
            .ok_or(SceneError::Schema("screen lambda must be a number".into()))?;
        let n = reals(field(obj, "n", "screen")?, "screen n")?;
        screens.push(Screen::new(lambda, &n)?);
    }
    Ok(ScreenFamily::new(d, screens)?)
}

fn parse_balls(d: usize, v: &Value) -> Result<BallConfig, SceneError> {
    let Some(list) = v.as_array() else { return schema("\"balls\" must be an array") };
    let mut balls = Vec::with_capacity(list.len());
    for item in list {
        let Some(obj) = item.as_object() else { return schema("each ball must be an object") };
        let center = reals(field(obj, "center", "ball")?, "ball center")?;
        let radius = field(obj, "radius", "ball")?
            .as_f64()
            .ok_or(SceneError::Schema("ball radius must be a number".into()))?;
        balls.push(Ball::new(center, radius)?);
    }
    Ok(BallConfig::new(d, balls)?)
}

pub fn balls_document(c: &BallConfig) -> Value {
    json!({ "d": c.d, "balls": c.balls })
}

pub fn screens_document(f: &ScreenFamily) -> Value {
    json!({ "d": f.d, "screens": f.screens })
}

pub fn pattern_document(p: &HalfplanePattern) -> Value {
    serde_json::to_value(p).expect("patterns serialize")
}
