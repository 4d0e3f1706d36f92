//! JSON document formats: parsing with invariant validation and precise
//! error paths, plus inline serialization.
//!
//! Every document is an object with a `"kind"` field: `groupoid`,
//! `functor`, `span`, `local_system`, `decorated_object`, or
//! `decorated_span`. Wherever a sub-document is expected, a JSON string may
//! be given instead; it is read as a file path relative to the directory of
//! the referring document. Rationals are strings like `"3"` or `"-1/2"`.

use crate::groupoid::{Axiom, FiniteGroupoid, Gpd, GroupoidError, GroupoidFunctor};
use crate::linalg::{RatMatrix, Rational};
use crate::local_system::LocalSystem;
use crate::span::Span;
use crate::tft::{DecoratedObject, DecoratedSpan};
use serde_json::Value;
use std::path::{Path, PathBuf};
use thiserror::Error;

const MAX_REF_DEPTH: usize = 16;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invariant violation at {path}: {axiom} ({message})")]
    Invariant {
        path: String,
        axiom: String,
        message: String,
    },
}

impl JsonError {
    fn parse(path: &str, message: impl Into<String>) -> JsonError {
        JsonError::Parse {
            path: path.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Clone)]
pub enum Document {
    Groupoid(Gpd),
    Functor(GroupoidFunctor),
    Span(Span),
    LocalSystem(LocalSystem),
    DecoratedObject(DecoratedObject),
    DecoratedSpan(DecoratedSpan),
}

impl std::fmt::Debug for Document {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Document({})", self.kind())
    }
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Groupoid(_) => "groupoid",
            Document::Functor(_) => "functor",
            Document::Span(_) => "span",
            Document::LocalSystem(_) => "local_system",
            Document::DecoratedObject(_) => "decorated_object",
            Document::DecoratedSpan(_) => "decorated_span",
        }
    }
}

/// Loads and validates a document from a file.
pub fn load_document(fs_path: &Path) -> Result<Document, JsonError> {
    load_with_depth(fs_path, 0)
}

fn load_with_depth(fs_path: &Path, depth: usize) -> Result<Document, JsonError> {
    if depth > MAX_REF_DEPTH {
        return Err(JsonError::parse("$", "reference chain too deep"));
    }
    let bytes = std::fs::read(fs_path).map_err(|e| JsonError::Io {
        path: fs_path.to_path_buf(),
        message: e.to_string(),
    })?;
    let value: Value = serde_json::from_slice(&bytes)
        .map_err(|e| JsonError::parse("$", format!("invalid JSON: {e}")))?;
    let dir = fs_path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
    parse_document_value(&value, &dir, "$", depth)
}

/// Parses a document from raw bytes; references resolve against `dir`.
pub fn parse_document(bytes: &[u8], dir: &Path) -> Result<Document, JsonError> {
    let value: Value = serde_json::from_slice(bytes)
        .map_err(|e| JsonError::parse("$", format!("invalid JSON: {e}")))?;
    parse_document_value(&value, dir, "$", 0)
}

fn parse_document_value(
    v: &Value,
    dir: &Path,
    jp: &str,
    depth: usize,
) -> Result<Document, JsonError> {
    if let Value::String(s) = v {
        return load_with_depth(&dir.join(s), depth + 1);
    }
    let obj = v
        .as_object()
        .ok_or_else(|| JsonError::parse(jp, "expected an object or a file reference"))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| JsonError::parse(&format!("{jp}.kind"), "missing or non-string kind"))?;
    match kind {
        "groupoid" => Ok(Document::Groupoid(parse_groupoid(v, dir, jp, depth)?)),
        "functor" => Ok(Document::Functor(parse_functor(v, dir, jp, depth)?)),
        "span" => Ok(Document::Span(parse_span(v, dir, jp, depth)?)),
        "local_system" => Ok(Document::LocalSystem(parse_local_system(v, dir, jp, depth)?)),
        "decorated_object" => Ok(Document::DecoratedObject(parse_decorated_object(
            v, dir, jp, depth,
        )?)),
        "decorated_span" => Ok(Document::DecoratedSpan(parse_decorated_span(
            v, dir, jp, depth,
        )?)),
        other => Err(JsonError::parse(
            &format!("{jp}.kind"),
            format!("unknown document kind {other:?}"),
        )),
    }
}

fn field<'a>(v: &'a Value, jp: &str, name: &str) -> Result<&'a Value, JsonError> {
    v.get(name)
        .ok_or_else(|| JsonError::parse(&format!("{jp}.{name}"), "missing field"))
}

fn as_usize(v: &Value, jp: &str) -> Result<usize, JsonError> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| JsonError::parse(jp, "expected a non-negative integer"))
}

fn usize_array(v: &Value, jp: &str) -> Result<Vec<usize>, JsonError> {
    let arr = v
        .as_array()
        .ok_or_else(|| JsonError::parse(jp, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| as_usize(x, &format!("{jp}[{i}]")))
        .collect()
}

fn pair_array(v: &Value, jp: &str) -> Result<Vec<(usize, usize)>, JsonError> {
    let arr = v
        .as_array()
        .ok_or_else(|| JsonError::parse(jp, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| {
            let p = usize_array(x, &format!("{jp}[{i}]"))?;
            if p.len() != 2 {
                return Err(JsonError::parse(
                    &format!("{jp}[{i}]"),
                    "expected a [source, target] pair",
                ));
            }
            Ok((p[0], p[1]))
        })
        .collect()
}

fn rational_value(v: &Value, jp: &str) -> Result<Rational, JsonError> {
    let s = v
        .as_str()
        .ok_or_else(|| JsonError::parse(jp, "rationals are strings like \"3\" or \"-1/2\""))?;
    s.parse::<Rational>()
        .map_err(|e| JsonError::parse(jp, e.to_string()))
}

fn matrix_value(v: &Value, jp: &str) -> Result<Vec<Vec<Rational>>, JsonError> {
    let rows = v
        .as_array()
        .ok_or_else(|| JsonError::parse(jp, "expected an array of rows"))?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let cells = row
            .as_array()
            .ok_or_else(|| JsonError::parse(&format!("{jp}[{i}]"), "expected a row array"))?;
        let mut parsed = Vec::with_capacity(cells.len());
        for (j, cell) in cells.iter().enumerate() {
            parsed.push(rational_value(cell, &format!("{jp}[{i}][{j}]"))?);
        }
        out.push(parsed);
    }
    Ok(out)
}

/// Builds a matrix from parsed rows, defaulting shape information from the
/// surrounding context when the row list is empty.
fn matrix_with_shape(
    rows: Vec<Vec<Rational>>,
    expect_rows: usize,
    expect_cols: usize,
    jp: &str,
) -> Result<RatMatrix, JsonError> {
    if rows.is_empty() {
        if expect_rows == 0 {
            return Ok(RatMatrix::zeros(0, expect_cols));
        }
        return Err(JsonError::parse(jp, "matrix has no rows"));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(JsonError::parse(jp, "ragged matrix"));
    }
    let _ = (expect_rows, expect_cols);
    Ok(RatMatrix::from_rows(rows))
}

fn groupoid_axiom_path(jp: &str, axiom: Axiom) -> String {
    let leaf = match axiom {
        Axiom::Totality | Axiom::Endpoints | Axiom::Associativity => ".compose",
        Axiom::Identity => ".identity",
        Axiom::Inverse => ".inverse",
        Axiom::Shape => "",
    };
    format!("{jp}{leaf}")
}

fn parse_groupoid(v: &Value, dir: &Path, jp: &str, depth: usize) -> Result<Gpd, JsonError> {
    if let Value::String(_) = v {
        return match parse_document_value(v, dir, jp, depth)? {
            Document::Groupoid(g) => Ok(g),
            other => Err(JsonError::parse(jp, format!("expected groupoid, found {}", other.kind()))),
        };
    }
    let objects = as_usize(field(v, jp, "objects")?, &format!("{jp}.objects"))?;
    let morphisms = pair_array(field(v, jp, "morphisms")?, &format!("{jp}.morphisms"))?;
    let identity = usize_array(field(v, jp, "identity")?, &format!("{jp}.identity"))?;
    let inverse = usize_array(field(v, jp, "inverse")?, &format!("{jp}.inverse"))?;
    let compose_field = field(v, jp, "compose")?;
    let arr = compose_field
        .as_array()
        .ok_or_else(|| JsonError::parse(&format!("{jp}.compose"), "expected an array"))?;
    let mut compose = Vec::with_capacity(arr.len());
    for (i, t) in arr.iter().enumerate() {
        let triple = usize_array(t, &format!("{jp}.compose[{i}]"))?;
        if triple.len() != 3 {
            return Err(JsonError::parse(
                &format!("{jp}.compose[{i}]"),
                "expected a [g, f, gf] triple",
            ));
        }
        compose.push((triple[0], triple[1], triple[2]));
    }
    let label = v.get("label").and_then(Value::as_str).map(str::to_string);
    FiniteGroupoid::from_table_parts(label, objects, morphisms, identity, compose, inverse)
        .map_err(|e| match e {
            GroupoidError::InvariantViolation { axiom, detail } => JsonError::Invariant {
                path: groupoid_axiom_path(jp, axiom),
                axiom: axiom.to_string(),
                message: detail,
            },
            other => JsonError::parse(jp, other.to_string()),
        })
}

fn parse_functor(
    v: &Value,
    dir: &Path,
    jp: &str,
    depth: usize,
) -> Result<GroupoidFunctor, JsonError> {
    if let Value::String(_) = v {
        return match parse_document_value(v, dir, jp, depth)? {
            Document::Functor(f) => Ok(f),
            other => Err(JsonError::parse(jp, format!("expected functor, found {}", other.kind()))),
        };
    }
    let domain = parse_groupoid(field(v, jp, "domain")?, dir, &format!("{jp}.domain"), depth)?;
    let codomain = parse_groupoid(
        field(v, jp, "codomain")?,
        dir,
        &format!("{jp}.codomain"),
        depth,
    )?;
    let object_map = usize_array(field(v, jp, "object_map")?, &format!("{jp}.object_map"))?;
    let morphism_map = usize_array(
        field(v, jp, "morphism_map")?,
        &format!("{jp}.morphism_map"),
    )?;
    GroupoidFunctor::new(
        domain,
        codomain,
        object_map.into_iter().map(|x| x as u32).collect(),
        morphism_map.into_iter().map(|x| x as u32).collect(),
    )
    .map_err(|e| JsonError::Invariant {
        path: jp.to_string(),
        axiom: "functor".into(),
        message: e.to_string(),
    })
}

fn parse_span(v: &Value, dir: &Path, jp: &str, depth: usize) -> Result<Span, JsonError> {
    if let Value::String(_) = v {
        return match parse_document_value(v, dir, jp, depth)? {
            Document::Span(s) => Ok(s),
            other => Err(JsonError::parse(jp, format!("expected span, found {}", other.kind()))),
        };
    }
    let apex = parse_groupoid(field(v, jp, "apex")?, dir, &format!("{jp}.apex"), depth)?;
    let left = parse_functor(field(v, jp, "left")?, dir, &format!("{jp}.left"), depth)?;
    let right = parse_functor(field(v, jp, "right")?, dir, &format!("{jp}.right"), depth)?;
    Span::new(apex, left, right).map_err(|e| JsonError::Invariant {
        path: jp.to_string(),
        axiom: "span".into(),
        message: e.to_string(),
    })
}

fn parse_local_system(
    v: &Value,
    dir: &Path,
    jp: &str,
    depth: usize,
) -> Result<LocalSystem, JsonError> {
    if let Value::String(_) = v {
        return match parse_document_value(v, dir, jp, depth)? {
            Document::LocalSystem(l) => Ok(l),
            other => Err(JsonError::parse(
                jp,
                format!("expected local_system, found {}", other.kind()),
            )),
        };
    }
    let base = parse_groupoid(field(v, jp, "base")?, dir, &format!("{jp}.base"), depth)?;
    let dims = usize_array(field(v, jp, "dim")?, &format!("{jp}.dim"))?;
    if dims.len() != base.object_count() {
        return Err(JsonError::parse(
            &format!("{jp}.dim"),
            "one dimension per object required",
        ));
    }
    let action_field = field(v, jp, "action")?;
    let arr = action_field
        .as_array()
        .ok_or_else(|| JsonError::parse(&format!("{jp}.action"), "expected an array"))?;
    if arr.len() != base.morphism_count() {
        return Err(JsonError::parse(
            &format!("{jp}.action"),
            "one matrix per morphism required",
        ));
    }
    let mut actions = Vec::with_capacity(arr.len());
    for (m, mat) in arr.iter().enumerate() {
        let jpm = format!("{jp}.action[{m}]");
        let rows = matrix_value(mat, &jpm)?;
        actions.push(matrix_with_shape(
            rows,
            dims[base.tgt(m)],
            dims[base.src(m)],
            &jpm,
        )?);
    }
    LocalSystem::new(base, dims, actions).map_err(|e| JsonError::Invariant {
        path: jp.to_string(),
        axiom: "local_system".into(),
        message: e.to_string(),
    })
}

fn parse_decorated_object(
    v: &Value,
    dir: &Path,
    jp: &str,
    depth: usize,
) -> Result<DecoratedObject, JsonError> {
    if let Value::String(_) = v {
        return match parse_document_value(v, dir, jp, depth)? {
            Document::DecoratedObject(d) => Ok(d),
            other => Err(JsonError::parse(
                jp,
                format!("expected decorated_object, found {}", other.kind()),
            )),
        };
    }
    let space = parse_groupoid(field(v, jp, "space")?, dir, &format!("{jp}.space"), depth)?;
    let system = parse_local_system(
        field(v, jp, "system")?,
        dir,
        &format!("{jp}.system"),
        depth,
    )?;
    DecoratedObject::new(space, system).map_err(|e| JsonError::Invariant {
        path: jp.to_string(),
        axiom: "decorated_object".into(),
        message: e.to_string(),
    })
}

fn parse_decorated_span(
    v: &Value,
    dir: &Path,
    jp: &str,
    depth: usize,
) -> Result<DecoratedSpan, JsonError> {
    let source = parse_decorated_object(
        field(v, jp, "source")?,
        dir,
        &format!("{jp}.source"),
        depth,
    )?;
    let target = parse_decorated_object(
        field(v, jp, "target")?,
        dir,
        &format!("{jp}.target"),
        depth,
    )?;
    let carrier = parse_span(field(v, jp, "carrier")?, dir, &format!("{jp}.carrier"), depth)?;
    let apex_system = parse_local_system(
        field(v, jp, "apex_system")?,
        dir,
        &format!("{jp}.apex_system"),
        depth,
    )?;
    let parse_components = |name: &str,
                            foot: &DecoratedObject,
                            leg: &GroupoidFunctor|
     -> Result<Vec<RatMatrix>, JsonError> {
        let jpc = format!("{jp}.{name}");
        let arr = field(v, jp, name)?
            .as_array()
            .ok_or_else(|| JsonError::parse(&jpc, "expected an array of matrices"))?;
        if arr.len() != carrier.apex().object_count() {
            return Err(JsonError::parse(&jpc, "one matrix per apex object required"));
        }
        arr.iter()
            .enumerate()
            .map(|(o, mat)| {
                let jpo = format!("{jpc}[{o}]");
                let rows = matrix_value(mat, &jpo)?;
                matrix_with_shape(
                    rows,
                    foot.system.dim(leg.obj(o)),
                    apex_system.dim(o),
                    &jpo,
                )
            })
            .collect()
    };
    let left_components = parse_components("left_dec", &source, carrier.left())?;
    let right_components = parse_components("right_dec", &target, carrier.right())?;
    DecoratedSpan::new(
        source,
        target,
        carrier,
        apex_system,
        left_components,
        right_components,
    )
    .map_err(|e| JsonError::Invariant {
        path: jp.to_string(),
        axiom: "decorated_span".into(),
        message: e.to_string(),
    })
}

// ---------------------------------------------------------------------------
// Serialization (always inline).

pub fn rational_to_value(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn matrix_to_value(m: &RatMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| {
                Value::Array(
                    (0..m.cols())
                        .map(|j| rational_to_value(m.get(i, j)))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn groupoid_to_value(g: &Gpd) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("kind".into(), "groupoid".into());
    obj.insert("objects".into(), (g.object_count() as u64).into());
    obj.insert(
        "morphisms".into(),
        Value::Array(
            (0..g.morphism_count())
                .map(|m| Value::Array(vec![(g.src(m) as u64).into(), (g.tgt(m) as u64).into()]))
                .collect(),
        ),
    );
    obj.insert(
        "identity".into(),
        Value::Array(
            (0..g.object_count())
                .map(|x| (g.identity_of(x) as u64).into())
                .collect(),
        ),
    );
    obj.insert(
        "compose".into(),
        Value::Array(
            g.compose_entries()
                .into_iter()
                .map(|(a, b, c)| {
                    Value::Array(vec![(a as u64).into(), (b as u64).into(), (c as u64).into()])
                })
                .collect(),
        ),
    );
    obj.insert(
        "inverse".into(),
        Value::Array(
            (0..g.morphism_count())
                .map(|m| (g.inverse_of(m) as u64).into())
                .collect(),
        ),
    );
    if let Some(label) = g.label() {
        obj.insert("label".into(), label.into());
    }
    Value::Object(obj)
}

pub fn functor_to_value(f: &GroupoidFunctor) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("kind".into(), "functor".into());
    obj.insert("domain".into(), groupoid_to_value(f.domain()));
    obj.insert("codomain".into(), groupoid_to_value(f.codomain()));
    obj.insert(
        "object_map".into(),
        Value::Array(f.object_map().iter().map(|&x| (x as u64).into()).collect()),
    );
    obj.insert(
        "morphism_map".into(),
        Value::Array(f.morphism_map().iter().map(|&x| (x as u64).into()).collect()),
    );
    Value::Object(obj)
}

pub fn span_to_value(s: &Span) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("kind".into(), "span".into());
    obj.insert("apex".into(), groupoid_to_value(s.apex()));
    obj.insert("left".into(), functor_to_value(s.left()));
    obj.insert("right".into(), functor_to_value(s.right()));
    Value::Object(obj)
}

pub fn local_system_to_value(l: &LocalSystem) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("kind".into(), "local_system".into());
    obj.insert("base".into(), groupoid_to_value(l.base()));
    obj.insert(
        "dim".into(),
        Value::Array(l.dims().iter().map(|&d| (d as u64).into()).collect()),
    );
    obj.insert(
        "action".into(),
        Value::Array(
            (0..l.base().morphism_count())
                .map(|m| matrix_to_value(&l.action(m)))
                .collect(),
        ),
    );
    Value::Object(obj)
}

pub fn decorated_object_to_value(d: &DecoratedObject) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("kind".into(), "decorated_object".into());
    obj.insert("space".into(), groupoid_to_value(&d.space));
    obj.insert("system".into(), local_system_to_value(&d.system));
    Value::Object(obj)
}

pub fn decorated_span_to_value(d: &DecoratedSpan) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("kind".into(), "decorated_span".into());
    obj.insert("source".into(), decorated_object_to_value(d.source()));
    obj.insert("target".into(), decorated_object_to_value(d.target()));
    obj.insert("carrier".into(), span_to_value(d.carrier()));
    obj.insert(
        "apex_system".into(),
        local_system_to_value(&d.apex_system().materialize()),
    );
    obj.insert(
        "left_dec".into(),
        Value::Array(d.left_dec().components().iter().map(matrix_to_value).collect()),
    );
    obj.insert(
        "right_dec".into(),
        Value::Array(d.right_dec().components().iter().map(matrix_to_value).collect()),
    );
    Value::Object(obj)
}

pub fn document_to_value(d: &Document) -> Value {
    match d {
        Document::Groupoid(g) => groupoid_to_value(g),
        Document::Functor(f) => functor_to_value(f),
        Document::Span(s) => span_to_value(s),
        Document::LocalSystem(l) => local_system_to_value(l),
        Document::DecoratedObject(o) => decorated_object_to_value(o),
        Document::DecoratedSpan(s) => decorated_span_to_value(s),
    }
}
