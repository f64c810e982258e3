//! JSON form of complexes and maps. Entries are strings "a" or "a/b".

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::complex::ChainComplex;
use super::map::ChainMap;
use crate::error::{CpmError, Result};
use crate::field::Field;
use crate::matrix::Matrix;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FieldJson {
    Name(String),
    Fp {
        #[serde(rename = "Fp")]
        fp: u64,
    },
}

pub fn field_to_json(f: Field) -> Value {
    match f {
        Field::Q => Value::String("Q".into()),
        Field::Fp(p) => serde_json::json!({ "Fp": p }),
    }
}

pub fn field_from_json(v: &Value) -> Result<Field> {
    match serde_json::from_value::<FieldJson>(v.clone()) {
        Ok(FieldJson::Name(s)) if s == "Q" => Ok(Field::Q),
        Ok(FieldJson::Fp { fp }) => Field::fp(fp),
        _ => Err(CpmError::Parse(format!("unknown field {v}"))),
    }
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| {
                Value::Array(
                    (0..m.cols())
                        .map(|j| Value::String(m.get(i, j).to_text()))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn matrix_from_json(field: Field, v: &Value, rows: usize, cols: usize) -> Result<Matrix> {
    let bad = |s: &str| CpmError::Parse(s.to_string());
    let rs = v.as_array().ok_or_else(|| bad("matrix must be an array of rows"))?;
    if rs.len() != rows {
        return Err(CpmError::Shape(format!("{} rows, expected {rows}", rs.len())));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for r in rs {
        let cs = r.as_array().ok_or_else(|| bad("row must be an array"))?;
        if cs.len() != cols {
            return Err(CpmError::Shape(format!("{} columns, expected {cols}", cs.len())));
        }
        for c in cs {
            let s = match c {
                Value::String(s) => s.clone(),
                Value::Number(n) if n.is_i64() => n.to_string(),
                _ => return Err(bad("matrix entries must be strings")),
            };
            data.push(field.parse(&s)?);
        }
    }
    Matrix::from_rows(field, rows, cols, data)
}

fn parse_deg(s: &str) -> Result<i32> {
    let d: i32 = s
        .parse()
        .map_err(|_| CpmError::Parse(format!("bad degree key {s:?}")))?;
    if d.abs() > 10_000 {
        return Err(CpmError::Parse(format!("degree {d} out of range")));
    }
    Ok(d)
}

pub fn complex_to_json(c: &ChainComplex) -> Value {
    let dims: serde_json::Map<String, Value> = c
        .dims()
        .iter()
        .map(|(n, d)| (n.to_string(), Value::from(*d)))
        .collect();
    let mut diffs = serde_json::Map::new();
    for &n in c.dims().keys() {
        if c.dim(n + 1) > 0 {
            diffs.insert(n.to_string(), matrix_to_json(&c.d(n)));
        }
    }
    serde_json::json!({ "field": field_to_json(c.field()), "dims": dims, "diffs": diffs })
}

const MAX_TOTAL_DIM: usize = 4096;

pub fn complex_from_json(v: &Value) -> Result<ChainComplex> {
    let field = field_from_json(v.get("field").ok_or_else(|| CpmError::Parse("missing field".into()))?)?;
    complex_body_from_json(field, v)
}

fn complex_body_from_json(field: Field, v: &Value) -> Result<ChainComplex> {
    let dims_v = v
        .get("dims")
        .and_then(Value::as_object)
        .ok_or_else(|| CpmError::Parse("missing dims".into()))?;
    let mut dims = BTreeMap::new();
    let mut total = 0usize;
    for (k, d) in dims_v {
        let d = d
            .as_u64()
            .ok_or_else(|| CpmError::Parse(format!("dimension at {k} must be a nonnegative integer")))?
            as usize;
        total = total.saturating_add(d);
        if total > MAX_TOTAL_DIM {
            return Err(CpmError::Parse("complex too large".into()));
        }
        dims.insert(parse_deg(k)?, d);
    }
    let mut diffs = BTreeMap::new();
    if let Some(ds) = v.get("diffs") {
        let ds = ds
            .as_object()
            .ok_or_else(|| CpmError::Parse("diffs must be an object".into()))?;
        for (k, m) in ds {
            let n = parse_deg(k)?;
            let rows = dims.get(&(n + 1)).copied().unwrap_or(0);
            let cols = dims.get(&n).copied().unwrap_or(0);
            diffs.insert(n, matrix_from_json(field, m, rows, cols)?);
        }
    }
    ChainComplex::new(field, dims, diffs)
}

pub fn map_to_json(f: &ChainMap) -> Value {
    let comps: serde_json::Map<String, Value> = f
        .source()
        .dims()
        .keys()
        .filter(|n| f.target().dim(**n + f.degree()) > 0)
        .map(|n| (n.to_string(), matrix_to_json(&f.comp(*n))))
        .collect();
    serde_json::json!({
        "field": field_to_json(f.field()),
        "degree": f.degree(),
        "source": complex_to_json(f.source()),
        "target": complex_to_json(f.target()),
        "components": comps,
    })
}

pub fn map_from_json(v: &Value) -> Result<ChainMap> {
    let field = field_from_json(v.get("field").ok_or_else(|| CpmError::Parse("missing field".into()))?)?;
    let get = |k: &str| v.get(k).ok_or_else(|| CpmError::Parse(format!("missing {k}")));
    let source = complex_body_from_json(field, get("source")?)?;
    let target = complex_body_from_json(field, get("target")?)?;
    let degree = get("degree")?
        .as_i64()
        .filter(|d| d.abs() < 10_000)
        .ok_or_else(|| CpmError::Parse("bad degree".into()))? as i32;
    let mut comps = BTreeMap::new();
    if let Some(cs) = v.get("components").and_then(Value::as_object) {
        for (k, m) in cs {
            let n = parse_deg(k)?;
            comps.insert(
                n,
                matrix_from_json(field, m, target.dim(n + degree), source.dim(n))?,
            );
        }
    }
    ChainMap::new(source, target, degree, comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homalg::random::{random_closed_map, random_complex};

    #[test]
    fn roundtrip() {
        for f in [Field::Q, Field::Fp(32003)] {
            let c = random_complex(f, 11, 3, 3);
            assert_eq!(complex_from_json(&complex_to_json(&c)).unwrap(), c);
            let d = random_complex(f, 12, 3, 3);
            let m = random_closed_map(5, &c, &d);
            assert_eq!(map_from_json(&map_to_json(&m)).unwrap(), m);
        }
    }

    #[test]
    fn rejects_nonzero_square() {
        let v = serde_json::json!({
            "field": "Q",
            "dims": {"0": 1, "1": 1, "2": 1},
            "diffs": {"0": [["1"]], "1": [["1"]]}
        });
        assert!(complex_from_json(&v).is_err());
    }

    #[test]
    fn fp_field_tag() {
        let v = serde_json::json!({"field": {"Fp": 7}, "dims": {"0": 1}});
        assert_eq!(complex_from_json(&v).unwrap().field(), Field::Fp(7));
    }
}
