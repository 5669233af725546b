//! The two JSON document types: stacky fans going in, ring presentations
//! coming out. Integers travel as decimal strings and rationals as `"p/q"`,
//! so nothing is truncated to 64 bits.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use stacky_chow::fan::StackyFan;
use stacky_chow::gradedpoly::{Generator, Poly, Provenance, RingPresentation, Variable};
use stacky_chow::lattice::Coefficients;

use crate::CliError;

pub const SCHEMA: &str = "stacky-chow/1";

/// A stacky fan together with an optional bundle and box labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanDocument {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
    pub b: Vec<Vec<BigInt>>,
    /// Maximal cones as 1-based ray indices.
    pub max_cones: Vec<Vec<usize>>,
    pub bundle: Option<Vec<BigInt>>,
    /// Box index to display label.
    pub labels: BTreeMap<usize, String>,
}

fn schema_err(path: &str, what: &str) -> CliError {
    CliError::Schema(format!("field `{path}`: {what}"))
}

fn integer(v: &Value, path: &str) -> Result<BigInt, CliError> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(BigInt::from_str(&n.to_string()).expect("integral number")),
        Value::String(s) => BigInt::from_str(s.trim()).map_err(|_| schema_err(path, "expected a decimal integer")),
        _ => Err(schema_err(path, "expected an integer")),
    }
}

fn small(v: &Value, path: &str) -> Result<usize, CliError> {
    let x = integer(v, path)?;
    usize::try_from(x).map_err(|_| schema_err(path, "expected a nonnegative integer"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, CliError> {
    v.as_array().ok_or_else(|| schema_err(path, "expected an array"))
}

fn int_list(v: &Value, path: &str) -> Result<Vec<BigInt>, CliError> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(k, x)| integer(x, &format!("{path}[{k}]")))
        .collect()
}

impl FanDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let root: Value = serde_json::from_str(text)
            .map_err(|e| CliError::Schema(format!("line {} column {}: {e}", e.line(), e.column())))?;
        let obj = root
            .as_object()
            .ok_or_else(|| CliError::Schema("top level: expected an object".into()))?;
        const KEYS: [&str; 7] = ["schema", "rank", "torsion", "b", "max_cones", "bundle", "labels"];
        if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(schema_err(k, "unknown field"));
        }
        match obj.get("schema") {
            Some(Value::String(s)) if s == SCHEMA => {}
            Some(_) => return Err(schema_err("schema", &format!("expected \"{SCHEMA}\""))),
            None => return Err(schema_err("schema", "missing")),
        }
        let get = |k: &str| obj.get(k).ok_or_else(|| schema_err(k, "missing"));
        let rank = small(get("rank")?, "rank")?;
        let torsion = match obj.get("torsion") {
            Some(v) => int_list(v, "torsion")?,
            None => Vec::new(),
        };
        for (l, m) in torsion.iter().enumerate() {
            if *m < BigInt::from(2) {
                return Err(schema_err(
                    &format!("torsion[{l}]"),
                    "torsion orders must be at least 2",
                ));
            }
        }
        let width = rank + torsion.len();
        let mut b = Vec::new();
        for (i, ray) in array(get("b")?, "b")?.iter().enumerate() {
            let path = format!("b[{i}]");
            let ray = int_list(ray, &path)?;
            if ray.len() != width {
                return Err(schema_err(
                    &path,
                    &format!("expected {width} entries, found {}", ray.len()),
                ));
            }
            b.push(ray);
        }
        let mut max_cones = Vec::new();
        for (c, cone) in array(get("max_cones")?, "max_cones")?.iter().enumerate() {
            let mut rays = Vec::new();
            for (k, r) in array(cone, &format!("max_cones[{c}]"))?.iter().enumerate() {
                let path = format!("max_cones[{c}][{k}]");
                let r = small(r, &path)?;
                if r == 0 || r > b.len() {
                    return Err(schema_err(&path, &format!("ray index must lie in 1..={}", b.len())));
                }
                rays.push(r);
            }
            max_cones.push(rays);
        }
        let bundle = match obj.get("bundle") {
            None | Some(Value::Null) => None,
            Some(v) => {
                let a = int_list(v, "bundle")?;
                if let Some(k) = a.iter().position(|x| x.sign() == num_bigint::Sign::Minus) {
                    return Err(schema_err(&format!("bundle[{k}]"), "expected a nonnegative integer"));
                }
                Some(a)
            }
        };
        let mut labels = BTreeMap::new();
        if let Some(v) = obj.get("labels") {
            let map = v
                .as_object()
                .ok_or_else(|| schema_err("labels", "expected an object"))?;
            for (k, name) in map {
                let path = format!("labels.{k}");
                let idx = k
                    .parse::<usize>()
                    .map_err(|_| schema_err(&path, "keys must be box indices"))?;
                let name = name.as_str().ok_or_else(|| schema_err(&path, "expected a string"))?;
                labels.insert(idx, name.to_string());
            }
        }
        Ok(FanDocument {
            rank,
            torsion,
            b,
            max_cones,
            bundle,
            labels,
        })
    }

    pub fn to_value(&self) -> Value {
        let ints = |v: &[BigInt]| Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect());
        let mut obj = Map::new();
        obj.insert("schema".into(), SCHEMA.into());
        obj.insert("rank".into(), self.rank.into());
        obj.insert("torsion".into(), ints(&self.torsion));
        obj.insert("b".into(), Value::Array(self.b.iter().map(|r| ints(r)).collect()));
        obj.insert(
            "max_cones".into(),
            Value::Array(self.max_cones.iter().map(|c| c.clone().into()).collect()),
        );
        if let Some(a) = &self.bundle {
            obj.insert("bundle".into(), ints(a));
        }
        if !self.labels.is_empty() {
            let labels: Map<String, Value> = self
                .labels
                .iter()
                .map(|(k, v)| (k.to_string(), Value::String(v.clone())))
                .collect();
            obj.insert("labels".into(), Value::Object(labels));
        }
        Value::Object(obj)
    }

    pub fn stacky(&self) -> StackyFan {
        StackyFan::new(
            self.rank,
            self.torsion.clone(),
            self.b.clone(),
            self.max_cones
                .iter()
                .map(|c| c.iter().map(|r| r - 1).collect())
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDoc {
    pub name: String,
    pub degree: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub coefficient: String,
    pub exponents: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub provenance: String,
    pub homogeneous: bool,
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxRow {
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub v: Vec<String>,
    pub cone: Vec<usize>,
    pub q: Vec<String>,
    pub gamma: Vec<String>,
    pub s: Vec<String>,
    pub age: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDoc {
    pub degree: String,
    pub free_rank: usize,
    pub torsion: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub product: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bundle: Option<Vec<String>>,
    pub simplified: bool,
    pub psi: Vec<Vec<String>>,
    pub f: Vec<Vec<String>>,
    #[serde(rename = "box")]
    pub box_table: Vec<BoxRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hilbert: Option<Vec<PieceDoc>>,
    pub warnings: Vec<String>,
}

/// A ring presentation with the data needed to interpret it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationDocument {
    pub schema: String,
    pub coefficients: String,
    pub variables: Vec<VariableDoc>,
    pub generators: Vec<GeneratorDoc>,
    pub metadata: Metadata,
}

pub fn rational_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let q = BigInt::from_str(q.trim()).ok()?;
            if q.sign() == num_bigint::Sign::NoSign {
                return None;
            }
            Some(BigRational::new(BigInt::from_str(p.trim()).ok()?, q))
        }
        None => Some(BigRational::from_integer(BigInt::from_str(s).ok()?)),
    }
}

pub fn coefficient_code(c: Coefficients) -> &'static str {
    match c {
        Coefficients::Integers => "z",
        Coefficients::Rationals => "q",
    }
}

pub fn poly_terms(p: &Poly) -> Vec<TermDoc> {
    p.terms()
        .iter()
        .map(|(m, c)| TermDoc {
            coefficient: c.to_string(),
            exponents: m.to_vec(),
        })
        .collect()
}

impl PresentationDocument {
    pub fn new(p: &RingPresentation, metadata: Metadata) -> Self {
        PresentationDocument {
            schema: SCHEMA.into(),
            coefficients: coefficient_code(p.coefficients).into(),
            variables: p
                .variables
                .iter()
                .map(|v| VariableDoc {
                    name: v.name.clone(),
                    degree: rational_string(&v.degree),
                })
                .collect(),
            generators: p
                .generators
                .iter()
                .map(|g| GeneratorDoc {
                    provenance: g.provenance.as_str().into(),
                    homogeneous: g.homogeneous,
                    terms: poly_terms(&g.poly),
                })
                .collect(),
            metadata,
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let doc: PresentationDocument = serde_json::from_str(text)
            .map_err(|e| CliError::Schema(format!("line {} column {}: {e}", e.line(), e.column())))?;
        if doc.schema != SCHEMA {
            return Err(schema_err("schema", &format!("expected \"{SCHEMA}\"")));
        }
        doc.presentation()?;
        Ok(doc)
    }

    /// The presentation described by the document.
    pub fn presentation(&self) -> Result<RingPresentation, CliError> {
        let coefficients = match self.coefficients.as_str() {
            "z" => Coefficients::Integers,
            "q" => Coefficients::Rationals,
            _ => return Err(schema_err("coefficients", "expected \"z\" or \"q\"")),
        };
        let mut variables = Vec::with_capacity(self.variables.len());
        for (k, v) in self.variables.iter().enumerate() {
            let degree = parse_rational(&v.degree)
                .ok_or_else(|| schema_err(&format!("variables[{k}].degree"), "expected p/q"))?;
            variables.push(Variable {
                name: v.name.clone(),
                degree,
            });
        }
        let nvars = variables.len();
        let mut p = RingPresentation::new(variables, coefficients);
        for (k, g) in self.generators.iter().enumerate() {
            let provenance = Provenance::parse(&g.provenance)
                .ok_or_else(|| schema_err(&format!("generators[{k}].provenance"), "unknown provenance"))?;
            let mut terms = Vec::with_capacity(g.terms.len());
            for (t, term) in g.terms.iter().enumerate() {
                let path = format!("generators[{k}].terms[{t}]");
                if term.exponents.len() != nvars {
                    return Err(schema_err(&path, &format!("expected {nvars} exponents")));
                }
                let c =
                    BigInt::from_str(&term.coefficient).map_err(|_| schema_err(&path, "expected a decimal integer"))?;
                terms.push((term.exponents.clone(), c));
            }
            p.generators.push(Generator {
                poly: Poly::from_terms(nvars, terms),
                provenance,
                homogeneous: g.homogeneous,
            });
        }
        Ok(p)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("document serializes")
    }
}

/// Rebuilds every object with its keys in sorted order.
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let sorted: BTreeMap<String, Value> = map.into_iter().map(|(k, v)| (k, canonical(v))).collect();
            Value::Object(sorted.into_iter().collect())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonical).collect()),
        other => other,
    }
}

/// Byte-stable rendering: sorted keys, two-space indentation, final newline.
pub fn render(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&canonical(v)).expect("json renders");
    s.push('\n');
    s
}
