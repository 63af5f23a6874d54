//! JSON structure documents.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};

use crate::algo::{AlgorithmSpec, Answer, DolevYao, Message, TableAlgorithm};
use crate::error::SchemaError;
use crate::formula::{Formula, TruthAssignment};
use crate::linarith::{format_rational, parse_rational};
use crate::structures::{
    Approach, ClassTag, Distribution, EpistemicStructure, Modal, WorldFormulas, WorldTheory,
};

pub fn load_structure(text: &str) -> Result<EpistemicStructure, SchemaError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| SchemaError::new("$", format!("invalid JSON: {e}")))?;
    from_value(&value)
}

pub fn save_structure(s: &EpistemicStructure) -> String {
    serde_json::to_string_pretty(&to_value(s)).expect("structure documents always serialize")
}

pub fn to_value(s: &EpistemicStructure) -> Value {
    let mut doc = Map::new();
    doc.insert(
        "tag".into(),
        json!({
            "approach": s.tag.approach.as_str(),
            "modal": s.tag.modal.as_str(),
            "probabilistic": s.tag.probabilistic,
        }),
    );
    doc.insert("worlds".into(), json!(s.worlds));
    doc.insert("possible".into(), json!(s.possible));
    let pi: Map<String, Value> = s
        .pi
        .iter()
        .map(|(w, v)| (w.clone(), json!(v.0)))
        .collect();
    doc.insert("pi".into(), Value::Object(pi));

    let mut c = Map::new();
    let mut theories = Map::new();
    for (w, set) in &s.c {
        match set {
            WorldFormulas::Explicit(fs) => {
                c.insert(w.clone(), formula_list(fs));
            }
            WorldFormulas::Theory(t) => {
                theories.insert(
                    w.clone(),
                    json!({
                        "vocabulary": t.vocabulary,
                        "true": t.positive,
                        "false": t.negative,
                    }),
                );
            }
        }
    }
    if !c.is_empty() || s.tag.approach == Approach::Syntactic {
        doc.insert("C".into(), Value::Object(c));
    }
    if !theories.is_empty() {
        doc.insert("theories".into(), Value::Object(theories));
    }
    if s.tag.approach == Approach::Awareness || !s.a.is_empty() {
        let a: Map<String, Value> = s
            .a
            .iter()
            .map(|(w, fs)| (w.clone(), formula_list(fs)))
            .collect();
        doc.insert("A".into(), Value::Object(a));
    }
    if let Some(mu) = &s.mu {
        let m: Map<String, Value> = mu
            .0
            .iter()
            .map(|(w, x)| (w.clone(), Value::String(format_rational(x))))
            .collect();
        doc.insert("mu".into(), Value::Object(m));
    }
    if let Some(alg) = &s.algorithm {
        let v = match alg {
            AlgorithmSpec::DolevYao(d) => {
                let msgs: Vec<String> = d.intercepted().iter().map(Message::render).collect();
                json!({
                    "kind": "dolev-yao",
                    "intercepted": msgs,
                    "underivable": d.underivable.as_str(),
                })
            }
            AlgorithmSpec::Table(t) => json!({
                "kind": "table",
                "yes": formula_list(&t.yes),
                "no": formula_list(&t.no),
            }),
        };
        doc.insert("algorithm".into(), v);
    }
    Value::Object(doc)
}

fn formula_list(fs: &BTreeSet<Formula>) -> Value {
    let mut rendered: Vec<String> = fs.iter().map(Formula::render).collect();
    rendered.sort();
    json!(rendered)
}

pub fn from_value(doc: &Value) -> Result<EpistemicStructure, SchemaError> {
    let obj = doc
        .as_object()
        .ok_or_else(|| SchemaError::new("$", "expected an object"))?;
    for key in obj.keys() {
        if ![
            "tag",
            "worlds",
            "possible",
            "pi",
            "C",
            "A",
            "mu",
            "algorithm",
            "theories",
        ]
        .contains(&key.as_str())
        {
            return Err(SchemaError::new(format!("$.{key}"), "unknown key"));
        }
    }
    let tag = parse_tag(field(obj, "$", "tag")?)?;
    let mut s = EpistemicStructure::new(tag);
    s.worlds = string_set(field(obj, "$", "worlds")?, "$.worlds")?;
    s.possible = match obj.get("possible") {
        Some(v) => string_set(v, "$.possible")?,
        None => BTreeSet::new(),
    };

    if let Some(pi) = obj.get("pi") {
        let pi = as_object(pi, "$.pi")?;
        for (w, v) in pi {
            let path = format!("$.pi.{w}");
            let mut ta = TruthAssignment::new();
            for (p, b) in as_object(v, &path)? {
                let b = b
                    .as_bool()
                    .ok_or_else(|| SchemaError::new(format!("{path}.{p}"), "expected a boolean"))?;
                ta.set(p.clone(), b);
            }
            s.pi.insert(w.clone(), ta);
        }
    }
    for w in &s.worlds {
        s.pi.entry(w.clone()).or_default();
    }

    if let Some(c) = obj.get("C") {
        for (w, v) in as_object(c, "$.C")? {
            let set = formula_set(v, &format!("$.C.{w}"))?;
            s.c.insert(w.clone(), WorldFormulas::Explicit(set));
        }
    }
    if let Some(th) = obj.get("theories") {
        for (w, v) in as_object(th, "$.theories")? {
            let path = format!("$.theories.{w}");
            let o = as_object(v, &path)?;
            let mut t = WorldTheory::default();
            if let Some(voc) = o.get("vocabulary") {
                t.vocabulary = string_set(voc, &format!("{path}.vocabulary"))?;
            }
            if let Some(pos) = o.get("true") {
                for p in string_set(pos, &format!("{path}.true"))? {
                    t.add(p, true);
                }
            }
            if let Some(neg) = o.get("false") {
                for p in string_set(neg, &format!("{path}.false"))? {
                    t.add(p, false);
                }
            }
            if s.c.insert(w.clone(), WorldFormulas::Theory(t)).is_some() {
                return Err(SchemaError::new(path, "world has both C and a theory"));
            }
        }
    }
    if let Some(a) = obj.get("A") {
        for (w, v) in as_object(a, "$.A")? {
            s.a.insert(w.clone(), formula_set(v, &format!("$.A.{w}"))?);
        }
    }
    if let Some(mu) = obj.get("mu") {
        let mut d = BTreeMap::new();
        for (w, v) in as_object(mu, "$.mu")? {
            let path = format!("$.mu.{w}");
            let text = v
                .as_str()
                .ok_or_else(|| SchemaError::new(&path, "expected a \"num/den\" string"))?;
            let x = parse_rational(text)
                .ok_or_else(|| SchemaError::new(&path, format!("invalid rational `{text}`")))?;
            d.insert(w.clone(), x);
        }
        s.mu = Some(Distribution(d));
    }
    if let Some(alg) = obj.get("algorithm") {
        s.algorithm = Some(parse_algorithm(alg)?);
    }
    Ok(s)
}

fn parse_tag(v: &Value) -> Result<ClassTag, SchemaError> {
    let o = as_object(v, "$.tag")?;
    let approach: Approach = as_str(field(o, "$.tag", "approach")?, "$.tag.approach")?
        .parse()
        .map_err(|e: String| SchemaError::new("$.tag.approach", e))?;
    let modal: Modal = as_str(field(o, "$.tag", "modal")?, "$.tag.modal")?
        .parse()
        .map_err(|e: String| SchemaError::new("$.tag.modal", e))?;
    let probabilistic = match o.get("probabilistic") {
        None => false,
        Some(b) => b
            .as_bool()
            .ok_or_else(|| SchemaError::new("$.tag.probabilistic", "expected a boolean"))?,
    };
    Ok(ClassTag {
        approach,
        modal,
        probabilistic,
    })
}

fn parse_algorithm(v: &Value) -> Result<AlgorithmSpec, SchemaError> {
    let o = as_object(v, "$.algorithm")?;
    match as_str(field(o, "$.algorithm", "kind")?, "$.algorithm.kind")? {
        "dolev-yao" => {
            let mut msgs = Vec::new();
            if let Some(list) = o.get("intercepted") {
                let arr = list
                    .as_array()
                    .ok_or_else(|| SchemaError::new("$.algorithm.intercepted", "expected an array"))?;
                for (i, m) in arr.iter().enumerate() {
                    let path = format!("$.algorithm.intercepted[{i}]");
                    let text = as_str(m, &path)?;
                    msgs.push(Message::parse(text).map_err(|e| SchemaError::new(&path, e.to_string()))?);
                }
            }
            let mut d = DolevYao::new(msgs);
            if let Some(u) = o.get("underivable") {
                d.underivable = match as_str(u, "$.algorithm.underivable")? {
                    "No" => Answer::No,
                    "?" => Answer::Unknown,
                    other => {
                        return Err(SchemaError::new(
                            "$.algorithm.underivable",
                            format!("expected \"No\" or \"?\", found `{other}`"),
                        ))
                    }
                };
            }
            Ok(AlgorithmSpec::DolevYao(d))
        }
        "table" => {
            let yes = match o.get("yes") {
                Some(v) => formula_set(v, "$.algorithm.yes")?,
                None => BTreeSet::new(),
            };
            let no = match o.get("no") {
                Some(v) => formula_set(v, "$.algorithm.no")?,
                None => BTreeSet::new(),
            };
            Ok(AlgorithmSpec::Table(TableAlgorithm { yes, no }))
        }
        other => Err(SchemaError::new(
            "$.algorithm.kind",
            format!("unknown algorithm kind `{other}`"),
        )),
    }
}

fn field<'a>(o: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value, SchemaError> {
    o.get(key)
        .ok_or_else(|| SchemaError::new(format!("{path}.{key}"), "missing"))
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, SchemaError> {
    v.as_object()
        .ok_or_else(|| SchemaError::new(path, "expected an object"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str, SchemaError> {
    v.as_str()
        .ok_or_else(|| SchemaError::new(path, "expected a string"))
}

fn string_set(v: &Value, path: &str) -> Result<BTreeSet<String>, SchemaError> {
    let arr = v
        .as_array()
        .ok_or_else(|| SchemaError::new(path, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| as_str(x, &format!("{path}[{i}]")).map(str::to_string))
        .collect()
}

fn formula_set(v: &Value, path: &str) -> Result<BTreeSet<Formula>, SchemaError> {
    let arr = v
        .as_array()
        .ok_or_else(|| SchemaError::new(path, "expected an array"))?;
    let mut out = BTreeSet::new();
    for (i, x) in arr.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let f: Formula = as_str(x, &p)?
            .parse()
            .map_err(|e: crate::error::FormulaError| SchemaError::new(&p, e.to_string()))?;
        out.insert(f);
    }
    Ok(out)
}
