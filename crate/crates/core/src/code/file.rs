//! JSON code files.
//!
//! Three forms, selected by the `"form"` field (default `"table"`):
//! - `table`: explicit lookup tables ([`TableCode`]);
//! - `routing`: `n`, `N`, `message_sizes` and store-and-forward `routes` whose
//!   paths are lists of vertex names;
//! - `descriptor`: a base instance, a base code file and a transform chain.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{make_routing_code, CodeError, NetworkCode, Route, SharedCode, TableCode};
use crate::graph::{InstanceDocument, NetworkInstance};
use crate::transforms::chain::{run_chain, ChainStep};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteDocument {
    pub source: usize,
    pub terminal: usize,
    pub path: Vec<String>,
    pub start: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingDocument {
    pub n: u64,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub message_sizes: Vec<u64>,
    pub routes: Vec<RouteDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorDocument {
    pub base_instance: InstanceDocument,
    pub base_code: Value,
    pub chain: Vec<ChainStep>,
}

/// A loaded code together with the instance it is written for.
#[derive(Debug, Clone)]
pub struct LoadedCode {
    pub code: SharedCode,
    pub instance: NetworkInstance,
}

fn malformed(e: impl std::fmt::Display) -> CodeError {
    CodeError::MalformedCode(e.to_string())
}

fn form_of(value: &Value) -> Result<&str, CodeError> {
    match value.get("form") {
        None => Ok("table"),
        Some(Value::String(s)) => Ok(s.as_str()),
        Some(_) => Err(malformed("\"form\" must be a string")),
    }
}

fn strip_form(value: &Value) -> Value {
    let mut v = value.clone();
    if let Some(obj) = v.as_object_mut() {
        obj.remove("form");
    }
    v
}

/// Loads a code file written for `inst`. Descriptor files carry their own
/// base instance; the chain must end on an instance equal to `inst`.
pub fn load_code(value: &Value, inst: &NetworkInstance) -> Result<LoadedCode, CodeError> {
    let code: SharedCode = match form_of(value)? {
        "table" => {
            let table: TableCode = serde_json::from_value(strip_form(value)).map_err(malformed)?;
            table.check(inst)?;
            Arc::new(table)
        }
        "routing" => {
            let doc: RoutingDocument =
                serde_json::from_value(strip_form(value)).map_err(malformed)?;
            let routes = doc
                .routes
                .iter()
                .map(|r| {
                    let path = r
                        .path
                        .iter()
                        .map(|name| {
                            inst.vertex(name)
                                .ok_or_else(|| CodeError::BadRoute(format!("unknown vertex {name:?}")))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(Route {
                        source: r.source,
                        terminal: r.terminal,
                        path,
                        start: r.start,
                    })
                })
                .collect::<Result<Vec<_>, CodeError>>()?;
            Arc::new(make_routing_code(inst, doc.n, doc.big_n, &doc.message_sizes, &routes)?)
        }
        "descriptor" => {
            let doc: DescriptorDocument =
                serde_json::from_value(strip_form(value)).map_err(malformed)?;
            let base_inst = NetworkInstance::from_document(&doc.base_instance).map_err(malformed)?;
            let base = load_code(&doc.base_code, &base_inst)?;
            let (state, _) = run_chain(base.code, &base_inst, &doc.chain).map_err(malformed)?;
            if state.inst != *inst {
                return Err(malformed("descriptor chain does not end on the given instance"));
            }
            state.code
        }
        other => return Err(malformed(format!("unknown code form {other:?}"))),
    };
    Ok(LoadedCode {
        code,
        instance: inst.clone(),
    })
}

/// Table-form JSON of `code`, or `TableTooLarge` past `limit` table entries.
pub fn table_json(code: &dyn NetworkCode, inst: &NetworkInstance, limit: u64) -> Result<Value, CodeError> {
    let table = TableCode::materialize(code, inst, limit)?;
    let mut v = serde_json::to_value(&table).map_err(malformed)?;
    if let Some(obj) = v.as_object_mut() {
        obj.insert("form".into(), Value::String("table".into()));
    }
    Ok(v)
}

pub fn descriptor_json(
    base_instance: &NetworkInstance,
    base_code: &Value,
    chain: &[ChainStep],
) -> Value {
    let doc = DescriptorDocument {
        base_instance: base_instance.to_document(),
        base_code: base_code.clone(),
        chain: chain.to_vec(),
    };
    let mut v = serde_json::to_value(doc).expect("descriptor serializes");
    if let Some(obj) = v.as_object_mut() {
        obj.insert("form".into(), Value::String("descriptor".into()));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{check_feasibility, CheckMode, FeasibilityTarget};
    use crate::graph::tests::inst;
    use serde_json::json;

    #[test]
    fn routing_file_round_trips_through_table() {
        let g = inst(&["a", "b"], &[("a", "b", "1")], &["a"], &["b"], &[&[1]]);
        let file = json!({"form": "routing", "n": 1, "N": 1, "message_sizes": [2],
            "routes": [{"source": 0, "terminal": 0, "path": ["a", "b"], "start": 1}]});
        let loaded = load_code(&file, &g).unwrap();
        let table = table_json(loaded.code.as_ref(), &g, 1000).unwrap();
        let again = load_code(&table, &g).unwrap();
        let report = check_feasibility(
            again.code.as_ref(),
            &g,
            &FeasibilityTarget::zero_error(),
            CheckMode::exhaustive(),
        )
        .unwrap();
        assert!(report.pass);
    }

    #[test]
    fn descriptor_replays_chain() {
        let g = inst(&["a", "b"], &[("a", "b", "1")], &["a"], &["b"], &[&[1]]);
        let base = json!({"form": "routing", "n": 1, "N": 2, "message_sizes": [2],
            "routes": [{"source": 0, "terminal": 0, "path": ["a", "b"], "start": 2}]});
        let chain = vec![ChainStep::new("interleave", json!({}))];
        let desc = descriptor_json(&g, &base, &chain);
        let loaded = load_code(&desc, &g).unwrap();
        assert_eq!(loaded.code.outer_blocklength(), 4);
        assert_eq!(loaded.code.message_sizes(), &[4]);
    }
}
