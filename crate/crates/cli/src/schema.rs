//! The published result schema and a validator for the JSON-Schema
//! subset it uses: `type`, `enum`, `required`, `properties`,
//! `additionalProperties`, `items`, and local `$ref`s into
//! `#/definitions`.

use serde_json::Value;

pub const RESULTS_SCHEMA: &str = include_str!("../schemas/results.schema.json");

pub fn schema_value() -> Value {
    serde_json::from_str(RESULTS_SCHEMA).expect("embedded schema parses")
}

/// Validates `doc` against `schema`, returning every violation found.
pub fn validate(doc: &Value, schema: &Value) -> Vec<String> {
    let mut errors = Vec::new();
    walk(doc, schema, schema, "$", &mut errors);
    errors
}

fn resolve<'a>(root: &'a Value, schema: &'a Value) -> &'a Value {
    if let Some(reference) = schema.get("$ref").and_then(Value::as_str) {
        let name = reference
            .strip_prefix("#/definitions/")
            .unwrap_or_else(|| panic!("unsupported $ref {reference}"));
        return root
            .get("definitions")
            .and_then(|d| d.get(name))
            .unwrap_or_else(|| panic!("unresolved $ref {reference}"));
    }
    schema
}

fn type_matches(doc: &Value, ty: &str) -> bool {
    match ty {
        "object" => doc.is_object(),
        "array" => doc.is_array(),
        "string" => doc.is_string(),
        "number" => doc.is_number(),
        "integer" => doc.as_i64().is_some() || doc.as_u64().is_some(),
        "boolean" => doc.is_boolean(),
        "null" => doc.is_null(),
        other => panic!("unsupported schema type {other}"),
    }
}

fn walk(doc: &Value, schema: &Value, root: &Value, path: &str, errors: &mut Vec<String>) {
    let schema = resolve(root, schema);

    if let Some(ty) = schema.get("type") {
        let ok = match ty {
            Value::String(t) => type_matches(doc, t),
            Value::Array(ts) => ts
                .iter()
                .filter_map(Value::as_str)
                .any(|t| type_matches(doc, t)),
            _ => true,
        };
        if !ok {
            errors.push(format!("{path}: expected type {ty}, got {doc}"));
            return;
        }
    }

    if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
        if !allowed.contains(doc) {
            errors.push(format!("{path}: value {doc} not in enum {allowed:?}"));
        }
    }

    if let Some(obj) = doc.as_object() {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required.iter().filter_map(Value::as_str) {
                if !obj.contains_key(key) {
                    errors.push(format!("{path}: missing required field {key:?}"));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        let additional = schema.get("additionalProperties");
        for (key, val) in obj {
            if let Some(prop_schema) = props.and_then(|p| p.get(key)) {
                walk(val, prop_schema, root, &format!("{path}.{key}"), errors);
            } else {
                match additional {
                    Some(Value::Bool(false)) => {
                        errors.push(format!("{path}: unexpected field {key:?}"))
                    }
                    Some(extra_schema) if extra_schema.is_object() => {
                        walk(val, extra_schema, root, &format!("{path}.{key}"), errors)
                    }
                    _ => {}
                }
            }
        }
    }

    if let (Some(items), Some(arr)) = (schema.get("items"), doc.as_array()) {
        for (i, item) in arr.iter().enumerate() {
            walk(item, items, root, &format!("{path}[{i}]"), errors);
        }
    }
}
