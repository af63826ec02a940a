use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::DatasetError;

/// One instruction/output pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetExample {
    pub id: String,
    pub instruction: String,
    #[serde(default)]
    pub input: String,
    pub output: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatasetFormat {
    /// One JSON object per line.
    Jsonl,
    /// A single JSON array of objects.
    JsonArray,
}

impl DatasetFormat {
    /// Guesses from the first non-whitespace character.
    pub fn detect(contents: &str) -> Self {
        match contents.trim_start().chars().next() {
            Some('[') => DatasetFormat::JsonArray,
            _ => DatasetFormat::Jsonl,
        }
    }
}

fn text_field(
    obj: &serde_json::Map<String, Value>,
    name: &'static str,
    record: usize,
) -> Result<Option<String>, DatasetError> {
    match obj.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(other) => Err(DatasetError::Parse {
            line: record,
            message: format!("field `{name}` must be a string, got {other}"),
        }),
    }
}

fn example_from_value(
    value: Value,
    position: usize,
    record: usize,
) -> Result<DatasetExample, DatasetError> {
    let Value::Object(obj) = value else {
        return Err(DatasetError::Parse {
            line: record,
            message: "expected a JSON object".into(),
        });
    };
    let id = match obj.get("id") {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        _ => position.to_string(),
    };
    let instruction =
        text_field(&obj, "instruction", record)?.ok_or(DatasetError::MissingField {
            record,
            field: "instruction",
        })?;
    let output = text_field(&obj, "output", record)?.ok_or(DatasetError::MissingField {
        record,
        field: "output",
    })?;
    let input = text_field(&obj, "input", record)?.unwrap_or_default();
    Ok(DatasetExample {
        id,
        instruction,
        input,
        output,
    })
}

/// Parses Alpaca-style records. Missing ids become the record's zero-based
/// position; error locations are one-based line (JSONL) or element numbers.
pub fn parse_dataset(
    contents: &str,
    format: DatasetFormat,
) -> Result<Vec<DatasetExample>, DatasetError> {
    match format {
        DatasetFormat::Jsonl => {
            let mut out = Vec::new();
            for (i, line) in contents.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let value: Value = serde_json::from_str(line).map_err(|e| DatasetError::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })?;
                let position = out.len();
                out.push(example_from_value(value, position, i + 1)?);
            }
            Ok(out)
        }
        DatasetFormat::JsonArray => {
            let values: Vec<Value> =
                serde_json::from_str(contents).map_err(|e| DatasetError::Parse {
                    line: e.line(),
                    message: e.to_string(),
                })?;
            values
                .into_iter()
                .enumerate()
                .map(|(i, v)| example_from_value(v, i, i + 1))
                .collect()
        }
    }
}

pub fn load_dataset(
    path: impl AsRef<Path>,
    format: Option<DatasetFormat>,
) -> Result<Vec<DatasetExample>, DatasetError> {
    let path = path.as_ref();
    let contents = fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let format = format.unwrap_or_else(|| DatasetFormat::detect(&contents));
    parse_dataset(&contents, format)
}
