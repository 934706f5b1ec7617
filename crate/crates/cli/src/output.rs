use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde_json::Value;

use crate::args::Format;

/// Flatten nested objects and arrays into `a.b.0`-style keys, in order.
pub fn flatten(value: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    walk(value, String::new(), &mut out);
    out
}

fn walk(value: &Value, prefix: String, out: &mut Vec<(String, String)>) {
    let join = |key: &str| if prefix.is_empty() { key.to_string() } else { format!("{prefix}.{key}") };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                walk(v, join(k), out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                walk(v, join(&i.to_string()), out);
            }
        }
        Value::String(s) => out.push((prefix, s.clone())),
        Value::Null => out.push((prefix, "null".into())),
        other => out.push((prefix, other.to_string())),
    }
}

pub fn render(value: &Value, format: Format) -> io::Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut buf = serde_json::to_vec_pretty(value)?;
            buf.push(b'\n');
            Ok(buf)
        }
        Format::Text => {
            let mut buf = Vec::new();
            for (k, v) in flatten(value) {
                writeln!(buf, "{k} = {v}")?;
            }
            Ok(buf)
        }
        Format::Csv => {
            let pairs = flatten(value);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(pairs.iter().map(|(k, _)| k))?;
            w.write_record(pairs.iter().map(|(_, v)| v))?;
            w.into_inner().map_err(|e| io::Error::other(e.to_string()))
        }
    }
}

pub fn emit(value: &Value, format: Format, path: Option<&Path>) -> io::Result<()> {
    let bytes = render(value, format)?;
    match path {
        Some(p) => File::create(p)?.write_all(&bytes),
        None => io::stdout().lock().write_all(&bytes),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn formats_carry_identical_numbers() {
        let v = json!({"a": 0.1, "b": {"c": [1, 2.5e-300], "d": null}, "e": "x"});
        let text = String::from_utf8(render(&v, Format::Text).unwrap()).unwrap();
        assert!(text.contains("a = 0.1\n"));
        assert!(text.contains("b.c.1 = 2.5e-300\n"));
        assert!(text.contains("b.d = null\n"));
        let csv = String::from_utf8(render(&v, Format::Csv).unwrap()).unwrap();
        assert_eq!(csv, "a,b.c.0,b.c.1,b.d,e\n0.1,1,2.5e-300,null,x\n");
    }
}
