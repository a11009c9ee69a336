//! Plain-text rendering of command output for `--pretty`.

use serde_json::Value;

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".to_string(),
        other => other.to_string(),
    }
}

fn rows_table(rows: &[Value]) -> Option<String> {
    let first = rows.first()?.as_object()?;
    let cols: Vec<&String> = first.keys().collect();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| cols.iter().map(|c| r.get(c.as_str()).map(cell).unwrap_or_default()).collect())
        .collect();
    let widths: Vec<usize> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| body.iter().map(|r| r[j].len()).chain([c.len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: Vec<String>| -> String {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = vec![line(cols.iter().map(|c| c.to_string()).collect())];
    out.extend(body.into_iter().map(line));
    Some(out.join("\n"))
}

/// Scalars as `key  value` lines, arrays of objects as aligned tables.
pub fn render(v: &Value) -> String {
    let Some(obj) = v.as_object() else {
        return cell(v);
    };
    let key_width = obj.keys().map(String::len).max().unwrap_or(0);
    let mut out = Vec::new();
    let mut tables = Vec::new();
    for (k, val) in obj {
        match val {
            Value::Array(rows) if rows.first().is_some_and(Value::is_object) => {
                if let Some(t) = rows_table(rows) {
                    tables.push(format!("{k}:\n{t}"));
                }
            }
            _ => out.push(format!("{k:<key_width$}  {}", cell(val))),
        }
    }
    out.extend(tables);
    out.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn scalars_and_rows() {
        let v = json!({"a": 1, "name": "g2", "rows": [{"p": 0, "q": 1}, {"p": 10, "q": 3}]});
        let s = render(&v);
        assert!(s.contains("name  g2"));
        assert!(s.contains("p   q\n0   1\n10  3"));
    }
}
