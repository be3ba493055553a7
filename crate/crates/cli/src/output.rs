use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Human,
    Machine,
}

/// Prints one JSON line `{"command": ..., <context>, "result": ...}`.
pub fn record(command: &str, context: Value, result: &impl Serialize) {
    let mut obj = json!({ "command": command });
    if let (Value::Object(o), Value::Object(ctx)) = (&mut obj, context) {
        o.extend(ctx);
        o.insert(
            "result".into(),
            serde_json::to_value(result).expect("results serialize"),
        );
    }
    println!("{obj}");
}

/// Right-aligned columns.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    let mut out = vec![line(headers.to_vec())];
    out.extend(rows.iter().map(|r| line(r.iter().map(String::as_str).collect())));
    out.join("\n")
}

/// `g:n g:n ...`, or `-` when empty.
pub fn graded<K: std::fmt::Display, V: std::fmt::Display>(
    m: impl IntoIterator<Item = (K, V)>,
) -> String {
    let parts: Vec<String> = m.into_iter().map(|(k, v)| format!("{k}:{v}")).collect();
    if parts.is_empty() {
        "-".into()
    } else {
        parts.join(" ")
    }
}
