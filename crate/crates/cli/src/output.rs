//! CSV and JSON rendering.

use std::io::Write;
use std::path::Path;

use cavcool::units::{ATOMIC_MASS_UNIT, BOLTZMANN, HBAR, OH_MASS, SPEED_OF_LIGHT};
use serde_json::{json, Value};

use crate::config::SCHEMA_VERSION;
use crate::CliError;

pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut s = std::io::stdout().lock();
            s.write_all(text.as_bytes())
                .and_then(|_| s.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

pub fn num(v: f64) -> String {
    format!("{v:e}")
}

/// Header row then records, LF-terminated.
pub fn csv<I, R>(header: &[&str], rows: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let io = |e: csv::Error| CliError::Io(e.to_string());
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn units() -> Value {
    json!({
        "frequency": "Hz, angular rate divided by 2π (keys ending in _hz)",
        "rate": "events per second (keys ending in _per_s)",
        "length": "m",
        "time": "s",
        "temperature": "K",
        "energy": "J",
        "density": "1/cm³",
        "velocity": "m/s",
    })
}

fn provenance() -> Value {
    json!({
        "tool": format!("cavcool {}", env!("CARGO_PKG_VERSION")),
        "hbar_j_s": HBAR,
        "boltzmann_j_per_k": BOLTZMANN,
        "speed_of_light_m_per_s": SPEED_OF_LIGHT,
        "atomic_mass_unit_kg": ATOMIC_MASS_UNIT,
        "oh_mass_kg": OH_MASS,
        "constants": "CODATA 2018 (exact SI values for c and k_B)",
        "oh_dataset": "embedded transition table",
    })
}

/// `{schema_version, kind, units, provenance, data}` with sorted keys.
pub fn envelope(kind: &str, data: Value) -> String {
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "units": units(),
        "provenance": provenance(),
        "data": data,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

/// One `dotted.key = value` line per leaf.
pub fn text(data: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, x, out);
                }
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, out);
                }
            }
            Value::Number(n) => match n.as_f64() {
                Some(f) if n.is_f64() => out.push_str(&format!("{prefix} = {}\n", num(f))),
                _ => out.push_str(&format!("{prefix} = {n}\n")),
            },
            Value::String(s) => out.push_str(&format!("{prefix} = {s}\n")),
            other => out.push_str(&format!("{prefix} = {other}\n")),
        }
    }
    let mut out = String::new();
    walk("", data, &mut out);
    out
}
