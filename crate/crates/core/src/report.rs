//! JSON output with round-trip float formatting and a provenance block.

use std::collections::BTreeMap;
use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

/// Writes every float with 17 significant digits in scientific notation;
/// all other tokens are compact.
#[derive(Debug, Default, Clone, Copy)]
pub struct FullPrecision;

impl Formatter for FullPrecision {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

}

/// Resolutions, seeds and crate version attached to every report.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Provenance {
    pub version: &'static str,
    pub resolutions: BTreeMap<String, f64>,
    pub seeds: BTreeMap<String, u64>,
}

impl Provenance {
    pub fn new() -> Self {
        Self { version: env!("CARGO_PKG_VERSION"), ..Default::default() }
    }

    pub fn resolution(mut self, name: &str, h: f64) -> Self {
        self.resolutions.insert(name.to_string(), h);
        self
    }

    pub fn seed(mut self, name: &str, seed: u64) -> Self {
        self.seeds.insert(name.to_string(), seed);
        self
    }
}

/// Serialises `value` and, when it is an object, adds a `provenance` key.
pub fn with_provenance<T: Serialize>(value: &T, provenance: &Provenance) -> serde_json::Result<Value> {
    let mut v = serde_json::to_value(value)?;
    let p = serde_json::to_value(provenance)?;
    match &mut v {
        Value::Object(map) => {
            map.insert("provenance".into(), p);
        }
        other => {
            let inner = std::mem::take(other);
            *other = serde_json::json!({ "result": inner, "provenance": p });
        }
    }
    Ok(v)
}

/// Compact JSON with [`FullPrecision`] floats. Field order follows the
/// serialised structs, so equal inputs give byte-identical output.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}
