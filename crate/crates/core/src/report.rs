//! Deterministic report serialization.
//!
//! Every floating-point value is printed with 17 significant digits
//! (`d.16e` scientific form), enough to re-parse bit-faithfully, so two
//! runs with the same configuration produce byte-identical output.

use std::io;

use serde::Serialize;

/// Format one f64 with 17 significant digits.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

/// JSON formatter emitting floats via [`fmt_f64`]. Non-finite values
/// never reach serialization in this crate (infinities are carried as
/// `Option` + flag fields); should one slip through it becomes `null`
/// rather than invalid JSON.
#[derive(Default)]
pub struct SigDigitFormatter;

impl serde_json::ser::Formatter for SigDigitFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serialize any value to JSON with deterministic float formatting.
pub fn to_json_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigitFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}
