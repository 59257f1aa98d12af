//! JSON emission with floats at 17 significant digits.
//!
//! Reports are byte-compared across runs and re-parsed as fixtures, so float
//! formatting is pinned: every `f64` prints as `d.16-digits e exp`, which
//! round-trips exactly. Everything else follows `serde_json`'s pretty
//! printer.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

/// Pretty formatter with fixed-width scientific floats.
#[derive(Default)]
pub struct SigFigFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Formatter for SigFigFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

/// Serialises to the pinned pretty format.
pub fn to_string_pinned<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, SigFigFormatter::default());
    value
        .serialize(&mut ser)
        .expect("report serialisation cannot fail");
    String::from_utf8(out).expect("serde_json emits utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_carry_seventeen_digits() {
        let v = json!({"x": 0.8, "n": 42u64});
        let s = to_string_pinned(&v);
        assert!(s.contains("8.0000000000000004e-1"), "{s}");
        assert!(s.contains("\"n\": 42"), "{s}");
    }

    #[test]
    fn round_trip_is_exact() {
        for &x in &[
            39.47841760435743,
            core::f64::consts::PI,
            1.0 / 3.0,
            6.283185307179586e-23,
            -0.0,
            1e300,
        ] {
            let s = to_string_pinned(&json!({ "x": x }));
            let back: serde_json::Value = serde_json::from_str(&s).unwrap();
            let y = back["x"].as_f64().unwrap();
            assert_eq!(x.to_bits(), y.to_bits(), "{s}");
        }
    }
}
