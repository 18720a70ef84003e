//! Curve CSV files and JSON report formatting.
//!
//! CSV layout: header `t,x1,...,xn`, one sample per row. JSON floats are
//! written in scientific notation with 17 significant digits so output is
//! byte-identical across runs and round-trips exactly.

use std::io::{self, Read, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

use crate::curve::Curve;
use crate::error::{Error, Result};

pub fn csv_header(dim: usize) -> Vec<String> {
    std::iter::once("t".to_string()).chain((1..=dim).map(|i| format!("x{i}"))).collect()
}

pub fn write_curve<W: Write>(c: &Curve, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(csv_header(c.dim()))?;
    for (t, p) in c.times().iter().zip(c.points()) {
        out.write_record(std::iter::once(t).chain(p).map(|v| format!("{v:.16e}")))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_curve_file(c: &Curve, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_curve(c, io::BufWriter::new(f))
}

/// Reads a curve; `closed` is declared by the caller since CSV carries no flag.
pub fn read_curve<R: Read>(r: R, closed: bool) -> Result<Curve> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header = rdr.headers()?.clone();
    let dim = header.len().saturating_sub(1);
    if dim == 0 || &header[0] != "t" {
        return Err(Error::Parse("CSV header must be t,x1,...,xn".into()));
    }
    for (i, h) in header.iter().enumerate().skip(1) {
        if h != format!("x{i}") {
            return Err(Error::Parse(format!("unexpected column '{h}', expected 'x{i}'")));
        }
    }
    let mut times = Vec::new();
    let mut coords = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != dim + 1 {
            return Err(Error::Parse(format!("row {} has {} fields, expected {}", line + 2, rec.len(), dim + 1)));
        }
        for (j, field) in rec.iter().enumerate() {
            let v: f64 =
                field.parse().map_err(|_| Error::Parse(format!("row {}: '{field}' is not a number", line + 2)))?;
            if j == 0 {
                times.push(v);
            } else {
                coords.push(v);
            }
        }
    }
    Curve::from_flat(dim, times, coords, closed)
}

pub fn read_curve_file(path: &Path, closed: bool) -> Result<Curve> {
    let f = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_curve(io::BufReader::new(f), closed)
}

/// Pretty JSON with fixed 17-significant-digit floats.
#[derive(Debug, Default)]
struct FixedFloats {
    indent: usize,
    has_value: bool,
}

impl FixedFloats {
    fn newline<W: ?Sized + Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.indent {
            w.write_all(b"  ")?;
        }
        Ok(())
    }
}

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        w.write_all(b"[")
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(w)?;
        }
        w.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(w)?;
        }
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, FixedFloats::default());
    value.serialize(&mut ser).map_err(|e| Error::Io(e.to_string()))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("JSON is UTF-8"))
}

pub fn write_json_file<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(value)?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde_json::json;

    #[test]
    fn json_floats_have_fixed_width() {
        let s = to_json(&json!({"value": 1.0, "list": [0.1, -2.5e-300], "name": "x", "n": 3})).unwrap();
        assert!(s.contains("\"value\": 1.0000000000000000e0"));
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.contains("-2.5000000000000000e-300"));
        assert!(s.contains("\"n\": 3"));
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["list"][0].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn empty_containers() {
        assert_eq!(to_json(&json!({"a": [], "b": {}})).unwrap(), "{\n  \"a\": [],\n  \"b\": {}\n}\n");
    }

    #[test]
    fn rejects_bad_csv() {
        assert!(matches!(read_curve("t,y1\n0,1\n1,2\n".as_bytes(), false), Err(Error::Parse(_))));
        assert!(matches!(read_curve("t,x1\n0,a\n1,2\n".as_bytes(), false), Err(Error::Parse(_))));
        assert!(read_curve("t,x1\n0,1\n".as_bytes(), false).is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(vals in prop::collection::vec(-1e6f64..1e6, 6..60)) {
            let n = vals.len() / 3;
            let times: Vec<f64> = (0..n).map(|i| i as f64 * 0.37).collect();
            let c = Curve::from_flat(3, times, vals[..3 * n].to_vec(), false).unwrap();
            let mut buf = Vec::new();
            write_curve(&c, &mut buf).unwrap();
            let back = read_curve(buf.as_slice(), false).unwrap();
            prop_assert_eq!(back.times(), c.times());
            prop_assert_eq!(back.coords(), c.coords());
        }
    }
}
