//! Plain-text field dumps and CSV slices.
//!
//! Dump layout: a header line `n m symmetry` (`symmetry` is `even` or
//! `none`) followed by the `m^n` node values in row-major order (last axis
//! fastest), one per line, printed with 17 significant digits. Lines
//! starting with `#` are comments.

use std::io::{BufRead, Write};

use super::{Grid, ScalarField};
use crate::error::{Error, Result};

pub const FIELD_VERSION: &str = "field/1";

pub fn write_field<W: Write>(field: &ScalarField, w: W) -> Result<()> {
    write_body(field, w)
}

/// Dump preceded by `# version = field/1` and the `preamble` lines as
/// comments.
pub fn write_field_annotated<W: Write>(field: &ScalarField, preamble: &str, mut w: W) -> Result<()> {
    writeln!(w, "# version = {FIELD_VERSION}")?;
    for line in preamble.lines() {
        writeln!(w, "# {line}")?;
    }
    write_body(field, w)
}

fn write_body<W: Write>(field: &ScalarField, mut w: W) -> Result<()> {
    let g = field.grid();
    let sym = if field.is_even() { "even" } else { "none" };
    writeln!(w, "{} {} {}", g.n(), g.m(), sym)?;
    for v in field.values() {
        writeln!(w, "{v:.16e}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn field_to_string(field: &ScalarField) -> String {
    let mut buf = Vec::new();
    write_field(field, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("dump is ASCII")
}

pub fn read_field<R: BufRead>(r: R) -> Result<ScalarField> {
    let mut lines = r.lines().enumerate();
    let (grid, claims_even) = loop {
        let Some((i, line)) = lines.next() else {
            return Err(Error::parse(1, "empty field dump"));
        };
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        break parse_header(i + 1, t)?;
    };
    let mut values = Vec::with_capacity(grid.len());
    for (i, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if values.len() == grid.len() {
            return Err(Error::parse(i + 1, "more values than the header declares"));
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::parse(i + 1, format!("invalid value {t:?}")))?;
        if !v.is_finite() {
            return Err(Error::parse(i + 1, "non-finite value"));
        }
        values.push(v);
    }
    if values.len() != grid.len() {
        return Err(Error::parse(
            values.len() + 2,
            format!("expected {} values, found {}", grid.len(), values.len()),
        ));
    }
    let field = ScalarField::from_values(grid, values)?;
    if claims_even && !field.is_even() {
        return Err(Error::parse(1, "header declares even symmetry but values are not even"));
    }
    Ok(field)
}

pub fn parse_field(text: &str) -> Result<ScalarField> {
    read_field(text.as_bytes())
}

fn parse_header(line: usize, t: &str) -> Result<(Grid, bool)> {
    let toks: Vec<&str> = t.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(Error::parse(line, "header must be `n m symmetry`"));
    }
    let n: usize = toks[0]
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid dimension {:?}", toks[0])))?;
    let m: usize = toks[1]
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid node count {:?}", toks[1])))?;
    let even = match toks[2] {
        "even" | "1" => true,
        "none" | "0" => false,
        other => return Err(Error::parse(line, format!("invalid symmetry {other:?}"))),
    };
    let grid = Grid::new(n, m).map_err(|e| Error::parse(line, e.to_string()))?;
    Ok((grid, even))
}

/// CSV of the slice `{x_axis = coord(index)}`: one column per remaining
/// coordinate, then `value`.
pub fn write_slice_csv<W: Write>(field: &ScalarField, axis: usize, index: usize, mut w: W) -> Result<()> {
    let g = field.grid();
    if axis >= g.n() || index >= g.m() {
        return Err(Error::Argument(format!("slice axis {axis} index {index} out of range")));
    }
    let names: Vec<String> = (0..g.n())
        .filter(|&k| k != axis)
        .map(|k| format!("x{}", k + 1))
        .collect();
    writeln!(w, "{},value", names.join(","))?;
    for flat in 0..g.len() {
        let idx = g.multi(flat);
        if idx[axis] != index {
            continue;
        }
        let x = g.point(flat);
        let mut row: Vec<String> = (0..g.n())
            .filter(|&k| k != axis)
            .map(|k| format!("{:.16e}", x[k]))
            .collect();
        row.push(format!("{:.16e}", field.value(flat)));
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn roundtrip_preserves_bits_and_flag() {
        let g = Grid::new(2, 17).unwrap();
        let f = ScalarField::sample(g, |x| (x[0] * 3.1).sin() + x[1] * x[1] / 7.0).unwrap();
        let back = parse_field(&field_to_string(&f)).unwrap();
        assert_eq!(back.values(), f.values());
        assert_eq!(back.is_even(), f.is_even());
        assert!(back.is_even());
    }

    #[test]
    fn comments_are_skipped() {
        let g = Grid::new(2, 9).unwrap();
        let f = ScalarField::sample(g, |x| x[0] - x[1]).unwrap();
        let mut buf = Vec::new();
        write_field_annotated(&f, "n = 2\nm = 9", &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# version = field/1\n# n = 2\n# m = 9\n2 9 none\n"));
        assert_eq!(parse_field(&text).unwrap().values(), f.values());
    }

    #[test]
    fn malformed_dumps() {
        assert!(parse_field("").is_err());
        assert!(parse_field("2 10 none\n").is_err());
        assert!(parse_field("2 9 maybe\n").is_err());
        let short = "2 9 none\n1.0\n";
        match parse_field(short).unwrap_err() {
            Error::Parse { msg, .. } => assert!(msg.contains("expected 81")),
            e => panic!("{e}"),
        }
        let mut odd = String::from("2 9 even\n");
        for i in 0..81 {
            odd.push_str(&format!("{}\n", i % 9));
        }
        assert!(parse_field(&odd).is_err());
    }

    #[test]
    fn slice_csv_has_header_and_rows() {
        let g = Grid::new(2, 9).unwrap();
        let f = ScalarField::sample(g, |x| x[0]).unwrap();
        let mut buf = Vec::new();
        write_slice_csv(&f, 1, g.center_index(), &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), 10);
        assert_eq!(s.lines().next().unwrap(), "x1,value");
    }

    proptest! {
        #[test]
        fn parser_never_panics(s in "\\PC{0,200}") {
            let _ = parse_field(&s);
        }
    }
}
