//! Matrix Market reader and writer for dense square complex matrices.
//!
//! Accepted dialects: `matrix coordinate real general`,
//! `matrix coordinate complex general`, `matrix array real general` and
//! `matrix array complex general`. Pattern and symmetry-compressed files
//! are rejected with an explicit message. Array data is column-major and
//! coordinate indices are 1-based, both per the format definition.

use std::fs;
use std::path::Path;

use crate::blockmat::{Complex64, ComplexDenseMatrix};
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_float(token: &str, line: usize) -> Result<f64> {
    // some Fortran writers emit D exponents
    let cleaned = token.replace(['D', 'd'], "e");
    cleaned
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("invalid number '{token}'")))
}

pub fn read_matrix_market(path: &Path) -> Result<ComplexDenseMatrix> {
    let text = fs::read_to_string(path)?;
    read_matrix_market_str(&text)
}

pub(crate) fn read_matrix_market_str(text: &str) -> Result<ComplexDenseMatrix> {
    let mut lines = text.lines().enumerate();

    let (header_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file"))?;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(
            header_no + 1,
            "expected header '%%MatrixMarket matrix <format> <field> <symmetry>'",
        ));
    }
    let format = tokens[2].as_str();
    let field = tokens[3].as_str();
    let symmetry = tokens[4].as_str();
    if format != "coordinate" && format != "array" {
        return Err(parse_err(header_no + 1, format!("unsupported format '{format}'")));
    }
    match field {
        "real" | "complex" => {}
        "pattern" => {
            return Err(parse_err(
                header_no + 1,
                "pattern files carry no values; only real/complex general matrices are supported",
            ))
        }
        other => return Err(parse_err(header_no + 1, format!("unsupported field '{other}'"))),
    }
    if symmetry != "general" {
        return Err(parse_err(
            header_no + 1,
            format!("symmetry '{symmetry}' not supported; expand the file to 'general' first"),
        ));
    }
    let complex = field == "complex";

    // skip comments, find the size line
    let (size_no, size_line) = loop {
        match lines.next() {
            Some((no, line)) if line.trim_start().starts_with('%') => {
                let _ = no;
                continue;
            }
            Some((no, line)) if line.trim().is_empty() => {
                let _ = no;
                continue;
            }
            Some((no, line)) => break (no, line),
            None => return Err(parse_err(header_no + 1, "missing size line")),
        }
    };
    let size_tokens: Vec<&str> = size_line.split_whitespace().collect();

    match format {
        "coordinate" => {
            if size_tokens.len() != 3 {
                return Err(parse_err(size_no + 1, "coordinate size line needs 'rows cols nnz'"));
            }
            let rows: usize = size_tokens[0]
                .parse()
                .map_err(|_| parse_err(size_no + 1, "invalid row count"))?;
            let cols: usize = size_tokens[1]
                .parse()
                .map_err(|_| parse_err(size_no + 1, "invalid column count"))?;
            let nnz: usize = size_tokens[2]
                .parse()
                .map_err(|_| parse_err(size_no + 1, "invalid entry count"))?;
            if rows != cols {
                return Err(parse_err(size_no + 1, format!("matrix must be square, got {rows}x{cols}")));
            }
            let mut out = ComplexDenseMatrix::zeros(rows);
            let mut seen = 0usize;
            for (no, raw) in lines {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('%') {
                    continue;
                }
                let toks: Vec<&str> = line.split_whitespace().collect();
                let expected = if complex { 4 } else { 3 };
                if toks.len() != expected {
                    return Err(parse_err(no + 1, format!("expected {expected} tokens")));
                }
                let i: usize = toks[0].parse().map_err(|_| parse_err(no + 1, "invalid row index"))?;
                let j: usize = toks[1].parse().map_err(|_| parse_err(no + 1, "invalid column index"))?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_err(no + 1, format!("index ({i}, {j}) out of range (1-based)")));
                }
                let re = parse_float(toks[2], no + 1)?;
                let im = if complex { parse_float(toks[3], no + 1)? } else { 0.0 };
                if !re.is_finite() || !im.is_finite() {
                    return Err(parse_err(no + 1, "non-finite value"));
                }
                out.set(i - 1, j - 1, Complex64::new(re, im));
                seen += 1;
            }
            if seen != nnz {
                return Err(parse_err(size_no + 1, format!("expected {nnz} entries, found {seen}")));
            }
            Ok(out)
        }
        _ => {
            if size_tokens.len() != 2 {
                return Err(parse_err(size_no + 1, "array size line needs 'rows cols'"));
            }
            let rows: usize = size_tokens[0]
                .parse()
                .map_err(|_| parse_err(size_no + 1, "invalid row count"))?;
            let cols: usize = size_tokens[1]
                .parse()
                .map_err(|_| parse_err(size_no + 1, "invalid column count"))?;
            if rows != cols {
                return Err(parse_err(size_no + 1, format!("matrix must be square, got {rows}x{cols}")));
            }
            let mut values = Vec::with_capacity(rows * cols);
            for (no, raw) in lines {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('%') {
                    continue;
                }
                let toks: Vec<&str> = line.split_whitespace().collect();
                let expected = if complex { 2 } else { 1 };
                if toks.len() != expected {
                    return Err(parse_err(no + 1, format!("expected {expected} tokens")));
                }
                let re = parse_float(toks[0], no + 1)?;
                let im = if complex { parse_float(toks[1], no + 1)? } else { 0.0 };
                if !re.is_finite() || !im.is_finite() {
                    return Err(parse_err(no + 1, "non-finite value"));
                }
                values.push(Complex64::new(re, im));
            }
            if values.len() != rows * cols {
                return Err(parse_err(
                    size_no + 1,
                    format!("expected {} values, found {}", rows * cols, values.len()),
                ));
            }
            // array data is column-major
            let mut out = ComplexDenseMatrix::zeros(rows);
            for (idx, value) in values.into_iter().enumerate() {
                out.set(idx % rows, idx / rows, value);
            }
            Ok(out)
        }
    }
}

/// Writes the dense `array complex general` dialect with 17 significant
/// digits, which round-trips f64 exactly.
pub fn write_matrix_market(path: &Path, a: &ComplexDenseMatrix) -> Result<()> {
    let n = a.dim();
    let mut text = String::new();
    text.push_str("%%MatrixMarket matrix array complex general\n");
    text.push_str(&format!("{n} {n}\n"));
    for j in 0..n {
        for i in 0..n {
            let z = a.get(i, j);
            text.push_str(&format!("{:.16e} {:.16e}\n", z.re, z.im));
        }
    }
    super::atomic_write(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_identity() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n2 2 1.0\n";
        let m = read_matrix_market_str(text).unwrap();
        assert_eq!(m, ComplexDenseMatrix::identity(2));
    }

    #[test]
    fn coordinate_complex_and_unlisted_entries_are_zero() {
        let text = "%%MatrixMarket matrix coordinate complex general\n% comment\n2 2 1\n1 2 3.5 -1.25\n";
        let m = read_matrix_market_str(text).unwrap();
        assert_eq!(m.get(0, 1), Complex64::new(3.5, -1.25));
        assert_eq!(m.get(1, 0), Complex64::new(0.0, 0.0));
        assert_eq!(m.get(0, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn array_is_column_major() {
        let text = "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n";
        let m = read_matrix_market_str(text).unwrap();
        assert_eq!(m.get(0, 0).re, 1.0);
        assert_eq!(m.get(1, 0).re, 2.0);
        assert_eq!(m.get(0, 1).re, 3.0);
        assert_eq!(m.get(1, 1).re, 4.0);
    }

    #[test]
    fn fortran_exponents_parse() {
        let text = "%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 2.5D-03\n";
        let m = read_matrix_market_str(text).unwrap();
        assert!((m.get(0, 0).re - 2.5e-3).abs() < 1e-18);
    }

    #[test]
    fn rejects_bad_inputs_with_line_numbers() {
        let cases = [
            ("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n1 1\n", 1),
            ("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 1 1.0\n", 1),
            ("%%MatrixMarket vector coordinate real general\n2 2 1\n1 1 1.0\n", 1),
            ("%%MatrixMarket matrix coordinate real general\n2 3 1\n1 1 1.0\n", 2),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n", 3),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n0 1 1.0\n", 3),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n", 3),
            ("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n", 2),
        ];
        for (text, want_line) in cases {
            match read_matrix_market_str(text) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, want_line, "input: {text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn write_then_read_roundtrips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.mtx");
        let mut a = ComplexDenseMatrix::zeros(3);
        let mut v: f64 = 0.37;
        for i in 0..3 {
            for j in 0..3 {
                v = (v * 997.13).fract() - 0.5;
                let w = (v * 31.7).fract();
                a.set(i, j, Complex64::new(v * 1e3, w / 1e5));
            }
        }
        write_matrix_market(&path, &a).unwrap();
        let b = read_matrix_market(&path).unwrap();
        assert_eq!(a, b);
    }
}
