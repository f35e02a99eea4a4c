//! Table rendering. Data goes to standard output (or `--out`) and nothing
//! else does; diagnostics stay on standard error.
//!
//! CSV floats carry 17 significant digits so that equal numbers always
//! produce equal bytes and golden files are exact. The JSON emitter is
//! written out by hand to keep the column order of the CSV contract and
//! byte-for-byte determinism; the values are plain JSON numbers.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    F(f64),
    U(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

fn push_float(out: &mut String, v: f64) {
    if v.is_infinite() {
        out.push_str(if v > 0.0 { "inf" } else { "-inf" });
    } else {
        let _ = write!(out, "{v:.16e}");
    }
}

pub fn to_csv(table: &Table) -> String {
    let mut s = String::new();
    s.push_str(&table.columns.join(","));
    s.push('\n');
    for row in &table.rows {
        debug_assert_eq!(row.len(), table.columns.len());
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            match *cell {
                Cell::F(v) => push_float(&mut s, v),
                Cell::U(v) => {
                    let _ = write!(s, "{v}");
                }
            }
        }
        s.push('\n');
    }
    s
}

pub fn to_json(table: &Table) -> String {
    let mut s = String::from("{\"rows\":[");
    for (r, row) in table.rows.iter().enumerate() {
        if r > 0 {
            s.push(',');
        }
        s.push('{');
        for (i, (name, cell)) in table.columns.iter().zip(row).enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "\"{name}\":");
            match *cell {
                // Infinities are not JSON numbers; none of the emitted
                // quantities can be infinite, but degrade to a string
                // rather than produce an unparsable document.
                Cell::F(v) if v.is_infinite() => {
                    let _ = write!(s, "\"{}\"", if v > 0.0 { "inf" } else { "-inf" });
                }
                Cell::F(v) => push_float(&mut s, v),
                Cell::U(v) => {
                    let _ = write!(s, "{v}");
                }
            }
        }
        s.push('}');
    }
    s.push_str("]}\n");
    s
}
