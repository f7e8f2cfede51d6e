//! Point-cloud CSV exchange: one point per row, coordinates separated by
//! commas, shortest round-trip float formatting. No header by default; an
//! optional `x0,x1,…` header row can be written and is recognized on read.

use std::io::{BufRead, Write};

use crate::compact::PointSet;
use crate::error::Error;
use crate::Result;

/// Write `set`, one row per point. With `header`, the first row is
/// `x0,x1,…` up to the dimension.
pub fn write_point_set<W: Write>(w: &mut W, set: &PointSet, header: bool) -> Result<()> {
    if header {
        let names: Vec<String> = (0..set.dim()).map(|k| format!("x{k}")).collect();
        writeln!(w, "{}", names.join(","))?;
    }
    let mut row = String::new();
    for p in set.iter() {
        row.clear();
        for (k, c) in p.iter().enumerate() {
            if k > 0 {
                row.push(',');
            }
            // `Display` for f64 is the shortest string that parses back to
            // the same bits, so write → read is lossless.
            row.push_str(&format!("{c}"));
        }
        writeln!(w, "{row}")?;
    }
    Ok(())
}

/// Read a point cloud. The dimension is the column count of the first data
/// row; a leading `x0,x1,…` header row is skipped. Blank lines are ignored,
/// anything else malformed is an error naming the 1-based line.
pub fn read_point_set<R: BufRead>(r: R) -> Result<PointSet> {
    let mut dim = 0usize;
    let mut coords = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        if dim == 0 && is_header(&fields) {
            continue;
        }
        let mut row = Vec::with_capacity(fields.len());
        for field in &fields {
            let value: f64 = field.parse().map_err(|_| Error::Csv {
                line: idx + 1,
                detail: format!("cannot parse `{field}` as a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::Csv {
                    line: idx + 1,
                    detail: format!("non-finite coordinate `{field}`"),
                });
            }
            row.push(value);
        }
        if dim == 0 {
            dim = row.len();
        } else if row.len() != dim {
            return Err(Error::Csv {
                line: idx + 1,
                detail: format!("expected {dim} columns, found {}", row.len()),
            });
        }
        coords.extend_from_slice(&row);
    }
    if coords.is_empty() {
        return Err(Error::Csv { line: 0, detail: "no data rows".into() });
    }
    PointSet::from_flat(dim, coords)
}

fn is_header(fields: &[&str]) -> bool {
    !fields.is_empty()
        && fields
            .iter()
            .enumerate()
            .all(|(k, f)| *f == format!("x{k}"))
}
