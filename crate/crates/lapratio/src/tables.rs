//! CSV tables with shortest round-trip float formatting.

use std::io::{Read, Write};

use lapratio_core::auction::BidPair;

/// Shortest decimal string that parses back to the same `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Writes a header and rows of numbers. `None` cells are left empty.
pub fn write_rows<W: Write>(
    out: W,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<Option<f64>>>,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|c| c.map(format_f64).unwrap_or_default()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_samples<W: Write>(out: W, samples: &[BidPair]) -> csv::Result<()> {
    write_rows(
        out,
        &["top", "second"],
        samples.iter().map(|p| vec![Some(p.top), Some(p.second)]),
    )
}

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("expected header \"top,second\", found \"{0}\"")]
    Header(String),
    #[error("line {line}, column {column}: {message}")]
    Cell {
        line: u64,
        column: usize,
        message: String,
    },
}

pub fn read_samples<R: Read>(input: R) -> Result<Vec<BidPair>, TableError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != ["top", "second"] {
        return Err(TableError::Header(header.iter().collect::<Vec<_>>().join(",")));
    }
    let mut out = Vec::new();
    for record in r.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let cell = |i: usize| -> Result<f64, TableError> {
            let text = record.get(i).unwrap_or("");
            text.parse().map_err(|_| TableError::Cell {
                line,
                column: i + 1,
                message: format!("\"{text}\" is not a number"),
            })
        };
        out.push(BidPair {
            top: cell(0)?,
            second: cell(1)?,
        });
    }
    Ok(out)
}

/// Aligned plain-text rendering of CSV output, for `--pretty`.
pub fn prettify(csv_text: &str) -> String {
    let rows: Vec<Vec<&str>> = csv_text
        .lines()
        .map(|l| l.split(',').collect())
        .collect();
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:>w$}", w = widths[c]))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, 5e-324, f64::MAX] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_f64(0.5), "0.5");
    }

    #[test]
    fn samples_round_trip() {
        let rows = vec![
            BidPair { top: 1.0 / 7.0, second: -0.25 },
            BidPair { top: 3e-200, second: 3e-200 },
        ];
        let mut buf = Vec::new();
        write_samples(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("top,second\n"));
        assert_eq!(read_samples(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn bad_cells_are_located() {
        let err = read_samples("top,second\n1,2\n3,x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, TableError::Cell { line: 3, column: 2, .. }), "{err}");
        assert!(matches!(
            read_samples("a,b\n1,2\n".as_bytes()),
            Err(TableError::Header(_))
        ));
    }

    #[test]
    fn empty_cells_for_missing_values() {
        let mut buf = Vec::new();
        write_rows(&mut buf, &["lambda", "k"], [vec![Some(1.0), None]]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "lambda,k\n1.0,\n");
    }
}
