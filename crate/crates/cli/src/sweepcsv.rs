//! Sweep tables as CSV: `param,value,choi_min_eig,seesaw_min,cp,positive,ppt`.
//!
//! Floats are written with 17 significant digits, so reading a table back
//! reproduces every value bit for bit. Unrequested checks are empty cells.

use std::io::{Read, Write};

use posmap_core::SweepRow;

use crate::error::CliError;

pub const HEADER: [&str; 7] = ["param", "value", "choi_min_eig", "seesaw_min", "cp", "positive", "ppt"];

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

fn opt_bool(b: Option<bool>) -> String {
    b.map(|b| b.to_string()).unwrap_or_default()
}

pub fn write_rows<W: Write>(out: W, rows: &[SweepRow]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(out);
    let fail = |e: csv::Error| CliError::input(format!("csv: {e}"));
    writer.write_record(HEADER).map_err(fail)?;
    for row in rows {
        writer
            .write_record([
                row.param_name.clone(),
                format_float(row.param_value),
                opt_float(row.choi_min_eig),
                opt_float(row.seesaw_min),
                opt_bool(row.cp),
                opt_bool(row.positive),
                opt_bool(row.ppt),
            ])
            .map_err(fail)?;
    }
    writer.flush().map_err(|e| CliError::input(format!("csv: {e}")))
}

fn parse_float(cell: &str, column: &str) -> Result<Option<f64>, CliError> {
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse()
        .map(Some)
        .map_err(|_| CliError::input(format!("column {column}: not a number: {cell:?}")))
}

fn parse_bool(cell: &str, column: &str) -> Result<Option<bool>, CliError> {
    match cell {
        "" => Ok(None),
        "true" => Ok(Some(true)),
        "false" => Ok(Some(false)),
        _ => Err(CliError::input(format!("column {column}: not a boolean: {cell:?}"))),
    }
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<SweepRow>, CliError> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers().map_err(|e| CliError::input(format!("csv: {e}")))?;
    if header.iter().ne(HEADER) {
        return Err(CliError::input(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::input(format!("csv: {e}")))?;
        let cell = |k: usize| record.get(k).unwrap_or("");
        rows.push(SweepRow {
            param_name: cell(0).to_string(),
            param_value: parse_float(cell(1), HEADER[1])?
                .ok_or_else(|| CliError::input("missing parameter value"))?,
            choi_min_eig: parse_float(cell(2), HEADER[2])?,
            seesaw_min: parse_float(cell(3), HEADER[3])?,
            cp: parse_bool(cell(4), HEADER[4])?,
            positive: parse_bool(cell(5), HEADER[5])?,
            ppt: parse_bool(cell(6), HEADER[6])?,
        });
    }
    Ok(rows)
}
