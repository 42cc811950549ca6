//! Plain-text tensor files.
//!
//! ```text
//! TNS <d> <n>
//! <n^d reals, whitespace separated, first index fastest>
//! ```
//!
//! Values are written one per line with 17 significant digits, which
//! round-trips every `f64` exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::DenseTensor;
use crate::error::{Error, Result};

pub fn write_tns<W: Write>(tensor: &DenseTensor, mut out: W) -> Result<()> {
    writeln!(out, "TNS {} {}", tensor.order(), tensor.dim())?;
    for v in tensor.as_slice() {
        writeln!(out, "{v:.16e}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_tns_file(tensor: &DenseTensor, path: impl AsRef<Path>) -> Result<()> {
    write_tns(tensor, BufWriter::new(File::create(path)?))
}

pub fn read_tns<R: Read>(input: R) -> Result<DenseTensor> {
    let mut reader = BufReader::new(input);
    let mut header = String::new();
    reader.read_line(&mut header)?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("TNS") {
        return Err(Error::Parse("missing TNS header".into()));
    }
    let mut dim_field = |name: &str| -> Result<usize> {
        fields
            .next()
            .ok_or_else(|| Error::Parse(format!("header lacks {name}")))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad {name}: {e}")))
    };
    let order = dim_field("order")?;
    let dim = dim_field("dimension")?;
    if fields.next().is_some() {
        return Err(Error::Parse("trailing header fields".into()));
    }

    let mut body = String::new();
    reader.read_to_string(&mut body)?;
    let data = body
        .split_whitespace()
        .enumerate()
        .map(|(k, tok)| {
            tok.parse::<f64>()
                .map_err(|e| Error::Parse(format!("value {k} ({tok:?}): {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    DenseTensor::new(order, dim, data).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_tns_file(path: impl AsRef<Path>) -> Result<DenseTensor> {
    read_tns(File::open(path)?)
}
