//! Plain-text point clouds: a header line `d n version`, then `n` rows of `d` reals.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sphere_geom::{norm, SphereCloud, UNIT_TOL};

pub const CLOUD_FORMAT_VERSION: u32 = 1;

/// Rows further than this from unit norm are rejected on load.
pub const LOAD_TOL: f64 = 1e-6;

pub fn write_cloud<W: Write>(mut out: W, cloud: &SphereCloud) -> Result<()> {
    writeln!(out, "{} {} {}", cloud.dim(), cloud.len(), CLOUD_FORMAT_VERSION)?;
    let mut line = String::new();
    for row in cloud.rows() {
        line.clear();
        for (k, v) in row.iter().enumerate() {
            if k > 0 {
                line.push(' ');
            }
            // shortest representation that parses back to the same bits
            line.push_str(&format!("{v:?}"));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Parses a cloud. Rows within `1e-10` of unit norm are kept bit for bit, rows within
/// `1e-6` are renormalised, anything else is an error naming the row.
pub fn read_cloud<R: Read>(input: R) -> Result<SphereCloud> {
    let mut lines = BufReader::new(input).lines();
    let header = lines.next().ok_or_else(|| Error::Malformed("empty cloud file".to_string()))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [d, n, version] = fields[..] else {
        return Err(Error::Malformed(format!("header {header:?} is not `d n version`")));
    };
    let parse = |s: &str, what: &str| -> Result<usize> {
        s.parse().map_err(|_| Error::Malformed(format!("bad {what} {s:?} in header")))
    };
    let (d, n, version) = (parse(d, "dimension")?, parse(n, "count")?, parse(version, "version")?);
    if version != CLOUD_FORMAT_VERSION as usize {
        return Err(Error::Malformed(format!("unsupported cloud format version {version}")));
    }
    if d < 2 || n < 1 {
        return Err(Error::Malformed(format!("cloud needs d >= 2 and n >= 1, got d = {d}, n = {n}")));
    }
    let mut data = Vec::with_capacity(d * n);
    let mut row = 0usize;
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if row == n {
            return Err(Error::Malformed(format!("more than {n} rows")));
        }
        let start = data.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::Malformed(format!("row {row}: bad number {tok:?}")))?;
            data.push(v);
        }
        if data.len() - start != d {
            return Err(Error::Malformed(format!("row {row} has {} values, expected {d}", data.len() - start)));
        }
        let r = norm(&data[start..]);
        if !r.is_finite() || (r - 1.0).abs() > LOAD_TOL {
            return Err(Error::Malformed(format!("row {row} has norm {r}, expected 1")));
        }
        if (r - 1.0).abs() > UNIT_TOL {
            data[start..].iter_mut().for_each(|c| *c /= r);
        }
        row += 1;
    }
    if row != n {
        return Err(Error::Malformed(format!("expected {n} rows, found {row}")));
    }
    Ok(SphereCloud::from_unit_rows(d, data))
}

pub fn save_cloud(path: &Path, cloud: &SphereCloud) -> Result<()> {
    let f = fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_cloud(std::io::BufWriter::new(f), cloud)
}

pub fn load_cloud(path: &Path) -> Result<SphereCloud> {
    let f = fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_cloud(f)
}
