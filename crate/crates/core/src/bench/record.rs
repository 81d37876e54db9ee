use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA: &str = "ssw-run/1";

pub const CSV_HEADER: &str = "schema,experiment,method,d,n,m,L,p,seed,value,wall_time_ns,extra";

/// One measured run. `extra` holds experiment-specific fields and is stored as a JSON
/// object in the last CSV column.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub experiment: String,
    pub method: String,
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub l: usize,
    pub p: u32,
    pub seed: u64,
    pub value: f64,
    pub wall_time_ns: u64,
    pub extra: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct Row {
    schema: String,
    experiment: String,
    method: String,
    d: usize,
    n: usize,
    m: usize,
    #[serde(rename = "L")]
    l: usize,
    p: u32,
    seed: u64,
    value: f64,
    wall_time_ns: u64,
    extra: String,
}

impl RunRecord {
    pub fn new(experiment: &str, method: &str) -> Self {
        RunRecord {
            experiment: experiment.to_string(),
            method: method.to_string(),
            d: 0,
            n: 0,
            m: 0,
            l: 0,
            p: 2,
            seed: 0,
            value: 0.0,
            wall_time_ns: 1,
            extra: BTreeMap::new(),
        }
    }

    pub fn with_extra(mut self, key: &str, value: impl ToString) -> Self {
        self.extra.insert(key.to_string(), value.to_string());
        self
    }

    pub fn extra_f64(&self, key: &str) -> Option<f64> {
        self.extra.get(key).and_then(|v| v.parse().ok())
    }

    pub fn validate(&self) -> Result<()> {
        if !self.value.is_finite() {
            return Err(Error::Malformed(format!("record value {} is not finite", self.value)));
        }
        if self.wall_time_ns == 0 {
            return Err(Error::Malformed("record wall time must be positive".to_string()));
        }
        Ok(())
    }

    fn to_row(&self) -> Result<Row> {
        Ok(Row {
            schema: SCHEMA.to_string(),
            experiment: self.experiment.clone(),
            method: self.method.clone(),
            d: self.d,
            n: self.n,
            m: self.m,
            l: self.l,
            p: self.p,
            seed: self.seed,
            value: self.value,
            wall_time_ns: self.wall_time_ns,
            extra: serde_json::to_string(&self.extra).map_err(|e| Error::Malformed(e.to_string()))?,
        })
    }

    fn from_row(row: Row) -> Result<Self> {
        if row.schema != SCHEMA {
            return Err(Error::Malformed(format!("unsupported record schema {:?}", row.schema)));
        }
        let extra = serde_json::from_str(&row.extra).map_err(|e| Error::Malformed(format!("extra column: {e}")))?;
        Ok(RunRecord {
            experiment: row.experiment,
            method: row.method,
            d: row.d,
            n: row.n,
            m: row.m,
            l: row.l,
            p: row.p,
            seed: row.seed,
            value: row.value,
            wall_time_ns: row.wall_time_ns,
            extra,
        })
    }
}

/// Writes the header and one row per record.
pub fn write_records<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(',')).map_err(csv_err)?;
    for r in records {
        r.validate()?;
        w.serialize(r.to_row()?).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Malformed(format!("unexpected header {:?}", header.join(","))));
    }
    rd.deserialize::<Row>().map(|row| RunRecord::from_row(row.map_err(csv_err)?)).collect()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Malformed(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunRecord {
        let mut r = RunRecord::new("bell_curve", "ssw_bs").with_extra("theta", 0.5).with_extra("threads", 1);
        r.d = 3;
        r.n = 500;
        r.m = 500;
        r.l = 200;
        r.seed = 7;
        r.value = 0.125;
        r.wall_time_ns = 42;
        r
    }

    #[test]
    fn golden_csv_layout() {
        let mut buf = Vec::new();
        write_records(&mut buf, &[sample()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "schema,experiment,method,d,n,m,L,p,seed,value,wall_time_ns,extra\n\
             ssw-run/1,bell_curve,ssw_bs,3,500,500,200,2,7,0.125,42,\"{\"\"theta\"\":\"\"0.5\"\",\"\"threads\"\":\"\"1\"\"}\"\n"
        );
    }

    #[test]
    fn records_round_trip() {
        let mut rs = vec![sample(), sample()];
        rs[1].value = 1.0 / 3.0;
        rs[1].extra.clear();
        let mut buf = Vec::new();
        write_records(&mut buf, &rs).unwrap();
        assert_eq!(read_records(buf.as_slice()).unwrap(), rs);
    }

    #[test]
    fn invalid_records_are_rejected() {
        let mut r = sample();
        r.value = f64::NAN;
        assert!(write_records(Vec::new(), &[r]).is_err());
        let mut r = sample();
        r.wall_time_ns = 0;
        assert!(write_records(Vec::new(), &[r]).is_err());
        assert!(read_records("a,b\n1,2\n".as_bytes()).is_err());
    }
}
