use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One row of a norm report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub run_id: String,
    pub norm: String,
    pub parameters: String,
    pub value: f64,
}

/// Writes `run_id,norm,parameters,value` rows with a header.
pub fn write_norm_csv<W: Write>(out: W, rows: &[NormRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["run_id", "norm", "parameters", "value"])
            .map_err(std::io::Error::from)?;
    }
    for r in rows {
        w.serialize(r).map_err(std::io::Error::from)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_rows() {
        let mut buf = Vec::new();
        let rows = vec![NormRecord {
            run_id: "r1".into(),
            norm: "lq".into(),
            parameters: "q=2".into(),
            value: 1.5,
        }];
        write_norm_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "run_id,norm,parameters,value\nr1,lq,q=2,1.5\n");
        let mut empty = Vec::new();
        write_norm_csv(&mut empty, &[]).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap(), "run_id,norm,parameters,value\n");
    }
}
