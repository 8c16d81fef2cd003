//! CSV export of block tables and norm values.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::chemin_lerner::NormTimeSeries;
use crate::error::Result;

/// One named norm value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub norm_name: String,
    pub s: f64,
    pub s_prime: f64,
    /// Time exponent (`"1"`, `"2"`, `"inf"`), blank for spatial norms.
    pub r: String,
    pub value: f64,
}

/// Rows `(time, q, j_or_blank, block_norm)`. Vertical blocks have a blank
/// `j`; the zero-frequency slot is written as `mean`.
pub fn write_block_csv<W: Write>(series: &NormTimeSeries, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["time", "q", "j_or_blank", "block_norm"])?;
    let label = |v: Option<i32>| v.map_or_else(|| "mean".to_string(), |q| q.to_string());
    for (t, table) in series.times.iter().zip(&series.tables) {
        let nq = table.n_q_slots();
        for vs in 0..nq {
            w.write_record([
                t.to_string(),
                label(table.q_of_slot(vs)),
                String::new(),
                table.vertical[vs].sqrt().to_string(),
            ])?;
        }
        for hs in 0..table.n_j_slots() {
            for vs in 0..nq {
                w.write_record([
                    t.to_string(),
                    label(table.q_of_slot(vs)),
                    label(table.j_of_slot(hs)),
                    table.anisotropic[hs * nq + vs].sqrt().to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Rows `(norm_name, s, s_prime, r, value)`.
pub fn write_norm_csv<W: Write>(records: &[NormRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::BlockTable;
    use crate::spectral::{Grid, SpectralField};

    #[test]
    fn block_rows_have_header_and_mean_label() {
        let g = Grid::cube(8).unwrap();
        let f = SpectralField::from_fn(g, |x, _, z| x.sin() + z.cos());
        let mut s = NormTimeSeries::new();
        s.push(0.0, BlockTable::of_field(&f)).unwrap();
        let mut buf = Vec::new();
        write_block_csv(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("time,q,j_or_blank,block_norm"));
        assert!(text.contains("0,mean,,"));

        let mut buf = Vec::new();
        let rec = NormRecord {
            norm_name: "sup_R".into(),
            s: 0.0,
            s_prime: 0.5,
            r: "inf".into(),
            value: 1.5,
        };
        write_norm_csv(&[rec], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("norm_name,s,s_prime,r,value\nsup_R,0.0,0.5,inf,1.5"));
    }
}
