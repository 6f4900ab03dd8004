//! CSV / JSON interchange for matching results.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{HdDistributions, ThresholdReport, UniquenessReport};
use crate::error::{Error, Result};

fn csv_err(e: csv::Error) -> Error {
    Error::Config(format!("csv: {e}"))
}

/// Writes `kind,id_a,id_b,hd,best_shift`, authentic rows first. Authentic
/// rows name the original and the variant; imposter rows name both
/// originals.
pub fn write_distributions_csv<W: Write>(
    w: W,
    d: &HdDistributions,
    original_ids: &[String],
    variant_ids: &[Vec<String>],
) -> Result<()> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(["kind", "id_a", "id_b", "hd", "best_shift"]).map_err(csv_err)?;
    for p in &d.authentic {
        out.write_record([
            "authentic",
            original_ids[p.id_a].as_str(),
            variant_ids[p.id_a][p.id_b].as_str(),
            &p.score.hd.to_string(),
            &p.score.best_shift.to_string(),
        ])
        .map_err(csv_err)?;
    }
    for p in &d.imposter {
        out.write_record([
            "imposter",
            original_ids[p.id_a].as_str(),
            original_ids[p.id_b].as_str(),
            &p.score.hd.to_string(),
            &p.score.best_shift.to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush().map_err(|e| Error::Config(e.to_string()))
}

/// Writes `threshold,far,frr`, one row per grid point.
pub fn write_threshold_csv<W: Write>(w: W, r: &ThresholdReport) -> Result<()> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(["threshold", "far", "frr"]).map_err(csv_err)?;
    for i in 0..r.grid.len() {
        out.write_record([format!("{:.2}", r.grid[i]), r.far[i].to_string(), r.frr[i].to_string()]).map_err(csv_err)?;
    }
    out.flush().map_err(|e| Error::Config(e.to_string()))
}

/// JSON summary of a validation run. `chosen`, `far` and `frr` are null when
/// no authentic samples were available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSummary {
    pub chosen: Option<f64>,
    pub far: Option<f64>,
    pub frr: Option<f64>,
    pub n_authentic: usize,
    pub n_imposter: usize,
}

impl ThresholdSummary {
    pub fn new(d: &HdDistributions, report: Option<&ThresholdReport>) -> Self {
        Self {
            chosen: report.map(|r| r.chosen),
            far: report.map(|r| r.chosen_far),
            frr: report.map(|r| r.chosen_frr),
            n_authentic: d.authentic.len(),
            n_imposter: d.imposter.len(),
        }
    }
}

/// Writes `candidate_id,min_hd,closest_ref,pass`.
pub fn write_screen_csv<W: Write>(w: W, r: &UniquenessReport) -> Result<()> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(["candidate_id", "min_hd", "closest_ref", "pass"]).map_err(csv_err)?;
    for e in &r.entries {
        out.write_record([
            e.candidate_id.as_str(),
            &e.min_hd.to_string(),
            e.closest_ref.as_str(),
            if e.pass { "true" } else { "false" },
        ])
        .map_err(csv_err)?;
    }
    out.flush().map_err(|e| Error::Config(e.to_string()))
}

/// Writes an `original,variant` CSV: the reference id and the variant code
/// path relative to the map file.
pub fn write_authentic_map<W: Write>(w: W, pairs: &[(String, String)]) -> Result<()> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(["original", "variant"]).map_err(csv_err)?;
    for (o, v) in pairs {
        out.write_record([o, v]).map_err(csv_err)?;
    }
    out.flush().map_err(|e| Error::Config(e.to_string()))
}

/// Reads an `original,variant` CSV (with header) into pairs.
pub fn read_authentic_map<R: Read>(r: R) -> Result<Vec<(String, String)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() < 2 {
            return Err(Error::Config(format!("authentic map row has {} fields", rec.len())));
        }
        out.push((rec[0].to_string(), rec[1].to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;

    #[test]
    fn authentic_map_round_trip() {
        let pairs = vec![("a".to_string(), "variants/a/rot_1.icode".to_string()), ("b,c".to_string(), "x".to_string())];
        let mut buf = Vec::new();
        write_authentic_map(&mut buf, &pairs).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("original,variant\n"));
        assert_eq!(read_authentic_map(&buf[..]).unwrap(), pairs);
    }

    #[test]
    fn threshold_csv_has_100_rows() {
        let r = sweep_samples(&[0.1, 0.2], &[0.45, 0.5]).unwrap();
        let mut buf = Vec::new();
        write_threshold_csv(&mut buf, &r).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 101);
        assert_eq!(lines[0], "threshold,far,frr");
        assert_eq!(lines[1], "0.00,0,1");
        assert_eq!(lines[100], "0.99,1,0");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn distributions_csv_rows() {
        let codes = vec![IrisCode::zeros(2, 8); 3];
        let d = build_distributions(&codes, &[vec![IrisCode::zeros(2, 8)], vec![], vec![]]).unwrap();
        let ids: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let vids = vec![vec!["a_rot1".to_string()], vec![], vec![]];
        let mut buf = Vec::new();
        write_distributions_csv(&mut buf, &d, &ids, &vids).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "kind,id_a,id_b,hd,best_shift\nauthentic,a,a_rot1,0,0\nimposter,a,b,0,0\nimposter,a,c,0,0\nimposter,b,c,0,0\n"
        );
        let s = ThresholdSummary::new(&d, None);
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"chosen":null,"far":null,"frr":null,"n_authentic":1,"n_imposter":3}"#
        );
    }

    #[test]
    fn authentic_map_parsing() {
        let m = read_authentic_map("original,variant\nx, x_rot1.icode\nx,x_auth0.icode\n".as_bytes()).unwrap();
        assert_eq!(m, vec![("x".into(), "x_rot1.icode".into()), ("x".into(), "x_auth0.icode".into())]);
    }
}
