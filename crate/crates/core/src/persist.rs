//! JSON-lines record and atom streams, CSV summaries and JSON reports.
//!
//! Floats are written in shortest round-trip form, so a stream read back
//! reproduces every value bit for bit.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::AVector;
use crate::measures::WeightedAtomSet;
use crate::orbit::{EnumStats, FactorCircle, TorusRecord};
use crate::word::Word;

#[derive(Debug, Error)]
pub enum PersistError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Serialize, Deserialize)]
struct FactorLine {
    center_re: f64,
    center_im: f64,
    radius: f64,
}

#[derive(Serialize, Deserialize)]
struct RecordLine {
    word: String,
    factors: Vec<FactorLine>,
    v: Vec<f64>,
    psi_value: f64,
    cartan: Vec<f64>,
}

pub fn record_line(rec: &TorusRecord) -> String {
    let line = RecordLine {
        word: rec.word.to_string(),
        factors: rec
            .factors
            .iter()
            .map(|f| FactorLine {
                center_re: f.center.re,
                center_im: f.center.im,
                radius: f.radius,
            })
            .collect(),
        v: rec.v.as_slice().to_vec(),
        psi_value: rec.psi_value,
        cartan: rec.cartan.as_slice().to_vec(),
    };
    serde_json::to_string(&line).expect("record serializes")
}

pub fn write_records<'a, W: Write>(
    mut out: W,
    records: impl IntoIterator<Item = &'a TorusRecord>,
) -> Result<(), PersistError> {
    for rec in records {
        writeln!(out, "{}", record_line(rec))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_records<R: BufRead>(input: R) -> Result<Vec<TorusRecord>, PersistError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parse = |reason: String| PersistError::Parse { line: i + 1, reason };
        let raw: RecordLine = serde_json::from_str(&line).map_err(|e| parse(e.to_string()))?;
        let word: Word = raw.word.parse().map_err(|e: crate::word::WordError| parse(e.to_string()))?;
        out.push(TorusRecord {
            word,
            factors: raw
                .factors
                .iter()
                .map(|f| FactorCircle {
                    center: Complex64::new(f.center_re, f.center_im),
                    radius: f.radius,
                })
                .collect(),
            v: AVector::new(raw.v),
            psi_value: raw.psi_value,
            cartan: AVector::new(raw.cartan),
        });
    }
    Ok(out)
}

/// One row per word length: `depth, records, min_psi, max_psi`.
pub fn write_summary_csv<W: Write>(out: W, stats: &EnumStats) -> Result<(), PersistError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["depth", "records", "min_psi", "max_psi"])?;
    for s in &stats.per_depth {
        w.write_record([
            s.depth.to_string(),
            s.records.to_string(),
            s.min_psi.to_string(),
            s.max_psi.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct AtomLine {
    position: Vec<[f64; 2]>,
    weight: f64,
}

pub fn write_atoms<W: Write>(mut out: W, atoms: &WeightedAtomSet) -> Result<(), PersistError> {
    for i in 0..atoms.len() {
        let line = AtomLine {
            position: atoms.position(i).iter().map(|z| [z.re, z.im]).collect(),
            weight: atoms.weight(i),
        };
        writeln!(out, "{}", serde_json::to_string(&line).expect("atom serializes"))?;
    }
    out.flush()?;
    Ok(())
}

/// `(positions, weights)` of an atom stream.
pub fn read_atoms<R: BufRead>(input: R) -> Result<(Vec<Vec<Complex64>>, Vec<f64>), PersistError> {
    let (mut pos, mut weights) = (Vec::new(), Vec::new());
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: AtomLine = serde_json::from_str(&line).map_err(|e| PersistError::Parse {
            line: i + 1,
            reason: e.to_string(),
        })?;
        pos.push(raw.position.iter().map(|p| Complex64::new(p[0], p[1])).collect());
        weights.push(raw.weight);
    }
    Ok((pos, weights))
}

pub fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> Result<(), PersistError> {
    serde_json::to_writer_pretty(&mut out, value).map_err(std::io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geometry::LinearForm;
    use crate::orbit::{enumerate_tori, EnumConfig};
    use crate::schottky::admissible_seed_check;

    #[test]
    fn records_round_trip_bit_exactly() {
        let spec = fixtures::fixture_b();
        let seed = admissible_seed_check(&spec, fixtures::unit_seed(2), 4, 0.01).unwrap();
        let e = enumerate_tori(&spec, &seed, &EnumConfig::exhaustive(5, LinearForm::new(vec![0.3, 1.7]))).unwrap();
        let mut buf = Vec::new();
        write_records(&mut buf, &e.records).unwrap();
        let back = read_records(buf.as_slice()).unwrap();
        assert_eq!(back.len(), e.records.len());
        for (a, b) in e.records.iter().zip(&back) {
            assert_eq!(a.word, b.word);
            assert_eq!(a.psi_value.to_bits(), b.psi_value.to_bits());
            for (x, y) in a.v.as_slice().iter().zip(b.v.as_slice()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
            assert_eq!(a, b);
        }
    }

    #[test]
    fn bad_line_is_located() {
        let text = "{\"word\":\"\",\"factors\":[],\"v\":[],\"psi_value\":0.0,\"cartan\":[]}\nnot json\n";
        match read_records(text.as_bytes()) {
            Err(PersistError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn summary_has_one_row_per_depth() {
        let spec = fixtures::fixture_a();
        let seed = admissible_seed_check(&spec, fixtures::fixture_a_seed(), 4, 0.01).unwrap();
        let e = enumerate_tori(&spec, &seed, &EnumConfig::exhaustive(4, LinearForm::sum_form(2))).unwrap();
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, &e.stats).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "depth,records,min_psi,max_psi");
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("0,1,0,0"));
    }

    #[test]
    fn atoms_round_trip() {
        let spec = fixtures::fixture_a();
        let atoms = crate::measures::patterson_atoms(&spec, &LinearForm::new(vec![0.15, 0.15]), 3, 1).unwrap();
        let mut buf = Vec::new();
        write_atoms(&mut buf, &atoms).unwrap();
        let (pos, w) = read_atoms(buf.as_slice()).unwrap();
        assert_eq!(w, atoms.weights());
        for (i, p) in pos.iter().enumerate() {
            assert_eq!(p.as_slice(), atoms.position(i));
        }
    }
}
