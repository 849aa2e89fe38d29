//! QBER corpora: bulk session simulation and on-disk format.
//!
//! A corpus is the list of per-session QBERs for one `(noise, placement,
//! protocol)` triple. On disk it is a single-column CSV (header `qber`,
//! floats at 17 significant digits so values round-trip bit-exactly) next
//! to a `.meta.json` sidecar holding the generating configuration and seed.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use quantum_core::NoiseKind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::QkdError;
use crate::qber::compute_qber;
use crate::rng::stream_rng;
use crate::session::{run_session, SessionConfig};

/// A generated QBER corpus together with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QberCorpus {
    /// The noise family that produced the corpus; doubles as the class
    /// label downstream.
    pub label: NoiseKind,
    pub config: SessionConfig,
    pub master_seed: u64,
    pub values: Vec<f64>,
}

/// Sidecar metadata stored beside the CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct CorpusMeta {
    label: NoiseKind,
    config: SessionConfig,
    master_seed: u64,
    count: usize,
}

/// Simulates `count` sessions and collects one QBER per session.
///
/// Session `i` draws from ChaCha stream `i` keyed by `master_seed`, so the
/// result is identical whether the loop runs serially or work-stolen across
/// threads. Sessions whose bases never match (QBER undefined) are rerun on
/// their own, already-advanced stream until they produce a defined rate.
pub fn generate_corpus(
    config: &SessionConfig,
    count: usize,
    master_seed: u64,
) -> Result<QberCorpus, QkdError> {
    config.validate()?;
    let values = (0..count as u64)
        .into_par_iter()
        .map(|session_index| {
            let mut rng = stream_rng(master_seed, session_index);
            loop {
                let record = run_session(config, &mut rng)?;
                if let Some(qber) = compute_qber(&record) {
                    return Ok(qber);
                }
            }
        })
        .collect::<Result<Vec<f64>, QkdError>>()?;
    Ok(QberCorpus {
        label: config.noise,
        config: config.clone(),
        master_seed,
        values,
    })
}

/// The sidecar path for a corpus CSV: `foo.csv` -> `foo.meta.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

/// Writes the corpus CSV and its metadata sidecar.
pub fn save_corpus(corpus: &QberCorpus, csv_path: &Path) -> Result<(), QkdError> {
    let mut writer = csv::Writer::from_writer(BufWriter::new(File::create(csv_path)?));
    writer.write_record(["qber"])?;
    for v in &corpus.values {
        writer.write_record([format!("{v:.16e}")])?;
    }
    writer.flush()?;

    let meta = CorpusMeta {
        label: corpus.label,
        config: corpus.config.clone(),
        master_seed: corpus.master_seed,
        count: corpus.values.len(),
    };
    let mut out = BufWriter::new(File::create(sidecar_path(csv_path))?);
    serde_json::to_writer_pretty(&mut out, &meta)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Reads a corpus CSV plus sidecar back into memory.
pub fn load_corpus(csv_path: &Path) -> Result<QberCorpus, QkdError> {
    let meta_file = File::open(sidecar_path(csv_path))?;
    let meta: CorpusMeta = serde_json::from_reader(BufReader::new(meta_file))?;

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(BufReader::new(File::open(csv_path)?));
    {
        let headers = reader.headers()?;
        if headers.len() != 1 || &headers[0] != "qber" {
            return Err(QkdError::Malformed(format!(
                "expected single `qber` column, found {headers:?}"
            )));
        }
    }
    let mut values = Vec::with_capacity(meta.count);
    for row in reader.records() {
        let row = row?;
        let text = &row[0];
        let value: f64 = text
            .parse()
            .map_err(|_| QkdError::Malformed(format!("unparsable qber value {text:?}")))?;
        values.push(value);
    }
    if values.len() != meta.count {
        return Err(QkdError::Malformed(format!(
            "sidecar promises {} rows, csv holds {}",
            meta.count,
            values.len()
        )));
    }
    Ok(QberCorpus {
        label: meta.label,
        config: meta.config,
        master_seed: meta.master_seed,
        values,
    })
}
