//! Artifact encoding and atomic file writes.

use std::io::Write;
use std::path::Path;

use btps_core::spectral::{NumericalRangeBoundary, PseudospectrumGrid};
use btps_core::BTMatrix;
use serde::Serialize;
use tempfile::NamedTempFile;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// JSON body with the schema version as its first field.
#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    v: u32,
    #[serde(flatten)]
    body: &'a T,
}

impl Artifact {
    pub fn json<T: Serialize>(name: impl Into<String>, body: &T) -> Self {
        let mut bytes = serde_json::to_vec_pretty(&Versioned { v: crate::config::SCHEMA_VERSION, body })
            .expect("artifact bodies serialize");
        bytes.push(b'\n');
        Artifact { name: name.into(), bytes }
    }

    /// For bodies that already carry `v`.
    pub fn plain_json<T: Serialize>(name: impl Into<String>, body: &T) -> Self {
        let mut bytes = serde_json::to_vec_pretty(body).expect("artifact bodies serialize");
        bytes.push(b'\n');
        Artifact { name: name.into(), bytes }
    }

    fn csv(name: impl Into<String>, fill: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Self {
        let mut w = csv::WriterBuilder::new().flexible(false).from_writer(Vec::new());
        fill(&mut w).expect("in-memory csv");
        Artifact { name: name.into(), bytes: w.into_inner().expect("in-memory csv") }
    }

    /// One line per row, `re,im` for each entry.
    pub fn matrix_csv(name: impl Into<String>, t: &BTMatrix) -> Self {
        Artifact::csv(name, |w| {
            let e = t.entries();
            for r in 0..e.nrows() {
                let row: Vec<f64> = e.row(r).iter().flat_map(|z| [z.re, z.im]).collect();
                w.serialize(row)?;
            }
            Ok(())
        })
    }

    /// `re,im,sigma_min`, imaginary part as the outer loop.
    pub fn grid_csv(name: impl Into<String>, g: &PseudospectrumGrid) -> Self {
        Artifact::csv(name, |w| {
            w.write_record(["re", "im", "sigma_min"])?;
            for (z, s) in g.nodes() {
                w.serialize((z.re, z.im, s))?;
            }
            Ok(())
        })
    }

    /// `theta,support,re,im`.
    pub fn range_csv(name: impl Into<String>, r: &NumericalRangeBoundary) -> Self {
        Artifact::csv(name, |w| {
            w.write_record(["theta", "support", "re", "im"])?;
            for ((t, h), z) in r.angles.iter().zip(&r.support_values).zip(&r.boundary_points) {
                w.serialize((t, h, z.re, z.im))?;
            }
            Ok(())
        })
    }
}

/// Writes each artifact to a temporary file in `dir` and renames it into place.
pub fn commit(dir: &Path, artifacts: &[Artifact]) -> Result<(), CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    for a in artifacts {
        let target = dir.join(&a.name);
        let mut tmp = NamedTempFile::with_prefix_in(format!(".{}.", a.name), dir).map_err(io(dir))?;
        tmp.write_all(&a.bytes).map_err(io(&target))?;
        tmp.as_file().sync_all().map_err(io(&target))?;
        tmp.persist(&target).map_err(|e| CliError::Io { path: target.clone(), source: e.error })?;
    }
    Ok(())
}
