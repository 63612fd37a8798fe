//! Dissociation curves over a fixture series.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixtures::{series, Fixture};
use crate::pipeline::{run_pipeline, RunConfig, Source};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    /// Angstrom.
    pub bond: f64,
    pub method: String,
    /// Hartree.
    pub energy: f64,
    pub qubits: usize,
}

/// Rows ordered by method, then bond length.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveResult {
    pub rows: Vec<CurveRow>,
}

impl CurveResult {
    pub fn method(&self, method: &str) -> Vec<&CurveRow> {
        self.rows.iter().filter(|r| r.method == method).collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

/// Run `template` on every fixture whose name starts with `prefix`.
///
/// Points run in parallel; each keeps the template's seed, so the result
/// does not depend on scheduling. Every energy row of each report becomes
/// a method column.
pub fn dissociation_curve(prefix: &str, template: &RunConfig) -> Result<CurveResult> {
    let fixtures: Vec<&Fixture> = series(prefix);
    if fixtures.is_empty() {
        return Err(Error::Config(format!("no fixtures match `{prefix}`")));
    }
    let reports = fixtures
        .par_iter()
        .map(|f| {
            let config = RunConfig { source: Source::Fixture { name: f.name.into() }, ..template.clone() };
            run_pipeline(&config).map(|r| (f.bond, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (bond, r) in &reports {
        let qubits = r.stages.iter().filter_map(|s| s.qubits).next_back().unwrap_or(0);
        for e in &r.energies {
            rows.push(CurveRow { bond: *bond, method: e.label.clone(), energy: e.energy, qubits });
        }
    }
    rows.sort_by(|a, b| a.method.cmp(&b.method).then(a.bond.total_cmp(&b.bond)));
    Ok(CurveResult { rows })
}
