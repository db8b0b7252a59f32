//! Trace CSV and result JSON serialization.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::driver::{EberleinResult, SolveStatus};
use crate::error::Result;

/// Echo of one solver invocation, embedded in the result JSON.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub input: String,
    pub n: usize,
    pub partition: Vec<usize>,
    pub ordering: String,
    pub tolerance: f64,
    pub max_cycles: usize,
    pub precondition: bool,
    pub seed: Option<u64>,
    pub multiplicities: Option<Vec<usize>>,
    pub result_path: Option<PathBuf>,
    pub trace_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
struct ComplexJson {
    re: f64,
    im: f64,
}

/// The result JSON document. Index lists are zero-based.
#[derive(Debug, Serialize)]
pub struct ResultDocument<'a> {
    status: &'static str,
    cycles: usize,
    eigenvalues: Vec<ComplexJson>,
    residuals: Vec<f64>,
    real_parts: &'a [f64],
    block_structure: &'a [Vec<usize>],
    failed_components: &'a [Vec<usize>],
    precondition_scalar: Option<ComplexJson>,
    wall_time_seconds: f64,
    config: &'a RunConfig,
}

fn status_str(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Converged => "converged",
        SolveStatus::MaxCycles => "max_cycles",
        SolveStatus::Stalled => "stalled",
    }
}

/// Whole-file atomic write: temp sibling plus rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes the trace CSV and/or result JSON named in `config`.
pub fn write_outputs(result: &EberleinResult, config: &RunConfig, wall_time_seconds: f64) -> Result<()> {
    if let Some(trace_path) = &config.trace_path {
        let mut csv = String::from("cycle,off_A,off_B,normC,frob_A,cum_delta\n");
        for rec in &result.log.cycles {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                rec.cycle, rec.off_a, rec.off_b, rec.norm_c, rec.frob_a, rec.cum_delta
            ));
        }
        atomic_write(trace_path, csv.as_bytes())?;
    }
    if let Some(result_path) = &config.result_path {
        let doc = ResultDocument {
            status: status_str(result.status),
            cycles: result.cycles_run,
            eigenvalues: result
                .eigenpairs
                .iter()
                .map(|pair| ComplexJson { re: pair.value.re, im: pair.value.im })
                .collect(),
            residuals: result.eigenpairs.iter().map(|pair| pair.residual).collect(),
            real_parts: &result.real_parts,
            block_structure: &result.block_structure,
            failed_components: &result.failed_components,
            precondition_scalar: result
                .precondition_scalar
                .map(|d| ComplexJson { re: d.re, im: d.im }),
            wall_time_seconds,
            config,
        };
        let json = serde_json::to_string_pretty(&doc).expect("serializable document");
        atomic_write(result_path, json.as_bytes())?;
    }
    Ok(())
}
